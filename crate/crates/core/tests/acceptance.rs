//! Acceptance suite: prints one pass/fail line per criterion.

use std::f64::consts::PI;
use std::io::Write;
use std::result::Result;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tongue_atlas_core::tracer::{boundary_omega, edges_at, global_extremum, TracerConfig};
use tongue_atlas_core::*;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tongue(p: u32, j: i64) -> TongueSpec {
    TongueSpec::new(p, j).unwrap()
}

fn phase_diff(a: f64, b: f64) -> f64 {
    wrap_signed(a - b).abs()
}

fn valid_cases(p: u32) -> &'static [InvolutionCase] {
    if p.is_multiple_of(2) {
        &[InvolutionCase::BPlus, InvolutionCase::BMinus]
    } else {
        &[InvolutionCase::A]
    }
}

fn gauss_oracle() -> Outcome {
    let mut n = 0;
    let (mut worst_mag, mut worst_phase) = (0.0f64, 0.0f64);
    for p in 1..=50u32 {
        for j in 0..p as i64 {
            let w = WindingRatio::new(j, p as i64).unwrap();
            if !w.is_coprime() {
                continue;
            }
            for &case in valid_cases(p) {
                let g = gauss_sum(w, case).map_err(|e| format!("({p}, {j}) {case}: {e}"))?;
                let xi = xi_phase(w, case).map_err(|e| e.to_string())?;
                worst_mag = worst_mag.max((g.magnitude - (p as f64).sqrt()).abs());
                worst_phase = worst_phase.max(phase_diff(g.phase, xi));
                n += 1;
            }
        }
    }
    check(worst_mag < 1e-9 && worst_phase < 1e-9, || {
        format!("max |G| error {worst_mag:.2e}, max phase error {worst_phase:.2e}")
    })?;
    Ok(format!(
        "{n} sums, max |G| error {worst_mag:.1e}, max phase error {worst_phase:.1e}"
    ))
}

fn table_phases() -> Outcome {
    // (p, j, ξ/π)
    let rows: [(u32, i64, f64); 17] = [
        (2, 1, 0.25),
        (3, 1, 1.0 / 6.0),
        (3, 2, -1.0 / 6.0),
        (4, 1, 0.25),
        (4, 3, 0.75),
        (5, 1, 0.2),
        (5, 2, 0.4),
        (5, 3, -0.4),
        (5, 4, -0.2),
        (6, 1, 0.25),
        (6, 5, -0.75),
        (7, 1, 3.0 / 14.0),
        (7, 2, -1.0 / 14.0),
        (7, 3, 9.0 / 14.0),
        (7, 4, -9.0 / 14.0),
        (7, 5, 1.0 / 14.0),
        (7, 6, -3.0 / 14.0),
    ];
    let mut worst = 0.0f64;
    for (p, j, frac) in rows {
        let w = WindingRatio::new(j, p as i64).unwrap();
        let xi = xi_phase(w, InvolutionCase::natural_for(p)).map_err(|e| e.to_string())?;
        let err = phase_diff(xi, frac * PI);
        check(err < 1e-12, || format!("({p}, {j}): {xi} vs {}", frac * PI))?;
        worst = worst.max(err);
    }
    Ok(format!("{} rows, max error {worst:.1e}", rows.len()))
}

fn unit_tongue() -> Outcome {
    let t = tongue(1, 1);
    let (left, right) = trace_tongue_boundary(t, 6.0, 0.25).map_err(|e| e.to_string())?;
    let mut worst_b = 0.0f64;
    for &(k, om) in left.samples.iter().chain(&right.samples) {
        worst_b = worst_b.max((p1_boundary(om) - k).abs());
    }
    check(worst_b < 1e-8, || format!("boundary error {worst_b:.2e}"))?;
    check(
        left.samples.len() == 24 && right.samples.len() == 24,
        || "missing boundary samples".into(),
    )?;

    let (pd, _) = trace_stability_border(t, (0.75, 1.25), 0.025).map_err(|e| e.to_string())?;
    check(pd.samples.len() == 21, || {
        format!("{} of 21 border samples", pd.samples.len())
    })?;
    let worst_s = pd
        .samples
        .iter()
        .map(|s| (s.k - p1_stability_border(s.omega)).abs())
        .fold(0.0, f64::max);
    check(worst_s < 1e-6, || format!("border error {worst_s:.2e}"))?;
    let centre = pd
        .samples
        .iter()
        .find(|s| (s.omega - 1.0).abs() < 1e-12)
        .ok_or("no sample at omega = 1")?;
    check((centre.k - 4.0).abs() < 1e-6, || {
        format!("border at omega = 1 is {}", centre.k)
    })?;
    Ok(format!(
        "boundary error {worst_b:.1e}, border error {worst_s:.1e}, border(1) = {:.9}",
        centre.k
    ))
}

fn edge_widths() -> Outcome {
    let cfg = TracerConfig::default();
    let k = 0.01;
    let mut parts = Vec::new();
    for (p, j) in [(2, 1), (3, 1), (5, 2)] {
        let t = tongue(p, j);
        let (_, l, r) = edges_at(t, &[k], &cfg).map_err(|e| e.to_string())?[0];
        let hw = half_width(p, k);
        let rel = (0.5 * (r - l) - hw).abs() / hw;
        check(rel < 0.01, || {
            format!("({p}, {j}): relative error {rel:.3e}")
        })?;
        parts.push(format!("({p},{j}) {rel:.1e}"));
    }
    Ok(format!("relative half-width errors {}", parts.join(", ")))
}

fn pitchfork() -> Outcome {
    let cfg = FinderConfig::default();
    let t = tongue(2, 1);
    let mut parts = Vec::new();
    for delta in [1e-3, 4e-3, 1.6e-2] {
        let params = MapParams::new(PI + delta, 0.5).unwrap();
        let orbits = find_involution_orbits(t, &params, &cfg).map_err(|e| e.to_string())?;
        // the pitchfork triple: orbits with a point near θ = π/2
        let mut near: Vec<(f64, f64)> = orbits
            .iter()
            .filter_map(|o| {
                o.points
                    .iter()
                    .map(|x| x.theta - PI / 2.0)
                    .find(|d| d.abs() < 0.5)
                    .map(|d| (d, o.trace))
            })
            .collect();
        near.sort_by(|a, b| a.0.total_cmp(&b.0));
        check(near.len() == 3, || {
            format!("delta {delta}: {} orbits near pi/2", near.len())
        })?;
        let expect = (2.0 * delta / PI).sqrt();
        let expect_tr = 2.0 - 2.0 * PI * delta;
        let off_err = (near[0].0 + expect).abs().max((near[2].0 - expect).abs());
        let tr_err = (near[0].1 - expect_tr)
            .abs()
            .max((near[2].1 - expect_tr).abs());
        check(off_err < 0.05 * delta.sqrt(), || {
            format!("delta {delta}: offset error {off_err:.3e}")
        })?;
        check(tr_err < 20.0 * delta * delta, || {
            format!("delta {delta}: trace error {tr_err:.3e}")
        })?;
        parts.push(format!("d={delta}: off {off_err:.1e} tr {tr_err:.1e}"));
    }
    Ok(parts.join("; "))
}

fn period_four_windows() -> Outcome {
    let cfg = FinderConfig::default();
    let seed = TorusPoint::new(0.0, 0.0);
    let trace = |k: f64| -> Result<f64, String> {
        let params = MapParams::new(k, 0.5).unwrap();
        let o = find_non_involution_orbit(seed, 4, &params, &cfg)
            .map_err(|e| format!("k = {k}: {e}"))?;
        check(torus_distance(o.points[0], seed) < 1e-12, || {
            format!("k = {k}: orbit moved")
        })?;
        Ok(o.trace)
    };
    let stable =
        |k: f64| trace(k).map(|tr| classify_stability(tr, MARGINAL_TOL) == Stability::Stable);
    let mut ends = Vec::new();
    let n = 400;
    let h = 3.5 / n as f64;
    let mut prev = stable(0.01)?;
    for i in 1..=n {
        let (a, b) = (0.01 + (i - 1) as f64 * h, 0.01 + i as f64 * h);
        let cur = stable(b)?;
        if cur != prev {
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if stable(mid)? == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ends.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    check(stable(0.01)?, || "not stable at small k".into())?;
    check(ends.len() == 3, || format!("stability changes at {ends:?}"))?;
    let expect = [0.7320, 2.7320, 2.8284];
    for (e, x) in ends.iter().zip(expect) {
        check((e - x).abs() < 1e-3, || format!("endpoint {e} vs {x}"))?;
    }
    Ok(format!(
        "stable on (0, {:.4}] and [{:.4}, {:.4}]",
        ends[0], ends[1], ends[2]
    ))
}

fn cascades() -> Outcome {
    let cfg = FinderConfig::default();
    // (p, j, Ω, k_s, k_inf, α, δ)
    let rows = [
        (1, 0, 0.3692, 4.6239, 5.1290, -4.0645, 8.5839),
        (2, 1, 0.3624, 2.0019, 2.2790, -3.9919, 8.8307),
    ];
    let mut parts = Vec::new();
    for (p, j, omega, ks, kinf, alpha, delta) in rows {
        let r = follow_cascade(tongue(p, j), omega, &cfg, 4)
            .map_err(|e| format!("({p},{j}) {omega}: {e}"))?;
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        let label = format!("({p},{j})/{omega}");
        check((r.k_s() - ks).abs() < 1e-3, || {
            format!("{label}: k_s {}", r.k_s())
        })?;
        check(rel(r.delta_est, delta) < 0.03, || {
            format!("{label}: delta {}", r.delta_est)
        })?;
        check(rel(r.alpha_est, alpha) < 0.03, || {
            format!("{label}: alpha {}", r.alpha_est)
        })?;
        check(rel(r.k_infinity, kinf) < 0.03, || {
            format!("{label}: k_inf {}", r.k_infinity)
        })?;
        let (dd, da) = universality_check(&r).map_err(|e| e.to_string())?;
        check(dd.abs() < 0.1 && da.abs() < 0.1, || {
            format!("{label}: universal deviations {dd}, {da}")
        })?;
        parts.push(format!(
            "{label} k_s {:.5} k_inf {:.5} delta {:.3} alpha {:.3}",
            r.k_s(),
            r.k_infinity,
            r.delta_est,
            r.alpha_est
        ));
    }
    Ok(parts.join("; "))
}

fn period_six_pair() -> Outcome {
    let params = MapParams::new(0.345, 0.5).unwrap();
    let cfg = FinderConfig {
        grid_points: 512,
        ..FinderConfig::default()
    };
    let mut found: Vec<OrbitRecord> = Vec::new();
    for s in [2, 7] {
        let line = zero_kick_momentum(6, 3, s);
        for o in find_orbits_from_line(6, line, &params, &cfg).map_err(|e| e.to_string())? {
            if o.min_involution_line_distance(&params) > 0.05
                && !found.iter().any(|f| f.same_point_set(&o, 1e-6))
            {
                found.push(o);
            }
        }
    }
    // both the stable and the unstable pair must map onto each other
    let mut parts = Vec::new();
    for stability in [Stability::Stable, Stability::Unstable] {
        let pair: Vec<&OrbitRecord> = found.iter().filter(|o| o.stability == stability).collect();
        check(pair.len() == 2, || {
            format!("{} off-line {stability:?} period-6 orbits", pair.len())
        })?;
        let (a, b) = (pair[0], pair[1]);
        let ca = involution_pairing(a, b, involution_a, 1e-8).ok_or("no I_A pairing")?;
        let cb =
            involution_pairing(a, b, |x| involution_b(x, &params), 1e-8).ok_or("no I_B pairing")?;
        check((ca + 1) % 6 == cb, || format!("pairing offsets {ca}, {cb}"))?;
        parts.push(format!(
            "{stability:?} pair: line distances {:.3}, {:.3}, offsets A {ca} B {cb}",
            a.min_involution_line_distance(&params),
            b.min_involution_line_distance(&params)
        ));
    }
    Ok(parts.join("; "))
}

fn random_params(rng: &mut ChaCha8Rng) -> MapParams {
    MapParams::new(rng.gen_range(0.0..8.0), rng.gen_range(0.0..1.0)).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::new(rng.gen_range(0.0..TWO_PI), rng.gen_range(0.0..TWO_PI))
}

const N_RANDOM: usize = 1000;

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);

    for _ in 0..N_RANDOM {
        let (x, params) = (random_point(&mut rng), random_params(&mut rng));
        let d = |a: TorusPoint, b: TorusPoint| torus_distance(a, b);
        check(d(involution_a(involution_a(x)), x) < 1e-12, || {
            format!("I_A^2 at {x:?}")
        })?;
        check(
            d(involution_b(involution_b(x, &params), &params), x) < 1e-12,
            || format!("I_B^2 at {x:?}"),
        )?;
        check(d(reversor(reversor(x)), x) < 1e-12, || {
            format!("R^2 at {x:?}")
        })?;
        check(
            d(involution_b(involution_a(x), &params), step(x, &params)) < 1e-12,
            || format!("I_B I_A != M at {x:?}"),
        )?;
        check(
            d(
                reversor(step(reversor(x), &params)),
                step_inverse(x, &params),
            ) < 1e-12,
            || format!("R M R != M^-1 at {x:?}"),
        )?;
    }

    let mut worst_det = 0.0f64;
    for _ in 0..N_RANDOM {
        let (x, params) = (random_point(&mut rng), random_params(&mut rng));
        let n = rng.gen_range(1..=64);
        let m = iterate_lifted(x.theta, x.momentum, &params, n).jacobian;
        let scale = 1.0 + m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
        let err = (m.det() - 1.0).abs() / scale;
        worst_det = worst_det.max(err);
        check(err < 1e-12, || {
            format!("det error {err:.2e} (relative) for n = {n}")
        })?;
    }

    let cfg = FinderConfig {
        grid_points: 1024,
        ..FinderConfig::default()
    };
    let (mut n_orbits, mut n_inventories) = (0, 0);
    while n_inventories < N_RANDOM {
        let p = rng.gen_range(1..=5u32);
        let j = rng.gen_range(0..p as i64);
        let t = tongue(p, j);
        if !t.is_coprime() {
            continue;
        }
        let k = rng.gen_range(0.05..3.0);
        let omega = t.vertex_omega() + rng.gen_range(-0.8..0.8) * half_width(p, k);
        let params = MapParams::new(k, omega).unwrap();
        let orbits = find_involution_orbits(t, &params, &cfg).map_err(|e| e.to_string())?;
        for o in &orbits {
            let x = o.points[0];
            let run = iterate_lifted(x.theta, x.momentum, &params, p as usize);
            let (te, je) = run.end();
            let wj = (je - x.momentum) / TWO_PI;
            let ws = (te - x.theta) / TWO_PI;
            check(
                (wj - wj.round()).abs() < 1e-9 && (ws - ws.round()).abs() < 1e-9,
                || {
                    format!("non-integer winding ({wj}, {ws}) for ({p}, {j}) at k = {k}, omega = {omega}")
                },
            )?;
            check(
                wj.round() as i64 == o.winding_j && wj.round() as i64 == j,
                || format!("momentum winding {wj} for tongue ({p}, {j})"),
            )?;
            check(o.closure_error(&params) < 1e-9, || "closure".into())?;
            // the reversed orbit is in the inventory, with the same trace
            let image = OrbitRecord::from_start(reversor(x), p, &params, 1e-9)
                .map_err(|e| e.to_string())?;
            let twin = orbits.iter().find(|q| q.same_point_set(&image, 1e-7)).ok_or_else(|| {
                format!("reversor image of an orbit of ({p}, {j}) missing at k = {k}, omega = {omega}")
            })?;
            check(
                (twin.trace - o.trace).abs() < 1e-8 * (1.0 + o.trace.abs()),
                || "twin trace".into(),
            )?;
            n_orbits += 1;
        }
        n_inventories += 1;
    }

    let tcfg = TracerConfig::default();
    let mut worst_gap = 0.0f64;
    for _ in 0..N_RANDOM {
        let p = rng.gen_range(1..=3u32);
        let j = rng.gen_range(0..p as i64);
        let t = tongue(p, j);
        if !t.is_coprime() {
            continue;
        }
        let k = rng.gen_range(0.005..0.02);
        let side = if rng.gen_bool(0.5) {
            Side::Left
        } else {
            Side::Right
        };
        let edge = boundary_omega(t, k, side, &tcfg).map_err(|e| e.to_string())?;
        let d_omega = 1e-5 * k;
        let omega = edge - side.sign() * d_omega;
        let params = MapParams::with_case(k, omega, InvolutionCase::natural_for(p)).unwrap();
        let (x0, _) = global_extremum(t, &params, side, 1024).map_err(|e| e.to_string())?;
        let f = |x: f64| residuals(x, t, &params, 0).f_j;
        let lo = bracketed_root(f, x0 - 0.5, x0, 1e-13, 200).map_err(|e| e.to_string())?;
        let hi = bracketed_root(f, x0, x0 + 0.5, 1e-13, 200).map_err(|e| e.to_string())?;
        let expect = coalescence_gap(t, k, d_omega).map_err(|e| e.to_string())?;
        let rel = ((hi - lo) - expect).abs() / expect;
        worst_gap = worst_gap.max(rel);
        check(rel < 0.05, || {
            format!("({p}, {j}) k = {k}: gap {} vs {expect}", hi - lo)
        })?;
    }

    Ok(format!(
        "{N_RANDOM} identity points, {N_RANDOM} products (det rel err {worst_det:.1e}), \
         {n_inventories} inventories / {n_orbits} orbits, gap rel err {worst_gap:.1e}"
    ))
}

type Criterion = (u32, &'static str, fn() -> Outcome, Duration);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 9] = [
        (1, "gauss-sum oracle", gauss_oracle, Duration::from_secs(1)),
        (2, "phase table", table_phases, Duration::from_secs(1)),
        (3, "p = 1 exactness", unit_tongue, Duration::from_secs(10)),
        (4, "first-order edges", edge_widths, Duration::from_secs(30)),
        (5, "pitchfork", pitchfork, Duration::from_secs(5)),
        (
            6,
            "period-4 windows",
            period_four_windows,
            Duration::from_secs(5),
        ),
        (7, "cascades", cascades, Duration::from_secs(300)),
        (8, "period-6 pair", period_six_pair, Duration::from_secs(10)),
        (9, "property suites", properties, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (n, name, run, budget) in criteria {
        let t0 = Instant::now();
        let out = run();
        let dt = t0.elapsed();
        let line = match (&out, dt <= budget) {
            (Ok(detail), true) => format!("PASS {name}: {detail}"),
            (Ok(detail), false) => format!("FAIL {name}: over budget {budget:?}; {detail}"),
            (Err(why), _) => format!("FAIL {name}: {why}"),
        };
        // straight to the handle so the line shows without --nocapture
        let mut stdout = std::io::stdout().lock();
        writeln!(stdout, "criterion {n}: {line} [{:.2} s]", dt.as_secs_f64()).unwrap();
        if line.starts_with("FAIL") {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
