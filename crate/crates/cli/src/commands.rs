use rayon::prelude::*;
use serde_json::json;
use tongue_atlas_core::cascade::CascadeReport;
use tongue_atlas_core::number_theory::xi_phase_rational;
use tongue_atlas_core::tracer::{
    census, trace_stability_border_with, trace_tongue_boundary_with, CensusGrid,
};
use tongue_atlas_core::*;

use crate::config::{need, RunConfig};
use crate::output::{Report, Table};
use crate::Usage;

fn tongue(cfg: &RunConfig) -> anyhow::Result<TongueSpec> {
    Ok(TongueSpec::new(need(cfg.p, "p")?, need(cfg.j, "j")?)?)
}

fn map_params(cfg: &RunConfig) -> anyhow::Result<MapParams> {
    Ok(MapParams::new(
        need(cfg.k, "k")?,
        need(cfg.omega, "omega")?,
    )?)
}

fn parse_case(s: &str) -> anyhow::Result<Option<InvolutionCase>> {
    Ok(match s {
        "all" => None,
        "A" | "a" => Some(InvolutionCase::A),
        "B+" | "b+" | "bplus" => Some(InvolutionCase::BPlus),
        "B-" | "b-" | "bminus" => Some(InvolutionCase::BMinus),
        other => {
            return Err(Usage(format!("unknown case {other:?}; expected all, A, B+ or B-")).into())
        }
    })
}

/// Forward iterates of an `m × m` lattice of seeds, `m = ⌈√n_seeds⌉`,
/// taken row by row.
pub fn portrait(cfg: &RunConfig) -> anyhow::Result<Report> {
    let params = map_params(cfg)?;
    let n_seeds = cfg.n_seeds.unwrap_or(64);
    let n_iters = cfg.n_iters.unwrap_or(1000);
    let m = (n_seeds as f64).sqrt().ceil().max(1.0) as usize;
    let runs: Vec<Vec<TorusPoint>> = (0..n_seeds)
        .into_par_iter()
        .map(|i| {
            let cell = |c: usize| TWO_PI * (c as f64 + 0.5) / m as f64;
            let mut x = TorusPoint::new(cell(i % m), cell(i / m));
            let mut run = Vec::with_capacity(n_iters + 1);
            run.push(x);
            for _ in 0..n_iters {
                x = step(x, &params);
                run.push(x);
            }
            run
        })
        .collect();
    let mut table = Table::new(&["seed_id", "iter", "theta", "J"]);
    for (id, run) in runs.iter().enumerate() {
        for (it, x) in run.iter().enumerate() {
            table.push(vec![
                id.into(),
                it.into(),
                x.theta.into(),
                x.momentum.into(),
            ]);
        }
    }
    let data = json!({
        "n_seeds": n_seeds,
        "n_iters": n_iters,
        "seeds": runs
            .iter()
            .map(|r| r.iter().map(|x| [x.theta, x.momentum]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    });
    Ok(Report {
        command: "portrait",
        data,
        table,
    })
}

pub fn orbits(cfg: &RunConfig) -> anyhow::Result<Report> {
    let params = map_params(cfg)?;
    let finder = cfg.finder();
    let (found, tongue) = match cfg.line_j {
        Some(line) => {
            let p = need(cfg.p, "p")?;
            (find_orbits_from_line(p, line, &params, &finder)?, None)
        }
        None => {
            let t = tongue(cfg)?;
            let found = match parse_case(cfg.case.as_deref().unwrap_or("all"))? {
                None => find_involution_orbits(t, &params, &finder)?,
                Some(c) => find_case_orbits(t, &params.case(c), &finder)?,
            };
            (found, Some(t))
        }
    };
    let mut table = Table::new(&[
        "orbit",
        "index",
        "theta",
        "J",
        "period",
        "winding_j",
        "winding_s",
        "trace",
        "stability",
    ]);
    for (i, o) in found.iter().enumerate() {
        for (n, x) in o.points.iter().enumerate() {
            table.push(vec![
                i.into(),
                n.into(),
                x.theta.into(),
                x.momentum.into(),
                o.period.into(),
                o.winding_j.into(),
                o.winding_s.into(),
                o.trace.into(),
                format!("{:?}", o.stability).to_lowercase().into(),
            ]);
        }
    }
    let data = json!({
        "tongue": tongue,
        "k": params.k_tilde,
        "omega": params.omega,
        "orbits": found,
    });
    Ok(Report {
        command: "orbits",
        data,
        table,
    })
}

fn k_grid(cfg: &RunConfig, from_zero: bool) -> anyhow::Result<(f64, f64)> {
    let k_max = need(cfg.k_max, "k-max")?;
    let step = cfg.step.unwrap_or(k_max / 20.0);
    if !(k_max > 0.0 && step > 0.0) || (from_zero && k_max / step > 1e7) {
        return Err(Usage(format!(
            "need k-max > 0 and a reasonable step > 0, got {k_max}, {step}"
        ))
        .into());
    }
    Ok((k_max, step))
}

/// First-order straight-line edges from the vertex.
pub fn edges(cfg: &RunConfig) -> anyhow::Result<Report> {
    let t = tongue(cfg)?;
    let (k_max, step) = k_grid(cfg, true)?;
    let n = (k_max / step + 1e-9).floor() as usize;
    let mut table = Table::new(&["k", "omega_left", "omega_right"]);
    let mut rows = Vec::new();
    for i in 0..=n {
        let k = i as f64 * step;
        let (l, r) = tongue_edges(t, k)?;
        table.push(vec![k.into(), l.into(), r.into()]);
        rows.push([k, l, r]);
    }
    Ok(Report {
        command: "edges",
        data: json!({ "tongue": t, "edges": rows }),
        table,
    })
}

/// Numerically traced tongue boundary.
pub fn boundary(cfg: &RunConfig) -> anyhow::Result<Report> {
    let t = tongue(cfg)?;
    let (k_max, step) = k_grid(cfg, false)?;
    let (left, right) = trace_tongue_boundary_with(t, k_max, step, &cfg.tracer())?;
    let mut table = Table::new(&["k", "omega_left", "omega_right"]);
    for (&(k, l), &(_, r)) in left.samples.iter().zip(&right.samples) {
        table.push(vec![k.into(), l.into(), r.into()]);
    }
    Ok(Report {
        command: "boundary",
        data: json!({ "left": left, "right": right }),
        table,
    })
}

pub fn border(cfg: &RunConfig) -> anyhow::Result<Report> {
    let t = tongue(cfg)?;
    let lo = need(cfg.omega_min, "omega-min")?;
    let hi = need(cfg.omega_max, "omega-max")?;
    let step = cfg.step.unwrap_or((hi - lo) / 20.0);
    let (pd, co) = trace_stability_border_with(t, (lo, hi), step, &cfg.tracer())?;
    let mut table = Table::new(&["crossing", "omega", "k", "trace"]);
    for (name, curve) in [("period_doubling", &pd), ("coalescence", &co)] {
        for s in &curve.samples {
            table.push(vec![
                name.into(),
                s.omega.into(),
                s.k.into(),
                s.trace.into(),
            ]);
        }
    }
    Ok(Report {
        command: "border",
        data: json!({ "period_doubling": pd, "coalescence": co }),
        table,
    })
}

fn cascade_table(r: &CascadeReport) -> Table {
    let mut table = Table::new(&[
        "level",
        "period",
        "k",
        "dtheta",
        "delta_estimate",
        "alpha_estimate",
        "k_infinity",
    ]);
    let last = r.k_values.len() - 1;
    for (n, &k) in r.k_values.iter().enumerate() {
        let back2 = n.checked_sub(2);
        table.push(vec![
            n.into(),
            ((r.tongue.p as usize) << n).into(),
            k.into(),
            n.checked_sub(1)
                .and_then(|i| r.dtheta_values.get(i).copied())
                .into(),
            back2.and_then(|i| r.delta_estimates.get(i).copied()).into(),
            back2.and_then(|i| r.alpha_estimates.get(i).copied()).into(),
            (n == last).then_some(r.k_infinity).into(),
        ]);
    }
    table
}

pub fn cascade(cfg: &RunConfig) -> anyhow::Result<Report> {
    let t = tongue(cfg)?;
    let omega = need(cfg.omega, "omega")?;
    let n_max = cfg.n_max.unwrap_or(4);
    let report = match (cfg.seed_k, cfg.seed_theta, cfg.seed_j) {
        (None, None, None) => follow_cascade(t, omega, &cfg.finder(), n_max)?,
        (Some(k), Some(th), Some(j)) => {
            follow_cascade_from(t, omega, k, TorusPoint::new(th, j), n_max)?
        }
        _ => return Err(Usage("--seed-k, --seed-theta and --seed-j go together".into()).into()),
    };
    let universality = universality_check(&report).ok();
    Ok(Report {
        command: "cascade",
        table: cascade_table(&report),
        data: json!({ "report": report, "universality_deviation": universality }),
    })
}

pub fn census_cmd(cfg: &RunConfig) -> anyhow::Result<Report> {
    let k_min = need(cfg.k_min.or(cfg.k), "k-min")?;
    let omega_min = need(cfg.omega_min.or(cfg.omega), "omega-min")?;
    let grid = CensusGrid {
        k_min,
        k_max: cfg.k_max.unwrap_or(k_min),
        n_k: cfg.n_k.unwrap_or(1),
        omega_min,
        omega_max: cfg.omega_max.unwrap_or(omega_min),
        n_omega: cfg.n_omega.unwrap_or(1),
    };
    let cells = census(&grid, cfg.p_max.unwrap_or(6), &cfg.finder())?;
    let mut table = Table::new(&[
        "k", "omega", "p", "j", "orbits", "stable", "unstable", "marginal",
    ]);
    for c in &cells {
        for e in &c.entries {
            table.push(vec![
                c.k.into(),
                c.omega.into(),
                e.p.into(),
                e.j.into(),
                e.orbits.into(),
                e.stable.into(),
                e.unstable.into(),
                e.marginal.into(),
            ]);
        }
    }
    Ok(Report {
        command: "census",
        data: json!({ "grid": grid, "cells": cells }),
        table,
    })
}

pub fn gauss(cfg: &RunConfig) -> anyhow::Result<Report> {
    let p_max = need(cfg.p_max, "p-max")?;
    if p_max == 0 || p_max > 100_000 {
        return Err(Usage(format!("p-max must be in 1..=100000, got {p_max}")).into());
    }
    let mut table = Table::new(&[
        "p",
        "j",
        "case",
        "magnitude",
        "xi",
        "xi_numerator",
        "xi_denominator",
        "phase_direct",
        "error",
    ]);
    let mut rows = Vec::new();
    for p in 1..=p_max {
        let cases: &[InvolutionCase] = if p % 2 == 0 {
            &[InvolutionCase::BPlus, InvolutionCase::BMinus]
        } else {
            &[InvolutionCase::A]
        };
        for j in 0..p as i64 {
            let w = WindingRatio::new(j, p as i64)?;
            if !w.is_coprime() {
                continue;
            }
            for &case in cases {
                let g = gauss_sum(w, case)?;
                let (num, den) = xi_phase_rational(w, case)?;
                let xi = xi_phase(w, case)?;
                let err = (g.magnitude - (p as f64).sqrt())
                    .abs()
                    .max(wrap_signed(g.phase - xi).abs());
                table.push(vec![
                    p.into(),
                    j.into(),
                    case.to_string().into(),
                    g.magnitude.into(),
                    xi.into(),
                    num.into(),
                    den.into(),
                    g.phase.into(),
                    err.into(),
                ]);
                rows.push(json!({
                    "p": p, "j": j, "case": case.to_string(), "magnitude": g.magnitude,
                    "xi": xi, "xi_over_pi": [num, den], "phase_direct": g.phase, "error": err,
                }));
            }
        }
    }
    Ok(Report {
        command: "gauss",
        data: json!({ "sums": rows }),
        table,
    })
}

pub fn resonance3() -> anyhow::Result<Report> {
    let r = resonance3_eta();
    let mut table = Table::new(&["eta", "c", "c_prime", "a", "a_prime", "omega_freq"]);
    table.push(vec![
        r.eta.into(),
        r.c_val.into(),
        r.c_prime.into(),
        r.a_val.into(),
        r.a_prime.into(),
        r.omega_freq.into(),
    ]);
    Ok(Report {
        command: "resonance3",
        data: serde_json::to_value(r)?,
        table,
    })
}
