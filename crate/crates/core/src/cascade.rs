//! Period-doubling cascades above the stability border and estimates of
//! the Feigenbaum constants.
//!
//! Each doubled orbit is reached by branch switching at fixed amplitude:
//! with `v` the eigenvector of the parent's monodromy at eigenvalue −1 and
//! `w ⟂ v`, the unknowns are `(k̃, t)` in
//!
//! ```text
//! x = x_parent(k̃) + a v + t w,     M^{2P}(x) = x
//! ```
//!
//! where the parent orbit is re-solved at every k̃. The amplitude `a` is
//! grown until the doubled orbit itself passes `Tr = −2`, and the crossing
//! is then bisected in `a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finder::{newton_periodic, FinderConfig};
use crate::map::{
    involution_fixed_line, iterate_lifted, monodromy, wrap_signed, InvolutionCase, Jacobian2x2,
    MapParams, OrbitRecord, TorusPoint,
};
use crate::perturbative::TongueSpec;
use crate::tracer::border::{follow_to_doubling, stable_seed};
use crate::tracer::TracerConfig;

/// Universal scaling of the parameter intervals for area-preserving maps.
pub const DELTA_UNIVERSAL: f64 = 8.721;
/// Universal scaling of the orbit gaps for area-preserving maps.
pub const ALPHA_UNIVERSAL: f64 = -4.018;

pub const MAX_LEVELS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeReport {
    pub tongue: TongueSpec,
    pub omega: f64,
    /// `k̃ₙ`, where the `2ⁿp` orbit loses stability; `k_values[0]` is the
    /// stability border of the tongue itself.
    pub k_values: Vec<f64>,
    /// `δθₙ` for `n = 1, 2, …`: angle gap between the two symmetric points of
    /// the `2ⁿp` orbit at `k̃ₙ`.
    pub dtheta_values: Vec<f64>,
    pub delta_estimates: Vec<f64>,
    pub alpha_estimates: Vec<f64>,
    pub delta_est: f64,
    pub alpha_est: f64,
    pub k_infinity: f64,
    pub n_max: usize,
    /// One point of the `2ⁿp` orbit at `k_values[n]`; empty when the report
    /// was built from bare numbers.
    #[serde(default)]
    pub level_points: Vec<TorusPoint>,
}

impl CascadeReport {
    /// Builds the estimates from bifurcation values and gaps.
    pub fn from_levels(
        tongue: TongueSpec,
        omega: f64,
        k_values: Vec<f64>,
        dtheta_values: Vec<f64>,
    ) -> Self {
        let delta_estimates: Vec<f64> = k_values
            .windows(3)
            .map(|w| (w[1] - w[0]) / (w[2] - w[1]))
            .collect();
        let alpha_estimates: Vec<f64> = dtheta_values.windows(2).map(|w| w[0] / w[1]).collect();
        let delta_est = delta_estimates.last().copied().unwrap_or(f64::NAN);
        let alpha_est = alpha_estimates.last().copied().unwrap_or(f64::NAN);
        let k_infinity = match k_values.as_slice() {
            [.., a, b] if delta_est.is_finite() => b + (b - a) / (delta_est - 1.0),
            _ => f64::NAN,
        };
        Self {
            tongue,
            omega,
            n_max: k_values.len().saturating_sub(1),
            k_values,
            dtheta_values,
            delta_estimates,
            alpha_estimates,
            delta_est,
            alpha_est,
            k_infinity,
            level_points: Vec::new(),
        }
    }

    pub fn k_s(&self) -> f64 {
        self.k_values[0]
    }
}

/// Relative deviations of the `δ` and `α` estimates from the universal
/// values.
pub fn universality_check(report: &CascadeReport) -> Result<(f64, f64)> {
    if report.k_values.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 bifurcations, got {}",
            report.k_values.len()
        )));
    }
    Ok((
        (report.delta_est - DELTA_UNIVERSAL) / DELTA_UNIVERSAL,
        (report.alpha_est - ALPHA_UNIVERSAL) / ALPHA_UNIVERSAL.abs(),
    ))
}

type V2 = [f64; 2];

fn add(a: V2, b: V2, s: f64) -> V2 {
    [a[0] + s * b[0], a[1] + s * b[1]]
}

fn inf_norm(g: V2) -> f64 {
    g[0].abs().max(g[1].abs())
}

/// Matrix in `(θ, J)` ordering from one in `(J, θ)` ordering.
fn theta_j(m: Jacobian2x2) -> Jacobian2x2 {
    Jacobian2x2::new(m.d, m.c, m.b, m.a)
}

/// Displacement of `M^n` at `x = (θ, J)`, its Jacobian and its k̃-derivative,
/// all in `(θ, J)` ordering.
fn displacement(x: V2, k: f64, omega: f64, n: usize) -> (V2, Jacobian2x2, V2) {
    let params = MapParams {
        k_tilde: k,
        omega,
        involution_case: InvolutionCase::A,
    };
    let run = iterate_lifted(x[0], x[1], &params, n);
    let (te, je) = run.end();
    (
        [wrap_signed(te - x[0]), wrap_signed(je - x[1])],
        theta_j(run.jacobian),
        [run.dk[1], run.dk[0]],
    )
}

fn solve_periodic(x: V2, k: f64, omega: f64, p: usize) -> Result<(V2, Jacobian2x2)> {
    let params = MapParams::new(k, omega)?;
    let sol = newton_periodic(x[0], x[1], p, &params, 1e-13, 80)?;
    Ok((
        [sol.point.theta, sol.point.momentum],
        theta_j(sol.monodromy),
    ))
}

struct Branch {
    x_parent: V2,
    omega: f64,
    p: usize,
    v: V2,
    w: V2,
}

struct BranchPoint {
    k: f64,
    t: f64,
    x: V2,
    trace: f64,
}

impl Branch {
    fn parent(&self, k: f64) -> Result<(V2, V2)> {
        let (x, m) = solve_periodic(self.x_parent, k, self.omega, self.p)?;
        let (_, _, dk) = displacement(x, k, self.omega, self.p);
        let dxdk = m
            .minus_identity()
            .solve([-dk[0], -dk[1]], 1e-300)
            .ok_or(Error::SingularJacobian { det: 0.0 })?;
        Ok((x, dxdk))
    }

    fn residual(&self, a: f64, k: f64, t: f64) -> Result<(V2, Jacobian2x2, V2, Jacobian2x2)> {
        let (xp, dxdk) = self.parent(k)?;
        let x = add(add(xp, self.v, a), self.w, t);
        let (g, m, dk) = displacement(x, k, self.omega, 2 * self.p);
        let a_mi = m.minus_identity();
        let c0 = add(a_mi.apply(dxdk), dk, 1.0);
        let c1 = a_mi.apply(self.w);
        Ok((g, Jacobian2x2::new(c0[0], c1[0], c0[1], c1[1]), x, m))
    }

    /// Damped Newton in `(k̃, t)` at fixed amplitude `a`.
    fn solve(&self, a: f64, mut k: f64, mut t: f64) -> Result<BranchPoint> {
        let (mut g, mut jm, mut x, mut m) = self.residual(a, k, t)?;
        for _ in 0..100 {
            if inf_norm(g) < 1e-13 {
                break;
            }
            let d = jm
                .solve([-g[0], -g[1]], 1e-300)
                .ok_or(Error::SingularJacobian { det: jm.det() })?;
            let g0 = g[0].hypot(g[1]);
            let mut lam = 1.0;
            let mut moved = false;
            for _ in 0..50 {
                let (kn, tn) = (k + lam * d[0], t + lam * d[1]);
                if let Ok(r) = self.residual(a, kn, tn) {
                    if r.0[0].hypot(r.0[1]) < g0 {
                        (k, t) = (kn, tn);
                        (g, jm, x, m) = r;
                        moved = true;
                        break;
                    }
                }
                lam *= 0.5;
            }
            if !moved {
                break;
            }
        }
        let res = inf_norm(g);
        if res < 1e-11 {
            Ok(BranchPoint {
                k,
                t,
                x,
                trace: m.trace(),
            })
        } else {
            Err(Error::NoConvergence {
                iterations: 100,
                residual: res,
            })
        }
    }
}

/// Finds where the orbit doubled off the period-`p` orbit through `x` at
/// `k_prev` loses stability. Returns `(k̃, x)` on the doubled orbit.
fn next_doubling(x: V2, k_prev: f64, omega: f64, p: usize, a0: f64) -> Result<(f64, V2)> {
    let (_, m, _) = displacement(x, k_prev, omega, p);
    // (θ, J) ordering here; eigenvector works on any ordering
    let v = m.eigenvector(-1.0);
    let mut br = Branch {
        x_parent: x,
        omega,
        p,
        v,
        w: [-v[1], v[0]],
    };
    let mut a = a0;
    let (mut k, mut t) = (k_prev, 0.0);
    let mut prev: Option<(f64, f64, f64)> = None;
    let mut shrinks = 0;
    let mut retries = 0;
    let hi_a = loop {
        let bp = match br.solve(a, k, t) {
            Ok(bp) => bp,
            Err(e) => {
                // step too long for the current predictor: back off
                retries += 1;
                if retries > 30 {
                    return Err(e);
                }
                a = match prev {
                    Some((ap, _, _)) => 0.5 * (ap + a),
                    None => 0.25 * a,
                };
                continue;
            }
        };
        if bp.trace < -2.0 {
            if prev.is_none() && shrinks < 20 {
                a *= 0.25;
                shrinks += 1;
                continue;
            }
            break a;
        }
        br.x_parent = br.parent(bp.k)?.0;
        prev = Some((a, bp.k, bp.t));
        (k, t) = (bp.k, bp.t);
        a *= 1.25;
        if a > 2.0 {
            return Err(Error::NoConvergence {
                iterations: 0,
                residual: a,
            });
        }
    };
    let (mut alo, mut klo, mut tlo) = prev.ok_or(Error::NoConvergence {
        iterations: 0,
        residual: a,
    })?;
    let mut ahi = hi_a;
    for _ in 0..80 {
        let am = 0.5 * (alo + ahi);
        if am == alo || am == ahi {
            break;
        }
        let bp = br.solve(am, klo, tlo)?;
        if bp.trace > -2.0 {
            (alo, klo, tlo) = (am, bp.k, bp.t);
        } else {
            ahi = am;
        }
    }
    let bp = br.solve(alo, klo, tlo)?;
    Ok((bp.k, bp.x))
}

/// Gap `θ(inner) − θ(outer)` between the two points of `orbit` on an
/// involution fixed line; the inner one is where the −1 eigenvector is
/// tangent to the line. Falls back to `θ₀ − θ_{p/2}`.
pub fn symmetric_gap(orbit: &OrbitRecord, params: &MapParams) -> Result<f64> {
    let tol = 1e-7;
    let sym: Vec<(usize, InvolutionCase)> = orbit
        .points
        .iter()
        .enumerate()
        .filter_map(|(i, &x)| involution_fixed_line(x, params, tol).map(|c| (i, c)))
        .collect();
    let half = orbit.period as usize / 2;
    if sym.len() != 2 {
        return Ok(wrap_signed(
            orbit.points[0].theta - orbit.points[half].theta,
        ));
    }
    let mut align = [0.0; 2];
    for (slot, &(i, case)) in sym.iter().enumerate() {
        let x = orbit.points[i];
        let m = monodromy(&orbit.rotated(i, params)?, params)?;
        let v = m.eigenvector(-1.0);
        // tangent in (J, θ) ordering
        let tan = match case {
            InvolutionCase::A => [0.0, 1.0],
            _ => [0.5 * params.k_tilde * x.theta.cos(), 1.0],
        };
        let n = tan[0].hypot(tan[1]);
        align[slot] = (v[0] * tan[0] + v[1] * tan[1]).abs() / n;
    }
    let (inner, outer) = if align[0] >= align[1] {
        (sym[0].0, sym[1].0)
    } else {
        (sym[1].0, sym[0].0)
    };
    Ok(wrap_signed(
        orbit.points[inner].theta - orbit.points[outer].theta,
    ))
}

/// Follows the cascade of tongue `t` at fixed Ω through `n_max` doublings,
/// starting from the first stable orbit met when k̃ increases from the edge.
pub fn follow_cascade(
    t: TongueSpec,
    omega: f64,
    cfg: &FinderConfig,
    n_max: usize,
) -> Result<CascadeReport> {
    check_levels(n_max)?;
    let tcfg = TracerConfig {
        finder: *cfg,
        ..TracerConfig::default()
    };
    let (k_seed, seed) = stable_seed(t, omega, &tcfg)?;
    follow_cascade_from(t, omega, k_seed, seed.points[0], n_max)
}

fn check_levels(n_max: usize) -> Result<()> {
    if n_max == 0 || n_max > MAX_LEVELS {
        return Err(Error::InvalidInput(format!(
            "n_max must be in 1..={MAX_LEVELS}, got {n_max}"
        )));
    }
    Ok(())
}

/// Like [`follow_cascade`], but from a chosen stable period-`p` orbit point
/// `seed` at kick `k_seed`. Useful when several stable branches coexist.
pub fn follow_cascade_from(
    t: TongueSpec,
    omega: f64,
    k_seed: f64,
    seed: TorusPoint,
    n_max: usize,
) -> Result<CascadeReport> {
    check_levels(n_max)?;
    let p0 = t.p as usize;
    let (k0, x0, _) = follow_to_doubling(
        p0,
        omega,
        k_seed,
        seed,
        0.01,
        TracerConfig::default().k_limit,
        200,
    )?
    .ok_or(Error::CascadeLost {
        level: 0,
        k_values: Vec::new(),
    })?;
    let mut k_values = vec![k0];
    let mut level_points = vec![x0];
    let mut dtheta_values = Vec::new();
    let mut x = [x0.theta, x0.momentum];
    let mut p = p0;
    let mut a = 1e-3;
    for level in 1..=n_max {
        let lost = |k_values: &Vec<f64>| Error::CascadeLost {
            level,
            k_values: k_values.clone(),
        };
        let (kn, xn) = next_doubling(x, *k_values.last().unwrap(), omega, p, a)
            .map_err(|_| lost(&k_values))?;
        if kn <= *k_values.last().unwrap() {
            return Err(lost(&k_values));
        }
        p *= 2;
        let params = MapParams::new(kn, omega)?;
        let orbit = OrbitRecord::from_start(TorusPoint::new(xn[0], xn[1]), p as u32, &params, 1e-9)
            .map_err(|_| lost(&k_values))?;
        dtheta_values.push(symmetric_gap(&orbit, &params)?);
        let (pa, pb) = (orbit.points[0], orbit.points[p / 2]);
        let gap = wrap_signed(pa.theta - pb.theta).hypot(wrap_signed(pa.momentum - pb.momentum));
        a = (0.01 * gap).max(1e-6);
        x = xn;
        k_values.push(kn);
        level_points.push(TorusPoint::new(xn[0], xn[1]));
    }
    let mut report = CascadeReport::from_levels(t, omega, k_values, dtheta_values);
    report.level_points = level_points;
    Ok(report)
}
