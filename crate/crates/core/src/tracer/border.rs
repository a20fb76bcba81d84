//! Stability borders: where the followed stable orbit of a tongue reaches
//! `Tr = −2` (period doubling) or `Tr = +2` (coalescence with its unstable
//! partner).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finder::{find_involution_orbits, j0_from_case, newton_periodic};
use crate::map::{iterate_lifted, InvolutionCase, MapParams, OrbitRecord, Stability, TorusPoint};
use crate::perturbative::TongueSpec;

use super::boundary::{global_extremum, Side};
use super::TracerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Crossing {
    /// `Tr = −2`.
    PeriodDoubling,
    /// `Tr = +2`.
    Coalescence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorderSample {
    pub k: f64,
    pub omega: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorderCurve {
    pub tongue: TongueSpec,
    pub crossing: Crossing,
    pub samples: Vec<BorderSample>,
}

/// The stable orbit of tongue `t` with the most negative trace, at the
/// smallest kick on a geometric ladder where one exists.
pub fn stable_seed(t: TongueSpec, omega: f64, cfg: &TracerConfig) -> Result<(f64, OrbitRecord)> {
    let d = t.detuning(omega).abs();
    let mut k = (2.0 * std::f64::consts::PI * (t.p as f64).sqrt() * d * 1.05).max(0.02);
    for _ in 0..40 {
        let params = MapParams::new(k, omega)?;
        let orbits = find_involution_orbits(t, &params, &cfg.finder)?;
        if let Some(o) = orbits
            .into_iter()
            .filter(|o| o.stability == Stability::Stable && o.winding_j == t.j)
            .min_by(|a, b| a.trace.total_cmp(&b.trace))
        {
            return Ok((k, o));
        }
        k *= 1.1;
    }
    Err(Error::NoStableOrbit(format!(
        "tongue ({}, {}) at omega = {omega}",
        t.p, t.j
    )))
}

/// Follows a period-`p` orbit from `(k, x)` in k̃ until its trace drops
/// below −2, then bisects the crossing. Returns the last stable kick, its
/// orbit point and trace. Stops early with `None` if the orbit turns
/// unstable through +2 or is lost.
pub(crate) fn follow_to_doubling(
    p: usize,
    omega: f64,
    mut k: f64,
    mut x: TorusPoint,
    dk0: f64,
    k_limit: f64,
    bisections: usize,
) -> Result<Option<(f64, TorusPoint, f64)>> {
    let solve = |k: f64, x: TorusPoint| {
        let params = MapParams::new(k, omega)?;
        newton_periodic(x.theta, x.momentum, p, &params, 1e-13, 60)
    };
    let mut dk = dk0;
    let (k_lo, x_lo, k_hi) = loop {
        if k > k_limit {
            return Ok(None);
        }
        let kn = k + dk;
        match solve(kn, x) {
            Ok(sol) => {
                let tr = sol.monodromy.trace();
                if tr < -2.0 {
                    break (k, x, kn);
                }
                if tr > 2.0 {
                    return Ok(None);
                }
                k = kn;
                x = sol.point;
                dk = (dk * 1.5).min(dk0);
            }
            Err(_) => {
                dk *= 0.5;
                if dk < 1e-10 {
                    return Ok(None);
                }
            }
        }
    };
    let (mut lo, mut xl, mut hi) = (k_lo, x_lo, k_hi);
    let mut tr_lo = solve(lo, xl)?.monodromy.trace();
    for _ in 0..bisections {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let sol = solve(mid, xl)?;
        let tr = sol.monodromy.trace();
        if tr > -2.0 {
            lo = mid;
            xl = sol.point;
            tr_lo = tr;
        } else {
            hi = mid;
        }
    }
    Ok(Some((lo, xl, tr_lo)))
}

fn doubling_sample(t: TongueSpec, omega: f64, cfg: &TracerConfig) -> Result<Option<BorderSample>> {
    let (k, orbit) = stable_seed(t, omega, cfg)?;
    let found = follow_to_doubling(
        t.p as usize,
        omega,
        k,
        orbit.points[0],
        0.02,
        cfg.k_limit,
        200,
    )?;
    Ok(found.map(|(k, _, trace)| BorderSample { k, omega, trace }))
}

/// The edge crossing at fixed Ω: bisect in k̃ on the sign of the extremal
/// residual, then evaluate the trace of the merged orbit at the extremum.
fn coalescence_sample(
    t: TongueSpec,
    omega: f64,
    cfg: &TracerConfig,
) -> Result<Option<BorderSample>> {
    let d = t.detuning(omega);
    if d == 0.0 {
        // the edge reaches the vertex at k̃ = 0
        return Ok(None);
    }
    let side = if d < 0.0 { Side::Right } else { Side::Left };
    let case = InvolutionCase::natural_for(t.p);
    let g = |k: f64| -> Result<(f64, f64)> {
        let params = MapParams::with_case(k, omega, case)?;
        let (x, v) = global_extremum(t, &params, side, cfg.scan_grid)?;
        Ok((x, side.sign() * v))
    };
    let (k_in, _) = stable_seed(t, omega, cfg)?;
    if g(k_in)?.1 > 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, k_in);
    let mut theta = 0.0;
    for _ in 0..cfg.boundary_max_bisections {
        let mid = 0.5 * (lo + hi);
        let (x, v) = g(mid)?;
        theta = x;
        if v.abs() < cfg.boundary_tol {
            lo = mid;
            hi = mid;
            break;
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let params = MapParams::with_case(k, omega, case)?;
    let run = iterate_lifted(theta, j0_from_case(theta, &params), &params, t.p as usize);
    let trace = run.jacobian.trace();
    Ok(((trace - 2.0).abs() < cfg.border_tol).then_some(BorderSample { k, omega, trace }))
}

fn omega_grid(range: (f64, f64), step: f64) -> Result<Vec<f64>> {
    let (lo, hi) = range;
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidInput(format!(
            "need step > 0 and a non-empty range, got [{lo}, {hi}] step {step}"
        )));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Period-doubling (`Tr = −2`) and coalescence (`Tr = +2`) curves of tongue
/// `t` over the Ω grid `range` with spacing `step`.
pub fn trace_stability_border(
    t: TongueSpec,
    omega_range: (f64, f64),
    step: f64,
) -> Result<(BorderCurve, BorderCurve)> {
    trace_stability_border_with(t, omega_range, step, &TracerConfig::default())
}

pub fn trace_stability_border_with(
    t: TongueSpec,
    omega_range: (f64, f64),
    step: f64,
    cfg: &TracerConfig,
) -> Result<(BorderCurve, BorderCurve)> {
    let omegas = omega_grid(omega_range, step)?;
    let doubling: Vec<Option<BorderSample>> = omegas
        .par_iter()
        .map(|&om| doubling_sample(t, om, cfg))
        .collect::<Result<_>>()?;
    let coalescence: Vec<Option<BorderSample>> = if cfg.trace_coalescence {
        omegas
            .par_iter()
            .map(|&om| coalescence_sample(t, om, cfg))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    Ok((
        BorderCurve {
            tongue: t,
            crossing: Crossing::PeriodDoubling,
            samples: doubling.into_iter().flatten().collect(),
        },
        BorderCurve {
            tongue: t,
            crossing: Crossing::Coalescence,
            samples: coalescence.into_iter().flatten().collect(),
        },
    ))
}
