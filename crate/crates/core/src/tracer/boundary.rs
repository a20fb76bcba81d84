//! Tongue boundaries by the overshoot method: at fixed k̃ the two roots of
//! `F_J` merge at an extremum of `F_J`, so the edge is where that extremum
//! vanishes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finder::residuals;
use crate::map::{InvolutionCase, MapParams, TWO_PI};
use crate::perturbative::{half_width, TongueSpec};
use crate::roots::golden_min;

use super::TracerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// +1 for the right edge (larger Ω), −1 for the left.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub tongue: TongueSpec,
    pub side: Side,
    /// `(k̃, Ω)` pairs, increasing in k̃.
    pub samples: Vec<(f64, f64)>,
}

fn fj(theta: f64, t: TongueSpec, params: &MapParams) -> f64 {
    residuals(theta, t, params, 0).f_j
}

/// Extremum of `F_J` inside `bracket`, by golden-section search.
///
/// The bracket is sampled first: if the most extreme sample is one of the
/// endpoints there is no interior extremum. Minima are preferred when both
/// exist.
pub fn extremum_of_residual(
    t: TongueSpec,
    params: &MapParams,
    bracket: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = bracket;
    if !(hi > lo) {
        return Err(Error::InvalidInput(format!("empty bracket [{lo}, {hi}]")));
    }
    const N: usize = 16;
    let xs: Vec<f64> = (0..=N)
        .map(|i| lo + (hi - lo) * i as f64 / N as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| fj(x, t, params)).collect();
    let fmax = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fmin = fs.iter().cloned().fold(f64::INFINITY, f64::min);
    if fmax - fmin <= 1e-14 * (1.0 + fmax.abs()) {
        return Err(Error::FlatResidual);
    }
    let imin = fs.iter().position(|&f| f == fmin).unwrap_or(0);
    let imax = fs.iter().position(|&f| f == fmax).unwrap_or(0);
    let interior = |i: usize| i > 0 && i < N;
    let (sign, i) = if interior(imin) {
        (1.0, imin)
    } else if interior(imax) {
        (-1.0, imax)
    } else {
        return Err(Error::NoInteriorExtremum);
    };
    let (x, v) = golden_min(|x| sign * fj(x, t, params), xs[i - 1], xs[i + 1], 1e-12);
    Ok((x, sign * v))
}

/// The global minimum (`Side::Right`) or maximum (`Side::Left`) of `F_J`
/// over the circle. Beyond the right edge `F_J > 0` everywhere, beyond the
/// left edge `F_J < 0`.
pub fn global_extremum(
    t: TongueSpec,
    params: &MapParams,
    side: Side,
    grid: usize,
) -> Result<(f64, f64)> {
    let h = TWO_PI / grid as f64;
    let sgn = side.sign();
    let mut best = (0usize, f64::INFINITY);
    for i in 0..grid {
        let v = sgn * fj(i as f64 * h, t, params);
        if v < best.1 {
            best = (i, v);
        }
    }
    let c = best.0 as f64 * h;
    let (x, v) = golden_min(|x| sgn * fj(x, t, params), c - h, c + h, 1e-12);
    Ok((x, sgn * v))
}

/// Ω on one edge of tongue `t` at kick strength `k`, bisecting on the sign of
/// the extremal residual from an initial guess.
pub fn edge_at(
    t: TongueSpec,
    k: f64,
    side: Side,
    guess: f64,
    window: f64,
    cfg: &TracerConfig,
) -> Result<f64> {
    let case = InvolutionCase::natural_for(t.p);
    let sgn = side.sign();
    let vertex = t.vertex_omega();
    // positive means outside the tongue on this side
    let g = |omega: f64| -> Result<f64> {
        let params = MapParams::with_case(k, omega, case)?;
        Ok(sgn * global_extremum(t, &params, side, cfg.scan_grid)?.1)
    };
    let mut w = window.max(1e-9);
    let mut found = None;
    for _ in 0..40 {
        let inner = if sgn * (guess - sgn * w - vertex) > 0.0 {
            guess - sgn * w
        } else {
            vertex + sgn * 1e-15
        };
        let outer = guess + sgn * w;
        let (gi, go) = (g(inner)?, g(outer)?);
        if gi <= 0.0 && go > 0.0 {
            found = Some((inner, outer));
            break;
        }
        w *= 2.0;
    }
    let (mut inner, mut outer) = found.ok_or(Error::LostTongue { k, omega: guess })?;
    for _ in 0..cfg.boundary_max_bisections {
        let mid = 0.5 * (inner + outer);
        let v = g(mid)?;
        if v.abs() < cfg.boundary_tol {
            return Ok(mid);
        }
        if v > 0.0 {
            outer = mid;
        } else {
            inner = mid;
        }
    }
    Ok(0.5 * (inner + outer))
}

/// Kick strengths `max(1e-4, step), …` up to `k_max`.
pub(crate) fn k_levels(k_max: f64, step: f64) -> Vec<f64> {
    let k0 = step.max(1e-4);
    let mut out = Vec::new();
    let mut i = 0;
    loop {
        let k = k0 + i as f64 * step;
        if k > k_max + 1e-12 * k_max.max(1.0) {
            break;
        }
        out.push(k);
        i += 1;
    }
    out
}

/// Traces one edge of tongue `t` from near the vertex up to `k_max`.
pub fn trace_edge(
    t: TongueSpec,
    side: Side,
    k_max: f64,
    step: f64,
    cfg: &TracerConfig,
) -> Result<BoundaryCurve> {
    if !(step > 0.0) || !(k_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "step and k_max must be positive (step = {step}, k_max = {k_max})"
        )));
    }
    let sgn = side.sign();
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for k in k_levels(k_max, step) {
        let first_order = t.vertex_omega() + sgn * half_width(t.p, k);
        let (guess, window) = match samples.as_slice() {
            [] => (first_order, 0.5 * half_width(t.p, k)),
            [.., (k1, o1)] => {
                let slope = if samples.len() >= 2 {
                    let (k0, o0) = samples[samples.len() - 2];
                    (o1 - o0) / (k1 - k0)
                } else {
                    (o1 - t.vertex_omega()) / k1
                };
                let g = o1 + slope * (k - k1);
                (g, (g - o1).abs().max(1e-6))
            }
        };
        let omega = edge_at(t, k, side, guess, window, cfg)?;
        samples.push((k, omega));
    }
    Ok(BoundaryCurve {
        tongue: t,
        side,
        samples,
    })
}

/// Both edges of tongue `t`, left then right.
pub fn trace_tongue_boundary(
    t: TongueSpec,
    k_max: f64,
    step: f64,
) -> Result<(BoundaryCurve, BoundaryCurve)> {
    trace_tongue_boundary_with(t, k_max, step, &TracerConfig::default())
}

pub fn trace_tongue_boundary_with(
    t: TongueSpec,
    k_max: f64,
    step: f64,
    cfg: &TracerConfig,
) -> Result<(BoundaryCurve, BoundaryCurve)> {
    let (left, right) = rayon::join(
        || trace_edge(t, Side::Left, k_max, step, cfg),
        || trace_edge(t, Side::Right, k_max, step, cfg),
    );
    Ok((left?, right?))
}

/// Ω on one edge at kick `k`, seeded from the first-order edge.
pub fn boundary_omega(t: TongueSpec, k: f64, side: Side, cfg: &TracerConfig) -> Result<f64> {
    let hw = half_width(t.p, k);
    edge_at(
        t,
        k,
        side,
        t.vertex_omega() + side.sign() * hw,
        0.5 * hw,
        cfg,
    )
}

/// Boundary Ω on each side at each of the given kick strengths, computed
/// independently (no marching).
pub fn edges_at(t: TongueSpec, ks: &[f64], cfg: &TracerConfig) -> Result<Vec<(f64, f64, f64)>> {
    ks.par_iter()
        .map(|&k| {
            let l = boundary_omega(t, k, Side::Left, cfg)?;
            let r = boundary_omega(t, k, Side::Right, cfg)?;
            Ok((k, l, r))
        })
        .collect()
}
