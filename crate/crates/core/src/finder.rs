//! Periodic-orbit location: the involution method (one scalar unknown on a
//! fixed line of an involution) and damped Newton for orbits that avoid
//! every fixed line.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{
    involution_fixed_line, iterate_lifted, wrap_signed, InvolutionCase, Jacobian2x2, MapParams,
    OrbitRecord, TorusPoint, CLOSURE_TOL, TWO_PI,
};
use crate::perturbative::TongueSpec;
use crate::roots::bracketed_root;

/// Largest grid used by the adaptive scan.
pub const MAX_GRID: usize = 1 << 18;

/// Point-set tolerance used to recognise the same orbit twice.
const SAME_ORBIT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct FinderConfig {
    pub grid_points: usize,
    pub root_tol: f64,
    pub match_tol: f64,
    pub max_iter: usize,
}

impl Default for FinderConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            root_tol: 1e-12,
            match_tol: 1e-8,
            max_iter: 100,
        }
    }
}

impl FinderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 64 {
            return Err(Error::InvalidInput(format!(
                "grid_points must be at least 64, got {}",
                self.grid_points
            )));
        }
        if !(self.root_tol > 0.0 && self.match_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// The involution-method residuals at one starting angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSample {
    pub theta0: f64,
    pub f_j: f64,
    pub sin_half_f_theta: f64,
}

/// Starting momentum on the fixed line selected by `params.involution_case`.
pub fn j0_from_case(theta0: f64, params: &MapParams) -> f64 {
    match params.involution_case {
        InvolutionCase::A => 0.0,
        InvolutionCase::BPlus => 0.5 * params.k_tilde * theta0.sin() + PI * params.omega,
        InvolutionCase::BMinus => 0.5 * params.k_tilde * theta0.sin() + PI * params.omega + PI,
    }
}

/// `F_J` alone; the scan only needs this.
fn f_j(theta0: f64, t: TongueSpec, params: &MapParams) -> f64 {
    let p = t.p as usize;
    let mut theta = theta0;
    let mut momentum = j0_from_case(theta0, params);
    let mut kicks = 0.0;
    for _ in 0..p {
        theta += momentum;
        let s = theta.sin();
        kicks += s;
        momentum += params.k_tilde * s + params.drift();
    }
    params.k_tilde * kicks + TWO_PI * params.omega * p as f64 - TWO_PI * t.j as f64
}

/// `F_J` and `sin(F_θ / 2)` after `p` unwrapped steps from `(θ₀, J₀)`.
pub fn residuals(theta0: f64, t: TongueSpec, params: &MapParams, s: i64) -> ResidualSample {
    let p = t.p as usize;
    let pf = p as f64;
    let j0 = j0_from_case(theta0, params);
    let mut theta = theta0;
    let mut momentum = j0;
    let mut kicks = 0.0;
    let mut weighted = 0.0;
    for n in 1..=p {
        theta += momentum;
        let sn = theta.sin();
        kicks += sn;
        weighted += (p - n) as f64 * sn;
        momentum += params.k_tilde * sn + params.drift();
    }
    let k = params.k_tilde;
    let f_j = k * kicks + TWO_PI * params.omega * pf - TWO_PI * t.j as f64;
    let f_theta = pf * j0 + k * weighted + PI * params.omega * pf * (pf - 1.0) - TWO_PI * s as f64;
    ResidualSample {
        theta0,
        f_j,
        sin_half_f_theta: (0.5 * f_theta).sin(),
    }
}

/// Brackets of sign changes of `F_J` on a uniform grid of `n` cells, plus
/// whether two of them sit within four cells of each other.
fn scan_brackets(t: TongueSpec, params: &MapParams, n: usize) -> (Vec<(f64, f64)>, bool) {
    let h = TWO_PI / n as f64;
    let values: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|i| f_j(i as f64 * h, t, params))
        .collect();
    let mut brackets = Vec::new();
    let mut cells = Vec::new();
    for i in 0..n {
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 || a.signum() != b.signum() {
            brackets.push((i as f64 * h, (i + 1) as f64 * h));
            cells.push(i);
        }
    }
    let crowded = cells.windows(2).any(|w| w[1] - w[0] <= 4)
        || (cells.len() >= 2 && cells[0] + n - cells[cells.len() - 1] <= 4);
    (brackets, crowded)
}

fn push_unique(out: &mut Vec<OrbitRecord>, orbit: OrbitRecord) {
    if !out.iter().any(|o| o.same_point_set(&orbit, SAME_ORBIT_TOL)) {
        out.push(orbit);
    }
}

/// Orbits of tongue `t` found from one involution case, in ascending θ₀.
pub fn find_case_orbits(
    t: TongueSpec,
    params: &MapParams,
    cfg: &FinderConfig,
) -> Result<Vec<OrbitRecord>> {
    cfg.validate()?;
    if params.k_tilde == 0.0 {
        return Ok(Vec::new());
    }
    let mut n = cfg.grid_points;
    let brackets = loop {
        let (b, crowded) = scan_brackets(t, params, n);
        if !crowded || n >= MAX_GRID {
            break b;
        }
        n *= 2;
    };
    let mut out = Vec::new();
    for (lo, hi) in brackets {
        let theta0 = bracketed_root(|x| f_j(x, t, params), lo, hi, cfg.root_tol, 200)?;
        let r = residuals(theta0, t, params, 0);
        if r.sin_half_f_theta.abs() >= cfg.match_tol {
            continue;
        }
        let start = TorusPoint::new(theta0, j0_from_case(theta0, params));
        let orbit = OrbitRecord::from_start(start, t.p, params, CLOSURE_TOL)?;
        push_unique(&mut out, orbit);
    }
    Ok(out)
}

/// All involution-method orbits of tongue `t`: case A for every `p`, and
/// both B cases for even `p`. The natural case of `p` is scanned first and
/// orbits found again from a later case are dropped.
pub fn find_involution_orbits(
    t: TongueSpec,
    params: &MapParams,
    cfg: &FinderConfig,
) -> Result<Vec<OrbitRecord>> {
    let natural = InvolutionCase::natural_for(t.p);
    let mut cases = vec![natural];
    cases.extend(
        InvolutionCase::scanned_for(t.p)
            .iter()
            .copied()
            .filter(|&c| c != natural),
    );
    let mut out = Vec::new();
    for case in cases {
        for orbit in find_case_orbits(t, &params.case(case), cfg)? {
            push_unique(&mut out, orbit);
        }
    }
    Ok(out)
}

/// A zero-kick orbit and whether any of its points lies on an involution
/// fixed line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroKickOrbit {
    pub orbit: OrbitRecord,
    pub j0: f64,
    pub on_involution_line: bool,
}

/// Momentum `J₀ = (2πs − πj(p − 1))/p` of the `k̃ = 0` orbit with windings
/// `(j, s)`.
pub fn zero_kick_momentum(p: u32, j: i64, s: i64) -> f64 {
    let pf = p as f64;
    (TWO_PI * s as f64 - PI * j as f64 * (pf - 1.0)) / pf
}

pub fn construct_zero_kick_orbit(p: u32, j: i64, s: i64) -> Result<ZeroKickOrbit> {
    construct_zero_kick_orbit_at(p, j, s, 0.0)
}

pub fn construct_zero_kick_orbit_at(p: u32, j: i64, s: i64, theta0: f64) -> Result<ZeroKickOrbit> {
    if p == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let params = MapParams::new(0.0, j as f64 / p as f64)?;
    let j0 = zero_kick_momentum(p, j, s);
    let orbit = OrbitRecord::from_start(TorusPoint::new(theta0, j0), p, &params, CLOSURE_TOL)?;
    let on_involution_line = orbit
        .points
        .iter()
        .any(|&x| involution_fixed_line(x, &params, 1e-9).is_some());
    Ok(ZeroKickOrbit {
        j0: crate::map::wrap_angle(j0),
        orbit,
        on_involution_line,
    })
}

/// Result of Newton's method on `M^p(x) − x`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSolution {
    pub point: TorusPoint,
    pub monodromy: Jacobian2x2,
}

fn displacement(
    theta: f64,
    momentum: f64,
    p: usize,
    params: &MapParams,
) -> ([f64; 2], Jacobian2x2) {
    let run = iterate_lifted(theta, momentum, params, p);
    let (te, me) = run.end();
    (
        [wrap_signed(me - momentum), wrap_signed(te - theta)],
        run.jacobian,
    )
}

/// Damped Newton for a period-`p` point near `(θ, J)`.
pub(crate) fn newton_periodic(
    theta: f64,
    momentum: f64,
    p: usize,
    params: &MapParams,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonSolution> {
    let norm = |g: [f64; 2]| g[0].abs().max(g[1].abs());
    let (mut th, mut mo) = (theta, momentum);
    let (mut g, mut m) = displacement(th, mo, p, params);
    for _ in 0..max_iter {
        if norm(g) < tol {
            break;
        }
        let a = m.minus_identity();
        let dx = match a.solve([-g[0], -g[1]], 1e-12) {
            Some(dx) => dx,
            None => return Err(Error::SingularJacobian { det: a.det() }),
        };
        let g0 = norm(g);
        let mut lam = 1.0;
        let mut accepted = false;
        for _ in 0..=40 {
            let (nt, nm) = (th + lam * dx[1], mo + lam * dx[0]);
            let (ng, nmat) = displacement(nt, nm, p, params);
            if norm(ng) < g0 {
                th = nt;
                mo = nm;
                g = ng;
                m = nmat;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = norm(g);
    if residual < tol || residual < CLOSURE_TOL * 1e-2 {
        Ok(NewtonSolution {
            point: TorusPoint::new(th, mo),
            monodromy: m,
        })
    } else {
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual,
        })
    }
}

/// Damped 2-D Newton on `M^p(x) − x` from `seed`.
pub fn find_non_involution_orbit(
    seed: TorusPoint,
    p: u32,
    params: &MapParams,
    cfg: &FinderConfig,
) -> Result<OrbitRecord> {
    cfg.validate()?;
    if p == 0 {
        return Err(Error::InvalidInput("period must be at least 1".into()));
    }
    let sol = newton_periodic(
        seed.theta,
        seed.momentum,
        p as usize,
        params,
        cfg.root_tol,
        cfg.max_iter,
    )?;
    OrbitRecord::from_start(sol.point, p, params, CLOSURE_TOL)
}

/// Seeds for period-`p` orbits along the horizontal line `J = j_line`:
/// sign changes of the momentum displacement of `M^p` over a grid in θ,
/// located to the grid midpoint.
pub fn line_seeds(p: u32, j_line: f64, params: &MapParams, grid: usize) -> Vec<TorusPoint> {
    let h = TWO_PI / grid as f64;
    let disp: Vec<[f64; 2]> = (0..=grid)
        .into_par_iter()
        .map(|i| displacement(i as f64 * h, j_line, p as usize, params).0)
        .collect();
    let mut out = Vec::new();
    for i in 0..grid {
        let (a, b) = (disp[i][0], disp[i + 1][0]);
        // skip jumps where the wrapped displacement crosses ±π
        if a.signum() != b.signum() && (a - b).abs() < PI {
            out.push(TorusPoint::new((i as f64 + 0.5) * h, j_line));
        }
    }
    out
}

/// Primitive period-`p` orbits reached by Newton from the seeds on the line
/// `J = j_line`, deduplicated, in seed order.
pub fn find_orbits_from_line(
    p: u32,
    j_line: f64,
    params: &MapParams,
    cfg: &FinderConfig,
) -> Result<Vec<OrbitRecord>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for seed in line_seeds(p, j_line, params, cfg.grid_points) {
        if let Ok(orbit) = find_non_involution_orbit(seed, p, params, cfg) {
            if orbit.is_primitive(1e-6) {
                push_unique(&mut out, orbit);
            }
        }
    }
    Ok(out)
}

/// The offset `c` with `f(a_i) = b_{(c − i) mod p}` for every `i`, if any.
pub fn involution_pairing(
    a: &OrbitRecord,
    b: &OrbitRecord,
    f: impl Fn(TorusPoint) -> TorusPoint,
    tol: f64,
) -> Option<usize> {
    if a.period != b.period {
        return None;
    }
    let p = a.period as usize;
    (0..p).find(|&c| {
        (0..p).all(|i| {
            let target = b.points[(c + p - i % p) % p];
            crate::map::torus_distance(f(a.points[i]), target) < tol
        })
    })
}
