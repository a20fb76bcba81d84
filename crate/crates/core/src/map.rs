//! The kicked accelerator map on the 2π-torus, its involution factors and
//! tangent dynamics.
//!
//! One step is
//!
//! ```text
//! θ' = θ + J                      (mod 2π)
//! J' = J + k̃ sin θ' + 2πΩ         (mod 2π)
//! ```
//!
//! with the angle updated first. The map factors as `M = I_B ∘ I_A` into two
//! involutions, and `R = I ∘ M_F` (momentum flip after free flight) is a
//! reversor: `R ∘ M ∘ R = M⁻¹`.
//!
//! Tangent vectors are ordered `(δJ, δθ)` so that the per-step Jacobian reads
//! `[[1 + k̃ cos θ', k̃ cos θ'], [1, 1]]`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Default half-width of the marginal band around `|Tr| = 2`.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Lifted closure tolerance used when validating a periodic orbit.
pub const CLOSURE_TOL: f64 = 1e-9;

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TWO_PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

/// Reduces an angle difference to `(-π, π]`.
#[inline]
pub fn wrap_signed(x: f64) -> f64 {
    let r = wrap_angle(x);
    if r > PI {
        r - TWO_PI
    } else {
        r
    }
}

/// Torus distance between two points, max-norm over the two coordinates.
pub fn torus_distance(a: TorusPoint, b: TorusPoint) -> f64 {
    wrap_signed(a.theta - b.theta)
        .abs()
        .max(wrap_signed(a.momentum - b.momentum).abs())
}

/// A phase-space point `(θ, J)`, both coordinates kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub theta: f64,
    #[serde(rename = "J")]
    pub momentum: f64,
}

impl TorusPoint {
    pub fn new(theta: f64, momentum: f64) -> Self {
        Self {
            theta: wrap_angle(theta),
            momentum: wrap_angle(momentum),
        }
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(θ={:.12}, J={:.12})", self.theta, self.momentum)
    }
}

/// Selects which involution fixed line supplies the starting momentum of
/// the involution method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvolutionCase {
    /// `J₀ = 0`, fixed line of `I_A`.
    A,
    /// `J₀ = (k̃/2) sin θ₀ + πΩ`, fixed line of `I_B`.
    BPlus,
    /// `J₀ = (k̃/2) sin θ₀ + πΩ + π`, the other fixed line of `I_B`.
    BMinus,
}

impl InvolutionCase {
    pub const ALL: [InvolutionCase; 3] = [Self::A, Self::BPlus, Self::BMinus];

    /// Cases scanned by the involution method for period `p`.
    pub fn scanned_for(p: u32) -> &'static [InvolutionCase] {
        if p.is_multiple_of(2) {
            &Self::ALL
        } else {
            &Self::ALL[..1]
        }
    }

    /// The case the perturbative theory pairs with period `p`.
    pub fn natural_for(p: u32) -> Self {
        if p.is_multiple_of(2) {
            Self::BPlus
        } else {
            Self::A
        }
    }
}

impl fmt::Display for InvolutionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::BPlus => "B+",
            Self::BMinus => "B-",
        })
    }
}

/// Map parameters `(k̃, Ω)` plus the involution case used by root finders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub k_tilde: f64,
    pub omega: f64,
    pub involution_case: InvolutionCase,
}

impl MapParams {
    pub fn new(k_tilde: f64, omega: f64) -> Result<Self> {
        Self::with_case(k_tilde, omega, InvolutionCase::A)
    }

    pub fn with_case(k_tilde: f64, omega: f64, involution_case: InvolutionCase) -> Result<Self> {
        if !(k_tilde >= 0.0) || !k_tilde.is_finite() {
            return Err(Error::InvalidInput(format!(
                "kick strength must be finite and non-negative, got {k_tilde}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!(
                "omega must be finite, got {omega}"
            )));
        }
        Ok(Self {
            k_tilde,
            omega,
            involution_case,
        })
    }

    pub fn case(self, involution_case: InvolutionCase) -> Self {
        Self {
            involution_case,
            ..self
        }
    }

    pub fn kick(self, k_tilde: f64) -> Self {
        Self { k_tilde, ..self }
    }

    /// The constant momentum shift `2πΩ`.
    #[inline]
    pub fn drift(&self) -> f64 {
        TWO_PI * self.omega
    }
}

/// A real 2×2 matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jacobian2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Jacobian2x2 {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn minus_identity(&self) -> Self {
        Self::new(self.a - 1.0, self.b, self.c, self.d - 1.0)
    }

    /// Solves `self · x = rhs`; `None` when the determinant is below `eps`.
    pub fn solve(&self, rhs: [f64; 2], eps: f64) -> Option<[f64; 2]> {
        let det = self.det();
        if det.abs() < eps || !det.is_finite() {
            return None;
        }
        Some([
            (self.d * rhs[0] - self.b * rhs[1]) / det,
            (self.a * rhs[1] - self.c * rhs[0]) / det,
        ])
    }

    /// Unit eigenvector for a real eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> [f64; 2] {
        // rows of (M - λ) annihilate the eigenvector; use the larger row
        let r1 = [self.a - lambda, self.b];
        let r2 = [self.c, self.d - lambda];
        let n1 = r1[0].hypot(r1[1]);
        let n2 = r2[0].hypot(r2[1]);
        let v = if n1 >= n2 && n1 > 0.0 {
            [-r1[1], r1[0]]
        } else if n2 > 0.0 {
            [-r2[1], r2[0]]
        } else {
            [1.0, 0.0]
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }
}

impl Mul for Jacobian2x2 {
    type Output = Jacobian2x2;

    fn mul(self, o: Jacobian2x2) -> Jacobian2x2 {
        Jacobian2x2 {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

/// Linear stability of a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stable => "stable",
            Self::Unstable => "unstable",
            Self::Marginal => "marginal",
        })
    }
}

/// Stable iff `|Tr| < 2 - tol`, unstable iff `|Tr| > 2 + tol`.
pub fn classify_stability(trace: f64, tol: f64) -> Stability {
    let t = trace.abs();
    if t < 2.0 - tol {
        Stability::Stable
    } else if t > 2.0 + tol {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// One application of the map.
pub fn step(x: TorusPoint, params: &MapParams) -> TorusPoint {
    let theta = wrap_angle(x.theta + x.momentum);
    let momentum = x.momentum + params.k_tilde * theta.sin() + params.drift();
    TorusPoint::new(theta, momentum)
}

/// Exact inverse of [`step`].
pub fn step_inverse(x: TorusPoint, params: &MapParams) -> TorusPoint {
    let momentum = wrap_angle(x.momentum - params.k_tilde * x.theta.sin() - params.drift());
    TorusPoint::new(x.theta - momentum, momentum)
}

/// `I_A : (J, θ) ↦ (−J, θ + J)`.
pub fn involution_a(x: TorusPoint) -> TorusPoint {
    TorusPoint::new(x.theta + x.momentum, -x.momentum)
}

/// `I_B : (J, θ) ↦ (−J + k̃ sin θ + 2πΩ, θ)`.
pub fn involution_b(x: TorusPoint, params: &MapParams) -> TorusPoint {
    TorusPoint::new(
        x.theta,
        -x.momentum + params.k_tilde * x.theta.sin() + params.drift(),
    )
}

/// Free flight `M_F : (J, θ) ↦ (J, θ + J)`.
pub fn free_flight(x: TorusPoint) -> TorusPoint {
    TorusPoint::new(x.theta + x.momentum, x.momentum)
}

/// Momentum flip `I : (J, θ) ↦ (−J, θ)`.
pub fn flip_momentum(x: TorusPoint) -> TorusPoint {
    TorusPoint::new(x.theta, -x.momentum)
}

/// Time-reversal operator `R = I ∘ M_F`.
pub fn reversor(x: TorusPoint) -> TorusPoint {
    flip_momentum(free_flight(x))
}

/// Jacobian of one step, evaluated at the updated angle `θ_{n+1}`.
pub fn tangent(theta_next: f64, params: &MapParams) -> Jacobian2x2 {
    let kc = params.k_tilde * theta_next.cos();
    Jacobian2x2::new(1.0 + kc, kc, 1.0, 1.0)
}

/// Distance in momentum from `x` to the nearest involution fixed line
/// (`J = 0`, or `J = (k̃/2) sin θ + πΩ` mod π).
pub fn involution_line_distance(x: TorusPoint, params: &MapParams) -> f64 {
    let on_a = wrap_signed(x.momentum).abs();
    let b_line = 0.5 * params.k_tilde * x.theta.sin() + 0.5 * params.drift();
    // distance mod π to either I_B line
    let on_b = 0.5 * wrap_signed(2.0 * (x.momentum - b_line)).abs();
    on_a.min(on_b)
}

/// Which involution fixed line, if any, `x` lies on within `tol`.
pub fn involution_fixed_line(
    x: TorusPoint,
    params: &MapParams,
    tol: f64,
) -> Option<InvolutionCase> {
    if wrap_signed(x.momentum).abs() < tol {
        return Some(InvolutionCase::A);
    }
    let b_line = 0.5 * params.k_tilde * x.theta.sin() + 0.5 * params.drift();
    let d = wrap_signed(x.momentum - b_line);
    if d.abs() < tol {
        Some(InvolutionCase::BPlus)
    } else if (d.abs() - std::f64::consts::PI).abs() < tol {
        Some(InvolutionCase::BMinus)
    } else {
        None
    }
}

/// Iterates the map in lifted (unwrapped) coordinates.
///
/// Returns the `n` successive images, lifted, with the tangent product and
/// the derivative of the final image with respect to `k̃`, both in `(J, θ)`
/// ordering.
#[derive(Debug, Clone)]
pub struct LiftedRun {
    pub thetas: Vec<f64>,
    pub momenta: Vec<f64>,
    pub jacobian: Jacobian2x2,
    pub dk: [f64; 2],
}

impl LiftedRun {
    pub fn end(&self) -> (f64, f64) {
        (
            *self.thetas.last().expect("non-empty run"),
            *self.momenta.last().expect("non-empty run"),
        )
    }
}

pub fn iterate_lifted(theta0: f64, momentum0: f64, params: &MapParams, n: usize) -> LiftedRun {
    let mut theta = theta0;
    let mut momentum = momentum0;
    let mut jac = Jacobian2x2::IDENTITY;
    let mut dk = [0.0, 0.0];
    let mut thetas = Vec::with_capacity(n);
    let mut momenta = Vec::with_capacity(n);
    for _ in 0..n {
        theta += momentum;
        let (s, c) = theta.sin_cos();
        momentum += params.k_tilde * s + params.drift();
        let t = {
            let kc = params.k_tilde * c;
            Jacobian2x2::new(1.0 + kc, kc, 1.0, 1.0)
        };
        jac = t * jac;
        let prop = t.apply(dk);
        dk = [prop[0] + s, prop[1]];
        thetas.push(theta);
        momenta.push(momentum);
    }
    LiftedRun {
        thetas,
        momenta,
        jacobian: jac,
        dk,
    }
}

/// A periodic orbit with its windings and linear stability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<TorusPoint>,
    pub period: u32,
    pub winding_j: i64,
    pub winding_s: i64,
    pub trace: f64,
    pub stability: Stability,
}

impl OrbitRecord {
    /// Builds the orbit through `start`, verifying that `p` steps close up
    /// to within `tol` in lifted coordinates.
    pub fn from_start(
        start: TorusPoint,
        period: u32,
        params: &MapParams,
        tol: f64,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidInput("period must be at least 1".into()));
        }
        let run = iterate_lifted(start.theta, start.momentum, params, period as usize);
        let (theta_end, momentum_end) = run.end();
        let dtheta = theta_end - start.theta;
        let dmomentum = momentum_end - start.momentum;
        let s = (dtheta / TWO_PI).round();
        let j = (dmomentum / TWO_PI).round();
        let err = (dtheta - s * TWO_PI)
            .abs()
            .max((dmomentum - j * TWO_PI).abs());
        if !(err <= tol) {
            return Err(Error::ClosureFailure {
                period,
                residual: err,
            });
        }
        let mut points = Vec::with_capacity(period as usize);
        points.push(start);
        for i in 0..(period as usize - 1) {
            points.push(TorusPoint::new(run.thetas[i], run.momenta[i]));
        }
        let trace = run.jacobian.trace();
        Ok(Self {
            points,
            period,
            winding_j: j as i64,
            winding_s: s as i64,
            trace,
            stability: classify_stability(trace, MARGINAL_TOL),
        })
    }

    /// Torus distance between `points[0]` and its image after one period.
    pub fn closure_error(&self, params: &MapParams) -> f64 {
        let start = self.points[0];
        let run = iterate_lifted(start.theta, start.momentum, params, self.period as usize);
        let (te, me) = run.end();
        torus_distance(start, TorusPoint::new(te, me))
    }

    /// True when some proper divisor `d` of the period already closes the orbit.
    pub fn is_primitive(&self, tol: f64) -> bool {
        let p = self.period as usize;
        (1..p)
            .filter(|d| p.is_multiple_of(*d))
            .all(|d| torus_distance(self.points[0], self.points[d]) > tol)
    }

    /// True if both orbits visit the same points (in any order).
    pub fn same_point_set(&self, other: &OrbitRecord, tol: f64) -> bool {
        self.period == other.period
            && self
                .points
                .iter()
                .all(|&a| other.points.iter().any(|&b| torus_distance(a, b) < tol))
    }

    /// Index in `self.points` of the point closest to `x`.
    pub fn nearest_index(&self, x: TorusPoint) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, &q) in self.points.iter().enumerate() {
            let d = torus_distance(q, x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// The same orbit started at `points[k]`. The angle winding depends on
    /// the lift of the starting momentum, so the record is rebuilt.
    pub fn rotated(&self, k: usize, params: &MapParams) -> Result<Self> {
        Self::from_start(
            self.points[k % self.points.len()],
            self.period,
            params,
            CLOSURE_TOL,
        )
    }

    /// Smallest distance of any orbit point to an involution fixed line.
    pub fn min_involution_line_distance(&self, params: &MapParams) -> f64 {
        self.points
            .iter()
            .map(|&x| involution_line_distance(x, params))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn map_points(&self, f: impl Fn(TorusPoint) -> TorusPoint) -> Vec<TorusPoint> {
        self.points.iter().map(|&x| f(x)).collect()
    }
}

/// Ordered product of the tangent maps along a verified periodic orbit.
pub fn monodromy(orbit: &OrbitRecord, params: &MapParams) -> Result<Jacobian2x2> {
    let err = orbit.closure_error(params);
    if !(err <= CLOSURE_TOL) {
        return Err(Error::ClosureFailure {
            period: orbit.period,
            residual: err,
        });
    }
    let p = orbit.period as usize;
    let mut m = Jacobian2x2::IDENTITY;
    for n in 1..=p {
        let theta_n = orbit.points[n % p].theta;
        m = tangent(theta_n, params) * m;
    }
    Ok(m)
}
