//! First-order predictions in the kick strength: orbit angles, tongue
//! edges, windings, traces, and the resonance-3 detuning geometry.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finder::j0_from_case;
use crate::map::{wrap_angle, InvolutionCase, MapParams, TWO_PI};
use crate::number_theory::{gcd, xi_phase, WindingRatio};

/// A tongue label `(p, j)` with vertex at `Ω = j/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TongueSpec {
    pub p: u32,
    pub j: i64,
}

impl TongueSpec {
    pub fn new(p: u32, j: i64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidInput("period must be at least 1".into()));
        }
        Ok(Self { p, j })
    }

    pub fn vertex_omega(&self) -> f64 {
        self.j as f64 / self.p as f64
    }

    pub fn ratio(&self) -> WindingRatio {
        WindingRatio {
            j: self.j,
            p: self.p as i64,
        }
    }

    pub fn is_coprime(&self) -> bool {
        gcd(self.j, self.p as i64) == 1
    }

    fn require_coprime(&self) -> Result<()> {
        if self.is_coprime() {
            Ok(())
        } else {
            Err(Error::NotCoprime {
                j: self.j,
                p: self.p as i64,
            })
        }
    }

    /// Offset `j/p − Ω`, with Ω taken mod 1 to the nearest copy of the vertex.
    pub fn detuning(&self, omega: f64) -> f64 {
        let d = self.vertex_omega() - omega;
        d - d.round()
    }
}

/// A first-order orbit prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeOrbit {
    pub vartheta: f64,
    pub theta0: f64,
    pub j0: f64,
    pub s: i64,
    pub predicted_trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance3Params {
    pub eta: f64,
    pub c_val: f64,
    pub c_prime: f64,
    pub a_val: f64,
    pub a_prime: f64,
    pub omega_freq: f64,
}

impl Resonance3Params {
    /// Fills the derived quantities for a distance `eta` past the doubling.
    pub fn from_eta(eta: f64) -> Self {
        let c_val = -1.0 - eta;
        let a_val = -4.0 - 2.0 * eta;
        let c_prime = -2.0 * c_val * c_val + 4.0 * c_val + 7.0;
        let a_prime = 2.0 * c_prime - 2.0;
        let omega_freq = if a_prime < 0.0 {
            (-a_prime).sqrt()
        } else {
            0.0
        };
        Self {
            eta,
            c_val,
            c_prime,
            a_val,
            a_prime,
            omega_freq,
        }
    }
}

/// Half-width `k/(2π√p)` of the tongue at first order.
pub fn half_width(p: u32, k: f64) -> f64 {
    k / (TWO_PI * (p as f64).sqrt())
}

/// The straight-line edges `Ω = j/p ± k/(2π√p)`.
pub fn tongue_edges(t: TongueSpec, k: f64) -> Result<(f64, f64)> {
    t.require_coprime()?;
    if !(k >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "k must be non-negative, got {k}"
        )));
    }
    let w = half_width(t.p, k);
    Ok((t.vertex_omega() - w, t.vertex_omega() + w))
}

/// The two solutions of `sin ϑ = 2π√p (j/p − Ω)/k̃`; the stable one
/// (`cos ϑ ≤ 0`) comes first. Both are in `[0, 2π)`.
pub fn solve_vartheta(t: TongueSpec, params: &MapParams) -> Result<(f64, f64)> {
    t.require_coprime()?;
    let k = params.k_tilde;
    let d = t.detuning(params.omega);
    if k == 0.0 {
        return Err(Error::OutsideTongue(format!(
            "k = 0 leaves vartheta undetermined (offset {d})"
        )));
    }
    let x = TWO_PI * (t.p as f64).sqrt() * d / k;
    if x.abs() > 1.0 + 1e-12 {
        return Err(Error::OutsideTongue(format!(
            "omega = {} lies {:.3e} outside the first-order wedge of ({}, {}) at k = {k}",
            params.omega,
            (d.abs() - half_width(t.p, k)),
            t.p,
            t.j
        )));
    }
    let a = x.clamp(-1.0, 1.0).asin();
    Ok((wrap_angle(PI - a), wrap_angle(a)))
}

/// Angle winding `s`: `j(p−1)/2` for odd `p`, `pj/2` for even `p`.
pub fn winding_s(t: TongueSpec) -> Result<i64> {
    let p = t.p as i64;
    let num = if p % 2 == 1 { t.j * (p - 1) } else { p * t.j };
    if num % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "winding s is not an integer for (p, j) = ({p}, {})",
            t.j
        )));
    }
    Ok(num / 2)
}

/// `2 + k̃ p^{3/2} cos ϑ`.
pub fn perturbative_trace(t: TongueSpec, k: f64, vartheta: f64) -> f64 {
    2.0 + k * (t.p as f64).powf(1.5) * vartheta.cos()
}

/// Gap between the unstable and stable `ϑ` at distance `d_omega` inside an
/// edge: `sqrt(16π√p |δΩ| / k̃)`.
pub fn coalescence_gap(t: TongueSpec, k: f64, d_omega: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("k must be positive, got {k}")));
    }
    Ok((16.0 * PI * (t.p as f64).sqrt() * d_omega.abs() / k).sqrt())
}

/// Exact boundary of the `p = 1` tongue: `k̃_b = 2π|Ω − 1|`.
pub fn p1_boundary(omega: f64) -> f64 {
    TWO_PI * (omega - 1.0).abs()
}

/// Exact stability border of the `p = 1` tongue: `sqrt(16 + 4π²(Ω − 1)²)`.
pub fn p1_stability_border(omega: f64) -> f64 {
    (16.0 + 4.0 * PI * PI * (omega - 1.0).powi(2)).sqrt()
}

/// Distance past the doubling at which the detuning frequency
/// `2 sqrt(4η + η²)` reaches `2π/3`.
pub fn resonance3_eta() -> Resonance3Params {
    Resonance3Params::from_eta(-2.0 + (4.0 + PI * PI / 9.0).sqrt())
}

/// Stable and unstable first-order orbits of tongue `t` at `params`. Uses
/// case B₊ for even `p` and case A for odd `p`.
pub fn predict_orbits(t: TongueSpec, params: &MapParams) -> Result<[PerturbativeOrbit; 2]> {
    let case = InvolutionCase::natural_for(t.p);
    let xi = xi_phase(t.ratio(), case)?;
    let s = winding_s(t)?;
    let (vs, vu) = solve_vartheta(t, params)?;
    let params = params.case(case);
    let make = |v: f64| {
        let theta0 = wrap_angle(v - xi);
        PerturbativeOrbit {
            vartheta: v,
            theta0,
            j0: wrap_angle(j0_from_case(theta0, &params)),
            s,
            predicted_trace: perturbative_trace(t, params.k_tilde, v),
        }
    };
    Ok([make(vs), make(vu)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn t(p: u32, j: i64) -> TongueSpec {
        TongueSpec::new(p, j).unwrap()
    }

    #[test]
    fn edges_examples() {
        assert_eq!(tongue_edges(t(4, 1), 0.0).unwrap(), (0.25, 0.25));
        let (lo, hi) = tongue_edges(t(1, 1), 0.5).unwrap();
        assert!((lo - 0.920_422_528).abs() < 1e-8 && (hi - 1.079_577_472).abs() < 1e-8);
        let (a, b) = tongue_edges(t(4, 1), 0.3).unwrap();
        let (c, d) = tongue_edges(t(1, 1), 0.3).unwrap();
        assert!(((b - a) / (d - c) - 0.5).abs() < 1e-14);
        assert!(tongue_edges(t(4, 2), 0.3).is_err());
    }

    #[test]
    fn vartheta_at_vertex_and_edges() {
        let tt = t(3, 1);
        let k = 0.02;
        let p = MapParams::new(k, 1.0 / 3.0).unwrap();
        let (s, u) = solve_vartheta(tt, &p).unwrap();
        assert!((s - PI).abs() < 1e-12 && u.abs() < 1e-12);

        let (lo, hi) = tongue_edges(tt, k).unwrap();
        let (s, u) = solve_vartheta(tt, &MapParams::new(k, hi).unwrap()).unwrap();
        assert!((s - 3.0 * FRAC_PI_2).abs() < 1e-6 && (u - 3.0 * FRAC_PI_2).abs() < 1e-6);
        let (s, u) = solve_vartheta(tt, &MapParams::new(k, lo).unwrap()).unwrap();
        assert!((s - FRAC_PI_2).abs() < 1e-6 && (u - FRAC_PI_2).abs() < 1e-6);

        let out = MapParams::new(k, hi + 1e-4).unwrap();
        assert!(matches!(
            solve_vartheta(tt, &out),
            Err(Error::OutsideTongue(_))
        ));
    }

    #[test]
    fn vartheta_satisfies_defining_relation() {
        let tt = t(5, 2);
        for i in 0..50 {
            let omega = 0.4 + (i as f64 - 25.0) * 1e-4;
            let p = MapParams::new(0.05, omega).unwrap();
            let x = TWO_PI * 5f64.sqrt() * (0.4 - omega) / 0.05;
            let (s, u) = solve_vartheta(tt, &p).unwrap();
            assert!((s.sin() - x).abs() < 1e-12 && (u.sin() - x).abs() < 1e-12);
            assert!(s.cos() <= 1e-12 && u.cos() >= -1e-12);
        }
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_s(t(3, 1)).unwrap(), 1);
        assert_eq!(winding_s(t(2, 1)).unwrap(), 1);
        assert_eq!(winding_s(t(1, 1)).unwrap(), 0);
        assert_eq!(winding_s(t(5, 2)).unwrap(), 4);
    }

    #[test]
    fn trace_examples() {
        assert!((perturbative_trace(t(3, 1), 0.1, FRAC_PI_2) - 2.0).abs() < 1e-15);
        assert_eq!(perturbative_trace(t(3, 1), 0.0, 1.0), 2.0);
        // |k p^{3/2} cos| = 4 marks the border estimate, k ∝ p^{-3/2}
        let k4 = 4.0 / 4f64.powf(1.5);
        assert!((perturbative_trace(t(4, 1), k4, PI) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn coalescence_gap_examples() {
        let tt = t(2, 1);
        assert_eq!(coalescence_gap(tt, 0.1, 0.0).unwrap(), 0.0);
        let g1 = coalescence_gap(tt, 0.1, 1e-4).unwrap();
        let g2 = coalescence_gap(tt, 0.1, 2e-4).unwrap();
        assert!((g2 / g1 - 2f64.sqrt()).abs() < 1e-14);
        assert!(coalescence_gap(tt, 0.0, 1e-4).is_err());
    }

    #[test]
    fn coalescence_gap_matches_vartheta_split() {
        let k = 0.01;
        for p in 1..=3u32 {
            let tt = t(p, 1);
            let (_, hi) = tongue_edges(tt, k).unwrap();
            let d = 1e-5 * k;
            let (s, u) = solve_vartheta(tt, &MapParams::new(k, hi - d).unwrap()).unwrap();
            let gap = crate::map::wrap_signed(u - s).abs();
            let pred = coalescence_gap(tt, k, d).unwrap();
            assert!((gap / pred - 1.0).abs() < 0.05, "p={p}: {gap} vs {pred}");
        }
    }

    #[test]
    fn p1_formulas() {
        assert_eq!(p1_boundary(1.0), 0.0);
        assert_eq!(p1_stability_border(1.0), 4.0);
        assert!((p1_boundary(1.1) - 0.2 * PI).abs() < 1e-14);
        for i in 0..100 {
            let om = -2.0 + 0.05 * i as f64;
            let (b, s) = (p1_boundary(om), p1_stability_border(om));
            assert!((s * s - b * b - 16.0).abs() < 1e-9);
        }
    }

    #[test]
    fn resonance3_values() {
        let r = resonance3_eta();
        assert!((r.eta - (-2.0 + (4.0 + PI * PI / 9.0).sqrt())).abs() < 1e-15);
        assert!((r.eta - 0.25758).abs() < 1e-5);
        assert!((r.c_prime - (1.0 - 8.0 * r.eta - 2.0 * r.eta * r.eta)).abs() < 1e-12);
        assert!((r.omega_freq - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((r.omega_freq - 2.0 * (4.0 * r.eta + r.eta * r.eta).sqrt()).abs() < 1e-12);
        assert!((r.c_val - (2.0 + r.a_val) / 2.0).abs() < 1e-15);
        assert_eq!(Resonance3Params::from_eta(0.0).omega_freq, 0.0);
    }
}
