//! Integer arithmetic behind the quadratic Gauss sums
//! `G = Σ_{m=1}^{p} exp(iπ(l m + j m²)/p)` and their closed-form phases.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::InvolutionCase;

/// A winding ratio `j/p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindingRatio {
    pub j: i64,
    pub p: i64,
}

impl WindingRatio {
    pub fn new(j: i64, p: i64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidInput(format!(
                "period must be positive, got {p}"
            )));
        }
        Ok(Self { j, p })
    }

    pub fn is_coprime(&self) -> bool {
        gcd(self.j, self.p) == 1
    }

    fn require_coprime(&self) -> Result<()> {
        if self.is_coprime() {
            Ok(())
        } else {
            Err(Error::NotCoprime {
                j: self.j,
                p: self.p,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussSumResult {
    pub magnitude: f64,
    pub phase: f64,
    pub l_param: i64,
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Euler's totient, with `totient(1) = 1`.
pub fn totient(p: u64) -> u64 {
    assert!(p >= 1, "totient is defined for p >= 1");
    let mut n = p;
    let mut out = p;
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            while n.is_multiple_of(q) {
                n /= q;
            }
            out -= out / q;
        }
        q += 1;
    }
    if n > 1 {
        out -= out / n;
    }
    out
}

/// Prime factors with multiplicity, by trial division.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        while n.is_multiple_of(q) {
            out.push(q);
            n /= q;
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn mod_pow(base: i64, mut exp: u64, m: i64) -> i64 {
    let m = m as i128;
    let mut b = (base as i128).rem_euclid(m);
    let mut acc: i128 = 1 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as i64
}

/// Inverse of `j` modulo `p` by the extended Euclidean algorithm.
/// For `p = 1` every residue is zero and the result is 0.
pub fn mod_inverse(j: i64, p: i64) -> Result<i64> {
    if p < 1 {
        return Err(Error::InvalidInput(format!(
            "modulus must be positive, got {p}"
        )));
    }
    if gcd(j, p) != 1 {
        return Err(Error::NotCoprime { j, p });
    }
    if p == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (p as i128, (j as i128).rem_euclid(p as i128));
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    Ok(t0.rem_euclid(p as i128) as i64)
}

/// Inverse via `j^(φ(p) − 1) mod p`; kept as an independent check.
pub fn mod_inverse_via_totient(j: i64, p: i64) -> Result<i64> {
    if p < 1 {
        return Err(Error::InvalidInput(format!(
            "modulus must be positive, got {p}"
        )));
    }
    if gcd(j, p) != 1 {
        return Err(Error::NotCoprime { j, p });
    }
    Ok(mod_pow(j, totient(p as u64) - 1, p))
}

fn is_prime(q: u64) -> bool {
    q >= 2 && factorize(q).len() == 1
}

/// Legendre symbol `(a/q)` for an odd prime `q`, by Euler's criterion.
pub fn legendre(a: i64, q: i64) -> Result<i64> {
    if q < 3 || q % 2 == 0 || !is_prime(q as u64) {
        return Err(Error::InvalidInput(format!(
            "legendre needs an odd prime, got {q}"
        )));
    }
    Ok(match mod_pow(a, ((q - 1) / 2) as u64, q) {
        0 => 0,
        1 => 1,
        _ => -1,
    })
}

/// Jacobi symbol `(a/b)` for odd positive `b`, as the product of Legendre
/// symbols over the prime factors of `b`.
pub fn jacobi(a: i64, b: i64) -> Result<i64> {
    if b < 1 || b % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "jacobi needs an odd positive modulus, got {b}"
        )));
    }
    factorize(b as u64)
        .into_iter()
        .try_fold(1, |acc, q| Ok(acc * legendre(a, q as i64)?))
}

/// The `l` of the Gauss sum used with each involution case.
pub fn l_for_case(w: WindingRatio, case: InvolutionCase) -> i64 {
    match case {
        InvolutionCase::A => -w.j,
        InvolutionCase::BPlus => 0,
        InvolutionCase::BMinus => w.p,
    }
}

fn check_case(w: WindingRatio, case: InvolutionCase) -> Result<()> {
    let even = w.p % 2 == 0;
    let ok = match case {
        InvolutionCase::A => !even,
        InvolutionCase::BPlus | InvolutionCase::BMinus => even,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::CaseParityMismatch {
            case: case.to_string(),
            p: w.p as u32,
        })
    }
}

/// `ξ(p, j)` as an exact rational multiple of π: returns `(n, d)` with
/// `ξ = nπ/d`, `d = 4p` and `n` in `(−d, d]`.
pub fn xi_phase_rational(w: WindingRatio, case: InvolutionCase) -> Result<(i64, i64)> {
    w.require_coprime()?;
    check_case(w, case)?;
    let p = w.p as i128;
    let d = 4 * p;
    let m = 2 * d;
    let n: i128 = match case {
        InvolutionCase::BPlus => bplus_numerator(w.j, w.p)?,
        // (−1)^m = exp(iπm²), so the l = p sum is the l = 0 sum at j + p
        InvolutionCase::BMinus => bplus_numerator(w.j + w.p, w.p)?,
        InvolutionCase::A => {
            let j = w.j as i128;
            let l = l_for_case(w, case) as i128;
            let jac = jacobi(w.j.rem_euclid(w.p), w.p)? as i128;
            let lead = 2 * p * (1 - jac) - p * (p - 1);
            let tail = if w.j % 2 == 0 {
                let inv = mod_inverse(w.j, w.p)? as i128;
                j * inv * inv % m * (l * l % m)
            } else {
                let inv = mod_inverse((4 * w.j).rem_euclid(w.p), w.p)? as i128;
                16 * j * inv % m * inv % m * (l * l % m)
            };
            lead - tail
        }
    };
    let mut r = n.rem_euclid(m);
    if r > d {
        r -= m;
    }
    Ok((r as i64, d as i64))
}

fn bplus_numerator(j: i64, p: i64) -> Result<i128> {
    let jac = jacobi(p.rem_euclid(j.abs().max(1)), j.abs().max(1))? as i128;
    let (j, p) = (j as i128, p as i128);
    Ok(2 * p * (1 - jac) + j * p)
}

/// Closed-form Gauss-sum phase `ξ(p, j)` in `(−π, π]`.
pub fn xi_phase(w: WindingRatio, case: InvolutionCase) -> Result<f64> {
    let (n, d) = xi_phase_rational(w, case)?;
    Ok(PI * n as f64 / d as f64)
}

/// `exp(iπ r/p)` with `r` reduced mod `2p` before the trig call.
fn unit(r: i128, p: i128) -> Complex64 {
    let r = r.rem_euclid(2 * p);
    Complex64::from_polar(1.0, PI * r as f64 / p as f64)
}

/// Direct summation of `Σ_{m=1}^{p} exp(iπ(l m + j m²)/p)`.
pub fn gauss_sum_direct(w: WindingRatio, l: i64) -> Complex64 {
    let (j, p, l) = (w.j as i128, w.p as i128, l as i128);
    (1..=p).map(|m| unit(l * m + j * m * m, p)).sum()
}

/// Direct summation of `Σ_{m=1}^{p} m exp(iπ(l m + j m²)/p)`.
pub fn weighted_gauss_sum_direct_l(w: WindingRatio, l: i64) -> Complex64 {
    let (j, p, l) = (w.j as i128, w.p as i128, l as i128);
    (1..=p).map(|m| unit(l * m + j * m * m, p) * m as f64).sum()
}

/// Weighted sum with `χ_p = 1` for even `p` (`l = 0`) and `χ_p = 0` for
/// odd `p` (`l = −j`).
pub fn weighted_gauss_sum_direct(w: WindingRatio) -> Result<Complex64> {
    w.require_coprime()?;
    Ok(weighted_gauss_sum_direct_l(
        w,
        l_for_case(w, InvolutionCase::natural_for(w.p as u32)),
    ))
}

/// Gauss sum for the given case, summed directly, with its magnitude and
/// phase.
pub fn gauss_sum(w: WindingRatio, case: InvolutionCase) -> Result<GaussSumResult> {
    check_case(w, case)?;
    let l = l_for_case(w, case);
    let g = gauss_sum_direct(w, l);
    Ok(GaussSumResult {
        magnitude: g.norm(),
        phase: g.arg(),
        l_param: l,
    })
}
