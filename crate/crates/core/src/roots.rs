//! Derivative-free scalar solvers.

use crate::error::{Error, Result};

/// Root of `f` in a sign-changing bracket `[a, b]`.
///
/// Each iteration tries a secant step and falls back to bisection whenever
/// the secant point leaves the bracket or fails to shrink it by half.
pub fn bracketed_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(format!(
            "no sign change on [{a}, {b}] ({fa:e}, {fb:e})"
        )));
    }
    let mut last_width = (b - a).abs();
    for _ in 0..max_iter {
        let width = (b - a).abs();
        if width <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        let mut x = b - fb * (b - a) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(x > lo && x < hi) || width > 0.5 * last_width {
            x = mid;
        }
        last_width = width;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // nudge a stalled endpoint inward so the bracket keeps shrinking
        if (b - a).abs() > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
/// Returns `(x, f(x))`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
