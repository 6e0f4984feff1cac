//! Scalar root finding and one-dimensional maximization.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Bisection refined by secant (regula falsi with the Illinois modification)
/// steps on a sign-changing bracket `[a, b]`.
///
/// Function values may be `±∞` at the bracket ends; the secant step is only
/// taken when both ends are finite, bisection otherwise. Every third
/// iteration bisects unconditionally so the bracket always shrinks.
pub fn bracketed_root<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, x_tol: f64) -> Result<Root> {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Numerical("NaN at bracket end".into()));
    }
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NotBracketed { a, b });
    }
    // Illinois weights.
    let mut wa = 1.0;
    let mut wb = 1.0;
    let mut last_side = 0i8;
    for it in 1..=500 {
        let width = b - a;
        if width <= x_tol {
            let (x, fx) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root { x, fx, iterations: it });
        }
        let mid = a + 0.5 * width;
        let mut x = mid;
        if it % 3 != 0 && fa.is_finite() && fb.is_finite() {
            let ga = fa * wa;
            let gb = fb * wb;
            let s = b - gb * (b - a) / (gb - ga);
            // Keep the trial point strictly inside.
            let guard = 0.25 * x_tol;
            if s.is_finite() && s > a + guard && s < b - guard {
                x = s;
            }
        }
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Numerical(format!("NaN at x = {x}")));
        }
        if fx == 0.0 {
            return Ok(Root { x, fx, iterations: it });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            wa = 1.0;
            if last_side == 1 {
                wb *= 0.5;
            }
            last_side = 1;
        } else {
            b = x;
            fb = fx;
            wb = 1.0;
            if last_side == -1 {
                wa *= 0.5;
            }
            last_side = -1;
        }
    }
    Err(Error::Numerical("root finder exceeded iteration limit".into()))
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)].into_iter().max_by(|p, q| p.1.total_cmp(&q.1)).expect("three candidates")
}
