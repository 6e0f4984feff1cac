//! Gamma-function helpers and the polylogarithm.

use crate::error::{Error, Result};

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Polylogarithm `Li_ν(z) = Σ_{n≥1} zⁿ / n^ν` for real `0 ≤ z < 1`.
///
/// Summed directly. Terms are positive and decreasing, so after `N` terms the
/// remainder is at most `z^{N+1} (N+1)^{-ν} / (1 - z)`; summation stops once
/// that bound falls below `1e-16` of the partial sum.
pub fn polylog(nu: f64, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) || !nu.is_finite() {
        return Err(Error::Domain { value: z, domain: "[0, 1)" });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    const MAX_TERMS: u64 = 200_000_000;
    let ln_z = z.ln();
    let mut sum = 0.0;
    // Kahan compensation keeps long sums near z = 1 honest.
    let mut comp = 0.0;
    let mut n: u64 = 1;
    loop {
        let nf = n as f64;
        let term = (nf * ln_z - nu * nf.ln()).exp();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;

        let next = nf + 1.0;
        let tail = ((next * ln_z) - nu * next.ln()).exp() / (1.0 - z);
        if tail <= 1e-16 * sum || term == 0.0 {
            return Ok(sum);
        }
        n += 1;
        if n > MAX_TERMS {
            return Err(Error::Numerical(format!("polylog series did not converge for z = {z}")));
        }
    }
}
