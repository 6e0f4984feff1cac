//! Classical Heston (`alpha = 1`): closed-form explosion time and critical
//! moments.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{e1_zeros, riccati_coeffs, ModelParams, RiccatiCoeffs};
use crate::roots::bracketed_root;

/// Which critical moment: `u⁺ > 1` or `u⁻ < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" => Ok(Side::Upper),
            "lower" => Ok(Side::Lower),
            other => Err(Error::InvalidInput(format!("side must be upper or lower, got {other}"))),
        }
    }
}

/// Explosion time of the classical Heston model from the Riccati
/// coefficients. `+∞` when `R(u, ·)` has a root on `[0, ∞)`.
pub fn t1_star_coeffs(k: &RiccatiCoeffs) -> f64 {
    // A nonnegative root of R exists iff c1 ≤ 0, or e1 ≥ 0 with e0 ≤ 0.
    if k.c1 <= 0.0 {
        return f64::INFINITY;
    }
    if k.e1 < 0.0 {
        let s = (-k.e1).sqrt();
        // π/2 - arctan(e0/s) = atan2(s, e0) for s > 0.
        s.atan2(k.e0) / s
    } else if k.e0 > 0.0 {
        if k.e1 == 0.0 {
            1.0 / k.e0
        } else {
            // (1/(2√e1)) log((e0+√e1)/(e0-√e1)) = atanh(√e1/e0)/√e1
            let s = k.e1.sqrt();
            (s / k.e0).atanh() / s
        }
    } else {
        f64::INFINITY
    }
}

pub fn t1_star(params: &ModelParams, u: f64) -> f64 {
    t1_star_coeffs(&riccati_coeffs(params, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalCriticalMoment {
    pub u: f64,
    pub side: Side,
    pub maturity: f64,
    /// `|T1*(u) - T|`.
    pub residual: f64,
}

/// Solves `T1*(u) = T` on the requested side.
///
/// The explosion region is `(-∞, u_-)` below zero and `(u_+, ∞)` above one,
/// with `u_±` the zeros of `e1`. `T1*` runs monotonically from `0` at
/// `|u| = ∞` to `+∞` at `u_±`, so every `T > 0` has exactly one root.
pub fn classical_critical_moment(params: &ModelParams, maturity: f64, side: Side) -> Result<ClassicalCriticalMoment> {
    if !(maturity > 0.0 && maturity.is_finite()) {
        return Err(Error::InvalidInput(format!("maturity must be positive, got {maturity}")));
    }
    let (u_neg, u_pos) = e1_zeros(params);
    let (edge, dir) = match side {
        Side::Lower => (u_neg, -1.0),
        Side::Upper => (u_pos, 1.0),
    };
    // Small-T scaling u ~ 1/T seeds the expansion.
    let mut step = (1.0 / maturity).max(1.0);
    let mut far = edge + dir * step;
    let mut expansions = 0;
    while t1_star(params, far) >= maturity {
        step *= 2.0;
        far = edge + dir * step;
        expansions += 1;
        if expansions > 200 || !far.is_finite() {
            return Err(Error::MaturityOutOfRange { t: maturity, t_max: f64::INFINITY });
        }
    }
    let tol = 1e-13 * far.abs().max(1.0);
    let root = bracketed_root(|u| t1_star(params, u) - maturity, far, edge, tol)?;
    Ok(ClassicalCriticalMoment { u: root.x, side, maturity, residual: (t1_star(params, root.x) - maturity).abs() })
}
