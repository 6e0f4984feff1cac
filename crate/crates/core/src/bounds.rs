//! Explicit lower and upper bounds for the explosion time in cases A and B.
//!
//! Both bounds have the form `const · ∫ (w / G(u, w))^{1/α} dw / w`:
//!
//! * lower: `Γ(1+α)^{1/α} · max_{r>1} (r^α - 1)^{1/α} / (r(r-1))`, integrating
//!   over `[a, ∞)` with `a = 0` in case A and `a = -e0` in case B;
//! * upper: `4 Γ(1+α)^{1/α}`, integrating over `[0, ∞)` with `G` replaced by
//!   its minimum value `-e1` on `[0, -e0)` in case B.

use crate::error::{Error, Result};
use crate::model::{classify_coeffs, g, riccati_coeffs, ModelParams, MomentCase, RiccatiCoeffs};
use crate::quad::{integrate_to_infinity, QuadConfig};
use crate::roots::golden_max;
use crate::special::ln_gamma;

/// Integration data for the bound integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    /// Lower integration limit of the lower-bound integral.
    pub a_lower: f64,
    /// `-e1`, the value of the modified nonlinearity on `[0, -e0)` (case B).
    pub ghat_floor: Option<f64>,
    pub case: MomentCase,
}

pub fn bound_spec(params: &ModelParams, u: f64) -> Result<BoundSpec> {
    let k = riccati_coeffs(params, u);
    match classify_coeffs(&k) {
        MomentCase::A => Ok(BoundSpec { a_lower: 0.0, ghat_floor: None, case: MomentCase::A }),
        MomentCase::B => Ok(BoundSpec { a_lower: -k.e0, ghat_floor: Some(-k.e1), case: MomentCase::B }),
        other => Err(Error::WrongCase { u, expected: "A or B", actual: other }),
    }
}

fn quad_config() -> QuadConfig {
    QuadConfig { abs_tol: 1e-15, rel_tol: 1e-11, max_intervals: 4000 }
}

/// `Γ(1+α)^{1/α}`.
fn gamma_prefactor(alpha: f64) -> f64 {
    (ln_gamma(1.0 + alpha) / alpha).exp()
}

/// `sup_{r>1} (r^α - 1)^{1/α} / (r (r-1))`.
///
/// For `α < 1` the objective vanishes at both ends and the maximum is
/// interior; it sits near `r - 1 ≈ (1-α)/α`, so the search runs over
/// `log(r - 1)`. At `α = 1` the supremum is the limit `1` at `r ↓ 1`.
pub fn r_factor(alpha: f64) -> f64 {
    if alpha >= 1.0 {
        return 1.0;
    }
    let objective = |x: f64| {
        let rm1 = x.exp();
        let r_alpha_m1 = (alpha * rm1.ln_1p()).exp_m1();
        r_alpha_m1.ln() / alpha - rm1.ln_1p() - x
    };
    let (_, best) = golden_max(objective, (1e-12f64).ln(), (1e3f64).ln(), 1e-10);
    best.exp()
}

/// `∫_a^∞ (w/G)^{1/α} dw/w`.
fn g_integral(k: &RiccatiCoeffs, alpha: f64, a: f64) -> Result<f64> {
    let inv_alpha = 1.0 / alpha;
    let integrand = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        let gw = g(k, w);
        (inv_alpha * (w.ln() - gw.ln())).exp() / w
    };
    let scale = (k.e0.abs() + k.e1.abs().sqrt() + (k.c3 * k.c1).abs().sqrt()).max(a).max(1e-12);
    Ok(integrate_to_infinity(integrand, a, scale, &quad_config())?.value)
}

pub fn lower_bound(params: &ModelParams, u: f64) -> Result<f64> {
    let spec = bound_spec(params, u)?;
    let k = riccati_coeffs(params, u);
    let alpha = params.alpha;
    Ok(gamma_prefactor(alpha) * r_factor(alpha) * g_integral(&k, alpha, spec.a_lower)?)
}

pub fn upper_bound(params: &ModelParams, u: f64) -> Result<f64> {
    let spec = bound_spec(params, u)?;
    let k = riccati_coeffs(params, u);
    let alpha = params.alpha;
    let integral = match spec.ghat_floor {
        None => g_integral(&k, alpha, 0.0)?,
        Some(floor) => {
            // ∫₀^{-e0} (w/floor)^{1/α} dw/w = α (-e0/floor)^{1/α}
            let edge = -k.e0;
            alpha * (edge / floor).powf(1.0 / alpha) + g_integral(&k, alpha, edge)?
        }
    };
    Ok(4.0 * gamma_prefactor(alpha) * integral)
}

/// Both bounds, checked for `lower ≤ upper`.
pub fn wellposed_sandwich(params: &ModelParams, u: f64) -> Result<(f64, f64)> {
    let lo = lower_bound(params, u)?;
    let hi = upper_bound(params, u)?;
    if !(lo <= hi) {
        return Err(Error::Consistency(format!("lower bound {lo} exceeds upper bound {hi} at u = {u}")));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::t1_star;
    use approx::assert_relative_eq;

    fn fig1() -> ModelParams {
        ModelParams::figure_one()
    }

    #[test]
    fn r_factor_limits() {
        assert_eq!(r_factor(1.0), 1.0);
        // Brute-force scan of the objective on a fine log grid.
        for &alpha in &[0.6, 0.75, 0.9, 0.999] {
            let mut best: f64 = 0.0;
            for i in 0..200_000 {
                let r = 1.0 + (10f64).powf(-9.0 + 12.0 * i as f64 / 200_000.0);
                let v = (r.powf(alpha) - 1.0).powf(1.0 / alpha) / (r * (r - 1.0));
                best = best.max(v);
            }
            assert_relative_eq!(r_factor(alpha), best, max_relative = 1e-7);
            assert!(r_factor(alpha) < 1.0);
        }
        assert!((r_factor(0.999999) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn sharp_at_alpha_one() {
        let p = fig1().with_alpha(1.0).unwrap();
        for &u in &[-13.0, -20.0, -35.0, -60.0] {
            let lb = lower_bound(&p, u).unwrap();
            assert_relative_eq!(lb, t1_star(&p, u), max_relative = 1e-8);
        }
    }

    #[test]
    fn case_b_sandwich() {
        let (lo, hi) = wellposed_sandwich(&fig1(), -8.0).unwrap();
        assert!(lo > 0.0 && lo < hi && hi.is_finite());
    }

    #[test]
    fn upper_above_classical_near_alpha_one() {
        let p = fig1().with_alpha(0.999).unwrap();
        for &u in &[-15.0, -20.0, -40.0] {
            assert!(upper_bound(&p, u).unwrap() >= t1_star(&p, u));
        }
    }

    #[test]
    fn bounds_reject_non_exploding_cases() {
        assert!(matches!(lower_bound(&fig1(), -5.0), Err(Error::WrongCase { .. })));
        assert!(matches!(upper_bound(&fig1(), 0.5), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn bounds_decrease_with_u_to_minus_infinity() {
        let p = fig1();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for i in 0..=47 {
            let u = -13.0 - i as f64;
            let (lo, hi) = wellposed_sandwich(&p, u).unwrap();
            assert!(lo < prev.0 && hi < prev.1, "u={u}");
            prev = (lo, hi);
        }
    }

    #[test]
    fn upper_bound_decays_like_u_to_minus_one_over_alpha() {
        let p = fig1();
        let us = [-1e2, -1e3, -1e4];
        let ub: Vec<f64> = us.iter().map(|&u| upper_bound(&p, u).unwrap()).collect();
        let slope = (ub[2].ln() - ub[0].ln()) / ((1e4f64).ln() - (1e2f64).ln());
        assert!((slope + 1.0 / p.alpha).abs() < 0.05, "slope {slope}");
        let scaled: Vec<f64> = us.iter().zip(&ub).map(|(u, b)| b * u.abs().powf(1.0 / p.alpha)).collect();
        assert!(scaled[2] < 2.0 * scaled[0] && scaled[2] > 0.5 * scaled[0], "{scaled:?}");
    }

    #[test]
    fn integral_matches_closed_form_near_zero_and_infinity() {
        // With e0 = e1 = 0, c3 c1 = 0: G = w², so ∫_a^∞ w^{-1/α-1} dw = α a^{-1/α}.
        let k = RiccatiCoeffs { c1: 0.0, c2: 0.0, c3: 0.5, e0: 0.0, e1: 0.0, d1: 0.0, d2: 0.0 };
        for &alpha in &[0.6, 0.8, 1.0] {
            let v = g_integral(&k, alpha, 2.0).unwrap();
            assert_relative_eq!(v, alpha * 2f64.powf(-1.0 / alpha), max_relative = 1e-10);
        }
    }
}
