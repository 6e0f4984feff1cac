//! Fractional power series `f(u, t) = Σ a_n(u) t^{αn}` of the Riccati solution.
//!
//! The coefficients satisfy the convolution recurrence
//!
//! ```text
//! a_1     = d1 / v_1
//! a_{n+1} = (d2 a_n + Σ_{k=1}^{n-1} a_k a_{n-k}) / v_{n+1},   v_n = Γ(αn+1)/Γ(αn-α+1)
//! ```
//!
//! and their growth rate gives the explosion time: in case A,
//! `limsup a_n^{-1/(αn)} = T*`. Since `a_n` grows like `T*^{-αn}`, the
//! recurrence runs on rescaled coefficients `ã_n = a_n sⁿ`, which satisfy the
//! same recurrence with an extra factor `s` per step.

use std::fmt::Write as _;

use serde::Serialize;

use crate::bounds;
use crate::error::{Error, Result};
use crate::model::{classify, riccati_coeffs, ModelParams, MomentCase};
use crate::special::{ln_gamma, polylog};

pub const DEFAULT_N_MAX_ALGORITHM_1: usize = 100;
pub const DEFAULT_N_MAX_ALGORITHM_2: usize = 200;
pub const DEFAULT_POLYLOG_TERMS: usize = 10;

const RESCALE_HIGH: f64 = 1e100;
const RESCALE_LOW: f64 = 1e-100;

/// Range of `p/s²` over which the explosion estimate switches from the
/// single- to the two-singularity fit.
const MIRROR_BLEND_START: f64 = 0.05;
const MIRROR_BLEND_END: f64 = 0.5;

/// `v_n = Γ(αn+1) / Γ(αn-α+1)`.
pub fn gamma_ratio_v(alpha: f64, n: usize) -> f64 {
    let x = alpha * n as f64;
    (ln_gamma(x + 1.0) - ln_gamma(x - alpha + 1.0)).exp()
}

/// `α^α Γ(2α) / Γ(α)²`, the constant in the coefficient asymptotics.
pub fn asymptotic_constant(alpha: f64) -> f64 {
    (alpha * alpha.ln() + ln_gamma(2.0 * alpha) - 2.0 * ln_gamma(alpha)).exp()
}

/// Rescaled series coefficients `ã_n = a_n sⁿ`, `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesState {
    pub u: f64,
    pub alpha: f64,
    pub scale: f64,
    coeffs: Vec<f64>,
}

impl SeriesState {
    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    /// Scaled coefficient `ã_n` (1-based).
    pub fn scaled(&self, n: usize) -> f64 {
        self.coeffs[n - 1]
    }

    pub fn scaled_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `ln |a_n|`; `-∞` for a vanishing coefficient.
    pub fn ln_abs(&self, n: usize) -> f64 {
        self.coeffs[n - 1].abs().ln() - n as f64 * self.scale.ln()
    }

    pub fn sign(&self, n: usize) -> f64 {
        let c = self.coeffs[n - 1];
        if c == 0.0 {
            0.0
        } else {
            c.signum()
        }
    }

    /// Unscaled `a_n`; may overflow to `±∞` for large `n`.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.sign(n) * self.ln_abs(n).exp()
    }

    /// `|a_n|^{-1/(αn)}`.
    pub fn raw_estimate(&self, n: usize) -> f64 {
        (-self.ln_abs(n) / (self.alpha * n as f64)).exp()
    }

    /// `(a_n n^{1-α} Γ(α)² / (α^α Γ(2α)))^{-1/(α(n+1))}`.
    pub fn refined_estimate(&self, n: usize) -> f64 {
        let alpha = self.alpha;
        let nf = n as f64;
        let ln = self.ln_abs(n) + (1.0 - alpha) * nf.ln() - asymptotic_constant(alpha).ln();
        (-ln / (alpha * (nf + 1.0))).exp()
    }

    /// `ln(a_n n^{1-α} / K)`, the log of the coefficient with the expected
    /// polynomial factor removed.
    fn ln_normalized(&self, n: usize) -> f64 {
        let alpha = self.alpha;
        self.ln_abs(n) + (1.0 - alpha) * (n as f64).ln() - asymptotic_constant(alpha).ln()
    }

    /// Explosion time allowing for a second singularity at `z = -R'` on or
    /// just outside the circle of convergence.
    ///
    /// Near `e0 = 0` the solution is almost odd in `z = t^α`, so the
    /// normalized coefficients behave like `x^{n+1} + (-1)^{n+1} y^{n+1}`
    /// with `x = 1/R ≥ y = 1/R'`, and the single-singularity estimate
    /// oscillates with the parity of `n`. Fitting the two-term recurrence
    /// `b_{m+1} = (x - y) b_m + x y b_{m-1}` to `b_{n-3..=n}` recovers `x`.
    /// Returns the estimate and `p/s²` (`s = x - y`, `p = x y`), which
    /// measures how strong the mirrored singularity is; `-1/4` means none.
    pub fn mirror_corrected_estimate(&self, n: usize) -> Option<(f64, f64)> {
        if n < 4 {
            return None;
        }
        let ln_x0 = [n, n - 1]
            .into_iter()
            .map(|m| 0.5 * (self.ln_normalized(m) - self.ln_normalized(m - 2)))
            .find(|v| v.is_finite())?;
        let b = |m: usize| self.sign(m) * (self.ln_normalized(m) - (m as f64 + 1.0) * ln_x0).exp();
        let (b0, b1, b2, b3) = (b(n - 3), b(n - 2), b(n - 1), b(n));
        let det = b2 * b0 - b1 * b1;
        let sum = (b3 * b0 - b2 * b1) / det;
        let prod = (b2 * b2 - b3 * b1) / det;
        let disc = sum * sum + 4.0 * prod;
        if !(disc >= 0.0 && sum.is_finite() && prod.is_finite()) {
            return None;
        }
        let x = 0.5 * (sum + disc.sqrt());
        if !(x > 0.0) {
            return None;
        }
        let estimate = (-(ln_x0 + x.ln()) / self.alpha).exp();
        Some((estimate, prod / (sum * sum)))
    }

    /// Algorithm 1 estimate at order `n`: the refined estimate, moved
    /// continuously to the mirror-corrected one as the mirrored singularity
    /// becomes significant.
    pub fn explosion_estimate(&self, n: usize) -> f64 {
        let plain = self.refined_estimate(n);
        let Some((corrected, strength)) = self.mirror_corrected_estimate(n) else {
            return plain;
        };
        let w = if strength.is_nan() {
            0.0
        } else {
            ((strength - MIRROR_BLEND_START) / (MIRROR_BLEND_END - MIRROR_BLEND_START)).clamp(0.0, 1.0)
        };
        if w == 0.0 {
            plain
        } else if w == 1.0 || !plain.is_finite() {
            corrected
        } else {
            w * corrected + (1.0 - w) * plain
        }
    }

    /// CSV with columns `n,log_abs_a,sign`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,log_abs_a,sign\n");
        for n in 1..=self.n_max() {
            let _ = writeln!(out, "{},{},{}", n, self.ln_abs(n), self.sign(n));
        }
        out
    }
}

/// Coefficients `a_1..a_{n_max}` with the rescaling base seeded from the
/// lower explosion-time bound (`s = T_lb^α`) when it exists.
pub fn compute_coefficients(params: &ModelParams, u: f64, n_max: usize) -> Result<SeriesState> {
    let seed = bounds::lower_bound(params, u)
        .ok()
        .map(|t| t.powf(params.alpha))
        .filter(|s| s.is_finite() && *s > 0.0)
        .unwrap_or(1.0);
    compute_coefficients_with_scale(params, u, n_max, seed)
}

pub fn compute_coefficients_with_scale(params: &ModelParams, u: f64, n_max: usize, scale: f64) -> Result<SeriesState> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidInput(format!("rescaling base must be positive, got {scale}")));
    }
    let alpha = params.alpha;
    let k = riccati_coeffs(params, u);
    let mut s = scale;
    let mut c: Vec<f64> = Vec::with_capacity(n_max);
    c.push(s * k.d1 / gamma_ratio_v(alpha, 1));
    rescale_if_needed(&mut c, &mut s)?;
    for n in 1..n_max {
        let conv: f64 = (1..n).map(|j| c[j - 1] * c[n - j - 1]).sum();
        let next = s * (k.d2 * c[n - 1] + conv) / gamma_ratio_v(alpha, n + 1);
        c.push(next);
        rescale_if_needed(&mut c, &mut s)?;
    }
    Ok(SeriesState { u, alpha, scale: s, coeffs: c })
}

fn rescale_if_needed(c: &mut [f64], s: &mut f64) -> Result<()> {
    for _ in 0..8 {
        let (idx, peak) =
            c.iter().map(|v| v.abs()).enumerate().fold((0, 0.0f64), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if peak == 0.0 || (RESCALE_LOW..=RESCALE_HIGH).contains(&peak) {
            return Ok(());
        }
        if !peak.is_finite() {
            return Err(Error::Overflow { order: c.len() });
        }
        // Multiply ã_k by ρ^k so the peak coefficient becomes 1.
        let ln_rho = -peak.ln() / (idx + 1) as f64;
        for (i, v) in c.iter_mut().enumerate() {
            *v *= (ln_rho * (i + 1) as f64).exp();
        }
        *s *= ln_rho.exp();
    }
    Err(Error::Overflow { order: c.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    #[serde(rename = "algorithm_1")]
    Algorithm1,
    #[serde(rename = "algorithm_2_lower_bound")]
    Algorithm2LowerBound,
    BoundLower,
    BoundUpper,
    VieOracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Algorithm1 => "algorithm_1",
            Method::Algorithm2LowerBound => "algorithm_2_lower_bound",
            Method::BoundLower => "bound_lower",
            Method::BoundUpper => "bound_upper",
            Method::VieOracle => "vie_oracle",
        }
    }
}

/// Convergence information: the estimate at a coarser order next to the
/// reported one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub coarse_order: usize,
    pub coarse_estimate: f64,
    pub order: usize,
    pub estimate: f64,
    pub rel_gap: f64,
}

impl Diagnostics {
    fn new(coarse_order: usize, coarse_estimate: f64, order: usize, estimate: f64) -> Self {
        Self {
            coarse_order,
            coarse_estimate,
            order,
            estimate,
            rel_gap: ((estimate - coarse_estimate) / estimate).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplosionResult {
    pub value: f64,
    pub method: Method,
    pub case: MomentCase,
    pub diagnostics: Option<Diagnostics>,
}

impl ExplosionResult {
    pub fn is_bound(&self) -> bool {
        !matches!(self.method, Method::ClosedForm | Method::Algorithm1 | Method::VieOracle)
    }
}

/// Explosion time in case A from the refined coefficient asymptotics at
/// order `n_max`.
pub fn algorithm_1_explosion_time(params: &ModelParams, u: f64, n_max: usize) -> Result<ExplosionResult> {
    let case = classify(params, u);
    if case != MomentCase::A {
        return Err(Error::WrongCase { u, expected: "A", actual: case });
    }
    if n_max < 2 {
        return Err(Error::InvalidInput("algorithm 1 needs n_max ≥ 2".into()));
    }
    let state = compute_coefficients(params, u, n_max)?;
    let value = state.explosion_estimate(n_max);
    let half = n_max / 2;
    Ok(ExplosionResult {
        value,
        method: Method::Algorithm1,
        case,
        diagnostics: Some(Diagnostics::new(half, state.explosion_estimate(half), n_max, value)),
    })
}

/// Lower bound for the explosion time in case B, `|a_n|^{-1/(αn)}` at
/// `n = n_max` (or at the largest `n ≤ n_max` with `a_n ≠ 0`).
pub fn algorithm_2_lower_bound(params: &ModelParams, u: f64, n_max: usize) -> Result<ExplosionResult> {
    let case = classify(params, u);
    if case != MomentCase::B {
        return Err(Error::WrongCase { u, expected: "B", actual: case });
    }
    let state = compute_coefficients(params, u, n_max)?;
    let n = (1..=n_max).rev().find(|&n| state.scaled(n) != 0.0).ok_or(Error::DegenerateCoefficients(n_max))?;
    let value = state.raw_estimate(n);
    let coarse = (1..=n / 2).rev().find(|&m| state.scaled(m) != 0.0).unwrap_or(n);
    Ok(ExplosionResult {
        value,
        method: Method::Algorithm2LowerBound,
        case,
        diagnostics: Some(Diagnostics::new(coarse, state.raw_estimate(coarse), n, value)),
    })
}

/// Closed-form approximation of the Riccati solution in case A:
///
/// ```text
/// f(u,t) ≈ K/T*^α · Li_{1-α}((t/T*)^α) + Σ_{n=1}^{N} (a_n - b_n) t^{αn},
/// b_n = K R^{-n-1} n^{α-1},  K = α^α Γ(2α)/Γ(α)²,  R = T*^α.
/// ```
#[derive(Debug, Clone)]
pub struct PolylogApproximation {
    alpha: f64,
    explosion_time: f64,
    state: SeriesState,
    terms: usize,
}

impl PolylogApproximation {
    pub fn new(params: &ModelParams, u: f64, terms: usize) -> Result<Self> {
        let explosion_time = algorithm_1_explosion_time(params, u, DEFAULT_N_MAX_ALGORITHM_1)?.value;
        let state = compute_coefficients(params, u, terms.max(1))?;
        Ok(Self { alpha: params.alpha, explosion_time, state, terms })
    }

    pub fn explosion_time(&self) -> f64 {
        self.explosion_time
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0 && t < self.explosion_time) {
            return Err(Error::Domain { value: t, domain: "[0, T*)" });
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        let alpha = self.alpha;
        let k = asymptotic_constant(alpha);
        let r = self.explosion_time.powf(alpha);
        let z = (t / self.explosion_time).powf(alpha);
        let lead = k / r * polylog(1.0 - alpha, z)?;
        let ta = t.powf(alpha);
        let x = ta / self.state.scale;
        let mut correction = 0.0;
        for n in 1..=self.terms {
            let nf = n as f64;
            let a_term = self.state.scaled(n) * x.powi(n as i32);
            let b_term = k / r * nf.powf(alpha - 1.0) * z.powi(n as i32);
            correction += a_term - b_term;
        }
        Ok(lead + correction)
    }
}

pub fn f_approx(params: &ModelParams, u: f64, t: f64, terms: usize) -> Result<f64> {
    PolylogApproximation::new(params, u, terms)?.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{lower_bound, upper_bound};
    use crate::classical::t1_star;
    use crate::special::gamma;
    use approx::assert_relative_eq;

    fn fig1() -> ModelParams {
        ModelParams::figure_one()
    }

    #[test]
    fn v_values() {
        assert_relative_eq!(gamma_ratio_v(1.0, 3), 3.0, max_relative = 1e-13);
        assert_relative_eq!(gamma_ratio_v(0.6, 1), gamma(1.6), max_relative = 1e-13);
        assert!((gamma_ratio_v(0.6, 1) - 0.89352).abs() < 1e-5);
        let n = 10_000;
        let ratio = gamma_ratio_v(0.6, n) / (0.6 * n as f64).powf(0.6);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        let mut prev = 0.0;
        for n in 1..500 {
            let v = gamma_ratio_v(0.6, n);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn first_coefficient() {
        let s = compute_coefficients(&fig1(), -20.0, 5).unwrap();
        assert_relative_eq!(s.coefficient(1), 4.2 / gamma(1.6), max_relative = 1e-12);
        assert!((s.coefficient(1) - 4.7005).abs() < 1e-3);
    }

    /// Unscaled recurrence in plain floating point, valid while nothing
    /// overflows.
    fn naive_coefficients(p: &ModelParams, u: f64, n_max: usize) -> Vec<f64> {
        let k = riccati_coeffs(p, u);
        let v = |n: usize| gamma(p.alpha * n as f64 + 1.0) / gamma(p.alpha * n as f64 - p.alpha + 1.0);
        let mut a = vec![k.d1 / v(1)];
        for n in 1..n_max {
            let conv: f64 = (1..n).map(|j| a[j - 1] * a[n - j - 1]).sum();
            a.push((k.d2 * a[n - 1] + conv) / v(n + 1));
        }
        a
    }

    #[test]
    fn matches_naive_recurrence() {
        let p = fig1();
        for &u in &[-20.0, -8.0, 3.0] {
            let s = compute_coefficients(&p, u, 40).unwrap();
            let naive = naive_coefficients(&p, u, 40);
            for n in 1..=40 {
                assert_relative_eq!(s.coefficient(n), naive[n - 1], max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn zero_moment_gives_zero_series() {
        let s = compute_coefficients(&fig1(), 0.0, 50).unwrap();
        assert!(s.scaled_coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn case_a_coefficients_positive() {
        let p = fig1();
        for &u in &[-12.5, -13.0, -20.0, -60.0, -500.0] {
            let s = compute_coefficients(&p, u, 200).unwrap();
            assert!((1..=200).all(|n| s.scaled(n) > 0.0), "u={u}");
        }
    }

    #[test]
    fn scale_invariance() {
        let p = fig1();
        let a = compute_coefficients_with_scale(&p, -20.0, 200, 1.0).unwrap();
        let b = compute_coefficients_with_scale(&p, -20.0, 200, 0.37).unwrap();
        for n in 1..=200 {
            let (x, y) = (a.ln_abs(n), b.ln_abs(n));
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "n={n}: {x} vs {y}");
        }
    }

    #[test]
    fn rescaling_keeps_huge_growth_finite() {
        // Large |u| makes a_n grow like T*^{-αn} with tiny T*.
        let p = fig1();
        let s = compute_coefficients_with_scale(&p, -1e5, 300, 1.0).unwrap();
        assert!(s.scaled_coeffs().iter().all(|c| c.is_finite() && *c > 0.0));
        assert!(s.ln_abs(300) > 700.0 * 2.0);
        let t = s.refined_estimate(300);
        assert!(t > 0.0 && t < 1e-3);
    }

    #[test]
    fn log_coefficients_grow_linearly() {
        let s = compute_coefficients(&fig1(), -20.0, 400).unwrap();
        let slope = |n: usize| s.ln_abs(n) / n as f64;
        assert!((slope(400) - slope(200)).abs() < (slope(200) - slope(50)).abs());
        // Geometric bounds: B^n ≤ a_n ≤ A^n n^{α-1}.
        let lo = (1..=400).map(|n| s.ln_abs(n) / n as f64).fold(f64::INFINITY, f64::min);
        let hi = (1..=400)
            .map(|n| (s.ln_abs(n) - (0.6 - 1.0) * (n as f64).ln()) / n as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        for n in 1..=400 {
            let nf = n as f64;
            assert!(s.ln_abs(n) >= lo * nf - 1e-9);
            assert!(s.ln_abs(n) <= hi * nf + (0.6 - 1.0) * nf.ln() + 1e-9);
        }
    }

    #[test]
    fn algorithm_1_inside_bounds() {
        let p = fig1();
        let r = algorithm_1_explosion_time(&p, -20.0, 100).unwrap();
        assert!(r.value > lower_bound(&p, -20.0).unwrap());
        assert!(r.value < upper_bound(&p, -20.0).unwrap());
        let d = r.diagnostics.unwrap();
        assert_eq!((d.coarse_order, d.order), (50, 100));
        assert!(d.rel_gap < 1e-3, "{d:?}");
    }

    #[test]
    fn algorithm_1_near_classical() {
        let p = fig1().with_alpha(0.999).unwrap();
        let r = algorithm_1_explosion_time(&p, -20.0, 100).unwrap();
        let t1 = t1_star(&p, -20.0);
        assert!(((r.value - t1) / t1).abs() < 0.01, "{} vs {t1}", r.value);
    }

    #[test]
    fn algorithm_1_quadratic_convergence() {
        let p = fig1();
        let ests: Vec<f64> = [25, 50, 100, 200]
            .iter()
            .map(|&n| compute_coefficients(&p, -20.0, n).unwrap().refined_estimate(n))
            .collect();
        let d1 = (ests[1] - ests[3]).abs();
        let d2 = (ests[2] - ests[3]).abs();
        // Halving 1/n should cut the error by roughly four.
        assert!(d2 < d1 / 2.5, "{ests:?}");
    }

    #[test]
    fn raw_and_refined_converge_together() {
        let s = compute_coefficients(&fig1(), -20.0, 200).unwrap();
        let gaps: Vec<f64> =
            [25, 50, 100, 200].iter().map(|&n| (s.raw_estimate(n) - s.refined_estimate(n)).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn algorithm_1_monotone_in_u() {
        let p = fig1();
        let mut prev = 0.0;
        for i in 0..40 {
            let u = -100.0 + 2.0 * i as f64;
            let t = algorithm_1_explosion_time(&p, u, 100).unwrap().value;
            assert!(t > prev, "u={u}");
            prev = t;
        }
    }

    #[test]
    fn estimate_continuous_up_to_case_a_boundary() {
        // At e0 = 0 every even coefficient vanishes; the estimate must not
        // jump there.
        let p = fig1();
        let s = compute_coefficients(&p, -12.5, 100).unwrap();
        assert!(s.scaled(100).abs() < 1e-12 * s.scaled(99).abs());
        let at = algorithm_1_explosion_time(&p, -12.5, 100).unwrap().value;
        let inside = algorithm_1_explosion_time(&p, -12.5 - 1e-6, 100).unwrap().value;
        assert_relative_eq!(at, inside, max_relative = 1e-5);
        let mut prev = at;
        for i in 1..=60 {
            let t = algorithm_1_explosion_time(&p, -12.5 - 0.01 * i as f64, 100).unwrap().value;
            assert!(t < prev, "u={}", -12.5 - 0.01 * i as f64);
            prev = t;
        }
    }

    #[test]
    fn mirror_fit_recovers_synthetic_singularities() {
        // b_n = x^{n+1} + (-1)^{n+1} y^{n+1} fed through the coefficient
        // normalization.
        let alpha = 0.7;
        let k = asymptotic_constant(alpha);
        let (x, y) = (2.0f64, 1.9f64);
        let coeffs = (1..=40)
            .map(|n| {
                let nf = n as f64;
                let b = x.powi(n + 1) + (-1f64).powi(n + 1) * y.powi(n + 1);
                b * k * nf.powf(alpha - 1.0)
            })
            .collect();
        let s = SeriesState { u: -1.0, alpha, scale: 1.0, coeffs };
        let (t, strength) = s.mirror_corrected_estimate(40).unwrap();
        assert_relative_eq!(t, (1.0 / x).powf(1.0 / alpha), max_relative = 1e-10);
        assert!(strength > 1.0);
    }

    #[test]
    fn method_serializes_as_its_name() {
        for m in [
            Method::ClosedForm,
            Method::Algorithm1,
            Method::Algorithm2LowerBound,
            Method::BoundLower,
            Method::BoundUpper,
            Method::VieOracle,
        ] {
            assert_eq!(serde_json::to_value(m).unwrap(), m.as_str());
        }
    }

    #[test]
    fn wrong_case_errors() {
        let p = fig1();
        assert!(matches!(algorithm_1_explosion_time(&p, -8.0, 100), Err(Error::WrongCase { .. })));
        assert!(matches!(algorithm_2_lower_bound(&p, -20.0, 200), Err(Error::WrongCase { .. })));
        assert!(matches!(algorithm_2_lower_bound(&p, 0.5, 200), Err(Error::WrongCase { .. })));
    }

    #[test]
    fn algorithm_2_is_a_lower_bound() {
        let p = fig1();
        let r = algorithm_2_lower_bound(&p, -8.0, 200).unwrap();
        assert!(r.is_bound());
        assert!(r.value > 0.0 && r.value <= upper_bound(&p, -8.0).unwrap());
        let pc = fig1().with_alpha(0.999).unwrap();
        let r = algorithm_2_lower_bound(&pc, -8.0, 200).unwrap();
        assert!(r.value <= t1_star(&pc, -8.0) * 1.01);
    }

    #[test]
    fn polylog_approximation_at_zero_and_domain() {
        let approx = PolylogApproximation::new(&fig1(), -20.0, 10).unwrap();
        assert_eq!(approx.eval(0.0).unwrap(), 0.0);
        assert!(approx.eval(approx.explosion_time()).is_err());
        assert!(f_approx(&fig1(), -8.0, 0.1, 10).is_err());
    }

    #[test]
    fn polylog_approximation_matches_series_inside_radius() {
        // Well inside the radius the truncated series converges quickly.
        let p = fig1();
        let approx = PolylogApproximation::new(&p, -20.0, 10).unwrap();
        let s = compute_coefficients(&p, -20.0, 400).unwrap();
        let t = 0.3 * approx.explosion_time();
        let x = t.powf(p.alpha) / s.scale;
        let series: f64 = (1..=400).map(|n| s.scaled(n) * x.powi(n as i32)).sum();
        assert_relative_eq!(approx.eval(t).unwrap(), series, max_relative = 1e-5);
    }

    #[test]
    fn csv_export() {
        let s = compute_coefficients(&fig1(), -20.0, 3).unwrap();
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,log_abs_a,sign");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[1].ends_with(",1"));
    }
}
