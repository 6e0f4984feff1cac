//! Direct solution of the Volterra integral equation
//!
//! ```text
//! f(u, t) = 1/Γ(α) ∫₀ᵗ (t-s)^{α-1} G(u, f(u, s)) ds,   G(u, w) = w² + c2 w + c1 c3,
//! ```
//!
//! for real or complex `u`, with blow-up detection and the moment generating
//! function built from `ψ = f / c3`.
//!
//! The default scheme is the fractional Adams method (product trapezoidal
//! weights). Because `G` is quadratic, the implicit corrector equation
//! `y = H + κ G(y)` is solved in closed form instead of by iteration. When it
//! has no real solution the step size cannot resolve the solution any more,
//! which is the discrete signature of blow-up.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::bounds;
use crate::error::{Error, Result};
use crate::model::{classify, ModelParams};
use crate::series::{Diagnostics, ExplosionResult, Method};
use crate::special::{gamma, ln_gamma};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;
pub const MIN_STEPS: usize = 16;
/// Corrector breakdown further than this many steps before the blow-up
/// predicted by the profile means the grid is too coarse.
const PREMATURE_BREAKDOWN_STEPS: f64 = 8.0;

/// Values the solver can run on: `f64` for real moments, `Complex64` for
/// complex ones.
pub trait VieScalar:
    Copy
    + std::fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn from_real(x: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn modulus(self) -> f64;
    fn is_finite_value(self) -> bool;
    /// Smaller-magnitude root `y` of `κ y² - b y + q = 0`; `None` if there is
    /// no admissible root.
    fn small_root(kappa: f64, b: Self, q: Self) -> Option<Self>;
    /// Riccati coefficients `(c1 c3, c2)` at moment `u`.
    fn coefficients(params: &ModelParams, u: Self) -> (Self, Self);
    fn exp_value(self) -> Self;
}

impl VieScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn small_root(kappa: f64, b: f64, q: f64) -> Option<f64> {
        let disc = b * b - 4.0 * kappa * q;
        if !(disc >= 0.0) {
            return None;
        }
        let denom = b + b.signum() * disc.sqrt();
        if denom == 0.0 {
            return None;
        }
        Some(2.0 * q / denom)
    }
    fn coefficients(params: &ModelParams, u: f64) -> (f64, f64) {
        let c1 = 0.5 * u * (u - 1.0);
        (c1 * params.c3(), params.rho * params.xi * u - params.lambda)
    }
    fn exp_value(self) -> Self {
        self.exp()
    }
}

impl VieScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn small_root(kappa: f64, b: Complex64, q: Complex64) -> Option<Complex64> {
        let s = (b * b - 4.0 * kappa * q).sqrt();
        // Pick the sign that avoids cancellation in b ± s.
        let denom = if (b + s).norm() >= (b - s).norm() { b + s } else { b - s };
        if denom.norm() == 0.0 {
            return None;
        }
        Some(2.0 * q / denom)
    }
    fn coefficients(params: &ModelParams, u: Complex64) -> (Complex64, Complex64) {
        let c1 = 0.5 * u * (u - 1.0);
        (c1 * params.c3(), params.rho * params.xi * u - params.lambda)
    }
    fn exp_value(self) -> Self {
        self.exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Fractional Adams: product trapezoidal rule, implicit in the new value.
    #[default]
    Adams,
    /// Explicit product rectangle rule, kept as a cross-check.
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VieConfig {
    pub scheme: Scheme,
    /// `|f|` above this value counts as blow-up.
    pub blowup_threshold: f64,
}

impl Default for VieConfig {
    fn default() -> Self {
        Self { scheme: Scheme::Adams, blowup_threshold: DEFAULT_BLOWUP_THRESHOLD }
    }
}

/// Solution on the uniform grid `t_m = m h`. When the solution blows up the
/// grid stops at the last resolved point.
#[derive(Debug, Clone, PartialEq)]
pub struct VieSolution<T> {
    pub u: T,
    pub step: f64,
    pub t_end: f64,
    pub grid: Vec<f64>,
    pub values: Vec<T>,
    pub blew_up: bool,
    /// Blow-up time estimated from the tail of the solution; present iff
    /// `blew_up`.
    pub blowup_time: Option<f64>,
}

impl<T: VieScalar> VieSolution<T> {
    pub fn last(&self) -> T {
        *self.values.last().expect("grid contains t = 0")
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.modulus()).fold(0.0, f64::max)
    }

    /// CSV with columns `t,re_f,im_f`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_f,im_f\n");
        for (t, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{t},{},{}", v.re(), v.im());
        }
        out
    }
}

/// Second-difference weights `(k+1)^p + (k-1)^p - 2 k^p`, `k ≥ 1`, computed
/// without cancellation for large `k`.
fn second_difference(k: f64, p: f64) -> f64 {
    if k < 16.0 {
        return (k + 1.0).powf(p) + (k - 1.0).powf(p) - 2.0 * k.powf(p);
    }
    let x = 1.0 / k;
    k.powf(p) * ((p * x.ln_1p()).exp_m1() + (p * (-x).ln_1p()).exp_m1())
}

/// First-difference weights `(k+1)^p - k^p`, `k ≥ 0`.
fn first_difference(k: f64, p: f64) -> f64 {
    if k < 16.0 {
        return (k + 1.0).powf(p) - k.powf(p);
    }
    k.powf(p) * (p * (1.0 / k).ln_1p()).exp_m1()
}

/// Product trapezoidal weights for `I^β` on a uniform grid, in units of
/// `h^β / Γ(β+2)`: the value at `t_n` is
/// `start(n) φ_0 + Σ_{j=1}^{n-1} lag(n-j) φ_j + φ_n`.
#[derive(Debug, Clone)]
struct TrapezoidWeights {
    beta: f64,
    lag: Vec<f64>,
}

impl TrapezoidWeights {
    fn new(beta: f64, n: usize) -> Self {
        let p = beta + 1.0;
        let lag = (0..=n).map(|k| if k == 0 { 0.0 } else { second_difference(k as f64, p) }).collect();
        Self { beta, lag }
    }

    /// Weight of `φ_0` at `t_n`, `n ≥ 1`.
    fn start(&self, n: usize) -> f64 {
        let m = (n - 1) as f64;
        let b = self.beta;
        m.powf(b + 1.0) - (m - b) * (m + 1.0).powf(b)
    }
}

/// Fractional integral `I^β φ (t_n)` of grid values `φ_0..=φ_n` by product
/// trapezoidal integration. `β = 0` returns `φ_n`.
pub fn fractional_integral<T: VieScalar>(values: &[T], step: f64, beta: f64) -> T {
    let n = values.len() - 1;
    if n == 0 {
        return if beta == 0.0 { values[0] } else { T::zero() };
    }
    if beta == 0.0 {
        return values[n];
    }
    let w = TrapezoidWeights::new(beta, n);
    let mut acc = values[0] * w.start(n) + values[n];
    for j in 1..n {
        acc = acc + values[j] * w.lag[n - j];
    }
    acc * (step.powf(beta) / gamma(beta + 2.0))
}

fn check_inputs(params: &ModelParams, t_end: f64, steps: usize) -> Result<()> {
    params.validate()?;
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("t_end must be positive and finite, got {t_end}")));
    }
    if steps < MIN_STEPS {
        return Err(Error::InvalidInput(format!("need at least {MIN_STEPS} steps, got {steps}")));
    }
    Ok(())
}

/// Solve on `[0, t_end]` with `steps` uniform steps.
pub fn solve_vie<T: VieScalar>(params: &ModelParams, u: T, t_end: f64, steps: usize) -> Result<VieSolution<T>> {
    solve_vie_with(params, u, t_end, steps, &VieConfig::default())
}

pub fn solve_vie_with<T: VieScalar>(
    params: &ModelParams,
    u: T,
    t_end: f64,
    steps: usize,
    cfg: &VieConfig,
) -> Result<VieSolution<T>> {
    check_inputs(params, t_end, steps)?;
    let alpha = params.alpha;
    let h = t_end / steps as f64;
    let (d1, c2) = T::coefficients(params, u);
    let g = |w: T| w * w + c2 * w + d1;

    let mut grid = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut g_values = Vec::with_capacity(steps + 1);
    grid.push(0.0);
    values.push(T::zero());
    g_values.push(g(T::zero()));

    let mut blew_up = false;
    match cfg.scheme {
        Scheme::Adams => {
            let weights = TrapezoidWeights::new(alpha, steps);
            let kappa = h.powf(alpha) / gamma(alpha + 2.0);
            let b = T::from_real(1.0) - c2 * kappa;
            for n in 1..=steps {
                let mut hist = g_values[0] * weights.start(n);
                for j in 1..n {
                    hist = hist + g_values[j] * weights.lag[n - j];
                }
                let q = (hist + d1) * kappa;
                let Some(y) = T::small_root(kappa, b, q) else {
                    // Losing the root is only a blow-up signal once the
                    // profile predicts blow-up within a few steps.
                    let f = values.last().map_or(0.0, |v: &T| v.modulus());
                    let remaining = (profile_constant(alpha) / f).powf(1.0 / alpha);
                    if !(remaining <= PREMATURE_BREAKDOWN_STEPS * h) {
                        return Err(Error::NonConvergence { t: n as f64 * h });
                    }
                    blew_up = true;
                    break;
                };
                if !y.is_finite_value() || y.modulus() > cfg.blowup_threshold {
                    blew_up = true;
                    break;
                }
                grid.push(n as f64 * h);
                values.push(y);
                g_values.push(g(y));
            }
        }
        Scheme::Rectangle => {
            let scale = h.powf(alpha) / gamma(alpha + 1.0);
            let lag: Vec<f64> = (0..steps).map(|k| first_difference(k as f64, alpha)).collect();
            for n in 1..=steps {
                let mut acc = T::zero();
                for j in 0..n {
                    acc = acc + g_values[j] * lag[n - 1 - j];
                }
                let y = acc * scale;
                if !y.is_finite_value() || y.modulus() > cfg.blowup_threshold {
                    blew_up = true;
                    break;
                }
                grid.push(n as f64 * h);
                values.push(y);
                g_values.push(g(y));
            }
        }
    }

    let blowup_time = if blew_up { Some(profile_blowup_time(params, &grid, &values, t_end)) } else { None };
    Ok(VieSolution { u, step: h, t_end, grid, values, blew_up, blowup_time })
}

/// `Γ(2α)/Γ(α)`, the amplitude of the blow-up profile `f ~ c (T - t)^{-α}`.
pub fn profile_constant(alpha: f64) -> f64 {
    (ln_gamma(2.0 * alpha) - ln_gamma(alpha)).exp()
}

/// Blow-up time from the last resolved value, inverting the leading-order
/// profile `f(t) ≈ c (T - t)^{-α}`.
fn profile_blowup_time<T: VieScalar>(params: &ModelParams, grid: &[f64], values: &[T], t_end: f64) -> f64 {
    let c = profile_constant(params.alpha);
    let t = *grid.last().expect("grid contains t = 0");
    let f = values.last().expect("grid contains t = 0").modulus();
    if f <= 0.0 {
        return t.min(t_end);
    }
    (t + (c / f).powf(1.0 / params.alpha)).min(t_end)
}

/// Fractional integrals `I^β φ (t_n)` for every grid point `n`.
pub fn fractional_integral_path<T: VieScalar>(values: &[T], step: f64, beta: f64) -> Vec<T> {
    if beta == 0.0 {
        return values.to_vec();
    }
    let n_max = values.len() - 1;
    let w = TrapezoidWeights::new(beta, n_max);
    let scale = step.powf(beta) / gamma(beta + 2.0);
    let mut out = Vec::with_capacity(values.len());
    out.push(T::zero());
    for n in 1..=n_max {
        let mut acc = values[0] * w.start(n) + values[n];
        for j in 1..n {
            acc = acc + values[j] * w.lag[n - j];
        }
        out.push(acc * scale);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub min_steps: usize,
    pub max_steps: usize,
    /// Relative agreement required between two consecutive refinements.
    pub rel_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { min_steps: 256, max_steps: 1 << 14, rel_tol: 5e-3 }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if self.min_steps < MIN_STEPS || self.max_steps < self.min_steps {
            return Err(Error::InvalidInput(format!(
                "oracle steps must satisfy {MIN_STEPS} ≤ min ≤ max, got {} and {}",
                self.min_steps, self.max_steps
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("oracle tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Explosion time as the blow-up time of the integral equation. `+∞` in
/// cases C and D.
pub fn blowup_time_oracle(params: &ModelParams, u: f64) -> Result<ExplosionResult> {
    blowup_time_oracle_with(params, u, &OracleConfig::default())
}

/// The search first widens the time window geometrically from the lower
/// bound until the solution blows up inside it (at the latest at the upper
/// bound), then shrinks the window to the detected blow-up and doubles the
/// step count until two consecutive estimates agree to `rel_tol`.
pub fn blowup_time_oracle_with(params: &ModelParams, u: f64, cfg: &OracleConfig) -> Result<ExplosionResult> {
    params.validate()?;
    cfg.validate()?;
    let case = classify(params, u);
    if !case.explodes() {
        return Ok(ExplosionResult { value: f64::INFINITY, method: Method::VieOracle, case, diagnostics: None });
    }
    let (lower, upper) = bounds::wellposed_sandwich(params, u)?;
    let ceiling = 1.05 * upper;
    let mut window = (2.0 * lower).min(ceiling);
    let mut steps = cfg.min_steps;
    let mut sol = solve_refining(params, u, window, &mut steps, cfg.max_steps)?;
    while !sol.blew_up {
        if window >= ceiling {
            // Refine in place; the window is known to contain the blow-up.
            if steps >= cfg.max_steps {
                return Err(Error::Numerical(format!("no blow-up below the upper bound {upper} at u = {u}")));
            }
            steps *= 2;
        } else {
            window = (2.0 * window).min(ceiling);
        }
        sol = solve_refining(params, u, window, &mut steps, cfg.max_steps)?;
    }
    let mut estimate = sol.blowup_time.expect("blow-up time present");
    let mut previous: Option<(usize, f64)> = None;
    loop {
        if let Some((coarse_steps, coarse)) = previous {
            let gap = ((estimate - coarse) / estimate).abs();
            if gap <= cfg.rel_tol && steps >= cfg.min_steps || steps >= cfg.max_steps {
                return Ok(ExplosionResult {
                    value: estimate,
                    method: Method::VieOracle,
                    case,
                    diagnostics: Some(Diagnostics {
                        coarse_order: coarse_steps,
                        coarse_estimate: coarse,
                        order: steps,
                        estimate,
                        rel_gap: gap,
                    }),
                });
            }
        }
        previous = Some((steps, estimate));
        steps = (2 * steps).min(cfg.max_steps.max(steps));
        window = (1.25 * estimate).min(ceiling);
        sol = solve_refining(params, u, window, &mut steps, cfg.max_steps)?;
        if !sol.blew_up {
            // The shrunken window missed the blow-up; fall back to the full one.
            window = ceiling;
            sol = solve_refining(params, u, window, &mut steps, cfg.max_steps)?;
        }
        estimate =
            sol.blowup_time.ok_or_else(|| Error::Numerical(format!("blow-up lost under refinement at u = {u}")))?;
    }
}

/// Solve, doubling `steps` while the corrector reports a too-coarse grid.
fn solve_refining(
    params: &ModelParams,
    u: f64,
    t_end: f64,
    steps: &mut usize,
    max_steps: usize,
) -> Result<VieSolution<f64>> {
    loop {
        match solve_vie(params, u, t_end, *steps) {
            Err(Error::NonConvergence { .. }) if *steps < max_steps => *steps = (2 * *steps).min(max_steps),
            other => return other,
        }
    }
}

/// Solution-dependent pieces of the moment generating function along a grid.
fn mgf_from_solution<T: VieScalar>(params: &ModelParams, sol: &VieSolution<T>) -> Vec<T> {
    let inv_c3 = 1.0 / params.c3();
    let psi: Vec<T> = sol.values.iter().map(|&f| f * inv_c3).collect();
    let i1 = fractional_integral_path(&psi, sol.step, 1.0);
    let i_frac = fractional_integral_path(&psi, sol.step, 1.0 - params.alpha);
    let a = params.vbar * params.lambda;
    i1.iter().zip(&i_frac).map(|(&x, &y)| (x * a + y * params.v0).exp_value()).collect()
}

pub const DEFAULT_MGF_STEPS: usize = 2048;

/// `E[S_t^u]` (for `S_0 = 1`) for real or complex `u`.
pub fn mgf<T: VieScalar>(params: &ModelParams, u: T, t: f64) -> Result<T> {
    mgf_with(params, u, t, DEFAULT_MGF_STEPS)
}

pub fn mgf_with<T: VieScalar>(params: &ModelParams, u: T, t: f64, steps: usize) -> Result<T> {
    params.validate()?;
    if t == 0.0 {
        return Ok(T::from_real(1.0));
    }
    let explosion_time = blowup_time_oracle(params, u.re())?.value;
    if t >= explosion_time {
        return Err(Error::Explosion { t, explosion_time });
    }
    let sol = solve_vie(params, u, t, steps)?;
    if sol.blew_up {
        return Err(Error::Explosion { t, explosion_time: sol.blowup_time.unwrap_or(t) });
    }
    Ok(*mgf_from_solution(params, &sol).last().expect("non-empty grid"))
}

/// The solution together with the moment generating function on its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VieReport<T> {
    pub solution: VieSolution<T>,
    pub mgf: Vec<T>,
}

impl<T: VieScalar> VieReport<T> {
    pub fn new(params: &ModelParams, solution: VieSolution<T>) -> Self {
        let mgf = mgf_from_solution(params, &solution);
        Self { solution, mgf }
    }

    /// CSV with columns `t,re_f,im_f,re_mgf,im_mgf`, followed by a
    /// `# blow_up,...` metadata row.
    pub fn to_csv(&self) -> String {
        let s = &self.solution;
        let mut out = String::from("t,re_f,im_f,re_mgf,im_mgf\n");
        for ((t, f), m) in s.grid.iter().zip(&s.values).zip(&self.mgf) {
            let _ = writeln!(out, "{t},{},{},{},{}", f.re(), f.im(), m.re(), m.im());
        }
        match s.blowup_time {
            Some(bt) => {
                let _ = writeln!(out, "# blow_up,true,blowup_time,{bt}");
            }
            None => out.push_str("# blow_up,false,blowup_time,\n"),
        }
        out
    }
}

/// Moment generating function values as `(u, t, Re, Im)` tuples.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MgfPoint {
    pub u_re: f64,
    pub u_im: f64,
    pub t: f64,
    pub re: f64,
    pub im: f64,
}

pub fn mgf_points<T: VieScalar>(params: &ModelParams, u: T, times: &[f64], steps: usize) -> Result<Vec<MgfPoint>> {
    times
        .iter()
        .map(|&t| {
            let m = mgf_with(params, u, t, steps)?;
            Ok(MgfPoint { u_re: u.re(), u_im: u.im(), t, re: m.re(), im: m.im() })
        })
        .collect()
}

pub fn mgf_points_csv(points: &[MgfPoint]) -> String {
    let mut out = String::from("u_re,u_im,t,re,im\n");
    for p in points {
        let _ = writeln!(out, "{},{},{},{},{}", p.u_re, p.u_im, p.t, p.re, p.im);
    }
    out
}
