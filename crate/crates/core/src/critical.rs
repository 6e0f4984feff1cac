//! Critical moments `u±(T)` by inverting the explosion time, Lee's wing
//! slope and the density tail exponents.
//!
//! For `rho < 0` the case-A moments form the half line `u ≤ λ/(ρξ) < 0`, on
//! which the explosion time falls from its value at the boundary to zero as
//! `u → -∞`. So `u⁻(T)` is computable for `T` up to the boundary time. For
//! `rho > 0` the picture is mirrored on `u ≥ max(λ/(ρξ), 1)`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::classical::{classical_critical_moment, Side};
use crate::error::{Error, Result};
use crate::model::{case_a_boundary, classify, ModelParams, MomentCase};
use crate::roots::bracketed_root;
use crate::series::{algorithm_1_explosion_time, DEFAULT_N_MAX_ALGORITHM_1};

pub const DEFAULT_U_TOLERANCE: f64 = 1e-8;

/// Relative residual `|T*(u) - T| / T` below which the u tolerance is not
/// tightened further.
const RESIDUAL_TARGET: f64 = 1e-7;

/// Grid used to check that the explosion time is monotone on the bracket.
const MONOTONICITY_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalMethod {
    #[serde(rename = "algorithm_1_inversion")]
    Algorithm1Inversion,
    Classical,
}

impl CriticalMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalMethod::Algorithm1Inversion => "algorithm_1_inversion",
            CriticalMethod::Classical => "classical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalMomentResult {
    pub u_critical: f64,
    pub side: Side,
    #[serde(rename = "T")]
    pub maturity: f64,
    pub method: CriticalMethod,
    /// `|T*(u_critical) - T|`.
    pub residual: f64,
}

impl CriticalMomentResult {
    /// Same quantity from the closed-form classical model.
    pub fn classical(params: &ModelParams, maturity: f64, side: Side) -> Result<Self> {
        let c = classical_critical_moment(params, maturity, side)?;
        Ok(Self { u_critical: c.u, side, maturity, method: CriticalMethod::Classical, residual: c.residual })
    }
}

/// Where the case-A half line ends on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    u: f64,
    /// Explosion time at the edge; `+∞` when the edge is the martingale
    /// moment `u = 1`, where the explosion time diverges.
    time: f64,
}

/// Critical-moment computations for one parameter set. The explosion time
/// at the case-A boundary is computed once and shared.
#[derive(Debug)]
pub struct CriticalSolver {
    params: ModelParams,
    n_max: usize,
    u_tol: f64,
    edge: OnceLock<Result<Edge>>,
}

impl CriticalSolver {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, n_max: DEFAULT_N_MAX_ALGORITHM_1, u_tol: DEFAULT_U_TOLERANCE, edge: OnceLock::new() })
    }

    pub fn with_n_max(mut self, n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidInput("n_max must be at least 2".into()));
        }
        self.n_max = n_max;
        self.edge = OnceLock::new();
        Ok(self)
    }

    pub fn with_tolerance(mut self, u_tol: f64) -> Result<Self> {
        if !(u_tol > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {u_tol}")));
        }
        self.u_tol = u_tol;
        Ok(self)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Explosion time by Algorithm 1; case A only.
    pub fn explosion_time(&self, u: f64) -> Result<f64> {
        Ok(algorithm_1_explosion_time(&self.params, u, self.n_max)?.value)
    }

    fn side_for_rho(&self) -> Side {
        if self.params.rho < 0.0 {
            Side::Lower
        } else {
            Side::Upper
        }
    }

    fn check_side(&self, side: Side) -> Result<()> {
        let rho = self.params.rho;
        match side {
            Side::Lower if rho < 0.0 => Ok(()),
            Side::Upper if rho > 0.0 => Ok(()),
            Side::Lower => {
                Err(Error::CorrelationSign(format!("the lower critical moment needs rho < 0, got rho = {rho}")))
            }
            Side::Upper => {
                Err(Error::CorrelationSign(format!("the upper critical moment needs rho > 0, got rho = {rho}")))
            }
        }
    }

    fn edge(&self) -> Result<Edge> {
        self.edge.get_or_init(|| self.compute_edge()).clone()
    }

    fn compute_edge(&self) -> Result<Edge> {
        let boundary = case_a_boundary(&self.params)
            .ok_or_else(|| Error::CorrelationSign("rho = 0 has no case-A moments".into()))?;
        let dir = match self.side_for_rho() {
            Side::Lower => -1.0,
            Side::Upper => 1.0,
        };
        if dir > 0.0 && boundary <= 1.0 {
            return Ok(Edge { u: 1.0, time: f64::INFINITY });
        }
        // Rounding in e0 can put the boundary itself in case B; step inward.
        let mut u = boundary;
        for _ in 0..64 {
            if classify(&self.params, u) == MomentCase::A {
                return Ok(Edge { u, time: self.explosion_time(u)? });
            }
            u += dir * 4.0 * f64::EPSILON * u.abs().max(1.0);
        }
        Err(Error::Numerical(format!("no case-A moment found next to {boundary}")))
    }

    /// Largest maturity for which the critical moment is computable.
    pub fn max_maturity(&self) -> Result<f64> {
        Ok(self.edge()?.time)
    }

    pub fn lower(&self, maturity: f64) -> Result<CriticalMomentResult> {
        self.solve(maturity, Side::Lower)
    }

    pub fn upper(&self, maturity: f64) -> Result<CriticalMomentResult> {
        self.solve(maturity, Side::Upper)
    }

    pub fn critical_moment(&self, maturity: f64, side: Side) -> Result<CriticalMomentResult> {
        self.solve(maturity, side)
    }

    fn solve(&self, maturity: f64, side: Side) -> Result<CriticalMomentResult> {
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(Error::InvalidInput(format!("maturity must be positive and finite, got {maturity}")));
        }
        self.check_side(side)?;
        let edge = self.edge()?;
        if maturity > edge.time {
            return Err(Error::MaturityOutOfRange { t: maturity, t_max: edge.time });
        }
        let dir = if side == Side::Lower { -1.0 } else { 1.0 };
        let near = self.near_end(edge, maturity, dir)?;
        let far = self.far_end(edge, near, maturity, dir)?;
        let objective = |u: f64| self.explosion_time(u).map_or(f64::NAN, |t| t - maturity);

        let (a, b) = match self.monotone_bracket(near, far, maturity)? {
            Some(bracket) => bracket,
            None => self.innermost_sign_change(near, far, maturity)?,
        };
        // Where the explosion time is steep (next to u = 1) the u tolerance
        // alone does not pin down T; tighten it until the residual is small.
        let mut tol = self.u_tol;
        loop {
            let u = bracketed_root(objective, a, b, tol)?.x;
            let residual = (self.explosion_time(u)? - maturity).abs();
            if residual <= RESIDUAL_TARGET * maturity || tol <= 1e-15 * u.abs() {
                return Ok(CriticalMomentResult {
                    u_critical: u,
                    side,
                    maturity,
                    method: CriticalMethod::Algorithm1Inversion,
                    residual,
                });
            }
            tol *= 1e-3;
        }
    }

    /// A case-A moment with explosion time at least `maturity`, on the edge
    /// side of the root.
    fn near_end(&self, edge: Edge, maturity: f64, dir: f64) -> Result<f64> {
        if edge.time.is_finite() {
            return Ok(edge.u);
        }
        // Edge at u = 1: the explosion time diverges there.
        let mut delta = 0.5;
        for _ in 0..60 {
            let u = edge.u + dir * delta;
            if self.explosion_time(u)? >= maturity {
                return Ok(u);
            }
            delta *= 0.5;
        }
        Err(Error::Numerical("could not bracket the critical moment near u = 1".into()))
    }

    /// Geometric expansion away from the edge until the explosion time drops
    /// below `maturity`. Explosion times scale like `|u|^{-1/α}` for large
    /// `|u|`, which seeds the first guess.
    fn far_end(&self, edge: Edge, near: f64, maturity: f64, dir: f64) -> Result<f64> {
        let t_near = self.explosion_time(near)?;
        let ratio = (t_near / maturity).max(1.0);
        let mut dist = (near.abs() * ratio.powf(self.params.alpha)).max(1.0);
        for _ in 0..200 {
            let u = edge.u + dir * dist;
            if !u.is_finite() {
                break;
            }
            if self.explosion_time(u)? < maturity {
                return Ok(u);
            }
            dist *= 2.0;
        }
        Err(Error::Numerical(format!("no moment with explosion time below {maturity}")))
    }

    /// `Some(bracket)` if the explosion time is monotone on a sample grid of
    /// the bracket, `None` otherwise.
    fn monotone_bracket(&self, near: f64, far: f64, maturity: f64) -> Result<Option<(f64, f64)>> {
        let times = self.sample(near, far, MONOTONICITY_SAMPLES)?;
        let monotone = times.windows(2).all(|w| w[1].1 <= w[0].1);
        let changes = times.windows(2).filter(|w| (w[0].1 - maturity) * (w[1].1 - maturity) <= 0.0).count();
        if monotone && changes == 1 {
            Ok(Some((near, far)))
        } else {
            Ok(None)
        }
    }

    /// Sign change closest to the edge on a refining grid: the sup/inf
    /// characterization of the critical moment without monotonicity.
    fn innermost_sign_change(&self, near: f64, far: f64, maturity: f64) -> Result<(f64, f64)> {
        let mut samples = 4 * MONOTONICITY_SAMPLES;
        let mut best = None;
        for _ in 0..4 {
            let times = self.sample(near, far, samples)?;
            let found = times
                .windows(2)
                .find(|w| (w[0].1 - maturity) >= 0.0 && (w[1].1 - maturity) < 0.0)
                .map(|w| (w[0].0, w[1].0));
            if found.is_some() {
                best = found;
            }
            samples *= 4;
        }
        best.ok_or_else(|| Error::Numerical("no sign change of T*(u) - T on the bracket".into()))
    }

    /// `(u, T*(u))` on an evenly spaced grid from `near` to `far`.
    fn sample(&self, near: f64, far: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        (0..=n)
            .map(|i| {
                let u = near + (far - near) * i as f64 / n as f64;
                Ok((u, self.explosion_time(u)?))
            })
            .collect()
    }

    pub fn lee_left_wing_slope(&self, maturity: f64) -> Result<f64> {
        let r = self.lower(maturity)?;
        Ok(lee_slope_times_maturity(r.u_critical) / maturity)
    }

    pub fn tail_exponents(&self, maturity: f64) -> Result<TailExponents> {
        match self.side_for_rho() {
            Side::Lower if self.params.rho < 0.0 => Ok(TailExponents {
                left: Some(-self.lower(maturity)?.u_critical - 1.0),
                right: None,
                note: Some("upper critical moment not computed for rho < 0"),
            }),
            _ if self.params.rho > 0.0 => Ok(TailExponents {
                left: None,
                right: Some(-self.upper(maturity)?.u_critical - 1.0),
                note: Some("lower critical moment not computed for rho > 0"),
            }),
            _ => Ok(TailExponents { left: None, right: None, note: Some("no critical moments computed for rho = 0") }),
        }
    }

    /// Everything reported for one maturity on the given side.
    pub fn report(&self, maturity: f64, side: Side) -> Result<CriticalReport> {
        let r = self.critical_moment(maturity, side)?;
        let u = r.u_critical;
        Ok(match side {
            Side::Lower => CriticalReport {
                maturity,
                side,
                method: r.method,
                u_minus: Some(u),
                u_plus: None,
                residual: r.residual,
                lee_slope: Some(lee_slope_times_maturity(u) / maturity),
                left_tail_exponent: Some(-u - 1.0),
                right_tail_exponent: None,
            },
            Side::Upper => CriticalReport {
                maturity,
                side,
                method: r.method,
                u_minus: None,
                u_plus: Some(u),
                residual: r.residual,
                lee_slope: None,
                left_tail_exponent: None,
                right_tail_exponent: Some(-u - 1.0),
            },
        })
    }
}

/// Density tail exponents: `f_T(x) = x^{left + o(1)}` as `x ↓ 0` and
/// `x^{right + o(1)}` as `x → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailExponents {
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub note: Option<&'static str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalReport {
    #[serde(rename = "T")]
    pub maturity: f64,
    pub side: Side,
    pub method: CriticalMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_plus: Option<f64>,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lee_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_tail_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_tail_exponent: Option<f64>,
}

/// `2 - 4(√(u² - u) + u)` for `u ≤ 0`: Lee's slope times maturity. Lies in
/// `(0, 2]`, equals 2 at `u = 0` and tends to 0 as `u → -∞`.
pub fn lee_slope_times_maturity(u_minus: f64) -> f64 {
    if u_minus == 0.0 {
        return 2.0;
    }
    // √(u² - u) + u = -u / (√(u² - u) - u), free of cancellation for u < 0.
    let s = (u_minus * u_minus - u_minus).sqrt();
    2.0 - 4.0 * (-u_minus / (s - u_minus))
}

pub fn lower_critical_moment(params: &ModelParams, maturity: f64) -> Result<CriticalMomentResult> {
    CriticalSolver::new(*params)?.lower(maturity)
}

pub fn upper_critical_moment(params: &ModelParams, maturity: f64) -> Result<CriticalMomentResult> {
    CriticalSolver::new(*params)?.upper(maturity)
}

/// Limsup of `σ̂(k)² / |k|` as `k → -∞`.
pub fn lee_left_wing_slope(params: &ModelParams, maturity: f64) -> Result<f64> {
    CriticalSolver::new(*params)?.lee_left_wing_slope(maturity)
}

pub fn tail_exponents(params: &ModelParams, maturity: f64) -> Result<TailExponents> {
    CriticalSolver::new(*params)?.tail_exponents(maturity)
}
