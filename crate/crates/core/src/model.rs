//! Model parameters, Riccati coefficients and the four-way case split of the
//! moment axis.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rough Heston parameters.
///
/// `alpha` is the kernel smoothness (`alpha = 1` is classical Heston).
/// `vbar` and `v0` only enter the moment generating function, never the
/// explosion time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub alpha: f64,
    pub rho: f64,
    pub lambda: f64,
    pub xi: f64,
    pub vbar: f64,
    pub v0: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: f64,
    rho: f64,
    lambda: f64,
    xi: f64,
    vbar: f64,
    v0: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.alpha, r.rho, r.lambda, r.xi, r.vbar, r.v0)
    }
}

impl ModelParams {
    pub fn new(alpha: f64, rho: f64, lambda: f64, xi: f64, vbar: f64, v0: f64) -> Result<Self> {
        let p = Self { alpha, rho, lambda, xi, vbar, v0 };
        p.validate()?;
        Ok(p)
    }

    /// Reference parameter set: `alpha = 0.6, rho = -0.8,
    /// lambda = 2, xi = 0.2`, with `vbar = v0 = 0.04`.
    pub fn figure_one() -> Self {
        Self { alpha: 0.6, rho: -0.8, lambda: 2.0, xi: 0.2, vbar: 0.04, v0: 0.04 }
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self { alpha, ..self }.validate_owned()
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        Self { rho, ..self }.validate_owned()
    }

    fn validate_owned(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(self.alpha > 0.5 && self.alpha <= 1.0) {
            return bad(&format!("alpha = {} not in (1/2, 1]", self.alpha));
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return bad(&format!("rho = {} not in (-1, 1)", self.rho));
        }
        for (name, v) in [("lambda", self.lambda), ("xi", self.xi), ("vbar", self.vbar), ("v0", self.v0)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} = {v} must be positive"));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParams(e.to_string()))
    }

    /// Quadratic coefficient `c3 = xi²/2`.
    #[inline]
    pub fn c3(&self) -> f64 {
        0.5 * self.xi * self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentCase {
    /// `c1 > 0`, `e0 ≥ 0`: finite explosion, positive series coefficients.
    A,
    /// `c1 > 0`, `e0 < 0`, `e1 < 0`: finite explosion.
    B,
    /// `c1 > 0`, `e0 < 0`, `e1 ≥ 0`: no explosion.
    C,
    /// `c1 ≤ 0` (`u ∈ [0, 1]`): no explosion.
    D,
}

impl MomentCase {
    pub fn explodes(self) -> bool {
        matches!(self, MomentCase::A | MomentCase::B)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MomentCase::A => "A",
            MomentCase::B => "B",
            MomentCase::C => "C",
            MomentCase::D => "D",
        }
    }
}

impl fmt::Display for MomentCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Coefficients of `R(u, w) = c1 + c2 w + c3 w²` and derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiccatiCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub e0: f64,
    pub e1: f64,
    pub d1: f64,
    pub d2: f64,
}

pub fn riccati_coeffs(params: &ModelParams, u: f64) -> RiccatiCoeffs {
    let c1 = 0.5 * u * (u - 1.0);
    let c2 = params.rho * params.xi * u - params.lambda;
    let c3 = params.c3();
    let e0 = 0.5 * c2;
    RiccatiCoeffs { c1, c2, c3, e0, e1: e0 * e0 - c3 * c1, d1: c1 * c3, d2: c2 }
}

/// `(e0, e1)` for complex moments.
pub fn complex_e0_e1(params: &ModelParams, u: Complex64) -> (Complex64, Complex64) {
    let c1 = 0.5 * u * (u - 1.0);
    let e0 = 0.5 * (params.rho * params.xi * u - params.lambda);
    (e0, e0 * e0 - params.c3() * c1)
}

pub fn classify_coeffs(k: &RiccatiCoeffs) -> MomentCase {
    if k.c1 <= 0.0 {
        MomentCase::D
    } else if k.e0 >= 0.0 {
        MomentCase::A
    } else if k.e1 < 0.0 {
        MomentCase::B
    } else {
        MomentCase::C
    }
}

pub fn classify(params: &ModelParams, u: f64) -> MomentCase {
    classify_coeffs(&riccati_coeffs(params, u))
}

/// `lambda / (rho xi)`, the finite end of the case-A half line
/// (right end for `rho < 0`, left end for `rho > 0`). `None` when `rho = 0`.
pub fn case_a_boundary(params: &ModelParams) -> Option<f64> {
    if params.rho == 0.0 {
        None
    } else {
        Some(params.lambda / params.rho / params.xi)
    }
}

/// The nonlinearity `G(u, w) = (w + e0)² - e1`.
#[inline]
pub fn g(k: &RiccatiCoeffs, w: f64) -> f64 {
    let s = w + k.e0;
    s * s - k.e1
}

pub fn g_at(params: &ModelParams, u: f64, w: f64) -> f64 {
    g(&riccati_coeffs(params, u), w)
}

pub fn g_complex(params: &ModelParams, u: Complex64, w: Complex64) -> Complex64 {
    let (e0, e1) = complex_e0_e1(params, u);
    let s = w + e0;
    s * s - e1
}

/// The two real zeros `u_- < 0 ≤ 1 ≤ u_+` of `e1(u)`.
///
/// `4 e1(u) = -xi²(1-rho²) u² + (xi² - 2 rho xi lambda) u + lambda²` is a
/// concave parabola, positive at 0 and at 1, so on the negative axis the
/// explosion region is `(-∞, u_-)` and on `u > 1` it is `(u_+, ∞)`.
pub fn e1_zeros(params: &ModelParams) -> (f64, f64) {
    let xi = params.xi;
    let qa = -xi * xi * (1.0 - params.rho * params.rho);
    let qb = xi * xi - 2.0 * params.rho * xi * params.lambda;
    let qc = params.lambda * params.lambda;
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    // Cancellation-free quadratic roots.
    let q = -0.5 * (qb + qb.signum() * disc);
    let r1 = q / qa;
    let r2 = qc / q;
    (r1.min(r2), r1.max(r2))
}
