//! Moment explosion in the rough Heston model.
//!
//! For a moment `u`, the explosion time `T*(u)` is the first maturity at
//! which `E[S_t^u]` becomes infinite. It is the blow-up time of the solution
//! of a fractional Riccati equation, written here as a weakly singular
//! Volterra integral equation `f = I^α G(u, f)`.
//!
//! * [`model`]: parameters, Riccati coefficients, the A/B/C/D case split.
//! * [`classical`]: closed forms for `alpha = 1`.
//! * [`series`]: fractional power series of `f`, explosion time from
//!   coefficient asymptotics, the polylogarithm approximation.
//! * [`bounds`]: explicit lower/upper bounds in cases A and B.
//! * [`vie`]: direct numerical solution of the integral equation, blow-up
//!   detection and the moment generating function (real or complex `u`).
//! * [`critical`]: critical moments, Lee's wing slope, density tail exponents.

// `!(x > 0.0)` rejects NaN on purpose; quadrature loops index weights and values together.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod classical;
pub mod critical;
pub mod error;
pub mod model;
pub mod quad;
pub mod roots;
pub mod series;
pub mod special;
pub mod vie;

pub use classical::Side;
pub use error::{Error, Result};
pub use model::{classify, riccati_coeffs, ModelParams, MomentCase, RiccatiCoeffs};
pub use series::{ExplosionResult, Method, SeriesState};
