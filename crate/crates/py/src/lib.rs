//! Python bindings. Errors from invalid input or an out-of-range request
//! raise `ValueError`; numerical failures raise `ArithmeticError`.

use engine::bounds::{lower_bound, upper_bound};
use engine::critical::CriticalSolver;
use engine::vie::{self, OracleConfig, VieConfig, VieSolution};
use engine::{classical, series, Error, ExplosionResult, Side};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidParams(_)
        | Error::InvalidInput(_)
        | Error::WrongCase { .. }
        | Error::Domain { .. }
        | Error::MaturityOutOfRange { .. }
        | Error::CorrelationSign(_)
        | Error::Explosion { .. } => PyValueError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn parse_side(side: &str) -> PyResult<Side> {
    side.parse().map_err(py_err)
}

#[pyclass(frozen, from_py_object, module = "rough_explosion", name = "ModelParams")]
#[derive(Clone, Copy)]
struct PyParams(engine::ModelParams);

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (alpha=0.6, rho=-0.8, lambda_=2.0, xi=0.2, vbar=0.04, v0=0.04))]
    fn new(alpha: f64, rho: f64, lambda_: f64, xi: f64, vbar: f64, v0: f64) -> PyResult<Self> {
        engine::ModelParams::new(alpha, rho, lambda_, xi, vbar, v0).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        engine::ModelParams::from_json(text).map(Self).map_err(py_err)
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha
    }
    #[getter]
    fn rho(&self) -> f64 {
        self.0.rho
    }
    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }
    #[getter]
    fn xi(&self) -> f64 {
        self.0.xi
    }
    #[getter]
    fn vbar(&self) -> f64 {
        self.0.vbar
    }
    #[getter]
    fn v0(&self) -> f64 {
        self.0.v0
    }

    fn __repr__(&self) -> String {
        let p = self.0;
        format!(
            "ModelParams(alpha={}, rho={}, lambda_={}, xi={}, vbar={}, v0={})",
            p.alpha, p.rho, p.lambda, p.xi, p.vbar, p.v0
        )
    }
}

fn result_dict<'py>(py: Python<'py>, r: &ExplosionResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("case", r.case.as_str())?;
    d.set_item("is_bound", r.is_bound())?;
    Ok(d)
}

/// Case "A", "B", "C" or "D" of the moment `u`.
#[pyfunction]
fn classify(params: PyParams, u: f64) -> &'static str {
    engine::classify(&params.0, u).as_str()
}

/// Riccati coefficients of `u` as a dict.
#[pyfunction]
fn riccati_coeffs<'py>(py: Python<'py>, params: PyParams, u: f64) -> PyResult<Bound<'py, PyDict>> {
    let k = engine::riccati_coeffs(&params.0, u);
    let d = PyDict::new(py);
    for (name, v) in [("c1", k.c1), ("c2", k.c2), ("c3", k.c3), ("e0", k.e0), ("e1", k.e1), ("d1", k.d1), ("d2", k.d2)]
    {
        d.set_item(name, v)?;
    }
    Ok(d)
}

/// Explosion time of the classical model (`alpha = 1`) with the same rho, lambda, xi.
#[pyfunction]
fn t1_star(params: PyParams, u: f64) -> f64 {
    classical::t1_star(&params.0, u)
}

#[pyfunction]
#[pyo3(signature = (params, u, n_max=series::DEFAULT_N_MAX_ALGORITHM_1))]
fn algorithm_1<'py>(py: Python<'py>, params: PyParams, u: f64, n_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = series::algorithm_1_explosion_time(&params.0, u, n_max).map_err(py_err)?;
    result_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (params, u, n_max=series::DEFAULT_N_MAX_ALGORITHM_2))]
fn algorithm_2<'py>(py: Python<'py>, params: PyParams, u: f64, n_max: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = series::algorithm_2_lower_bound(&params.0, u, n_max).map_err(py_err)?;
    result_dict(py, &r)
}

/// `(lower, upper)` explosion-time bounds in cases A and B.
#[pyfunction]
fn bounds(params: PyParams, u: f64) -> PyResult<(f64, f64)> {
    let lo = lower_bound(&params.0, u).map_err(py_err)?;
    let hi = upper_bound(&params.0, u).map_err(py_err)?;
    Ok((lo, hi))
}

/// Explosion time from the integral equation solver; `inf` in cases C and D.
#[pyfunction]
#[pyo3(signature = (params, u, max_steps=None))]
fn blowup_time_oracle<'py>(
    py: Python<'py>,
    params: PyParams,
    u: f64,
    max_steps: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut cfg = OracleConfig::default();
    if let Some(m) = max_steps {
        cfg.max_steps = m;
    }
    let r = py.detach(|| vie::blowup_time_oracle_with(&params.0, u, &cfg)).map_err(py_err)?;
    result_dict(py, &r)
}

/// `E[S_t^u]` for real or complex `u`. Returns a complex number when `u` is complex.
#[pyfunction]
#[pyo3(signature = (params, u, t, steps=vie::DEFAULT_MGF_STEPS))]
fn mgf<'py>(
    py: Python<'py>,
    params: PyParams,
    u: &Bound<'py, PyAny>,
    t: f64,
    steps: usize,
) -> PyResult<Bound<'py, PyAny>> {
    if let Ok(x) = u.extract::<f64>() {
        let v = py.detach(|| vie::mgf_with(&params.0, x, t, steps)).map_err(py_err)?;
        return Ok(v.into_pyobject(py)?.into_any());
    }
    let z: Complex64 = u.extract()?;
    let v = py.detach(|| vie::mgf_with(&params.0, z, t, steps)).map_err(py_err)?;
    Ok(v.into_pyobject(py)?.into_any())
}

fn solution_dict<'py, T, F>(py: Python<'py>, s: &VieSolution<T>, f: F) -> PyResult<Bound<'py, PyDict>>
where
    T: Copy,
    F: Fn(T) -> Complex64,
{
    let d = PyDict::new(py);
    d.set_item("t", s.grid.clone())?;
    d.set_item("f", s.values.iter().map(|&v| f(v)).collect::<Vec<_>>())?;
    d.set_item("blew_up", s.blew_up)?;
    d.set_item("blowup_time", s.blowup_time)?;
    Ok(d)
}

/// Solve the integral equation on `steps` uniform steps of `[0, t_end]`.
/// `f` is returned as a list of complex numbers and stops at blow-up.
#[pyfunction]
#[pyo3(signature = (params, u, t_end, steps=1024, blowup_threshold=vie::DEFAULT_BLOWUP_THRESHOLD))]
fn solve_vie<'py>(
    py: Python<'py>,
    params: PyParams,
    u: &Bound<'py, PyAny>,
    t_end: f64,
    steps: usize,
    blowup_threshold: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = VieConfig { blowup_threshold, ..VieConfig::default() };
    if let Ok(x) = u.extract::<f64>() {
        let s = py.detach(|| vie::solve_vie_with(&params.0, x, t_end, steps, &cfg)).map_err(py_err)?;
        return solution_dict(py, &s, |v| Complex64::new(v, 0.0));
    }
    let z: Complex64 = u.extract()?;
    let s = py.detach(|| vie::solve_vie_with(&params.0, z, t_end, steps, &cfg)).map_err(py_err)?;
    solution_dict(py, &s, |v| v)
}

/// Critical moment at maturity `T` with Lee's slope and the density tail exponent.
#[pyfunction]
#[pyo3(signature = (params, maturity, side="lower"))]
fn critical_moment<'py>(py: Python<'py>, params: PyParams, maturity: f64, side: &str) -> PyResult<Bound<'py, PyDict>> {
    let side = parse_side(side)?;
    let r = py.detach(|| CriticalSolver::new(params.0).and_then(|s| s.report(maturity, side))).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("T", r.maturity)?;
    d.set_item("side", if side == Side::Lower { "lower" } else { "upper" })?;
    d.set_item("method", r.method.as_str())?;
    d.set_item("u_critical", r.u_minus.or(r.u_plus))?;
    d.set_item("residual", r.residual)?;
    d.set_item("lee_slope", r.lee_slope)?;
    d.set_item("tail_exponent", r.left_tail_exponent.or(r.right_tail_exponent))?;
    Ok(d)
}

#[pymodule]
fn rough_explosion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(riccati_coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(t1_star, m)?)?;
    m.add_function(wrap_pyfunction!(algorithm_1, m)?)?;
    m.add_function(wrap_pyfunction!(algorithm_2, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(blowup_time_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(mgf, m)?)?;
    m.add_function(wrap_pyfunction!(solve_vie, m)?)?;
    m.add_function(wrap_pyfunction!(critical_moment, m)?)?;
    Ok(())
}
