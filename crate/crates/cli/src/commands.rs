//! Subcommand bodies. Each returns the full output text.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use rough_explosion::bounds::{lower_bound, upper_bound};
use rough_explosion::classical::t1_star;
use rough_explosion::critical::CriticalSolver;
use rough_explosion::series::{algorithm_1_explosion_time, algorithm_2_lower_bound};
use rough_explosion::vie::{solve_vie_with, VieConfig, VieReport, VieScalar};
use rough_explosion::{classify as classify_u, riccati_coeffs, ModelParams, MomentCase, Side};
use serde::Serialize;

use crate::{Failure, Format};

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure { code: 4, message: e.to_string() })?;
    s.push('\n');
    Ok(s)
}

fn finite_input(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::input(format!("{name} must be finite, got {v}")))
    }
}

#[derive(Serialize)]
struct ClassifyRow {
    u: f64,
    case: MomentCase,
    e0: f64,
    e1: f64,
    c1: f64,
}

pub fn classify(params: &ModelParams, u: f64, format: Format) -> Result<String, Failure> {
    finite_input("u", u)?;
    let k = riccati_coeffs(params, u);
    let row = ClassifyRow { u, case: classify_u(params, u), e0: k.e0, e1: k.e1, c1: k.c1 };
    match format {
        Format::Json => to_json(&row),
        Format::Csv => Ok(format!("u,case,e0,e1,c1\n{},{},{},{},{}\n", row.u, row.case, row.e0, row.e1, row.c1)),
    }
}

/// One u of a sweep: the explosion time (or its Algorithm 2 lower bound in
/// case B), both explicit bounds and the classical explosion time. Values
/// are `inf` where the moment does not explode.
#[derive(Serialize)]
struct SweepRow {
    u: f64,
    case: MomentCase,
    explosion_time: f64,
    method: &'static str,
    lower_bound: f64,
    upper_bound: f64,
    t1_star: f64,
}

fn sweep_row(params: &ModelParams, u: f64, n_max: usize, n_max_b: usize) -> Result<SweepRow, Failure> {
    let case = classify_u(params, u);
    let (explosion_time, method) = match case {
        MomentCase::A => {
            let r = algorithm_1_explosion_time(params, u, n_max)?;
            (r.value, r.method.as_str())
        }
        MomentCase::B => {
            let r = algorithm_2_lower_bound(params, u, n_max_b)?;
            (r.value, r.method.as_str())
        }
        MomentCase::C | MomentCase::D => (f64::INFINITY, "none"),
    };
    let (lower, upper) = if case.explodes() {
        (lower_bound(params, u)?, upper_bound(params, u)?)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(SweepRow {
        u,
        case,
        explosion_time,
        method,
        lower_bound: lower,
        upper_bound: upper,
        t1_star: t1_star(params, u),
    })
}

pub fn sweep(
    params: &ModelParams,
    from: f64,
    to: f64,
    points: usize,
    n_max: usize,
    n_max_b: usize,
    format: Format,
) -> Result<String, Failure> {
    finite_input("from", from)?;
    finite_input("to", to)?;
    let us: Vec<f64> = match points {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    };
    // Collecting from an indexed parallel iterator keeps the input order.
    let rows: Vec<SweepRow> = us.par_iter().map(|&u| sweep_row(params, u, n_max, n_max_b)).collect::<Result<_, _>>()?;
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::from("u,case,explosion_time,method,lower_bound,upper_bound,t1_star\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.u, r.case, r.explosion_time, r.method, r.lower_bound, r.upper_bound, r.t1_star
                );
            }
            Ok(out)
        }
    }
}

pub fn critical(
    params: &ModelParams,
    maturity: f64,
    side: Side,
    n_max: usize,
    u_tol: f64,
    format: Format,
) -> Result<String, Failure> {
    let solver = CriticalSolver::new(*params)?.with_n_max(n_max)?.with_tolerance(u_tol)?;
    let r = solver.report(maturity, side)?;
    match format {
        Format::Json => to_json(&r),
        Format::Csv => {
            let u = r.u_minus.or(r.u_plus).unwrap_or(f64::NAN);
            let tail = r.left_tail_exponent.or(r.right_tail_exponent).unwrap_or(f64::NAN);
            let lee = r.lee_slope.map_or(String::new(), |s| s.to_string());
            let side = match side {
                Side::Lower => "lower",
                Side::Upper => "upper",
            };
            Ok(format!(
                "T,side,u_critical,residual,lee_slope,tail_exponent\n{},{side},{u},{},{lee},{tail}\n",
                r.maturity, r.residual
            ))
        }
    }
}

#[derive(Serialize)]
struct VieJson {
    u_re: f64,
    u_im: f64,
    t_end: f64,
    steps: usize,
    blew_up: bool,
    blowup_time: Option<f64>,
    t: Vec<f64>,
    re_f: Vec<f64>,
    im_f: Vec<f64>,
    re_mgf: Vec<f64>,
    im_mgf: Vec<f64>,
}

fn vie_output<T: VieScalar>(report: VieReport<T>, steps: usize, format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => Ok(report.to_csv()),
        Format::Json => {
            let s = &report.solution;
            to_json(&VieJson {
                u_re: s.u.re(),
                u_im: s.u.im(),
                t_end: s.t_end,
                steps,
                blew_up: s.blew_up,
                blowup_time: s.blowup_time,
                t: s.grid.clone(),
                re_f: s.values.iter().map(|v| v.re()).collect(),
                im_f: s.values.iter().map(|v| v.im()).collect(),
                re_mgf: report.mgf.iter().map(|v| v.re()).collect(),
                im_mgf: report.mgf.iter().map(|v| v.im()).collect(),
            })
        }
    }
}

pub fn vie(
    params: &ModelParams,
    u_re: f64,
    u_im: f64,
    t_end: f64,
    steps: usize,
    blowup_threshold: f64,
    format: Format,
) -> Result<String, Failure> {
    finite_input("u_re", u_re)?;
    finite_input("u_im", u_im)?;
    if !(blowup_threshold > 0.0) {
        return Err(Failure::input("blow-up threshold must be positive"));
    }
    let cfg = VieConfig { blowup_threshold, ..VieConfig::default() };
    if u_im == 0.0 {
        let sol = solve_vie_with(params, u_re, t_end, steps, &cfg)?;
        vie_output(VieReport::new(params, sol), steps, format)
    } else {
        let sol = solve_vie_with(params, Complex64::new(u_re, u_im), t_end, steps, &cfg)?;
        vie_output(VieReport::new(params, sol), steps, format)
    }
}

#[derive(Serialize)]
struct BoundsRow {
    u: f64,
    case: MomentCase,
    lower_bound: f64,
    upper_bound: f64,
}

pub fn bounds(params: &ModelParams, u: f64, format: Format) -> Result<String, Failure> {
    finite_input("u", u)?;
    let row = BoundsRow {
        u,
        case: classify_u(params, u),
        lower_bound: lower_bound(params, u)?,
        upper_bound: upper_bound(params, u)?,
    };
    match format {
        Format::Json => to_json(&row),
        Format::Csv => Ok(format!(
            "u,case,lower_bound,upper_bound\n{},{},{},{}\n",
            row.u, row.case, row.lower_bound, row.upper_bound
        )),
    }
}
