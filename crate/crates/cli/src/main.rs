use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rough_explosion::{Error, ModelParams, Side};

mod commands;

/// Environment variable holding the default parameter file.
const PARAMS_ENV: &str = "ROUGH_EXPLOSION_PARAMS";

#[derive(Debug, Parser)]
#[command(name = "rough-explosion", version, about = "Moment explosion in the rough Heston model")]
struct Cli {
    /// JSON parameter file (alpha, rho, lambda, xi, vbar, v0). Without it the
    /// built-in set alpha=0.6, rho=-0.8, lambda=2, xi=0.2, vbar=v0=0.04 is used.
    #[arg(long, global = true, env = PARAMS_ENV, value_name = "FILE")]
    params: Option<PathBuf>,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Case A/B/C/D of a moment and its Riccati coefficients.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
    /// Explosion time, bounds and the classical reference over a u-range.
    Sweep {
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Number of evenly spaced points, ends included.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Series order for Algorithm 1 (case A).
        #[arg(long, default_value_t = rough_explosion::series::DEFAULT_N_MAX_ALGORITHM_1)]
        n_max: usize,
        /// Series order for the Algorithm 2 lower bound (case B).
        #[arg(long, default_value_t = rough_explosion::series::DEFAULT_N_MAX_ALGORITHM_2)]
        n_max_b: usize,
    },
    /// Critical moment, Lee wing slope and tail exponent at one maturity.
    Critical {
        #[arg(long = "maturity", short = 'T')]
        maturity: f64,
        #[arg(long, value_parser = parse_side, default_value = "lower")]
        side: Side,
        #[arg(long, default_value_t = rough_explosion::series::DEFAULT_N_MAX_ALGORITHM_1)]
        n_max: usize,
        /// Absolute root-finding tolerance in u.
        #[arg(long, default_value_t = rough_explosion::critical::DEFAULT_U_TOLERANCE)]
        u_tol: f64,
    },
    /// Solve the integral equation on a uniform grid; reports f and the mgf.
    Vie {
        #[arg(long, allow_hyphen_values = true)]
        u_re: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        u_im: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        /// |f| above this value counts as blow-up.
        #[arg(long, default_value_t = rough_explosion::vie::DEFAULT_BLOWUP_THRESHOLD)]
        blowup_threshold: f64,
    },
    /// Explicit lower and upper explosion-time bounds (cases A and B).
    Bounds {
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
    },
}

fn parse_side(s: &str) -> Result<Side, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code: 2 input, 3 domain/range, 4 numerical.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::InvalidInput(_) => 2,
            Error::WrongCase { .. }
            | Error::Domain { .. }
            | Error::MaturityOutOfRange { .. }
            | Error::CorrelationSign(_)
            | Error::Explosion { .. } => 3,
            Error::Overflow { .. }
            | Error::DegenerateCoefficients(_)
            | Error::NonConvergence { .. }
            | Error::NotBracketed { .. }
            | Error::Numerical(_)
            | Error::Consistency(_) => 4,
        };
        Self { code, message: e.to_string() }
    }
}

fn load_params(path: Option<&PathBuf>) -> Result<ModelParams, Failure> {
    match path {
        None => Ok(ModelParams::figure_one()),
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Failure::input(format!("cannot read {}: {e}", p.display())))?;
            ModelParams::from_json(&text).map_err(Failure::from)
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let params = load_params(cli.params.as_ref())?;
    match cli.command {
        Command::Classify { u } => commands::classify(&params, u, cli.format.unwrap_or(Format::Json)),
        Command::Sweep { from, to, points, n_max, n_max_b } => {
            commands::sweep(&params, from, to, points, n_max, n_max_b, cli.format.unwrap_or(Format::Csv))
        }
        Command::Critical { maturity, side, n_max, u_tol } => {
            commands::critical(&params, maturity, side, n_max, u_tol, cli.format.unwrap_or(Format::Json))
        }
        Command::Vie { u_re, u_im, t_end, steps, blowup_threshold } => {
            commands::vie(&params, u_re, u_im, t_end, steps, blowup_threshold, cli.format.unwrap_or(Format::Csv))
        }
        Command::Bounds { u } => commands::bounds(&params, u, cli.format.unwrap_or(Format::Json)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let out = cli.out.clone();
    let result = run(cli).and_then(|text| match &out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("cannot write to stdout: {e}"))),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
