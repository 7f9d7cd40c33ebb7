//! Command-line front end. Exit codes: 0 success, 2 a validation metric
//! exceeded its tolerance, 3 usage, configuration or output error, 4 the
//! numerical scheme refused to run.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::error::Error;
use crate::oracle::{fd_evolve_snapshots, ks_statistic, l1_distance, mc_sample, GridDensity};
use crate::profiles::Polynomial;
use crate::qes::{fpe_reducible, QesOde};
use crate::scaling::solve_exponents;
use crate::solutions::Family;

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

pub const SUMMARY_FILE: &str = "summary.jsonl";
pub const VALIDATION_FILE: &str = "validation.jsonl";

/// Conservation tolerance for the finite-difference run.
pub const MASS_DRIFT_TOL: f64 = 1e-10;

pub fn l1_tolerance(family: Family) -> f64 {
    match family {
        Family::Gaussian | Family::Exponential => 1e-3,
        Family::Gamma => 5e-3,
    }
}

pub fn ks_tolerance(family: Family) -> f64 {
    match family {
        Family::Gaussian | Family::Exponential => 0.01,
        Family::Gamma => 0.02,
    }
}

#[derive(Debug, Parser)]
#[command(name = "fpe-sim", version, about = "Similarity solutions of Fokker-Planck equations with scaling coefficients")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write x,W,J tables and a summary for every configured time
    Figure { config: PathBuf },
    /// Compare the closed form with the finite-difference and Monte-Carlo oracles
    Validate { config: PathBuf },
    /// Test whether P y'' + Q y' + R y = 0 can come from a Fokker-Planck equation
    QesCheck {
        /// Coefficients of P, lowest degree first, comma separated
        #[arg(long = "p", allow_hyphen_values = true)]
        p: String,
        /// Coefficients of Q
        #[arg(long = "q", allow_hyphen_values = true)]
        q: String,
        /// Coefficients of R
        #[arg(long = "r", allow_hyphen_values = true)]
        r: String,
    },
    /// Solve b = a - d = 2a - e for the scaling exponents
    Exponents {
        /// Exponent of x under the scaling
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Exponent of the drift
        #[arg(long, allow_negative_numbers = true)]
        d: f64,
        /// Exponent of the diffusion
        #[arg(long, allow_negative_numbers = true)]
        e: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Io(String),
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Config(e) => write!(f, "config error: {e}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
            Self::Numerical(e) => write!(f, "numerical error: {e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSummary {
    pub time: f64,
    pub csv: String,
    pub peak_location: f64,
    pub peak_value: f64,
    pub fwhm: Option<f64>,
    pub mean: f64,
    pub variance: f64,
    /// Quadrature of the closed form over its domain.
    pub mass: f64,
    /// Trapezoidal mass of the written table.
    pub grid_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: &'static str,
    pub time: f64,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn csv_name(index: usize, t: f64) -> String {
    format!("w_{index:02}_t{t}.csv")
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CliError> {
    let mut text = String::new();
    for r in records {
        text.push_str(&serde_json::to_string(r).expect("records serialize"));
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Writes one `x,W,J` table per configured time plus `summary.jsonl`.
pub fn run_figure(cfg: &ExperimentConfig) -> Result<Vec<TimeSummary>, CliError> {
    let sol = cfg.solution()?;
    let out = &cfg.output_path;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut summaries = Vec::with_capacity(cfg.times.len());
    for (i, &t) in cfg.times.iter().enumerate() {
        let grid = GridDensity::from_solution(&sol, cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n, t)
            .map_err(CliError::Numerical)?;
        let mut csv = String::from("x,W,J\n");
        for (x, &w) in grid.nodes().zip(grid.values()) {
            let j = sol.alpha() * x * w / t;
            csv.push_str(&format!("{x:.16e},{w:.16e},{j:.16e}\n"));
        }
        let name = csv_name(i, t);
        let path = out.join(&name);
        fs::write(&path, csv).map_err(io_err(&path))?;
        let stats = sol.profile_stats(t).map_err(CliError::Numerical)?;
        summaries.push(TimeSummary {
            time: t,
            csv: name,
            peak_location: stats.peak_location,
            peak_value: stats.peak_value,
            fwhm: stats.fwhm,
            mean: stats.mean,
            variance: stats.variance,
            mass: sol.mass(t).map_err(CliError::Numerical)?,
            grid_mass: grid.mass(),
        });
    }
    write_jsonl(&out.join(SUMMARY_FILE), &summaries)?;
    Ok(summaries)
}

/// Evolves the closed form from the first configured time with the
/// finite-difference oracle and, when `n_paths > 0`, the path sampler.
pub fn run_validate(cfg: &ExperimentConfig) -> Result<ValidationReport, CliError> {
    let oracle = match cfg.oracle {
        Some(o) if o.enabled => o,
        _ => {
            return Err(CliError::Config(ConfigError {
                field: "oracle.enabled".into(),
                message: "validation needs an enabled [oracle] section".into(),
            }))
        }
    };
    if cfg.times.len() < 2 {
        return Err(CliError::Config(ConfigError {
            field: "times".into(),
            message: "validation needs an initial time and at least one later time".into(),
        }));
    }
    let sol = cfg.solution()?;
    let pair = sol.coefficients();
    let g = cfg.grid;
    let t0 = cfg.times[0];
    let t_last = cfg.times[cfg.times.len() - 1];
    let num = CliError::Numerical;

    let w0 = GridDensity::from_solution(&sol, g.x_min, g.x_max, g.n, t0).map_err(num)?;
    let fd = fd_evolve_snapshots(&pair, &w0, &cfg.times[1..], oracle.n_steps).map_err(num)?;
    let mut checks = Vec::new();
    let l1_tol = l1_tolerance(sol.family());
    for snap in &fd.snapshots {
        let exact = GridDensity::from_solution(&sol, g.x_min, g.x_max, g.n, snap.time()).map_err(num)?;
        let l1 = l1_distance(snap, &exact).map_err(num)?;
        checks.push(Check {
            check: "fd-l1",
            time: snap.time(),
            value: l1,
            tolerance: l1_tol,
            passed: l1 < l1_tol,
        });
    }
    let drift = (fd.final_density().mass() - w0.mass()).abs();
    checks.push(Check {
        check: "fd-mass-drift",
        time: t_last,
        value: drift,
        tolerance: MASS_DRIFT_TOL,
        passed: drift < MASS_DRIFT_TOL,
    });

    if oracle.n_paths > 0 {
        let dt = oracle.dt.expect("validated: dt present when n_paths > 0");
        let ens = mc_sample(&pair, &sol, t0, t_last, oracle.n_paths, dt, oracle.seed).map_err(num)?;
        let ks = ks_statistic(&ens, |x| sol.cdf(x, t_last).unwrap_or(f64::NAN));
        let tol = ks_tolerance(sol.family());
        checks.push(Check {
            check: "mc-ks",
            time: t_last,
            value: ks,
            tolerance: tol,
            passed: ks < tol,
        });
    }

    let out = &cfg.output_path;
    fs::create_dir_all(out).map_err(io_err(out))?;
    write_jsonl(&out.join(VALIDATION_FILE), &checks)?;
    Ok(ValidationReport { checks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QesVerdict {
    pub reducible: bool,
    pub residual: Polynomial,
}

pub fn parse_coefficients(name: &str, text: &str) -> Result<Polynomial, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(CliError::Usage(format!("--{name} needs at least one coefficient")));
    }
    let coeffs = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--{name}: cannot parse {:?} as a number", s.trim())))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    Polynomial::new(&coeffs).map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

pub fn run_qes_check(p: &str, q: &str, r: &str) -> Result<QesVerdict, CliError> {
    let ode = QesOde::from_polynomials(
        parse_coefficients("p", p)?,
        parse_coefficients("q", q)?,
        parse_coefficients("r", r)?,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(QesVerdict {
        reducible: fpe_reducible(&ode),
        residual: ode.residual(),
    })
}

/// Runs one command, writing human-readable output to `out`; returns the exit code.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let w = |e: io::Error| CliError::Io(e.to_string());
    match command {
        Command::Figure { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            cfg.apply_env_overrides()?;
            for s in run_figure(&cfg)? {
                writeln!(out, "{}", serde_json::to_string(&s).expect("summary serializes")).map_err(w)?;
            }
            Ok(EXIT_OK)
        }
        Command::Validate { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            cfg.apply_env_overrides()?;
            let report = run_validate(&cfg)?;
            for c in &report.checks {
                writeln!(
                    out,
                    "{:<14} t={:<8} value={:.3e} tol={:.1e} {}",
                    c.check,
                    c.time,
                    c.value,
                    c.tolerance,
                    if c.passed { "ok" } else { "FAIL" }
                )
                .map_err(w)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_TOLERANCE })
        }
        Command::QesCheck { p, q, r } => {
            let v = run_qes_check(p, q, r)?;
            writeln!(out, "{}", if v.reducible { "reducible" } else { "non-reducible" }).map_err(w)?;
            writeln!(out, "residual: {}", v.residual).map_err(w)?;
            Ok(EXIT_OK)
        }
        Command::Exponents { a, d, e } => {
            let ex = solve_exponents(*a, *d, *e).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "{}", serde_json::to_string(&ex).expect("exponents serialize")).map_err(w)?;
            Ok(EXIT_OK)
        }
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fpe-sim: {e}");
            e.exit_code()
        }
    }
}
