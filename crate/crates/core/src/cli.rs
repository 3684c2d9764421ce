//! Command-line front end.
//!
//! Exit codes: `0` success, `1` an applicable bound check failed, `2` bad
//! input, `3` numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{
    default_k_grid, fit_inverse_alpha, fit_power_law, gap_series_with, k_grid, read_gap_csv, InverseAlphaFit,
};
use crate::bounds::{verify_all, BoundsReport, DEFAULT_EPSILON, DEFAULT_K_MIN};
use crate::eigen::{default_residual_tol, spectrum_low_with, DEFAULT_REL_TOL};
use crate::format::{ser_f64, ser_vec_f64, sig17};
use crate::graph::{assemble_hamiltonian, PathGraph, Potential};
use crate::Error;

pub use crate::graph::parse_potential_spec;

#[derive(Debug, Parser)]
#[command(name = "pathgap", version, about = "Spectral gaps of Schrödinger operators on path graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest two eigenvalues, gap and ground-state summary for one k.
    Spectrum(CommonArgs),
    /// Gap series over a k-grid (CSV).
    GapScan(CommonArgs),
    /// Gap at fixed k for the potential scaled by each alpha.
    AlphaScan(CommonArgs),
    /// Evaluate every eigenvalue bound on a k-grid; exit 1 on a violation.
    VerifyBounds(CommonArgs),
    /// Power-law fit of a gap-scan CSV (`-` reads stdin).
    Fit {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `site:strength[,site:strength]*`, or `none`.
    #[arg(long, default_value = "0:1", allow_hyphen_values = true)]
    pub potential: String,
    #[arg(long)]
    pub k: Option<usize>,
    /// `min:max:geometric|linear:count`.
    #[arg(long = "k-grid")]
    pub k_grid: Option<String>,
    /// Comma-separated scale factors for alpha-scan.
    #[arg(long, default_value = "0.5,1,2,4,8,16")]
    pub alphas: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long = "k-min", default_value_t = DEFAULT_K_MIN)]
    pub k_min: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "no-timestamp")]
    pub no_timestamp: bool,
    /// Relative bisection tolerance.
    #[arg(long, default_value_t = DEFAULT_REL_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Spectrum,
    GapScan,
    AlphaScan,
    VerifyBounds,
    Fit,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub potential: Potential,
    pub ks: Vec<usize>,
    pub alphas: Vec<f64>,
    pub epsilon: f64,
    pub k_min: usize,
    pub out: Option<PathBuf>,
    /// `None` picks the command's default: text for spectrum, CSV for the
    /// scans, JSON for verify-bounds and fit.
    pub format: Option<Format>,
    pub timestamp: bool,
    pub rel_tol: f64,
    pub input: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::ChecksFailed(n) => write!(f, "{n} applicable bound check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn io_error(e: io::Error) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses `min:max:geometric|linear:count`.
pub fn parse_k_grid(s: &str) -> Result<Vec<usize>, Error> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    let bad = || Error::Parse(format!("invalid k-grid `{s}`, expected min:max:geometric|linear:count"));
    let [min, max, kind, count] = parts.as_slice() else {
        return Err(bad());
    };
    let geometric = match *kind {
        "geometric" | "geo" => true,
        "linear" | "lin" => false,
        _ => return Err(bad()),
    };
    let min = min.parse().map_err(|_| bad())?;
    let max = max.parse().map_err(|_| bad())?;
    let count = count.parse().map_err(|_| bad())?;
    k_grid(min, max, geometric, count)
}

fn parse_alphas(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(a) if a > 0.0 && a.is_finite() => Ok(a),
                _ => Err(Error::Parse(format!("invalid alpha `{t}` at position {}", i + 1))),
            }
        })
        .collect()
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (command, common, input) = match cli.command {
            Command::Spectrum(c) => (CommandKind::Spectrum, c, None),
            Command::GapScan(c) => (CommandKind::GapScan, c, None),
            Command::AlphaScan(c) => (CommandKind::AlphaScan, c, None),
            Command::VerifyBounds(c) => (CommandKind::VerifyBounds, c, None),
            Command::Fit { input, common } => (CommandKind::Fit, common, Some(input)),
        };
        let potential = parse_potential_spec(&common.potential)?;
        if common.k.is_some() && common.k_grid.is_some() {
            return Err(CliError::Input("--k and --k-grid are mutually exclusive".into()));
        }
        let ks = match (common.k, &common.k_grid) {
            (Some(0), _) => return Err(CliError::Input("--k must be at least 1".into())),
            (Some(k), _) => vec![k],
            (None, Some(g)) => parse_k_grid(g)?,
            (None, None) => match command {
                CommandKind::Spectrum | CommandKind::AlphaScan => {
                    return Err(CliError::Input("--k is required".into()))
                }
                _ => default_k_grid(),
            },
        };
        if matches!(command, CommandKind::Spectrum | CommandKind::AlphaScan) && ks.len() != 1 {
            return Err(CliError::Input("this command takes a single --k".into()));
        }
        let alphas = parse_alphas(&common.alphas)?;
        if !(common.epsilon > 0.0 && common.epsilon.is_finite()) {
            return Err(CliError::Input(format!("--epsilon must be positive, got {}", common.epsilon)));
        }
        if !(common.tol > 0.0 && common.tol < 1.0) {
            return Err(CliError::Input(format!("--tol must lie in (0, 1), got {}", common.tol)));
        }
        if command == CommandKind::AlphaScan && potential.is_empty() {
            return Err(CliError::Input("alpha-scan needs a non-empty potential pattern".into()));
        }
        if command == CommandKind::VerifyBounds && potential.is_empty() {
            return Err(CliError::Input("verify-bounds needs a non-empty potential".into()));
        }
        // Every k must be admissible for the potential before any work starts.
        if command != CommandKind::Fit {
            for &k in &ks {
                let graph = PathGraph::new(k)?;
                assemble_hamiltonian(&graph, &potential).map_err(|e| CliError::Input(format!("k = {k}: {e}")))?;
            }
        }
        Ok(RunConfig {
            command,
            potential,
            ks,
            alphas,
            epsilon: common.epsilon,
            k_min: common.k_min,
            out: common.out,
            format: common.format,
            timestamp: !common.no_timestamp,
            rel_tol: common.tol,
            input,
        })
    }
}

fn timestamp_line() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("generated_unix={secs}")
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out).map_err(io_error)
}

#[derive(Serialize)]
struct SpectrumJson<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    potential: String,
    k: usize,
    n: usize,
    #[serde(serialize_with = "ser_f64")]
    lambda0: f64,
    #[serde(serialize_with = "ser_f64")]
    lambda1: f64,
    #[serde(serialize_with = "ser_f64")]
    gap: f64,
    #[serde(serialize_with = "ser_f64")]
    gap_n3: f64,
    precision_limited: bool,
    #[serde(serialize_with = "ser_f64")]
    residual: f64,
    #[serde(serialize_with = "ser_vec_f64")]
    ground_state: &'a [f64],
}

fn run_spectrum(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let k = cfg.ks[0];
    let op = assemble_hamiltonian(&PathGraph::new(k)?, &cfg.potential)?;
    let s = spectrum_low_with(&op, cfg.rel_tol, default_residual_tol(&op))?;
    let n = op.len();
    let n3 = (n as f64).powi(3);
    if cfg.format == Some(Format::Json) {
        return write_json(
            out,
            &SpectrumJson {
                generated_unix: cfg.timestamp.then(unix_now),
                potential: cfg.potential.to_string(),
                k,
                n,
                lambda0: s.lambda0,
                lambda1: s.lambda1,
                gap: s.gap,
                gap_n3: s.gap * n3,
                precision_limited: s.precision_limited,
                residual: s.residual,
                ground_state: &s.ground_state,
            },
        );
    }
    let phi = &s.ground_state;
    let (lo, hi) = phi.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    let mut text = String::new();
    if cfg.timestamp {
        text.push_str(&format!("# {}\n", timestamp_line()));
    }
    let rows: [(&str, String); 12] = [
        ("potential", cfg.potential.to_string()),
        ("k", k.to_string()),
        ("n", n.to_string()),
        ("lambda0", sig17(s.lambda0)),
        ("lambda1", sig17(s.lambda1)),
        ("gap", sig17(s.gap)),
        ("gap_n3", sig17(s.gap * n3)),
        ("precision_limited", s.precision_limited.to_string()),
        ("residual", sig17(s.residual)),
        ("phi_origin", sig17(phi[k])),
        ("phi_min", sig17(lo)),
        ("phi_max", sig17(hi)),
    ];
    let csv = cfg.format == Some(Format::Csv);
    if csv {
        text.push_str("quantity,value\n");
    }
    for (key, value) in rows {
        if csv {
            text.push_str(&format!("{key},{value}\n"));
        } else {
            text.push_str(&format!("{key} = {value}\n"));
        }
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn run_gap_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let series = gap_series_with(&cfg.potential, &cfg.ks, cfg.rel_tol)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let stamp = cfg.timestamp.then(timestamp_line);
            series.write_csv(out, stamp.as_deref())?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(skip_serializing_if = "Option::is_none")]
                generated_unix: Option<u64>,
                potential: String,
                #[serde(serialize_with = "ser_f64")]
                alpha_sum: f64,
                points: &'a [crate::GapPoint],
            }
            write_json(
                out,
                &Doc {
                    generated_unix: cfg.timestamp.then(unix_now),
                    potential: cfg.potential.to_string(),
                    alpha_sum: cfg.potential.alpha_sum(),
                    points: &series.points,
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct AlphaRow {
    #[serde(serialize_with = "ser_f64")]
    alpha: f64,
    #[serde(serialize_with = "ser_f64")]
    alpha_sum: f64,
    k: usize,
    n: usize,
    #[serde(serialize_with = "ser_f64")]
    lambda0: f64,
    #[serde(serialize_with = "ser_f64")]
    lambda1: f64,
    #[serde(serialize_with = "ser_f64")]
    gap: f64,
    #[serde(serialize_with = "ser_f64")]
    alpha_gap_n3: f64,
    precision_limited: bool,
}

fn run_alpha_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let k = cfg.ks[0];
    let mut rows = Vec::with_capacity(cfg.alphas.len());
    for &alpha in &cfg.alphas {
        let potential = cfg.potential.scaled(alpha)?;
        let series = gap_series_with(&potential, &[k], cfg.rel_tol)?;
        let p = series.points[0];
        rows.push(AlphaRow {
            alpha,
            alpha_sum: potential.alpha_sum(),
            k,
            n: p.n,
            lambda0: p.lambda0,
            lambda1: p.lambda1,
            gap: p.gap,
            alpha_gap_n3: alpha * p.scaled(3.0),
            precision_limited: p.precision_limited,
        });
    }
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            if cfg.timestamp {
                writeln!(out, "# {}", timestamp_line()).map_err(io_error)?;
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "alpha",
                "alpha_sum",
                "k",
                "n",
                "lambda0",
                "lambda1",
                "gap",
                "alpha_gap_n3",
                "precision_limited",
            ])
            .map_err(|e| CliError::Input(e.to_string()))?;
            for r in &rows {
                w.write_record([
                    sig17(r.alpha),
                    sig17(r.alpha_sum),
                    r.k.to_string(),
                    r.n.to_string(),
                    sig17(r.lambda0),
                    sig17(r.lambda1),
                    sig17(r.gap),
                    sig17(r.alpha_gap_n3),
                    r.precision_limited.to_string(),
                ])
                .map_err(|e| CliError::Input(e.to_string()))?;
            }
            w.flush().map_err(io_error)?;
        }
        Format::Json => {
            let samples: Vec<(f64, f64)> =
                rows.iter().filter(|r| !r.precision_limited).map(|r| (r.alpha, r.gap * (r.n as f64).powi(3))).collect();
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(skip_serializing_if = "Option::is_none")]
                generated_unix: Option<u64>,
                potential: String,
                rows: &'a [AlphaRow],
                inverse_alpha_fit: Option<InverseAlphaFit>,
            }
            write_json(
                out,
                &Doc {
                    generated_unix: cfg.timestamp.then(unix_now),
                    potential: cfg.potential.to_string(),
                    rows: &rows,
                    inverse_alpha_fit: fit_inverse_alpha(&samples).ok(),
                },
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_unix: Option<u64>,
    potential: String,
    #[serde(serialize_with = "ser_f64")]
    epsilon: f64,
    k_min: usize,
    all_applicable_hold: bool,
    failed_checks: usize,
    reports: Vec<BoundsReport>,
}

fn run_verify_bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let mut reports = Vec::with_capacity(cfg.ks.len());
    for &k in &cfg.ks {
        let op = assemble_hamiltonian(&PathGraph::new(k)?, &cfg.potential)?;
        let s = spectrum_low_with(&op, cfg.rel_tol, default_residual_tol(&op))
            .map_err(|e| CliError::from(Error::Sweep { k, source: Box::new(e) }))?;
        reports.push(verify_all(k, &cfg.potential, &s, cfg.epsilon, cfg.k_min));
    }
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &VerifyDoc {
                generated_unix: cfg.timestamp.then(unix_now),
                potential: cfg.potential.to_string(),
                epsilon: cfg.epsilon,
                k_min: cfg.k_min,
                all_applicable_hold: failed == 0,
                failed_checks: failed,
                reports,
            },
        )?,
        Format::Csv => {
            if cfg.timestamp {
                writeln!(out, "# {}", timestamp_line()).map_err(io_error)?;
            }
            let mut w = csv::Writer::from_writer(out);
            let err = |e: csv::Error| CliError::Input(e.to_string());
            w.write_record(["k", "alpha_sum", "check", "lhs", "rhs", "holds", "skipped_reason"]).map_err(err)?;
            for r in &reports {
                for c in &r.checks {
                    w.write_record([
                        r.k.to_string(),
                        sig17(r.alpha_sum),
                        c.name.clone(),
                        sig17(c.lhs),
                        sig17(c.rhs),
                        c.holds.to_string(),
                        c.skipped_reason.clone().unwrap_or_default(),
                    ])
                    .map_err(err)?;
                }
            }
            w.flush().map_err(io_error)?;
        }
    }
    if failed > 0 {
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn run_fit(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let input = cfg.input.clone().unwrap_or_else(|| PathBuf::from("-"));
    let mut text = String::new();
    if input.as_os_str() == "-" {
        io::stdin().read_to_string(&mut text).map_err(io_error)?;
    } else {
        File::open(&input)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
    }
    let points = read_gap_csv(text.as_bytes())?;
    let fit = fit_power_law(&points)?;
    #[derive(Serialize)]
    struct Doc {
        #[serde(skip_serializing_if = "Option::is_none")]
        generated_unix: Option<u64>,
        #[serde(flatten)]
        fit: crate::ScalingFit,
    }
    write_json(out, &Doc { generated_unix: cfg.timestamp.then(unix_now), fit })
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = sink(&cfg.out)?;
    let result = match cfg.command {
        CommandKind::Spectrum => run_spectrum(cfg, &mut *out),
        CommandKind::GapScan => run_gap_scan(cfg, &mut *out),
        CommandKind::AlphaScan => run_alpha_scan(cfg, &mut *out),
        CommandKind::VerifyBounds => run_verify_bounds(cfg, &mut *out),
        CommandKind::Fit => run_fit(cfg, &mut *out),
    };
    out.flush().map_err(io_error)?;
    result
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match RunConfig::from_cli(cli).and_then(|cfg| run(&cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pathgap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
