//! Command-line driver.
//!
//! Exit codes: 0 success, 1 failed identity or counterexample-candidate,
//! 2 bad arguments or unmet precondition, 3 numerical breakdown.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{catalog_entry, catalog_list, instantiate, CatalogEntry};
use crate::codazzi::CodazziField;
use crate::error::{Error, Result};
use crate::geometry::{Domain, GeomPoint, SurfaceSpec};
use crate::identities::{minimality_class, run_suite_on, sample, Grid, IdentityId, ResidualReport, Tolerances};
use crate::spaceforms::AmbientModel;
use crate::theorems::{check, TheoremId, TheoremVerdict, VerdictStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pmcgeom", version, about = "Verify Codazzi-type identities on surfaces in M^n(κ) × ℝ")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog surfaces with parameters and expected quantities.
    Catalog {
        #[arg(long, value_enum, default_value_t = CatalogFormat::Text)]
        format: CatalogFormat,
        /// Show a single entry.
        #[arg(long)]
        id: Option<String>,
    },
    /// Run the residual suite for a surface.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Per-identity tolerance override, `identity=value`.
        #[arg(long = "tol", value_name = "ID=VALUE", value_parser = parse_tol)]
        tol: Vec<(IdentityId, f64)>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Sample a scalar field over the grid as CSV.
    Field {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum)]
        quantity: Quantity,
        /// Use S̃ instead of S for normS and detS.
        #[arg(long)]
        tilde: bool,
    },
    /// Evaluate a theorem's hypotheses and conclusions on the chart.
    Hypothesis {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_parser = parse_theorem)]
        theorem: TheoremId,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        c: f64,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub surface: String,
    /// Surface parameter, `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param, allow_hyphen_values = true)]
    pub params: Vec<(String, f64)>,
    #[arg(long, default_value_t = 33)]
    pub nu: usize,
    #[arg(long, default_value_t = 33)]
    pub nv: usize,
    #[arg(long, default_value_t = 0.02)]
    pub margin: f64,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CatalogFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    #[value(name = "K")]
    K,
    #[value(name = "normT")]
    NormT,
    #[value(name = "normS")]
    NormS,
    #[value(name = "detS")]
    DetS,
    #[value(name = "mu_integrand")]
    MuIntegrand,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let x: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{v}` is not finite"));
    }
    Ok((k.trim().to_string(), x))
}

fn parse_tol(s: &str) -> std::result::Result<(IdentityId, f64), String> {
    let (k, x) = parse_param(s)?;
    let id: IdentityId = k.parse().map_err(|e: Error| e.to_string())?;
    if x <= 0.0 {
        return Err(format!("tolerance for `{k}` must be positive"));
    }
    Ok((id, x))
}

fn parse_theorem(s: &str) -> std::result::Result<TheoremId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(run: &RunArgs, tol: &[(IdentityId, f64)]) -> Result<RunConfig> {
        let mut params = BTreeMap::new();
        for (k, v) in &run.params {
            if params.insert(k.clone(), *v).is_some() {
                return Err(Error::InvalidParameter {
                    name: k.clone(),
                    reason: "given more than once".into(),
                });
            }
        }
        Ok(RunConfig {
            surface: instantiate(&run.surface, &params)?,
            grid: Grid::new(run.nu, run.nv, run.margin)?,
            tolerances: tol.iter().copied().collect(),
            output: run.output.clone(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct SurfaceInfo {
    pub id: String,
    pub params: BTreeMap<String, f64>,
    pub domain: Domain,
    pub ambient: AmbientModel,
}

impl SurfaceInfo {
    fn of(s: &SurfaceSpec) -> SurfaceInfo {
        SurfaceInfo {
            id: s.catalog_id.clone(),
            params: s.params.clone(),
            domain: s.domain,
            ambient: s.ambient.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub surface: SurfaceInfo,
    pub grid: Grid,
    pub results: Vec<ResidualReport>,
    pub verdicts: Vec<TheoremVerdict>,
    pub version: &'static str,
}

impl Report {
    pub fn new(s: &SurfaceSpec, grid: &Grid) -> Report {
        Report {
            surface: SurfaceInfo::of(s),
            grid: *grid,
            results: Vec::new(),
            verdicts: Vec::new(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity_id,max_abs,mean_abs,argmax_u,argmax_v,tolerance,passed\n");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.identity_id, r.max_abs, r.mean_abs, r.argmax.0, r.argmax.1, r.tolerance, r.passed
            );
        }
        out
    }
}

/// Output text together with the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_precondition() {
        EXIT_USAGE
    } else {
        EXIT_NUMERIC
    }
}

fn entry_text(e: &CatalogEntry) -> String {
    let mut s = format!("{}\n  {}\n  ambient: {}\n  params:\n", e.id, e.description, e.ambient_rule);
    for p in &e.required_params {
        let _ = writeln!(s, "    {:<8} default {:<20} {}", p.name, p.default, p.range);
    }
    if !e.expected.is_empty() {
        s.push_str("  expected:\n");
        for (k, v) in &e.expected {
            let _ = writeln!(s, "    {k:<12} {v}");
        }
    }
    s
}

pub fn cmd_catalog(format: CatalogFormat, id: Option<&str>) -> Result<Outcome> {
    let entries = match id {
        Some(id) => vec![catalog_entry(id)?],
        None => catalog_list(),
    };
    let text = match format {
        CatalogFormat::Json => {
            let mut s = serde_json::to_string_pretty(&entries).expect("catalog serializes");
            s.push('\n');
            s
        }
        CatalogFormat::Text => entries.iter().map(entry_text).collect::<Vec<_>>().join("\n"),
    };
    Ok(Outcome { code: EXIT_OK, text })
}

pub fn verify_report(cfg: &RunConfig) -> Result<Report> {
    let points = sample(&cfg.surface, &cfg.grid)?;
    let mut report = Report::new(&cfg.surface, &cfg.grid);
    report.results = run_suite_on(&points, &cfg.grid, &cfg.tolerances)?;
    Ok(report)
}

pub fn cmd_verify(cfg: &RunConfig, format: ReportFormat) -> Result<Outcome> {
    let report = verify_report(cfg)?;
    let code = if report.results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let text = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    Ok(Outcome { code, text })
}

fn field_value(gp: &GeomPoint, quantity: Quantity, field: CodazziField) -> Result<f64> {
    Ok(match quantity {
        Quantity::K => gp.k.value(),
        Quantity::NormT => gp.norm_t(),
        Quantity::NormS => {
            // S is g-self-adjoint, so |S|² = tr S²
            let m = field.matrix_at(gp)?;
            m.matmul(&m).trace().max(0.0).sqrt()
        }
        Quantity::DetS => field.matrix_at(gp)?.det(),
        Quantity::MuIntegrand => gp.mu_integrand()?,
    })
}

pub fn field_values(cfg: &RunConfig, quantity: Quantity, tilde: bool) -> Result<Vec<(f64, f64, f64)>> {
    let points = sample(&cfg.surface, &cfg.grid)?;
    let field = if tilde {
        CodazziField::S_TILDE
    } else {
        CodazziField::S
    };
    let needs_s = matches!(quantity, Quantity::NormS | Quantity::DetS);
    if needs_s && !tilde && minimality_class(&points).minimal {
        return Err(Error::InvalidArgument(
            "S is undefined on a minimal surface; pass --tilde for S̃".into(),
        ));
    }
    points
        .par_iter()
        .map(|gp| Ok((gp.u, gp.v, field_value(gp, quantity, field)?)))
        .collect()
}

pub fn cmd_field(cfg: &RunConfig, quantity: Quantity, tilde: bool) -> Result<Outcome> {
    let mut text = String::from("u,v,value\n");
    for (u, v, x) in field_values(cfg, quantity, tilde)? {
        let _ = writeln!(text, "{u:.16e},{v:.16e},{x:.16e}");
    }
    Ok(Outcome { code: EXIT_OK, text })
}

pub fn cmd_hypothesis(cfg: &RunConfig, theorem: TheoremId, eps: f64, c: f64) -> Result<Outcome> {
    let verdict = check(theorem, &cfg.surface, &cfg.grid, eps, c)?;
    let code = if verdict.status == VerdictStatus::CounterexampleCandidate {
        EXIT_FAIL
    } else {
        EXIT_OK
    };
    let mut report = Report::new(&cfg.surface, &cfg.grid);
    report.verdicts.push(verdict);
    Ok(Outcome {
        code,
        text: report.to_json(),
    })
}

fn dispatch(cli: &Cli) -> Result<(Outcome, Option<PathBuf>)> {
    match &cli.command {
        Command::Catalog { format, id } => Ok((cmd_catalog(*format, id.as_deref())?, None)),
        Command::Verify { run, tol, format } => {
            let cfg = RunConfig::from_args(run, tol)?;
            Ok((cmd_verify(&cfg, *format)?, cfg.output))
        }
        Command::Field { run, quantity, tilde } => {
            let cfg = RunConfig::from_args(run, &[])?;
            Ok((cmd_field(&cfg, *quantity, *tilde)?, cfg.output))
        }
        Command::Hypothesis { run, theorem, eps, c } => {
            let cfg = RunConfig::from_args(run, &[])?;
            Ok((cmd_hypothesis(&cfg, *theorem, *eps, *c)?, cfg.output))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok((outcome, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &outcome.text)
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => std::io::stdout()
                    .write_all(outcome.text.as_bytes())
                    .map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
