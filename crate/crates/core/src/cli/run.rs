//! Command dispatch and report assembly.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::document::{parse_economy, EconomyDocument, ParsedEconomy, SchemaError};
use crate::diagnostics::{
    audit_assumptions_seeded, build_cheapest_point_pathology, probe_lower, probe_upper, AssumptionAuditReport,
    BudgetMap, ContinuityReport, Correspondence, DemandMap, ProbeConfig,
};
use crate::economy::{Economy, Violation};
use crate::equilibrium::{
    certify, tatonnement, EquilibriumCertificate, EquilibriumError, GridSearch, TatonnementConfig, TraceStep,
    CERTIFY_EPSILON, SOLVE_EPSILON,
};
use crate::excess::excess_demand;
use crate::demand::TAU_UTIL;
use crate::geometry::{normalize_prices, PriceVector};
use crate::sampling::DEFAULT_SEED;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REJECTED: i32 = 2;
pub const EXIT_SCHEMA: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;

const DEFAULT_MAX_REFINEMENTS: usize = 12;
const TRACE_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
pub enum Format {
    /// Human-readable TOML report with wall time.
    #[default]
    Report,
    /// Compact JSON, identical across runs.
    #[value(alias = "machine-readable")]
    Machine,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "walras", version, about = "Solve, certify and audit pure-exchange economies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonFlags,
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonFlags {
    /// Seed for every random draw; defaults to the document's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Truncation margin override.
    #[arg(long, global = true)]
    pub margin: Option<f64>,
    /// Certificate tolerance; defaults depend on the command.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Output format [default: report]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Search the price simplex for a certified equilibrium.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_REFINEMENTS)]
        max_refinements: usize,
    },
    /// Check a given price.
    Certify {
        file: PathBuf,
        #[arg(long)]
        price: String,
    },
    /// Check the existence assumptions.
    Audit { file: PathBuf },
    /// Probe budget and demand hemicontinuity at a price.
    Probe {
        #[arg(required_unless_present = "pathology")]
        file: Option<PathBuf>,
        #[arg(long, required_unless_present = "pathology", conflicts_with = "pathology")]
        price: Option<String>,
        /// Use the built-in cheapest-point budget pathology.
        #[arg(long)]
        pathology: bool,
    },
    /// Run price adjustment and print the trace.
    Trace {
        file: PathBuf,
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::Certify { .. } => "certify",
            Command::Audit { .. } => "audit",
            Command::Probe { .. } => "probe",
            Command::Trace { .. } => "trace",
        }
    }

    fn file(&self) -> Option<&PathBuf> {
        match self {
            Command::Solve { file, .. } | Command::Certify { file, .. } | Command::Audit { file } => Some(file),
            Command::Trace { file, .. } => Some(file),
            Command::Probe { file, .. } => file.as_ref(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Certificate { certificate: EquilibriumCertificate },
    Rejection { reason: String, good: usize, price: PriceVector, excess: Vec<f64> },
    SearchFailure { message: String, best: PriceVector, residual: f64, refinements: usize },
    Audit { audit: AssumptionAuditReport },
    Probe { reports: Vec<ContinuityReport> },
    Trace { converged: bool, steps: Vec<TraceStep>, certificate: Option<EquilibriumCertificate> },
    Error { message: String },
}

/// Everything a command produced. `wall_time` is left out of serialized forms
/// so that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub economy_digest: String,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub margin: Option<f64>,
    pub exit_code: i32,
    pub residuals: Vec<f64>,
    pub warnings: Vec<String>,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_digest: Option<Vec<String>>,
    pub payload: Payload,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Machine => serde_json::to_string(self).expect("reports serialize"),
            Format::Report => {
                let body = toml::to_string_pretty(self)
                    .unwrap_or_else(|_| serde_json::to_string_pretty(self).expect("reports serialize"));
                format!("# wall time: {:.3} ms\n{body}", self.wall_time.as_secs_f64() * 1e3)
            }
        }
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Parses comma-separated prices, normalizing when they do not sum to one.
pub fn parse_price(raw: &str, dim: usize, warnings: &mut Vec<String>) -> Result<PriceVector, String> {
    let values = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("bad price component `{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != dim {
        return Err(format!("price has {} components, economy has {dim} goods", values.len()));
    }
    let p = normalize_prices(&values).map_err(|e| e.to_string())?;
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        warnings.push(format!("price `{raw}` sums to {sum}; normalized to {p}"));
    }
    Ok(p)
}

/// Runs a command on document text (`None` only for `probe --pathology`).
pub fn run_command(command: &Command, text: Option<&str>, flags: &CommonFlags) -> RunReport {
    let started = Instant::now();
    let mut report = execute(command, text, flags);
    report.wall_time = started.elapsed();
    report
}

fn echo(command: &Command, flags: &CommonFlags) -> String {
    let mut parts = vec![command.name().to_string()];
    match command {
        Command::Solve { max_refinements, .. } => parts.push(format!("--max-refinements {max_refinements}")),
        Command::Certify { price, .. } => parts.push(format!("--price {price}")),
        Command::Probe { price, pathology, .. } => {
            if *pathology {
                parts.push("--pathology".into());
            }
            if let Some(p) = price {
                parts.push(format!("--price {p}"));
            }
        }
        Command::Trace { start, step, iters, .. } => {
            parts.push(format!("--start {start} --step {step} --iters {iters}"));
        }
        Command::Audit { .. } => {}
    }
    if let Some(s) = flags.seed {
        parts.push(format!("--seed {s}"));
    }
    if let Some(m) = flags.margin {
        parts.push(format!("--margin {m}"));
    }
    if let Some(e) = flags.epsilon {
        parts.push(format!("--epsilon {e}"));
    }
    parts.join(" ")
}

fn execute(command: &Command, text: Option<&str>, flags: &CommonFlags) -> RunReport {
    let mut report = RunReport {
        command: echo(command, flags),
        economy_digest: String::new(),
        seed: flags.seed.unwrap_or(DEFAULT_SEED),
        epsilon: None,
        margin: flags.margin,
        exit_code: EXIT_OK,
        residuals: Vec::new(),
        warnings: Vec::new(),
        violations: Vec::new(),
        audit_digest: None,
        payload: Payload::Error { message: String::new() },
        wall_time: Duration::ZERO,
    };

    if let Command::Probe { pathology: true, .. } = command {
        let path = build_cheapest_point_pathology();
        let doc = EconomyDocument::from_economy(&path.economy, report.seed);
        report.economy_digest = digest(&doc.to_toml());
        report.margin = Some(path.economy.margin());
        let config = ProbeConfig::with_seed(report.seed);
        let map = BudgetMap::new(&path.economy, path.agent);
        let reports = vec![
            probe_upper(&map, &path.price, &config),
            probe_lower(&map, &path.price, &[path.target.to_vec()], &config),
        ];
        return finish_probe(report, reports);
    }

    let Some(text) = text else {
        return usage(report, "an economy document is required".into());
    };
    report.economy_digest = digest(text);
    let parsed = match parse_economy(text) {
        Ok(p) => p,
        Err(e) => return schema(report, e),
    };
    let ParsedEconomy { document, economy } = parsed;
    report.seed = flags.seed.or(document.options.seed).unwrap_or(DEFAULT_SEED);
    let economy = match flags.margin {
        Some(m) => match economy.with_margin(m) {
            Ok(e) => e,
            Err(e) => return usage(report, format!("invalid --margin: {e}")),
        },
        None => economy,
    };
    report.margin = Some(economy.margin());
    report.violations = economy.validate_structure();
    let epsilon = |default: f64| flags.epsilon.or(document.options.epsilon).unwrap_or(default);

    match command {
        Command::Solve { max_refinements, .. } => {
            let eps = epsilon(SOLVE_EPSILON);
            report.epsilon = Some(eps);
            let audit = audit_assumptions_seeded(&economy, report.seed);
            report.audit_digest = Some(audit.digest());
            match GridSearch::new(eps, *max_refinements).run(&economy) {
                Ok(cert) => {
                    report.residuals = cert.excess.to_vec();
                    report.payload = Payload::Certificate { certificate: cert };
                }
                Err(EquilibriumError::SearchExhausted { best, residual, refinements }) => {
                    let message = EquilibriumError::SearchExhausted { best: best.clone(), residual, refinements }.to_string();
                    report.residuals = vec![residual];
                    report.payload = Payload::SearchFailure { message, best, residual, refinements };
                    report.exit_code = EXIT_EXHAUSTED;
                }
                Err(e) => return usage(report, e.to_string()),
            }
        }
        Command::Certify { price, .. } => {
            let eps = epsilon(CERTIFY_EPSILON);
            report.epsilon = Some(eps);
            let p = match parse_price(price, economy.num_goods(), &mut report.warnings) {
                Ok(p) => p,
                Err(m) => return usage(report, m),
            };
            match certify(&economy, &p, eps) {
                Ok(cert) => {
                    report.residuals = cert.excess.to_vec();
                    report.payload = Payload::Certificate { certificate: cert };
                }
                Err(e @ EquilibriumError::Rejected { .. }) => {
                    let best = excess_demand(&economy, &p, TAU_UTIL).map(|s| s.best().excess.to_vec()).unwrap_or_default();
                    let EquilibriumError::Rejected { good, .. } = &e else { unreachable!() };
                    report.residuals = best.clone();
                    report.payload = Payload::Rejection { reason: e.to_string(), good: *good, price: p, excess: best };
                    report.exit_code = EXIT_REJECTED;
                }
                Err(e) => {
                    report.payload = Payload::Error { message: e.to_string() };
                    report.exit_code = EXIT_REJECTED;
                }
            }
        }
        Command::Audit { .. } => {
            let audit = audit_assumptions_seeded(&economy, report.seed);
            report.audit_digest = Some(audit.digest());
            report.payload = Payload::Audit { audit };
        }
        Command::Probe { price, .. } => {
            let raw = price.as_deref().unwrap_or_default();
            let p = match parse_price(raw, economy.num_goods(), &mut report.warnings) {
                Ok(p) => p,
                Err(m) => return usage(report, m),
            };
            let config = ProbeConfig::with_seed(report.seed);
            let mut reports = Vec::new();
            for i in 0..economy.num_agents() {
                let maps: [Box<dyn Correspondence>; 2] =
                    [Box::new(BudgetMap::new(&economy, i)), Box::new(DemandMap::new(&economy, i))];
                for map in maps {
                    reports.push(probe_upper(map.as_ref(), &p, &config));
                    let targets = map.image(&p).map(|img| img.vertices()).unwrap_or_default();
                    reports.push(probe_lower(map.as_ref(), &p, &targets, &config));
                }
            }
            return finish_probe(report, reports);
        }
        Command::Trace { start, step, iters, .. } => {
            let eps = epsilon(TRACE_EPSILON);
            report.epsilon = Some(eps);
            let p = match parse_price(start, economy.num_goods(), &mut report.warnings) {
                Ok(p) => p,
                Err(m) => return usage(report, m),
            };
            match tatonnement(&economy, &p, &TatonnementConfig::new(*step, *iters, eps)) {
                Ok(out) => {
                    report.residuals = out.trace.iter().map(|s| s.residual).collect();
                    if !out.converged() {
                        report.warnings.push(format!("no certificate within {iters} iterations"));
                    }
                    report.payload =
                        Payload::Trace { converged: out.converged(), steps: out.trace, certificate: out.certificate };
                }
                Err(e) => return usage(report, e.to_string()),
            }
        }
    }
    report
}

fn finish_probe(
    mut report: RunReport,
    results: Vec<Result<ContinuityReport, crate::diagnostics::ProbeError>>,
) -> RunReport {
    let mut reports = Vec::new();
    for r in results {
        match r {
            Ok(r) => reports.push(r),
            Err(e) => return usage(report, e.to_string()),
        }
    }
    report.residuals = reports
        .iter()
        .flat_map(|r| r.directions.iter().map(|d| d.final_residual()))
        .collect();
    if reports.iter().any(|r| !r.passed()) {
        report.exit_code = EXIT_REJECTED;
    }
    report.payload = Payload::Probe { reports };
    report
}

fn usage(mut report: RunReport, message: String) -> RunReport {
    report.exit_code = EXIT_USAGE;
    report.payload = Payload::Error { message };
    report
}

fn schema(mut report: RunReport, e: SchemaError) -> RunReport {
    report.exit_code = EXIT_SCHEMA;
    report.payload = Payload::Error { message: e.to_string() };
    report
}

/// Entry point shared by the binary: parses arguments, reads the document,
/// runs the command. Returns the rendered output and the exit code.
pub fn main_with_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (e.to_string(), code);
        }
    };
    let text = match cli.command.file() {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => return (format!("cannot read {}: {e}\n", path.display()), EXIT_USAGE),
        },
        None => None,
    };
    let report = run_command(&cli.command, text.as_deref(), &cli.common);
    let mut out = report.render(cli.common.format.unwrap_or_default());
    if !out.ends_with('\n') {
        out.push('\n');
    }
    (out, report.exit_code)
}

/// Runs on an in-memory economy rather than document text.
pub fn run_on_economy(command: &Command, econ: &Economy, flags: &CommonFlags) -> RunReport {
    let doc = EconomyDocument::from_economy(econ, flags.seed.unwrap_or(DEFAULT_SEED));
    run_command(command, Some(&doc.to_toml()), flags)
}
