//! Command line runner for the pglab toolkit: randomized identity suites,
//! single evaluations of ψ, ι_n, the Wronskian solver, the g-criterion and
//! the γ-relation finder, with deterministic JSON reports.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 indeterminate at working
//! precision, 64 usage error.

pub mod commands;
pub mod config;
pub mod fixtures;
pub mod input;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use pglab_core::suites::Faults;
use pglab_core::Error;
use serde::Serialize;

use crate::commands::{Computed, Status};
pub use crate::config::{parse_run_config, RunConfig};

pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "pglab", version, about = "Exact p-adic experiments with (phi, Gamma)-modules")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Subcommand input (JSON).
    #[arg(long, global = true, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Writes the derived example values to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    pub fixtures: Option<PathBuf>,
    /// Deliberate fault for testing the failure path.
    #[arg(long, global = true, hide = true, value_enum)]
    pub inject_fault: Option<Fault>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    CorruptPsi,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Runs every randomized identity suite.
    Identities,
    /// ψ of a series, by two algorithms.
    Psi,
    /// ι_n of a series at the listed levels.
    Iota,
    /// Constant relation among vectors via the Wronskian rank conditions.
    Wronskian,
    /// δ∘∂^k∘ι_n of a module element.
    GCriterion,
    /// A relation P(γ)y = 0 with constant coefficients.
    GammaRelation,
    /// N_dR membership, the t-pole of ∂_D and the filtration.
    ModuleCheck,
    /// The g-criterion on the canonical elements of weight 0 and 1.
    NormsDemo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Identities => "identities",
            Command::Psi => "psi",
            Command::Iota => "iota",
            Command::Wronskian => "wronskian",
            Command::GCriterion => "g-criterion",
            Command::GammaRelation => "gamma-relation",
            Command::ModuleCheck => "module-check",
            Command::NormsDemo => "norms-demo",
        }
    }

    fn needs_input(self) -> bool {
        !matches!(self, Command::Identities | Command::NormsDemo)
    }
}

/// Exit code with the text destined for stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl std::fmt::Display) -> Self {
        Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("pglab: {msg}\n") }
    }
}

#[derive(Serialize)]
struct Precision {
    /// Threshold the verdicts were decided against.
    floor: i64,
    /// Smallest valuation a deciding quantity was known to; null when
    /// everything deciding was exact.
    achieved: Option<i64>,
}

#[derive(Serialize)]
struct Provenance<'a> {
    version: &'static str,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    input: Option<serde_json::Value>,
    precision: Precision,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    status: Status,
    provenance: Provenance<'a>,
    result: serde_json::Value,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    command: &'static str,
    status: Status,
    provenance: Provenance<'a>,
    error: String,
}

fn read(path: &PathBuf) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))
}

/// Parses arguments and runs. Never exits the process.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    run_cli(&cli).unwrap_or_else(|o| o)
}

fn run_cli(cli: &Cli) -> Result<Outcome, Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => parse_run_config(&read(path)?).map_err(Outcome::usage)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let mut stderr = String::new();
    if let Some(path) = &cli.fixtures {
        let fx = fixtures::derived_fixtures().map_err(|e| Outcome { code: 1, stdout: String::new(), stderr: format!("pglab: {e}\n") })?;
        let text = serde_json::to_string_pretty(&fx).expect("fixtures serialize") + "\n";
        std::fs::write(path, text).map_err(|e| Outcome::usage(format!("cannot write {}: {e}", path.display())))?;
        stderr.push_str(&format!("wrote {} fixtures to {}\n", fx.len(), path.display()));
    }
    let Some(cmd) = cli.command else {
        if cli.fixtures.is_some() {
            return Ok(Outcome { code: 0, stdout: String::new(), stderr });
        }
        return Err(Outcome::usage("a subcommand is required (see --help)"));
    };
    let json = match (&cli.input, cmd.needs_input()) {
        (Some(path), true) => Some(read(path)?),
        (None, true) => return Err(Outcome::usage(format!("{} needs --input", cmd.name()))),
        (Some(_), false) => return Err(Outcome::usage(format!("{} takes no --input", cmd.name()))),
        (None, false) => None,
    };
    let input_echo = match &json {
        Some(s) => Some(serde_json::from_str(s).map_err(|e| Outcome::usage(format!("input is not JSON: {e}")))?),
        None => None,
    };
    let faults = Faults { corrupt_psi: cli.inject_fault == Some(Fault::CorruptPsi) };
    let src = json.as_deref().unwrap_or("");
    let computed = match cmd {
        Command::Identities => commands::identities(&cfg, faults),
        Command::Psi => commands::psi(&cfg, src),
        Command::Iota => commands::iota(&cfg, src),
        Command::Wronskian => commands::wronskian(&cfg, src),
        Command::GCriterion => commands::g_criterion_cmd(&cfg, src),
        Command::GammaRelation => commands::gamma_relation(&cfg, src),
        Command::ModuleCheck => commands::module_check(&cfg, src),
        Command::NormsDemo => commands::norms_demo(&cfg).map(|(c, table)| {
            stderr.push_str(&table);
            c
        }),
    };
    let provenance = |floor, achieved| Provenance {
        version: env!("CARGO_PKG_VERSION"),
        config: &cfg,
        input: input_echo.clone(),
        precision: Precision { floor, achieved },
    };
    match computed {
        Ok(Computed { status, floor, achieved, result }) => {
            let report = Report { command: cmd.name(), status, provenance: provenance(floor, achieved), result };
            let stdout = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            Ok(Outcome { code: status.code(), stdout, stderr })
        }
        Err(e @ (Error::Precision(_) | Error::Indeterminate(_))) => {
            let report = ErrorReport {
                command: cmd.name(),
                status: Status::Indeterminate,
                provenance: provenance(cfg.precision as i64, None),
                error: e.to_string(),
            };
            let stdout = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
            Ok(Outcome { code: Status::Indeterminate.code(), stdout, stderr })
        }
        Err(e) => Err(Outcome { stderr: stderr + &format!("pglab: {e}\n"), ..Outcome::usage("") }),
    }
}
