//! `d4selmer`: batch verification and estimation jobs with JSON or CSV
//! reports. Exit status 0 on success, 1 on a failed check, 2 on an invalid
//! configuration.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::Report;
use config::{Flags, Format, RunConfig};

#[derive(Parser)]
#[command(
    name = "d4selmer",
    version,
    about = "Exact checks for the graded D4 pair, pointed cubics and local densities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Structure, invariant theory, discriminant comparison, fundamental group.
    VerifyAlgebra,
    /// Planted trivial-orbit round trips and parabolic vanishing patterns.
    ReduceOrbit,
    /// Batch of random sections of B_D: X_D membership, bad fibres, minimal models.
    Curves,
    /// Stabilizer orders against curve 2-torsion.
    StabilizerCheck,
    /// The boundary (cusp) table with tail bounds.
    CuspTable,
    /// Slopes of the trivial classes.
    Geography,
    /// Local densities, the volume identity and the global product.
    Densities,
    /// The full acceptance suite.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyAlgebra => "verify-algebra",
            Command::ReduceOrbit => "reduce-orbit",
            Command::Curves => "curves",
            Command::StabilizerCheck => "stabilizer-check",
            Command::CuspTable => "cusp-table",
            Command::Geography => "geography",
            Command::Densities => "densities",
            Command::All => "all",
        }
    }

    fn run(self, cfg: &RunConfig) -> Result<Report, String> {
        match self {
            Command::VerifyAlgebra => commands::verify_algebra(cfg),
            Command::ReduceOrbit => commands::reduce_orbit(cfg),
            Command::Curves => commands::curves(cfg),
            Command::StabilizerCheck => commands::stabilizer_check(cfg),
            Command::CuspTable => commands::cusp_table(cfg),
            Command::Geography => commands::geography(cfg),
            Command::Densities => commands::densities(cfg),
            Command::All => commands::all(cfg),
        }
    }
}

fn render(command: &str, cfg: &RunConfig, report: &Report) -> Result<Vec<u8>, String> {
    match (cfg.format(), &report.table) {
        (Format::Csv, Some(table)) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())
        }
        (Format::Csv, None) => Err(format!("{command} has no tabular output")),
        (Format::Json, _) => {
            let doc = json!({
                "command": command,
                "config": cfg,
                "passed": report.failures.is_empty(),
                "failures": report.failures,
                "result": report.result,
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| e.to_string())?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), String> {
    match &cfg.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().write_all(bytes).map_err(|e| e.to_string()),
    }
}

fn failure_record(command: &str, kind: &str, messages: &[String]) {
    let rec = json!({ "command": command, "status": kind, "failures": messages });
    eprintln!("{rec}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let cfg = match RunConfig::resolve(&cli.flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            failure_record(name, "invalid-config", &[e]);
            return ExitCode::from(2);
        }
    };
    let report = match cli.command.run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            failure_record(name, "error", &[e]);
            return ExitCode::from(2);
        }
    };
    if let Err(e) = render(name, &cfg, &report).and_then(|bytes| emit(&cfg, &bytes)) {
        failure_record(name, "error", &[e]);
        return ExitCode::from(2);
    }
    if report.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        failure_record(name, "failed", &report.failures);
        ExitCode::from(1)
    }
}
