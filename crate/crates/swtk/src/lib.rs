//! Batch front-end for the Seiberg–Witten toolkit: configuration parsing,
//! the three subcommands and their report files.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod flow_cmd;
pub mod identities;
pub mod report;
pub mod screen;

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] swtk_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(swtk_core::Error::EnumerationBudget { .. }) => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        }
    }
}

fn prepare(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes `identities.json`; exit 1 when any gating check fails.
pub fn cmd_identities(c: &ExperimentConfig) -> Result<i32, CliError> {
    let r = identities::run(c)?;
    prepare(&c.out_dir)?;
    report::write_json(&c.out_dir.join("identities.json"), &r)?;
    for ck in r.checks.iter().filter(|ck| ck.gating && !ck.passed) {
        log::error!("check {} failed: {:e} > {:e}", ck.name, ck.measured, ck.tolerance);
    }
    Ok(if r.all_passed { EXIT_OK } else { EXIT_FAILURE })
}

/// Writes `flow.json` and `energy_trace.csv`. An unconverged run still
/// writes both files and exits 2; a window violation exits 1.
pub fn cmd_flow(c: &ExperimentConfig) -> Result<i32, CliError> {
    let run = flow_cmd::run(c)?;
    prepare(&c.out_dir)?;
    report::write_json(&c.out_dir.join("flow.json"), &run.report)?;
    let header = ["iteration", "energy", "grad_norm"].map(String::from);
    report::write_csv(&c.out_dir.join("energy_trace.csv"), &header, &run.trace)?;
    if !run.report.theorem.consistent {
        log::error!("monopole reported outside the admissibility window");
        return Ok(EXIT_FAILURE);
    }
    if run.report.status != swtk_core::flow::FlowStatus::Converged {
        log::warn!("flow did not converge ({:?})", run.report.status);
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

/// Writes `screen.json` and `screen.csv`.
pub fn cmd_screen(c: &ExperimentConfig) -> Result<i32, CliError> {
    let r = screen::run(c)?;
    prepare(&c.out_dir)?;
    report::write_json(&c.out_dir.join("screen.json"), &r)?;
    let (header, rows) = r.csv();
    report::write_csv(&c.out_dir.join("screen.csv"), &header, &rows)?;
    Ok(EXIT_OK)
}
