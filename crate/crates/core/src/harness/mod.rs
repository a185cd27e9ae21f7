//! Grid scans, the two applications, CSV reports, configuration and the
//! frozen-constant protocol.
//!
//! [`execute`] is what the `shiu` binary calls; every scan is also usable
//! on its own.

pub mod apps;
pub mod config;
pub mod freeze;
pub mod runs;
pub mod table;

use std::path::PathBuf;

pub use config::{RMode, ResidueRule, RunConfig, YRule};
pub use freeze::{check_against, freeze_suite, read_constants, write_constants, RegressionReport};
pub use runs::{
    dump_tables, run_classes, run_dfold, run_rankin, run_rough, run_smooth_interval, run_verify,
    Ratio, Report, Resources, TableRequest,
};
pub use table::Table;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Verify,
    Dfold,
    SmoothInterval,
    Classes,
    Tables(TableRequest),
    /// The reference run over every bound family.
    Freeze,
}

/// Tables produced by a command, plus the regression outcome when the
/// configuration names a constants file.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub table: Table,
    pub regression: Option<RegressionReport>,
    /// Where the constants were written in freeze mode.
    pub frozen_to: Option<PathBuf>,
}

pub const DEFAULT_CONSTANTS: &str = "constants.csv";

/// Runs `cmd`. With `cfg.freeze` the ratios are written to the constants
/// file; otherwise, when a constants file is named (always, for
/// [`Command::Freeze`]), they are checked against it and drift is an
/// [`Error::Regression`].
pub fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    let (table, ratios) = match cmd {
        Command::Tables(req) => {
            return Ok(Outcome {
                table: dump_tables(req)?,
                ..Outcome::default()
            })
        }
        Command::Verify => {
            let r = run_verify(cfg, &Resources::for_grid(cfg)?)?;
            (r.table, r.ratios)
        }
        Command::Dfold => {
            let r = run_dfold(cfg, &Resources::for_grid(cfg)?)?;
            (r.table, r.ratios)
        }
        Command::SmoothInterval => {
            let top = cfg
                .x_grid
                .iter()
                .map(|&x| crate::arith::isqrt(x) * 4)
                .max()
                .unwrap_or(100);
            let r = run_smooth_interval(cfg, &Resources::new(top.max(100))?)?;
            (r.table, r.ratios)
        }
        Command::Classes => {
            let r = run_classes(cfg, &Resources::for_grid(cfg)?)?;
            (r.table, r.ratios)
        }
        Command::Freeze => {
            let reports = freeze_suite(cfg)?;
            let ratios = freeze::all_ratios(&reports);
            let mut t = freeze::constants_table(&ratios);
            t.preamble.push(runs::LIMITS_NOTE.to_string());
            (t, ratios)
        }
    };
    let constants = cfg
        .constants
        .clone()
        .or_else(|| (*cmd == Command::Freeze).then(|| PathBuf::from(DEFAULT_CONSTANTS)));
    let mut out = Outcome {
        table,
        ..Outcome::default()
    };
    if cfg.freeze {
        let path = constants
            .ok_or_else(|| Error::Config("freeze needs a constants file (--constants)".into()))?;
        write_constants(&path, &ratios)?;
        out.frozen_to = Some(path);
    } else if let Some(path) = constants {
        let frozen = read_constants(&path)?;
        let rep = check_against(&ratios, &frozen, freeze::TOLERANCE);
        out.regression = Some(rep.clone());
        rep.into_result()?;
    }
    Ok(out)
}

/// Process exit code for an error: 1 invariant or coverage failure,
/// 2 frozen-constant regression, 3 configuration error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Regression(_) => 2,
        Error::Config(_) | Error::Io { .. } | Error::Csv(_) | Error::Infeasible(_) => 3,
        _ => 1,
    }
}
