use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shiu_bounds::harness::{execute, exit_code, Command, RunConfig, TableRequest};
use shiu_bounds::{Error, Result};

/// Short-interval bounds for multiplicative functions: grid scans and tables.
#[derive(Parser)]
#[command(name = "shiu", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Interval sums against a bound core, one row per (x, k, a).
    Verify {
        #[arg(long, value_parser = ["shiu", "main", "mnthm2-c1", "mnthm2-c2"])]
        theorem: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sums of tau_d(n)^R, plain and over smooth n.
    Dfold {
        #[arg(long)]
        d: Option<u32>,
        /// Exponent R, or `paper` / `paper:<fallback>`.
        #[arg(long = "R")]
        r: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Smooth numbers in short intervals against the lower-bound cores.
    SmoothInterval {
        /// `pow`, `sound:<B>` or `goudout:<h>`.
        #[arg(long)]
        y_rule: Option<String>,
        #[arg(long = "R")]
        r: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Class I-IV partition and V1-V3 split of every residue class.
    Classes {
        #[command(flatten)]
        common: Common,
    },
    /// Dickman rho, psi(x, Q) or prime tables.
    Tables {
        #[command(subcommand)]
        what: TableCmd,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Reference run over every bound family; writes (with --freeze) or
    /// checks the constants file.
    Freeze {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    Rho {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 5.0)]
        to: f64,
        #[arg(long, default_value_t = 0.25)]
        step: f64,
    },
    Psi {
        #[arg(long, value_delimiter = ',', default_value = "1000,10000")]
        x: Vec<u64>,
        #[arg(long = "Q", value_delimiter = ',', default_value = "10,100")]
        q: Vec<u64>,
    },
    Primes {
        #[arg(long, default_value_t = 100)]
        limit: u64,
    },
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    x_grid: Option<String>,
    #[arg(long)]
    y_pow: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// `all` or a list of residues.
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    eps0: Option<String>,
    #[arg(long = "Q-pow")]
    q_pow: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the ratios to the constants file instead of checking them.
    #[arg(long)]
    freeze: bool,
    #[arg(long)]
    constants: Option<PathBuf>,
}

impl Common {
    fn config(&self, extra: &[(&str, &Option<String>)]) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("x_grid", &self.x_grid),
            ("y_pow", &self.y_pow),
            ("k", &self.k),
            ("a", &self.a),
            ("f", &self.f),
            ("alpha", &self.alpha),
            ("kappa", &self.kappa),
            ("beta", &self.beta),
            ("eps", &self.eps),
            ("eps0", &self.eps0),
            ("q_pow", &self.q_pow),
        ];
        for (key, v) in flags.iter().chain(extra) {
            if let Some(v) = v {
                cfg.set(key, v)?;
            }
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if self.freeze {
            cfg.freeze = true;
        }
        if let Some(c) = &self.constants {
            cfg.constants = Some(c.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (cmd, cfg) = match cli.cmd {
        Cmd::Verify { theorem, common } => {
            (Command::Verify, common.config(&[("theorem", &theorem)])?)
        }
        Cmd::Dfold { d, r, common } => {
            let d = d.map(|d| d.to_string());
            (Command::Dfold, common.config(&[("d", &d), ("r", &r)])?)
        }
        Cmd::SmoothInterval { y_rule, r, common } => (
            Command::SmoothInterval,
            common.config(&[("y_rule", &y_rule), ("r", &r)])?,
        ),
        Cmd::Classes { common } => (Command::Classes, common.config(&[])?),
        Cmd::Tables { what, out } => {
            let req = match what {
                TableCmd::Rho { from, to, step } => TableRequest::Rho { from, to, step },
                TableCmd::Psi { x, q } => TableRequest::Psi { xs: x, qs: q },
                TableCmd::Primes { limit } => TableRequest::Primes { limit },
            };
            let cfg = RunConfig {
                out,
                ..RunConfig::default()
            };
            (Command::Tables(req), cfg)
        }
        Cmd::Freeze { common } => (Command::Freeze, common.config(&[])?),
    };
    let outcome = execute(&cmd, &cfg)?;
    match &cfg.out {
        Some(p) => outcome.table.write_path(p)?,
        None => outcome.table.write_to(std::io::stdout().lock())?,
    }
    let mut err = std::io::stderr().lock();
    if let Some(p) = &outcome.frozen_to {
        let _ = writeln!(err, "constants written to {}", p.display());
    }
    if let Some(r) = &outcome.regression {
        let _ = writeln!(
            err,
            "regression check: {} ratios within tolerance, {} not frozen",
            r.checked, r.unfrozen
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shiu: {e}");
            if let Error::Regression(_) = e {
                eprintln!("rerun with --freeze to accept the new ratios");
            }
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
