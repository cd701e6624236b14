//! Argument parsing and command dispatch for the `treewalk` binary.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cli::commands::{cmd_asympt, cmd_green, cmd_info, cmd_oracle, cmd_radius, cmd_solve, Restriction};
use crate::cli::report::{Report, Status};
use crate::cli::validate::cmd_validate;
use crate::cli::{stock, ModelConfig};
use crate::error::{Error, Result};

/// Green functions and return-probability asymptotics for finite-range
/// random walks on trees.
#[derive(Debug, Parser)]
#[command(name = "treewalk", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Override a tolerance, e.g. `--tol identity=1e-10` (repeatable).
    #[arg(long = "tol", global = true, value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    /// Override a budget, e.g. `--budget oracle_states=500000` (repeatable).
    #[arg(long = "budget", global = true, value_name = "KEY=VALUE")]
    pub budget: Vec<String>,
    /// Floating-point precision in bits; only 53 (double) is supported.
    #[arg(long, global = true, default_value_t = 53)]
    pub precision: u32,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RestrictArg {
    /// Intermediate vertices avoid `y`.
    Y,
    /// Intermediate vertices avoid the ball `B_k(center)`.
    Ball,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model summary: range, period, coordinates, dependency components.
    Info { config: String },
    /// Exact n-step probabilities by dynamic programming.
    Oracle {
        config: String,
        x: String,
        y: String,
        n_max: usize,
        #[arg(long, value_enum)]
        restricted: Option<RestrictArg>,
        /// Center of the avoided ball for `--restricted ball`.
        #[arg(long, required_if_eq("restricted", "ball"))]
        center: Option<String>,
    },
    /// Exact power series of every coordinate up to order N.
    Solve { config: String, order: usize },
    /// Branch point, its local data and the nondegeneracy checks.
    Radius { config: String },
    /// G(x, y) and F(x, y) at the given points (`0.5`, `0.1-0.2i`, `0.9R`, `R@1.5`).
    Green {
        config: String,
        x: String,
        y: String,
        #[arg(required = true, allow_hyphen_values = true)]
        z: Vec<String>,
    },
    /// Asymptotic laws and constants for pairs `x,y` (default: base point to itself).
    Asympt {
        config: String,
        #[arg(value_name = "X,Y")]
        pairs: Vec<String>,
        /// Also report every coordinate.
        #[arg(long)]
        coordinates: bool,
    },
    /// Run the full validation suite.
    Validate { config: String },
}

impl Command {
    fn config(&self) -> &str {
        match self {
            Command::Info { config }
            | Command::Oracle { config, .. }
            | Command::Solve { config, .. }
            | Command::Radius { config }
            | Command::Green { config, .. }
            | Command::Asympt { config, .. }
            | Command::Validate { config } => config,
        }
    }
}

/// Load `stock:NAME` or a configuration file.
pub fn load_config(spec: &str) -> Result<ModelConfig> {
    match spec.strip_prefix("stock:") {
        Some(name) => stock(name),
        None => ModelConfig::from_file(std::path::Path::new(spec)),
    }
}

fn split_kv(s: &str) -> Result<(&str, &str)> {
    s.split_once('=').ok_or_else(|| Error::Argument(format!("expected KEY=VALUE, got {s:?}")))
}

/// Load the configuration, apply overrides and run the command.
pub fn execute(cli: &Cli) -> Result<Report> {
    if cli.precision != 53 {
        return Err(Error::Argument(format!("precision {} not supported; only 53-bit doubles", cli.precision)));
    }
    let mut cfg = load_config(cli.command.config())?;
    for t in &cli.tol {
        let (k, v) = split_kv(t)?;
        cfg.tolerances.set(k, v)?;
    }
    for b in &cli.budget {
        let (k, v) = split_kv(b)?;
        cfg.budgets.set(k, v)?;
    }
    match &cli.command {
        Command::Info { .. } => cmd_info(&cfg),
        Command::Oracle { x, y, n_max, restricted, center, .. } => {
            let restriction = restricted.map(|r| match r {
                RestrictArg::Y => Restriction::Target,
                RestrictArg::Ball => Restriction::Ball(center.clone().unwrap_or_default()),
            });
            cmd_oracle(&cfg, x, y, *n_max, restriction.as_ref())
        }
        Command::Solve { order, .. } => cmd_solve(&cfg, *order),
        Command::Radius { .. } => cmd_radius(&cfg),
        Command::Green { x, y, z, .. } => cmd_green(&cfg, x, y, z),
        Command::Asympt { pairs, coordinates, .. } => {
            let pairs = if pairs.is_empty() {
                let b = cfg.model.tree().format_vertex(&cfg.model.tree().base());
                vec![(b.clone(), b)]
            } else {
                pairs
                    .iter()
                    .map(|p| {
                        p.split_once(',')
                            .map(|(x, y)| (x.to_string(), y.to_string()))
                            .ok_or_else(|| Error::Argument(format!("pair {p:?} is not of the form x,y")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            cmd_asympt(&cfg, &pairs, *coordinates)
        }
        Command::Validate { .. } => cmd_validate(&cfg),
    }
}

/// Exit status for an error: 3 for budget exhaustion, 1 for numerical or
/// internal failures, 2 for usage, parse and model errors.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Budget(_) => 3,
        Error::Numeric(_) | Error::Internal(_) => 1,
        Error::Model(_) | Error::Argument(_) | Error::Parse { .. } | Error::Io(_) => 2,
    }
}

/// Run a parsed command line: write the report and return the exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|rep| {
        let text = rep.render()?;
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(rep.status)
    });
    match result {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            eprintln!("treewalk: {e}");
            exit_code(&e)
        }
    }
}
