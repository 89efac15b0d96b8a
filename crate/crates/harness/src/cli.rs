//! Argument parsing and dispatch.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a computation errors,
//! 2 for usage and configuration errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CommandError, Outcome};
use crate::config::ConfigMap;
use crate::report::write_timing;
use crate::suites::SUITES;

pub const OUT_ENV: &str = "LOWSING_OUT";
pub const DEFAULT_OUT: &str = "lowsing-out";

#[derive(Debug, Parser)]
#[command(name = "lowsing", version, about = "Dyadic decompositions, resolvent solvers and jump-process checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,
    /// gamma | stable | stable:<alpha>
    #[arg(long, global = true)]
    pub spec: Option<String>,
    /// Points per axis, optionally followed by the side length: `n` or `n,L`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    /// Output root; defaults to $LOWSING_OUT, then ./lowsing-out.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
    },
    /// Solve λu − ℒu = f on a periodic grid.
    Solve {
        #[arg(long)]
        beta: Option<String>,
        /// Expression for the x-factor of the coefficient, or a file whose first line is
        /// the x-factor and whose optional second line is the factor in r = |z|.
        #[arg(long)]
        coeff: Option<String>,
    },
    /// Simulate the jump process and estimate the resolvent at the start point.
    Simulate,
    /// Occupation estimates for shrinking balls.
    Krylov,
    /// The bounded-norm, unbounded-value field and its growth at dyadic points.
    Counterexample,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify { .. } => "verify",
            Command::Solve { .. } => "solve",
            Command::Simulate => "simulate",
            Command::Krylov => "krylov",
            Command::Counterexample => "counterexample",
        }
    }
}

/// Runs the command line and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            for check in &outcome.report.checks {
                println!("{}", check.line());
            }
            let failed: Vec<&str> = outcome
                .report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.id.as_str())
                .collect();
            if failed.is_empty() {
                0
            } else {
                eprintln!("failed: {}", failed.join(", "));
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Builds the configuration: file first, then `--set`, then the dedicated flags.
pub fn build_config(cli: &Cli) -> Result<ConfigMap, CommandError> {
    let mut config = match &cli.common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CommandError::Usage(format!("cannot read {}: {e}", path.display())))?;
            ConfigMap::parse(&text)?
        }
        None => ConfigMap::default(),
    };
    for assignment in &cli.common.set {
        config.set_assignment(assignment)?;
    }
    let c = &cli.common;
    if let Some(v) = &c.spec {
        config.set("spec", v)?;
    }
    if let Some(v) = &c.grid {
        match v.split_once(',') {
            Some((n, l)) => {
                config.set("grid", n.trim())?;
                config.set("length", l.trim())?;
            }
            None => config.set("grid", v)?,
        }
    }
    if let Some(v) = &c.lambda {
        config.set("lambda", v)?;
    }
    if let Some(v) = &c.seed {
        config.set("seed", v)?;
    }
    if let Command::Solve { beta, coeff } = &cli.command {
        if let Some(v) = beta {
            config.set("beta", v)?;
        }
        if let Some(v) = coeff {
            apply_coeff(&mut config, v)?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn apply_coeff(config: &mut ConfigMap, value: &str) -> Result<(), CommandError> {
    let path = Path::new(value);
    if !path.is_file() {
        return Ok(config.set("coeff_x", value)?);
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let px = lines
        .next()
        .ok_or_else(|| CommandError::Usage(format!("{} holds no expression", path.display())))?;
    config.set("coeff_x", px)?;
    if let Some(qz) = lines.next() {
        config.set("coeff_z", qz)?;
    }
    Ok(())
}

pub fn output_root(cli: &Cli) -> PathBuf {
    cli.common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

/// Runs the command, writing `report.json` and `timing.txt` into `<root>/<command>`.
pub fn execute(cli: &Cli) -> Result<Outcome, CommandError> {
    let config = build_config(cli)?;
    let dir = output_root(cli).join(cli.command.name());
    std::fs::create_dir_all(&dir)?;
    let outcome = match &cli.command {
        Command::Verify { suite } => commands::verify(&config, suite)?,
        Command::Solve { .. } => commands::solve(&config, &dir)?,
        Command::Simulate => commands::simulate(&config, &dir)?,
        Command::Krylov => commands::krylov(&config, &dir)?,
        Command::Counterexample => commands::counterexample(&config, &dir)?,
    };
    outcome.report.write(&dir)?;
    write_timing(&dir, &outcome.timings)?;
    Ok(outcome)
}
