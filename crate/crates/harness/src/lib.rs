//! Command-line drivers for `spinbath-core`: figure reproductions, parameter
//! sweeps and the invariant validation suites, with CSV/JSON output.
//!
//! Exit codes: 0 success, 1 validation failure, 2 configuration or I/O error.

pub mod commands;
pub mod config;
pub mod engine;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::validate::Fault;
use crate::config::{BathKind, RunConfig};
use crate::error::{HarnessError, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spinbath",
    version,
    about = "Teleportation through a common central-spin bath"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Singlet vs triplet average fidelity for an unpolarized bath.
    Fig1(CommonArgs),
    /// Parallel vs perpendicular input fidelity for a polarized bath.
    Fig2(CommonArgs),
    /// Long-format sweep over --deltas, --rs, --labels and --modes.
    Sweep(CommonArgs),
    /// Run the invariant suites and report pass/fail.
    Validate(ValidateArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of bath spins.
    #[arg(long)]
    pub n: Option<u32>,
    /// Coupling K_a of the qubit carrying the unknown state.
    #[arg(long, allow_hyphen_values = true)]
    pub ka: Option<f64>,
    /// Coupling K_A of Alice's half of the shared pair.
    #[arg(long = "kA", allow_hyphen_values = true)]
    pub k_pair: Option<f64>,
    #[arg(long, value_enum)]
    pub bath: Option<BathKind>,
    /// Shared Bell pair: s0, t0, tplus, tminus.
    #[arg(long)]
    pub shared: Option<String>,
    /// Measurement outcome reported by fig2.
    #[arg(long)]
    pub measured: Option<String>,
    /// Measurement basis parameter (1 = Bell basis).
    #[arg(long)]
    pub r: Option<f64>,
    /// conditional or weighted.
    #[arg(long)]
    pub mode: Option<String>,
    /// First grid point in Kt.
    #[arg(long)]
    pub t_start: Option<f64>,
    /// Last grid point in Kt.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points.
    #[arg(long)]
    pub t_steps: Option<usize>,
    /// "sphere" or a Bloch vector "x,y,z".
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Output CSV path; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated inhomogeneities (sweep); empty for none.
    #[arg(long, allow_hyphen_values = true)]
    pub deltas: Option<String>,
    /// Comma-separated basis parameters (sweep).
    #[arg(long)]
    pub rs: Option<String>,
    /// Comma-separated outcome labels (sweep).
    #[arg(long)]
    pub labels: Option<String>,
    /// Comma-separated averaging modes (sweep).
    #[arg(long)]
    pub modes: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct ValidateArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Fault::None, hide = true)]
    pub inject_fault: Fault,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(String::from)
        .collect()
}

fn parse_numbers(s: &str, name: &str) -> Result<Vec<f64>> {
    split_list(s)
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| HarnessError::config(format!("--{name}: cannot parse {p:?}")))
        })
        .collect()
}

impl CommonArgs {
    fn overrides(&self) -> Result<RunConfig> {
        Ok(RunConfig {
            n: self.n,
            ka: self.ka,
            k_pair: self.k_pair,
            bath: self.bath,
            shared: self.shared.clone(),
            measured: self.measured.clone(),
            r: self.r,
            mode: self.mode.clone(),
            t_start: self.t_start,
            t_max: self.t_max,
            t_steps: self.t_steps,
            input: self.input.clone(),
            deltas: self.deltas.as_deref().map(|s| parse_numbers(s, "deltas")).transpose()?,
            rs: self.rs.as_deref().map(|s| parse_numbers(s, "rs")).transpose()?,
            labels: self.labels.as_deref().map(split_list),
            modes: self.modes.as_deref().map(split_list),
            seed: self.seed,
            out: self.out.clone(),
        })
    }

    /// Command defaults, then the config file, then flags.
    pub fn merged(&self, defaults: RunConfig) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(defaults.layered(file).layered(self.overrides()?))
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Fig1(args) => {
            let config = args.merged(commands::fig1::defaults())?;
            let (table, summary) = commands::fig1::run(&config.resolve()?)?;
            output::emit("fig1", &config, &table, &summary)?;
        }
        Command::Fig2(args) => {
            let config = args.merged(commands::fig2::defaults())?;
            let (table, summary) = commands::fig2::run(&config.resolve()?)?;
            output::emit("fig2", &config, &table, &summary)?;
        }
        Command::Sweep(args) => {
            let config = args.merged(commands::sweep::defaults())?;
            let (table, summary) = commands::sweep::run(&config.resolve()?)?;
            output::emit("sweep", &config, &table, &summary)?;
        }
        Command::Validate(args) => {
            let report = commands::validate::run(args.seed.unwrap_or(0), args.inject_fault)?;
            let mut json = serde_json::to_vec_pretty(&report)?;
            json.push(b'\n');
            match &args.out {
                Some(path) => output::write_file(path, &json)?,
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(&json)
                        .map_err(|e| HarnessError::io("<stdout>", e))?;
                }
            }
            for suite in &report.suites {
                eprintln!("{} {}", if suite.passed { "[PASS]" } else { "[FAIL]" }, suite.name);
                for check in suite.checks.iter().filter(|c| !c.passed) {
                    eprintln!(
                        "    {}: residual {:e} > {:e}",
                        check.invariant, check.residual, check.tolerance
                    );
                }
            }
            return Ok(if report.passed { EXIT_OK } else { EXIT_VALIDATION });
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
