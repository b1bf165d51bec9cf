//! `dispersive`: evolution, ground states, identity checks, inequality probes and the threshold
//! dichotomy from JSON configs.
//!
//! Exit codes: 0 success (trapped for `dichotomy`), 1 error, 2 escaped (`dichotomy`) or
//! divergence (`ground-state`), 3 blow-up or non-finite abort (`evolve`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod data;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use config::{DichotomyConfig, EvolveConfig, Experiment, GroundStateConfig, IdentityCheckConfig, ProbeConfig};
use output::OutDir;

#[derive(Parser)]
#[command(name = "dispersive", version, about = "Pseudospectral laboratory for quartic dispersive equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate initial data and log energies.
    Evolve(Common),
    /// Solve for a ground state by Petviashvili iteration.
    GroundState(Common),
    /// Compare the modified-energy identity against finite differences along a trajectory.
    IdentityCheck(Common),
    /// Evaluate an inequality ratio over a function family.
    Probe(Common),
    /// Track the controlled quantity of sub-threshold data.
    Dichotomy(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON config; every key is optional and unknown keys are rejected.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Dotted override `key.sub=value`, applied after the file; the value is parsed as JSON when possible.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Replaces every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs N replicas with seeds seed, seed + 1, ... into DIR/replica-<i>.
    #[arg(long, value_name = "N")]
    ensemble: Option<usize>,
}

fn prepare<C: Experiment>(common: &Common) -> Result<Vec<(C, PathBuf)>> {
    let mut base: C = config::load(common.config.as_deref(), &common.overrides)?;
    base.resolve()?;
    match common.ensemble {
        None => {
            if let Some(s) = common.seed {
                base.reseed(s);
            }
            Ok(vec![(base, common.out.clone())])
        }
        Some(0) => anyhow::bail!("--ensemble needs at least one replica"),
        Some(n) => {
            let start = common.seed.unwrap_or(0);
            Ok((0..n)
                .map(|i| {
                    let mut c = base.clone();
                    c.reseed(start.wrapping_add(i as u64));
                    (c, common.out.join(format!("replica-{i}")))
                })
                .collect())
        }
    }
}

fn run_all<C: Experiment>(common: &Common, run: fn(&C, &OutDir) -> Result<i32>) -> Result<i32> {
    let jobs = prepare::<C>(common)?;
    let one = |(c, dir): &(C, PathBuf)| -> Result<i32> { run(c, &OutDir::create(Path::new(dir))?) };
    let codes = if jobs.len() == 1 {
        vec![one(&jobs[0])?]
    } else {
        jobs.par_iter().map(one).collect::<Result<Vec<_>>>()?
    };
    Ok(codes.into_iter().max().unwrap_or(commands::EXIT_OK))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Evolve(c) => run_all::<EvolveConfig>(c, commands::evolve_cmd),
        Command::GroundState(c) => run_all::<GroundStateConfig>(c, commands::ground_state_cmd),
        Command::IdentityCheck(c) => run_all::<IdentityCheckConfig>(c, commands::identity_check_cmd),
        Command::Probe(c) => run_all::<ProbeConfig>(c, commands::probe_cmd),
        Command::Dichotomy(c) => run_all::<DichotomyConfig>(c, commands::dichotomy_cmd),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR as u8)
        }
    }
}
