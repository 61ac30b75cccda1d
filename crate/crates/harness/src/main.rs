use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use risv2x_core::env::Mobility;
use risv2x_core::policies::{PolicyKind, PolicySpec, DEFAULT_PHASE_BUDGET};
use risv2x_core::scenario::{SamplingStrategy, ScenarioConfig};
use risv2x_harness::config::{load_config, save_config};
use risv2x_harness::experiment::{run_eval, ExperimentSpec, Sweep, SweepVar};
use risv2x_harness::metrics::{emit_metrics_csv, metrics_rows, summarize, write_summary};
use risv2x_harness::protocol::{serve_stdio, serve_tcp, Session};
use risv2x_harness::trajectory_io::{generate_trajectories, load_trajectories, save_trajectories};

#[derive(Parser)]
#[command(name = "risv2x", version, about = "RIS-assisted ISAC vehicular network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a parameter sweep with a baseline policy and write metrics.csv and summary.json.
    Simulate {
        /// Scenario file (.toml or .json); defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// random, random_ris or greedy.
        #[arg(long, default_value = "random")]
        policy: PolicyKind,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        /// `var=v1,v2,...` with var one of payload_K, v2i_power, window_N,
        /// n_vehicles, trajectory_scenario.
        #[arg(long)]
        sweep: String,
        #[arg(long)]
        out: PathBuf,
        /// Base seed; run r uses seed + r. Defaults to the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Candidate phase vectors per slot for the greedy policy.
        #[arg(long, default_value_t = DEFAULT_PHASE_BUDGET)]
        greedy_budget: usize,
        /// Trajectory CSV for trajectory_scenario sweeps; a synthetic set is
        /// generated when omitted.
        #[arg(long)]
        trajectories: Option<PathBuf>,
    },
    /// Serve the environment line protocol.
    Serve {
        /// `stdio` or `tcp:<host:port>`.
        #[arg(long, default_value = "stdio")]
        transport: String,
        /// Config used by resets that carry none.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Play back trajectories from this CSV instead of grid mobility.
        #[arg(long)]
        trajectories: Option<PathBuf>,
        #[arg(long, default_value = "random")]
        strategy: SamplingStrategy,
    },
    /// Write a synthetic trajectory CSV from grid mobility.
    GenTrajectories {
        #[arg(long)]
        vehicles: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Samples per vehicle; defaults to the config's episode length.
        #[arg(long)]
        slots: Option<usize>,
    },
}

fn config_or_default(path: Option<&Path>) -> Result<ScenarioConfig> {
    match path {
        Some(p) => load_config(p).with_context(|| format!("loading config {}", p.display())),
        None => Ok(ScenarioConfig::default()),
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate {
            config,
            policy,
            runs,
            sweep,
            out,
            seed,
            greedy_budget,
            trajectories,
        } => {
            let config = config_or_default(config.as_deref())?;
            let sweep = Sweep::parse(&sweep)?;
            let base_seed = seed.unwrap_or(config.seed);
            let trajectories = match (&trajectories, sweep.var) {
                (Some(path), _) => Some(load_trajectories(path, &config)?),
                (None, SweepVar::TrajectoryScenario) => {
                    let pool = 4 * config.n_vehicles;
                    eprintln!("no --trajectories given; generating {pool} synthetic trajectories");
                    Some(generate_trajectories(&config, pool, config.episode_slots, base_seed)?)
                }
                (None, _) => None,
            };
            let spec = ExperimentSpec {
                config: config.clone(),
                sweep,
                runs,
                policy: PolicySpec {
                    kind: policy,
                    greedy_phase_budget: greedy_budget,
                    seed: base_seed,
                },
                base_seed,
                trajectories,
            };
            let points = run_eval(&spec)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            emit_metrics_csv(&metrics_rows(spec.sweep.var, &points), &out.join("metrics.csv"))?;
            let summary = summarize(spec.sweep.var, policy.as_str(), base_seed, &points);
            write_summary(&summary, &out.join("summary.json"))?;
            save_config(&config, &out.join("config.json"))?;
            println!("{:>20} {:>12} {:>12} {:>12} {:>12}", spec.sweep.var, "ccr_v2i", "ccr_v2v", "ccr_total", "objective");
            for p in &summary.points {
                println!(
                    "{:>20} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
                    p.sweep_value, p.ccr_v2i.mean, p.ccr_v2v.mean, p.ccr_total.mean, p.objective.mean
                );
            }
        }
        Command::Serve {
            transport,
            config,
            trajectories,
            strategy,
        } => {
            let config = config_or_default(config.as_deref())?;
            let mobility = match trajectories {
                Some(path) => Mobility::Trajectories {
                    set: load_trajectories(&path, &config)?,
                    strategy,
                },
                None => Mobility::Grid,
            };
            let session = Session::new(config, mobility);
            if transport == "stdio" {
                serve_stdio(session).context("stdio transport failed")?;
            } else if let Some(addr) = transport.strip_prefix("tcp:") {
                eprintln!("listening on {addr}");
                serve_tcp(addr, session).with_context(|| format!("tcp transport on {addr} failed"))?;
            } else {
                bail!("unknown transport `{transport}` (expected stdio or tcp:<host:port>)");
            }
        }
        Command::GenTrajectories {
            vehicles,
            out,
            seed,
            config,
            slots,
        } => {
            let config = config_or_default(config.as_deref())?;
            let slots = slots.unwrap_or(config.episode_slots);
            let set = generate_trajectories(&config, vehicles, slots, seed)?;
            save_trajectories(&set, &out)?;
        }
    }
    Ok(())
}
