//! Experiment sweeps: one scenario parameter varied over a list of values,
//! `runs` independent episodes per value.
//!
//! Run `r` of every sweep point uses seed `base_seed + r` (wrapping) for the
//! environment and the policy alike, so points share channel and mobility
//! randomness run by run.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use risv2x_core::connectivity::{CcrReport, EpisodeReport};
use risv2x_core::env::{Env, Mobility};
use risv2x_core::policies::PolicySpec;
use risv2x_core::scenario::{SamplingStrategy, ScenarioConfig, TrajectorySet, PAYLOAD_UNIT_BITS};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVar {
    /// Payload in units of 1060 bits.
    #[serde(rename = "payload_K")]
    PayloadK,
    /// V2I transmit power, dBm.
    V2iPower,
    #[serde(rename = "window_N")]
    WindowN,
    NVehicles,
    /// Trajectory sampling strategy.
    TrajectoryScenario,
}

impl SweepVar {
    pub const ALL: [SweepVar; 5] = [
        SweepVar::PayloadK,
        SweepVar::V2iPower,
        SweepVar::WindowN,
        SweepVar::NVehicles,
        SweepVar::TrajectoryScenario,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepVar::PayloadK => "payload_K",
            SweepVar::V2iPower => "v2i_power",
            SweepVar::WindowN => "window_N",
            SweepVar::NVehicles => "n_vehicles",
            SweepVar::TrajectoryScenario => "trajectory_scenario",
        }
    }

    pub fn parse_value(self, text: &str) -> Result<SweepValue> {
        let text = text.trim();
        let bad = |why: &str| HarnessError::Sweep(format!("{}: `{text}` {why}", self.as_str()));
        match self {
            SweepVar::TrajectoryScenario => text
                .parse::<SamplingStrategy>()
                .map(SweepValue::Strategy)
                .map_err(|_| bad("is not one of random, area_balanced, longest")),
            SweepVar::WindowN | SweepVar::NVehicles => match text.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(SweepValue::Number(n as f64)),
                _ => Err(bad("is not a positive integer")),
            },
            SweepVar::PayloadK | SweepVar::V2iPower => match text.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(SweepValue::Number(x)),
                _ => Err(bad("is not a finite number")),
            },
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVar {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        SweepVar::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| HarnessError::Sweep(format!("unknown sweep variable `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Number(f64),
    Strategy(SamplingStrategy),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Number(x) => write!(f, "{x}"),
            SweepValue::Strategy(s) => f.write_str(s.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub var: SweepVar,
    pub values: Vec<SweepValue>,
}

impl Sweep {
    /// Parses `var=v1,v2,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let (var, values) = text
            .split_once('=')
            .ok_or_else(|| HarnessError::Sweep(format!("expected `var=v1,v2,...`, got `{text}`")))?;
        let var: SweepVar = var.trim().parse()?;
        let values = values
            .split(',')
            .filter(|v| !v.trim().is_empty())
            .map(|v| var.parse_value(v))
            .collect::<Result<Vec<_>>>()?;
        let sweep = Sweep { var, values };
        sweep.check()?;
        Ok(sweep)
    }

    fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(HarnessError::Sweep(format!("no values for {}", self.var)));
        }
        Ok(())
    }
}

/// Everything needed to reproduce one sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub config: ScenarioConfig,
    pub sweep: Sweep,
    pub runs: usize,
    pub policy: PolicySpec,
    pub base_seed: u64,
    /// Source set for `trajectory_scenario` sweeps; grid mobility otherwise.
    pub trajectories: Option<TrajectorySet>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        self.sweep.check()?;
        if self.runs == 0 {
            return Err(HarnessError::Sweep("runs must be >= 1".into()));
        }
        if self.sweep.var == SweepVar::TrajectoryScenario && self.trajectories.is_none() {
            return Err(HarnessError::Sweep("trajectory_scenario needs a trajectory set".into()));
        }
        Ok(())
    }

    /// Scenario and mobility of one sweep point.
    pub fn point(&self, value: SweepValue) -> Result<(ScenarioConfig, Mobility)> {
        let mut config = self.config.clone();
        let mut mobility = Mobility::Grid;
        match (self.sweep.var, value) {
            (SweepVar::PayloadK, SweepValue::Number(k)) => config.payload = k * PAYLOAD_UNIT_BITS,
            (SweepVar::V2iPower, SweepValue::Number(p)) => config.v2i_power = p,
            (SweepVar::WindowN, SweepValue::Number(n)) => config.window = n as usize,
            (SweepVar::NVehicles, SweepValue::Number(n)) => {
                config.n_vehicles = n as usize;
                config.n_targets = config.n_targets.min(config.n_vehicles);
                config.n_v2v_links = config.n_v2v_links.map(|d| d.min(config.n_vehicles));
            }
            (SweepVar::TrajectoryScenario, SweepValue::Strategy(strategy)) => {
                let set = self
                    .trajectories
                    .clone()
                    .ok_or_else(|| HarnessError::Sweep("trajectory_scenario needs a trajectory set".into()))?;
                mobility = Mobility::Trajectories { set, strategy };
            }
            (var, value) => {
                return Err(HarnessError::Sweep(format!("value `{value}` does not fit {var}")));
            }
        }
        config.validate()?;
        Ok((config, mobility))
    }
}

pub fn run_seed(base_seed: u64, run: usize) -> u64 {
    base_seed.wrapping_add(run as u64)
}

/// Plays one full episode with a fresh policy.
pub fn run_episode(config: &ScenarioConfig, mobility: &Mobility, policy: &PolicySpec, seed: u64) -> Result<EpisodeReport> {
    let mut env = Env::new(config.clone(), mobility.clone())?;
    let mut policy = PolicySpec { seed, ..*policy }.build()?;
    env.reset(seed)?;
    while !env.is_done() {
        let action = policy.act(&env)?;
        env.step(&action)?;
    }
    Ok(env.episode_report()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub value: SweepValue,
    pub report: CcrReport,
}

/// Runs every point × run. Runs execute in parallel; results are ordered
/// by run index and independent of the thread count.
pub fn run_eval(spec: &ExperimentSpec) -> Result<Vec<PointResult>> {
    spec.validate()?;
    spec.sweep
        .values
        .iter()
        .map(|&value| {
            let (config, mobility) = spec.point(value)?;
            let episodes = (0..spec.runs)
                .into_par_iter()
                .map(|run| run_episode(&config, &mobility, &spec.policy, run_seed(spec.base_seed, run)))
                .collect::<Result<Vec<_>>>()?;
            Ok(PointResult {
                value,
                report: CcrReport { episodes },
            })
        })
        .collect()
}
