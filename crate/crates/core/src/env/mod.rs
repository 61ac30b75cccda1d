//! The MDP: one base station agent choosing, every slot, the V2I channel each
//! V2V pair reuses, the pair's transmit power and the RIS phase vector.
//!
//! A slot's random draws (shadowing, fading) are taken *before* the agent
//! acts, so the observation shows the channel the action will face and
//! [`Env::preview_reward`] can score candidate actions against the same
//! realisation that [`Env::step`] will use.

mod action;
mod observation;

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

pub use action::{Action, ActionSpace};
pub use observation::{to_db_floored, BsNode, Edge, EdgeKind, Observation, RisNode, VehicleNode, DB_FLOOR};

use crate::channel::{reflection_matrix, ChannelRealization, ChannelState, RisState, SlotGeometry};
use crate::connectivity::{EpisodeReport, EpisodeTrace, PayloadTracker, WindowTracker};
use crate::radio::{meets_thresholds, spectral_efficiency, watt_to_dbm, Allocation, SlotLinkMetrics};
use crate::rng::{stream, SimRng, Stream};
use crate::scenario::{
    assign_roles, build_grid_scenario, sample_trajectories, RadioParams, RoadGrid, SamplingStrategy,
    ScenarioConfig, Trajectory, TrajectorySet, VehicleState, ANTENNA_HEIGHT_M,
};
use crate::{Error, Result};

/// Where vehicle positions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Mobility {
    /// Synthetic Manhattan grid.
    Grid,
    /// Playback of `n_vehicles` trajectories drawn from `set` (already in
    /// region coordinates) with `strategy`.
    Trajectories {
        set: TrajectorySet,
        strategy: SamplingStrategy,
    },
}

/// Per-slot diagnostics returned alongside the reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    /// 1-based index of the slot just played.
    pub slot: usize,
    pub metrics: SlotLinkMetrics,
    /// Ψ per vehicle (Ψ_j for targets).
    pub psi: Vec<bool>,
    /// Ψ = 1 count over non-target vehicles.
    pub psi_v2i: usize,
    /// Ψ = 1 count over targets.
    pub psi_sense: usize,
    /// `K_d / K` per pair after this slot.
    pub remaining_fraction: Vec<f64>,
    pub delivered: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

#[derive(Debug, Clone)]
struct Episode {
    vehicles: Vec<VehicleState>,
    /// Playback trajectories, indexed like `vehicles`.
    trajectories: Option<Vec<Trajectory>>,
    pair_tx: Vec<usize>,
    pair_rx: Vec<usize>,
    targets: Vec<usize>,
    mobility_rng: SimRng,
    channel_rng: SimRng,
    /// Slots already played.
    slot: usize,
    channel: ChannelState,
    phases: Vec<usize>,
    windows: Vec<WindowTracker>,
    payload: PayloadTracker,
    /// Interference at each V2V receiver in the previous slot, watts.
    prev_interference_w: Option<Vec<f64>>,
    trace: EpisodeTrace,
}

/// Simulation environment. Strictly sequential: `reset`, then `step` until done.
#[derive(Debug, Clone)]
pub struct Env {
    config: ScenarioConfig,
    radio: RadioParams,
    space: ActionSpace,
    grid: RoadGrid,
    mobility: Mobility,
    episode: Option<Episode>,
}

impl Env {
    pub fn new(config: ScenarioConfig, mobility: Mobility) -> Result<Self> {
        config.validate()?;
        if let Mobility::Trajectories { set, .. } = &mobility {
            if set.len() < config.n_vehicles {
                return Err(Error::NotEnoughTrajectories {
                    requested: config.n_vehicles,
                    available: set.len(),
                });
            }
        }
        Ok(Env {
            radio: RadioParams::from_config(&config),
            space: ActionSpace::from_config(&config),
            grid: RoadGrid::from_config(&config),
            config,
            mobility,
            episode: None,
        })
    }

    pub fn grid(config: ScenarioConfig) -> Result<Self> {
        Env::new(config, Mobility::Grid)
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    pub fn action_space(&self) -> &ActionSpace {
        &self.space
    }

    /// Builds the scenario, draws slot 1's channels and returns the first
    /// observation (all-zero phase indices, full payloads, no interference
    /// history).
    pub fn reset(&mut self, seed: u64) -> Result<Observation> {
        let config = &self.config;
        let mut mobility_rng = stream(seed, Stream::Mobility);
        let (vehicles, trajectories) = match &self.mobility {
            Mobility::Grid => (build_grid_scenario(config, seed)?, None),
            Mobility::Trajectories { set, strategy } => {
                let picked = sample_trajectories(set, *strategy, config.n_vehicles, &mut mobility_rng)?;
                let mut vehicles: Vec<VehicleState> = picked
                    .trajectories
                    .iter()
                    .enumerate()
                    .map(|(id, tr)| VehicleState {
                        id,
                        position: playback_position(tr, 0, config.slot_duration),
                        velocity: [0.0, 0.0],
                        speed: 0.0,
                        is_target: false,
                        v2v_peer: None,
                        lane: None,
                    })
                    .collect();
                let mut role_rng = stream(seed, Stream::Scenario);
                assign_roles(&mut vehicles, config.n_targets, config.n_pairs(), &mut role_rng)?;
                (vehicles, Some(picked.trajectories))
            }
        };
        let pair_tx: Vec<usize> = (0..config.n_pairs()).collect();
        let pair_rx = pair_tx
            .iter()
            .map(|&tx| vehicles[tx].v2v_peer.ok_or(Error::NoV2vPeer))
            .collect::<Result<Vec<_>>>()?;
        let targets: Vec<usize> = vehicles.iter().filter(|v| v.is_target).map(|v| v.id).collect();
        let mut channel_rng = stream(seed, Stream::Channel);
        let channel = draw_channel(config, &vehicles, &pair_tx, &targets, &mut channel_rng)?;
        let trace = EpisodeTrace {
            window: config.window,
            psi_vehicle: Vec::with_capacity(config.episode_slots),
            is_target: vehicles.iter().map(|v| v.is_target).collect(),
            delivered: alloc::vec![false; pair_tx.len()],
            rewards: Vec::with_capacity(config.episode_slots),
        };
        self.episode = Some(Episode {
            windows: (0..vehicles.len()).map(|_| WindowTracker::new(config.window)).collect(),
            payload: PayloadTracker::new(pair_tx.len(), config.payload),
            phases: alloc::vec![0; config.ris_elements],
            prev_interference_w: None,
            slot: 0,
            vehicles,
            trajectories,
            pair_tx,
            pair_rx,
            targets,
            mobility_rng,
            channel_rng,
            channel,
            trace,
        });
        self.observation()
    }

    fn episode(&self) -> Result<&Episode> {
        self.episode.as_ref().ok_or(Error::NotReset)
    }

    pub fn is_reset(&self) -> bool {
        self.episode.is_some()
    }

    /// Slots already played in the current episode.
    pub fn slot(&self) -> usize {
        self.episode.as_ref().map_or(0, |e| e.slot)
    }

    pub fn is_done(&self) -> bool {
        self.episode
            .as_ref()
            .is_some_and(|e| e.slot >= self.config.episode_slots)
    }

    pub fn vehicles(&self) -> &[VehicleState] {
        self.episode.as_ref().map_or(&[], |e| &e.vehicles)
    }

    /// `(transmitter, receiver)` of every V2V pair.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.episode
            .as_ref()
            .map(|e| e.pair_tx.iter().copied().zip(e.pair_rx.iter().copied()).collect())
            .unwrap_or_default()
    }

    pub fn targets(&self) -> &[usize] {
        self.episode.as_ref().map_or(&[], |e| &e.targets)
    }

    /// Phase indices applied in the last slot (all zero after reset).
    pub fn current_phases(&self) -> &[usize] {
        self.episode.as_ref().map_or(&[], |e| &e.phases)
    }

    pub fn channel_state(&self) -> Option<&ChannelState> {
        self.episode.as_ref().map(|e| &e.channel)
    }

    pub fn trace(&self) -> Option<&EpisodeTrace> {
        self.episode.as_ref().map(|e| &e.trace)
    }

    /// Composite gains of the current slot under `phases`.
    pub fn realization(&self, phases: &[usize]) -> Result<ChannelRealization> {
        let ep = self.episode()?;
        self.realization_for(ep, phases)
    }

    fn realization_for(&self, ep: &Episode, phases: &[usize]) -> Result<ChannelRealization> {
        if phases.len() != self.config.ris_elements {
            return Err(Error::LengthMismatch {
                expected: self.config.ris_elements,
                actual: phases.len(),
            });
        }
        let theta = if self.config.ris_enabled {
            let ris = RisState::uniform(self.config.ris_amplitude, phases.to_vec());
            Some(reflection_matrix(&ris, self.config.phase_levels)?)
        } else {
            None
        };
        ChannelRealization::compute(&ep.channel, theta.as_deref(), &ep.pair_tx, &ep.targets)
    }

    /// Fast scorer for the current slot under a fixed phase vector.
    pub fn evaluator(&self, phases: &[usize]) -> Result<SlotEvaluator> {
        let ep = self.episode()?;
        if self.is_done() {
            return Err(Error::EpisodeDone);
        }
        let gains = self.realization_for(ep, phases)?;
        let sense_ok = gains
            .echo
            .iter()
            .map(|e| {
                crate::radio::sensing_snr(e.re, self.radio.sensing_power_w, self.radio.noise_sense_w)
                    >= self.radio.snr_threshold_linear
            })
            .collect::<Vec<_>>();
        let mut target_of = alloc::vec![None; ep.vehicles.len()];
        for (j, &v) in ep.targets.iter().enumerate() {
            target_of[v] = Some(j);
        }
        Ok(SlotEvaluator::new(LinkTerms {
            gain_v2i: gains.composite_v2i.iter().map(Complex64::norm_sqr).collect(),
            gain_v2v: gains.composite_v2v.iter().map(Complex64::norm_sqr).collect(),
            history_ok: ep.windows.iter().map(|w| w.would_hold(true)).collect(),
            sense_ok: target_of.iter().map(|j| j.map(|j| sense_ok[j])).collect(),
            remaining: ep.payload.remaining().to_vec(),
            payload_bits: ep.payload.payload_bits(),
            power_w: self.radio.v2v_power_w.clone(),
            v2i_power_w: self.radio.v2i_power_w,
            noise_w: self.radio.noise_comm_w,
            bandwidth_hz: self.radio.bandwidth_hz,
            rate_threshold: self.radio.rate_threshold,
            slot_duration: self.config.slot_duration,
        }))
    }

    /// Reward `action` would earn in the current slot, without changing state.
    pub fn preview_reward(&self, action: &Action) -> Result<f64> {
        self.space.validate(action)?;
        Ok(self
            .evaluator(&action.ris_phases)?
            .reward(&action.channels, &action.power_levels))
    }

    pub fn step_raw(&mut self, raw: &[f64]) -> Result<StepResult> {
        let action = self.space.decode(raw)?;
        self.step(&action)
    }

    pub fn step(&mut self, action: &Action) -> Result<StepResult> {
        self.space.validate(action)?;
        self.episode()?;
        if self.is_done() {
            return Err(Error::EpisodeDone);
        }
        let gains = self.realization(&action.ris_phases)?;
        let powers_w: Vec<f64> = action.power_levels.iter().map(|&l| self.radio.v2v_power_w[l]).collect();
        let alloc = Allocation {
            channels: &action.channels,
            powers_w: &powers_w,
        };
        let metrics = SlotLinkMetrics::compute(&gains, &alloc, &self.radio)?;
        let config = &self.config;
        let radio = &self.radio;
        let ep = self.episode.as_mut().expect("checked above");
        let outcome = meets_thresholds(&metrics, &ep.targets, radio.rate_threshold, radio.snr_threshold_linear);
        let mut passed = outcome.vehicle.clone();
        for (&v, &ok) in ep.targets.iter().zip(&outcome.target) {
            passed[v] = ok;
        }
        let psi: Vec<bool> = ep.windows.iter_mut().zip(&passed).map(|(w, &ok)| w.update(ok)).collect();
        for (d, &rate) in metrics.rate_v2v.iter().enumerate() {
            ep.payload.update(d, true, rate, config.slot_duration);
        }
        ep.payload.end_slot();
        let psi_sense = ep.targets.iter().filter(|&&j| psi[j]).count();
        let psi_total = psi.iter().filter(|&&p| p).count();
        let reward = psi_total as f64 - ep.payload.mean_remaining_fraction();

        ep.slot += 1;
        ep.phases.clone_from(&action.ris_phases);
        ep.prev_interference_w = Some(metrics.interference_v2v_w.clone());
        ep.trace.psi_vehicle.push(psi.clone());
        ep.trace.rewards.push(reward);
        ep.trace.delivered = ep.payload.delivered();

        let done = ep.slot >= config.episode_slots;
        if !done {
            advance_mobility(&self.grid, config, ep);
            ep.channel = draw_channel(config, &ep.vehicles, &ep.pair_tx, &ep.targets, &mut ep.channel_rng)?;
        }
        let payload_bits = ep.payload.payload_bits();
        let info = StepInfo {
            slot: ep.slot,
            psi_v2i: psi_total - psi_sense,
            psi_sense,
            psi,
            remaining_fraction: ep.payload.remaining().iter().map(|k| k / payload_bits).collect(),
            delivered: ep.payload.delivered(),
            metrics,
        };
        Ok(StepResult {
            observation: self.observation()?,
            reward,
            done,
            info,
        })
    }

    /// CCR metrics of the finished (or partially played) episode.
    pub fn episode_report(&self) -> Result<EpisodeReport> {
        EpisodeReport::from_trace(&self.episode()?.trace)
    }

    /// State graph for the current slot, with gains under the phases applied
    /// last slot.
    pub fn observation(&self) -> Result<Observation> {
        let ep = self.episode()?;
        let gains = self.realization_for(ep, &ep.phases)?;
        let n = ep.vehicles.len();
        let mut vehicles: Vec<VehicleNode> = ep
            .vehicles
            .iter()
            .map(|v| VehicleNode {
                x: v.position[0],
                y: v.position[1],
                link_gain_db: alloc::vec![DB_FLOOR; n],
                remaining_bits: alloc::vec![0.0; n],
                interference_dbm: alloc::vec![DB_FLOOR; n],
                is_target: v.is_target,
                sensing_gain_db: DB_FLOOR,
            })
            .collect();
        for (d, (&tx, &rx)) in ep.pair_tx.iter().zip(&ep.pair_rx).enumerate() {
            let node = &mut vehicles[tx];
            node.link_gain_db[rx] = to_db_floored(gains.composite_v2v[d].norm_sqr());
            node.remaining_bits[rx] = ep.payload.remaining()[d];
            if let Some(prev) = &ep.prev_interference_w {
                node.interference_dbm[rx] = if prev[d] > 0.0 {
                    watt_to_dbm(prev[d]).max(DB_FLOOR)
                } else {
                    DB_FLOOR
                };
            }
        }
        for (&j, echo) in ep.targets.iter().zip(&gains.echo) {
            vehicles[j].sensing_gain_db = to_db_floored(echo.norm_sqr());
        }
        let pairs: Vec<(usize, usize)> = ep.pair_tx.iter().copied().zip(ep.pair_rx.iter().copied()).collect();
        Ok(Observation {
            slot: ep.slot,
            vehicles,
            bs: BsNode {
                x: self.config.bs_position[0],
                y: self.config.bs_position[1],
                v2i_gain_db: gains.composite_v2i.iter().map(|g| to_db_floored(g.norm_sqr())).collect(),
            },
            ris: RisNode {
                x: self.config.ris_position[0],
                y: self.config.ris_position[1],
                phases: ep.phases.clone(),
            },
            edges: observation::build_edges(n, &pairs, &ep.targets),
        })
    }
}

fn playback_position(tr: &Trajectory, slot: usize, dt: f64) -> [f64; 3] {
    let (x, y) = tr.position_at(tr.points[0].t + slot as f64 * dt);
    [x, y, ANTENNA_HEIGHT_M]
}

fn advance_mobility(grid: &RoadGrid, config: &ScenarioConfig, ep: &mut Episode) {
    match &ep.trajectories {
        None => grid.step(&mut ep.vehicles, config.slot_duration, &mut ep.mobility_rng),
        Some(trs) => {
            for (v, tr) in ep.vehicles.iter_mut().zip(trs) {
                let next = playback_position(tr, ep.slot, config.slot_duration);
                let dt = config.slot_duration;
                v.velocity = [(next[0] - v.position[0]) / dt, (next[1] - v.position[1]) / dt];
                v.speed = (v.velocity[0] * v.velocity[0] + v.velocity[1] * v.velocity[1]).sqrt();
                v.position = next;
            }
        }
    }
}

fn draw_channel(
    config: &ScenarioConfig,
    vehicles: &[VehicleState],
    pair_tx: &[usize],
    targets: &[usize],
    rng: &mut SimRng,
) -> Result<ChannelState> {
    let positions: Vec<[f64; 3]> = vehicles.iter().map(|v| v.position).collect();
    let geometry = SlotGeometry {
        bs: config.bs_position,
        ris: config.ris_position,
        vehicles: &positions,
        pair_tx,
        targets,
        elements: config.ris_elements,
    };
    ChannelState::sample(&geometry, &config.channel, rng)
}

/// Fast reward evaluation for one slot and one phase vector.
///
/// Performs the same floating-point operations in the same order as
/// [`Env::step`], so `preview_reward` and the reward `step` returns agree
/// exactly. Outcomes for channels carrying zero or one pair (the only cases
/// a valid action produces) are tabulated up front; shared channels are
/// evaluated directly.
#[derive(Debug, Clone)]
pub struct SlotEvaluator {
    links: LinkTerms,
    /// Ψ per vehicle with its channel free.
    psi_free: Vec<bool>,
    /// Ψ of vehicle `v` with pair `d` alone on its channel at level `l`,
    /// at `(v·D + d)·L + l`.
    psi_single: Vec<bool>,
    /// Bits pair `d` still owes after the slot when alone on channel `v` at
    /// level `l`, at `(d·V + v)·L + l`.
    remaining_single: Vec<f64>,
}

#[derive(Debug, Clone)]
struct LinkTerms {
    gain_v2i: Vec<f64>,
    gain_v2v: Vec<f64>,
    /// Whether the window would hold for each vehicle given a pass now.
    history_ok: Vec<bool>,
    /// `Some(sensing test)` for targets.
    sense_ok: Vec<Option<bool>>,
    remaining: Vec<f64>,
    payload_bits: f64,
    power_w: Vec<f64>,
    v2i_power_w: f64,
    noise_w: f64,
    bandwidth_hz: f64,
    rate_threshold: f64,
    slot_duration: f64,
}

impl LinkTerms {
    fn co_channel(&self, v: usize, channels: &[usize], power_levels: &[usize], skip: Option<usize>) -> f64 {
        channels
            .iter()
            .zip(power_levels)
            .zip(&self.gain_v2v)
            .enumerate()
            .filter(|&(d, ((&ch, _), _))| ch == v && Some(d) != skip)
            .map(|(_, ((_, &l), g))| self.power_w[l] * g)
            .sum()
    }

    /// Received power of pair `d` at level `l`; also the lone summand of a
    /// single-pair co-channel sum, which equals the summand exactly.
    fn pair_power(&self, d: usize, l: usize) -> f64 {
        self.power_w[l] * self.gain_v2v[d]
    }

    fn psi(&self, v: usize, interference: f64) -> bool {
        if !self.history_ok[v] || self.sense_ok[v] == Some(false) {
            return false;
        }
        let sinr = self.v2i_power_w * self.gain_v2i[v] / (interference + self.noise_w);
        spectral_efficiency(sinr) >= self.rate_threshold
    }

    fn remaining_after(&self, d: usize, v: usize, l: usize, others: f64) -> f64 {
        let interference = others + self.v2i_power_w * self.gain_v2i[v];
        let sinr = self.pair_power(d, l) / (interference + self.noise_w);
        let rate = self.bandwidth_hz * spectral_efficiency(sinr);
        (self.remaining[d] - rate * self.slot_duration).max(0.0)
    }
}

/// Pairs on one channel: none, exactly one, or several.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Occupancy {
    Free,
    Single(usize),
    Shared,
}

impl SlotEvaluator {
    fn new(links: LinkTerms) -> Self {
        let (n_v, n_d, n_l) = (links.gain_v2i.len(), links.gain_v2v.len(), links.power_w.len());
        let psi_free = (0..n_v).map(|v| links.psi(v, 0.0)).collect();
        let mut psi_single = Vec::with_capacity(n_v * n_d * n_l);
        for v in 0..n_v {
            for d in 0..n_d {
                psi_single.extend((0..n_l).map(|l| links.psi(v, links.pair_power(d, l))));
            }
        }
        let mut remaining_single = Vec::with_capacity(n_d * n_v * n_l);
        for d in 0..n_d {
            for v in 0..n_v {
                remaining_single.extend((0..n_l).map(|l| links.remaining_after(d, v, l, 0.0)));
            }
        }
        SlotEvaluator {
            links,
            psi_free,
            psi_single,
            remaining_single,
        }
    }

    /// Reward for pair channels and power levels; inputs must be in range.
    pub fn reward(&self, channels: &[usize], power_levels: &[usize]) -> f64 {
        let t = &self.links;
        let (n_v, n_d, n_l) = (t.gain_v2i.len(), t.gain_v2v.len(), t.power_w.len());
        let mut occupancy = alloc::vec![Occupancy::Free; n_v];
        for (d, &ch) in channels.iter().enumerate() {
            occupancy[ch] = match occupancy[ch] {
                Occupancy::Free => Occupancy::Single(d),
                _ => Occupancy::Shared,
            };
        }
        let psi = (0..n_v)
            .filter(|&v| match occupancy[v] {
                Occupancy::Free => self.psi_free[v],
                Occupancy::Single(d) => self.psi_single[(v * n_d + d) * n_l + power_levels[d]],
                Occupancy::Shared => t.psi(v, t.co_channel(v, channels, power_levels, None)),
            })
            .count();
        let remaining = channels.iter().zip(power_levels).enumerate().map(|(d, (&v, &l))| match occupancy[v] {
            Occupancy::Shared => t.remaining_after(d, v, l, t.co_channel(v, channels, power_levels, Some(d))),
            _ => self.remaining_single[(d * n_v + v) * n_l + l],
        });
        psi as f64 - mean_remaining_iter(remaining, t.payload_bits, t.remaining.len())
    }
}

fn mean_remaining_iter(remaining: impl Iterator<Item = f64>, payload_bits: f64, pairs: usize) -> f64 {
    remaining.map(|k| k / payload_bits).sum::<f64>() / pairs as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn small_config() -> ScenarioConfig {
        ScenarioConfig {
            n_vehicles: 4,
            n_targets: 1,
            ris_elements: 4,
            phase_levels: 4,
            episode_slots: 10,
            window: 2,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn reset_is_deterministic_and_topology_matches() {
        let mut a = Env::grid(ScenarioConfig::default()).unwrap();
        let mut b = Env::grid(ScenarioConfig::default()).unwrap();
        let oa = a.reset(7).unwrap();
        assert_eq!(oa, b.reset(7).unwrap());
        assert_eq!(oa.node_count(), 12 + 2);
        assert_eq!(oa.slot, 0);
        assert!(oa.ris.phases.iter().all(|&q| q == 0));
        for (tx, rx) in a.pairs() {
            assert_eq!(oa.vehicles[tx].remaining_bits[rx], 8480.0);
            assert_eq!(oa.vehicles[tx].interference_dbm[rx], DB_FLOOR);
        }
        assert_ne!(oa, b.reset(8).unwrap());
    }

    #[test]
    fn sparsity_holds_every_slot() {
        let mut env = Env::grid(small_config()).unwrap();
        let mut obs = env.reset(3).unwrap();
        let mut rng = stream(3, Stream::Policy);
        loop {
            let pairs = env.pairs();
            for (v, node) in obs.vehicles.iter().enumerate() {
                for n in 0..node.link_gain_db.len() {
                    if !pairs.contains(&(v, n)) {
                        assert_eq!(node.link_gain_db[n], DB_FLOOR);
                        assert_eq!(node.remaining_bits[n], 0.0);
                        assert_eq!(node.interference_dbm[n], DB_FLOOR);
                    }
                }
                if !node.is_target {
                    assert_eq!(node.sensing_gain_db, DB_FLOOR);
                }
                assert_eq!(node.features().len(), 3 * 4 + 4);
            }
            let action = env.action_space().sample(&mut rng);
            let r = env.step(&action).unwrap();
            obs = r.observation;
            if r.done {
                break;
            }
        }
    }

    #[test]
    fn horizon_and_step_after_done() {
        let mut env = Env::grid(small_config()).unwrap();
        env.reset(1).unwrap();
        let a = env.action_space().baseline();
        for t in 1..=10 {
            let r = env.step(&a).unwrap();
            assert_eq!(r.done, t == 10);
            assert_eq!(r.info.slot, t);
        }
        assert_eq!(env.step(&a), Err(Error::EpisodeDone));
        env.episode_report().unwrap();
    }

    #[test]
    fn first_slot_reward_is_payload_term_only_for_window_two() {
        let mut env = Env::grid(small_config()).unwrap();
        env.reset(11).unwrap();
        let r = env.step(&env.action_space().baseline()).unwrap();
        assert!(r.info.psi.iter().all(|&p| !p));
        let expected = -r.info.remaining_fraction.iter().sum::<f64>() / 4.0;
        assert_eq!(r.reward, expected);
    }

    #[test]
    fn minimum_power_without_reuse_matches_interference_free_sinr() {
        // One pair, parked on channel 0; every other channel is interference free.
        let config = ScenarioConfig {
            n_v2v_links: Some(1),
            ..small_config()
        };
        let mut env = Env::grid(config).unwrap();
        env.reset(5).unwrap();
        let action = env.action_space().baseline();
        let gains = env.realization(&action.ris_phases).unwrap();
        let r = env.step(&action).unwrap();
        let radio = env.radio();
        for v in 1..4 {
            let free = radio.v2i_power_w * gains.composite_v2i[v].norm_sqr() / radio.noise_comm_w;
            assert_eq!(r.info.metrics.sinr_v2i[v], free);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let mut env = Env::grid(small_config()).unwrap();
            env.reset(99).unwrap();
            let mut rng = stream(1, Stream::Policy);
            let mut rewards = vec![];
            while !env.is_done() {
                let a = env.action_space().sample(&mut rng);
                rewards.push(env.step(&a).unwrap().reward);
            }
            rewards
        };
        assert_eq!(run(), run());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn preview_equals_step_reward_and_stays_bounded(seed in 0u64..1000, policy_seed in 0u64..1000) {
            let mut env = Env::grid(small_config()).unwrap();
            env.reset(seed).unwrap();
            let mut rng = stream(policy_seed, Stream::Policy);
            while !env.is_done() {
                let a = env.action_space().sample(&mut rng);
                let preview = env.preview_reward(&a).unwrap();
                let r = env.step(&a).unwrap();
                prop_assert_eq!(preview.to_bits(), r.reward.to_bits());
                prop_assert!((-1.0..=4.0).contains(&r.reward));
            }
        }
    }
}
