use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scenario::ScenarioConfig;
use crate::{Error, Result};

/// One slot's decision: the V2I channel each V2V pair reuses, each pair's
/// power level, and the RIS phase index of every element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Action {
    pub channels: Vec<usize>,
    pub power_levels: Vec<usize>,
    pub ris_phases: Vec<usize>,
}

/// Sizes of the discrete action space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    pub pairs: usize,
    pub channels: usize,
    pub power_levels: usize,
    pub elements: usize,
    pub phase_levels: usize,
}

/// Maps `x ∈ [-1, 1]` onto `{0..n-1}`, rounding half away from zero.
fn to_index(x: f64, n: usize) -> usize {
    let scaled = (x.clamp(-1.0, 1.0) + 1.0) / 2.0 * (n - 1) as f64;
    (scaled.round() as usize).min(n - 1)
}

impl ActionSpace {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        ActionSpace {
            pairs: config.n_pairs(),
            channels: config.n_vehicles,
            power_levels: config.v2v_power_levels.len(),
            elements: config.ris_elements,
            phase_levels: config.phase_levels,
        }
    }

    /// Raw action length: `D` channel + `D` power + `F` phase coordinates.
    pub fn raw_dim(&self) -> usize {
        2 * self.pairs + self.elements
    }

    /// Moves any pair whose channel is already taken by a lower-index pair to
    /// the lowest free channel.
    pub fn resolve_collisions(&self, channels: &mut [usize]) {
        let mut taken = alloc::vec![false; self.channels];
        for ch in channels.iter_mut() {
            if taken[*ch] {
                // D <= V guarantees a free channel.
                *ch = taken.iter().position(|&t| !t).expect("a free channel");
            }
            taken[*ch] = true;
        }
    }

    /// Decodes a continuous action in `[-1, 1]^dim`; values outside the box
    /// are clamped.
    pub fn decode(&self, raw: &[f64]) -> Result<Action> {
        if raw.len() != self.raw_dim() {
            return Err(Error::LengthMismatch {
                expected: self.raw_dim(),
                actual: raw.len(),
            });
        }
        if let Some(x) = raw.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidAction(format!("non-finite raw value {x}")));
        }
        let (chan, rest) = raw.split_at(self.pairs);
        let (power, phase) = rest.split_at(self.pairs);
        let mut channels: Vec<usize> = chan.iter().map(|&x| to_index(x, self.channels)).collect();
        self.resolve_collisions(&mut channels);
        Ok(Action {
            channels,
            power_levels: power.iter().map(|&x| to_index(x, self.power_levels)).collect(),
            ris_phases: phase.iter().map(|&x| to_index(x, self.phase_levels)).collect(),
        })
    }

    /// Checks binary reuse with one channel per pair, at most one pair per
    /// channel, power levels from the list and phases from the quantised set.
    pub fn validate(&self, action: &Action) -> Result<()> {
        let lens = [
            (action.channels.len(), self.pairs, "channels"),
            (action.power_levels.len(), self.pairs, "power_levels"),
            (action.ris_phases.len(), self.elements, "ris_phases"),
        ];
        for (got, want, what) in lens {
            if got != want {
                return Err(Error::InvalidAction(format!("{what}: expected {want} entries, got {got}")));
            }
        }
        let mut taken = alloc::vec![false; self.channels];
        for (d, &ch) in action.channels.iter().enumerate() {
            if ch >= self.channels {
                return Err(Error::InvalidAction(format!("pair {d}: channel {ch} out of range")));
            }
            if taken[ch] {
                return Err(Error::InvalidAction(format!("channel {ch} reused by more than one pair")));
            }
            taken[ch] = true;
        }
        if let Some(&l) = action.power_levels.iter().find(|&&l| l >= self.power_levels) {
            return Err(Error::InvalidAction(format!("power level {l} out of range")));
        }
        if let Some(&q) = action.ris_phases.iter().find(|&&q| q >= self.phase_levels) {
            return Err(Error::InvalidAction(format!("phase index {q} out of range")));
        }
        Ok(())
    }

    /// Uniform draw over each discrete range, channel collisions resolved as in
    /// [`decode`](Self::decode).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let mut channels: Vec<usize> = (0..self.pairs).map(|_| rng.random_range(0..self.channels)).collect();
        self.resolve_collisions(&mut channels);
        Action {
            channels,
            power_levels: (0..self.pairs).map(|_| rng.random_range(0..self.power_levels)).collect(),
            ris_phases: self.sample_phases(rng),
        }
    }

    pub fn sample_phases<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        (0..self.elements).map(|_| rng.random_range(0..self.phase_levels)).collect()
    }

    /// Pair `d` on channel `d`, every power and phase index at 0.
    pub fn baseline(&self) -> Action {
        Action {
            channels: (0..self.pairs).collect(),
            power_levels: alloc::vec![0; self.pairs],
            ris_phases: alloc::vec![0; self.elements],
        }
    }
}
