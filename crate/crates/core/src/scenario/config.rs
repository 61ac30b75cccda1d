use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::channel::{LargeScaleParams, Position};
use crate::radio::{db_to_linear, dbm_to_watt};
use crate::{Error, Result};

/// Bits in one payload unit; payload sweeps are expressed in multiples of it.
pub const PAYLOAD_UNIT_BITS: f64 = 1060.0;

/// Every physical and experiment parameter of a scenario.
///
/// Powers are in dBm, thresholds in bps/Hz and dB, distances in meters and
/// durations in seconds. Unknown fields are rejected when deserialising.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub region_width_m: f64,
    pub region_height_m: f64,
    pub n_vehicles: usize,
    pub n_targets: usize,
    /// Number of V2V links; `None` means one per vehicle.
    pub n_v2v_links: Option<usize>,
    pub bs_position: Position,
    pub ris_position: Position,
    pub speed_range: [f64; 2],
    pub slot_duration: f64,
    pub episode_slots: usize,
    /// V2V payload per pair, in bits.
    pub payload: f64,
    /// Sliding window length, in slots.
    pub window: usize,
    pub v2i_power: f64,
    pub sensing_power: f64,
    pub v2v_power_levels: Vec<f64>,
    pub v2v_power_min: f64,
    pub v2v_power_max: f64,
    pub rate_threshold: f64,
    pub snr_threshold: f64,
    pub noise_comm: f64,
    pub noise_sense: f64,
    pub bandwidth: f64,
    pub ris_elements: usize,
    pub phase_levels: usize,
    /// Reflection amplitude applied to every element.
    pub ris_amplitude: f64,
    /// When false the RIS path is dropped and composite gains are the direct gains.
    pub ris_enabled: bool,
    pub seed: u64,
    pub channel: LargeScaleParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            region_width_m: 650.0,
            region_height_m: 450.0,
            n_vehicles: 12,
            n_targets: 2,
            n_v2v_links: None,
            bs_position: [180.0, 270.0, 25.0],
            ris_position: [290.0, 380.0, 25.0],
            speed_range: [10.0, 15.0],
            slot_duration: 1e-3,
            episode_slots: 100,
            payload: 8.0 * PAYLOAD_UNIT_BITS,
            window: 3,
            v2i_power: 23.0,
            sensing_power: 23.0,
            v2v_power_levels: (1..=23).map(f64::from).collect(),
            v2v_power_min: 1.0,
            v2v_power_max: 23.0,
            rate_threshold: 3.0,
            snr_threshold: 10.0,
            noise_comm: -114.0,
            noise_sense: -114.0,
            bandwidth: 1e6,
            ris_elements: 12,
            phase_levels: 8,
            ris_amplitude: 1.0,
            ris_enabled: true,
            seed: 12345,
            channel: LargeScaleParams::default(),
        }
    }
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, format!("must be a positive finite number, got {value}")))
    }
}

fn finite(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::config(field, "must be finite"))
    }
}

impl ScenarioConfig {
    pub fn n_pairs(&self) -> usize {
        self.n_v2v_links.unwrap_or(self.n_vehicles)
    }

    pub fn validate(&self) -> Result<()> {
        positive("region_width_m", self.region_width_m)?;
        positive("region_height_m", self.region_height_m)?;
        if self.n_vehicles == 0 {
            return Err(Error::config("n_vehicles", "need at least one vehicle"));
        }
        if self.n_targets > self.n_vehicles {
            return Err(Error::config("n_targets", "more targets than vehicles"));
        }
        let pairs = self.n_pairs();
        if pairs == 0 {
            return Err(Error::config("n_v2v_links", "need at least one V2V link"));
        }
        if pairs > self.n_vehicles {
            return Err(Error::config(
                "n_v2v_links",
                "more V2V links than V2I channels to reuse",
            ));
        }
        for p in self.bs_position.iter().chain(&self.ris_position) {
            finite("bs_position/ris_position", *p)?;
        }
        let [lo, hi] = self.speed_range;
        if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::config("speed_range", "need 0 <= min <= max"));
        }
        positive("slot_duration", self.slot_duration)?;
        if self.window == 0 {
            return Err(Error::config("window", "must be >= 1"));
        }
        if self.episode_slots < self.window {
            return Err(Error::config("episode_slots", "must be >= window"));
        }
        positive("payload", self.payload)?;
        finite("v2i_power", self.v2i_power)?;
        finite("sensing_power", self.sensing_power)?;
        finite("v2v_power_min", self.v2v_power_min)?;
        finite("v2v_power_max", self.v2v_power_max)?;
        if self.v2v_power_min > self.v2v_power_max {
            return Err(Error::config("v2v_power_min", "exceeds v2v_power_max"));
        }
        if self.v2v_power_levels.is_empty() {
            return Err(Error::config("v2v_power_levels", "empty"));
        }
        for &level in &self.v2v_power_levels {
            if !(level >= self.v2v_power_min && level <= self.v2v_power_max) {
                return Err(Error::config(
                    "v2v_power_levels",
                    format!(
                        "{level} dBm outside [{}, {}]",
                        self.v2v_power_min, self.v2v_power_max
                    ),
                ));
            }
        }
        finite("rate_threshold", self.rate_threshold)?;
        finite("snr_threshold", self.snr_threshold)?;
        finite("noise_comm", self.noise_comm)?;
        finite("noise_sense", self.noise_sense)?;
        positive("bandwidth", self.bandwidth)?;
        if self.ris_elements == 0 {
            return Err(Error::config("ris_elements", "must be >= 1"));
        }
        if self.phase_levels < 2 {
            return Err(Error::config("phase_levels", "must be >= 2"));
        }
        if !(0.0..=1.0).contains(&self.ris_amplitude) {
            return Err(Error::config("ris_amplitude", "must lie in [0, 1]"));
        }
        self.channel.validate()
    }

    /// Length of the raw continuous action vector.
    pub fn action_dim(&self) -> usize {
        2 * self.n_pairs() + self.ris_elements
    }
}

/// Linear-unit view of the radio parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    pub v2i_power_w: f64,
    pub sensing_power_w: f64,
    pub v2v_power_w: Vec<f64>,
    pub noise_comm_w: f64,
    pub noise_sense_w: f64,
    pub bandwidth_hz: f64,
    pub rate_threshold: f64,
    pub snr_threshold_linear: f64,
}

impl RadioParams {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        RadioParams {
            v2i_power_w: dbm_to_watt(config.v2i_power),
            sensing_power_w: dbm_to_watt(config.sensing_power),
            v2v_power_w: config.v2v_power_levels.iter().map(|&p| dbm_to_watt(p)).collect(),
            noise_comm_w: dbm_to_watt(config.noise_comm),
            noise_sense_w: dbm_to_watt(config.noise_sense),
            bandwidth_hz: config.bandwidth,
            rate_threshold: config.rate_threshold,
            snr_threshold_linear: db_to_linear(config.snr_threshold),
        }
    }
}
