//! SINR, achievable rates, sensing SNR and threshold checks.

use alloc::vec::Vec;

#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::scenario::RadioParams;
use crate::{Error, Result};

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watt_to_dbm(watt: f64) -> f64 {
    10.0 * watt.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// V2V channel reuse and transmit powers for one slot.
///
/// `channels[d]` is the V2I channel reused by pair `d`, i.e. `c_{v,d} = 1`
/// iff `channels[d] == v`.
#[derive(Debug, Clone, Copy)]
pub struct Allocation<'a> {
    pub channels: &'a [usize],
    pub powers_w: &'a [f64],
}

impl Allocation<'_> {
    fn check(&self) -> Result<()> {
        if self.channels.len() != self.powers_w.len() {
            return Err(Error::LengthMismatch {
                expected: self.channels.len(),
                actual: self.powers_w.len(),
            });
        }
        match self.powers_w.iter().find(|&&p| p < 0.0) {
            Some(&p) => Err(Error::NegativePower(p)),
            None => Ok(()),
        }
    }
}

fn check_power(p: f64) -> Result<()> {
    if p < 0.0 {
        Err(Error::NegativePower(p))
    } else {
        Ok(())
    }
}

/// Co-channel V2V power received on channel `v`, skipping pair `skip`.
fn v2v_interference(v: usize, gains: &ChannelRealization, alloc: &Allocation<'_>, skip: Option<usize>) -> f64 {
    alloc
        .channels
        .iter()
        .zip(alloc.powers_w)
        .zip(&gains.composite_v2v)
        .enumerate()
        .filter(|&(d, ((&ch, _), _))| ch == v && Some(d) != skip)
        .map(|(_, ((_, &p), g))| p * g.norm_sqr())
        .sum()
}

/// `P_v|g_v|² / (Σ_d c_{v,d} p_d |g_d|² + σ²)`.
pub fn sinr_v2i(
    v: usize,
    gains: &ChannelRealization,
    alloc: &Allocation<'_>,
    v2i_power_w: f64,
    noise_w: f64,
) -> Result<f64> {
    alloc.check()?;
    check_power(v2i_power_w)?;
    let signal = v2i_power_w * gains.composite_v2i[v].norm_sqr();
    Ok(signal / (v2v_interference(v, gains, alloc, None) + noise_w))
}

/// Interference (excluding noise) seen by pair `d` on its reused channel.
pub fn v2v_interference_w(
    d: usize,
    gains: &ChannelRealization,
    alloc: &Allocation<'_>,
    v2i_power_w: f64,
) -> f64 {
    let v = alloc.channels[d];
    v2v_interference(v, gains, alloc, Some(d)) + v2i_power_w * gains.composite_v2i[v].norm_sqr()
}

/// `p_d|g_d|² / (Σ_{d'≠d} c_{v,d'} p_{d'} |g_{d'}|² + P_v|g_v|² + σ²)` on the
/// pair's channel `v`.
pub fn sinr_v2v(
    d: usize,
    gains: &ChannelRealization,
    alloc: &Allocation<'_>,
    v2i_power_w: f64,
    noise_w: f64,
) -> Result<f64> {
    alloc.check()?;
    check_power(v2i_power_w)?;
    let signal = alloc.powers_w[d] * gains.composite_v2v[d].norm_sqr();
    Ok(signal / (v2v_interference_w(d, gains, alloc, v2i_power_w) + noise_w))
}

/// Shannon spectral efficiency in bps/Hz.
pub fn spectral_efficiency(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Achievable rate `W·log2(1 + SINR)` in bps.
pub fn rate(sinr: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * spectral_efficiency(sinr)
}

/// `P_j·(g_j)²/σ²`, where `g_j` is already the echo power gain `|h|²`.
pub fn sensing_snr(echo: f64, sensing_power_w: f64, noise_w: f64) -> f64 {
    sensing_power_w * echo * echo / noise_w
}

/// Per-slot link quality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotLinkMetrics {
    pub sinr_v2i: Vec<f64>,
    /// bps/Hz.
    pub se_v2i: Vec<f64>,
    /// bps.
    pub rate_v2i: Vec<f64>,
    pub sinr_v2v: Vec<f64>,
    pub se_v2v: Vec<f64>,
    pub rate_v2v: Vec<f64>,
    pub snr_sense: Vec<f64>,
    /// Interference power at each V2V receiver, watts.
    pub interference_v2v_w: Vec<f64>,
}

impl SlotLinkMetrics {
    pub fn compute(gains: &ChannelRealization, alloc: &Allocation<'_>, radio: &RadioParams) -> Result<Self> {
        alloc.check()?;
        let n_vehicles = gains.composite_v2i.len();
        let sinr_v2i = (0..n_vehicles)
            .map(|v| sinr_v2i(v, gains, alloc, radio.v2i_power_w, radio.noise_comm_w))
            .collect::<Result<Vec<_>>>()?;
        let sinr_v2v = (0..alloc.channels.len())
            .map(|d| sinr_v2v(d, gains, alloc, radio.v2i_power_w, radio.noise_comm_w))
            .collect::<Result<Vec<_>>>()?;
        let interference_v2v_w = (0..alloc.channels.len())
            .map(|d| v2v_interference_w(d, gains, alloc, radio.v2i_power_w))
            .collect();
        let se_v2i: Vec<f64> = sinr_v2i.iter().map(|&s| spectral_efficiency(s)).collect();
        let se_v2v: Vec<f64> = sinr_v2v.iter().map(|&s| spectral_efficiency(s)).collect();
        Ok(SlotLinkMetrics {
            rate_v2i: se_v2i.iter().map(|se| radio.bandwidth_hz * se).collect(),
            rate_v2v: se_v2v.iter().map(|se| radio.bandwidth_hz * se).collect(),
            sinr_v2i,
            se_v2i,
            sinr_v2v,
            se_v2v,
            snr_sense: gains
                .echo
                .iter()
                .map(|e| sensing_snr(e.re, radio.sensing_power_w, radio.noise_sense_w))
                .collect(),
            interference_v2v_w,
        })
    }
}

/// Threshold outcomes for one slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    /// Rate test per vehicle.
    pub vehicle: Vec<bool>,
    /// Rate and sensing-SNR test per target.
    pub target: Vec<bool>,
}

/// `targets[j]` is the vehicle index of target `j`; its rate test is the
/// vehicle's own V2I rate. Both comparisons are inclusive.
pub fn meets_thresholds(
    metrics: &SlotLinkMetrics,
    targets: &[usize],
    rate_threshold: f64,
    snr_threshold_linear: f64,
) -> ThresholdOutcome {
    let vehicle: Vec<bool> = metrics.se_v2i.iter().map(|&se| se >= rate_threshold).collect();
    let target = targets
        .iter()
        .zip(&metrics.snr_sense)
        .map(|(&v, &snr)| vehicle[v] && snr >= snr_threshold_linear)
        .collect();
    ThresholdOutcome { vehicle, target }
}
