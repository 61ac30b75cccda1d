//! Channel gains.
//!
//! Direct links follow a distance power law with log-normal shadowing and
//! Rayleigh small-scale fading. Links through the RIS are modelled per element:
//! each node has a length-F segment vector toward the surface, and the
//! composite gain of a link is the Hermitian form `a^H Θ b + direct`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const DEFAULT_CARRIER_HZ: f64 = 2.0e9;

/// Link classes with their own path-loss exponent and shadowing spread.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkClass {
    V2i,
    V2v,
    Sense,
    /// Any node to/from the RIS.
    Ris,
}

/// One value per [`LinkClass`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerClass {
    pub v2i: f64,
    pub v2v: f64,
    pub sense: f64,
    pub ris: f64,
}

impl PerClass {
    pub fn get(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::V2i => self.v2i,
            LinkClass::V2v => self.v2v,
            LinkClass::Sense => self.sense,
            LinkClass::Ris => self.ris,
        }
    }
}

/// Large-scale propagation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LargeScaleParams {
    /// Linear power gain at the 1 m reference distance.
    pub pathloss_const: f64,
    pub shadow_sigma_db: PerClass,
    pub exponent_by_class: PerClass,
    pub wavelength_m: f64,
    pub element_spacing_m: f64,
}

impl Default for LargeScaleParams {
    fn default() -> Self {
        let wavelength = SPEED_OF_LIGHT / DEFAULT_CARRIER_HZ;
        LargeScaleParams {
            pathloss_const: 1e-3,
            shadow_sigma_db: PerClass {
                v2i: 8.0,
                v2v: 3.0,
                sense: 8.0,
                ris: 3.0,
            },
            exponent_by_class: PerClass {
                v2i: 3.0,
                v2v: 3.68,
                sense: 3.0,
                ris: 2.2,
            },
            wavelength_m: wavelength,
            element_spacing_m: wavelength / 2.0,
        }
    }
}

impl LargeScaleParams {
    pub fn validate(&self) -> Result<()> {
        let e = &self.exponent_by_class;
        if !(e.v2i > 0.0 && e.v2v > 0.0 && e.sense > 0.0 && e.ris > 0.0) {
            return Err(Error::config("exponent_by_class", "all exponents must be > 0"));
        }
        let s = &self.shadow_sigma_db;
        if !(s.v2i >= 0.0 && s.v2v >= 0.0 && s.sense >= 0.0 && s.ris >= 0.0) {
            return Err(Error::config("shadow_sigma_db", "must be >= 0"));
        }
        if !(self.pathloss_const > 0.0 && self.pathloss_const.is_finite()) {
            return Err(Error::config("pathloss_const", "must be > 0"));
        }
        if !(self.wavelength_m > 0.0 && self.wavelength_m.is_finite()) {
            return Err(Error::config("wavelength_m", "must be > 0"));
        }
        if !(self.element_spacing_m > 0.0 && self.element_spacing_m.is_finite()) {
            return Err(Error::config("element_spacing_m", "must be > 0"));
        }
        Ok(())
    }

    /// Amplitude `sqrt(ρ · β · d^-η)` for distance `d` and a shadowing draw in dB.
    pub fn amplitude(&self, class: LinkClass, distance: f64, shadow_db: f64) -> f64 {
        let shadow = 10f64.powf(shadow_db / 10.0);
        let eta = self.exponent_by_class.get(class);
        (self.pathloss_const * shadow * distance.powf(-eta)).sqrt()
    }
}

pub type Position = [f64; 3];

/// Node identity, used to tell a self-pair apart from two distinct nodes that
/// merely share a position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeId {
    Bs,
    Ris,
    Vehicle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub position: Position,
}

pub fn distance(a: Position, b: Position) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Small-scale fading coefficient with `|h|² ~ Exp(1)` and uniform phase.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let power: f64 = Exp1.sample(rng);
    let phase = rng.random::<f64>() * 2.0 * PI;
    Complex64::from_polar(power.sqrt(), phase)
}

/// Direct link gain; exactly zero for a node paired with itself.
pub fn direct_gain(
    tx: &Node,
    rx: &Node,
    class: LinkClass,
    params: &LargeScaleParams,
    shadow_db: f64,
    fading: Complex64,
) -> Result<Complex64> {
    if tx.id == rx.id {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let d = distance(tx.position, rx.position);
    if d == 0.0 {
        return Err(Error::CoincidentNodes);
    }
    Ok(fading * params.amplitude(class, d, shadow_db))
}

/// Uniform linear array response; element `f` is `exp(-j·2π·(d_e/λ)·f·sin θ)`.
pub fn array_response(theta: f64, elements: usize, wavelength: f64, spacing: f64) -> Vec<Complex64> {
    let step = -2.0 * PI * (spacing / wavelength) * theta.sin();
    (0..elements)
        .map(|f| {
            if f == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, step * f as f64)
            }
        })
        .collect()
}

/// Azimuth of `node` as seen from the RIS, measured from the surface normal.
///
/// The surface faces `-y`, toward the interior of the region.
pub fn ris_angle(node: Position, ris: Position) -> f64 {
    let dx = node[0] - ris[0];
    let dy = node[1] - ris[1];
    dx.atan2(-dy)
}

/// Per-element gain between a node and the RIS.
pub fn ris_segment_gain(
    node: Position,
    ris: Position,
    elements: usize,
    params: &LargeScaleParams,
    shadow_db: f64,
) -> Result<Vec<Complex64>> {
    let d = distance(node, ris);
    if d == 0.0 {
        return Err(Error::CoincidentNodes);
    }
    let amplitude = params.amplitude(LinkClass::Ris, d, shadow_db);
    let carrier = Complex64::from_polar(amplitude, -2.0 * PI * d / params.wavelength_m);
    let response = array_response(
        ris_angle(node, ris),
        elements,
        params.wavelength_m,
        params.element_spacing_m,
    );
    Ok(response.into_iter().map(|a| carrier * a).collect())
}

/// Per-element amplitudes and quantised phase indices of the surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RisState {
    pub amplitudes: Vec<f64>,
    pub phase_indices: Vec<usize>,
}

impl RisState {
    pub fn uniform(amplitude: f64, phase_indices: Vec<usize>) -> Self {
        RisState {
            amplitudes: alloc::vec![amplitude; phase_indices.len()],
            phase_indices,
        }
    }
}

/// Phase of quantisation level `index` out of `levels`.
pub fn phase_angle(index: usize, levels: usize) -> f64 {
    2.0 * PI * index as f64 / levels as f64
}

/// Diagonal of the reflection matrix: `β_f · exp(j·2π·index_f/Q)`.
pub fn reflection_matrix(state: &RisState, levels: usize) -> Result<Vec<Complex64>> {
    if state.amplitudes.len() != state.phase_indices.len() {
        return Err(Error::LengthMismatch {
            expected: state.phase_indices.len(),
            actual: state.amplitudes.len(),
        });
    }
    state
        .phase_indices
        .iter()
        .zip(&state.amplitudes)
        .map(|(&index, &beta)| {
            if index >= levels {
                return Err(Error::PhaseIndex { index, levels });
            }
            Ok(Complex64::from_polar(1.0, phase_angle(index, levels)) * beta)
        })
        .collect()
}

/// `Σ_f conj(left[f]) · reflection[f] · right[f] + direct`.
fn hermitian_form(
    left: &[Complex64],
    reflection: &[Complex64],
    right: &[Complex64],
    direct: Complex64,
) -> Result<Complex64> {
    let n = reflection.len();
    for len in [left.len(), right.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let reflected: Complex64 = left
        .iter()
        .zip(reflection)
        .zip(right)
        .map(|((l, t), r)| l.conj() * t * r)
        .sum();
    Ok(reflected + direct)
}

/// `(g_{R,v})^H Θ g_{B,R} + g_{B,v}`.
pub fn composite_v2i_gain(
    ris_to_vehicle: &[Complex64],
    reflection: &[Complex64],
    bs_to_ris: &[Complex64],
    bs_to_vehicle: Complex64,
) -> Result<Complex64> {
    hermitian_form(ris_to_vehicle, reflection, bs_to_ris, bs_to_vehicle)
}

/// `(g_{R,B})^H Θ g_{d,R} + g_{d,B}`, with the BS as the receiving endpoint.
pub fn composite_v2v_gain(
    ris_to_bs: &[Complex64],
    reflection: &[Complex64],
    tx_to_ris: &[Complex64],
    tx_to_bs: Complex64,
) -> Result<Complex64> {
    hermitian_form(ris_to_bs, reflection, tx_to_ris, tx_to_bs)
}

/// Echo gain `h·h^H` with `h = (g_{B,R})^H Θ g_{R,j} + g_{B,j}`; real and nonnegative.
pub fn echo_gain(
    bs_to_ris: &[Complex64],
    reflection: &[Complex64],
    ris_to_target: &[Complex64],
    bs_to_target: Complex64,
) -> Result<Complex64> {
    let h = hermitian_form(bs_to_ris, reflection, ris_to_target, bs_to_target)?;
    Ok(Complex64::new(h.norm_sqr(), 0.0))
}

/// Random draws behind one slot's channels.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDraw {
    pub shadow_db: f64,
    pub fading: Complex64,
}

impl LinkDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> Self {
        let shadow_db = sigma_db * sample_standard_normal(rng);
        LinkDraw {
            shadow_db,
            fading: sample_fading(rng),
        }
    }
}

fn sample_standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rand_distr::StandardNormal.sample(rng)
}

/// Everything about one slot's channels that does not depend on the RIS phases.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    /// `g_{B,v}` per vehicle.
    pub bs_to_vehicle: Vec<Complex64>,
    /// `g_{d,B}` per V2V pair (transmitter to BS).
    pub pair_to_bs: Vec<Complex64>,
    /// `g_{B,j}` per target.
    pub bs_to_target: Vec<Complex64>,
    /// `g_{B,R}`, also used as `g_{R,B}`.
    pub bs_ris: Vec<Complex64>,
    /// Segment vector per vehicle, used both ways.
    pub vehicle_ris: Vec<Vec<Complex64>>,
}

/// Geometry and draws needed to build a [`ChannelState`].
pub struct SlotGeometry<'a> {
    pub bs: Position,
    pub ris: Position,
    pub vehicles: &'a [Position],
    /// Transmitting vehicle of each V2V pair.
    pub pair_tx: &'a [usize],
    /// Vehicle index of each sensing target.
    pub targets: &'a [usize],
    pub elements: usize,
}

impl ChannelState {
    /// Draws a fresh slot. The draw order is fixed: V2I, V2V, sensing, then
    /// RIS segments (BS first, then vehicles).
    pub fn sample<R: Rng + ?Sized>(
        geometry: &SlotGeometry<'_>,
        params: &LargeScaleParams,
        rng: &mut R,
    ) -> Result<Self> {
        let sigma = &params.shadow_sigma_db;
        let bs = Node {
            id: NodeId::Bs,
            position: geometry.bs,
        };
        let vehicle = |i: usize| Node {
            id: NodeId::Vehicle(i),
            position: geometry.vehicles[i],
        };

        let mut bs_to_vehicle = Vec::with_capacity(geometry.vehicles.len());
        for v in 0..geometry.vehicles.len() {
            let draw = LinkDraw::sample(rng, sigma.v2i);
            bs_to_vehicle.push(direct_gain(
                &bs,
                &vehicle(v),
                LinkClass::V2i,
                params,
                draw.shadow_db,
                draw.fading,
            )?);
        }
        let mut pair_to_bs = Vec::with_capacity(geometry.pair_tx.len());
        for &tx in geometry.pair_tx {
            let draw = LinkDraw::sample(rng, sigma.v2v);
            pair_to_bs.push(direct_gain(
                &vehicle(tx),
                &bs,
                LinkClass::V2v,
                params,
                draw.shadow_db,
                draw.fading,
            )?);
        }
        let mut bs_to_target = Vec::with_capacity(geometry.targets.len());
        for &j in geometry.targets {
            let draw = LinkDraw::sample(rng, sigma.sense);
            bs_to_target.push(direct_gain(
                &bs,
                &vehicle(j),
                LinkClass::Sense,
                params,
                draw.shadow_db,
                draw.fading,
            )?);
        }
        let bs_shadow = sigma.ris * sample_standard_normal(rng);
        let bs_ris = ris_segment_gain(geometry.bs, geometry.ris, geometry.elements, params, bs_shadow)?;
        let mut vehicle_ris = Vec::with_capacity(geometry.vehicles.len());
        for &position in geometry.vehicles {
            let shadow = sigma.ris * sample_standard_normal(rng);
            vehicle_ris.push(ris_segment_gain(
                position,
                geometry.ris,
                geometry.elements,
                params,
                shadow,
            )?);
        }
        Ok(ChannelState {
            bs_to_vehicle,
            pair_to_bs,
            bs_to_target,
            bs_ris,
            vehicle_ris,
        })
    }
}

/// One slot's effective gains for a given reflection configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `g_v` per vehicle (V2I channel `v` belongs to vehicle `v`).
    pub composite_v2i: Vec<Complex64>,
    /// `g_d` per V2V pair.
    pub composite_v2v: Vec<Complex64>,
    /// `g_j` per target (real, nonnegative).
    pub echo: Vec<Complex64>,
}

impl ChannelRealization {
    /// Combines the slot's draws with a reflection diagonal. `None` bypasses
    /// the RIS entirely and returns the direct gains.
    pub fn compute(
        state: &ChannelState,
        reflection: Option<&[Complex64]>,
        pair_tx: &[usize],
        targets: &[usize],
    ) -> Result<Self> {
        let Some(theta) = reflection else {
            return Ok(ChannelRealization {
                composite_v2i: state.bs_to_vehicle.clone(),
                composite_v2v: state.pair_to_bs.clone(),
                echo: state
                    .bs_to_target
                    .iter()
                    .map(|h| Complex64::new(h.norm_sqr(), 0.0))
                    .collect(),
            });
        };
        let composite_v2i = state
            .bs_to_vehicle
            .iter()
            .zip(&state.vehicle_ris)
            .map(|(&direct, seg)| composite_v2i_gain(seg, theta, &state.bs_ris, direct))
            .collect::<Result<Vec<_>>>()?;
        let composite_v2v = state
            .pair_to_bs
            .iter()
            .zip(pair_tx)
            .map(|(&direct, &tx)| composite_v2v_gain(&state.bs_ris, theta, &state.vehicle_ris[tx], direct))
            .collect::<Result<Vec<_>>>()?;
        let echo = state
            .bs_to_target
            .iter()
            .zip(targets)
            .map(|(&direct, &j)| echo_gain(&state.bs_ris, theta, &state.vehicle_ris[j], direct))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelRealization {
            composite_v2i,
            composite_v2v,
            echo,
        })
    }
}
