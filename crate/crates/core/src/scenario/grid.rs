//! Manhattan road grid and vehicle mobility on it.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::channel::{distance, Position};
use crate::rng::{stream, SimRng, Stream};
use crate::{Error, Result};

pub const ROADS_PER_AXIS: usize = 3;
pub const LANES_PER_DIRECTION: usize = 2;
pub const LANE_WIDTH_M: f64 = 4.0;
pub const ANTENNA_HEIGHT_M: f64 = 1.5;

const STRAIGHT_PROBABILITY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Road runs along x.
    Horizontal,
    /// Road runs along y.
    Vertical,
}

/// Where a vehicle sits on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaneState {
    pub axis: Axis,
    pub road: usize,
    pub lane: usize,
    /// Travelling toward increasing coordinate.
    pub forward: bool,
    /// Coordinate along the road.
    pub along: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: usize,
    pub position: Position,
    pub velocity: [f64; 2],
    pub speed: f64,
    pub is_target: bool,
    /// Receiver of the V2V link this vehicle transmits on, if any.
    pub v2v_peer: Option<usize>,
    /// `None` for trajectory playback.
    pub lane: Option<LaneState>,
}

/// Three roads per axis, evenly spaced; each road carries
/// [`LANES_PER_DIRECTION`] lanes per travel direction on the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadGrid {
    pub width: f64,
    pub height: f64,
    /// x coordinates of the vertical roads.
    pub vertical_roads: [f64; ROADS_PER_AXIS],
    /// y coordinates of the horizontal roads.
    pub horizontal_roads: [f64; ROADS_PER_AXIS],
}

fn evenly_spaced(extent: f64) -> [f64; ROADS_PER_AXIS] {
    core::array::from_fn(|i| extent * (i + 1) as f64 / (ROADS_PER_AXIS + 1) as f64)
}

fn lane_offset(lane: usize) -> f64 {
    LANE_WIDTH_M / 2.0 + lane as f64 * LANE_WIDTH_M
}

impl RoadGrid {
    pub fn new(width: f64, height: f64) -> Self {
        RoadGrid {
            width,
            height,
            vertical_roads: evenly_spaced(width),
            horizontal_roads: evenly_spaced(height),
        }
    }

    pub fn from_config(config: &ScenarioConfig) -> Self {
        Self::new(config.region_width_m, config.region_height_m)
    }

    fn road_length(&self, axis: Axis) -> f64 {
        match axis {
            Axis::Horizontal => self.width,
            Axis::Vertical => self.height,
        }
    }

    fn crossings(&self, axis: Axis) -> &[f64; ROADS_PER_AXIS] {
        match axis {
            Axis::Horizontal => &self.vertical_roads,
            Axis::Vertical => &self.horizontal_roads,
        }
    }

    fn road_centre(&self, axis: Axis, road: usize) -> f64 {
        match axis {
            Axis::Horizontal => self.horizontal_roads[road],
            Axis::Vertical => self.vertical_roads[road],
        }
    }

    /// Unit direction of travel.
    pub fn direction(lane: &LaneState) -> [f64; 2] {
        let s = if lane.forward { 1.0 } else { -1.0 };
        match lane.axis {
            Axis::Horizontal => [s, 0.0],
            Axis::Vertical => [0.0, s],
        }
    }

    pub fn position(&self, lane: &LaneState) -> Position {
        let [ux, uy] = Self::direction(lane);
        // Right-hand normal of the direction of travel.
        let (nx, ny) = (uy, -ux);
        let off = lane_offset(lane.lane);
        let centre = self.road_centre(lane.axis, lane.road);
        match lane.axis {
            Axis::Horizontal => [lane.along, centre + off * ny, ANTENNA_HEIGHT_M],
            Axis::Vertical => [centre + off * nx, lane.along, ANTENNA_HEIGHT_M],
        }
    }

    fn random_lane(&self, rng: &mut SimRng) -> LaneState {
        let p_horizontal = self.width / (self.width + self.height);
        let axis = if rng.random::<f64>() < p_horizontal {
            Axis::Horizontal
        } else {
            Axis::Vertical
        };
        LaneState {
            axis,
            road: rng.random_range(0..ROADS_PER_AXIS),
            lane: rng.random_range(0..LANES_PER_DIRECTION),
            forward: rng.random::<bool>(),
            along: rng.random::<f64>() * self.road_length(axis),
        }
    }

    fn turn(&self, lane: &mut LaneState, crossing: usize, left: bool) {
        let [ux, uy] = Self::direction(lane);
        // Left is a counter-clockwise quarter turn.
        let (nx, ny) = if left { (-uy, ux) } else { (uy, -ux) };
        let new_axis = match lane.axis {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        };
        lane.along = self.road_centre(lane.axis, lane.road);
        lane.road = crossing;
        lane.axis = new_axis;
        lane.forward = match new_axis {
            Axis::Horizontal => nx > 0.0,
            Axis::Vertical => ny > 0.0,
        };
    }

    /// Moves one vehicle `remaining` meters along the grid.
    fn advance(&self, lane: &mut LaneState, mut remaining: f64, rng: &mut SimRng) {
        while remaining > 0.0 {
            let sign = if lane.forward { 1.0 } else { -1.0 };
            let next_crossing = self
                .crossings(lane.axis)
                .iter()
                .enumerate()
                .filter(|(_, &c)| (c - lane.along) * sign > 0.0)
                .min_by(|a, b| {
                    let da = (a.1 - lane.along).abs();
                    let db = (b.1 - lane.along).abs();
                    da.total_cmp(&db)
                })
                .map(|(i, &c)| (i, c));
            let boundary = if lane.forward {
                self.road_length(lane.axis)
            } else {
                0.0
            };
            let target = next_crossing.map_or(boundary, |(_, c)| c);
            let gap = (target - lane.along).abs();
            if gap > remaining {
                lane.along += sign * remaining;
                return;
            }
            lane.along = target;
            remaining -= gap;
            match next_crossing {
                Some((crossing, _)) => {
                    let u = rng.random::<f64>();
                    if u >= STRAIGHT_PROBABILITY {
                        let left = u < STRAIGHT_PROBABILITY + (1.0 - STRAIGHT_PROBABILITY) / 2.0;
                        self.turn(lane, crossing, left);
                    }
                }
                None => lane.forward = !lane.forward,
            }
        }
    }

    /// Advances every grid vehicle by `dt` seconds. Vehicles without a lane
    /// (trajectory playback) are left untouched.
    pub fn step(&self, vehicles: &mut [VehicleState], dt: f64, rng: &mut SimRng) {
        if dt <= 0.0 {
            return;
        }
        for v in vehicles.iter_mut() {
            let Some(lane) = v.lane.as_mut() else {
                continue;
            };
            self.advance(lane, v.speed * dt, rng);
            let [ux, uy] = Self::direction(lane);
            v.position = self.position(lane);
            v.velocity = [v.speed * ux, v.speed * uy];
        }
    }
}

/// Index of the nearest other vehicle; ties go to the lower index.
pub fn nearest_neighbour(positions: &[Position], of: usize) -> Option<usize> {
    positions
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != of)
        .map(|(i, &p)| (i, distance(positions[of], p)))
        .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
            Some((_, bd)) if bd <= d => best,
            _ => Some((i, d)),
        })
        .map(|(i, _)| i)
}

/// Flags `n_targets` random vehicles and pairs each of the first
/// `n_pairs` vehicles with its nearest neighbour.
pub(crate) fn assign_roles(
    vehicles: &mut [VehicleState],
    n_targets: usize,
    n_pairs: usize,
    rng: &mut SimRng,
) -> Result<()> {
    for i in index::sample(rng, vehicles.len(), n_targets) {
        vehicles[i].is_target = true;
    }
    let positions: Vec<Position> = vehicles.iter().map(|v| v.position).collect();
    for (tx, vehicle) in vehicles.iter_mut().enumerate().take(n_pairs) {
        vehicle.v2v_peer = Some(nearest_neighbour(&positions, tx).ok_or(Error::NoV2vPeer)?);
    }
    Ok(())
}

/// Places the vehicles on the grid and assigns targets and V2V pairs.
pub fn build_grid_scenario(config: &ScenarioConfig, seed: u64) -> Result<Vec<VehicleState>> {
    config.validate()?;
    let grid = RoadGrid::from_config(config);
    let mut rng = stream(seed, Stream::Scenario);
    let [lo, hi] = config.speed_range;
    let mut vehicles: Vec<VehicleState> = (0..config.n_vehicles)
        .map(|id| {
            let lane = grid.random_lane(&mut rng);
            let speed = if hi > lo { rng.random_range(lo..=hi) } else { lo };
            let [ux, uy] = RoadGrid::direction(&lane);
            VehicleState {
                id,
                position: grid.position(&lane),
                velocity: [speed * ux, speed * uy],
                speed,
                is_target: false,
                v2v_peer: None,
                lane: Some(lane),
            }
        })
        .collect();
    assign_roles(&mut vehicles, config.n_targets, config.n_pairs(), &mut rng)?;
    Ok(vehicles)
}
