//! Trajectory CSV files: `vehicle_id,timestamp_s,x_m,y_m`, one row per
//! sample, rows of one vehicle in increasing time order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use risv2x_core::rng::{stream, Stream};
use risv2x_core::scenario::{build_grid_scenario, RoadGrid, ScenarioConfig, TimedPoint, Trajectory, TrajectorySet};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const TRAJECTORY_HEADER: [&str; 4] = ["vehicle_id", "timestamp_s", "x_m", "y_m"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Row {
    vehicle_id: u64,
    timestamp_s: f64,
    x_m: f64,
    y_m: f64,
}

/// Parses trajectory CSV text. Rows are grouped per vehicle; the set is
/// ordered by vehicle id.
pub fn read_trajectories<R: Read>(reader: R, path: &Path) -> Result<TrajectorySet> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = csv.headers().map_err(|e| HarnessError::csv(path, e))?;
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "header must be `{}`, found `{}`",
                TRAJECTORY_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut by_vehicle: BTreeMap<u64, Vec<TimedPoint>> = BTreeMap::new();
    for row in csv.deserialize::<Row>() {
        let row = row.map_err(|e| HarnessError::csv(path, e))?;
        if ![row.timestamp_s, row.x_m, row.y_m].iter().all(|v| v.is_finite()) {
            return Err(HarnessError::Parse {
                path: path.to_path_buf(),
                message: format!("non-finite value for vehicle {}", row.vehicle_id),
            });
        }
        by_vehicle.entry(row.vehicle_id).or_default().push(TimedPoint {
            t: row.timestamp_s,
            x: row.x_m,
            y: row.y_m,
        });
    }
    let trajectories = by_vehicle
        .into_iter()
        .map(|(vehicle_id, points)| Trajectory { vehicle_id, points })
        .collect();
    Ok(TrajectorySet::new(trajectories)?)
}

/// Loads a CSV, maps its bounding box onto the scenario region and
/// resamples every trajectory at the slot duration.
pub fn load_trajectories(path: &Path, config: &ScenarioConfig) -> Result<TrajectorySet> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut set = read_trajectories(file, path)?;
    set.rescale_to_region(config.region_width_m, config.region_height_m);
    set.resample(config.slot_duration);
    Ok(set)
}

pub fn write_trajectories<W: Write>(set: &TrajectorySet, writer: W) -> csv::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for tr in &set.trajectories {
        for p in &tr.points {
            csv.serialize(Row {
                vehicle_id: tr.vehicle_id,
                timestamp_s: p.t,
                x_m: p.x,
                y_m: p.y,
            })?;
        }
    }
    csv.flush()?;
    Ok(())
}

pub fn save_trajectories(set: &TrajectorySet, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_trajectories(set, file).map_err(|e| HarnessError::csv(path, e))
}

/// Synthetic trajectories from grid mobility: `vehicles` (at least 2)
/// vehicles, `slots` samples each, spaced by `config.slot_duration`.
pub fn generate_trajectories(config: &ScenarioConfig, vehicles: usize, slots: usize, seed: u64) -> Result<TrajectorySet> {
    // Roles do not matter here, but the scenario builder needs one V2V pair.
    let config = ScenarioConfig {
        n_vehicles: vehicles,
        n_targets: config.n_targets.min(vehicles),
        n_v2v_links: Some(1),
        ..config.clone()
    };
    let mut states = build_grid_scenario(&config, seed)?;
    let grid = RoadGrid::from_config(&config);
    let mut rng = stream(seed, Stream::Mobility);
    let mut trajectories: Vec<Trajectory> = states
        .iter()
        .map(|v| Trajectory {
            vehicle_id: v.id as u64,
            points: Vec::with_capacity(slots),
        })
        .collect();
    for k in 0..slots {
        if k > 0 {
            grid.step(&mut states, config.slot_duration, &mut rng);
        }
        let t = k as f64 * config.slot_duration;
        for (tr, v) in trajectories.iter_mut().zip(&states) {
            tr.points.push(TimedPoint {
                t,
                x: v.position[0],
                y: v.position[1],
            });
        }
    }
    Ok(TrajectorySet::new(trajectories)?)
}
