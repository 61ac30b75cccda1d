//! Road geometry, vehicle mobility and trajectory sets.

mod config;
mod grid;
mod trajectory;

pub use config::{RadioParams, ScenarioConfig, PAYLOAD_UNIT_BITS};
pub use grid::{
    build_grid_scenario, nearest_neighbour, Axis, LaneState, RoadGrid, VehicleState, ANTENNA_HEIGHT_M,
    LANES_PER_DIRECTION, LANE_WIDTH_M, ROADS_PER_AXIS,
};
pub(crate) use grid::assign_roles;
pub use trajectory::{
    sample_trajectories, SamplingInfo, SamplingStrategy, TimedPoint, Trajectory, TrajectorySet,
};
