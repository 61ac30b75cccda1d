//! Recorded vehicle trajectories: validation, rescaling into the simulated
//! region, resampling onto the slot grid, and selection strategies.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::rng::SimRng;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub vehicle_id: u64,
    pub points: Vec<TimedPoint>,
}

impl Trajectory {
    pub fn path_length(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt())
            .sum()
    }

    /// Linear interpolation at time `t`, clamped to the recorded span.
    pub fn position_at(&self, t: f64) -> (f64, f64) {
        let pts = &self.points;
        let first = pts[0];
        if t <= first.t {
            return (first.x, first.y);
        }
        let i = pts.partition_point(|p| p.t <= t);
        if i >= pts.len() {
            let last = pts[pts.len() - 1];
            return (last.x, last.y);
        }
        let (a, b) = (pts[i - 1], pts[i]);
        let w = (t - a.t) / (b.t - a.t);
        (a.x + w * (b.x - a.x), a.y + w * (b.y - a.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    Random,
    AreaBalanced,
    Longest,
}

impl SamplingStrategy {
    pub const ALL: [SamplingStrategy; 3] = [
        SamplingStrategy::Random,
        SamplingStrategy::AreaBalanced,
        SamplingStrategy::Longest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SamplingStrategy::Random => "random",
            SamplingStrategy::AreaBalanced => "area_balanced",
            SamplingStrategy::Longest => "longest",
        }
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingStrategy {
    type Err = alloc::string::String;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| alloc::format!("unknown sampling strategy `{s}`"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplingInfo {
    pub strategy: Option<SamplingStrategy>,
    pub source_count: usize,
    /// Sample spacing in seconds once resampled onto the slot grid.
    pub slot_duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
    pub info: SamplingInfo,
}

impl TrajectorySet {
    /// Checks that every trajectory is non-empty with strictly increasing timestamps.
    pub fn new(trajectories: Vec<Trajectory>) -> Result<Self> {
        if trajectories.is_empty() {
            return Err(Error::Empty);
        }
        for tr in &trajectories {
            if tr.points.is_empty() {
                return Err(Error::Empty);
            }
            if tr.points.windows(2).any(|w| w[1].t.partial_cmp(&w[0].t) != Some(core::cmp::Ordering::Greater)) {
                return Err(Error::TimestampsNotIncreasing {
                    vehicle: tr.vehicle_id,
                });
            }
        }
        let source_count = trajectories.len();
        Ok(TrajectorySet {
            trajectories,
            info: SamplingInfo {
                source_count,
                ..Default::default()
            },
        })
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// `[min_x, min_y, max_x, max_y]` over every point.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut bb = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in self.trajectories.iter().flat_map(|t| &t.points) {
            bb[0] = bb[0].min(p.x);
            bb[1] = bb[1].min(p.y);
            bb[2] = bb[2].max(p.x);
            bb[3] = bb[3].max(p.y);
        }
        bb
    }

    /// Affinely maps the bounding box onto `[0, width] × [0, height]`. A
    /// degenerate axis collapses to the middle of the region.
    pub fn rescale_to_region(&mut self, width: f64, height: f64) {
        let [x0, y0, x1, y1] = self.bounding_box();
        let map = |v: f64, lo: f64, hi: f64, extent: f64| {
            if hi > lo {
                (v - lo) / (hi - lo) * extent
            } else {
                extent / 2.0
            }
        };
        for p in self.trajectories.iter_mut().flat_map(|t| t.points.iter_mut()) {
            p.x = map(p.x, x0, x1, width);
            p.y = map(p.y, y0, y1, height);
        }
    }

    /// Resamples each trajectory at `t0 + k·dt` over its own recorded span.
    pub fn resample(&mut self, dt: f64) {
        for tr in &mut self.trajectories {
            let t0 = tr.points[0].t;
            let span = tr.points[tr.points.len() - 1].t - t0;
            let count = (span / dt + 1e-9).floor() as usize + 1;
            let points = (0..count)
                .map(|k| {
                    let t = t0 + k as f64 * dt;
                    let (x, y) = tr.position_at(t);
                    TimedPoint { t, x, y }
                })
                .collect();
            tr.points = points;
        }
        self.info.slot_duration = Some(dt);
    }
}

/// Selects `count` trajectories.
///
/// - `Random`: uniform without replacement.
/// - `AreaBalanced`: start points are binned into a 2×2 grid over the set's
///   bounding box; cells are visited round-robin, each in shuffled order.
/// - `Longest`: descending path length, ties by vehicle id.
pub fn sample_trajectories(
    set: &TrajectorySet,
    strategy: SamplingStrategy,
    count: usize,
    rng: &mut SimRng,
) -> Result<TrajectorySet> {
    if count > set.len() {
        return Err(Error::NotEnoughTrajectories {
            requested: count,
            available: set.len(),
        });
    }
    let picked: Vec<usize> = match strategy {
        SamplingStrategy::Random => index::sample(rng, set.len(), count).into_vec(),
        SamplingStrategy::Longest => {
            let mut order: Vec<(usize, f64)> = set
                .trajectories
                .iter()
                .enumerate()
                .map(|(i, t)| (i, t.path_length()))
                .collect();
            order.sort_by(|a, b| {
                b.1.total_cmp(&a.1)
                    .then(set.trajectories[a.0].vehicle_id.cmp(&set.trajectories[b.0].vehicle_id))
            });
            order.into_iter().take(count).map(|(i, _)| i).collect()
        }
        SamplingStrategy::AreaBalanced => {
            let [x0, y0, x1, y1] = set.bounding_box();
            let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            let mut cells: [Vec<usize>; 4] = Default::default();
            for (i, t) in set.trajectories.iter().enumerate() {
                let p = t.points[0];
                let cell = usize::from(p.x >= mx) + 2 * usize::from(p.y >= my);
                cells[cell].push(i);
            }
            for cell in &mut cells {
                cell.shuffle(rng);
            }
            let mut picked = Vec::with_capacity(count);
            let mut round = 0;
            while picked.len() < count {
                for cell in &cells {
                    if picked.len() < count {
                        if let Some(&i) = cell.get(round) {
                            picked.push(i);
                        }
                    }
                }
                round += 1;
            }
            picked
        }
    };
    Ok(TrajectorySet {
        trajectories: picked.into_iter().map(|i| set.trajectories[i].clone()).collect(),
        info: SamplingInfo {
            strategy: Some(strategy),
            source_count: set.len(),
            slot_duration: set.info.slot_duration,
        },
    })
}
