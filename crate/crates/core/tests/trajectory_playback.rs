//! Environment driven by recorded trajectories instead of grid mobility.

use risv2x_core::env::{Env, Mobility};
use risv2x_core::policies::{Policy, RandomPolicy};
use risv2x_core::scenario::{SamplingStrategy, ScenarioConfig, TimedPoint, Trajectory, TrajectorySet};

/// Straight drives along horizontal lines, one metre per second times `i + 1`.
fn synthetic_set(n: usize, samples: usize, dt: f64) -> TrajectorySet {
    let trajectories = (0..n)
        .map(|i| Trajectory {
            vehicle_id: i as u64,
            points: (0..samples)
                .map(|k| TimedPoint {
                    t: k as f64 * dt,
                    x: 10.0 + (i + 1) as f64 * k as f64 * dt,
                    y: 20.0 + 15.0 * i as f64,
                })
                .collect(),
        })
        .collect();
    TrajectorySet::new(trajectories).unwrap()
}

fn config() -> ScenarioConfig {
    ScenarioConfig {
        n_vehicles: 4,
        n_v2v_links: Some(2),
        n_targets: 1,
        ris_elements: 4,
        phase_levels: 4,
        episode_slots: 10,
        window: 2,
        ..ScenarioConfig::default()
    }
}

#[test]
fn vehicles_follow_their_recorded_paths() {
    let config = config();
    let set = synthetic_set(8, 40, config.slot_duration);
    for strategy in [SamplingStrategy::Random, SamplingStrategy::AreaBalanced, SamplingStrategy::Longest] {
        let mut env = Env::new(
            config.clone(),
            Mobility::Trajectories {
                set: set.clone(),
                strategy,
            },
        )
        .unwrap();
        env.reset(3).unwrap();
        let start: Vec<_> = env.vehicles().iter().map(|v| v.position).collect();
        let mut policy = RandomPolicy::new(3);
        let a = policy.act(&env).unwrap();
        env.step(&a).unwrap();
        for (v, before) in env.vehicles().iter().zip(&start) {
            // Rows are fixed in y and move right by a positive multiple of dt.
            assert_eq!(v.position[1], before[1], "{strategy:?}");
            assert!(v.position[0] > before[0], "{strategy:?}");
        }
    }
}

#[test]
fn longest_strategy_picks_the_fastest_vehicles() {
    let config = config();
    let set = synthetic_set(8, 40, config.slot_duration);
    let mut env = Env::new(
        config,
        Mobility::Trajectories {
            set,
            strategy: SamplingStrategy::Longest,
        },
    )
    .unwrap();
    env.reset(0).unwrap();
    let mut rows: Vec<f64> = env.vehicles().iter().map(|v| v.position[1]).collect();
    rows.sort_by(f64::total_cmp);
    // Vehicles 4..8 (rows 80, 95, 110, 125) drive the longest paths.
    assert_eq!(rows, vec![80.0, 95.0, 110.0, 125.0]);
}

#[test]
fn too_few_trajectories_is_a_configuration_error() {
    let set = synthetic_set(3, 10, 0.1);
    let err = Env::new(
        config(),
        Mobility::Trajectories {
            set,
            strategy: SamplingStrategy::Random,
        },
    )
    .unwrap_err();
    assert!(err.to_string().contains('3'), "{err}");
}

#[test]
fn playback_episodes_are_reproducible() {
    let run = || {
        let mut env = Env::new(
            config(),
            Mobility::Trajectories {
                set: synthetic_set(8, 40, 0.1),
                strategy: SamplingStrategy::AreaBalanced,
            },
        )
        .unwrap();
        let mut policy = RandomPolicy::new(11);
        env.reset(11).unwrap();
        let mut rewards = Vec::new();
        while !env.is_done() {
            let a = policy.act(&env).unwrap();
            rewards.push(env.step(&a).unwrap().reward.to_bits());
        }
        rewards
    };
    assert_eq!(run(), run());
}
