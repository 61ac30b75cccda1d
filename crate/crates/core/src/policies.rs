//! Baseline policies: uniform random, random RIS phases over a greedy
//! channel/power choice, and one-step greedy.
//!
//! Greedy is coordinate ascent against [`Env::evaluator`], i.e. against the
//! current slot's already-drawn channel, so every candidate is scored on the
//! same realisation that `step` will use.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::env::{Action, ActionSpace, Env, SlotEvaluator};
use crate::rng::{stream, SimRng, Stream};
use crate::{Error, Result};

pub const DEFAULT_PHASE_BUDGET: usize = 64;

pub trait Policy {
    fn name(&self) -> &'static str;
    fn act(&mut self, env: &Env) -> Result<Action>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Random,
    RandomRis,
    Greedy,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Random => "random",
            PolicyKind::RandomRis => "random_ris",
            PolicyKind::Greedy => "greedy",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PolicyKind::Random),
            "random_ris" | "random-ris" => Ok(PolicyKind::RandomRis),
            "greedy" => Ok(PolicyKind::Greedy),
            other => Err(Error::config("policy", alloc::format!("unknown policy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub greedy_phase_budget: usize,
    pub seed: u64,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        PolicySpec {
            kind,
            greedy_phase_budget: DEFAULT_PHASE_BUDGET,
            seed,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Policy + Send>> {
        Ok(match self.kind {
            PolicyKind::Random => Box::new(RandomPolicy::new(self.seed)),
            PolicyKind::RandomRis => Box::new(RandomRisPolicy::new(self.seed)),
            PolicyKind::Greedy => Box::new(GreedyPolicy::new(self.greedy_phase_budget, self.seed)?),
        })
    }
}

/// Uniform over every discrete range.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: SimRng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        RandomPolicy {
            rng: stream(seed, Stream::Policy),
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &'static str {
        "random"
    }

    fn act(&mut self, env: &Env) -> Result<Action> {
        Ok(env.action_space().sample(&mut self.rng))
    }
}

/// Replaces the phases of `action` with uniform draws; channels and powers
/// are left untouched.
pub fn random_ris_overlay<R: Rng + ?Sized>(action: &Action, space: &ActionSpace, rng: &mut R) -> Action {
    Action {
        channels: action.channels.clone(),
        power_levels: action.power_levels.clone(),
        ris_phases: space.sample_phases(rng),
    }
}

/// Random phases; channels and powers from the greedy per-pair scan under
/// those phases.
#[derive(Debug, Clone)]
pub struct RandomRisPolicy {
    rng: SimRng,
}

impl RandomRisPolicy {
    pub fn new(seed: u64) -> Self {
        RandomRisPolicy {
            rng: stream(seed, Stream::Policy),
        }
    }
}

impl Policy for RandomRisPolicy {
    fn name(&self) -> &'static str {
        "random_ris"
    }

    fn act(&mut self, env: &Env) -> Result<Action> {
        let space = env.action_space();
        let phases = space.sample_phases(&mut self.rng);
        let evaluator = env.evaluator(&phases)?;
        let (channels, power_levels, _) = scan_allocation(space, &evaluator, &phases, &mut None);
        Ok(Action {
            channels,
            power_levels,
            ris_phases: phases,
        })
    }
}

/// Called with every candidate the greedy search scores.
pub type Observer<'a> = Option<&'a mut dyn FnMut(&Action, f64)>;

/// One pass of per-pair coordinate ascent from the baseline allocation.
///
/// For each pair in index order, every channel × power combination is scored
/// with the other pairs fixed; moving onto a channel held by another pair
/// swaps the two pairs' channels. Ties keep the lowest `(channel, power)`.
fn scan_allocation(
    space: &ActionSpace,
    evaluator: &SlotEvaluator,
    phases: &[usize],
    observer: &mut Observer<'_>,
) -> (Vec<usize>, Vec<usize>, f64) {
    let base = space.baseline();
    let (mut channels, mut powers) = (base.channels, base.power_levels);
    let mut best_reward = evaluator.reward(&channels, &powers);
    for d in 0..space.pairs {
        let mut best: Option<(f64, usize, usize)> = None;
        for ch in 0..space.channels {
            let holder = channels.iter().position(|&c| c == ch);
            let own = channels[d];
            if let Some(e) = holder {
                channels[e] = own;
            }
            channels[d] = ch;
            let saved_power = powers[d];
            for level in 0..space.power_levels {
                powers[d] = level;
                let r = evaluator.reward(&channels, &powers);
                if let Some(obs) = observer.as_mut() {
                    let candidate = Action {
                        channels: channels.clone(),
                        power_levels: powers.clone(),
                        ris_phases: phases.to_vec(),
                    };
                    obs(&candidate, r);
                }
                if best.is_none_or(|(b, _, _)| r > b) {
                    best = Some((r, ch, level));
                }
            }
            powers[d] = saved_power;
            channels[d] = own;
            if let Some(e) = holder {
                channels[e] = ch;
            }
        }
        let (r, ch, level) = best.expect("at least one channel and power level");
        if let Some(e) = channels.iter().position(|&c| c == ch) {
            channels[e] = channels[d];
        }
        channels[d] = ch;
        powers[d] = level;
        best_reward = r;
    }
    (channels, powers, best_reward)
}

/// One-step greedy: for each candidate phase vector, per-pair coordinate
/// ascent over channel × power; the best `(phases, allocation)` wins.
///
/// Phase candidates are the all-zero vector, the previous slot's vector and
/// `budget − 2` uniform draws, or every vector when `budget ≥ Q^F`.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    budget: usize,
    rng: SimRng,
}

impl GreedyPolicy {
    pub fn new(budget: usize, seed: u64) -> Result<Self> {
        if budget == 0 {
            return Err(Error::config("greedy_phase_budget", "must be >= 1"));
        }
        Ok(GreedyPolicy {
            budget,
            rng: stream(seed, Stream::Policy),
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn phase_candidates(&mut self, env: &Env) -> Vec<Vec<usize>> {
        let space = env.action_space();
        let (q, f) = (space.phase_levels, space.elements);
        let exhaustive = u32::try_from(f)
            .ok()
            .and_then(|f| q.checked_pow(f))
            .filter(|&total| total <= self.budget);
        if let Some(total) = exhaustive {
            return (0..total)
                .map(|mut k| {
                    (0..f)
                        .map(|_| {
                            let digit = k % q;
                            k /= q;
                            digit
                        })
                        .collect()
                })
                .collect();
        }
        let mut out = Vec::with_capacity(self.budget);
        out.push(alloc::vec![0; f]);
        if self.budget >= 2 {
            out.push(env.current_phases().to_vec());
        }
        while out.len() < self.budget {
            out.push(space.sample_phases(&mut self.rng));
        }
        out
    }

    /// Runs the search, reporting every scored candidate to `observer`.
    /// Returns the chosen action and its previewed reward.
    pub fn search(&mut self, env: &Env, mut observer: Observer<'_>) -> Result<(Action, f64)> {
        let space = *env.action_space();
        let mut best: Option<(f64, Action)> = None;
        for phases in self.phase_candidates(env) {
            let evaluator = env.evaluator(&phases)?;
            let (channels, power_levels, r) = scan_allocation(&space, &evaluator, &phases, &mut observer);
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((
                    r,
                    Action {
                        channels,
                        power_levels,
                        ris_phases: phases,
                    },
                ));
            }
        }
        let (r, action) = best.expect("budget >= 1");
        Ok((action, r))
    }
}

impl Policy for GreedyPolicy {
    fn name(&self) -> &'static str {
        "greedy"
    }

    fn act(&mut self, env: &Env) -> Result<Action> {
        self.search(env, None).map(|(a, _)| a)
    }
}

/// Human-readable list of policy names, for CLI help.
pub fn policy_names() -> String {
    [PolicyKind::Random, PolicyKind::RandomRis, PolicyKind::Greedy]
        .iter()
        .map(|k| k.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioConfig;
    use alloc::vec;

    fn tiny_env(seed: u64) -> Env {
        let config = ScenarioConfig {
            n_vehicles: 2,
            n_targets: 0,
            n_v2v_links: Some(1),
            v2v_power_levels: vec![1.0, 23.0],
            ris_elements: 1,
            phase_levels: 2,
            window: 1,
            episode_slots: 5,
            ..ScenarioConfig::default()
        };
        let mut env = Env::grid(config).unwrap();
        env.reset(seed).unwrap();
        env
    }

    #[test]
    fn exhaustive_budget_matches_brute_force() {
        for seed in 0..20 {
            let env = tiny_env(seed);
            let mut brute = f64::NEG_INFINITY;
            for q in 0..2 {
                for ch in 0..2 {
                    for l in 0..2 {
                        let a = Action {
                            channels: vec![ch],
                            power_levels: vec![l],
                            ris_phases: vec![q],
                        };
                        brute = brute.max(env.preview_reward(&a).unwrap());
                    }
                }
            }
            let (action, r) = GreedyPolicy::new(2, 0).unwrap().search(&env, None).unwrap();
            assert_eq!(r, brute);
            assert_eq!(env.preview_reward(&action).unwrap(), brute);
        }
    }

    #[test]
    fn greedy_dominates_what_it_enumerated() {
        let mut env = Env::grid(ScenarioConfig {
            n_vehicles: 5,
            ris_elements: 4,
            ..ScenarioConfig::default()
        })
        .unwrap();
        env.reset(3).unwrap();
        let mut seen = Vec::new();
        let mut record = |a: &Action, r: f64| seen.push((a.clone(), r));
        let (action, best) = GreedyPolicy::new(4, 9).unwrap().search(&env, Some(&mut record)).unwrap();
        assert!(!seen.is_empty());
        for (a, r) in &seen {
            assert!(best >= *r);
            assert_eq!(env.preview_reward(a).unwrap(), *r);
        }
        env.action_space().validate(&action).unwrap();
    }

    #[test]
    fn greedy_is_seeded() {
        let env = tiny_env(4);
        let a = GreedyPolicy::new(1, 5).unwrap().act(&env).unwrap();
        let b = GreedyPolicy::new(1, 5).unwrap().act(&env).unwrap();
        assert_eq!(a, b);
        assert!(GreedyPolicy::new(0, 5).is_err());
    }

    #[test]
    fn overlay_touches_only_phases() {
        let space = ActionSpace::from_config(&ScenarioConfig::default());
        let mut rng = stream(2, Stream::Policy);
        let base = space.sample(&mut rng);
        let over = random_ris_overlay(&base, &space, &mut rng);
        assert_eq!(over.channels, base.channels);
        assert_eq!(over.power_levels, base.power_levels);
        space.validate(&over).unwrap();

        let mut counts = [0usize; 8];
        for _ in 0..100_000 {
            counts[random_ris_overlay(&base, &space, &mut rng).ris_phases[5]] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 - 12_500.0).abs() / 12_500.0 < 0.02));
    }

    #[test]
    fn policy_kind_round_trip() {
        for kind in [PolicyKind::Random, PolicyKind::RandomRis, PolicyKind::Greedy] {
            assert_eq!(kind.as_str().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("ddpg".parse::<PolicyKind>().is_err());
    }
}
