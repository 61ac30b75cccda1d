//! Continuous connectivity metrics.
//!
//! V2I links are judged over a sliding window: the indicator Ψ is 1 only if
//! the last `N` threshold outcomes all passed. V2V links are judged on
//! whether their payload was fully delivered before the episode deadline.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

#[allow(unused_imports)] // float math in no_std builds; std shadows it when linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Ring buffer of the last `N` threshold outcomes of one link.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowTracker {
    window: usize,
    recent: VecDeque<bool>,
    indicator: bool,
}

impl WindowTracker {
    pub fn new(window: usize) -> Self {
        assert!(window >= 1, "window must be >= 1");
        WindowTracker {
            window,
            recent: VecDeque::with_capacity(window),
            indicator: false,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn indicator(&self) -> bool {
        self.indicator
    }

    /// Indicator that [`update`](Self::update) would return for `outcome`,
    /// without recording it.
    pub fn would_hold(&self, outcome: bool) -> bool {
        let needed = self.window - 1;
        outcome && self.recent.len() >= needed && self.recent.iter().rev().take(needed).all(|&o| o)
    }

    pub fn update(&mut self, outcome: bool) -> bool {
        self.indicator = self.would_hold(outcome);
        if self.recent.len() == self.window {
            self.recent.pop_front();
        }
        self.recent.push_back(outcome);
        self.indicator
    }
}

/// Remaining V2V payload per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PayloadTracker {
    payload_bits: f64,
    remaining: Vec<f64>,
    delivered_at: Vec<Option<usize>>,
    slot: usize,
}

impl PayloadTracker {
    pub fn new(pairs: usize, payload_bits: f64) -> Self {
        PayloadTracker {
            payload_bits,
            remaining: alloc::vec![payload_bits; pairs],
            delivered_at: alloc::vec![None; pairs],
            slot: 0,
        }
    }

    pub fn payload_bits(&self) -> f64 {
        self.payload_bits
    }

    pub fn remaining(&self) -> &[f64] {
        &self.remaining
    }

    pub fn delivered(&self) -> Vec<bool> {
        self.delivered_at.iter().map(Option::is_some).collect()
    }

    /// Slot (1-based) in which each pair finished, if it did.
    pub fn delivered_at(&self) -> &[Option<usize>] {
        &self.delivered_at
    }

    /// Bits a pair would still owe after transmitting at `rate` for `dt`.
    pub fn preview(&self, pair: usize, reused: bool, rate: f64, dt: f64) -> f64 {
        let sent = if reused { rate * dt } else { 0.0 };
        (self.remaining[pair] - sent).max(0.0)
    }

    /// Records one pair's transmission in the current slot.
    pub fn update(&mut self, pair: usize, reused: bool, rate: f64, dt: f64) -> f64 {
        let left = self.preview(pair, reused, rate, dt);
        self.remaining[pair] = left;
        if left == 0.0 && self.delivered_at[pair].is_none() {
            self.delivered_at[pair] = Some(self.slot + 1);
        }
        left
    }

    /// Closes the current slot.
    pub fn end_slot(&mut self) {
        self.slot += 1;
    }

    /// `(1/D)·Σ_d K_d/K`.
    pub fn mean_remaining_fraction(&self) -> f64 {
        mean_remaining_fraction(&self.remaining, self.payload_bits)
    }
}

pub fn mean_remaining_fraction(remaining: &[f64], payload_bits: f64) -> f64 {
    remaining.iter().map(|k| k / payload_bits).sum::<f64>() / remaining.len() as f64
}

/// `(1/(V(T−N+1))) Σ_v Σ_{t=N..T} Ψ_v^t`; `series[v][t]` with `t` 0-based.
pub fn ccr_v2i(series: &[Vec<bool>], window: usize) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Empty);
    }
    let slots = series[0].len();
    if let Some(bad) = series.iter().find(|s| s.len() != slots) {
        return Err(Error::LengthMismatch {
            expected: slots,
            actual: bad.len(),
        });
    }
    if slots < window || window == 0 {
        return Err(Error::WindowLongerThanEpisode { slots, window });
    }
    let hits: usize = series
        .iter()
        .map(|s| s[window - 1..].iter().filter(|&&psi| psi).count())
        .sum();
    Ok(hits as f64 / (series.len() * (slots - window + 1)) as f64)
}

/// Delivered pair-episodes over all pair-episodes.
pub fn ccr_v2v(delivered: &[bool]) -> Result<f64> {
    if delivered.is_empty() {
        return Err(Error::Empty);
    }
    Ok(delivered.iter().filter(|&&d| d).count() as f64 / delivered.len() as f64)
}

/// Per-slot record of one episode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub window: usize,
    /// `psi_vehicle[t][v]`: Ψ for every vehicle (Ψ_j for targets).
    pub psi_vehicle: Vec<Vec<bool>>,
    /// Which vehicles are sensing targets.
    pub is_target: Vec<bool>,
    /// Delivered-by-deadline flag per pair, at the end of the episode.
    pub delivered: Vec<bool>,
    pub rewards: Vec<f64>,
}

impl EpisodeTrace {
    pub fn slots(&self) -> usize {
        self.psi_vehicle.len()
    }

    /// Transposes into one series per vehicle.
    pub fn series_by_vehicle(&self) -> Vec<Vec<bool>> {
        (0..self.is_target.len())
            .map(|v| self.psi_vehicle.iter().map(|row| row[v]).collect())
            .collect()
    }
}

fn fraction(flags: impl Iterator<Item = bool>) -> Option<f64> {
    let (hits, n) = flags.fold((0usize, 0usize), |(h, n), f| (h + usize::from(f), n + 1));
    (n > 0).then(|| hits as f64 / n as f64)
}

/// `(1/T) Σ_t [ (1/D)Σ_d delivered_d + (1/(V−J)) Σ_{v∉J} Ψ_v^t + (1/J) Σ_j Ψ_j^t ]`.
///
/// Delivery is judged once per episode; empty groups contribute nothing.
pub fn objective_value(trace: &EpisodeTrace) -> f64 {
    let slots = trace.slots();
    if slots == 0 {
        return 0.0;
    }
    let delivery = fraction(trace.delivered.iter().copied()).unwrap_or(0.0);
    let per_slot: f64 = trace
        .psi_vehicle
        .iter()
        .map(|row| {
            let pick = |target: bool| {
                row.iter()
                    .zip(&trace.is_target)
                    .filter(move |(_, &t)| t == target)
                    .map(|(&psi, _)| psi)
            };
            delivery + fraction(pick(false)).unwrap_or(0.0) + fraction(pick(true)).unwrap_or(0.0)
        })
        .sum();
    per_slot / slots as f64
}

/// Metrics of one episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeReport {
    pub ccr_v2i: f64,
    pub ccr_v2v: f64,
    pub ccr_total: f64,
    pub objective: f64,
    pub mean_reward: f64,
}

impl EpisodeReport {
    pub fn from_trace(trace: &EpisodeTrace) -> Result<Self> {
        let ccr_v2i = ccr_v2i(&trace.series_by_vehicle(), trace.window)?;
        let ccr_v2v = ccr_v2v(&trace.delivered)?;
        let mean_reward = if trace.rewards.is_empty() {
            0.0
        } else {
            trace.rewards.iter().sum::<f64>() / trace.rewards.len() as f64
        };
        Ok(EpisodeReport {
            ccr_v2i,
            ccr_v2v,
            ccr_total: ccr_v2i + ccr_v2v,
            objective: objective_value(trace),
            mean_reward,
        })
    }
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let n = values.len();
        if n == 0 {
            return Summary::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, std }
    }

    pub fn standard_error(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.std / (n as f64).sqrt()
        }
    }
}

/// Episode reports of several runs and their aggregate statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CcrReport {
    pub episodes: Vec<EpisodeReport>,
}

impl CcrReport {
    pub fn push(&mut self, episode: EpisodeReport) {
        self.episodes.push(episode);
    }

    /// Concatenates partial reports, e.g. from episodes run in parallel.
    pub fn merge(&mut self, other: CcrReport) {
        self.episodes.extend(other.episodes);
    }

    pub fn runs(&self) -> usize {
        self.episodes.len()
    }

    fn summary(&self, f: impl Fn(&EpisodeReport) -> f64) -> Summary {
        Summary::of(self.episodes.iter().map(f))
    }

    pub fn ccr_v2i(&self) -> Summary {
        self.summary(|e| e.ccr_v2i)
    }

    pub fn ccr_v2v(&self) -> Summary {
        self.summary(|e| e.ccr_v2v)
    }

    pub fn ccr_total(&self) -> Summary {
        self.summary(|e| e.ccr_total)
    }

    pub fn objective(&self) -> Summary {
        self.summary(|e| e.objective)
    }

    pub fn mean_reward(&self) -> Summary {
        self.summary(|e| e.mean_reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    /// Ψ by direct scan of the last `n` outcomes.
    fn brute_force(series: &[bool], n: usize) -> Vec<bool> {
        (0..series.len())
            .map(|t| t + 1 >= n && series[t + 1 - n..=t].iter().all(|&o| o))
            .collect()
    }

    fn run(series: &[bool], n: usize) -> Vec<bool> {
        let mut w = WindowTracker::new(n);
        series.iter().map(|&o| w.update(o)).collect()
    }

    #[test]
    fn window_examples() {
        let s = [true, true, false, true, true];
        assert_eq!(run(&s, 2), vec![false, true, false, false, true]);
        assert_eq!(run(&s, 2), brute_force(&s, 2));
        assert_eq!(run(&[true; 6], 3), vec![false, false, true, true, true, true]);
        assert_eq!(run(&s, 1), s.to_vec());
    }

    #[test]
    fn payload_examples() {
        // 8×1060 bits at 8.48 Mbps for 1 ms.
        let mut p = PayloadTracker::new(1, 8480.0);
        assert_eq!(p.update(0, true, 8.48e6, 1e-3), 0.0);
        p.end_slot();
        assert_eq!(p.delivered_at(), &[Some(1)]);

        let mut idle = PayloadTracker::new(1, 8480.0);
        for _ in 0..100 {
            idle.update(0, false, 1e9, 1e-3);
            idle.end_slot();
        }
        assert_eq!(idle.remaining(), &[8480.0]);
        assert_eq!(idle.delivered(), vec![false]);

        // 80 bits per slot (dt = 2^-10 s keeps the arithmetic exact): K = 8000
        // is reached exactly at the 100th slot.
        let dt = 0.5f64.powi(10);
        let mut edge = PayloadTracker::new(1, 8000.0);
        for _ in 0..100 {
            edge.update(0, true, 81_920.0, dt);
            edge.end_slot();
        }
        assert_eq!(edge.delivered_at(), &[Some(100)]);
    }

    #[test]
    fn ccr_v2i_examples() {
        assert_eq!(ccr_v2i(&[vec![true; 5], vec![true; 5]], 2).unwrap(), 1.0);
        assert_eq!(ccr_v2i(&[vec![false; 5]], 2).unwrap(), 0.0);
        let mixed = vec![
            vec![true, true, false, true, true, true],
            vec![false, true, true, true, false, true],
            vec![true, false, true, false, true, false],
        ];
        let n = 2;
        let mut hits = 0;
        for s in &mixed {
            for &psi in &s[n - 1..] {
                hits += usize::from(psi);
            }
        }
        let want = hits as f64 / (3 * (6 - n + 1)) as f64;
        assert_eq!(ccr_v2i(&mixed, n).unwrap(), want);
        assert_eq!(
            ccr_v2i(&[vec![true; 2]], 3),
            Err(Error::WindowLongerThanEpisode { slots: 2, window: 3 })
        );
    }

    #[test]
    fn ccr_v2v_examples() {
        assert_eq!(ccr_v2v(&[true, true, false, true]).unwrap(), 0.75);
        assert_eq!(ccr_v2v(&[true; 3]).unwrap(), 1.0);
        assert_eq!(ccr_v2v(&[]), Err(Error::Empty));
    }

    fn brute_objective(trace: &EpisodeTrace) -> f64 {
        let t_len = trace.psi_vehicle.len() as f64;
        let d = trace.delivered.len() as f64;
        let delivered = trace.delivered.iter().filter(|&&x| x).count() as f64;
        let mut total = 0.0;
        for row in &trace.psi_vehicle {
            let mut nt = (0.0, 0.0);
            let mut tg = (0.0, 0.0);
            for (v, &psi) in row.iter().enumerate() {
                let slot = if trace.is_target[v] { &mut tg } else { &mut nt };
                slot.0 += if psi { 1.0 } else { 0.0 };
                slot.1 += 1.0;
            }
            total += delivered / d;
            if nt.1 > 0.0 {
                total += nt.0 / nt.1;
            }
            if tg.1 > 0.0 {
                total += tg.0 / tg.1;
            }
        }
        total / t_len
    }

    fn saturated_trace(window: usize) -> EpisodeTrace {
        // 5 slots, 3 vehicles (one target), all outcomes passing.
        let psi = run(&[true; 5], window);
        EpisodeTrace {
            window,
            psi_vehicle: psi.iter().map(|&p| vec![p; 3]).collect(),
            is_target: vec![false, true, false],
            delivered: vec![true, true],
            rewards: vec![],
        }
    }

    #[test]
    fn objective_examples() {
        let full = saturated_trace(1);
        assert_eq!(objective_value(&full), 3.0);
        assert_eq!(objective_value(&full), brute_objective(&full));

        let warm = saturated_trace(2);
        let want = 1.0 + 2.0 * 4.0 / 5.0;
        assert!((objective_value(&warm) - want).abs() < 1e-12);
        assert!((objective_value(&warm) - brute_objective(&warm)).abs() < 1e-12);

        let zero = EpisodeTrace {
            window: 1,
            psi_vehicle: vec![vec![false; 3]; 5],
            is_target: vec![false, true, false],
            delivered: vec![false, false],
            rewards: vec![],
        };
        assert_eq!(objective_value(&zero), 0.0);

        // One non-target, one target, one pair.
        let small = EpisodeTrace {
            window: 1,
            psi_vehicle: vec![vec![true, false], vec![false, false], vec![true, true]],
            is_target: vec![false, true],
            delivered: vec![true],
            rewards: vec![],
        };
        // (1 + 1 + 0) + (1 + 0 + 0) + (1 + 1 + 1) over 3 slots.
        assert!((objective_value(&small) - 6.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_total_is_exact_sum() {
        let trace = EpisodeTrace {
            window: 2,
            psi_vehicle: vec![vec![false, false], vec![true, false], vec![true, true]],
            is_target: vec![false, true],
            delivered: vec![true, false, true],
            rewards: vec![1.0, -0.5, 2.0],
        };
        let r = EpisodeReport::from_trace(&trace).unwrap();
        assert_eq!(r.ccr_total, r.ccr_v2i + r.ccr_v2v);
        assert_eq!(r.ccr_v2i, 3.0 / 4.0);
        assert_eq!(r.ccr_v2v, 2.0 / 3.0);
        assert_eq!(r.mean_reward, 2.5 / 3.0);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of([1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(Summary::of([7.0]).std, 0.0);
    }

    proptest! {
        #[test]
        fn window_matches_brute_force(series in proptest::collection::vec(any::<bool>(), 0..64), n in 1usize..=8) {
            prop_assert_eq!(run(&series, n), brute_force(&series, n));
        }

        #[test]
        fn ccr_nonincreasing_in_window(
            series in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 12), 1..4),
            n in 1usize..8,
        ) {
            let psi = |n: usize| -> Vec<Vec<bool>> { series.iter().map(|s| run(s, n)).collect() };
            // Counting hits: a longer window can only remove indicator hits.
            let hits = |n: usize| psi(n).iter().flatten().filter(|&&p| p).count();
            prop_assert!(hits(n + 1) <= hits(n));
        }

        #[test]
        fn payload_conservation(rates in proptest::collection::vec(0.0f64..5e6, 1..100)) {
            let mut p = PayloadTracker::new(1, 8480.0);
            let mut sent = 0.0;
            for &r in &rates {
                let before = p.remaining()[0];
                let after = p.update(0, true, r, 1e-3);
                prop_assert!(after <= before);
                sent += before - after;
                p.end_slot();
            }
            prop_assert!((sent + p.remaining()[0] - 8480.0).abs() <= 1e-9);
            prop_assert_eq!(p.delivered()[0], p.remaining()[0] == 0.0);
        }
    }
}
