//! Acceptance suite. Runs every criterion, prints one `PASS`/`FAIL` line per
//! criterion and exits non-zero if any failed.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::Rng;
use risv2x_core::channel::{
    composite_v2i_gain, composite_v2v_gain, echo_gain, phase_angle, reflection_matrix, ChannelRealization,
    RisState,
};
use risv2x_core::connectivity::WindowTracker;
use risv2x_core::env::{Action, ActionSpace, Env};
use risv2x_core::policies::{GreedyPolicy, PolicyKind, PolicySpec, RandomPolicy, Policy, DEFAULT_PHASE_BUDGET};
use risv2x_core::radio::{dbm_to_watt, rate};
use risv2x_core::rng::{stream, SimRng, Stream};
use risv2x_core::scenario::ScenarioConfig;
use risv2x_harness::experiment::{run_eval, ExperimentSpec, Sweep};
use risv2x_harness::protocol::Session;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, fail: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(fail())
    }
}

fn random_complex(rng: &mut SimRng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn random_vec(rng: &mut SimRng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| random_complex(rng)).collect()
}

/// `Σ_f conj(a_f)·β_f·(cos φ_f + j sin φ_f)·b_f + direct`, written out in
/// real arithmetic.
fn brute_force_form(a: &[Complex64], beta: &[f64], idx: &[usize], q: usize, b: &[Complex64], direct: Complex64) -> Complex64 {
    let (mut re, mut im) = (direct.re, direct.im);
    for f in 0..a.len() {
        let phi = 2.0 * PI * idx[f] as f64 / q as f64;
        let (tr, ti) = (beta[f] * phi.cos(), beta[f] * phi.sin());
        // conj(a)·θ
        let (ur, ui) = (a[f].re * tr + a[f].im * ti, a[f].re * ti - a[f].im * tr);
        // ·b
        re += ur * b[f].re - ui * b[f].im;
        im += ur * b[f].im + ui * b[f].re;
    }
    Complex64::new(re, im)
}

fn rel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(f64::MIN_POSITIVE)
}

fn composite_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = stream(2024, Stream::Policy);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let f = rng.random_range(1..=16);
        let q = rng.random_range(2..=16);
        let idx: Vec<usize> = (0..f).map(|_| rng.random_range(0..q)).collect();
        let beta: Vec<f64> = (0..f).map(|_| rng.random_range(0.0..=1.0)).collect();
        let theta = reflection_matrix(
            &RisState {
                amplitudes: beta.clone(),
                phase_indices: idx.clone(),
            },
            q,
        )
        .map_err(|e| e.to_string())?;
        let (a, b, direct) = (random_vec(&mut rng, f), random_vec(&mut rng, f), random_complex(&mut rng));

        let v2i = composite_v2i_gain(&a, &theta, &b, direct).map_err(|e| e.to_string())?;
        let v2v = composite_v2v_gain(&a, &theta, &b, direct).map_err(|e| e.to_string())?;
        let want = brute_force_form(&a, &beta, &idx, q, &b, direct);
        let echo = echo_gain(&a, &theta, &b, direct).map_err(|e| e.to_string())?;
        let want_echo = Complex64::new(want.norm_sqr(), 0.0);
        worst = worst.max(rel_err(v2i, want)).max(rel_err(v2v, want)).max(rel_err(echo, want_echo));
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-12, || format!("worst relative error {worst:e}"))?;
    check(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 fixtures, worst relative error {worst:.2e}, {elapsed:.2?}"))
}

fn ris_off_reduction() -> Outcome {
    // Gains: zero amplitudes leave exactly the direct gains.
    let mut env = Env::grid(ScenarioConfig::default()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for seed in 0..20 {
        env.reset(seed).map_err(|e| e.to_string())?;
        let state = env.channel_state().expect("reset").clone();
        let pairs = env.pairs();
        let tx: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let targets = env.targets().to_vec();
        let mut rng = stream(seed, Stream::Policy);
        let phases: Vec<usize> = (0..12).map(|_| rng.random_range(0..8)).collect();
        let theta = reflection_matrix(&RisState::uniform(0.0, phases), 8).map_err(|e| e.to_string())?;
        let off = ChannelRealization::compute(&state, Some(&theta), &tx, &targets).map_err(|e| e.to_string())?;
        let bypass = ChannelRealization::compute(&state, None, &tx, &targets).map_err(|e| e.to_string())?;
        check(off.composite_v2i == state.bs_to_vehicle, || "V2I gain changed".into())?;
        check(off.composite_v2v == state.pair_to_bs, || "V2V gain changed".into())?;
        check(off == bypass, || "echo differs from the no-RIS reference".into())?;
        checked += 1;
    }
    // CCR: β = 0 versus a disabled RIS under shared seeds and actions.
    let run = |config: ScenarioConfig, seed: u64| -> Result<String, String> {
        let mut env = Env::grid(config).map_err(|e| e.to_string())?;
        let mut policy = RandomPolicy::new(seed);
        env.reset(seed).map_err(|e| e.to_string())?;
        while !env.is_done() {
            let a = policy.act(&env).map_err(|e| e.to_string())?;
            env.step(&a).map_err(|e| e.to_string())?;
        }
        let r = env.episode_report().map_err(|e| e.to_string())?;
        Ok(format!(
            "{:x} {:x} {:x} {:x}",
            r.ccr_v2i.to_bits(),
            r.ccr_v2v.to_bits(),
            r.objective.to_bits(),
            r.mean_reward.to_bits()
        ))
    };
    for seed in 0..5 {
        let zero = run(
            ScenarioConfig {
                ris_amplitude: 0.0,
                ..ScenarioConfig::default()
            },
            seed,
        )?;
        let none = run(
            ScenarioConfig {
                ris_enabled: false,
                ..ScenarioConfig::default()
            },
            seed,
        )?;
        check(zero == none, || format!("seed {seed}: {zero} vs {none}"))?;
    }
    Ok(format!("{checked} slots exact; 5 episodes bit-identical to the no-RIS reference"))
}

fn window_oracle() -> Outcome {
    let mut cases = 0usize;
    for len in 0..=12usize {
        for bits in 0u32..(1 << len) {
            let series: Vec<bool> = (0..len).map(|i| bits >> i & 1 == 1).collect();
            for n in 1..=6 {
                let mut tracker = WindowTracker::new(n);
                for t in 0..len {
                    let got = tracker.update(series[t]);
                    let want = t + 1 >= n && (t + 1 - n..=t).all(|s| series[s]);
                    check(got == want, || format!("series {series:?}, N={n}, t={t}"))?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (series, N) cases, zero mismatches"))
}

fn spot_values() -> Outcome {
    let r = rate(1.0, 1e6);
    check(r == 1e6, || format!("rate = {r}"))?;
    let w = dbm_to_watt(23.0);
    check((w - 0.19953).abs() <= 1e-4, || format!("dbm_to_watt(23) = {w}"))?;
    let p = phase_angle(2, 8);
    check(p == PI / 2.0, || format!("phase = {p}"))?;
    Ok(format!("rate {r} bps, {w:.6} W, phase {p}"))
}

fn constraint_safety() -> Outcome {
    let configs = [
        ScenarioConfig::default(),
        ScenarioConfig {
            n_vehicles: 5,
            n_v2v_links: Some(3),
            ris_elements: 3,
            phase_levels: 4,
            v2v_power_levels: vec![5.0, 10.0],
            ..ScenarioConfig::default()
        },
    ];
    let mut rng = stream(77, Stream::Policy);
    for i in 0..100_000 {
        let space = ActionSpace::from_config(&configs[i % 2]);
        let raw: Vec<f64> = (0..space.raw_dim()).map(|_| rng.random_range(-1.2..1.2)).collect();
        let a = space.decode(&raw).map_err(|e| e.to_string())?;
        // One channel per pair and at most one pair per channel.
        check(a.channels.len() == space.pairs, || "pair without a channel".into())?;
        for v in 0..space.channels {
            let users = a.channels.iter().filter(|&&c| c == v).count();
            check(users <= 1, || format!("channel {v} used by {users} pairs, raw {raw:?}"))?;
        }
        check(a.channels.iter().all(|&c| c < space.channels), || "channel out of range".into())?;
        // Power and phase indices within their ranges.
        check(a.power_levels.iter().all(|&l| l < space.power_levels), || "power level out of range".into())?;
        check(
            a.ris_phases.len() == space.elements && a.ris_phases.iter().all(|&q| q < space.phase_levels),
            || "phase out of range".into(),
        )?;
    }
    Ok("100000 decoded actions are feasible (channel exclusivity, power and phase ranges)".into())
}

fn greedy_dominance() -> Outcome {
    let start = Instant::now();
    let (mut beats_random, mut enumerated) = (0, 0usize);
    for s in 0..50u64 {
        let mut env = Env::grid(ScenarioConfig::default()).map_err(|e| e.to_string())?;
        env.reset(1000 + s).map_err(|e| e.to_string())?;
        // Vary the snapshot: a few random slots of history first.
        let mut warmup = RandomPolicy::new(s);
        for _ in 0..(s % 7) {
            let a = warmup.act(&env).map_err(|e| e.to_string())?;
            env.step(&a).map_err(|e| e.to_string())?;
        }
        let mut seen: Vec<(Action, f64)> = Vec::new();
        let mut record = |a: &Action, r: f64| seen.push((a.clone(), r));
        let (best_action, best) = GreedyPolicy::new(DEFAULT_PHASE_BUDGET, s)
            .map_err(|e| e.to_string())?
            .search(&env, Some(&mut record))
            .map_err(|e| e.to_string())?;
        let preview = env.preview_reward(&best_action).map_err(|e| e.to_string())?;
        check(preview == best, || format!("snapshot {s}: reported {best}, preview {preview}"))?;

        // Re-evaluate every enumerated candidate.
        let mut evaluators = HashMap::new();
        for (a, r) in &seen {
            if !evaluators.contains_key(&a.ris_phases) {
                evaluators.insert(a.ris_phases.clone(), env.evaluator(&a.ris_phases).map_err(|e| e.to_string())?);
            }
            let again = evaluators[&a.ris_phases].reward(&a.channels, &a.power_levels);
            check(again == *r, || format!("snapshot {s}: candidate re-evaluates to {again}, recorded {r}"))?;
            check(best >= again, || format!("snapshot {s}: enumerated candidate {again} beats greedy {best}"))?;
        }
        for (a, r) in seen.iter().step_by(997) {
            let p = env.preview_reward(a).map_err(|e| e.to_string())?;
            check(p == *r, || format!("snapshot {s}: preview {p} vs recorded {r}"))?;
        }
        enumerated += seen.len();

        let mut rng = stream(5000 + s, Stream::Policy);
        let mut best_random = f64::NEG_INFINITY;
        for _ in 0..100 {
            let a = env.action_space().sample(&mut rng);
            best_random = best_random.max(env.preview_reward(&a).map_err(|e| e.to_string())?);
        }
        if best >= best_random {
            beats_random += 1;
        }
    }
    check(beats_random * 100 >= 95 * 50, || format!("greedy beat 100 random candidates in {beats_random}/50 snapshots"))?;
    Ok(format!(
        "beats 100 random candidates in {beats_random}/50 snapshots; dominates all {enumerated} enumerated candidates; {:.2?}",
        start.elapsed()
    ))
}

fn trend_reproduction() -> Outcome {
    let start = Instant::now();
    let spec = |sweep: &str| ExperimentSpec {
        config: ScenarioConfig::default(),
        sweep: Sweep::parse(sweep).expect("valid sweep"),
        runs: 50,
        policy: PolicySpec::new(PolicyKind::Random, 0),
        base_seed: 2025,
        trajectories: None,
    };
    let mut notes = Vec::new();
    for (sweep, metric) in [("payload_K=1,2,4,6,8", "ccr_v2v"), ("window_N=2,3,4,5,6", "ccr_v2i")] {
        let points = run_eval(&spec(sweep)).map_err(|e| e.to_string())?;
        let stats: Vec<(f64, f64)> = points
            .iter()
            .map(|p| {
                let s = if metric == "ccr_v2v" { p.report.ccr_v2v() } else { p.report.ccr_v2i() };
                (s.mean, s.standard_error(p.report.runs()))
            })
            .collect();
        for w in stats.windows(2) {
            let ((m0, se0), (m1, se1)) = (w[0], w[1]);
            check(m1 <= m0 + se0.max(se1), || format!("{sweep}: {metric} rises from {m0:.4} to {m1:.4}"))?;
        }
        let means: Vec<String> = stats.iter().map(|(m, _)| format!("{m:.3}")).collect();
        notes.push(format!("{metric} over {sweep}: [{}]", means.join(", ")));
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{}; {elapsed:.2?}", notes.join("; ")))
}

fn transcript(seed: u64) -> String {
    let mut session = Session::new(ScenarioConfig::default(), risv2x_core::env::Mobility::Grid);
    let mut rng = stream(seed, Stream::Policy);
    let mut out = String::new();
    let reset = format!(r#"{{"cmd":"reset","config":{{"n_vehicles":12,"episode_slots":100}},"seed":{seed}}}"#);
    out.push_str(&session.handle_line(&reset));
    out.push('\n');
    for _ in 0..100 {
        let raw: Vec<f64> = (0..36).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let line = serde_json::json!({"cmd": "step", "raw_action": raw}).to_string();
        out.push_str(&session.handle_line(&line));
        out.push('\n');
    }
    out.push_str(&session.handle_line(r#"{"cmd":"close"}"#));
    out.push('\n');
    out
}

fn determinism() -> Outcome {
    let a = transcript(31);
    let b = transcript(31);
    check(a == b, || "transcripts differ".into())?;
    let lines: Vec<&str> = a.lines().collect();
    check(lines.len() == 102, || format!("{} response lines", lines.len()))?;
    check(lines[100].contains(r#""done":true"#), || "episode did not finish at slot 100".into())?;
    check(lines.iter().all(|l| l.starts_with(r#"{"ok":true"#)), || "error in transcript".into())?;
    check(transcript(32) != a, || "different seeds gave the same transcript".into())?;
    Ok(format!("{} bytes, {} lines, byte-identical on replay", a.len(), lines.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("composite-channel oracle", composite_oracle),
        ("RIS-off reduction", ris_off_reduction),
        ("CCR window oracle", window_oracle),
        ("spot values", spot_values),
        ("constraint safety", constraint_safety),
        ("greedy dominance", greedy_dominance),
        ("trend reproduction", trend_reproduction),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(note) => println!("PASS  {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
