//! Acceptance suite: one test per criterion, each ending in a
//! `criterion N PASS` line. Run with
//! `cargo test -p pursuit-cli --test acceptance -- --nocapture`.
//!
//! Standard scale: 10x10 grid, 20,000 episodes, 10 trials (seeds 42..52),
//! step cap 10,000, smoothing window 500, teacher trained for 20,000
//! episodes with seed 7. Ranges are half-open episode index ranges.
//!
//! Criteria 1 (agreement half) and 6 assert targets that measured
//! behavior does not reach at this scale; their assertion messages carry
//! the measurements. Everything else passes.

use std::fs;
use std::ops::Range;
use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;

use pursuit_core::advisor::{train_teacher, Schedule, Teacher};
use pursuit_core::experiment::{
    run_experiment_with_teacher, run_trial, sweep, ExperimentConfig, ExperimentRun, TeacherSource,
};
use pursuit_core::gridworld::{
    reset, state_from_index, state_index, step, transition_distribution, Action, GameState,
    GridConfig, Position,
};
use pursuit_core::qlearn::{
    evaluate_policy, greedy_policy, mean_steps_from_values, policy_agreement, select_action,
    update, value_iteration_oracle, LearningParams, QTable, ORACLE_SWEEP_CAP, ORACLE_TOLERANCE,
};
use pursuit_core::seeded_rng;
use rand::RngExt;

const TEACHER_SEED: u64 = 7;
const BASE_SEED: u64 = 42;
const EARLY: Range<usize> = 500..2_000;
const FINAL: Range<usize> = 19_000..20_000;

fn pass(criterion: u32, what: &str) {
    println!("criterion {criterion} PASS: {what}");
}

fn grid10() -> GridConfig {
    GridConfig::new(10, 10).unwrap()
}

fn desk_config(schedule: Schedule) -> ExperimentConfig {
    ExperimentConfig {
        schedule,
        base_seed: BASE_SEED,
        ..ExperimentConfig::new(grid10())
    }
}

/// The shared teacher: 20,000 plain episodes on 10x10, seed 7.
fn teacher() -> &'static Teacher {
    static T: OnceLock<Teacher> = OnceLock::new();
    T.get_or_init(|| {
        let mut rng = seeded_rng(TEACHER_SEED);
        train_teacher(grid10(), &LearningParams::default(), 20_000, &mut rng).unwrap()
    })
}

/// The shared unshaped baseline at the standard scale.
fn baseline() -> &'static ExperimentRun {
    static B: OnceLock<ExperimentRun> = OnceLock::new();
    B.get_or_init(|| run_experiment_with_teacher(&desk_config(Schedule::None), None).unwrap())
}

fn shaped_run(schedule: Schedule) -> ExperimentRun {
    run_experiment_with_teacher(&desk_config(schedule), Some(teacher())).unwrap()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn pop_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Criterion 1: on 3x3, plain Q-learning (alpha 0.1, gamma 1.0, epsilon
/// 0.1, 50,000 episodes) must agree with exact value iteration on >= 95%
/// of non-terminal states, and its greedy policy must need at most 5%
/// more expected steps than optimal under exact policy evaluation.
#[test]
fn criterion_01_oracle_convergence() {
    let g = GridConfig::new(3, 3).unwrap();
    let params = LearningParams {
        alpha: 0.1,
        gamma: 1.0,
        epsilon: 0.1,
    };
    let mut rng = seeded_rng(TEACHER_SEED);
    let learner = train_teacher(g, &params, 50_000, &mut rng).unwrap();
    let oracle = value_iteration_oracle(g, 1.0, ORACLE_TOLERANCE, ORACLE_SWEEP_CAP).unwrap();

    let policy = greedy_policy(learner.table());
    let values = evaluate_policy(g, &policy, 1.0, ORACLE_TOLERANCE, ORACLE_SWEEP_CAP)
        .expect("learned greedy policy must reach capture from every state");
    let learned_steps = mean_steps_from_values(&values, g);
    let optimal_steps = oracle.mean_optimal_steps();
    assert!(
        learned_steps <= 1.05 * optimal_steps,
        "learned greedy policy needs {learned_steps:.4} mean expected steps, optimal is {optimal_steps:.4}"
    );

    let agreement = policy_agreement(learner.table(), &oracle, 1e-6);
    assert!(
        agreement >= 0.95,
        "policy agreement {:.1}% < 95% (seed {TEACHER_SEED}; steps check above passed: {:.4} vs optimal {:.4}). \
         Known limitation: the constant step size 0.1 leaves a stationary TD-noise floor that keeps \
         flipping the argmax in the eight states whose optimal-action gap is 0.157. Measured over 40 \
         seeds: median 91.7%, max 98.6%, only 4/40 reach 95%, and longer runs do not help (93.1% at \
         50k = 200k = 500k episodes, seed 3). Exact agreement at this threshold needs a decaying step \
         size, which the pinned constants exclude. See the decisions ledger.",
        100.0 * agreement,
        learned_steps,
        optimal_steps
    );
    pass(
        1,
        &format!(
            "agreement {:.1}%, learned steps {learned_steps:.4} vs optimal {optimal_steps:.4}",
            100.0 * agreement
        ),
    );
}

/// Criterion 2: punishment outputs equal an independent brute-force
/// transcription of their defining expressions on 1,000 random teacher
/// rows, tie cases included, with zero tolerance.
#[test]
fn criterion_02_schedule_equivalence_oracle() {
    let g = GridConfig::new(3, 3).unwrap();
    let probe = GameState::new(Position::new(0, 0), Position::new(2, 2));
    let mut rng = seeded_rng(20_260_811);

    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(1_000);
    for i in 0..999 {
        if i % 4 == 3 {
            // Palette rows force ties, including whole-row ties.
            let palette = [-7.0, -6.0, -5.0];
            rows.push(std::array::from_fn(|_| {
                palette[rng.random_range(0..palette.len())]
            }));
        } else {
            rows.push(std::array::from_fn(|_| rng.random::<f64>() * -25.0));
        }
    }
    rows.push([-4.0; 4]);
    assert_eq!(rows.len(), 1_000);

    let mut tie_rows = 0;
    for row in rows {
        let mut q = QTable::zeros(g);
        for (code, v) in row.into_iter().enumerate() {
            q.set(probe, Action::from_code(code).unwrap(), v);
        }
        let t = Teacher::from_table(q);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().copied().fold(f64::INFINITY, f64::min);
        if row.iter().filter(|&&v| v == max).count() > 1 {
            tie_rows += 1;
        }
        for c in [0.0, 1.0, 3.5, 10.0] {
            for code in 0..4 {
                let a = Action::from_code(code).unwrap();
                // Independent transcriptions of the three schedules.
                let expect_sub = if row[code] < max { c } else { 0.0 };
                let expect_anti = if row[code] == min { c } else { 0.0 };
                let expect_cont = c * (max - row[code]);
                assert_eq!(
                    t.punishment(&Schedule::Suboptimal { c }, probe, a).unwrap(),
                    expect_sub
                );
                assert_eq!(
                    t.punishment(&Schedule::AntiOptimal { c }, probe, a).unwrap(),
                    expect_anti
                );
                assert_eq!(
                    t.punishment(&Schedule::Continuous { c }, probe, a).unwrap(),
                    expect_cont
                );
                // Encouragement is the documented composition of the
                // bonus indicator with the anti-optimal cost.
                let expect_enc =
                    if row[code] == max { -c } else { 0.0 } + if row[code] == min { c } else { 0.0 };
                assert_eq!(
                    t.punishment(&Schedule::Encouragement { c, bonus: c }, probe, a)
                        .unwrap(),
                    expect_enc
                );
            }
        }
    }
    assert!(tie_rows > 50, "tie coverage too thin: {tie_rows} rows");
    pass(2, &format!("1,000 rows ({tie_rows} with argmax ties), 4 magnitudes, exact match"));
}

/// Criterion 3: suboptimal punishment at C=10 speeds up early learning
/// but plateaus at or below baseline quality.
#[test]
fn criterion_03_suboptimal_speedup_then_plateau() {
    let run = shaped_run(Schedule::Suboptimal { c: 10.0 });
    let early_s = run.curve.range_mean(EARLY);
    let early_b = baseline().curve.range_mean(EARLY);
    let late_s = run.curve.range_mean(FINAL);
    let late_b = baseline().curve.range_mean(FINAL);
    assert!(
        early_s < early_b,
        "early phase: sub {early_s:.2} must be below baseline {early_b:.2}"
    );
    assert!(
        late_s >= late_b,
        "plateau: sub {late_s:.2} must be at or above baseline {late_b:.2}"
    );
    pass(
        3,
        &format!("early {early_s:.1} < {early_b:.1}; plateau {late_s:.1} >= {late_b:.1}"),
    );
}

/// Criterion 4: anti-optimal punishment at C=10 tracks at or below the
/// baseline on smoothed curves at >= 90% of 500-episode checkpoints.
#[test]
fn criterion_04_anti_optimal_dominates_baseline() {
    let run = shaped_run(Schedule::AntiOptimal { c: 10.0 });
    let stride = 500;
    let mut at_or_below = 0;
    let mut total = 0;
    let mut idx = stride - 1;
    while idx < run.curve.len() {
        total += 1;
        if run.curve.smoothed_mean_steps[idx] <= baseline().curve.smoothed_mean_steps[idx] {
            at_or_below += 1;
        }
        idx += stride;
    }
    let frac = at_or_below as f64 / total as f64;
    assert!(
        frac >= 0.9,
        "anti at or below baseline at only {at_or_below}/{total} checkpoints"
    );
    pass(4, &format!("at or below baseline at {at_or_below}/{total} checkpoints"));
}

/// Criterion 5: continuous punishment at C=10 speeds up early learning.
#[test]
fn criterion_05_continuous_early_speedup() {
    let run = shaped_run(Schedule::Continuous { c: 10.0 });
    let early_s = run.curve.range_mean(EARLY);
    let early_b = baseline().curve.range_mean(EARLY);
    assert!(
        early_s < early_b,
        "early phase: cont {early_s:.2} must be below baseline {early_b:.2}"
    );
    pass(5, &format!("early {early_s:.1} < baseline {early_b:.1}"));
}

/// Criterion 6: encouragement (B=C=10) wrecks training: final-1,000
/// mean steps at least 5x the baseline's, or at least half of all
/// episodes cut off at the step cap.
#[test]
fn criterion_06_encouragement_breaks_training() {
    let run = shaped_run(Schedule::Encouragement { c: 10.0, bonus: 10.0 });
    let late_s = run.curve.range_mean(FINAL);
    let late_b = baseline().curve.range_mean(FINAL);
    let trunc = run.truncation_rate();
    assert!(
        late_s >= 5.0 * late_b || trunc >= 0.5,
        "encouragement final-1000 mean {late_s:.2} vs baseline {late_b:.2} (ratio {:.2}, needs >= 5) and \
         truncation rate {:.1}% (needs >= 50%). Known limitation: the collapse is real but ignites after \
         this horizon at 10x10 visit density. Measured on the identical configuration extended to 80,000 \
         episodes: smoothed mean steps 47 (ep 10k), 50 (20k), 67 (30k), 432 (40k), 1173 (80k) and rising, \
         i.e. the learner only discovers the positive-feedback farming loop (earn +9 for teacher-optimal \
         moves, dodge instead of capturing once values pass the +10 terminal payoff) around episode \
         30-40k. At 20,000 episodes every one of the 10 trials sits in 44-54 mean steps with zero \
         truncations. See the decisions ledger.",
        late_s / late_b,
        100.0 * trunc
    );
    pass(
        6,
        &format!(
            "final {late_s:.1} vs baseline {late_b:.1} (ratio {:.1}) / truncation {:.0}%",
            late_s / late_b,
            100.0 * trunc
        ),
    );
}

/// Criterion 7: under the anti-optimal C sweep {1, 10, 50}, plateau
/// quality does not degrade as C grows: final-1,000 per-trial means are
/// non-increasing in C within one pooled standard deviation. Early-phase
/// speedup has the same monotone shape (it saturates above C=10, so the
/// check carries the same pooled-std allowance).
#[test]
fn criterion_07_anti_sweep_late_phase_monotone() {
    let config = ExperimentConfig {
        teacher_source: TeacherSource::TrainFresh {
            seed: TEACHER_SEED,
            episodes: 20_000,
        },
        ..desk_config(Schedule::AntiOptimal { c: 0.0 })
    };
    let c_values = [1.0, 10.0, 50.0];
    let runs = sweep(&config, &c_values).unwrap();
    let phase_stats = |range: Range<usize>| -> Vec<(f64, f64)> {
        runs.iter()
            .map(|(_, r)| {
                let per_trial = r.per_trial_range_means(range.clone());
                (mean(&per_trial), pop_std(&per_trial))
            })
            .collect()
    };
    let mut report = Vec::new();
    for (label, stats) in [("final", phase_stats(FINAL)), ("early", phase_stats(EARLY))] {
        for i in 0..c_values.len() - 1 {
            let (lo_mean, lo_std) = stats[i];
            let (hi_mean, hi_std) = stats[i + 1];
            let pooled = ((lo_std * lo_std + hi_std * hi_std) / 2.0).sqrt();
            assert!(
                hi_mean <= lo_mean + pooled,
                "{label} mean at C={} is {hi_mean:.2}, above C={} ({lo_mean:.2}) by more than pooled std {pooled:.2}",
                c_values[i + 1],
                c_values[i]
            );
        }
        report.push(format!(
            "{label} {:.1} -> {:.1} -> {:.1}",
            stats[0].0, stats[1].0, stats[2].0
        ));
    }
    pass(7, &format!("means non-increasing in C ({})", report.join("; ")));
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_pursuit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn cli_ok(args: &[&str]) {
    let out = cli(args);
    assert!(
        out.status.success(),
        "pursuit {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read_dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let name = entry.file_name().into_string().unwrap();
        if entry.file_type().unwrap().is_dir() {
            for (sub, bytes) in read_dir_files(&entry.path()) {
                files.push((format!("{name}/{sub}"), bytes));
            }
        } else {
            files.push((name.clone(), fs::read(entry.path()).unwrap()));
        }
    }
    files.sort();
    files
}

fn assert_identical_trees(a: &Path, b: &Path) {
    let fa = read_dir_files(a);
    let fb = read_dir_files(b);
    assert_eq!(
        fa.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        fb.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "file sets differ"
    );
    for ((name, bytes_a), (_, bytes_b)) in fa.iter().zip(&fb) {
        assert_eq!(bytes_a, bytes_b, "{name} differs between runs");
        assert!(!bytes_a.is_empty(), "{name} is empty");
    }
}

/// Criterion 8: identical flags and seed give byte-identical artifacts,
/// and the thread count has no effect on output.
#[test]
fn criterion_08_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let teacher_a = dir.join("teacher_a.qtable");
    let teacher_b = dir.join("teacher_b.qtable");
    let train = |path: &Path| {
        cli_ok(&[
            "train-advisor", "--grid", "5x5", "--episodes", "2000",
            "--seed", "9", "--out", path.to_str().unwrap(),
        ]);
    };
    train(&teacher_a);
    train(&teacher_b);
    assert_eq!(
        fs::read(&teacher_a).unwrap(),
        fs::read(&teacher_b).unwrap(),
        "teacher files differ between identical invocations"
    );

    let run_args = |out: &Path, jobs: &str| {
        cli_ok(&[
            "--jobs", jobs, "run", "--schedule", "sub", "--c", "10",
            "--teacher", teacher_a.to_str().unwrap(), "--grid", "5x5",
            "--episodes", "1500", "--trials", "4", "--seed", "11",
            "--out", out.to_str().unwrap(),
        ]);
    };
    let (r1, r2, r3) = (dir.join("run1"), dir.join("run2"), dir.join("run3"));
    run_args(&r1, "1");
    run_args(&r2, "1");
    run_args(&r3, "4");
    assert_identical_trees(&r1, &r2);
    assert_identical_trees(&r1, &r3);

    let sweep_args = |out: &Path, jobs: &str| {
        cli_ok(&[
            "--jobs", jobs, "sweep", "--schedule", "anti", "--c-list", "1,10",
            "--teacher", teacher_a.to_str().unwrap(), "--grid", "5x5",
            "--episodes", "800", "--trials", "3", "--seed", "5",
            "--out", out.to_str().unwrap(),
        ]);
    };
    let (s1, s2) = (dir.join("sweep1"), dir.join("sweep2"));
    sweep_args(&s1, "2");
    sweep_args(&s2, "1");
    assert_identical_trees(&s1, &s2);

    pass(8, "train-advisor, run and sweep byte-identical across reruns and --jobs settings");
}

/// Criterion 9: every schedule at zero magnitude reproduces the None
/// baseline record-for-record under the same seed.
#[test]
fn criterion_09_zero_shaping_identity() {
    let config = ExperimentConfig {
        episodes: 1_000,
        trials: 2,
        ..desk_config(Schedule::None)
    };
    let plain: Vec<_> = (0..config.trials)
        .map(|i| run_trial(&config, None, config.trial_seed(i)).unwrap())
        .collect();
    for schedule in [
        Schedule::Suboptimal { c: 0.0 },
        Schedule::AntiOptimal { c: 0.0 },
        Schedule::Continuous { c: 0.0 },
        Schedule::Encouragement { c: 0.0, bonus: 0.0 },
    ] {
        let shaped_config = ExperimentConfig {
            schedule,
            ..config.clone()
        };
        for (i, plain_records) in plain.iter().enumerate() {
            let records =
                run_trial(&shaped_config, Some(teacher()), shaped_config.trial_seed(i)).unwrap();
            assert_eq!(
                &records, plain_records,
                "schedule {} at zero magnitude diverged from baseline",
                schedule.name()
            );
        }
    }
    pass(9, "sub/anti/cont/enc at C=0 (B=0) replay the baseline exactly");
}

/// Criterion 10: the property suites. Exhaustive on small grids,
/// 3-sigma where sampling is involved.
#[test]
fn criterion_10_property_suites() {
    let mut rng = seeded_rng(31);

    // Clamping: every move stays in bounds and shifts one cell at most,
    // along one axis only. Exhaustive on two grid shapes.
    for g in [GridConfig::new(3, 3).unwrap(), GridConfig::new(4, 3).unwrap()] {
        for x in 0..g.width() {
            for y in 0..g.height() {
                for a in Action::ALL {
                    let p = Position::new(x, y);
                    let n = g.clamped_move(p, a);
                    assert!(g.contains(n));
                    assert!(n.x.abs_diff(p.x) + n.y.abs_diff(p.y) <= 1);
                }
            }
        }
    }

    // Transition probabilities: sum exactly 1 over every (state, action),
    // rewards follow the capture dichotomy, prey never sits on the hunter
    // in a non-terminal outcome. Exhaustive on 3x3.
    let g3 = GridConfig::new(3, 3).unwrap();
    for idx in 0..g3.state_count() {
        let s = state_from_index(idx, g3);
        if s.is_capture() {
            continue;
        }
        for a in Action::ALL {
            let ts = transition_distribution(s, a, g3).unwrap();
            assert_eq!(ts.iter().map(|t| t.probability).sum::<f64>(), 1.0);
            for t in &ts {
                assert_eq!(t.reward == 0.0, t.next_state.is_capture());
                assert!(t.reward == 0.0 || t.reward == -1.0);
            }
        }
    }

    // Sampled step outcomes agree with the enumeration within 3 sigma,
    // including the prey re-draw corner case.
    let cases = [
        (g3, GameState::new(Position::new(0, 1), Position::new(2, 1)), Action::Right),
        (
            GridConfig::new(2, 2).unwrap(),
            GameState::new(Position::new(0, 0), Position::new(1, 1)),
            Action::Down,
        ),
    ];
    let n = 100_000;
    for (g, s, a) in cases {
        let ts = transition_distribution(s, a, g).unwrap();
        let mut counts = vec![0usize; ts.len()];
        for _ in 0..n {
            let out = step(s, a, g, &mut rng).unwrap();
            assert_eq!(out.terminal, out.reward == 0.0);
            if !out.terminal {
                assert_ne!(out.next_state.prey, out.next_state.hunter);
            }
            let slot = ts
                .iter()
                .position(|t| t.next_state == out.next_state)
                .expect("every sampled outcome is enumerated");
            counts[slot] += 1;
        }
        for (t, &c) in ts.iter().zip(&counts) {
            let expected = n as f64 * t.probability;
            let sigma = (n as f64 * t.probability * (1.0 - t.probability)).sqrt();
            assert!(
                (c as f64 - expected).abs() <= 3.0 * sigma.max(1.0),
                "count {c} vs {expected:.1} +/- {sigma:.1}"
            );
        }
    }

    // State indexing is a bijection (exhaustive round-trip on 4x4).
    let g4 = GridConfig::new(4, 4).unwrap();
    let mut seen = vec![false; g4.state_count()];
    for idx in 0..g4.state_count() {
        let rt = state_index(state_from_index(idx, g4), g4);
        assert_eq!(rt, idx);
        assert!(!seen[idx]);
        seen[idx] = true;
    }

    // Update fixed point and monotone interpolation on random tuples.
    let probe = GameState::new(Position::new(0, 0), Position::new(2, 2));
    let next = GameState::new(Position::new(1, 0), Position::new(2, 2));
    for _ in 0..1_000 {
        let old = rng.random::<f64>() * -200.0;
        let next_max = rng.random::<f64>() * -200.0;
        let reward = rng.random::<f64>() * -5.0;
        let alpha = rng.random::<f64>().max(1e-3);
        let params = LearningParams { alpha, gamma: 1.0, epsilon: 0.0 };
        let target = reward + next_max;

        let mut q = QTable::zeros(g3);
        for a in Action::ALL {
            q.set(next, a, next_max);
        }
        q.set(probe, Action::Down, target);
        let v = update(&mut q, probe, Action::Down, reward, next, false, &params).unwrap();
        assert!((v - target).abs() < 1e-9, "fixed point drifted: {v} vs {target}");

        q.set(probe, Action::Down, old);
        let v = update(&mut q, probe, Action::Down, reward, next, false, &params).unwrap();
        let (lo, hi) = if old <= target { (old, target) } else { (target, old) };
        assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
    }

    // Epsilon = 0 selection always lands in the argmax set.
    for _ in 0..1_000 {
        let row: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * -50.0);
        let mut q = QTable::zeros(g3);
        for (code, v) in row.into_iter().enumerate() {
            q.set(probe, Action::from_code(code).unwrap(), v);
        }
        let a = select_action(&q, probe, 0.0, &mut rng);
        let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(row[a.code()], best);
    }

    // Schedules: shifting a row changes nothing, scaling C scales the
    // punishment (exactly, for power-of-two factors).
    for _ in 0..1_000 {
        let row: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>() * -50.0);
        let shift = rng.random::<f64>() * 40.0 - 20.0;
        let c = rng.random::<f64>() * 30.0;
        let k = [0.5, 2.0, 4.0][rng.random_range(0..3)];

        let make = |r: [f64; 4]| {
            let mut q = QTable::zeros(g3);
            for (code, v) in r.into_iter().enumerate() {
                q.set(probe, Action::from_code(code).unwrap(), v);
            }
            Teacher::from_table(q)
        };
        let t = make(row);
        let t_shifted = make(std::array::from_fn(|i| row[i] + shift));
        for a in Action::ALL {
            for schedule in [Schedule::Suboptimal { c }, Schedule::AntiOptimal { c }] {
                let base = t.punishment(&schedule, probe, a).unwrap();
                assert_eq!(base, t_shifted.punishment(&schedule, probe, a).unwrap());
                let scaled = t.punishment(&schedule.with_c(k * c), probe, a).unwrap();
                assert_eq!(scaled, k * base);
            }
            let cont = Schedule::Continuous { c };
            let base = t.punishment(&cont, probe, a).unwrap();
            let shifted = t_shifted.punishment(&cont, probe, a).unwrap();
            assert!((base - shifted).abs() < 1e-9);
            let scaled = t.punishment(&cont.with_c(k * c), probe, a).unwrap();
            assert_eq!(scaled, k * base);
        }
    }

    // During shaped training with costs in [0, C], every table entry
    // stays finite and above -(step cap) * (1 + C), checked each epoch.
    let small_teacher = {
        let mut r = seeded_rng(1);
        train_teacher(g3, &LearningParams::default(), 2_000, &mut r).unwrap()
    };
    let c = 10.0;
    let schedule = Schedule::Suboptimal { c };
    let params = LearningParams::default();
    let step_cap: u32 = 10_000;
    let bound = -(step_cap as f64) * (1.0 + c);
    let mut q = QTable::zeros(g3);
    let mut train_rng = seeded_rng(2);
    for episode in 0..2_000 {
        let mut state = reset(g3, &mut train_rng);
        let mut steps = 0u32;
        loop {
            let a = select_action(&q, state, params.epsilon, &mut train_rng);
            let out = step(state, a, g3, &mut train_rng).unwrap();
            let pun = small_teacher.punishment(&schedule, state, a).unwrap();
            update(&mut q, state, a, out.reward - pun, out.next_state, out.terminal, &params)
                .unwrap();
            steps += 1;
            if out.terminal || steps >= step_cap {
                break;
            }
            state = out.next_state;
        }
        if episode % 200 == 199 {
            for idx in 0..q.n_states() {
                for &v in q.row_by_index(idx) {
                    assert!(v.is_finite() && v >= bound, "entry {v} out of [{bound}, 0]");
                }
            }
        }
    }

    pass(10, "clamping, dichotomy, normalization + 3-sigma sampling, bijection, update, selection, schedule invariances, bounded tables");
}
