//! Seeded multi-trial experiment execution, curve aggregation, parameter
//! sweeps, and CSV persistence.
//!
//! A trial is one student learning for a fixed number of episodes; an
//! experiment runs several trials with seeds `base_seed, base_seed + 1,
//! ...` and averages their per-episode steps-to-capture into a
//! [`LearningCurve`]. Everything is a pure function of the configuration:
//! the same config yields byte-identical CSV artifacts, regardless of how
//! many threads the trials run on.

use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::advisor::{shaped_reward, train_teacher, Schedule, Teacher};
use crate::error::{Error, Result};
use crate::gridworld::{reset, step, GridConfig};
use crate::qlearn::{select_action, update, LearningParams, QTable};
use crate::seeded_rng;

pub const DEFAULT_EPISODES: usize = 20_000;
pub const DEFAULT_STEP_CAP: u32 = 10_000;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_SMOOTHING_WINDOW: usize = 500;
pub const DEFAULT_BASE_SEED: u64 = 42;

/// Where the teacher for a shaped run comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TeacherSource {
    /// No teacher; only usable with [`Schedule::None`].
    None,
    /// Load a table previously written by a training run.
    Path(PathBuf),
    /// Train one on the fly with the experiment's own grid and params.
    TrainFresh { seed: u64, episodes: usize },
}

/// Every knob of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub params: LearningParams,
    pub schedule: Schedule,
    pub episodes: usize,
    /// Episodes are cut off (and flagged) after this many steps.
    pub step_cap: u32,
    pub trials: usize,
    /// Trial `i` runs with seed `base_seed + i`.
    pub base_seed: u64,
    pub smoothing_window: usize,
    pub teacher_source: TeacherSource,
}

impl ExperimentConfig {
    /// Defaults: 20,000 episodes, 10 trials, step cap 10,000, smoothing
    /// window 500, base seed 42, no schedule and no teacher.
    pub fn new(grid: GridConfig) -> Self {
        Self {
            grid,
            params: LearningParams::default(),
            schedule: Schedule::None,
            episodes: DEFAULT_EPISODES,
            step_cap: DEFAULT_STEP_CAP,
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_BASE_SEED,
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            teacher_source: TeacherSource::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.schedule.validate()?;
        let positive = |label: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidConfig(format!("{label} must be at least 1")))
            } else {
                Ok(())
            }
        };
        positive("episodes", self.episodes)?;
        positive("trials", self.trials)?;
        positive("step_cap", self.step_cap as usize)?;
        positive("smoothing_window", self.smoothing_window)?;
        Ok(())
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// Per-episode log entry of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    /// Steps until capture, or the step cap when the episode was cut off.
    pub steps: u32,
    /// Sum of raw environment rewards: `-(steps - 1)` when captured,
    /// `-step_cap` when truncated.
    pub env_return: f64,
    /// Sum of the shaped rewards the learner actually updated on.
    pub shaped_return: f64,
    pub truncated: bool,
}

/// Resolve the configured teacher source. `Schedule::None` needs no
/// teacher and resolves to `None` without touching the source.
pub fn resolve_teacher(config: &ExperimentConfig) -> Result<Option<Teacher>> {
    if !config.schedule.needs_teacher() {
        return Ok(None);
    }
    match &config.teacher_source {
        TeacherSource::None => Err(Error::MissingTeacher(config.schedule.name())),
        TeacherSource::Path(path) => Ok(Some(Teacher::load(path)?)),
        TeacherSource::TrainFresh { seed, episodes } => {
            let mut rng = seeded_rng(*seed);
            Ok(Some(train_teacher(config.grid, &config.params, *episodes, &mut rng)?))
        }
    }
}

/// Run one student for the configured episode count, recording every
/// episode.
///
/// The loop per step: select an action epsilon-greedily, step the
/// environment, ask the teacher to punish the chosen (state, action),
/// subtract the punishment from the reward, and update the student's
/// table with the shaped value. Deterministic given `seed`.
pub fn run_trial(
    config: &ExperimentConfig,
    teacher: Option<&Teacher>,
    seed: u64,
) -> Result<Vec<EpisodeRecord>> {
    config.validate()?;
    let teacher = if config.schedule.needs_teacher() {
        let t = teacher.ok_or(Error::MissingTeacher(config.schedule.name()))?;
        if t.grid() != config.grid {
            return Err(Error::GridMismatch {
                teacher: t.grid(),
                env: config.grid,
            });
        }
        Some(t)
    } else {
        None
    };

    let mut rng = seeded_rng(seed);
    let mut q = QTable::zeros(config.grid);
    let mut records = Vec::with_capacity(config.episodes);
    for episode in 0..config.episodes {
        let mut state = reset(config.grid, &mut rng);
        let mut steps: u32 = 0;
        let mut env_return = 0.0;
        let mut shaped_return = 0.0;
        let mut truncated = false;
        loop {
            let action = select_action(&q, state, config.params.epsilon, &mut rng);
            let out = step(state, action, config.grid, &mut rng)?;
            let pun = match teacher {
                Some(t) => t.punishment(&config.schedule, state, action)?,
                None => 0.0,
            };
            let r = shaped_reward(out.reward, pun);
            update(&mut q, state, action, r, out.next_state, out.terminal, &config.params)?;
            steps += 1;
            env_return += out.reward;
            shaped_return += r;
            if out.terminal {
                break;
            }
            if steps >= config.step_cap {
                truncated = true;
                break;
            }
            state = out.next_state;
        }
        records.push(EpisodeRecord {
            episode,
            steps,
            env_return,
            shaped_return,
            truncated,
        });
    }
    Ok(records)
}

/// Seed-averaged steps-to-capture per episode, plus a trailing-window
/// smoothed copy of the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub mean_steps: Vec<f64>,
    /// Population standard deviation across trials.
    pub std_steps: Vec<f64>,
    pub smoothed_mean_steps: Vec<f64>,
    pub smoothing_window: usize,
}

impl LearningCurve {
    /// Aggregate per-trial records episode-by-episode.
    pub fn from_trials(trials: &[Vec<EpisodeRecord>], window: usize) -> Result<Self> {
        if trials.is_empty() {
            return Err(Error::InvalidConfig("no trials to aggregate".into()));
        }
        if window == 0 {
            return Err(Error::InvalidConfig("smoothing window must be at least 1".into()));
        }
        let episodes = trials[0].len();
        if trials.iter().any(|t| t.len() != episodes) {
            return Err(Error::InvalidConfig("trials have unequal episode counts".into()));
        }
        let mut mean_steps = Vec::with_capacity(episodes);
        let mut std_steps = Vec::with_capacity(episodes);
        for e in 0..episodes {
            let values: Vec<f64> = trials.iter().map(|t| t[e].steps as f64).collect();
            let (m, s) = mean_and_std(&values);
            mean_steps.push(m);
            std_steps.push(s);
        }
        let smoothed_mean_steps = smooth_series(&mean_steps, window);
        Ok(Self {
            mean_steps,
            std_steps,
            smoothed_mean_steps,
            smoothing_window: window,
        })
    }

    pub fn len(&self) -> usize {
        self.mean_steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_steps.is_empty()
    }

    /// Mean of the per-episode means over a half-open episode range.
    pub fn range_mean(&self, range: Range<usize>) -> f64 {
        let slice = &self.mean_steps[range];
        slice.iter().sum::<f64>() / slice.len() as f64
    }
}

/// Recompute the smoothed series with a different trailing window.
/// Window 1 is the identity.
pub fn smooth(curve: &LearningCurve, window: usize) -> Result<LearningCurve> {
    if window == 0 {
        return Err(Error::InvalidConfig("smoothing window must be at least 1".into()));
    }
    Ok(LearningCurve {
        smoothed_mean_steps: smooth_series(&curve.mean_steps, window),
        smoothing_window: window,
        ..curve.clone()
    })
}

/// Trailing moving average: entry `i` averages the last `window` values,
/// or the whole prefix while fewer exist.
pub fn smooth_series(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    (0..series.len())
        .map(|i| {
            let start = (i + 1).saturating_sub(window);
            let slice = &series[start..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Everything one experiment produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub config: ExperimentConfig,
    pub trials: Vec<Vec<EpisodeRecord>>,
    pub curve: LearningCurve,
}

impl ExperimentRun {
    /// Fraction of all episodes (across trials) that hit the step cap.
    pub fn truncation_rate(&self) -> f64 {
        let total: usize = self.trials.iter().map(Vec::len).sum();
        let truncated: usize = self
            .trials
            .iter()
            .flat_map(|t| t.iter())
            .filter(|r| r.truncated)
            .count();
        truncated as f64 / total as f64
    }

    /// Per-trial mean steps over a half-open episode range.
    pub fn per_trial_range_means(&self, range: Range<usize>) -> Vec<f64> {
        self.trials
            .iter()
            .map(|t| {
                let slice = &t[range.clone()];
                slice.iter().map(|r| r.steps as f64).sum::<f64>() / slice.len() as f64
            })
            .collect()
    }

    /// Write `trial_NNN.csv` per trial plus `aggregated.csv` into `dir`,
    /// creating it if needed.
    pub fn write_csv(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        for (i, records) in self.trials.iter().enumerate() {
            write_trial_csv(&dir.join(format!("trial_{i:03}.csv")), records)?;
        }
        write_aggregated_csv(&dir.join("aggregated.csv"), &self.curve)
    }
}

/// Run all trials and aggregate, resolving the teacher from the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentRun> {
    let teacher = resolve_teacher(config)?;
    run_experiment_with_teacher(config, teacher.as_ref())
}

/// Run all trials against an already resolved teacher.
///
/// Trials execute in parallel on the current rayon pool; results are
/// collected by trial index, so thread count and scheduling cannot change
/// the output.
pub fn run_experiment_with_teacher(
    config: &ExperimentConfig,
    teacher: Option<&Teacher>,
) -> Result<ExperimentRun> {
    config.validate()?;
    let trials: Vec<Vec<EpisodeRecord>> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, teacher, config.trial_seed(i)))
        .collect::<Result<_>>()?;
    let curve = LearningCurve::from_trials(&trials, config.smoothing_window)?;
    Ok(ExperimentRun {
        config: config.clone(),
        trials,
        curve,
    })
}

/// [`run_experiment`] plus CSV artifacts in `dir`.
pub fn run_experiment_to_dir(config: &ExperimentConfig, dir: &Path) -> Result<ExperimentRun> {
    let run = run_experiment(config)?;
    run.write_csv(dir)?;
    Ok(run)
}

/// Run the experiment once per magnitude in `c_values`, with otherwise
/// identical config and the same base seed, so the runs pair up and the
/// magnitude is the only difference. The teacher is resolved once and
/// shared.
pub fn sweep(config: &ExperimentConfig, c_values: &[f64]) -> Result<Vec<(f64, ExperimentRun)>> {
    if c_values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one C value".into()));
    }
    let teacher = resolve_teacher(config)?;
    c_values
        .iter()
        .map(|&c| {
            let sub_config = ExperimentConfig {
                schedule: config.schedule.with_c(c),
                ..config.clone()
            };
            Ok((c, run_experiment_with_teacher(&sub_config, teacher.as_ref())?))
        })
        .collect()
}

/// One row of [`compare`]'s output.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub range_start: usize,
    pub range_end: usize,
    pub mean_steps: f64,
    /// Population standard deviation of the per-episode means within the
    /// range.
    pub std_steps: f64,
    /// Difference to the first (baseline) curve's mean over the same
    /// range.
    pub delta_vs_baseline: f64,
}

/// Summarize named curves over half-open episode ranges. The first curve
/// is the baseline the deltas are taken against.
pub fn compare(
    curves: &[(&str, &LearningCurve)],
    ranges: &[Range<usize>],
) -> Result<Vec<SummaryRow>> {
    let (_, first) = curves
        .first()
        .ok_or_else(|| Error::InvalidConfig("compare needs at least one curve".into()))?;
    let episodes = first.len();
    if curves.iter().any(|(_, c)| c.len() != episodes) {
        return Err(Error::InvalidConfig("curves have unequal lengths".into()));
    }
    for range in ranges {
        if range.start >= range.end || range.end > episodes {
            return Err(Error::InvalidConfig(format!(
                "range {}..{} out of bounds for {episodes} episodes",
                range.start, range.end
            )));
        }
    }
    let mut rows = Vec::with_capacity(curves.len() * ranges.len());
    for range in ranges {
        let baseline_mean = stats_over(first, range).0;
        for (name, curve) in curves {
            let (mean, std) = stats_over(curve, range);
            rows.push(SummaryRow {
                name: (*name).to_string(),
                range_start: range.start,
                range_end: range.end,
                mean_steps: mean,
                std_steps: std,
                delta_vs_baseline: mean - baseline_mean,
            });
        }
    }
    Ok(rows)
}

fn stats_over(curve: &LearningCurve, range: &Range<usize>) -> (f64, f64) {
    mean_and_std(&curve.mean_steps[range.clone()])
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `episode,steps,env_return,shaped_return,truncated`, one row per
/// episode, full round-trip precision.
pub fn write_trial_csv(path: &Path, records: &[EpisodeRecord]) -> Result<()> {
    let mut text = String::with_capacity(records.len() * 24 + 48);
    text.push_str("episode,steps,env_return,shaped_return,truncated\n");
    for r in records {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            r.episode, r.steps, r.env_return, r.shaped_return, r.truncated
        );
    }
    write_file(path, &text)
}

/// `episode,mean_steps,std_steps,smoothed_mean_steps`.
pub fn write_aggregated_csv(path: &Path, curve: &LearningCurve) -> Result<()> {
    let mut text = String::with_capacity(curve.len() * 32 + 48);
    text.push_str("episode,mean_steps,std_steps,smoothed_mean_steps\n");
    for e in 0..curve.len() {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            e, curve.mean_steps[e], curve.std_steps[e], curve.smoothed_mean_steps[e]
        );
    }
    write_file(path, &text)
}

/// `name,range_start,range_end,mean_steps,std_steps,delta_vs_baseline`.
pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut text = String::new();
    text.push_str("name,range_start,range_end,mean_steps,std_steps,delta_vs_baseline\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            r.name, r.range_start, r.range_end, r.mean_steps, r.std_steps, r.delta_vs_baseline
        );
    }
    write_file(path, &text)
}
