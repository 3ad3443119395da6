//! Teacher training and punishment schedules.
//!
//! A teacher is a frozen Q-table from a previously trained agent. While a
//! student learns, the teacher scores each chosen action against its own
//! row for that state and the resulting punishment is subtracted from the
//! environment reward before the student's update sees it.
//!
//! Schedules (`C` is the punishment magnitude, `B` the encouragement
//! bonus):
//! - `Suboptimal`: cost `C` whenever the chosen action is not tied for the
//!   teacher's best.
//! - `AntiOptimal`: cost `C` only when the chosen action is tied for the
//!   teacher's worst.
//! - `Continuous`: cost `C * (max_b Q(s,b) - Q(s,a))`, zero exactly on the
//!   teacher's best actions.
//! - `Encouragement`: bonus `B` on the teacher's best actions combined
//!   with the anti-optimal cost `C` on its worst.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gridworld::{reset, step, Action, GameState, GridConfig};
use crate::qlearn::{select_action, update, LearningParams, QTable};
use crate::SimRng;

/// Step budget per training episode, so a pathological early policy
/// cannot stall training.
const TRAINING_STEP_CAP: u32 = 10_000;

/// A frozen advisor: the Q-table of a trained agent, consulted but never
/// mutated while a student learns.
#[derive(Debug, Clone, PartialEq)]
pub struct Teacher {
    q: QTable,
}

impl Teacher {
    /// Wrap an existing table, e.g. one loaded from disk.
    pub fn from_table(q: QTable) -> Self {
        Self { q }
    }

    pub fn grid(&self) -> GridConfig {
        self.q.grid()
    }

    pub fn table(&self) -> &QTable {
        &self.q
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.q.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(Self {
            q: QTable::load(path)?,
        })
    }

    /// Signed shaping value for taking `action` in `state`. Positive
    /// values are costs; `Encouragement` can return a negative value,
    /// which becomes a bonus under [`shaped_reward`]. Ties count as both
    /// optimal and worst where applicable, so an all-equal row (an
    /// unvisited state) punishes nothing under `Suboptimal` and every
    /// action under `AntiOptimal`.
    pub fn punishment(&self, schedule: &Schedule, state: GameState, action: Action) -> Result<f64> {
        let grid = self.grid();
        if !grid.contains(state.hunter) || !grid.contains(state.prey) {
            return Err(Error::StateOutsideGrid { grid });
        }
        if state.is_capture() {
            return Err(Error::TerminalState);
        }
        let row = self.q.row(state);
        let chosen = row[action.code()];
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = row.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(match *schedule {
            Schedule::None => 0.0,
            Schedule::Suboptimal { c } => {
                if chosen < max {
                    c
                } else {
                    0.0
                }
            }
            Schedule::AntiOptimal { c } => {
                if chosen == min {
                    c
                } else {
                    0.0
                }
            }
            Schedule::Continuous { c } => c * (max - chosen),
            Schedule::Encouragement { c, bonus } => {
                let mut pun = 0.0;
                if chosen == max {
                    pun -= bonus;
                }
                if chosen == min {
                    pun += c;
                }
                pun
            }
        })
    }
}

/// How the teacher translates its row for a state into a punishment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// No shaping; the student sees raw environment rewards.
    None,
    Suboptimal { c: f64 },
    AntiOptimal { c: f64 },
    Continuous { c: f64 },
    Encouragement { c: f64, bonus: f64 },
}

impl Schedule {
    /// Short stable name, used in file names and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            Schedule::None => "none",
            Schedule::Suboptimal { .. } => "sub",
            Schedule::AntiOptimal { .. } => "anti",
            Schedule::Continuous { .. } => "cont",
            Schedule::Encouragement { .. } => "enc",
        }
    }

    pub fn needs_teacher(&self) -> bool {
        !matches!(self, Schedule::None)
    }

    /// The same schedule kind with magnitude `c` (the encouragement bonus
    /// is left untouched). `None` stays `None`.
    pub fn with_c(&self, c: f64) -> Schedule {
        match *self {
            Schedule::None => Schedule::None,
            Schedule::Suboptimal { .. } => Schedule::Suboptimal { c },
            Schedule::AntiOptimal { .. } => Schedule::AntiOptimal { c },
            Schedule::Continuous { .. } => Schedule::Continuous { c },
            Schedule::Encouragement { bonus, .. } => Schedule::Encouragement { c, bonus },
        }
    }

    /// Magnitudes must be finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        let check = |label: &str, value: f64| {
            if value.is_finite() && value >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidSchedule(format!(
                    "{label} must be finite and >= 0, got {value}"
                )))
            }
        };
        match *self {
            Schedule::None => Ok(()),
            Schedule::Suboptimal { c }
            | Schedule::AntiOptimal { c }
            | Schedule::Continuous { c } => check("C", c),
            Schedule::Encouragement { c, bonus } => {
                check("C", c)?;
                check("B", bonus)
            }
        }
    }
}

/// Compose the environment reward with a punishment. The student learns
/// from the result; the raw reward is logged unchanged.
pub fn shaped_reward(env_reward: f64, pun: f64) -> f64 {
    env_reward - pun
}

/// Train a teacher by plain Q-learning (no shaping) for `episodes`
/// episodes and freeze its table.
pub fn train_teacher(
    grid: GridConfig,
    params: &LearningParams,
    episodes: usize,
    rng: &mut SimRng,
) -> Result<Teacher> {
    Ok(train_teacher_traced(grid, params, episodes, rng)?.0)
}

/// Like [`train_teacher`], also reporting steps-to-capture per training
/// episode so callers can summarize how good the teacher got.
pub fn train_teacher_traced(
    grid: GridConfig,
    params: &LearningParams,
    episodes: usize,
    rng: &mut SimRng,
) -> Result<(Teacher, Vec<u32>)> {
    if episodes == 0 {
        return Err(Error::NoEpisodes);
    }
    params.validate()?;
    let mut q = QTable::zeros(grid);
    let mut steps_log = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut state = reset(grid, rng);
        let mut steps: u32 = 0;
        loop {
            let action = select_action(&q, state, params.epsilon, rng);
            let out = step(state, action, grid, rng)?;
            update(&mut q, state, action, out.reward, out.next_state, out.terminal, params)?;
            steps += 1;
            if out.terminal || steps >= TRAINING_STEP_CAP {
                break;
            }
            state = out.next_state;
        }
        steps_log.push(steps);
    }
    Ok((Teacher { q }, steps_log))
}
