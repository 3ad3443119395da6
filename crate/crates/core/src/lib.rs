//! A small laboratory for studying teacher-to-student transfer in tabular
//! reinforcement learning.
//!
//! A hunter chases a randomly moving prey on a bounded grid and learns with
//! tabular Q-learning. A previously trained "teacher" agent can shape the
//! learner's reward signal by punishing actions it considers poor, under
//! several punishment schedules. The [`experiment`] module runs seeded
//! multi-trial comparisons between the shaped learners and the plain
//! baseline and persists the resulting learning curves as CSV.
//!
//! Modules:
//! - [`gridworld`]: the pursuit environment and an exact transition
//!   enumerator.
//! - [`qlearn`]: the Q-table, epsilon-greedy control, the one-step update,
//!   and exact dynamic-programming oracles for verification.
//! - [`advisor`]: teacher training and the punishment schedules.
//! - [`experiment`]: trial execution, curve aggregation, sweeps, CSV output.

pub mod advisor;
pub mod error;
pub mod experiment;
pub mod gridworld;
pub mod qlearn;

pub use advisor::{shaped_reward, train_teacher, Schedule, Teacher};
pub use error::{Error, Result};
pub use experiment::{
    compare, run_experiment, run_trial, sweep, EpisodeRecord, ExperimentConfig, ExperimentRun,
    LearningCurve, TeacherSource,
};
pub use gridworld::{
    reset, state_from_index, state_index, step, transition_distribution, Action, GameState,
    GridConfig, Position, StepOutcome, Transition,
};
pub use qlearn::{
    evaluate_policy, greedy_action, select_action, update, value_iteration_oracle, LearningParams,
    OracleSolution, QTable,
};

/// The simulation PRNG: `Pcg64Mcg` (PCG family, 128-bit MCG state with
/// XSL-RR output). The algorithm is fixed and its value stream is stable,
/// so a given seed reproduces the same run on every platform.
pub type SimRng = rand_pcg::Pcg64Mcg;

/// Build the simulation RNG from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}
