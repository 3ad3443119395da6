//! Tabular Q-learning and exact dynamic-programming oracles.
//!
//! The learner keeps a dense action-value table over every observation
//! tuple, behaves epsilon-greedily, and applies the one-step update
//! `Q(s,a) += alpha * (r + gamma * max_a Q(s',a) - Q(s,a))`, bootstrapping
//! from 0 on terminal transitions. [`value_iteration_oracle`] and
//! [`evaluate_policy`] solve the same MDP exactly over
//! [`transition_distribution`] so learned tables and policies can be
//! checked against ground truth.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::RngExt;

use crate::error::{Error, Result};
use crate::gridworld::{
    state_from_index, state_index, transition_distribution, Action, GameState, GridConfig,
    Transition,
};
use crate::SimRng;

/// Max-norm convergence threshold for the exact solvers.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// Sweep budget for the exact solvers. The dynamics are exact and the
/// state spaces tiny, so hitting this means the policy being evaluated
/// never reaches capture, not that the solve is slow.
pub const ORACLE_SWEEP_CAP: usize = 100_000;

/// Step size, discount and exploration settings, shared by teacher and
/// student.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearningParams {
    /// Step size in (0, 1].
    pub alpha: f64,
    /// Discount factor in [0, 1]; 1.0 keeps the task undiscounted.
    pub gamma: f64,
    /// Exploration probability in [0, 1].
    pub epsilon: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 1.0,
            epsilon: 0.1,
        }
    }
}

impl LearningParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must be in [0, 1], got {}",
                self.gamma
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParams(format!(
                "epsilon must be in [0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Dense action-value table: one row of four entries per observation
/// tuple, addressed by [`state_index`]. Rows start at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    grid: GridConfig,
    rows: Vec<[f64; Action::COUNT]>,
}

impl QTable {
    pub fn zeros(grid: GridConfig) -> Self {
        Self {
            grid,
            rows: vec![[0.0; Action::COUNT]; grid.state_count()],
        }
    }

    pub fn grid(&self) -> GridConfig {
        self.grid
    }

    pub fn n_states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, state: GameState) -> &[f64; Action::COUNT] {
        &self.rows[state_index(state, self.grid)]
    }

    pub fn row_by_index(&self, index: usize) -> &[f64; Action::COUNT] {
        &self.rows[index]
    }

    pub fn get(&self, state: GameState, action: Action) -> f64 {
        self.row(state)[action.code()]
    }

    pub fn set(&mut self, state: GameState, action: Action, value: f64) {
        let idx = state_index(state, self.grid);
        self.rows[idx][action.code()] = value;
    }

    /// Largest entry of the state's row.
    pub fn max_value(&self, state: GameState) -> f64 {
        row_max(self.row(state))
    }

    /// Write the table as text: a `width,height,actions` header line of
    /// values (e.g. `10,10,4`) followed by one
    /// `state_index,q0,q1,q2,q3` line per state, at full round-trip
    /// precision.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = String::with_capacity(self.rows.len() * 24);
        let _ = writeln!(
            text,
            "{},{},{}",
            self.grid.width(),
            self.grid.height(),
            Action::COUNT
        );
        for (i, row) in self.rows.iter().enumerate() {
            let _ = writeln!(text, "{},{},{},{},{}", i, row[0], row[1], row[2], row[3]);
        }
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Parse a table previously written by [`QTable::save`]. Malformed
    /// input reports the 1-based line number it was found on.
    pub fn load(path: &Path) -> Result<Self> {
        let malformed = |line: usize, message: String| Error::MalformedTable {
            path: path.to_path_buf(),
            line,
            message,
        };
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut lines = text.lines().enumerate();

        let (_, header) = lines
            .next()
            .ok_or_else(|| malformed(1, "empty file".into()))?;
        let fields: Vec<&str> = header.split(',').collect();
        if fields.len() != 3 {
            return Err(malformed(1, format!("expected `width,height,actions` header, got {header:?}")));
        }
        let parse_dim = |s: &str| -> std::result::Result<usize, String> {
            s.trim().parse::<usize>().map_err(|e| format!("bad integer {s:?}: {e}"))
        };
        let width = parse_dim(fields[0]).map_err(|m| malformed(1, m))?;
        let height = parse_dim(fields[1]).map_err(|m| malformed(1, m))?;
        let actions = parse_dim(fields[2]).map_err(|m| malformed(1, m))?;
        if actions != Action::COUNT {
            return Err(malformed(1, format!("expected {} actions, got {actions}", Action::COUNT)));
        }
        let grid = GridConfig::new(width, height)
            .map_err(|e| malformed(1, e.to_string()))?;

        let mut rows = Vec::with_capacity(grid.state_count());
        for (line_no, line) in lines {
            let line_no = line_no + 1;
            if rows.len() == grid.state_count() {
                return Err(malformed(line_no, format!("expected {} rows, found more", grid.state_count())));
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 1 + Action::COUNT {
                return Err(malformed(line_no, format!("expected 5 fields, got {}", fields.len())));
            }
            let idx = parse_dim(fields[0]).map_err(|m| malformed(line_no, m))?;
            if idx != rows.len() {
                return Err(malformed(line_no, format!("expected state index {}, got {idx}", rows.len())));
            }
            let mut row = [0.0; Action::COUNT];
            for (slot, field) in row.iter_mut().zip(&fields[1..]) {
                let value: f64 = field
                    .trim()
                    .parse()
                    .map_err(|e| malformed(line_no, format!("bad value {field:?}: {e}")))?;
                if !value.is_finite() {
                    return Err(malformed(line_no, format!("non-finite value {field:?}")));
                }
                *slot = value;
            }
            rows.push(row);
        }
        if rows.len() != grid.state_count() {
            return Err(malformed(
                text.lines().count() + 1,
                format!("expected {} rows, found {}", grid.state_count(), rows.len()),
            ));
        }
        Ok(Self { grid, rows })
    }
}

fn row_max(row: &[f64; Action::COUNT]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Epsilon-greedy behavior policy. Explores uniformly with probability
/// `epsilon`; otherwise picks a maximizer of the state's row, breaking
/// ties uniformly at random so exploration is not biased toward any
/// direction.
pub fn select_action(q: &QTable, state: GameState, epsilon: f64, rng: &mut SimRng) -> Action {
    if rng.random::<f64>() < epsilon {
        return Action::ALL[rng.random_range(0..Action::COUNT)];
    }
    let row = q.row(state);
    let best = row_max(row);
    let mut tied = [0usize; Action::COUNT];
    let mut n = 0;
    for (code, &value) in row.iter().enumerate() {
        if value == best {
            tied[n] = code;
            n += 1;
        }
    }
    let code = if n == 1 {
        tied[0]
    } else {
        tied[rng.random_range(0..n)]
    };
    Action::from_code(code).expect("tied set holds valid codes")
}

/// Deterministic argmax with lowest-code tie-breaking. Punishment
/// schedules and oracle comparisons need a stable choice, unlike the
/// stochastic tie-break in [`select_action`].
pub fn greedy_action(q: &QTable, state: GameState) -> Action {
    let row = q.row(state);
    let mut best = 0;
    for code in 1..Action::COUNT {
        if row[code] > row[best] {
            best = code;
        }
    }
    Action::from_code(best).expect("argmax is a valid code")
}

/// One Q-learning backup of `Q(s,a)` toward `r + gamma * max_a Q(s',a)`.
///
/// Terminal transitions bootstrap from 0: the capture state is absorbing
/// and contributes no future value. Returns the updated entry.
pub fn update(
    q: &mut QTable,
    state: GameState,
    action: Action,
    reward: f64,
    next_state: GameState,
    terminal: bool,
    params: &LearningParams,
) -> Result<f64> {
    if !reward.is_finite() {
        return Err(Error::NonFiniteReward(reward));
    }
    let bootstrap = if terminal { 0.0 } else { q.max_value(next_state) };
    let target = reward + params.gamma * bootstrap;
    let idx = state_index(state, q.grid);
    let entry = &mut q.rows[idx][action.code()];
    *entry += params.alpha * (target - *entry);
    Ok(*entry)
}

/// Exact solution of the pursuit MDP.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    grid: GridConfig,
    /// Optimal expected return per state index; capture states stay 0.
    pub values: Vec<f64>,
    /// Optimal action values per state index.
    pub q_values: Vec<[f64; Action::COUNT]>,
    /// Lowest-code greedy policy per state index.
    pub policy: Vec<Action>,
    /// Sweeps until the max-norm change fell below tolerance.
    pub sweeps: usize,
}

impl OracleSolution {
    pub fn grid(&self) -> GridConfig {
        self.grid
    }

    /// Whether `action` is optimal in the state, up to `tolerance` on the
    /// optimal action values. Set membership is the meaningful agreement
    /// test: symmetric states have exactly tied optima, and any of the
    /// tied actions is correct.
    pub fn is_optimal(&self, state_index: usize, action: Action, tolerance: f64) -> bool {
        let row = &self.q_values[state_index];
        row[action.code()] >= row_max(row) - tolerance
    }

    /// Mean optimal expected steps-to-capture over all non-capture states.
    /// Returns relate to steps by `steps = 1 - return`: every step but the
    /// free capturing one costs 1.
    pub fn mean_optimal_steps(&self) -> f64 {
        mean_steps_from_values(&self.values, self.grid)
    }
}

/// Mean expected steps-to-capture over all non-capture states, given a
/// state-value table (`steps = 1 - return` per state).
pub fn mean_steps_from_values(values: &[f64], grid: GridConfig) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for (idx, &v) in values.iter().enumerate() {
        if state_from_index(idx, grid).is_capture() {
            continue;
        }
        total += 1.0 - v;
        count += 1;
    }
    total / count as f64
}

/// Enumerate the exact dynamics once per (state, action); capture states
/// get empty rows.
fn enumerate_transitions(grid: GridConfig) -> Result<Vec<[Vec<Transition>; Action::COUNT]>> {
    let mut all = Vec::with_capacity(grid.state_count());
    for idx in 0..grid.state_count() {
        let state = state_from_index(idx, grid);
        if state.is_capture() {
            all.push([const { Vec::new() }; Action::COUNT]);
            continue;
        }
        let mut per_action = [const { Vec::new() }; Action::COUNT];
        for action in Action::ALL {
            per_action[action.code()] = transition_distribution(state, action, grid)?;
        }
        all.push(per_action);
    }
    Ok(all)
}

fn expected_value(transitions: &[Transition], values: &[f64], gamma: f64, grid: GridConfig) -> f64 {
    transitions
        .iter()
        .map(|t| t.probability * (t.reward + gamma * values[state_index(t.next_state, grid)]))
        .sum()
}

/// Solve the MDP by Jacobi value-iteration sweeps over
/// [`transition_distribution`] until the max-norm change drops below
/// `tolerance`.
///
/// `gamma = 1` is fine here: capture terminates every episode the optimal
/// policy produces, and improper policies sink to minus infinity, so the
/// backups have a unique bounded fixed point. Capture states keep value 0,
/// which doubles as the terminal bootstrap, so the backup needs no special
/// case.
pub fn value_iteration_oracle(
    grid: GridConfig,
    gamma: f64,
    tolerance: f64,
    sweep_cap: usize,
) -> Result<OracleSolution> {
    if tolerance <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let all = enumerate_transitions(grid)?;
    let n = grid.state_count();
    let mut values = vec![0.0; n];
    for sweep in 1..=sweep_cap {
        let mut next = values.clone();
        let mut delta = 0.0f64;
        for idx in 0..n {
            if all[idx][0].is_empty() {
                continue; // capture state, pinned at 0
            }
            let best = all[idx]
                .iter()
                .map(|ts| expected_value(ts, &values, gamma, grid))
                .fold(f64::NEG_INFINITY, f64::max);
            delta = delta.max((best - values[idx]).abs());
            next[idx] = best;
        }
        values = next;
        if delta < tolerance {
            let mut q_values = vec![[0.0; Action::COUNT]; n];
            let mut policy = vec![Action::Down; n];
            for idx in 0..n {
                if all[idx][0].is_empty() {
                    continue;
                }
                for action in Action::ALL {
                    q_values[idx][action.code()] =
                        expected_value(&all[idx][action.code()], &values, gamma, grid);
                }
                policy[idx] = argmax_lowest_code(&q_values[idx]);
            }
            return Ok(OracleSolution {
                grid,
                values,
                q_values,
                policy,
                sweeps: sweep,
            });
        }
    }
    Err(Error::NoConvergence(sweep_cap))
}

fn argmax_lowest_code(row: &[f64; Action::COUNT]) -> Action {
    let mut best = 0;
    for code in 1..Action::COUNT {
        if row[code] > row[best] {
            best = code;
        }
    }
    Action::from_code(best).expect("argmax is a valid code")
}

/// Exact expected return of a fixed policy, by iterative sweeps over the
/// enumerated dynamics. Fails with [`Error::NoConvergence`] when the
/// policy is improper (some start never reaches capture).
pub fn evaluate_policy(
    grid: GridConfig,
    policy: &[Action],
    gamma: f64,
    tolerance: f64,
    sweep_cap: usize,
) -> Result<Vec<f64>> {
    if policy.len() != grid.state_count() {
        return Err(Error::InvalidParams(format!(
            "policy covers {} states, grid has {}",
            policy.len(),
            grid.state_count()
        )));
    }
    let all = enumerate_transitions(grid)?;
    let n = grid.state_count();
    let mut values = vec![0.0; n];
    for _ in 0..sweep_cap {
        let mut next = values.clone();
        let mut delta = 0.0f64;
        for idx in 0..n {
            if all[idx][0].is_empty() {
                continue;
            }
            let v = expected_value(&all[idx][policy[idx].code()], &values, gamma, grid);
            delta = delta.max((v - values[idx]).abs());
            next[idx] = v;
        }
        values = next;
        if delta < tolerance {
            return Ok(values);
        }
    }
    Err(Error::NoConvergence(sweep_cap))
}

/// The lowest-code greedy policy of a learned table, indexed by state.
pub fn greedy_policy(q: &QTable) -> Vec<Action> {
    (0..q.n_states())
        .map(|idx| argmax_lowest_code(q.row_by_index(idx)))
        .collect()
}

/// Fraction of non-capture states whose greedy action under `q` is
/// optimal according to the oracle (within `tolerance` on Q*).
pub fn policy_agreement(q: &QTable, oracle: &OracleSolution, tolerance: f64) -> f64 {
    let grid = q.grid();
    let mut agree = 0usize;
    let mut total = 0usize;
    for idx in 0..q.n_states() {
        let state = state_from_index(idx, grid);
        if state.is_capture() {
            continue;
        }
        total += 1;
        if oracle.is_optimal(idx, greedy_action(q, state), tolerance) {
            agree += 1;
        }
    }
    agree as f64 / total as f64
}
