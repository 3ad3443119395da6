//! The hunter/prey pursuit environment.
//!
//! A hunter and a prey each occupy one cell of a bounded rectangular grid.
//! The hunter moves in the cardinal direction given by its action; the prey
//! then moves one cell in a uniformly random direction. Moves into a wall
//! leave the mover in place. The hunter captures the prey by moving onto
//! its cell, which ends the episode. Every non-capturing step is rewarded
//! -1, the capturing step 0.
//!
//! Conventions: `(0, 0)` is the top-left cell, `x` grows rightward and `y`
//! grows downward, so [`Action::Down`] increments `y`. Action codes are
//! 0 down, 1 right, 2 up, 3 left.

use rand::RngExt;

use crate::error::{Error, Result};
use crate::SimRng;

/// Grid dimensions. Both axes must be at least 2 so that hunter and prey
/// can always occupy distinct cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridConfig {
    width: usize,
    height: usize,
}

impl GridConfig {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidGrid { width, height });
        }
        Ok(Self { width, height })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Number of observation tuples, including the coincident (capture)
    /// ones: `(width * height)^2`.
    pub fn state_count(&self) -> usize {
        self.cells() * self.cells()
    }

    pub fn contains(&self, pos: Position) -> bool {
        pos.x < self.width && pos.y < self.height
    }

    /// Apply `action` to `pos`, clamping at the walls: a move off the edge
    /// leaves the position unchanged.
    pub fn clamped_move(&self, pos: Position, action: Action) -> Position {
        let (dx, dy) = action.delta();
        let x = (pos.x as isize + dx).clamp(0, self.width as isize - 1);
        let y = (pos.y as isize + dy).clamp(0, self.height as isize - 1);
        Position {
            x: x as usize,
            y: y as usize,
        }
    }

    fn cell_index(&self, pos: Position) -> usize {
        pos.y * self.width + pos.x
    }

    fn cell_at(&self, index: usize) -> Position {
        Position {
            x: index % self.width,
            y: index / self.width,
        }
    }
}

impl std::fmt::Display for GridConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

/// A cell coordinate; `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// The full observation: where the hunter and the prey stand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameState {
    pub hunter: Position,
    pub prey: Position,
}

impl GameState {
    pub fn new(hunter: Position, prey: Position) -> Self {
        Self { hunter, prey }
    }

    /// Both agents on one cell. Such states are terminal and are never
    /// presented for action selection.
    pub fn is_capture(&self) -> bool {
        self.hunter == self.prey
    }
}

/// The four cardinal moves, in code order: 0 down, 1 right, 2 up, 3 left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Action {
    Down = 0,
    Right = 1,
    Up = 2,
    Left = 3,
}

impl Action {
    pub const COUNT: usize = 4;
    pub const ALL: [Action; Action::COUNT] =
        [Action::Down, Action::Right, Action::Up, Action::Left];

    pub fn code(self) -> usize {
        self as usize
    }

    pub fn from_code(code: usize) -> Option<Action> {
        Action::ALL.get(code).copied()
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Action::Down => (0, 1),
            Action::Right => (1, 0),
            Action::Up => (0, -1),
            Action::Left => (-1, 0),
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Action::Down => "down",
            Action::Right => "right",
            Action::Up => "up",
            Action::Left => "left",
        };
        write!(f, "{name}")
    }
}

/// Result of one environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub next_state: GameState,
    /// 0 on the capturing step, -1 otherwise.
    pub reward: f64,
    pub terminal: bool,
}

/// Place hunter and prey uniformly at random on distinct cells.
///
/// The prey cell is drawn from the remaining `cells - 1` positions, so the
/// pair is uniform over all distinct ordered pairs.
pub fn reset(config: GridConfig, rng: &mut SimRng) -> GameState {
    let cells = config.cells();
    let hunter = rng.random_range(0..cells);
    let mut prey = rng.random_range(0..cells - 1);
    if prey >= hunter {
        prey += 1;
    }
    GameState {
        hunter: config.cell_at(hunter),
        prey: config.cell_at(prey),
    }
}

/// Advance the game by one step.
///
/// The hunter moves first (clamped at walls). Landing on the prey captures
/// it: the episode ends with reward 0 and the prey does not move.
/// Otherwise the prey moves in a uniformly random direction (clamped at
/// walls), re-drawing any direction whose destination is the hunter's new
/// cell, and the step is rewarded -1.
///
/// Errors with [`Error::TerminalState`] if `state` is already a capture
/// configuration.
pub fn step(
    state: GameState,
    action: Action,
    config: GridConfig,
    rng: &mut SimRng,
) -> Result<StepOutcome> {
    if state.is_capture() {
        return Err(Error::TerminalState);
    }
    let hunter = config.clamped_move(state.hunter, action);
    if hunter == state.prey {
        return Ok(StepOutcome {
            next_state: GameState {
                hunter,
                prey: state.prey,
            },
            reward: 0.0,
            terminal: true,
        });
    }
    // At least two of the four clamped destinations are distinct cells, so
    // a cell other than the hunter's always exists and the loop ends.
    let prey = loop {
        let dir = Action::ALL[rng.random_range(0..Action::COUNT)];
        let dest = config.clamped_move(state.prey, dir);
        if dest != hunter {
            break dest;
        }
    };
    Ok(StepOutcome {
        next_state: GameState { hunter, prey },
        reward: -1.0,
        terminal: false,
    })
}

/// Dense state index: `((h_y*W + h_x) * W*H) + (p_y*W + p_x)`.
///
/// Bijective over all observation tuples, including capture states.
pub fn state_index(state: GameState, config: GridConfig) -> usize {
    config.cell_index(state.hunter) * config.cells() + config.cell_index(state.prey)
}

/// Inverse of [`state_index`].
pub fn state_from_index(index: usize, config: GridConfig) -> GameState {
    let cells = config.cells();
    GameState {
        hunter: config.cell_at(index / cells),
        prey: config.cell_at(index % cells),
    }
}

/// One outcome of [`transition_distribution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next_state: GameState,
    pub probability: f64,
    pub reward: f64,
}

/// Enumerate every outcome of taking `action` in `state` with its exact
/// probability.
///
/// Mirrors the sampling semantics of [`step`]: a capturing hunter move
/// yields a single certain outcome; otherwise the prey direction is
/// uniform over the directions whose clamped destination is not the
/// hunter's new cell, and directions clamping to the same cell are merged.
pub fn transition_distribution(
    state: GameState,
    action: Action,
    config: GridConfig,
) -> Result<Vec<Transition>> {
    if state.is_capture() {
        return Err(Error::TerminalState);
    }
    let hunter = config.clamped_move(state.hunter, action);
    if hunter == state.prey {
        return Ok(vec![Transition {
            next_state: GameState {
                hunter,
                prey: state.prey,
            },
            probability: 1.0,
            reward: 0.0,
        }]);
    }
    let mut dests: Vec<(Position, usize)> = Vec::with_capacity(Action::COUNT);
    let mut valid = 0usize;
    for dir in Action::ALL {
        let dest = config.clamped_move(state.prey, dir);
        if dest == hunter {
            continue;
        }
        valid += 1;
        match dests.iter_mut().find(|(p, _)| *p == dest) {
            Some((_, count)) => *count += 1,
            None => dests.push((dest, 1)),
        }
    }
    Ok(dests
        .into_iter()
        .map(|(prey, count)| Transition {
            next_state: GameState { hunter, prey },
            probability: count as f64 / valid as f64,
            reward: -1.0,
        })
        .collect())
}
