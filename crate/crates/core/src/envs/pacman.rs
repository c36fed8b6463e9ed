//! A small PacMan with two reward streams.
//!
//! Rewards: `-1` per frame and `-500` for dying go to the negative stream;
//! `+10` per dot, `+500` for clearing the board and `+200` per scared ghost
//! eaten go to the positive stream. A power pellet scares every ghost for
//! [`SCARED_FRAMES`] frames, during which ghosts move every other frame.
//! Ghosts otherwise take a uniformly random legal step each frame.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::RngCore;

use super::{Environment, Step};
use crate::error::{Error, Result};
use crate::linear::FeatureExtractor;
use crate::reward::RewardPair;

pub const TIME_PENALTY: f64 = -1.0;
pub const DEATH_PENALTY: f64 = -500.0;
pub const DOT_REWARD: f64 = 10.0;
pub const WIN_REWARD: f64 = 500.0;
pub const GHOST_REWARD: f64 = 200.0;
pub const SCARED_FRAMES: u32 = 40;
pub const DEFAULT_MAX_FRAMES: u32 = 500;

pub const DEFAULT_LAYOUT: &str = include_str!("../../layouts/small.lay");

pub const UP: usize = 0;
pub const DOWN: usize = 1;
pub const LEFT: usize = 2;
pub const RIGHT: usize = 3;
const MOVES: [(isize, isize); 4] = [(0, -1), (0, 1), (-1, 0), (1, 0)];

/// Maze description: `#` wall, `.` dot, `o` power pellet, `P` PacMan start,
/// `G` ghost start, space empty floor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    width: usize,
    height: usize,
    walls: Vec<bool>,
    dots: Vec<bool>,
    pellets: Vec<bool>,
    pacman_start: usize,
    ghost_starts: Vec<usize>,
}

impl Layout {
    pub fn parse(text: &str) -> Result<Layout> {
        let rows: Vec<&str> = text
            .lines()
            .map(|l| l.trim_end_matches('\r'))
            .filter(|l| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(Error::Layout("empty layout".into()));
        }
        let width = rows[0].chars().count();
        let height = rows.len();
        let mut layout = Layout {
            width,
            height,
            walls: vec![false; width * height],
            dots: vec![false; width * height],
            pellets: vec![false; width * height],
            pacman_start: usize::MAX,
            ghost_starts: Vec::new(),
        };
        for (y, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::Layout(format!(
                    "row {y} has {} cells, expected {width}",
                    row.chars().count()
                )));
            }
            for (x, c) in row.chars().enumerate() {
                let i = y * width + x;
                match c {
                    '#' => layout.walls[i] = true,
                    '.' => layout.dots[i] = true,
                    'o' => layout.pellets[i] = true,
                    ' ' => {}
                    'P' => {
                        if layout.pacman_start != usize::MAX {
                            return Err(Error::Layout("more than one PacMan start".into()));
                        }
                        layout.pacman_start = i;
                    }
                    'G' => layout.ghost_starts.push(i),
                    other => return Err(Error::Layout(format!("unknown cell `{other}` at ({x}, {y})"))),
                }
            }
        }
        if layout.pacman_start == usize::MAX {
            return Err(Error::Layout("no PacMan start".into()));
        }
        if !layout.dots.iter().any(|&d| d) {
            return Err(Error::Layout("layout has no dots".into()));
        }
        Ok(layout)
    }

    pub fn load(path: &Path) -> Result<Layout> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Layout(format!("cannot read {}: {e}", path.display())))?;
        Layout::parse(&text)
    }

    pub fn default_small() -> Layout {
        Layout::parse(DEFAULT_LAYOUT).expect("bundled layout is valid")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn num_ghosts(&self) -> usize {
        self.ghost_starts.len()
    }

    pub fn num_dots(&self) -> usize {
        self.dots.iter().filter(|&&d| d).count()
    }

    pub fn is_wall(&self, cell: usize) -> bool {
        self.walls[cell]
    }

    fn xy(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    /// Cell reached by `action`, or `cell` itself if the move hits a wall or
    /// leaves the grid.
    pub fn neighbor(&self, cell: usize, action: usize) -> usize {
        let (x, y) = self.xy(cell);
        let (dx, dy) = MOVES[action];
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        if nx < 0 || ny < 0 || nx >= self.width as isize || ny >= self.height as isize {
            return cell;
        }
        let next = ny as usize * self.width + nx as usize;
        if self.walls[next] {
            cell
        } else {
            next
        }
    }

    fn open_neighbors(&self, cell: usize) -> Vec<usize> {
        (0..4).map(|a| self.neighbor(cell, a)).filter(|&n| n != cell).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ghost {
    pub cell: usize,
    pub start: usize,
    /// Remaining scared frames; 0 when normal.
    pub scared: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Running,
    Won,
    Lost,
    TimedOut,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PacmanState {
    pub layout: Arc<Layout>,
    pub pacman: usize,
    pub ghosts: Vec<Ghost>,
    pub dots: Vec<bool>,
    pub pellets: Vec<bool>,
    pub dots_left: usize,
    pub frame: u32,
    /// Per-stream totals for the current episode.
    pub score: RewardPair,
    pub outcome: Outcome,
}

impl PacmanState {
    fn initial(layout: Arc<Layout>) -> Self {
        PacmanState {
            pacman: layout.pacman_start,
            ghosts: layout
                .ghost_starts
                .iter()
                .map(|&g| Ghost {
                    cell: g,
                    start: g,
                    scared: 0,
                })
                .collect(),
            dots: layout.dots.clone(),
            pellets: layout.pellets.clone(),
            dots_left: layout.num_dots(),
            frame: 0,
            score: RewardPair::ZERO,
            outcome: Outcome::Running,
            layout,
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.outcome != Outcome::Running
    }

    /// Eats scared ghosts on PacMan's cell; returns true if a normal ghost
    /// is there.
    fn resolve_collisions(&mut self, reward: &mut RewardPair) -> bool {
        let mut dead = false;
        for ghost in self.ghosts.iter_mut().filter(|g| g.cell == self.pacman) {
            if ghost.scared > 0 {
                reward.pos += GHOST_REWARD;
                ghost.cell = ghost.start;
                ghost.scared = 0;
            } else {
                dead = true;
            }
        }
        dead
    }

    /// BFS distance from `from` to the nearest remaining dot.
    pub fn closest_dot(&self, from: usize) -> Option<usize> {
        let layout = &self.layout;
        let mut seen = vec![false; self.dots.len()];
        let mut queue = VecDeque::from([(from, 0usize)]);
        seen[from] = true;
        while let Some((cell, dist)) = queue.pop_front() {
            if self.dots[cell] {
                return Some(dist);
            }
            for n in layout.open_neighbors(cell) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back((n, dist + 1));
                }
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct PacmanEnv {
    layout: Arc<Layout>,
    state: PacmanState,
    max_frames: u32,
}

impl PacmanEnv {
    pub fn new(layout: Layout) -> Self {
        let layout = Arc::new(layout);
        PacmanEnv {
            state: PacmanState::initial(layout.clone()),
            layout,
            max_frames: DEFAULT_MAX_FRAMES,
        }
    }

    /// Episodes that reach `max_frames` end without further reward.
    pub fn with_max_frames(mut self, max_frames: u32) -> Self {
        self.max_frames = max_frames.max(1);
        self
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn state(&self) -> &PacmanState {
        &self.state
    }

    /// Replaces the current state, e.g. to set up a specific situation.
    pub fn set_state(&mut self, state: PacmanState) {
        self.state = state;
    }

    /// Pure transition function for one frame.
    pub fn transition(&self, state: &PacmanState, action: usize, rng: &mut dyn RngCore) -> Result<Step<PacmanState>> {
        if state.is_terminal() {
            return Err(Error::precondition("episode already finished"));
        }
        if action >= 4 {
            return Err(Error::InvalidAction {
                state: state.pacman,
                action,
            });
        }
        let layout = &self.layout;
        let mut s = state.clone();
        let mut reward = RewardPair {
            pos: 0.0,
            neg: TIME_PENALTY,
        };
        s.frame += 1;

        s.pacman = layout.neighbor(s.pacman, action);
        if s.dots[s.pacman] {
            s.dots[s.pacman] = false;
            s.dots_left -= 1;
            reward.pos += DOT_REWARD;
        }
        if s.pellets[s.pacman] {
            s.pellets[s.pacman] = false;
            for g in &mut s.ghosts {
                g.scared = SCARED_FRAMES;
            }
        }

        if s.dots_left == 0 {
            reward.pos += WIN_REWARD;
            s.outcome = Outcome::Won;
        } else if s.resolve_collisions(&mut reward) {
            reward.neg += DEATH_PENALTY;
            s.outcome = Outcome::Lost;
        } else {
            let half_step = s.frame.is_multiple_of(2);
            for g in &mut s.ghosts {
                if g.scared > 0 && half_step {
                    continue;
                }
                let options = layout.open_neighbors(g.cell);
                if let Some(&next) = options.choose(rng) {
                    g.cell = next;
                }
            }
            for g in &mut s.ghosts {
                g.scared = g.scared.saturating_sub(1);
            }
            if s.resolve_collisions(&mut reward) {
                reward.neg += DEATH_PENALTY;
                s.outcome = Outcome::Lost;
            } else if s.frame >= self.max_frames {
                s.outcome = Outcome::TimedOut;
            }
        }

        s.score += reward;
        let done = s.is_terminal();
        Ok(Step { next: s, reward, done })
    }
}

impl Environment for PacmanEnv {
    type State = PacmanState;

    fn reset(&mut self, _rng: &mut dyn RngCore) -> PacmanState {
        self.state = PacmanState::initial(self.layout.clone());
        self.state.clone()
    }

    fn num_actions(&self, state: &PacmanState) -> usize {
        if state.is_terminal() {
            0
        } else {
            4
        }
    }

    fn step(&mut self, action: usize, rng: &mut dyn RngCore) -> Result<Step<PacmanState>> {
        let step = self.transition(&self.state, action, rng)?;
        self.state = step.next.clone();
        Ok(step)
    }

    fn state_id(&self, state: &PacmanState) -> usize {
        state.pacman
    }
}

/// Hand-crafted features in the style of the classic PacMan projects:
/// bias, dangerous ghosts one step away, whether the move eats a dot,
/// normalized distance to the closest dot, and scared ghosts one step away.
/// All features are scaled by 1/10.
#[derive(Debug, Clone, Copy, Default)]
pub struct PacmanFeatures;

impl PacmanFeatures {
    pub const DIM: usize = 5;
}

impl FeatureExtractor<PacmanState> for PacmanFeatures {
    fn dim(&self) -> usize {
        Self::DIM
    }

    fn features(&self, state: &PacmanState, action: usize) -> Vec<f64> {
        let layout = &state.layout;
        let next = layout.neighbor(state.pacman, action.min(3));
        let near = |g: &Ghost| g.cell == next || layout.open_neighbors(g.cell).contains(&next);
        let dangerous = state.ghosts.iter().filter(|g| g.scared == 0 && near(g)).count() as f64;
        let scared = state.ghosts.iter().filter(|g| g.scared > 0 && near(g)).count() as f64;
        let eats = if dangerous == 0.0 && state.dots[next] { 1.0 } else { 0.0 };
        let closest = state
            .closest_dot(next)
            .map_or(0.0, |d| d as f64 / (layout.width * layout.height) as f64);
        [1.0, dangerous, eats, closest, scared]
            .into_iter()
            .map(|f| f / 10.0)
            .collect()
    }
}
