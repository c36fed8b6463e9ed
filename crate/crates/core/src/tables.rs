use crate::error::{Error, Result};

/// Dense per-(state, action) storage for tabular agents.
///
/// States may expose different numbers of actions; a state with zero actions
/// is terminal and bootstraps to 0. `visits` is shared by the two streams.
#[derive(Debug, Clone, PartialEq)]
pub struct QTables {
    pub combined: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
    pub visits: Vec<u64>,
    offsets: Vec<usize>,
    actions: Vec<usize>,
}

impl QTables {
    pub fn new(actions_per_state: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(actions_per_state.len());
        let mut total = 0;
        for &n in actions_per_state {
            offsets.push(total);
            total += n;
        }
        QTables {
            combined: vec![0.0; total],
            positive: vec![0.0; total],
            negative: vec![0.0; total],
            visits: vec![0; total],
            offsets,
            actions: actions_per_state.to_vec(),
        }
    }

    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    pub fn num_actions(&self, state: usize) -> usize {
        self.actions.get(state).copied().unwrap_or(0)
    }

    pub fn actions_per_state(&self) -> &[usize] {
        &self.actions
    }

    pub fn index(&self, state: usize, action: usize) -> Result<usize> {
        if state >= self.actions.len() || action >= self.actions[state] {
            return Err(Error::InvalidAction { state, action });
        }
        Ok(self.offsets[state] + action)
    }

    pub(crate) fn row(&self, state: usize) -> std::ops::Range<usize> {
        let start = self.offsets.get(state).copied().unwrap_or(0);
        start..start + self.num_actions(state)
    }

    pub fn combined_row(&self, state: usize) -> &[f64] {
        &self.combined[self.row(state)]
    }

    pub fn positive_row(&self, state: usize) -> &[f64] {
        &self.positive[self.row(state)]
    }

    pub fn negative_row(&self, state: usize) -> &[f64] {
        &self.negative[self.row(state)]
    }

    /// Increments the shared visit count and returns the new value.
    pub fn visit(&mut self, state: usize, action: usize) -> Result<u64> {
        let i = self.index(state, action)?;
        self.visits[i] += 1;
        Ok(self.visits[i])
    }

    pub fn visits(&self, state: usize, action: usize) -> Result<u64> {
        Ok(self.visits[self.index(state, action)?])
    }
}
