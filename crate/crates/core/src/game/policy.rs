use serde::{Deserialize, Serialize};

use super::layout::{Layout, StateId};
use crate::error::{Error, Result};

/// A single player's Markov policy: one action distribution per state.
///
/// Rows are indexed by global state id; the terminal state's row is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy {
    rows: Vec<Vec<f64>>,
}

impl Policy {
    pub fn uniform(layout: &Layout, actions: usize) -> Self {
        let p = 1.0 / actions as f64;
        let rows = (0..layout.num_states())
            .map(|s| {
                if layout.is_terminal(s) {
                    Vec::new()
                } else {
                    vec![p; actions]
                }
            })
            .collect();
        Policy { rows }
    }

    /// Deterministic policy playing `choice[s]` at every non-terminal state.
    pub fn deterministic(layout: &Layout, actions: usize, choice: &[usize]) -> Self {
        let rows = (0..layout.num_states())
            .map(|s| {
                if layout.is_terminal(s) {
                    Vec::new()
                } else {
                    let mut row = vec![0.0; actions];
                    row[choice[s]] = 1.0;
                    row
                }
            })
            .collect();
        Policy { rows }
    }

    /// Wraps raw rows, checking only the shape against `layout`.
    pub fn from_rows(layout: &Layout, actions: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != layout.num_states() {
            return Err(Error::Dimension(format!(
                "policy has {} rows, layout has {} states",
                rows.len(),
                layout.num_states()
            )));
        }
        for (s, row) in rows.iter().enumerate() {
            let want = if layout.is_terminal(s) { 0 } else { actions };
            if row.len() != want {
                return Err(Error::Dimension(format!(
                    "policy row for state {s} has {} entries, expected {want}",
                    row.len()
                )));
            }
        }
        Ok(Policy { rows })
    }

    pub fn row(&self, s: StateId) -> &[f64] {
        &self.rows[s]
    }

    pub fn row_mut(&mut self, s: StateId) -> &mut Vec<f64> {
        &mut self.rows[s]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn num_states(&self) -> usize {
        self.rows.len()
    }

    /// Number of actions, read from the first non-empty row.
    pub fn num_actions(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Smallest probability over all non-terminal rows.
    pub fn min_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_s ||self(.|s) - other(.|s)||_1`.
    pub fn distance_inf1(&self, other: &Policy) -> f64 {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| l1_distance(a, b))
            .fold(0.0, f64::max)
    }
}

/// Joint policy: one [`Policy`] per player.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolicyProfile {
    pub policies: Vec<Policy>,
}

impl PolicyProfile {
    pub fn new(policies: Vec<Policy>) -> Self {
        PolicyProfile { policies }
    }

    pub fn uniform(layout: &Layout, action_counts: &[usize]) -> Self {
        PolicyProfile {
            policies: action_counts
                .iter()
                .map(|&a| Policy::uniform(layout, a))
                .collect(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.policies.len()
    }

    pub fn player(&self, i: usize) -> &Policy {
        &self.policies[i]
    }

    /// Replaces player `i`'s policy, keeping everyone else's.
    pub fn with_player(&self, i: usize, policy: Policy) -> Self {
        let mut out = self.clone();
        out.policies[i] = policy;
        out
    }
}

/// Deterministic per-state relabeling `phi(s, a)` of a player's own actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SwapFunction {
    table: Vec<Vec<usize>>,
}

impl SwapFunction {
    pub fn identity(layout: &Layout, actions: usize) -> Self {
        let table = (0..layout.num_states())
            .map(|s| {
                if layout.is_terminal(s) {
                    Vec::new()
                } else {
                    (0..actions).collect()
                }
            })
            .collect();
        SwapFunction { table }
    }

    pub fn from_table(table: Vec<Vec<usize>>) -> Self {
        SwapFunction { table }
    }

    pub fn map(&self, s: StateId, a: usize) -> usize {
        self.table[s][a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn table_mut(&mut self) -> &mut [Vec<usize>] {
        &mut self.table
    }

    pub fn is_identity(&self) -> bool {
        self.table
            .iter()
            .all(|row| row.iter().enumerate().all(|(a, &b)| a == b))
    }
}

/// Transports a distribution through an action map: `out(b) = sum_{a: psi(a) = b} x(a)`.
pub fn swap_row(row: &[f64], map: &[usize], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (a, &p) in row.iter().enumerate() {
        out[map[a]] += p;
    }
}

/// `phi(pi)(a|s) = sum_{a': phi(s, a') = a} pi(a'|s)`.
pub fn apply_swap(policy: &Policy, phi: &SwapFunction) -> Policy {
    let rows = policy
        .rows
        .iter()
        .zip(&phi.table)
        .map(|(row, map)| {
            let mut out = vec![0.0; row.len()];
            swap_row(row, map, &mut out);
            out
        })
        .collect();
    Policy { rows }
}

pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// First- and second-order path lengths of a jointly generated sequence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathLengths {
    /// `sum_t ||pi_{t+1} - pi_t||_{inf,1}` per player.
    pub first_order: Vec<f64>,
    /// `sum_t ||pi_{t+1} - pi_t||_{inf,1}^2` per player.
    pub second_order: Vec<f64>,
}

impl PathLengths {
    pub fn zeros(players: usize) -> Self {
        PathLengths {
            first_order: vec![0.0; players],
            second_order: vec![0.0; players],
        }
    }

    /// Adds the step `prev -> next` to the running totals.
    pub fn push_step(&mut self, prev: &PolicyProfile, next: &PolicyProfile) {
        for (i, (p, q)) in prev.policies.iter().zip(&next.policies).enumerate() {
            let d = p.distance_inf1(q);
            self.first_order[i] += d;
            self.second_order[i] += d * d;
        }
    }

    pub fn total_first(&self) -> f64 {
        self.first_order.iter().sum()
    }

    pub fn total_second(&self) -> f64 {
        self.second_order.iter().sum()
    }
}

pub fn path_lengths(profiles: &[PolicyProfile]) -> PathLengths {
    let players = profiles.first().map_or(0, PolicyProfile::num_players);
    let mut out = PathLengths::zeros(players);
    for w in profiles.windows(2) {
        out.push_step(&w[0], &w[1]);
    }
    out
}
