use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::layout::{Layout, StateId};
use super::policy::{l1_distance, Policy};
use crate::error::{Error, Result};

/// Single-agent layered MDP with `actions` own actions.
///
/// `kernel[s][a]` is a distribution over the layer after `s`; terminal rows
/// are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InducedMdp {
    layout: Arc<Layout>,
    actions: usize,
    loss: Vec<Vec<f64>>,
    kernel: Vec<Vec<Vec<f64>>>,
}

impl InducedMdp {
    pub fn new(
        layout: Arc<Layout>,
        actions: usize,
        loss: Vec<Vec<f64>>,
        kernel: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = layout.num_states();
        if loss.len() != n || kernel.len() != n {
            return Err(Error::Dimension(format!(
                "mdp tables cover {}/{} states, layout has {n}",
                loss.len(),
                kernel.len()
            )));
        }
        for s in 0..n {
            let (want_a, want_next) = if layout.is_terminal(s) {
                (0, 0)
            } else {
                (actions, layout.successors(s).len())
            };
            if loss[s].len() != want_a
                || kernel[s].len() != want_a
                || kernel[s].iter().any(|r| r.len() != want_next)
            {
                return Err(Error::Dimension(format!(
                    "mdp tables at state {s} do not match {want_a} actions x {want_next} successors"
                )));
            }
        }
        Ok(InducedMdp {
            layout,
            actions,
            loss,
            kernel,
        })
    }

    pub(crate) fn from_parts_unchecked(
        layout: Arc<Layout>,
        actions: usize,
        loss: Vec<Vec<f64>>,
        kernel: Vec<Vec<Vec<f64>>>,
    ) -> Self {
        InducedMdp {
            layout,
            actions,
            loss,
            kernel,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn shared_layout(&self) -> Arc<Layout> {
        Arc::clone(&self.layout)
    }

    pub fn horizon(&self) -> usize {
        self.layout.horizon()
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    pub fn loss(&self, s: StateId, a: usize) -> f64 {
        self.loss[s][a]
    }

    pub fn loss_row(&self, s: StateId) -> &[f64] {
        &self.loss[s]
    }

    pub fn kernel_row(&self, s: StateId, a: usize) -> &[f64] {
        &self.kernel[s][a]
    }

    pub fn losses(&self) -> &[Vec<f64>] {
        &self.loss
    }

    pub fn kernels(&self) -> &[Vec<Vec<f64>>] {
        &self.kernel
    }

    /// `max_{s,a} ||P(.|s,a) - P'(.|s,a)||_1`.
    pub fn kernel_distance_inf1(&self, other: &InducedMdp) -> f64 {
        self.kernel
            .iter()
            .zip(&other.kernel)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| l1_distance(x, y)))
            .fold(0.0, f64::max)
    }

    /// `max_{s,a} |l(s,a) - l'(s,a)|`.
    pub fn loss_distance_inf(&self, other: &InducedMdp) -> f64 {
        self.loss
            .iter()
            .zip(&other.loss)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Value of `policy` at the initial state.
    pub fn initial_value(&self, policy: &Policy) -> f64 {
        evaluate(self, policy).v[self.layout.initial()]
    }
}

/// State values and own-action Q-values of a policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueTables {
    pub v: Vec<f64>,
    pub q: Vec<Vec<f64>>,
}

impl ValueTables {
    pub fn initial_value(&self, layout: &Layout) -> f64 {
        self.v[layout.initial()]
    }
}

/// Backward induction: `Q(s,a) = l(s,a) + sum_s' P(s'|s,a) V(s')`,
/// `V(s) = <pi(.|s), Q(s,.)>`, `V(terminal) = 0`.
pub fn evaluate(mdp: &InducedMdp, policy: &Policy) -> ValueTables {
    let layout = mdp.layout();
    let n = layout.num_states();
    let mut v = vec![0.0; n];
    let mut q = vec![Vec::new(); n];
    for h in (0..layout.horizon()).rev() {
        for &s in layout.layer(h) {
            let next = layout.successors(s);
            let qs: Vec<f64> = (0..mdp.actions)
                .map(|a| {
                    mdp.loss[s][a]
                        + mdp.kernel[s][a]
                            .iter()
                            .zip(next)
                            .map(|(p, &s2)| p * v[s2])
                            .sum::<f64>()
                })
                .collect();
            v[s] = qs.iter().zip(policy.row(s)).map(|(x, p)| x * p).sum();
            q[s] = qs;
        }
    }
    ValueTables { v, q }
}

/// Probability of visiting each state (terminal included, always 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyMeasure {
    pub q: Vec<f64>,
}

impl OccupancyMeasure {
    pub fn layer_sum(&self, layout: &Layout, h: usize) -> f64 {
        layout.layer(h).iter().map(|&s| self.q[s]).sum()
    }

    /// Sum over non-terminal states; equals the horizon.
    pub fn decision_sum(&self, layout: &Layout) -> f64 {
        layout.decision_states().map(|s| self.q[s]).sum()
    }

    pub fn l1_distance(&self, other: &OccupancyMeasure) -> f64 {
        l1_distance(&self.q, &other.q)
    }

    pub fn linf_distance(&self, other: &OccupancyMeasure) -> f64 {
        self.q
            .iter()
            .zip(&other.q)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Forward pass: `q(s1) = 1`, `q(s') = sum_{s,a} q(s) pi(a|s) P(s'|s,a)`.
pub fn occupancy(mdp: &InducedMdp, policy: &Policy) -> OccupancyMeasure {
    let layout = mdp.layout();
    let mut q = vec![0.0; layout.num_states()];
    q[layout.initial()] = 1.0;
    for h in 0..layout.horizon() {
        for &s in layout.layer(h) {
            let qs = q[s];
            if qs == 0.0 {
                continue;
            }
            let next = layout.successors(s);
            for (a, &pa) in policy.row(s).iter().enumerate() {
                let w = qs * pa;
                if w == 0.0 {
                    continue;
                }
                for (p, &s2) in mdp.kernel[s][a].iter().zip(next) {
                    q[s2] += w * p;
                }
            }
        }
    }
    OccupancyMeasure { q }
}
