use serde::{Deserialize, Serialize};

use super::sampling::Trajectory;
use crate::game::{JointActionSpace, Layout, StateId};

/// Divisor used when averaging tail returns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Average over the episodes that visited `(s, a)`.
    #[default]
    VisitCount,
    /// Sum over visiting episodes divided by the block length.
    BlockLength,
}

impl std::fmt::Display for Normalization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Normalization::VisitCount => "visit-count",
            Normalization::BlockLength => "block-length",
        })
    }
}

impl std::str::FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "visit-count" => Ok(Normalization::VisitCount),
            "block-length" => Ok(Normalization::BlockLength),
            _ => Err(format!("unknown normalization `{s}` (expected visit-count or block-length)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QEstimate {
    /// `q[s][a]`; empty rows for the terminal state.
    pub q: Vec<Vec<f64>>,
    pub visits: Vec<Vec<usize>>,
    /// `(s, a)` cells with no visit; their estimate is 0.
    pub unvisited: Vec<(StateId, usize)>,
}

impl QEstimate {
    pub fn all_visited(&self) -> bool {
        self.unvisited.is_empty()
    }
}

/// Monte Carlo estimate of player `player`'s Q-function from one block of
/// trajectories played under a fixed profile.
///
/// For `s` in layer `h`, each episode visiting `(s, a)` contributes the sum of
/// its losses from step `h` to the end.
pub fn estimate_q(
    block: &[Trajectory],
    player: usize,
    layout: &Layout,
    joint: &JointActionSpace,
    normalization: Normalization,
) -> QEstimate {
    let actions = joint.counts()[player];
    let n = layout.num_states();
    let shape = |s: usize| if layout.is_terminal(s) { 0 } else { actions };
    let mut sums: Vec<Vec<f64>> = (0..n).map(|s| vec![0.0; shape(s)]).collect();
    let mut visits: Vec<Vec<usize>> = (0..n).map(|s| vec![0; shape(s)]).collect();

    let mut tail = Vec::new();
    for tr in block {
        tail.clear();
        tail.resize(tr.steps.len() + 1, 0.0);
        for (h, step) in tr.steps.iter().enumerate().rev() {
            tail[h] = tail[h + 1] + step.losses[player];
        }
        for (h, step) in tr.steps.iter().enumerate() {
            let a = joint.action_of(step.joint_action, player);
            sums[step.state][a] += tail[h];
            visits[step.state][a] += 1;
        }
    }

    let mut unvisited = Vec::new();
    let q = sums
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(a, total)| {
                    let k = visits[s][a];
                    if k == 0 {
                        unvisited.push((s, a));
                        return 0.0;
                    }
                    match normalization {
                        Normalization::VisitCount => total / k as f64,
                        Normalization::BlockLength => total / block.len() as f64,
                    }
                })
                .collect()
        })
        .collect();
    QEstimate {
        q,
        visits,
        unvisited,
    }
}
