use serde::{Deserialize, Serialize};

use crate::game::{MarkovGame, StateId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reachability {
    /// Smallest reach probability over decision states and product policies.
    pub beta: f64,
    pub argmin: StateId,
    /// Per-state minimum reach probability (1 at the initial and terminal states).
    pub per_state: Vec<f64>,
}

/// Minimum over product Markov policies of the probability of reaching each
/// state, by backward induction with a minimum over joint actions.
///
/// The reach probability of a fixed state is multilinear in the per-state
/// action distributions, so the minimum is attained by a deterministic joint
/// action at every state, which is itself a product policy.
pub fn min_reachability(game: &MarkovGame) -> Reachability {
    let layout = game.layout();
    let n = layout.num_states();
    let mut per_state = vec![1.0; n];
    let mut w = vec![0.0; n];
    for h in 1..layout.horizon() {
        for &z in layout.layer(h) {
            w.iter_mut().for_each(|v| *v = 0.0);
            w[z] = 1.0;
            for g in (0..h).rev() {
                for &s in layout.layer(g) {
                    let next = layout.successors(s);
                    w[s] = (0..game.joint_actions().len())
                        .map(|j| {
                            game.transition_row(s, j)
                                .iter()
                                .zip(next)
                                .map(|(p, &s2)| p * w[s2])
                                .sum::<f64>()
                        })
                        .fold(f64::INFINITY, f64::min);
                }
            }
            per_state[z] = w[layout.initial()];
        }
    }
    let mut argmin = layout.initial();
    for s in layout.decision_states() {
        if per_state[s] < per_state[argmin] {
            argmin = s;
        }
    }
    Reachability {
        beta: per_state[argmin],
        argmin,
        per_state,
    }
}
