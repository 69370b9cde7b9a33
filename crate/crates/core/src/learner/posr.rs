use std::path::Path;

use serde::{Deserialize, Serialize};

use super::oomd::{oomd_step, BaseState};
use super::stationary::solve_stationary;
use crate::error::{Error, Result};
use crate::game::{Layout, Policy};

/// Per-player learner state: one OOMD base learner per (state, action) and the
/// combined policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub player: usize,
    pub gamma: f64,
    pub eta: f64,
    pub actions: usize,
    /// `bases[s][a]`; empty for the terminal state.
    pub bases: Vec<Vec<BaseState>>,
    pub policy: Policy,
    /// Number of updates applied so far.
    pub round: usize,
}

/// Checks `0 < gamma <= 1/(2A)` and `eta > 0`.
pub fn check_learner_params(actions: usize, gamma: f64, eta: f64) -> Result<()> {
    if actions < 2 {
        return Err(Error::Parameter(format!(
            "need at least two actions, got {actions}"
        )));
    }
    let cap = 1.0 / (2.0 * actions as f64);
    if !(gamma > 0.0 && gamma <= cap) {
        return Err(Error::Parameter(format!(
            "gamma = {gamma} must lie in (0, 1/(2A)] = (0, {cap}] for A = {actions}"
        )));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Parameter(format!("eta = {eta} must be positive")));
    }
    Ok(())
}

pub fn posr_init(
    player: usize,
    layout: &Layout,
    actions: usize,
    gamma: f64,
    eta: f64,
) -> Result<AgentState> {
    check_learner_params(actions, gamma, eta)?;
    let bases = (0..layout.num_states())
        .map(|s| {
            if layout.is_terminal(s) {
                Vec::new()
            } else {
                vec![BaseState::uniform(actions); actions]
            }
        })
        .collect();
    Ok(AgentState {
        player,
        gamma,
        eta,
        actions,
        bases,
        policy: Policy::uniform(layout, actions),
        round: 0,
    })
}

impl AgentState {
    /// Feeds `g^{s,a} = pi(a|s) q_hat(s, .)` to every base learner and
    /// recombines each state's policy as the stationary distribution of its
    /// base iterates.
    pub fn update(&mut self, q_hat: &[Vec<f64>]) -> Result<()> {
        if q_hat.len() != self.bases.len() {
            return Err(Error::Dimension(format!(
                "q_hat covers {} states, agent has {}",
                q_hat.len(),
                self.bases.len()
            )));
        }
        let mut g = vec![0.0; self.actions];
        for (s, bases) in self.bases.iter_mut().enumerate() {
            if bases.is_empty() {
                continue;
            }
            let q = &q_hat[s];
            if q.len() != self.actions {
                return Err(Error::Dimension(format!(
                    "q_hat row for state {s} has {} entries, expected {}",
                    q.len(),
                    self.actions
                )));
            }
            let row = self.policy.row(s);
            for (a, base) in bases.iter_mut().enumerate() {
                for (gb, &qb) in g.iter_mut().zip(q) {
                    *gb = row[a] * qb;
                }
                *base = oomd_step(base, &g, self.eta, self.gamma)?;
            }
            let rows: Vec<Vec<f64>> = bases.iter().map(|b| b.x.clone()).collect();
            let pi = solve_stationary(&rows)?.pi;
            self.policy.row_mut(s).copy_from_slice(&pi);
        }
        self.round += 1;
        Ok(())
    }

    /// Rows `x^{s,a}` of the base iterates at state `s`.
    pub fn base_matrix(&self, s: usize) -> Vec<Vec<f64>> {
        self.bases[s].iter().map(|b| b.x.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("agent state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Functional form of [`AgentState::update`].
pub fn posr_update(agent: &AgentState, q_hat: &[Vec<f64>]) -> Result<AgentState> {
    let mut next = agent.clone();
    next.update(q_hat)?;
    Ok(next)
}
