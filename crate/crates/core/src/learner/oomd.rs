use serde::{Deserialize, Serialize};

use super::prox::bregman_prox;
use super::simplex::uniform;
use crate::error::Result;

/// One optimistic OMD learner over the gamma-truncated simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseState {
    /// Iterate to be played next.
    pub x: Vec<f64>,
    /// Intermediate iterate.
    pub x_tilde: Vec<f64>,
    /// Last observed loss, used as the optimistic prediction. Zero before the first update.
    pub hint: Vec<f64>,
}

impl BaseState {
    /// Uniform start: the log-barrier minimizer over the truncated simplex.
    pub fn uniform(d: usize) -> Self {
        BaseState {
            x: uniform(d),
            x_tilde: uniform(d),
            hint: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// `x~_t = prox(x~_{t-1}, g_t)`, `x_{t+1} = prox(x~_t, g_t)`; `g_t` becomes the hint.
pub fn oomd_step(base: &BaseState, g: &[f64], eta: f64, gamma: f64) -> Result<BaseState> {
    let x_tilde = bregman_prox(&base.x_tilde, g, eta, gamma)?.x;
    let x = bregman_prox(&x_tilde, g, eta, gamma)?.x;
    Ok(BaseState {
        x,
        x_tilde,
        hint: g.to_vec(),
    })
}
