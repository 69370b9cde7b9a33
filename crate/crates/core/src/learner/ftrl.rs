use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Layout, Policy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regularizer {
    Entropy,
    LogBarrier,
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regularizer::Entropy => "entropy",
            Regularizer::LogBarrier => "log-barrier",
        })
    }
}

impl FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Regularizer::Entropy),
            "log-barrier" | "log_barrier" => Ok(Regularizer::LogBarrier),
            _ => Err(Error::Parameter(format!(
                "unknown regularizer {s:?}; expected entropy or log-barrier"
            ))),
        }
    }
}

/// Follow-the-regularized-leader policy optimization over the full simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtrlAgentState {
    pub eta: f64,
    pub regularizer: Regularizer,
    /// Per-state cumulative Q estimates.
    pub cumulative: Vec<Vec<f64>>,
    pub policy: Policy,
}

pub fn ftrl_init(layout: &Layout, actions: usize, eta: f64, regularizer: Regularizer) -> FtrlAgentState {
    let cumulative = (0..layout.num_states())
        .map(|s| {
            if layout.is_terminal(s) {
                Vec::new()
            } else {
                vec![0.0; actions]
            }
        })
        .collect();
    FtrlAgentState {
        eta,
        regularizer,
        cumulative,
        policy: Policy::uniform(layout, actions),
    }
}

/// `argmin_x eta <L, x> + R(x)` over the probability simplex.
pub fn ftrl_argmin(cumulative: &[f64], eta: f64, regularizer: Regularizer) -> Vec<f64> {
    let lmin = cumulative.iter().copied().fold(f64::INFINITY, f64::min);
    let z: Vec<f64> = cumulative.iter().map(|l| eta * (l - lmin)).collect();
    match regularizer {
        Regularizer::Entropy => {
            let w: Vec<f64> = z.iter().map(|v| (-v).exp()).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        }
        Regularizer::LogBarrier => log_barrier_leader(&z),
    }
}

/// `x(a) = 1/(z(a) + lambda)` with `sum x = 1`, where `min z = 0`.
fn log_barrier_leader(z: &[f64]) -> Vec<f64> {
    let d = z.len() as f64;
    let (mut lo, mut hi) = (1.0, d);
    let mass = |lam: f64| z.iter().map(|v| 1.0 / (v + lam)).sum::<f64>();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let m = mass(mid);
        if (m - 1.0).abs() <= 1e-15 {
            lo = mid;
            hi = mid;
            break;
        }
        if m > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lam = 0.5 * (lo + hi);
    let x: Vec<f64> = z.iter().map(|v| 1.0 / (v + lam)).collect();
    let s: f64 = x.iter().sum();
    x.into_iter().map(|v| v / s).collect()
}

impl FtrlAgentState {
    pub fn update(&mut self, q_hat: &[Vec<f64>]) {
        for (s, cum) in self.cumulative.iter_mut().enumerate() {
            if cum.is_empty() {
                continue;
            }
            for (c, q) in cum.iter_mut().zip(&q_hat[s]) {
                *c += q;
            }
            let x = ftrl_argmin(cum, self.eta, self.regularizer);
            self.policy.row_mut(s).copy_from_slice(&x);
        }
    }
}

pub fn ftrl_po_update(agent: &FtrlAgentState, q_hat: &[Vec<f64>]) -> FtrlAgentState {
    let mut next = agent.clone();
    next.update(q_hat);
    next
}
