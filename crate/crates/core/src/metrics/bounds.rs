use std::fmt;

use serde::{Deserialize, Serialize};

/// Problem sizes and learner parameters entering the regret bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub horizon: usize,
    /// Number of non-terminal states.
    pub states: usize,
    /// Largest action count over players.
    pub actions: usize,
    /// Action count of the evaluated player.
    pub player_actions: usize,
    pub players: usize,
    pub episodes: usize,
    pub eta: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

/// `1 / (96 H^2 m sqrt(S A))`.
pub fn default_eta(horizon: usize, players: usize, states: usize, actions: usize) -> f64 {
    let h = horizon as f64;
    1.0 / (96.0 * h * h * players as f64 * (states as f64 * actions as f64).sqrt())
}

/// `m H sqrt(S) A T^{-1/4}`, before any clamping.
pub fn default_gamma(horizon: usize, players: usize, states: usize, actions: usize, episodes: usize) -> f64 {
    players as f64 * horizon as f64 * (states as f64).sqrt() * actions as f64 * (episodes as f64).powf(-0.25)
}

/// A bound value plus the first violated precondition, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub precondition: Option<String>,
}

impl Bound {
    fn new(value: f64, checks: &[(bool, String)]) -> Self {
        Bound {
            value,
            precondition: checks.iter().find(|(ok, _)| !ok).map(|(_, m)| m.clone()),
        }
    }
}

fn log_inv(gamma: f64) -> f64 {
    (1.0 / gamma).ln()
}

fn eta_matches_default(p: &BoundParams) -> (bool, String) {
    let d = default_eta(p.horizon, p.players, p.states, p.actions);
    (
        ((p.eta - d) / d).abs() <= 1e-12,
        format!("eta = {} differs from the default {d}", p.eta),
    )
}

fn horizon_at_least_two(p: &BoundParams) -> (bool, String) {
    (p.horizon >= 2, format!("horizon {} < 2", p.horizon))
}

fn gamma_small(p: &BoundParams, a: usize) -> (bool, String) {
    (
        p.gamma <= 1.0 / (2.0 * a as f64),
        format!("gamma = {} > 1/(2*{a})", p.gamma),
    )
}

/// Swap regret bound of POSR under the default step size.
pub fn swap_regret_bound(p: &BoundParams) -> Bound {
    let (h, s, a, m, t) = (
        p.horizon as f64,
        p.states as f64,
        p.actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let lg = log_inv(p.gamma);
    let value = 1e4 * h.powi(4) * s * a.powi(3) * m * m * lg.sqrt() / p.gamma * t.sqrt()
        + 600.0 * m * h * s.sqrt() * a.powf(1.5) / p.gamma * p.epsilon * t
        + 2.0 * p.gamma * a * h * h * t
        + 150.0 * m * h * h * s.powf(1.5) * a.powf(3.5) * lg;
    Bound::new(
        value,
        &[horizon_at_least_two(p), gamma_small(p, p.actions), eta_matches_default(p)],
    )
}

/// Swap regret bound in terms of the first- and second-order path lengths
/// `sum_j sum_t ||pi^j_{t+1} - pi^j_t||_{inf,1}` and its squared version.
pub fn path_regret_bound(p: &BoundParams, path1: f64, path2: f64) -> Bound {
    let (h, s, ai, a, m, t) = (
        p.horizon as f64,
        p.states as f64,
        p.player_actions as f64,
        p.actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let eps = p.epsilon;
    let err = 4.0 * p.eta * eps * eps * s * t + eps * h * t + 2.0 * p.gamma * a * h * (h + eps) * t;
    let value = s * ai * ai * log_inv(p.gamma) / p.eta
        + 3.0 * ai * h * h / (p.eta * p.gamma) * path1
        + 4.0 * p.eta * m * s * ai * h.powi(4) * path2
        + err;
    Bound::new(value, &[horizon_at_least_two(p), gamma_small(p, p.player_actions)])
}

/// Bound on `sum_t sum_i ||pi^i_{t+1} - pi^i_t||_{inf,1}^2` under the default step size.
pub fn path_length_bound(p: &BoundParams) -> Bound {
    let (h, s, a, m, t) = (
        p.horizon as f64,
        p.states as f64,
        p.actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let value = 768.0 * s * a.powi(3) * m * log_inv(p.gamma) + 4.0 * p.epsilon * p.epsilon * t / (m * h.powi(4));
    Bound::new(value, &[eta_matches_default(p)])
}

/// Per-state swap regret bound; `path2` is the joint second-order path and
/// `own_state_path` is `sum_t ||pi_t(.|s) - pi_{t+1}(.|s)||_1^2`.
pub fn state_rvu_bound(p: &BoundParams, path2: f64, own_state_path: f64) -> Bound {
    let (h, ai, m, t) = (
        p.horizon as f64,
        p.player_actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let value = ai * ai * log_inv(p.gamma) / p.eta
        + 36.0 * p.eta * p.epsilon * p.epsilon * t
        + 4.0 * h.powi(4) * m * p.eta * path2
        - own_state_path / (576.0 * p.eta * ai);
    Bound::new(
        value,
        &[(
            p.eta <= 1.0 / (128.0 * h),
            format!("eta = {} > 1/(128 H)", p.eta),
        )],
    )
}

/// Swap regret bound with independent per-player transitions.
pub fn independent_path_regret_bound(p: &BoundParams, path2: f64) -> Bound {
    let (h, a, m, t) = (
        p.horizon as f64,
        p.actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let eps = p.epsilon;
    let value = a * a * log_inv(p.gamma) / p.eta
        + 24.0 * p.eta * h.powi(4) * a * m * path2
        + eps * h * t
        + 8.0 * p.eta * eps * eps * t;
    Bound::new(value, &[horizon_at_least_two(p), gamma_small(p, p.player_actions)])
}

/// `288 H^2 S^{3/2} A^{7/2} m log T` with independent transitions and `gamma = 1/T`.
pub fn independent_log_bound(p: &BoundParams) -> Bound {
    let (h, s, a, m, t) = (
        p.horizon as f64,
        p.states as f64,
        p.actions as f64,
        p.players as f64,
        p.episodes as f64,
    );
    let value = 288.0 * h * h * s.powf(1.5) * a.powf(3.5) * m * t.ln();
    Bound::new(
        value,
        &[
            (p.epsilon == 0.0, format!("epsilon = {} is not 0", p.epsilon)),
            eta_matches_default(p),
            (
                ((p.gamma * t) - 1.0).abs() <= 1e-12,
                format!("gamma = {} differs from 1/T", p.gamma),
            ),
            (t >= 2.0 * a, format!("T = {t} < 2A")),
            horizon_at_least_two(p),
        ],
    )
}

/// Regret bound of one log-barrier OOMD learner over `Delta^gamma_d`, given
/// `sum_t ||g_t - g_{t-1}||^2_{*,x_t}` and `sum_t ||x_t - x_{t-1}||^2_{x_t}`.
pub fn rvu_base_bound(d: usize, eta: f64, gamma: f64, max_loss: f64, loss_variation: f64, iterate_path: f64) -> Bound {
    let value = d as f64 * log_inv(gamma) / eta + 4.0 * eta * loss_variation - iterate_path / (576.0 * eta);
    Bound::new(
        value,
        &[(
            eta <= 1.0 / (64.0 * max_loss),
            format!("eta = {eta} > 1/(64 * {max_loss})"),
        )],
    )
}

/// One row of a residual table: `residual = rhs - lhs`, expected to be
/// nonnegative unless a precondition is violated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub rhs: f64,
    pub lhs: f64,
    pub residual: f64,
    pub precondition: Option<String>,
}

impl Residual {
    /// Upper-bound row `lhs <= bound`.
    pub fn upper(name: impl Into<String>, bound: Bound, lhs: f64) -> Self {
        Residual {
            name: name.into(),
            rhs: bound.value,
            lhs,
            residual: bound.value - lhs,
            precondition: bound.precondition,
        }
    }

    /// Lower-bound row `value >= floor`.
    pub fn lower(name: impl Into<String>, value: f64, floor: f64) -> Self {
        Residual {
            name: name.into(),
            rhs: value,
            lhs: floor,
            residual: value - floor,
            precondition: None,
        }
    }

    pub fn applies(&self) -> bool {
        self.precondition.is_none()
    }

    /// True when the row applies and its residual is negative.
    pub fn is_violation(&self) -> bool {
        self.applies() && self.residual < 0.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub rows: Vec<Residual>,
}

impl ResidualTable {
    pub fn push(&mut self, row: Residual) {
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn violations(&self) -> impl Iterator<Item = &Residual> {
        self.rows.iter().filter(|r| r.is_violation())
    }
}

impl fmt::Display for ResidualTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
        writeln!(f, "{:<w$} {:>14} {:>14} {:>14}  status", "check", "rhs", "lhs", "residual")?;
        for r in &self.rows {
            let status = match (&r.precondition, r.residual >= 0.0) {
                (Some(why), _) => format!("n/a ({why})"),
                (None, true) => "ok".to_string(),
                (None, false) => "VIOLATED".to_string(),
            };
            writeln!(
                f,
                "{:<w$} {:>14.6e} {:>14.6e} {:>14.6e}  {status}",
                r.name, r.rhs, r.lhs, r.residual
            )?;
        }
        Ok(())
    }
}
