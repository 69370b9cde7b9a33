//! Swap-regret learner: log-barrier OOMD base learners combined through
//! stationary distributions, plus an FTRL baseline.

mod ftrl;
mod oomd;
mod posr;
mod prox;
mod simplex;
mod stationary;

pub use ftrl::{ftrl_argmin, ftrl_init, ftrl_po_update, FtrlAgentState, Regularizer};
pub use oomd::{oomd_step, BaseState};
pub use posr::{check_learner_params, posr_init, posr_update, AgentState};
pub use prox::{bregman_prox, kkt_residual, prox_objective, ProxSolution, PROX_MAX_ITER, PROX_SUM_TOL};
pub use simplex::{
    dot, dual_local_norm, is_truncated, local_norm, local_norms, log_barrier_divergence, max_abs,
    truncation_violation, uniform,
};
pub use stationary::{
    power_iteration, solve_stationary, stationary_distribution, stationary_residual,
    StationarySolution, POWER_MAX_ITER, POWER_TOL, STATIONARY_TOL,
};
