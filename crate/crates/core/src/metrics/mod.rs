//! Exact regret, correlated-equilibrium gaps and bound residuals.

mod bounds;
mod regret;
mod report;
mod weighted;

pub use bounds::{
    default_eta, default_gamma, independent_log_bound, independent_path_regret_bound,
    path_length_bound, path_regret_bound, rvu_base_bound, state_rvu_bound, swap_regret_bound,
    Bound, BoundParams, Residual, ResidualTable,
};
pub use regret::{
    ce_gap, ce_gap_direct, ce_gap_max_inside, external_regret_exact, swap_regret_exact,
    ExternalRegret, RegretTracker, SwapRegret, DEFAULT_ENUMERATION_CAP,
};
pub use report::{checkpoint_schedule, CheckpointRow, PlayerSummary, RegretRecorder, RegretReport};
pub use weighted::{weighted_oomd_rhs, weighted_regret};
