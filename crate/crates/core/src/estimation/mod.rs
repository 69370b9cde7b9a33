//! Episode sampling, blocked Q estimation and reachability.

mod blocked;
mod estimator;
mod reach;
mod sampling;

pub use blocked::{
    lemma_block_length, run_blocked, sample_block, visit_count_bound, BlockConfig, BlockRecord,
    BlockedRun,
};
pub(crate) use blocked::write_header;
pub use estimator::{estimate_q, Normalization, QEstimate};
pub use reach::{min_reachability, Reachability};
pub use sampling::{sample_episode, sample_episode_seeded, stream_rng, Step, Trajectory, MAX_STREAMS};
