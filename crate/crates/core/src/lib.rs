//! Decentralized no-swap-regret policy optimization for layered Markov games.

pub mod error;
pub mod experiments;
pub mod estimation;
pub mod game;
pub mod learner;
pub mod metrics;

pub use error::{Error, Result};
pub use game::{
    apply_swap, evaluate, induce_mdp, joint_value, occupancy, path_lengths, validate_game,
    InducedMdp, Layout, MarkovGame, OccupancyMeasure, PathLengths, Policy, PolicyProfile, StateId,
    SwapFunction, ValidationReport, ValueTables,
};
pub use learner::{AgentState, BaseState, FtrlAgentState, Regularizer};
