//! Layered Markov games, induced MDPs and exact evaluation.

mod file;
mod layout;
mod mdp;
mod model;
mod policy;

pub use file::{GameFile, LossRecord, TransitionRecord};
pub use layout::{Layout, StateId};
pub use mdp::{evaluate, occupancy, InducedMdp, OccupancyMeasure, ValueTables};
pub use model::{
    induce_mdp, joint_value, validate_game, Issue, JointActionSpace, MarkovGame, ValidationReport,
    ROW_SUM_TOL,
};
pub use policy::{
    apply_swap, l1_distance, path_lengths, swap_row, PathLengths, Policy, PolicyProfile,
    SwapFunction,
};
