//! Game generators, the scripted FTRL environment, run loops and report files.

mod config;
mod emit;
mod generators;
mod independent;
mod runners;
mod scripted;

pub use config::{
    resolve_bandit, resolve_full_info, resolve_independent, BanditOverrides, ExperimentConfig,
    GameSizes, GameSource, GeneratorSpec, Mode, ParamNote, ResolvedParams,
};
pub use emit::{regret_svg, write_outputs};
pub use generators::{
    generate_random_game, generate_reachable_game, MAX_ACTIONS, MAX_DECISION_STATES, MAX_PLAYERS,
    TRANSITION_FLOOR,
};
pub use independent::{generate_independent_transition_game, IndependentGame};
pub use runners::{
    game_sizes, independent_sizes, load_game, load_independent_game, demo_posr_gamma, run_bandit, run_experiment, DEFAULT_ETA_GRID, DEMO_POSR_ETA, run_ftrl_demo, run_full_info, run_independent,
    BanditDiagnostics, FtrlDemoConfig, FtrlDemoReport, FtrlDemoRow, RunOutput,
};
pub use scripted::{build_ftrl_counterexample, KernelVariation, ScriptedMdp, ACTION_A, ACTION_B};
