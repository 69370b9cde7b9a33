use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{
    resolve_bandit, resolve_full_info, resolve_independent, BanditOverrides, ExperimentConfig, GameSizes,
    GameSource, Mode, ResolvedParams,
};
use super::generators::{generate_random_game, generate_reachable_game};
use super::independent::{generate_independent_transition_game, IndependentGame};
use super::scripted::{build_ftrl_counterexample, KernelVariation, ACTION_B, S2};
use crate::error::{Error, Result};
use crate::estimation::{min_reachability, run_blocked, visit_count_bound, BlockConfig, BlockedRun, Normalization};
use crate::game::{evaluate, InducedMdp, Layout, MarkovGame, PolicyProfile};
use crate::learner::{ftrl_init, posr_init, AgentState, Regularizer};
use crate::metrics::{
    independent_log_bound, independent_path_regret_bound, path_length_bound, path_regret_bound,
    state_rvu_bound, swap_regret_bound, BoundParams, RegretRecorder, RegretReport, RegretTracker,
    Residual, ResidualTable,
};

/// Result of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub header: Vec<(String, String)>,
    pub params: ResolvedParams,
    pub report: RegretReport,
    pub final_profile: Option<PolicyProfile>,
    /// Full blocked-run log; not kept in serialized run files.
    #[serde(skip)]
    pub blocked: Option<BlockedRun>,
    pub bandit: Option<BanditDiagnostics>,
    pub ftrl: Option<FtrlDemoReport>,
    /// Whether every induced kernel equalled the first episode's (independent mode).
    pub kernels_invariant: Option<bool>,
}

pub fn game_sizes(game: &MarkovGame) -> GameSizes {
    GameSizes {
        horizon: game.horizon(),
        players: game.num_players(),
        states: game.layout().num_decision_states(),
        actions: game.max_actions(),
    }
}

pub fn independent_sizes(game: &IndependentGame) -> GameSizes {
    let m = game.num_players();
    GameSizes {
        horizon: game.horizon(),
        players: m,
        states: (0..m).map(|i| game.layout(i).num_decision_states()).max().unwrap_or(0),
        actions: game.action_counts().iter().copied().max().unwrap_or(0),
    }
}

fn bound_params(z: &GameSizes, player_actions: usize, episodes: usize, p: &ResolvedParams) -> BoundParams {
    BoundParams {
        horizon: z.horizon,
        states: z.states,
        actions: z.actions,
        player_actions,
        players: z.players,
        episodes,
        eta: p.eta,
        gamma: p.gamma,
        epsilon: p.epsilon,
    }
}

fn init_agents(layouts: &[&Layout], counts: &[usize], p: &ResolvedParams) -> Result<Vec<AgentState>> {
    layouts
        .iter()
        .zip(counts)
        .enumerate()
        .map(|(i, (l, &a))| posr_init(i, l, a, p.gamma, p.eta))
        .collect()
}

fn profile_of(agents: &[AgentState]) -> PolicyProfile {
    PolicyProfile::new(agents.iter().map(|a| a.policy.clone()).collect())
}

/// Full-information loop: every player observes its exact Q-function each
/// episode. `induce` returns player `i`'s induced MDP under a profile.
fn run_exact_loop(
    agents: &mut [AgentState],
    episodes: usize,
    recorder: &mut RegretRecorder,
    induce: impl Fn(&PolicyProfile, usize) -> Result<InducedMdp> + Sync,
    mut inspect: impl FnMut(&[InducedMdp]),
) -> Result<PolicyProfile> {
    let m = agents.len();
    for _ in 0..episodes {
        let profile = profile_of(agents);
        let mdps = (0..m)
            .into_par_iter()
            .map(|i| induce(&profile, i))
            .collect::<Result<Vec<_>>>()?;
        inspect(&mdps);
        recorder.push(&mdps, &profile);
        agents
            .par_iter_mut()
            .zip(&mdps)
            .try_for_each(|(agent, mdp)| agent.update(&evaluate(mdp, &agent.policy).q))?;
    }
    let last = profile_of(agents);
    recorder.finish_path(&last);
    Ok(last)
}

/// Worst residual of a regret bound over the recorded checkpoints, preferring
/// checkpoints where the bound applies.
fn checkpoint_residual(
    recorder_rows: &RegretReport,
    player: usize,
    bound: impl Fn(usize) -> crate::metrics::Bound,
) -> Option<Residual> {
    recorder_rows
        .checkpoints
        .iter()
        .filter(|r| r.player == player)
        .map(|r| Residual::upper(format!("swap regret bound at checkpoints, player {player}"), bound(r.episode), r.swap_regret))
        .min_by(|a, b| b.applies().cmp(&a.applies()).then(a.residual.total_cmp(&b.residual)))
}

/// Runs every player on POSR with exact Q-functions.
pub fn run_full_info(
    game: &MarkovGame,
    episodes: usize,
    params: &ResolvedParams,
    checkpoints: usize,
    cap: u64,
) -> Result<RunOutput> {
    let z = game_sizes(game);
    let layouts = vec![game.layout(); game.num_players()];
    let mut agents = init_agents(&layouts, game.action_counts(), params)?;
    let mut recorder = RegretRecorder::for_game(game, episodes, checkpoints, cap);
    let last = run_exact_loop(&mut agents, episodes, &mut recorder, |p, i| game.induce_mdp(p, i), |_| ())?;

    let mut table = ResidualTable::default();
    let mut notes = Vec::new();
    if !recorder.is_exact() {
        notes.push("swap space above the enumeration cap; swap regret is a restricted-search lower bound".into());
    }
    let paths = recorder.paths().clone();
    let (path1, path2) = (paths.total_first(), paths.total_second());
    let mut per_state = Vec::new();
    let mut finals = Vec::new();
    for (i, tr) in recorder.trackers().iter().enumerate() {
        let a = game.action_counts()[i];
        let bp = bound_params(&z, a, episodes, params);
        finals.push((i, bp.clone(), tr.swap_regret().value));
        for &s in tr.decision_states() {
            per_state.push(Residual::upper(
                format!("state swap regret bound, player {i}, state {s}"),
                state_rvu_bound(&bp, path2, tr.state_path_sq(s)),
                tr.state_swap_regret(s),
            ));
        }
    }
    let report = recorder.into_report(ResidualTable::default(), Vec::new());
    for (i, bp, swap) in finals {
        table.push(Residual::upper(format!("swap regret bound, player {i}"), swap_regret_bound(&bp), swap));
        if let Some(r) = checkpoint_residual(&report, i, |t| swap_regret_bound(&BoundParams { episodes: t, ..bp.clone() })) {
            table.push(r);
        }
        table.push(Residual::upper(
            format!("path-dependent swap regret bound, player {i}"),
            path_regret_bound(&bp, path1, path2),
            swap,
        ));
    }
    table.push(Residual::upper(
        "second-order path length bound",
        path_length_bound(&bound_params(&z, z.actions, episodes, params)),
        path2,
    ));
    for r in per_state {
        table.push(r);
    }
    let report = RegretReport {
        residuals: table,
        notes,
        ..report
    };
    Ok(RunOutput {
        header: params.header(),
        params: params.clone(),
        report,
        final_profile: Some(last),
        blocked: None,
        bandit: None,
        ftrl: None,
        kernels_invariant: None,
    })
}

/// Estimation quality of a blocked bandit run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanditDiagnostics {
    pub beta: f64,
    pub block: usize,
    pub blocks: usize,
    /// `(player, block, state, action)` cells.
    pub cells: usize,
    /// Cells with `|Q_hat - Q| > epsilon`.
    pub inaccurate_cells: usize,
    pub max_error: f64,
    pub unvisited_cells: usize,
    /// Visit-count lower bound that should hold in every cell of a block.
    pub visit_bound: f64,
    /// Blocks in which some cell fell below `visit_bound`.
    pub blocks_below_visit_bound: usize,
}

impl BanditDiagnostics {
    pub fn inaccurate_fraction(&self) -> f64 {
        if self.cells == 0 {
            0.0
        } else {
            self.inaccurate_cells as f64 / self.cells as f64
        }
    }
}

/// Blocked bandit-feedback run; regret is evaluated on the block profiles and
/// scaled by the block length.
#[allow(clippy::too_many_arguments)]
pub fn run_bandit(
    game: &MarkovGame,
    episodes: usize,
    params: &ResolvedParams,
    beta: f64,
    normalization: Normalization,
    seed: u64,
    checkpoints: usize,
    cap: u64,
) -> Result<RunOutput> {
    let z = game_sizes(game);
    let layouts = vec![game.layout(); game.num_players()];
    let mut agents = init_agents(&layouts, game.action_counts(), params)?;
    let config = BlockConfig {
        block: params.block,
        epsilon: params.epsilon,
        delta: params.delta,
        beta,
        normalization,
    };
    let blocked = run_blocked(game, &mut agents, episodes, &config, seed)?;
    let k_n = blocked.num_blocks();
    let mut recorder = RegretRecorder::for_game(game, k_n, checkpoints, cap).with_scale(params.block);
    let visit_bound = visit_count_bound(
        z.players, z.states, z.actions, blocked.episodes, params.delta, params.gamma, beta, params.block,
    );
    let mut diag = BanditDiagnostics {
        beta,
        block: params.block,
        blocks: k_n,
        cells: 0,
        inaccurate_cells: 0,
        max_error: 0.0,
        unvisited_cells: 0,
        visit_bound,
        blocks_below_visit_bound: 0,
    };
    for rec in &blocked.blocks {
        let mdps = (0..z.players)
            .map(|i| game.induce_mdp(&rec.profile, i))
            .collect::<Result<Vec<_>>>()?;
        let mut below = false;
        for (i, mdp) in mdps.iter().enumerate() {
            let q = evaluate(mdp, rec.profile.player(i)).q;
            let est = &rec.estimates[i];
            diag.unvisited_cells += est.unvisited.len();
            for s in game.layout().decision_states() {
                for (a, &qa) in q[s].iter().enumerate() {
                    let err = (est.q[s][a] - qa).abs();
                    diag.cells += 1;
                    diag.max_error = diag.max_error.max(err);
                    if err > params.epsilon {
                        diag.inaccurate_cells += 1;
                    }
                    if (est.visits[s][a] as f64) < visit_bound {
                        below = true;
                    }
                }
            }
        }
        if below {
            diag.blocks_below_visit_bound += 1;
        }
        recorder.push(&mdps, &rec.profile);
    }
    recorder.finish_path(&blocked.final_profile);

    let mut notes = Vec::new();
    if blocked.episodes != episodes {
        notes.push(format!(
            "episodes rounded down from {episodes} to {} (a multiple of the block length)",
            blocked.episodes
        ));
    }
    if !recorder.is_exact() {
        notes.push("swap space above the enumeration cap; swap regret is a restricted-search lower bound".into());
    }
    let accuracy = (diag.max_error > params.epsilon).then(|| {
        format!(
            "estimates missed epsilon in {} of {} cells",
            diag.inaccurate_cells, diag.cells
        )
    });
    let paths = recorder.paths().clone();
    let scale = params.block as f64;
    let finals: Vec<_> = recorder
        .trackers()
        .iter()
        .enumerate()
        .map(|(i, tr)| (i, tr.swap_regret().value * scale))
        .collect();
    let mut table = ResidualTable::default();
    for (i, swap) in finals {
        let bp = bound_params(&z, game.action_counts()[i], k_n, params);
        for (name, mut b) in [
            (format!("blocked swap regret bound, player {i}"), swap_regret_bound(&bp)),
            (
                format!("blocked path-dependent swap regret bound, player {i}"),
                path_regret_bound(&bp, paths.total_first(), paths.total_second()),
            ),
        ] {
            b.value *= scale;
            if b.precondition.is_none() {
                b.precondition = accuracy.clone();
            }
            table.push(Residual::upper(name, b, swap));
        }
    }
    let mut report = recorder.into_report(table, notes);
    report.episodes = blocked.episodes;
    let mut header = params.header();
    header.push(("seed".into(), seed.to_string()));
    header.push(("normalization".into(), normalization.to_string()));
    Ok(RunOutput {
        header,
        params: params.clone(),
        report,
        final_profile: Some(blocked.final_profile.clone()),
        blocked: Some(blocked),
        bandit: Some(diag),
        ftrl: None,
        kernels_invariant: None,
    })
}

/// POSR with exact Q-functions on a game with independent transitions.
pub fn run_independent(
    game: &IndependentGame,
    episodes: usize,
    params: &ResolvedParams,
    checkpoints: usize,
    cap: u64,
) -> Result<RunOutput> {
    let z = independent_sizes(game);
    let m = game.num_players();
    let layouts: Vec<&Layout> = (0..m).map(|i| game.layout(i)).collect();
    let mut agents = init_agents(&layouts, game.action_counts(), params)?;
    let players: Vec<(Arc<Layout>, usize)> = (0..m)
        .map(|i| (game.shared_layout(i), game.action_counts()[i]))
        .collect();
    let mut recorder = RegretRecorder::new(&players, episodes, checkpoints, cap);
    let mut first: Option<Vec<InducedMdp>> = None;
    let mut invariant = true;
    let last = run_exact_loop(
        &mut agents,
        episodes,
        &mut recorder,
        |p, i| game.induce_mdp(p, i),
        |mdps| match &first {
            None => first = Some(mdps.to_vec()),
            Some(f) => {
                invariant &= f.iter().zip(mdps).all(|(a, b)| a.kernels() == b.kernels());
            }
        },
    )?;
    let paths = recorder.paths().clone();
    let finals: Vec<_> = recorder
        .trackers()
        .iter()
        .enumerate()
        .map(|(i, tr)| (i, tr.swap_regret().value))
        .collect();
    let mut notes = Vec::new();
    if !recorder.is_exact() {
        notes.push("swap space above the enumeration cap; swap regret is a restricted-search lower bound".into());
    }
    let report = recorder.into_report(ResidualTable::default(), Vec::new());
    let mut table = ResidualTable::default();
    for (i, swap) in finals {
        let bp = bound_params(&z, game.action_counts()[i], episodes, params);
        table.push(Residual::upper(
            format!("independent-transition swap regret bound, player {i}"),
            independent_path_regret_bound(&bp, paths.total_second()),
            swap,
        ));
        table.push(Residual::upper(format!("logarithmic swap regret bound, player {i}"), independent_log_bound(&bp), swap));
        if let Some(r) = checkpoint_residual(&report, i, |t| {
            independent_log_bound(&BoundParams {
                episodes: t,
                gamma: 1.0 / t as f64,
                ..bp.clone()
            })
        }) {
            table.push(Residual {
                name: format!("logarithmic swap regret bound at checkpoints, player {i}"),
                ..r
            });
        }
    }
    table.push(Residual::upper(
        "second-order path length bound",
        path_length_bound(&bound_params(&z, z.actions, episodes, params)),
        paths.total_second(),
    ));
    if !invariant {
        notes.push("induced kernels changed between episodes".into());
    }
    Ok(RunOutput {
        header: params.header(),
        params: params.clone(),
        report: RegretReport {
            residuals: table,
            notes,
            ..report
        },
        final_profile: Some(last),
        blocked: None,
        bandit: None,
        ftrl: None,
        kernels_invariant: Some(invariant),
    })
}

/// One learner's result on the scripted environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtrlDemoRow {
    pub learner: String,
    pub eta: f64,
    /// Truncation level; 0 for FTRL over the full simplex.
    pub gamma: f64,
    pub episodes: usize,
    /// Exact regret against the best fixed policy.
    pub regret: f64,
    pub regret_per_episode: f64,
    /// Swap regret over the restricted candidate set.
    pub swap_lower_bound: f64,
    /// `min_t pi_t(b|s2)` over the first two thirds of the episodes.
    pub min_b_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtrlDemoReport {
    pub episodes: usize,
    pub variation: KernelVariation,
    pub rows: Vec<FtrlDemoRow>,
}

/// Scripted-environment settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtrlDemoConfig {
    pub episodes: usize,
    pub eta_grid: Vec<f64>,
    pub regularizers: Vec<Regularizer>,
    /// POSR runs at these episode counts.
    pub posr_episodes: Vec<usize>,
    pub posr_eta: f64,
    /// POSR truncation; `None` uses [`demo_posr_gamma`] for each run.
    pub posr_gamma: Option<f64>,
}

fn scripted_run(
    episodes: usize,
    mut policy_at: impl FnMut(usize, &InducedMdp) -> Result<crate::game::Policy>,
) -> Result<(f64, f64, f64, usize)> {
    let (env, _) = build_ftrl_counterexample(episodes);
    let layout = Arc::new(env.layout().clone());
    let mut tracker = RegretTracker::restricted(layout, 2, crate::metrics::DEFAULT_ENUMERATION_CAP);
    let mut min_b = f64::INFINITY;
    for t in 1..=env.episodes {
        let mdp = env.mdp_at(t);
        let pi = policy_at(t, mdp)?;
        if 3 * t <= 2 * env.episodes {
            min_b = min_b.min(pi.row(S2)[ACTION_B]);
        }
        tracker.push(mdp, &pi);
    }
    let regret = tracker.external_regret().expect("small policy space").value;
    Ok((regret, tracker.swap_regret().value, min_b, env.episodes))
}

/// FTRL over an eta grid and both regularizers, then POSR, on the scripted environment.
pub fn run_ftrl_demo(config: &FtrlDemoConfig) -> Result<RunOutput> {
    let (env, rounding) = build_ftrl_counterexample(config.episodes);
    let mut rows = Vec::new();
    let jobs: Vec<(Regularizer, f64)> = config
        .regularizers
        .iter()
        .flat_map(|&r| config.eta_grid.iter().map(move |&e| (r, e)))
        .collect();
    let ftrl_rows = jobs
        .par_iter()
        .map(|&(reg, eta)| {
            let mut agent = ftrl_init(env.layout(), 2, eta, reg);
            let (regret, swap, min_b, t) = scripted_run(config.episodes, |_, mdp| {
                let pi = agent.policy.clone();
                agent.update(&evaluate(mdp, &pi).q);
                Ok(pi)
            })?;
            Ok(FtrlDemoRow {
                learner: format!("ftrl-{reg}"),
                eta,
                gamma: 0.0,
                episodes: t,
                regret,
                regret_per_episode: regret / t as f64,
                swap_lower_bound: swap,
                min_b_prob: min_b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.extend(ftrl_rows);
    let posr_rows = config
        .posr_episodes
        .par_iter()
        .map(|&n| {
            let gamma = config.posr_gamma.unwrap_or_else(|| demo_posr_gamma(config.posr_eta, n));
            let mut agent = posr_init(0, env.layout(), 2, gamma, config.posr_eta)?;
            let (regret, swap, min_b, t) = scripted_run(n, |_, mdp| {
                let pi = agent.policy.clone();
                agent.update(&evaluate(mdp, &pi).q)?;
                Ok(pi)
            })?;
            Ok(FtrlDemoRow {
                learner: "posr".into(),
                eta: config.posr_eta,
                gamma,
                episodes: t,
                regret,
                regret_per_episode: regret / t as f64,
                swap_lower_bound: swap,
                min_b_prob: min_b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.extend(posr_rows);

    let mut table = ResidualTable::default();
    let floor = env.episodes as f64 / 6.0;
    for r in rows.iter().filter(|r| r.learner.starts_with("ftrl")) {
        table.push(Residual::lower(format!("{} eta={} regret >= T/6", r.learner, r.eta), r.regret, floor));
    }
    let mut notes: Vec<String> = rounding.into_iter().collect();
    let v = env.kernel_variation();
    notes.push(format!(
        "kernel variation: {} summed over state-action pairs, {} as a max over pairs, {} in total variation",
        v.flat_l1, v.inf_1, v.total_variation
    ));
    let report = RegretReport {
        episodes: env.episodes,
        checkpoints: Vec::new(),
        players: Vec::new(),
        residuals: table,
        notes,
    };
    let header = vec![
        ("episodes".into(), env.episodes.to_string()),
        ("eta_grid".into(), format!("{:?}", config.eta_grid)),
        ("posr_eta".into(), config.posr_eta.to_string()),
        (
            "posr_gamma".into(),
            config.posr_gamma.map_or("min(1/4, (eta T)^(-1/2))".into(), |g| g.to_string()),
        ),
    ];
    Ok(RunOutput {
        header,
        params: ResolvedParams::default(),
        report,
        final_profile: None,
        blocked: None,
        bandit: None,
        ftrl: Some(FtrlDemoReport {
            episodes: env.episodes,
            variation: v,
            rows,
        }),
        kernels_invariant: None,
    })
}

/// FTRL step sizes tried by the scripted demo when no grid is given.
pub const DEFAULT_ETA_GRID: [f64; 6] = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0];

/// POSR step size on the scripted environment when none is given.
pub const DEMO_POSR_ETA: f64 = 1.0 / 6.0;

/// Default POSR truncation on the scripted environment: `min(1/(2A), (eta T)^(-1/2))`
/// with `A = 2`, balancing the `1/(eta gamma)` rounds needed to leave the
/// truncated boundary after the switch against the `gamma T` loss floor.
pub fn demo_posr_gamma(eta: f64, episodes: usize) -> f64 {
    (eta * episodes.max(1) as f64).powf(-0.5).min(0.25)
}

fn generator_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Loads or generates the Markov game named by `source`; the second value is
/// its minimum reach probability when the generator computed it.
pub fn load_game(source: &GameSource) -> Result<(MarkovGame, Option<f64>)> {
    match source {
        GameSource::File(path) => Ok((MarkovGame::load(path)?, None)),
        GameSource::Generator(g) => {
            let mut rng = generator_rng(g.seed);
            match g.min_beta {
                Some(b) => {
                    let (game, beta) =
                        generate_reachable_game(g.players, g.horizon, g.width, g.actions, b, &mut rng)?;
                    Ok((game, Some(beta)))
                }
                None => Ok((generate_random_game(g.players, g.horizon, g.width, g.actions, &mut rng)?, None)),
            }
        }
    }
}

/// Generates the independent-transition game described by `source`.
pub fn load_independent_game(source: &GameSource) -> Result<IndependentGame> {
    match source {
        GameSource::File(path) => Err(Error::Parameter(format!(
            "{}: independent-transition games are generated, not loaded from files",
            path.display()
        ))),
        GameSource::Generator(g) => {
            let widths = vec![g.width; g.players];
            generate_independent_transition_game(g.horizon, &widths, g.actions, &mut generator_rng(g.seed))
        }
    }
}

/// Resolves parameters and runs the experiment described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let t = config.episodes;
    let cap = config.enumeration_cap;
    let mut out = match config.mode {
        Mode::FullInfo => {
            let (game, _) = load_game(&config.game)?;
            let params = resolve_full_info(&game_sizes(&game), t, config.eta, config.gamma)?;
            run_full_info(&game, t, &params, config.checkpoints, cap)?
        }
        Mode::BanditBlocked => {
            let (game, _) = load_game(&config.game)?;
            let beta = min_reachability(&game).beta;
            let overrides = BanditOverrides {
                eta: config.eta,
                gamma: config.gamma,
                epsilon: config.epsilon,
                delta: config.delta,
                block: config.block,
            };
            let params = resolve_bandit(&game_sizes(&game), t, beta, &overrides)?;
            run_bandit(&game, t, &params, beta, config.normalization, config.seed, config.checkpoints, cap)?
        }
        Mode::IndependentTransition => {
            let game = load_independent_game(&config.game)?;
            let params = resolve_independent(&independent_sizes(&game), t, config.eta, config.gamma)?;
            run_independent(&game, t, &params, config.checkpoints, cap)?
        }
        Mode::FtrlDemo => {
            let demo = FtrlDemoConfig {
                episodes: t,
                eta_grid: config.eta_grid.clone().unwrap_or_else(|| DEFAULT_ETA_GRID.to_vec()),
                regularizers: config
                    .regularizer
                    .map_or_else(|| vec![Regularizer::Entropy, Regularizer::LogBarrier], |r| vec![r]),
                posr_episodes: vec![(t / 10).max(3), t, t.saturating_mul(10)],
                posr_eta: config.eta.unwrap_or(DEMO_POSR_ETA),
                posr_gamma: config.gamma,
            };
            run_ftrl_demo(&demo)?
        }
    };
    out.header.insert(0, ("mode".into(), config.mode.to_string()));
    Ok(out)
}
