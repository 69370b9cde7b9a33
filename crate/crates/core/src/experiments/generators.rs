use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::estimation::min_reachability;
use crate::game::{JointActionSpace, Layout, MarkovGame};

/// Smallest transition probability before renormalization.
pub const TRANSITION_FLOOR: f64 = 0.05;

/// Desk-scale limits on generated games.
pub const MAX_PLAYERS: usize = 4;
pub const MAX_ACTIONS: usize = 4;
pub const MAX_DECISION_STATES: usize = 12;

/// Symmetric Dirichlet(1) draw, floored at [`TRANSITION_FLOOR`] and renormalized.
pub(crate) fn floored_simplex(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let floored: Vec<f64> = raw.iter().map(|x| (x / total).max(TRANSITION_FLOOR)).collect();
    let total: f64 = floored.iter().sum();
    floored.into_iter().map(|x| x / total).collect()
}

pub(crate) fn check_sizes(players: usize, actions: usize, decision_states: usize) -> Result<()> {
    if players == 0 || players > MAX_PLAYERS {
        return Err(Error::Parameter(format!(
            "players = {players} must lie in 1..={MAX_PLAYERS}"
        )));
    }
    if !(2..=MAX_ACTIONS).contains(&actions) {
        return Err(Error::Parameter(format!(
            "actions = {actions} must lie in 2..={MAX_ACTIONS}"
        )));
    }
    if decision_states > MAX_DECISION_STATES {
        return Err(Error::Parameter(format!(
            "{decision_states} decision states exceed the limit of {MAX_DECISION_STATES}"
        )));
    }
    Ok(())
}

/// Random layered game: one initial state, `width` states in every later
/// decision layer, `actions` actions per player, uniform losses on `[0, 1]`.
pub fn generate_random_game(
    players: usize,
    horizon: usize,
    width: usize,
    actions: usize,
    rng: &mut impl Rng,
) -> Result<MarkovGame> {
    let layout = Layout::uniform(horizon, width)?;
    check_sizes(players, actions, layout.num_decision_states())?;
    let counts = vec![actions; players];
    let joint = JointActionSpace::new(&counts).len();
    let n = layout.num_states();
    let mut transition = vec![Vec::new(); n];
    for s in layout.decision_states() {
        let next = layout.successors(s).len();
        transition[s] = (0..joint).map(|_| floored_simplex(next, rng)).collect();
    }
    let losses = (0..players)
        .map(|_| {
            (0..n)
                .map(|s| {
                    if layout.is_terminal(s) {
                        Vec::new()
                    } else {
                        (0..joint).map(|_| rng.random::<f64>()).collect()
                    }
                })
                .collect()
        })
        .collect();
    MarkovGame::new(layout, counts, transition, losses)
}

/// Draws games until the minimum reach probability is at least `min_beta`.
pub fn generate_reachable_game(
    players: usize,
    horizon: usize,
    width: usize,
    actions: usize,
    min_beta: f64,
    rng: &mut impl Rng,
) -> Result<(MarkovGame, f64)> {
    for _ in 0..10_000 {
        let g = generate_random_game(players, horizon, width, actions, rng)?;
        let beta = min_reachability(&g).beta;
        if beta >= min_beta {
            return Ok((g, beta));
        }
    }
    Err(Error::Parameter(format!(
        "no game with reachability >= {min_beta} found in 10000 draws"
    )))
}
