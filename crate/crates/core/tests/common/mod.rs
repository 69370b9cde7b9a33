//! Independent oracles shared by the integration tests. Nothing here calls the
//! library's evaluation code; values are recomputed by enumeration.
#![allow(dead_code)]

pub mod checks;

use std::sync::Arc;

use posr_core::{InducedMdp, Layout, MarkovGame, Policy, PolicyProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the simplex (normalised exponentials).
pub fn simplex(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

/// Point of the gamma-truncated simplex.
pub fn truncated_simplex(rng: &mut impl Rng, d: usize, gamma: f64) -> Vec<f64> {
    let free = 1.0 - d as f64 * gamma;
    simplex(rng, d).into_iter().map(|x| gamma + free * x).collect()
}

pub fn random_mdp(rng: &mut impl Rng, horizon: usize, width: usize, actions: usize) -> InducedMdp {
    let layout = Arc::new(Layout::uniform(horizon, width).unwrap());
    let n = layout.num_states();
    let mut loss = vec![Vec::new(); n];
    let mut kernel = vec![Vec::new(); n];
    for s in layout.decision_states() {
        let k = layout.successors(s).len();
        loss[s] = (0..actions).map(|_| rng.random::<f64>()).collect();
        kernel[s] = (0..actions).map(|_| simplex(rng, k)).collect();
    }
    InducedMdp::new(layout, actions, loss, kernel).unwrap()
}

/// Same layout and actions as `base`, fresh losses and kernel.
pub fn perturbed_mdp(rng: &mut impl Rng, base: &InducedMdp, scale: f64) -> InducedMdp {
    let layout = base.shared_layout();
    let a = base.num_actions();
    let n = layout.num_states();
    let mut loss = vec![Vec::new(); n];
    let mut kernel = vec![Vec::new(); n];
    for s in layout.decision_states() {
        loss[s] = (0..a)
            .map(|b| (base.loss(s, b) + scale * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0))
            .collect();
        kernel[s] = (0..a)
            .map(|b| {
                let fresh = simplex(rng, base.kernel_row(s, b).len());
                base.kernel_row(s, b)
                    .iter()
                    .zip(fresh)
                    .map(|(&p, f)| (1.0 - scale) * p + scale * f)
                    .collect()
            })
            .collect();
    }
    InducedMdp::new(layout, a, loss, kernel).unwrap()
}

pub fn random_policy(rng: &mut impl Rng, layout: &Layout, actions: usize) -> Policy {
    let rows = (0..layout.num_states())
        .map(|s| if layout.is_terminal(s) { Vec::new() } else { simplex(rng, actions) })
        .collect();
    Policy::from_rows(layout, actions, rows).unwrap()
}

/// Random game on `Layout::uniform(horizon, width)` with equal action counts.
pub fn random_game(rng: &mut impl Rng, players: usize, horizon: usize, width: usize, actions: usize) -> MarkovGame {
    let layout = Layout::uniform(horizon, width).unwrap();
    let n = layout.num_states();
    let joint = actions.pow(players as u32);
    let mut transition = vec![Vec::new(); n];
    let mut losses = vec![vec![Vec::new(); n]; players];
    for s in layout.decision_states() {
        let k = layout.successors(s).len();
        transition[s] = (0..joint).map(|_| simplex(rng, k)).collect();
        for l in losses.iter_mut() {
            l[s] = (0..joint).map(|_| rng.random::<f64>()).collect();
        }
    }
    MarkovGame::new(layout, vec![actions; players], transition, losses).unwrap()
}

/// Game with a single decision state.
pub fn one_step_game(rng: &mut impl Rng, players: usize, actions: usize) -> MarkovGame {
    random_game(rng, players, 1, 1, actions)
}

pub fn random_profile(rng: &mut impl Rng, game: &MarkovGame) -> PolicyProfile {
    PolicyProfile::new(
        game.action_counts()
            .iter()
            .map(|&a| random_policy(rng, game.layout(), a))
            .collect(),
    )
}

/// Per-player actions of joint index `j`, player 0 most significant.
pub fn decode_joint(mut j: usize, counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    for i in (0..counts.len()).rev() {
        out[i] = j % counts[i];
        j /= counts[i];
    }
    out
}

/// Expected value of `f(state, action)` summed over a trajectory, by
/// enumerating every path of the layered MDP.
fn enumerate_paths(mdp: &InducedMdp, policy: &Policy, mut visit: impl FnMut(usize, usize, f64)) {
    fn rec(mdp: &InducedMdp, policy: &Policy, s: usize, p: f64, visit: &mut dyn FnMut(usize, usize, f64)) {
        let layout = mdp.layout();
        if layout.is_terminal(s) || p == 0.0 {
            return;
        }
        for a in 0..mdp.num_actions() {
            let pa = p * policy.row(s)[a];
            visit(s, a, pa);
            for (k, &next) in layout.successors(s).iter().enumerate() {
                rec(mdp, policy, next, pa * mdp.kernel_row(s, a)[k], visit);
            }
        }
    }
    rec(mdp, policy, mdp.layout().initial(), 1.0, &mut visit);
}

/// Expected total loss from the initial state.
pub fn path_value(mdp: &InducedMdp, policy: &Policy) -> f64 {
    let mut v = 0.0;
    enumerate_paths(mdp, policy, |s, a, p| v += p * mdp.loss(s, a));
    v
}

/// Probability of visiting each state.
pub fn path_occupancy(mdp: &InducedMdp, policy: &Policy) -> Vec<f64> {
    let layout = mdp.layout();
    let mut q = vec![0.0; layout.num_states()];
    enumerate_paths(mdp, policy, |s, _, p| q[s] += p);
    q[layout.terminal()] = 1.0;
    q
}

/// `Q(s, a)` by restarting the path enumeration at `s` after action `a`.
pub fn path_q(mdp: &InducedMdp, policy: &Policy, s: usize, a: usize) -> f64 {
    let layout = mdp.layout();
    let mut total = mdp.loss(s, a);
    for (k, &next) in layout.successors(s).iter().enumerate() {
        if layout.is_terminal(next) {
            continue;
        }
        let mut v = 0.0;
        fn rec(mdp: &InducedMdp, policy: &Policy, s: usize, p: f64, v: &mut f64) {
            let layout = mdp.layout();
            if layout.is_terminal(s) {
                return;
            }
            for b in 0..mdp.num_actions() {
                let pb = p * policy.row(s)[b];
                *v += pb * mdp.loss(s, b);
                for (k, &n) in layout.successors(s).iter().enumerate() {
                    rec(mdp, policy, n, pb * mdp.kernel_row(s, b)[k], v);
                }
            }
        }
        rec(mdp, policy, next, 1.0, &mut v);
        total += mdp.kernel_row(s, a)[k] * v;
    }
    total
}

/// Minimum reach probability per state over every deterministic joint-action
/// assignment, by forward propagation.
pub fn brute_force_min_reach(game: &MarkovGame) -> Vec<f64> {
    let layout = game.layout();
    let states: Vec<usize> = layout.decision_states().collect();
    let joint = game.joint_actions().len();
    let mut best = vec![f64::INFINITY; layout.num_states()];
    let total = joint.pow(states.len() as u32);
    for code in 0..total {
        let choice = decode_joint(code, &vec![joint; states.len()]);
        let mut reach = vec![0.0; layout.num_states()];
        reach[layout.initial()] = 1.0;
        for (idx, &s) in states.iter().enumerate() {
            let row = game.transition_row(s, choice[idx]);
            for (k, &next) in layout.successors(s).iter().enumerate() {
                reach[next] += reach[s] * row[k];
            }
        }
        for (b, r) in best.iter_mut().zip(&reach) {
            *b = b.min(*r);
        }
    }
    best
}

/// Swap regret of a sequence of mixed plays against loss vectors:
/// `sum_a max_b sum_t p_t(a) (l_t(a) - l_t(b))`.
pub fn bandit_swap_regret(plays: &[Vec<f64>], losses: &[Vec<f64>]) -> f64 {
    let d = plays[0].len();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| plays.iter().zip(losses).map(|(p, l)| p[a] * (l[a] - l[b])).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// Expected loss vector of `player` at the initial state of a one-step game
/// when the other players mix according to `profile`.
pub fn one_step_losses(game: &MarkovGame, profile: &PolicyProfile, player: usize) -> Vec<f64> {
    let s = game.layout().initial();
    let counts = game.action_counts();
    let mut out = vec![0.0; counts[player]];
    for j in 0..game.joint_actions().len() {
        let acts = decode_joint(j, counts);
        let w: f64 = (0..counts.len())
            .filter(|&k| k != player)
            .map(|k| profile.player(k).row(s)[acts[k]])
            .product();
        out[acts[player]] += w * game.loss(player, s, j);
    }
    out
}

/// Minimum of the prox objective over a fine grid of the truncated 2-simplex.
pub fn grid_prox_d2(y: &[f64], g: &[f64], eta: f64, gamma: f64, points: usize) -> f64 {
    let (lo, hi) = (gamma, 1.0 - gamma);
    (0..=points)
        .map(|k| {
            let x0 = lo + (hi - lo) * k as f64 / points as f64;
            let x = [x0, 1.0 - x0];
            let div: f64 = x.iter().zip(y).map(|(&xa, &ya)| (ya / xa).ln() + (xa - ya) / ya).sum();
            eta * (x[0] * g[0] + x[1] * g[1]) + div
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `max_s ||p(.|s) - q(.|s)||_1` over decision states.
pub fn policy_inf1(layout: &Layout, p: &Policy, q: &Policy) -> f64 {
    layout
        .decision_states()
        .map(|s| l1(p.row(s), q.row(s)))
        .fold(0.0, f64::max)
}
