use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{MarkovGame, PolicyProfile, StateId};

/// Players per episode supported by the stream layout.
pub const MAX_STREAMS: u64 = 256;

/// Independent generator for `(episode, index)`: index `i < m` drives player
/// `i`'s actions and index `m` drives the transitions.
pub fn stream_rng(seed: u64, episode: u64, index: u64) -> ChaCha8Rng {
    debug_assert!(index < MAX_STREAMS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(episode * MAX_STREAMS + index);
    rng
}

/// One decision step of an episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub state: StateId,
    /// Encoded joint action.
    pub joint_action: usize,
    /// Per-player loss at `(state, joint_action)`.
    pub losses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// One entry per layer `0..H`.
    pub steps: Vec<Step>,
    pub terminal: StateId,
}

impl Trajectory {
    /// Sum of player `i`'s losses over the episode.
    pub fn realized_return(&self, player: usize) -> f64 {
        self.steps.iter().map(|s| s.losses[player]).sum()
    }
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn categorical(p: &[f64], rng: &mut impl RngCore) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &w) in p.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    // u landed in the rounding gap above the total mass
    p.iter().rposition(|&w| w > 0.0).unwrap_or(p.len() - 1)
}

/// Simulates one episode, drawing every action and transition from `rng`.
pub fn sample_episode(game: &MarkovGame, profile: &PolicyProfile, rng: &mut impl RngCore) -> Trajectory {
    sample_with(game, profile, |_, p| categorical(p, rng))
}

/// Simulates episode `episode` with the split streams of [`stream_rng`], so
/// the outcome does not depend on the order episodes are sampled in.
pub fn sample_episode_seeded(game: &MarkovGame, profile: &PolicyProfile, seed: u64, episode: u64) -> Trajectory {
    let m = game.num_players();
    let mut rngs: Vec<ChaCha8Rng> = (0..=m as u64).map(|i| stream_rng(seed, episode, i)).collect();
    sample_with(game, profile, |who, p| categorical(p, &mut rngs[who]))
}

/// `draw(who, p)` samples from `p` for player `who`, or for nature when `who == m`.
fn sample_with(
    game: &MarkovGame,
    profile: &PolicyProfile,
    mut draw: impl FnMut(usize, &[f64]) -> usize,
) -> Trajectory {
    let layout = game.layout();
    let joint = game.joint_actions();
    let m = game.num_players();
    let mut s = layout.initial();
    let mut steps = Vec::with_capacity(layout.horizon());
    let mut actions = vec![0; m];
    for _ in 0..layout.horizon() {
        for (i, a) in actions.iter_mut().enumerate() {
            *a = draw(i, profile.policies[i].row(s));
        }
        let j = joint.encode(&actions);
        let losses = (0..m).map(|i| game.loss(i, s, j)).collect();
        steps.push(Step {
            state: s,
            joint_action: j,
            losses,
        });
        let k = draw(m, game.transition_row(s, j));
        s = layout.successors(s)[k];
    }
    Trajectory { steps, terminal: s }
}
