use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimator::{estimate_q, Normalization, QEstimate};
use super::sampling::{sample_episode_seeded, Trajectory};
use crate::error::{Error, Result};
use crate::game::{MarkovGame, PolicyProfile};
use crate::learner::AgentState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    /// Episodes per policy update.
    pub block: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    #[serde(default)]
    pub normalization: Normalization,
}

/// `ceil(2 H^2 ln(m S A T / delta) / (gamma beta eps^2))`, with `S` the number
/// of decision states and `A` the largest action count.
#[allow(clippy::too_many_arguments)]
pub fn lemma_block_length(
    horizon: usize,
    players: usize,
    states: usize,
    actions: usize,
    episodes: usize,
    delta: f64,
    gamma: f64,
    beta: f64,
    epsilon: f64,
) -> usize {
    let h = horizon as f64;
    let log = (players as f64 * states as f64 * actions as f64 * episodes as f64 / delta).ln();
    (2.0 * h * h * log / (gamma * beta * epsilon * epsilon)).ceil().max(1.0) as usize
}

/// Lower bound `gamma beta B / 2 - ln(m S A T / delta)` on the visit count of
/// every cell in a block, holding with probability at least `1 - delta`.
#[allow(clippy::too_many_arguments)]
pub fn visit_count_bound(
    players: usize,
    states: usize,
    actions: usize,
    episodes: usize,
    delta: f64,
    gamma: f64,
    beta: f64,
    block: usize,
) -> f64 {
    gamma * beta * block as f64 / 2.0
        - (players as f64 * states as f64 * actions as f64 * episodes as f64 / delta).ln()
}

/// Policies and estimates of one block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub profile: PolicyProfile,
    /// One estimate per player.
    pub estimates: Vec<QEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockedRun {
    pub seed: u64,
    pub block: usize,
    /// Episodes requested before rounding down to a multiple of the block.
    pub requested_episodes: usize,
    pub episodes: usize,
    pub players: usize,
    /// Realized return of player `i` in episode `e` at `returns[e * players + i]`.
    pub returns: Vec<f64>,
    pub blocks: Vec<BlockRecord>,
    /// Profile after the last update.
    pub final_profile: PolicyProfile,
}

impl BlockedRun {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn realized_return(&self, episode: usize, player: usize) -> f64 {
        self.returns[episode * self.players + player]
    }

    /// Block profiles, one per update.
    pub fn block_profiles(&self) -> Vec<PolicyProfile> {
        self.blocks.iter().map(|b| b.profile.clone()).collect()
    }

    /// Per-episode profiles: each block profile repeated `block` times.
    pub fn episode_profiles(&self) -> Vec<PolicyProfile> {
        self.blocks
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.profile.clone(), self.block))
            .collect()
    }

    /// CSV `episode, block, player, realized_return`, preceded by `# key=value` lines.
    pub fn write_returns_csv(&self, mut w: impl Write, header: &[(String, String)]) -> io::Result<()> {
        write_header(&mut w, header)?;
        writeln!(w, "episode,block,player,realized_return")?;
        for e in 0..self.episodes {
            for i in 0..self.players {
                writeln!(w, "{},{},{},{}", e, e / self.block, i, self.realized_return(e, i))?;
            }
        }
        Ok(())
    }

    /// CSV `block, player, state, action, policy_prob, q_hat, visit_count`.
    pub fn write_blocks_csv(&self, mut w: impl Write, header: &[(String, String)]) -> io::Result<()> {
        write_header(&mut w, header)?;
        writeln!(w, "block,player,state,action,policy_prob,q_hat,visit_count")?;
        for (k, b) in self.blocks.iter().enumerate() {
            for (i, est) in b.estimates.iter().enumerate() {
                let pol = b.profile.player(i);
                for (s, row) in est.q.iter().enumerate() {
                    for (a, q) in row.iter().enumerate() {
                        writeln!(
                            w,
                            "{k},{i},{s},{a},{},{q},{}",
                            pol.row(s)[a],
                            est.visits[s][a]
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn write_header(w: &mut impl Write, header: &[(String, String)]) -> io::Result<()> {
    for (k, v) in header {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Samples one block of episodes `first..first + len` under `profile`.
pub fn sample_block(
    game: &MarkovGame,
    profile: &PolicyProfile,
    seed: u64,
    first: usize,
    len: usize,
) -> Vec<Trajectory> {
    (first..first + len)
        .into_par_iter()
        .map(|e| sample_episode_seeded(game, profile, seed, e as u64))
        .collect()
}

/// Blocked bandit-feedback execution: each player holds its policy for
/// `config.block` episodes, estimates its Q-function from the block, then
/// updates. `episodes` is rounded down to a multiple of the block length.
pub fn run_blocked(
    game: &MarkovGame,
    agents: &mut [AgentState],
    episodes: usize,
    config: &BlockConfig,
    seed: u64,
) -> Result<BlockedRun> {
    let m = game.num_players();
    if agents.len() != m {
        return Err(Error::Dimension(format!(
            "{} agents for a {m}-player game",
            agents.len()
        )));
    }
    if config.block == 0 || config.block > episodes {
        return Err(Error::Parameter(format!(
            "block length {} must lie in 1..={episodes}",
            config.block
        )));
    }
    let blocks = episodes / config.block;
    let effective = blocks * config.block;
    let mut returns = Vec::with_capacity(effective * m);
    let mut records = Vec::with_capacity(blocks);
    for k in 0..blocks {
        let profile = PolicyProfile::new(agents.iter().map(|a| a.policy.clone()).collect());
        let trajectories = sample_block(game, &profile, seed, k * config.block, config.block);
        for tr in &trajectories {
            returns.extend((0..m).map(|i| tr.realized_return(i)));
        }
        let estimates: Vec<QEstimate> = (0..m)
            .map(|i| {
                estimate_q(
                    &trajectories,
                    i,
                    game.layout(),
                    game.joint_actions(),
                    config.normalization,
                )
            })
            .collect();
        for (agent, est) in agents.iter_mut().zip(&estimates) {
            agent.update(&est.q)?;
        }
        records.push(BlockRecord { profile, estimates });
    }
    Ok(BlockedRun {
        seed,
        block: config.block,
        requested_episodes: episodes,
        episodes: effective,
        players: m,
        returns,
        blocks: records,
        final_profile: PolicyProfile::new(agents.iter().map(|a| a.policy.clone()).collect()),
    })
}
