use std::sync::Arc;

use rand::Rng;

use super::generators::{check_sizes, floored_simplex};
use crate::error::{Error, Result};
use crate::game::{occupancy, InducedMdp, JointActionSpace, Layout, MarkovGame, Policy, PolicyProfile, StateId};

/// Game in which every player moves through its own layered MDP, driven only
/// by its own actions, while losses depend on all players' states and actions.
#[derive(Clone, Debug, PartialEq)]
pub struct IndependentGame {
    layouts: Vec<Arc<Layout>>,
    joint: JointActionSpace,
    /// `kernels[i][s][a]` over the successors of `s` in player `i`'s layout.
    kernels: Vec<Vec<Vec<Vec<f64>>>>,
    /// `losses[i][h][k][j]`: player `i`'s loss in layer `h` at joint position `k`
    /// (mixed radix over layer positions, player 0 most significant) and joint action `j`.
    losses: Vec<Vec<Vec<Vec<f64>>>>,
}

impl IndependentGame {
    pub fn new(
        layouts: Vec<Layout>,
        action_counts: Vec<usize>,
        kernels: Vec<Vec<Vec<Vec<f64>>>>,
        losses: Vec<Vec<Vec<Vec<f64>>>>,
    ) -> Result<Self> {
        let m = layouts.len();
        if m == 0 || action_counts.len() != m || kernels.len() != m || losses.len() != m {
            return Err(Error::Dimension(
                "layouts, action counts, kernels and losses must cover the same players".into(),
            ));
        }
        let horizon = layouts[0].horizon();
        if layouts.iter().any(|l| l.horizon() != horizon) {
            return Err(Error::Dimension("all players need the same horizon".into()));
        }
        let joint = JointActionSpace::new(&action_counts);
        for (i, (l, k)) in layouts.iter().zip(&kernels).enumerate() {
            if k.len() != l.num_states() {
                return Err(Error::Dimension(format!("player {i}: kernel does not cover the layout")));
            }
            for s in l.decision_states() {
                let width = l.successors(s).len();
                if k[s].len() != action_counts[i] || k[s].iter().any(|r| r.len() != width) {
                    return Err(Error::Dimension(format!("player {i}: kernel shape wrong at state {s}")));
                }
            }
        }
        let game = IndependentGame {
            layouts: layouts.into_iter().map(Arc::new).collect(),
            joint,
            kernels,
            losses,
        };
        for (i, l) in game.losses.iter().enumerate() {
            if l.len() != horizon
                || (0..horizon).any(|h| {
                    l[h].len() != game.joint_positions(h) || l[h].iter().any(|r| r.len() != game.joint.len())
                })
            {
                return Err(Error::Dimension(format!("player {i}: loss table shape wrong")));
            }
        }
        Ok(game)
    }

    pub fn num_players(&self) -> usize {
        self.layouts.len()
    }

    pub fn horizon(&self) -> usize {
        self.layouts[0].horizon()
    }

    pub fn layout(&self, player: usize) -> &Layout {
        &self.layouts[player]
    }

    pub fn shared_layout(&self, player: usize) -> Arc<Layout> {
        self.layouts[player].clone()
    }

    pub fn action_counts(&self) -> &[usize] {
        self.joint.counts()
    }

    /// Number of joint positions in layer `h`.
    pub fn joint_positions(&self, h: usize) -> usize {
        self.layouts.iter().map(|l| l.layer(h).len()).product()
    }

    fn decode_positions(&self, h: usize, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.num_players()];
        for i in (0..self.num_players()).rev() {
            let w = self.layouts[i].layer(h).len();
            out[i] = k % w;
            k /= w;
        }
        out
    }

    /// Player `i`'s own kernel paired with `loss`.
    fn own_mdp(&self, player: usize, loss: Vec<Vec<f64>>) -> InducedMdp {
        InducedMdp::from_parts_unchecked(
            self.layouts[player].clone(),
            self.joint.counts()[player],
            loss,
            self.kernels[player].clone(),
        )
    }

    fn zero_loss(&self, player: usize) -> Vec<Vec<f64>> {
        let l = &self.layouts[player];
        (0..l.num_states())
            .map(|s| if l.is_terminal(s) { Vec::new() } else { vec![0.0; self.joint.counts()[player]] })
            .collect()
    }

    fn check_profile(&self, profile: &PolicyProfile) -> Result<()> {
        if profile.num_players() != self.num_players() {
            return Err(Error::Dimension(format!(
                "profile has {} players, game has {}",
                profile.num_players(),
                self.num_players()
            )));
        }
        for (i, p) in profile.policies.iter().enumerate() {
            if p.num_states() != self.layouts[i].num_states() || p.num_actions() != self.joint.counts()[i] {
                return Err(Error::Dimension(format!("policy of player {i} does not fit its MDP")));
            }
        }
        Ok(())
    }

    /// Player `i`'s induced MDP: its own kernel, and losses averaged over the
    /// other players' occupancies and policies.
    pub fn induce_mdp(&self, profile: &PolicyProfile, player: usize) -> Result<InducedMdp> {
        self.check_profile(profile)?;
        let m = self.num_players();
        let occ: Vec<Vec<f64>> = (0..m)
            .map(|j| occupancy(&self.own_mdp(j, self.zero_loss(j)), profile.player(j)).q)
            .collect();
        let mut loss = self.zero_loss(player);
        for h in 0..self.horizon() {
            for k in 0..self.joint_positions(h) {
                let pos = self.decode_positions(h, k);
                let states: Vec<StateId> = (0..m).map(|j| self.layouts[j].layer(h)[pos[j]]).collect();
                let reach: f64 = (0..m).filter(|&j| j != player).map(|j| occ[j][states[j]]).product();
                if reach == 0.0 {
                    continue;
                }
                for ja in 0..self.joint.len() {
                    let mut w = reach;
                    for j in (0..m).filter(|&j| j != player) {
                        w *= profile.player(j).row(states[j])[self.joint.action_of(ja, j)];
                    }
                    if w != 0.0 {
                        loss[states[player]][self.joint.action_of(ja, player)] += w * self.losses[player][h][k][ja];
                    }
                }
            }
        }
        Ok(self.own_mdp(player, loss))
    }

    /// Layout of the product state space, layer by layer in joint-position order.
    fn product_layout(&self) -> Result<Layout> {
        let mut next = 0;
        let layers = (0..=self.horizon())
            .map(|h| {
                let size = self.joint_positions(h);
                let l: Vec<StateId> = (next..next + size).collect();
                next += size;
                l
            })
            .collect();
        Layout::new(layers)
    }

    /// Equivalent Markov game on the product state space.
    pub fn to_markov_game(&self) -> Result<MarkovGame> {
        let m = self.num_players();
        let h_n = self.horizon();
        let layout = self.product_layout()?;
        let offsets: Vec<StateId> = (0..=h_n).map(|h| layout.layer(h)[0]).collect();
        let n = layout.num_states();
        let ja_n = self.joint.len();
        let mut transition = vec![Vec::new(); n];
        let mut losses = vec![vec![Vec::new(); n]; m];
        for (h, &base) in offsets.iter().enumerate().take(h_n) {
            let next_count = self.joint_positions(h + 1);
            for k in 0..self.joint_positions(h) {
                let s = base + k;
                let pos = self.decode_positions(h, k);
                let mut rows = Vec::with_capacity(ja_n);
                for ja in 0..ja_n {
                    let mut row = vec![0.0; next_count];
                    for (k2, p) in row.iter_mut().enumerate() {
                        let pos2 = self.decode_positions(h + 1, k2);
                        *p = (0..m)
                            .map(|j| {
                                let own = self.layouts[j].layer(h)[pos[j]];
                                self.kernels[j][own][self.joint.action_of(ja, j)][pos2[j]]
                            })
                            .product();
                    }
                    rows.push(row);
                }
                transition[s] = rows;
                for (i, l) in losses.iter_mut().enumerate() {
                    l[s] = self.losses[i][h][k].clone();
                }
            }
        }
        MarkovGame::new(layout, self.joint.counts().to_vec(), transition, losses)
    }

    /// Lifts per-player policies to the product game of [`Self::to_markov_game`].
    pub fn lift_profile(&self, profile: &PolicyProfile) -> Result<PolicyProfile> {
        self.check_profile(profile)?;
        let m = self.num_players();
        let product = self.product_layout()?;
        let mut policies = Vec::with_capacity(m);
        for i in 0..m {
            let mut rows = Vec::new();
            for h in 0..self.horizon() {
                for k in 0..self.joint_positions(h) {
                    let pos = self.decode_positions(h, k);
                    rows.push(profile.player(i).row(self.layouts[i].layer(h)[pos[i]]).to_vec());
                }
            }
            rows.push(Vec::new());
            policies.push(Policy::from_rows(&product, self.joint.counts()[i], rows)?);
        }
        Ok(PolicyProfile::new(policies))
    }
}

/// Random game with independent transitions: player `i` has `widths[i]`
/// states in every decision layer after the first; losses uniform on `[0, 1]`.
pub fn generate_independent_transition_game(
    horizon: usize,
    widths: &[usize],
    actions: usize,
    rng: &mut impl Rng,
) -> Result<IndependentGame> {
    let m = widths.len();
    let layouts = widths
        .iter()
        .map(|&w| Layout::uniform(horizon, w))
        .collect::<Result<Vec<_>>>()?;
    for l in &layouts {
        check_sizes(m, actions, l.num_decision_states())?;
    }
    let kernels = layouts
        .iter()
        .map(|l| {
            (0..l.num_states())
                .map(|s| {
                    if l.is_terminal(s) {
                        Vec::new()
                    } else {
                        let next = l.successors(s).len();
                        (0..actions).map(|_| floored_simplex(next, rng)).collect()
                    }
                })
                .collect()
        })
        .collect();
    let counts = vec![actions; m];
    let ja_n = JointActionSpace::new(&counts).len();
    let positions: Vec<usize> = (0..horizon)
        .map(|h| layouts.iter().map(|l| l.layer(h).len()).product())
        .collect();
    let losses = (0..m)
        .map(|_| {
            positions
                .iter()
                .map(|&k| (0..k).map(|_| (0..ja_n).map(|_| rng.random::<f64>()).collect()).collect())
                .collect()
        })
        .collect();
    IndependentGame::new(layouts, counts, kernels, losses)
}
