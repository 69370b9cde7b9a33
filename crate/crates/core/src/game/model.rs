use std::fmt;
use std::sync::Arc;

use super::layout::{Layout, StateId};
use super::mdp::InducedMdp;
use super::policy::PolicyProfile;
use crate::error::{Error, Result};

/// Row-sum tolerance used by [`MarkovGame::validate`].
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Mixed-radix encoding of joint actions; player 0 is the most significant digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointActionSpace {
    counts: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl JointActionSpace {
    pub fn new(counts: &[usize]) -> Self {
        let mut strides = vec![1; counts.len()];
        for i in (0..counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        JointActionSpace {
            counts: counts.to_vec(),
            strides,
            size: counts.iter().product(),
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn num_players(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn encode(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn decode(&self, joint: usize) -> Vec<usize> {
        (0..self.counts.len())
            .map(|i| self.action_of(joint, i))
            .collect()
    }

    /// Player `i`'s component of the encoded joint action.
    #[inline]
    pub fn action_of(&self, joint: usize, i: usize) -> usize {
        (joint / self.strides[i]) % self.counts[i]
    }
}

/// An m-player finite-horizon general-sum Markov game with layered states.
///
/// `transition[s][j]` is the distribution over the layer after `s` (in the
/// order of [`Layout::successors`]) under joint action `j`. `losses[i][s][j]`
/// is player `i`'s loss. Terminal rows are empty.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovGame {
    layout: Arc<Layout>,
    joint: JointActionSpace,
    transition: Vec<Vec<Vec<f64>>>,
    losses: Vec<Vec<Vec<f64>>>,
}

impl MarkovGame {
    /// Assembles a game, checking shapes only. Numeric invariants are reported
    /// by [`MarkovGame::validate`].
    pub fn new(
        layout: Layout,
        action_counts: Vec<usize>,
        transition: Vec<Vec<Vec<f64>>>,
        losses: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if action_counts.is_empty() || action_counts.contains(&0) {
            return Err(Error::Dimension(
                "need at least one player and a positive action count for each".into(),
            ));
        }
        let joint = JointActionSpace::new(&action_counts);
        let n = layout.num_states();
        if transition.len() != n {
            return Err(Error::Dimension(format!(
                "transition has {} state rows, layout has {n} states",
                transition.len()
            )));
        }
        if losses.len() != action_counts.len() {
            return Err(Error::Dimension(format!(
                "losses given for {} players, game has {}",
                losses.len(),
                action_counts.len()
            )));
        }
        for s in 0..n {
            let (want_joint, want_next) = if layout.is_terminal(s) {
                (0, 0)
            } else {
                (joint.len(), layout.successors(s).len())
            };
            if transition[s].len() != want_joint {
                return Err(Error::Dimension(format!(
                    "state {s}: {} transition rows, expected {want_joint}",
                    transition[s].len()
                )));
            }
            if let Some(row) = transition[s].iter().find(|r| r.len() != want_next) {
                return Err(Error::Dimension(format!(
                    "state {s}: transition row of length {}, next layer has {want_next} states",
                    row.len()
                )));
            }
            for (i, l) in losses.iter().enumerate() {
                if l.len() != n || l[s].len() != want_joint {
                    return Err(Error::Dimension(format!(
                        "player {i}: loss table shape does not match state {s}"
                    )));
                }
            }
        }
        Ok(MarkovGame {
            layout: Arc::new(layout),
            joint,
            transition,
            losses,
        })
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn shared_layout(&self) -> Arc<Layout> {
        Arc::clone(&self.layout)
    }

    pub fn horizon(&self) -> usize {
        self.layout.horizon()
    }

    pub fn num_players(&self) -> usize {
        self.joint.num_players()
    }

    pub fn action_counts(&self) -> &[usize] {
        self.joint.counts()
    }

    /// Largest action set size.
    pub fn max_actions(&self) -> usize {
        self.joint.counts().iter().copied().max().unwrap_or(0)
    }

    pub fn joint_actions(&self) -> &JointActionSpace {
        &self.joint
    }

    pub fn transition_row(&self, s: StateId, joint: usize) -> &[f64] {
        &self.transition[s][joint]
    }

    pub fn loss(&self, player: usize, s: StateId, joint: usize) -> f64 {
        self.losses[player][s][joint]
    }

    pub fn transitions(&self) -> &[Vec<Vec<f64>>] {
        &self.transition
    }

    pub fn losses(&self) -> &[Vec<Vec<f64>>] {
        &self.losses
    }

    /// Lists every violated structural invariant. Empty iff the game is well formed.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let h = self.horizon();
        if self.layout.layer(0).len() != 1 {
            issues.push(Issue::InitialLayerNotSingleton(self.layout.layer(0).len()));
        }
        if self.layout.layer(h).len() != 1 {
            issues.push(Issue::TerminalLayerNotSingleton(self.layout.layer(h).len()));
        }
        for s in self.layout.decision_states() {
            for j in 0..self.joint.len() {
                let row = &self.transition[s][j];
                let sum: f64 = row.iter().sum();
                let bad_entry = row.iter().any(|p| !p.is_finite() || *p < 0.0);
                if bad_entry || (sum - 1.0).abs() > ROW_SUM_TOL {
                    issues.push(Issue::TransitionRow {
                        state: s,
                        joint_action: self.joint.decode(j),
                        sum,
                        negative_or_nonfinite: bad_entry,
                    });
                }
                for (i, l) in self.losses.iter().enumerate() {
                    let v = l[s][j];
                    if !(0.0..=1.0).contains(&v) {
                        issues.push(Issue::LossOutOfRange {
                            player: i,
                            state: s,
                            joint_action: self.joint.decode(j),
                            value: v,
                        });
                    }
                }
            }
        }
        ValidationReport { issues }
    }

    /// The single-agent MDP player `i` faces when the opponents' policies in
    /// `profile` are marginalized out (exact enumeration of joint actions).
    pub fn induce_mdp(&self, profile: &PolicyProfile, player: usize) -> Result<InducedMdp> {
        self.check_profile(profile)?;
        if player >= self.num_players() {
            return Err(Error::Dimension(format!(
                "player {player} out of range for a {}-player game",
                self.num_players()
            )));
        }
        let actions = self.joint.counts()[player];
        let n = self.layout.num_states();
        let mut loss = vec![Vec::new(); n];
        let mut kernel = vec![Vec::new(); n];
        for s in self.layout.decision_states() {
            let width = self.layout.successors(s).len();
            let mut ls = vec![0.0; actions];
            let mut ks = vec![vec![0.0; width]; actions];
            for j in 0..self.joint.len() {
                let w = self.opponent_weight(profile, s, j, player);
                if w == 0.0 {
                    continue;
                }
                let a = self.joint.action_of(j, player);
                ls[a] += w * self.losses[player][s][j];
                for (k, p) in ks[a].iter_mut().zip(&self.transition[s][j]) {
                    *k += w * p;
                }
            }
            loss[s] = ls;
            kernel[s] = ks;
        }
        Ok(InducedMdp::from_parts_unchecked(
            self.shared_layout(),
            actions,
            loss,
            kernel,
        ))
    }

    /// Probability the opponents of `player` play their parts of joint action `j` at `s`.
    fn opponent_weight(&self, profile: &PolicyProfile, s: StateId, j: usize, player: usize) -> f64 {
        let mut w = 1.0;
        for k in 0..self.num_players() {
            if k != player {
                w *= profile.policies[k].row(s)[self.joint.action_of(j, k)];
            }
        }
        w
    }

    /// Player `i`'s value at the initial state under the full profile,
    /// computed directly on the game by backward induction over joint actions.
    pub fn joint_value(&self, profile: &PolicyProfile, player: usize) -> Result<f64> {
        Ok(self.joint_values(profile, player)?[self.layout.initial()])
    }

    /// Per-state values of player `i` under the full profile.
    pub fn joint_values(&self, profile: &PolicyProfile, player: usize) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        let n = self.layout.num_states();
        let mut v = vec![0.0; n];
        for h in (0..self.horizon()).rev() {
            for &s in self.layout.layer(h) {
                let next = self.layout.successors(s);
                let mut acc = 0.0;
                for j in 0..self.joint.len() {
                    let mut w = 1.0;
                    for k in 0..self.num_players() {
                        w *= profile.policies[k].row(s)[self.joint.action_of(j, k)];
                    }
                    if w == 0.0 {
                        continue;
                    }
                    let cont: f64 = self.transition[s][j]
                        .iter()
                        .zip(next)
                        .map(|(p, &s2)| p * v[s2])
                        .sum();
                    acc += w * (self.losses[player][s][j] + cont);
                }
                v[s] = acc;
            }
        }
        Ok(v)
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
            if p.num_states() != self.layout.num_states() {
                return Err(Error::Dimension(format!(
                    "player {i}: policy covers {} states, game has {}",
                    p.num_states(),
                    self.layout.num_states()
                )));
            }
            let a = self.joint.counts()[i];
            if let Some(s) = self
                .layout
                .decision_states()
                .find(|&s| p.row(s).len() != a)
            {
                return Err(Error::Dimension(format!(
                    "player {i}: policy row at state {s} has {} entries, expected {a}",
                    p.row(s).len()
                )));
            }
        }
        Ok(())
    }
}

/// One violated invariant found by [`MarkovGame::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Issue {
    InitialLayerNotSingleton(usize),
    TerminalLayerNotSingleton(usize),
    TransitionRow {
        state: StateId,
        joint_action: Vec<usize>,
        sum: f64,
        negative_or_nonfinite: bool,
    },
    LossOutOfRange {
        player: usize,
        state: StateId,
        joint_action: Vec<usize>,
        value: f64,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::InitialLayerNotSingleton(n) => {
                write!(f, "first layer must hold exactly one state, found {n}")
            }
            Issue::TerminalLayerNotSingleton(n) => {
                write!(f, "terminal layer must hold exactly one state, found {n}")
            }
            Issue::TransitionRow {
                state,
                joint_action,
                sum,
                negative_or_nonfinite,
            } => {
                write!(
                    f,
                    "transition row at state {state}, joint action {joint_action:?} sums to {sum}"
                )?;
                if *negative_or_nonfinite {
                    write!(f, " and has negative or non-finite entries")?;
                }
                Ok(())
            }
            Issue::LossOutOfRange {
                player,
                state,
                joint_action,
                value,
            } => write!(
                f,
                "loss of player {player} at state {state}, joint action {joint_action:?} is {value}, outside [0, 1]"
            ),
        }
    }
}

/// Result of [`MarkovGame::validate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "ok");
        }
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

pub fn validate_game(game: &MarkovGame) -> ValidationReport {
    game.validate()
}

pub fn induce_mdp(game: &MarkovGame, profile: &PolicyProfile, player: usize) -> Result<InducedMdp> {
    game.induce_mdp(profile, player)
}

pub fn joint_value(game: &MarkovGame, profile: &PolicyProfile, player: usize) -> Result<f64> {
    game.joint_value(profile, player)
}
