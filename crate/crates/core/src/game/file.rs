//! JSON game files.
//!
//! ```json
//! {
//!   "horizon": 1,
//!   "layers": [[0], [1]],
//!   "action_counts": [2],
//!   "transition": [
//!     {"state": 0, "joint_action": [0], "next_state_probs": {"1": 1.0}},
//!     {"state": 0, "joint_action": [1], "next_state_probs": {"1": 1.0}}
//!   ],
//!   "losses": [[
//!     {"state": 0, "joint_action": [0], "value": 0.2},
//!     {"state": 0, "joint_action": [1], "value": 0.8}
//!   ]]
//! }
//! ```
//!
//! Every (non-terminal state, joint action) pair needs a transition record and
//! a loss record per player, and every state of the next layer must appear in
//! `next_state_probs`. Missing entries are errors rather than implicit zeros.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::layout::{Layout, StateId};
use super::model::MarkovGame;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub horizon: usize,
    pub layers: Vec<Vec<StateId>>,
    pub action_counts: Vec<usize>,
    pub transition: Vec<TransitionRecord>,
    pub losses: Vec<Vec<LossRecord>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionRecord {
    pub state: StateId,
    pub joint_action: Vec<usize>,
    pub next_state_probs: BTreeMap<StateId, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossRecord {
    pub state: StateId,
    pub joint_action: Vec<usize>,
    pub value: f64,
}

impl GameFile {
    pub fn from_game(game: &MarkovGame) -> Self {
        let layout = game.layout();
        let joint = game.joint_actions();
        let mut transition = Vec::new();
        let mut losses = vec![Vec::new(); game.num_players()];
        for s in layout.decision_states() {
            let next = layout.successors(s);
            for j in 0..joint.len() {
                let ja = joint.decode(j);
                transition.push(TransitionRecord {
                    state: s,
                    joint_action: ja.clone(),
                    next_state_probs: next
                        .iter()
                        .zip(game.transition_row(s, j))
                        .map(|(&s2, &p)| (s2, p))
                        .collect(),
                });
                for (i, out) in losses.iter_mut().enumerate() {
                    out.push(LossRecord {
                        state: s,
                        joint_action: ja.clone(),
                        value: game.loss(i, s, j),
                    });
                }
            }
        }
        GameFile {
            horizon: layout.horizon(),
            layers: layout.layers().to_vec(),
            action_counts: game.action_counts().to_vec(),
            transition,
            losses,
        }
    }

    pub fn into_game(self) -> Result<MarkovGame> {
        if self.layers.len() != self.horizon + 1 {
            return Err(Error::Format(format!(
                "horizon {} needs {} layers, found {}",
                self.horizon,
                self.horizon + 1,
                self.layers.len()
            )));
        }
        let layout = Layout::new(self.layers)?;
        let m = self.action_counts.len();
        if m == 0 || self.action_counts.contains(&0) {
            return Err(Error::Format("action_counts must be non-empty and positive".into()));
        }
        if self.losses.len() != m {
            return Err(Error::Format(format!(
                "losses listed for {} players, action_counts has {m}",
                self.losses.len()
            )));
        }
        let joint = super::model::JointActionSpace::new(&self.action_counts);
        let n = layout.num_states();

        let mut transition: Vec<Vec<Option<Vec<f64>>>> = (0..n)
            .map(|s| {
                if layout.is_terminal(s) {
                    Vec::new()
                } else {
                    vec![None; joint.len()]
                }
            })
            .collect();
        for rec in self.transition {
            let j = encode_checked(&layout, &self.action_counts, &joint, rec.state, &rec.joint_action)?;
            let next = layout.successors(rec.state);
            let mut row = vec![f64::NAN; next.len()];
            for (&s2, &p) in &rec.next_state_probs {
                if s2 >= n || layout.layer_of(s2) != layout.layer_of(rec.state) + 1 {
                    return Err(Error::Format(format!(
                        "transition from state {} to state {s2} does not go to the next layer",
                        rec.state
                    )));
                }
                row[layout.position(s2)] = p;
            }
            if let Some(k) = row.iter().position(|p| p.is_nan()) {
                return Err(Error::Format(format!(
                    "transition record for state {} joint action {:?} omits next state {}",
                    rec.state, rec.joint_action, next[k]
                )));
            }
            let slot = &mut transition[rec.state][j];
            if slot.is_some() {
                return Err(Error::Format(format!(
                    "duplicate transition record for state {} joint action {:?}",
                    rec.state, rec.joint_action
                )));
            }
            *slot = Some(row);
        }

        let mut losses = Vec::with_capacity(m);
        for (i, records) in self.losses.into_iter().enumerate() {
            let mut table: Vec<Vec<Option<f64>>> = (0..n)
                .map(|s| {
                    if layout.is_terminal(s) {
                        Vec::new()
                    } else {
                        vec![None; joint.len()]
                    }
                })
                .collect();
            for rec in records {
                let j = encode_checked(&layout, &self.action_counts, &joint, rec.state, &rec.joint_action)?;
                if table[rec.state][j].replace(rec.value).is_some() {
                    return Err(Error::Format(format!(
                        "duplicate loss record for player {i} state {} joint action {:?}",
                        rec.state, rec.joint_action
                    )));
                }
            }
            losses.push(fill(table, |s, j| {
                format!(
                    "missing loss for player {i} at state {s} joint action {:?}",
                    joint.decode(j)
                )
            })?);
        }
        let transition = fill(transition, |s, j| {
            format!(
                "missing transition record for state {s} joint action {:?}",
                joint.decode(j)
            )
        })?;
        MarkovGame::new(layout, self.action_counts, transition, losses)
    }
}

fn encode_checked(
    layout: &Layout,
    counts: &[usize],
    joint: &super::model::JointActionSpace,
    state: StateId,
    actions: &[usize],
) -> Result<usize> {
    if state >= layout.num_states() || layout.is_terminal(state) {
        return Err(Error::Format(format!(
            "record refers to state {state}, which is not a decision state"
        )));
    }
    if actions.len() != counts.len() || actions.iter().zip(counts).any(|(a, c)| a >= c) {
        return Err(Error::Format(format!(
            "joint action {actions:?} does not fit action counts {counts:?}"
        )));
    }
    Ok(joint.encode(actions))
}

fn fill<T>(
    table: Vec<Vec<Option<T>>>,
    missing: impl Fn(usize, usize) -> String,
) -> Result<Vec<Vec<T>>> {
    table
        .into_iter()
        .enumerate()
        .map(|(s, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, v)| v.ok_or_else(|| Error::Format(missing(s, j))))
                .collect()
        })
        .collect()
}

impl MarkovGame {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GameFile = serde_json::from_str(text)?;
        file.into_game()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GameFile::from_game(self)).expect("game serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
      "horizon": 1,
      "layers": [[0], [1]],
      "action_counts": [2],
      "transition": [
        {"state": 0, "joint_action": [0], "next_state_probs": {"1": 1.0}},
        {"state": 0, "joint_action": [1], "next_state_probs": {"1": 1.0}}
      ],
      "losses": [[
        {"state": 0, "joint_action": [0], "value": 0.2},
        {"state": 0, "joint_action": [1], "value": 0.8}
      ]]
    }"#;

    #[test]
    fn parses_and_roundtrips() {
        let g = MarkovGame::from_json(TINY).unwrap();
        assert!(g.validate().is_valid());
        assert_eq!(g.loss(0, 0, 1), 0.8);
        let again = MarkovGame::from_json(&g.to_json()).unwrap();
        assert_eq!(g, again);
    }

    #[test]
    fn missing_transition_is_error() {
        let text = TINY.replace(
            r#"{"state": 0, "joint_action": [1], "next_state_probs": {"1": 1.0}}"#,
            r#"{"state": 0, "joint_action": [0], "next_state_probs": {"1": 1.0}}"#,
        );
        let err = MarkovGame::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn omitted_next_state_is_error() {
        let text = r#"{
          "horizon": 1, "layers": [[0], [1, 2]], "action_counts": [1],
          "transition": [{"state": 0, "joint_action": [0], "next_state_probs": {"1": 1.0}}],
          "losses": [[{"state": 0, "joint_action": [0], "value": 0.0}]]
        }"#;
        let err = MarkovGame::from_json(text).unwrap_err().to_string();
        assert!(err.contains("omits next state 2"), "{err}");
    }

    #[test]
    fn cross_layer_transition_is_error() {
        let text = r#"{
          "horizon": 2, "layers": [[0], [1], [2]], "action_counts": [1],
          "transition": [
            {"state": 0, "joint_action": [0], "next_state_probs": {"2": 1.0}},
            {"state": 1, "joint_action": [0], "next_state_probs": {"2": 1.0}}
          ],
          "losses": [[
            {"state": 0, "joint_action": [0], "value": 0.0},
            {"state": 1, "joint_action": [0], "value": 0.0}
          ]]
        }"#;
        let err = MarkovGame::from_json(text).unwrap_err().to_string();
        assert!(err.contains("next layer"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = TINY.replacen("\"horizon\": 1,", "\"horizon\": 1, \"extra\": 3,", 1);
        assert!(MarkovGame::from_json(&text).is_err());
    }
}
