use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global state identifier. States are numbered `0..num_states`.
pub type StateId = usize;

/// Layered state space of an episodic game.
///
/// Layer `0` holds the initial state and layer `horizon` holds the terminal
/// state. Decision layers are `0..horizon`; transitions always go from layer
/// `h` to layer `h + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<StateId>>", into = "Vec<Vec<StateId>>")]
pub struct Layout {
    layers: Vec<Vec<StateId>>,
    layer_of: Vec<usize>,
    position: Vec<usize>,
}

impl Layout {
    /// Builds a layout from `horizon + 1` lists of state ids.
    ///
    /// The lists must partition `0..n` and be non-empty. Singleton-ness of the
    /// first and last layer is a validation concern and is not enforced here.
    pub fn new(layers: Vec<Vec<StateId>>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::Layout(format!(
                "need at least two layers (one decision layer plus terminal), got {}",
                layers.len()
            )));
        }
        let n: usize = layers.iter().map(Vec::len).sum();
        let mut layer_of = vec![usize::MAX; n];
        let mut position = vec![usize::MAX; n];
        for (h, layer) in layers.iter().enumerate() {
            if layer.is_empty() {
                return Err(Error::Layout(format!("layer {} is empty", h + 1)));
            }
            for (k, &s) in layer.iter().enumerate() {
                if s >= n {
                    return Err(Error::Layout(format!(
                        "state id {s} out of range: ids must be 0..{n}"
                    )));
                }
                if layer_of[s] != usize::MAX {
                    return Err(Error::Layout(format!("state {s} appears more than once")));
                }
                layer_of[s] = h;
                position[s] = k;
            }
        }
        Ok(Layout {
            layers,
            layer_of,
            position,
        })
    }

    /// Layout with one initial state, `width` states in each of the
    /// intermediate decision layers, and a terminal state.
    pub fn uniform(horizon: usize, width: usize) -> Result<Self> {
        if horizon == 0 || width == 0 {
            return Err(Error::Layout("horizon and width must be positive".into()));
        }
        let mut next = 0;
        let mut layers = Vec::with_capacity(horizon + 1);
        for h in 0..=horizon {
            let size = if h == 0 || h == horizon { 1 } else { width };
            layers.push((next..next + size).collect());
            next += size;
        }
        Layout::new(layers)
    }

    pub fn horizon(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.layer_of.len()
    }

    /// Number of non-terminal states.
    pub fn num_decision_states(&self) -> usize {
        self.layers[..self.horizon()].iter().map(Vec::len).sum()
    }

    pub fn layers(&self) -> &[Vec<StateId>] {
        &self.layers
    }

    pub fn layer(&self, h: usize) -> &[StateId] {
        &self.layers[h]
    }

    pub fn layer_of(&self, s: StateId) -> usize {
        self.layer_of[s]
    }

    /// Index of `s` inside its layer.
    pub fn position(&self, s: StateId) -> usize {
        self.position[s]
    }

    pub fn initial(&self) -> StateId {
        self.layers[0][0]
    }

    pub fn terminal(&self) -> StateId {
        self.layers[self.horizon()][0]
    }

    pub fn is_terminal(&self, s: StateId) -> bool {
        self.layer_of[s] == self.horizon()
    }

    /// States of the layer after the one containing `s`.
    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.layers[self.layer_of[s] + 1]
    }

    /// Non-terminal states in layer order.
    pub fn decision_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.layers[..self.horizon()].iter().flatten().copied()
    }
}

impl TryFrom<Vec<Vec<StateId>>> for Layout {
    type Error = Error;

    fn try_from(layers: Vec<Vec<StateId>>) -> Result<Self> {
        Layout::new(layers)
    }
}

impl From<Layout> for Vec<Vec<StateId>> {
    fn from(layout: Layout) -> Self {
        layout.layers
    }
}
