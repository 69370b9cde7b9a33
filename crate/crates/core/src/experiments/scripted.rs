use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::game::{l1_distance, InducedMdp, Layout};

/// Actions of the scripted environment.
pub const ACTION_A: usize = 0;
pub const ACTION_B: usize = 1;

/// States of the scripted environment.
pub const S0: usize = 0;
pub const S1: usize = 1;
pub const S2: usize = 2;
pub const L0: usize = 3;
pub const L1: usize = 4;

/// Single-agent layered MDP whose kernel switches once, after episode `switch`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptedMdp {
    pub episodes: usize,
    pub switch: usize,
    pub before: InducedMdp,
    pub after: InducedMdp,
}

/// Total kernel change `sum_t ||P_t - P_{t-1}||` under three conventions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelVariation {
    /// Sum over all (state, action) pairs of the L1 distance.
    pub flat_l1: f64,
    /// Largest L1 distance over (state, action) pairs.
    pub inf_1: f64,
    /// Largest total-variation distance, half of `inf_1`.
    pub total_variation: f64,
}

impl ScriptedMdp {
    /// MDP of episode `t`, counted from 1.
    pub fn mdp_at(&self, t: usize) -> &InducedMdp {
        if t <= self.switch {
            &self.before
        } else {
            &self.after
        }
    }

    pub fn layout(&self) -> &Layout {
        self.before.layout()
    }

    pub fn kernel_variation(&self) -> KernelVariation {
        if self.switch == 0 || self.switch >= self.episodes {
            return KernelVariation {
                flat_l1: 0.0,
                inf_1: 0.0,
                total_variation: 0.0,
            };
        }
        let mut flat = 0.0;
        for (a, b) in self.before.kernels().iter().zip(self.after.kernels()) {
            for (ra, rb) in a.iter().zip(b) {
                flat += l1_distance(ra, rb);
            }
        }
        let inf_1 = self.before.kernel_distance_inf1(&self.after);
        KernelVariation {
            flat_l1: flat,
            inf_1,
            total_variation: inf_1 / 2.0,
        }
    }
}

fn kernel(s0_to_s2: bool, s2_a_to_l1: bool) -> Vec<Vec<Vec<f64>>> {
    let first = if s0_to_s2 { vec![0.0, 1.0] } else { vec![1.0, 0.0] };
    let (to_l1, to_l0) = (vec![0.0, 1.0], vec![1.0, 0.0]);
    let (s2a, s2b) = if s2_a_to_l1 {
        (to_l1.clone(), to_l0.clone())
    } else {
        (to_l0.clone(), to_l1.clone())
    };
    vec![
        vec![first.clone(), first],
        vec![to_l0.clone(), to_l0],
        vec![s2a, s2b],
        vec![vec![1.0], vec![1.0]],
        vec![vec![1.0], vec![1.0]],
        vec![],
    ]
}

/// The FTRL lower-bound environment: `s0 -> {s1, s2} -> {L0, L1} -> end`,
/// with loss 1 at `L1` only. Up to episode `T/3` the start leads to `s1` and
/// action `a` at `s2` leads to `L1`; afterwards the start leads to `s2` and
/// action `b` leads to `L1`.
///
/// `episodes` is rounded down to a multiple of 3 (at least 3); the second
/// value reports any rounding.
pub fn build_ftrl_counterexample(episodes: usize) -> (ScriptedMdp, Option<String>) {
    let t = (episodes / 3 * 3).max(3);
    let note = (t != episodes).then(|| format!("episodes rounded from {episodes} to {t}"));
    let layout = Arc::new(
        Layout::new(vec![vec![S0], vec![S1, S2], vec![L0, L1], vec![5]]).expect("fixed layout"),
    );
    let loss = vec![
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![],
    ];
    let before = InducedMdp::new(layout.clone(), 2, loss.clone(), kernel(false, true)).expect("fixed shape");
    let after = InducedMdp::new(layout, 2, loss, kernel(true, false)).expect("fixed shape");
    (
        ScriptedMdp {
            episodes: t,
            switch: t / 3,
            before,
            after,
        },
        note,
    )
}
