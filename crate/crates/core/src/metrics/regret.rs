use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{evaluate, InducedMdp, Layout, MarkovGame, Policy, PolicyProfile, StateId, SwapFunction};

/// Default limit on the number of enumerated swap functions or policies.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Candidates per push above which the work is spread over threads.
const PAR_THRESHOLD: usize = 512;

/// A finite list of per-(state, action) maps stored as flat tables over the
/// sorted decision states.
#[derive(Clone, Debug)]
struct Candidates {
    cells: usize,
    tables: Vec<u8>,
}

impl Candidates {
    fn len(&self) -> usize {
        self.tables.len() / self.cells.max(1)
    }

    fn table(&self, k: usize) -> &[u8] {
        &self.tables[k * self.cells..(k + 1) * self.cells]
    }

    /// All maps in lexicographic order: `radix^cells` of them, `width` cells per state.
    fn exhaustive(states: usize, width: usize, radix: usize) -> Self {
        let cells = states * width;
        let count = radix.pow(cells as u32);
        let mut tables = vec![0u8; count * cells];
        for k in 0..count {
            let mut rem = k;
            for c in (0..cells).rev() {
                tables[k * cells + c] = (rem % radix) as u8;
                rem /= radix;
            }
        }
        Candidates { cells, tables }
    }

    fn from_list(cells: usize, mut list: Vec<Vec<u8>>) -> Self {
        list.sort();
        list.dedup();
        Candidates {
            cells,
            tables: list.concat(),
        }
    }
}

fn count_or_cap(radix: usize, cells: usize, cap: u64) -> std::result::Result<usize, f64> {
    let exact = (radix as f64).powi(cells as i32);
    if exact > cap as f64 {
        Err(exact)
    } else {
        Ok(exact as usize)
    }
}

/// Identity, every constant map, and each of these with one cell changed.
fn restricted_swaps(states: usize, actions: usize) -> Vec<Vec<u8>> {
    let cells = states * actions;
    let identity: Vec<u8> = (0..cells).map(|c| (c % actions) as u8).collect();
    let mut bases = vec![identity];
    for b in 0..actions {
        bases.push(vec![b as u8; cells]);
    }
    let mut out = Vec::new();
    for base in &bases {
        out.push(base.clone());
        for c in 0..cells {
            for b in 0..actions {
                if base[c] as usize != b {
                    let mut t = base.clone();
                    t[c] = b as u8;
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Value at the initial state of the swapped policy, and the same quantity
/// through the occupancy of the swapped policy and the Q-function of the
/// original one: `sum_s q^{phi pi}(s) <Q^pi(s,.), pi(.|s) - phi pi(.|s)>`.
struct SwapEval<'a> {
    mdp: &'a InducedMdp,
    policy: &'a Policy,
    q_pi: &'a [Vec<f64>],
    states: &'a [StateId],
    /// Per state, the rows of `states` in backward layer order.
    backward: &'a [usize],
    actions: usize,
}

struct Scratch {
    v: Vec<f64>,
    occ: Vec<f64>,
    rows: Vec<f64>,
}

impl SwapEval<'_> {
    fn scratch(&self) -> Scratch {
        let n = self.mdp.layout().num_states();
        Scratch {
            v: vec![0.0; n],
            occ: vec![0.0; n],
            rows: vec![0.0; self.states.len() * self.actions],
        }
    }

    /// `width` is `actions` for swap tables and 1 for deterministic policies.
    fn run(&self, table: &[u8], width: usize, sc: &mut Scratch) -> (f64, f64) {
        let a_n = self.actions;
        let layout = self.mdp.layout();
        for (k, &s) in self.states.iter().enumerate() {
            let out = &mut sc.rows[k * a_n..(k + 1) * a_n];
            out.iter_mut().for_each(|v| *v = 0.0);
            if width == 1 {
                out[table[k] as usize] = 1.0;
            } else {
                for (a, &p) in self.policy.row(s).iter().enumerate() {
                    out[table[k * a_n + a] as usize] += p;
                }
            }
        }
        // backward values of the swapped policy
        for &k in self.backward {
            let s = self.states[k];
            let next = layout.successors(s);
            let row = &sc.rows[k * a_n..(k + 1) * a_n];
            let mut v = 0.0;
            for (b, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let cont: f64 = self
                    .mdp
                    .kernel_row(s, b)
                    .iter()
                    .zip(next)
                    .map(|(w, &s2)| w * sc.v[s2])
                    .sum();
                v += p * (self.mdp.loss(s, b) + cont);
            }
            sc.v[s] = v;
        }
        let value = sc.v[layout.initial()];

        // forward occupancy of the swapped policy
        sc.occ.iter_mut().for_each(|v| *v = 0.0);
        sc.occ[layout.initial()] = 1.0;
        let mut decomposition = 0.0;
        for &k in self.backward.iter().rev() {
            let s = self.states[k];
            let qs = sc.occ[s];
            if qs == 0.0 {
                continue;
            }
            let row = &sc.rows[k * a_n..(k + 1) * a_n];
            let pi = self.policy.row(s);
            let mut gap = 0.0;
            for b in 0..a_n {
                gap += self.q_pi[s][b] * (pi[b] - row[b]);
            }
            decomposition += qs * gap;
            let next = layout.successors(s);
            for (b, &p) in row.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (w, &s2) in self.mdp.kernel_row(s, b).iter().zip(next) {
                    sc.occ[s2] += qs * p * w;
                }
            }
        }
        (value, decomposition)
    }
}

/// Maximizing swap function and its regret.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwapRegret {
    pub value: f64,
    pub argmax: SwapFunction,
    /// False when only the restricted candidate set was searched (a lower bound).
    pub exact: bool,
    /// Regret of `argmax` recomputed from occupancies and Q-functions.
    pub decomposition: f64,
}

impl SwapRegret {
    pub fn decomposition_gap(&self) -> f64 {
        (self.value - self.decomposition).abs()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalRegret {
    pub value: f64,
    pub argmax: Policy,
}

/// Streaming exact regret of one player against every swap function and
/// every deterministic policy, over a sequence of induced MDPs.
#[derive(Clone, Debug)]
pub struct RegretTracker {
    layout: Arc<Layout>,
    actions: usize,
    states: Vec<StateId>,
    backward: Vec<usize>,
    swaps: Candidates,
    swaps_exact: bool,
    swap_values: Vec<f64>,
    swap_decomp: Vec<f64>,
    policies: Option<Candidates>,
    policy_values: Vec<f64>,
    realized: f64,
    /// `state_gain[k][a * A + b] = sum_t pi_t(a|s)(Q_t(s,a) - Q_t(s,b))`.
    state_gain: Vec<Vec<f64>>,
    state_path_sq: Vec<f64>,
    rounds: usize,
}

impl RegretTracker {
    /// Exhaustive tracker; errors when the swap space exceeds `cap`.
    pub fn new(layout: Arc<Layout>, actions: usize, cap: u64) -> Result<Self> {
        let s = layout.num_decision_states();
        count_or_cap(actions, s * actions, cap)
            .map_err(|candidates| Error::EnumerationCap { candidates, cap })?;
        Ok(Self::build(layout, actions, cap, true))
    }

    /// Exhaustive when the swap space fits under `cap`, otherwise the
    /// restricted lower-bound search.
    pub fn auto(layout: Arc<Layout>, actions: usize, cap: u64) -> Self {
        let s = layout.num_decision_states();
        let exact = count_or_cap(actions, s * actions, cap).is_ok();
        Self::build(layout, actions, cap, exact)
    }

    pub fn restricted(layout: Arc<Layout>, actions: usize, cap: u64) -> Self {
        Self::build(layout, actions, cap, false)
    }

    fn build(layout: Arc<Layout>, actions: usize, cap: u64, exact: bool) -> Self {
        let mut states: Vec<StateId> = layout.decision_states().collect();
        states.sort_unstable();
        let mut backward: Vec<usize> = (0..states.len()).collect();
        backward.sort_by_key(|&k| std::cmp::Reverse(layout.layer_of(states[k])));
        let s = states.len();
        let swaps = if exact {
            Candidates::exhaustive(s, actions, actions)
        } else {
            Candidates::from_list(s * actions, restricted_swaps(s, actions))
        };
        let policies = count_or_cap(actions, s, cap)
            .ok()
            .map(|_| Candidates::exhaustive(s, 1, actions));
        let n_swaps = swaps.len();
        let n_pol = policies.as_ref().map_or(0, Candidates::len);
        RegretTracker {
            layout,
            actions,
            states,
            backward,
            swaps,
            swaps_exact: exact,
            swap_values: vec![0.0; n_swaps],
            swap_decomp: vec![0.0; n_swaps],
            policies,
            policy_values: vec![0.0; n_pol],
            realized: 0.0,
            state_gain: vec![vec![0.0; actions * actions]; s],
            state_path_sq: vec![0.0; s],
            rounds: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.swaps_exact
    }

    pub fn num_swap_candidates(&self) -> usize {
        self.swaps.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// `sum_t V_t^{pi_t}(s_1)`.
    pub fn realized_total(&self) -> f64 {
        self.realized
    }

    /// Adds round `t`: the player's induced MDP and the policy it played.
    pub fn push(&mut self, mdp: &InducedMdp, policy: &Policy) {
        let tables = evaluate(mdp, policy);
        self.realized += tables.v[self.layout.initial()];
        let a_n = self.actions;
        for (k, &s) in self.states.iter().enumerate() {
            let pi = policy.row(s);
            let q = &tables.q[s];
            for a in 0..a_n {
                for b in 0..a_n {
                    self.state_gain[k][a * a_n + b] += pi[a] * (q[a] - q[b]);
                }
            }
        }
        let eval = SwapEval {
            mdp,
            policy,
            q_pi: &tables.q,
            states: &self.states,
            backward: &self.backward,
            actions: a_n,
        };
        accumulate(&eval, &self.swaps, a_n, &mut self.swap_values, Some(&mut self.swap_decomp));
        if let Some(p) = &self.policies {
            accumulate(&eval, p, 1, &mut self.policy_values, None);
        }
        self.rounds += 1;
    }

    /// Adds `||prev(.|s) - next(.|s)||_1^2` to each state's path.
    pub fn record_step(&mut self, prev: &Policy, next: &Policy) {
        for (k, &s) in self.states.iter().enumerate() {
            let d = crate::game::l1_distance(prev.row(s), next.row(s));
            self.state_path_sq[k] += d * d;
        }
    }

    pub fn swap_regret(&self) -> SwapRegret {
        let k = argmax_first(self.swap_values.iter().map(|v| self.realized - v));
        SwapRegret {
            value: self.realized - self.swap_values[k],
            argmax: self.swap_function(self.swaps.table(k)),
            exact: self.swaps_exact,
            decomposition: self.swap_decomp[k],
        }
    }

    /// Largest `|regret(phi) - decomposition(phi)|` over all candidates.
    pub fn max_decomposition_gap(&self) -> f64 {
        self.swap_values
            .iter()
            .zip(&self.swap_decomp)
            .map(|(v, d)| ((self.realized - v) - d).abs())
            .fold(0.0, f64::max)
    }

    /// `None` when the deterministic policy space exceeds the cap.
    pub fn external_regret(&self) -> Option<ExternalRegret> {
        let p = self.policies.as_ref()?;
        let k = argmax_first(self.policy_values.iter().map(|v| self.realized - v));
        let mut choice = vec![0; self.layout.num_states()];
        for (c, &s) in self.states.iter().enumerate() {
            choice[s] = p.table(k)[c] as usize;
        }
        Some(ExternalRegret {
            value: self.realized - self.policy_values[k],
            argmax: Policy::deterministic(&self.layout, self.actions, &choice),
        })
    }

    /// Swap regret of the per-state learner at `s` against Q-functions:
    /// `sum_a max_b sum_t pi_t(a|s)(Q_t(s,a) - Q_t(s,b))`.
    pub fn state_swap_regret(&self, s: StateId) -> f64 {
        let k = self.state_index(s);
        let a_n = self.actions;
        (0..a_n)
            .map(|a| {
                self.state_gain[k][a * a_n..(a + 1) * a_n]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum()
    }

    /// `sum_t ||pi_{t+1}(.|s) - pi_t(.|s)||_1^2` from [`Self::record_step`].
    pub fn state_path_sq(&self, s: StateId) -> f64 {
        self.state_path_sq[self.state_index(s)]
    }

    pub fn decision_states(&self) -> &[StateId] {
        &self.states
    }

    fn state_index(&self, s: StateId) -> usize {
        self.states.binary_search(&s).expect("decision state")
    }

    fn swap_function(&self, flat: &[u8]) -> SwapFunction {
        let mut phi = SwapFunction::identity(&self.layout, self.actions);
        for (k, &s) in self.states.iter().enumerate() {
            for a in 0..self.actions {
                phi.table_mut()[s][a] = flat[k * self.actions + a] as usize;
            }
        }
        phi
    }
}

fn accumulate(
    eval: &SwapEval<'_>,
    cands: &Candidates,
    width: usize,
    values: &mut [f64],
    decomp: Option<&mut Vec<f64>>,
) {
    let n = cands.len();
    match decomp {
        Some(decomp) if n >= PAR_THRESHOLD => {
            values
                .par_iter_mut()
                .zip(decomp.par_iter_mut())
                .enumerate()
                .for_each_init(
                    || eval.scratch(),
                    |sc, (k, (v, d))| {
                        let (val, dec) = eval.run(cands.table(k), width, sc);
                        *v += val;
                        *d += dec;
                    },
                );
        }
        Some(decomp) => {
            let mut sc = eval.scratch();
            for k in 0..n {
                let (val, dec) = eval.run(cands.table(k), width, &mut sc);
                values[k] += val;
                decomp[k] += dec;
            }
        }
        None if n >= PAR_THRESHOLD => {
            values
                .par_iter_mut()
                .enumerate()
                .for_each_init(|| eval.scratch(), |sc, (k, v)| *v += eval.run(cands.table(k), width, sc).0);
        }
        None => {
            let mut sc = eval.scratch();
            for (k, v) in values.iter_mut().enumerate() {
                *v += eval.run(cands.table(k), width, &mut sc).0;
            }
        }
    }
}

/// Index of the first maximum; candidates are in lexicographic order, so ties
/// go to the lexicographically smallest table.
fn argmax_first(values: impl Iterator<Item = f64>) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    for (i, v) in values.enumerate() {
        if v > best {
            best = v;
            k = i;
        }
    }
    k
}

fn tracker_for(game: &MarkovGame, profiles: &[PolicyProfile], player: usize, cap: u64) -> Result<RegretTracker> {
    let mut tr = RegretTracker::new(game.shared_layout(), game.action_counts()[player], cap)?;
    for p in profiles {
        tr.push(&game.induce_mdp(p, player)?, p.player(player));
    }
    Ok(tr)
}

/// Exact swap regret of `player` over the profile sequence, by enumeration
/// of every swap function.
pub fn swap_regret_exact(
    game: &MarkovGame,
    profiles: &[PolicyProfile],
    player: usize,
) -> Result<(f64, SwapFunction)> {
    let r = tracker_for(game, profiles, player, DEFAULT_ENUMERATION_CAP)?.swap_regret();
    Ok((r.value, r.argmax))
}

/// Exact external regret against every deterministic policy.
pub fn external_regret_exact(
    game: &MarkovGame,
    profiles: &[PolicyProfile],
    player: usize,
) -> Result<(f64, Policy)> {
    let a = game.action_counts()[player];
    let s = game.layout().num_decision_states();
    count_or_cap(a, s, DEFAULT_ENUMERATION_CAP).map_err(|candidates| Error::EnumerationCap {
        candidates,
        cap: DEFAULT_ENUMERATION_CAP,
    })?;
    let mut tr = RegretTracker::restricted(game.shared_layout(), a, DEFAULT_ENUMERATION_CAP);
    for p in profiles {
        tr.push(&game.induce_mdp(p, player)?, p.player(player));
    }
    let r = tr.external_regret().expect("policy space under cap");
    Ok((r.value, r.argmax))
}

/// Swap regret divided by the number of rounds, per player.
pub fn ce_gap(game: &MarkovGame, profiles: &[PolicyProfile]) -> Result<Vec<f64>> {
    if profiles.is_empty() {
        return Ok(vec![0.0; game.num_players()]);
    }
    (0..game.num_players())
        .map(|i| Ok(swap_regret_exact(game, profiles, i)?.0 / profiles.len() as f64))
        .collect()
}

/// Deviation gains `sum_t V^{i,pi_t} - V^{i,(phi(pi^i_t), pi^-i_t)}` for
/// every swap function, from joint-action backward induction on the game.
fn joint_deviation_gains(game: &MarkovGame, profiles: &[PolicyProfile], player: usize) -> Result<Vec<Vec<f64>>> {
    let a = game.action_counts()[player];
    let mut states: Vec<StateId> = game.layout().decision_states().collect();
    states.sort_unstable();
    let cands = {
        let cells = states.len() * a;
        count_or_cap(a, cells, DEFAULT_ENUMERATION_CAP).map_err(|candidates| Error::EnumerationCap {
            candidates,
            cap: DEFAULT_ENUMERATION_CAP,
        })?;
        Candidates::exhaustive(states.len(), a, a)
    };
    let mut gains = Vec::with_capacity(cands.len());
    for k in 0..cands.len() {
        let mut phi = SwapFunction::identity(game.layout(), a);
        for (c, &s) in states.iter().enumerate() {
            for b in 0..a {
                phi.table_mut()[s][b] = cands.table(k)[c * a + b] as usize;
            }
        }
        let mut per_round = Vec::with_capacity(profiles.len());
        for p in profiles {
            let base = game.joint_value(p, player)?;
            let dev = p.with_player(player, crate::game::apply_swap(p.player(player), &phi));
            per_round.push(base - game.joint_value(&dev, player)?);
        }
        gains.push(per_round);
    }
    Ok(gains)
}

/// `max_phi E_{t ~ [T]}[deviation gain]`, computed on the full game.
pub fn ce_gap_direct(game: &MarkovGame, profiles: &[PolicyProfile], player: usize) -> Result<f64> {
    let gains = joint_deviation_gains(game, profiles, player)?;
    let t = profiles.len().max(1) as f64;
    Ok(gains
        .iter()
        .map(|g| g.iter().sum::<f64>() / t)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `E_{t ~ [T]}[max_phi deviation gain]`; never below [`ce_gap_direct`].
pub fn ce_gap_max_inside(game: &MarkovGame, profiles: &[PolicyProfile], player: usize) -> Result<f64> {
    let gains = joint_deviation_gains(game, profiles, player)?;
    let t = profiles.len().max(1) as f64;
    Ok((0..profiles.len())
        .map(|r| gains.iter().map(|g| g[r]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / t)
}
