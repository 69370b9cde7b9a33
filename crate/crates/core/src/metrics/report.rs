use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bounds::ResidualTable;
use super::regret::{ExternalRegret, RegretTracker, SwapRegret};
use crate::estimation::write_header;
use crate::game::{InducedMdp, Layout, MarkovGame, PathLengths, PolicyProfile};

/// Up to `count` strictly increasing, roughly log-spaced rounds in `1..=rounds`, ending at `rounds`.
pub fn checkpoint_schedule(rounds: usize, count: usize) -> Vec<usize> {
    if rounds == 0 || count == 0 {
        return Vec::new();
    }
    if count >= rounds {
        return (1..=rounds).collect();
    }
    let mut out = Vec::with_capacity(count);
    let mut prev = 0;
    for k in 0..count {
        let target = (rounds as f64).powf((k + 1) as f64 / count as f64).round() as usize;
        // leave room for the remaining checkpoints
        let c = target.max(prev + 1).min(rounds - (count - 1 - k));
        out.push(c);
        prev = c;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub episode: usize,
    pub player: usize,
    pub swap_regret: f64,
    pub external_regret: Option<f64>,
    pub ce_gap: f64,
    pub path1: f64,
    pub path2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerSummary {
    pub player: usize,
    pub swap: SwapRegret,
    pub external: Option<ExternalRegret>,
    pub ce_gap: f64,
    pub path1: f64,
    pub path2: f64,
    /// Largest disagreement between the two regret computations over all swap functions.
    pub decomposition_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub episodes: usize,
    pub checkpoints: Vec<CheckpointRow>,
    pub players: Vec<PlayerSummary>,
    pub residuals: ResidualTable,
    pub notes: Vec<String>,
}

impl RegretReport {
    /// CSV `checkpoint_episode, player, swap_regret, external_regret, ce_gap, path1, path2`.
    pub fn write_csv(&self, mut w: impl Write, header: &[(String, String)]) -> io::Result<()> {
        write_header(&mut w, header)?;
        writeln!(w, "checkpoint_episode,player,swap_regret,external_regret,ce_gap,path1,path2")?;
        for r in &self.checkpoints {
            let ext = r.external_regret.map(|v| v.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.episode, r.player, r.swap_regret, ext, r.ce_gap, r.path1, r.path2
            )?;
        }
        Ok(())
    }

    pub fn write_summary(&self, mut w: impl Write, header: &[(String, String)]) -> io::Result<()> {
        for (k, v) in header {
            writeln!(w, "{k} = {v}")?;
        }
        writeln!(w, "episodes = {}", self.episodes)?;
        for note in &self.notes {
            writeln!(w, "note: {note}")?;
        }
        writeln!(w)?;
        for p in &self.players {
            let kind = if p.swap.exact { "exact" } else { "lower bound (restricted search)" };
            writeln!(w, "player {}", p.player)?;
            writeln!(w, "  swap regret       {} ({kind})", p.swap.value)?;
            writeln!(w, "  swap argmax       {:?}", p.swap.argmax.table())?;
            match &p.external {
                Some(e) => writeln!(w, "  external regret   {}", e.value)?,
                None => writeln!(w, "  external regret   n/a (policy space above the enumeration cap)")?,
            }
            writeln!(w, "  ce gap            {}", p.ce_gap)?;
            writeln!(w, "  path length       {} (first order), {} (second order)", p.path1, p.path2)?;
            writeln!(w, "  decomposition gap {:e}", p.decomposition_gap)?;
        }
        writeln!(w)?;
        writeln!(w, "bound residuals")?;
        if self.residuals.is_empty() {
            writeln!(w, "(none)")?;
        } else {
            write!(w, "{}", self.residuals)?;
        }
        Ok(())
    }
}

/// Feeds per-round induced MDPs to one tracker per player and snapshots the
/// regret at the checkpoint rounds.
///
/// Each pushed round stands for `scale` episodes, so blocked runs can be fed
/// one round per block.
#[derive(Clone, Debug)]
pub struct RegretRecorder {
    trackers: Vec<RegretTracker>,
    paths: PathLengths,
    prev: Option<PolicyProfile>,
    schedule: Vec<usize>,
    next: usize,
    scale: usize,
    rows: Vec<CheckpointRow>,
}

impl RegretRecorder {
    /// One `(layout, actions)` pair per player. `rounds` pushes are expected,
    /// with checkpoints at `checkpoint_schedule(rounds, checkpoints)`.
    pub fn new(players: &[(Arc<Layout>, usize)], rounds: usize, checkpoints: usize, cap: u64) -> Self {
        RegretRecorder {
            trackers: players
                .iter()
                .map(|(l, a)| RegretTracker::auto(l.clone(), *a, cap))
                .collect(),
            paths: PathLengths::zeros(players.len()),
            prev: None,
            schedule: checkpoint_schedule(rounds, checkpoints),
            next: 0,
            scale: 1,
            rows: Vec::new(),
        }
    }

    /// Recorder for every player of a Markov game.
    pub fn for_game(game: &MarkovGame, rounds: usize, checkpoints: usize, cap: u64) -> Self {
        let players: Vec<_> = game
            .action_counts()
            .iter()
            .map(|&a| (game.shared_layout(), a))
            .collect();
        Self::new(&players, rounds, checkpoints, cap)
    }

    pub fn with_scale(mut self, scale: usize) -> Self {
        self.scale = scale.max(1);
        self
    }

    pub fn trackers(&self) -> &[RegretTracker] {
        &self.trackers
    }

    pub fn is_exact(&self) -> bool {
        self.trackers.iter().all(RegretTracker::is_exact)
    }

    /// Path lengths over the profiles pushed so far, plus any [`Self::finish_path`] step.
    pub fn paths(&self) -> &PathLengths {
        &self.paths
    }

    pub fn rounds(&self) -> usize {
        self.trackers.first().map_or(0, RegretTracker::rounds)
    }

    /// Adds one round: `mdps[i]` is player `i`'s induced MDP under `profile`.
    pub fn push(&mut self, mdps: &[InducedMdp], profile: &PolicyProfile) {
        self.step_to(profile);
        for ((tr, mdp), pol) in self.trackers.iter_mut().zip(mdps).zip(&profile.policies) {
            tr.push(mdp, pol);
        }
        let t = self.rounds();
        if self.schedule.get(self.next) == Some(&t) {
            self.next += 1;
            let s = self.scale as f64;
            for (i, tr) in self.trackers.iter().enumerate() {
                let swap = tr.swap_regret().value * s;
                self.rows.push(CheckpointRow {
                    episode: t * self.scale,
                    player: i,
                    swap_regret: swap,
                    external_regret: tr.external_regret().map(|e| e.value * s),
                    ce_gap: swap / (t * self.scale) as f64,
                    path1: self.paths.first_order[i],
                    path2: self.paths.second_order[i],
                });
            }
        }
    }

    /// Records the step from the last pushed profile to the profile after the final update.
    pub fn finish_path(&mut self, final_profile: &PolicyProfile) {
        self.step_to(final_profile);
        self.prev = None;
    }

    fn step_to(&mut self, profile: &PolicyProfile) {
        if let Some(prev) = self.prev.take() {
            self.paths.push_step(&prev, profile);
            for (tr, (p, q)) in self
                .trackers
                .iter_mut()
                .zip(prev.policies.iter().zip(&profile.policies))
            {
                tr.record_step(p, q);
            }
        }
        self.prev = Some(profile.clone());
    }

    pub fn into_report(self, residuals: ResidualTable, notes: Vec<String>) -> RegretReport {
        let rounds = self.rounds();
        let s = self.scale as f64;
        let episodes = rounds * self.scale;
        let players = self
            .trackers
            .iter()
            .enumerate()
            .map(|(i, tr)| {
                let mut swap = tr.swap_regret();
                swap.value *= s;
                swap.decomposition *= s;
                let external = tr.external_regret().map(|mut e| {
                    e.value *= s;
                    e
                });
                PlayerSummary {
                    player: i,
                    ce_gap: if episodes == 0 { 0.0 } else { swap.value / episodes as f64 },
                    swap,
                    external,
                    path1: self.paths.first_order[i],
                    path2: self.paths.second_order[i],
                    decomposition_gap: tr.max_decomposition_gap() * s,
                }
            })
            .collect();
        RegretReport {
            episodes,
            checkpoints: self.rows,
            players,
            residuals,
            notes,
        }
    }
}
