//! Acceptance harness: prints one PASS/FAIL line per criterion and exits 0.
//! Hard assertions on the same properties live in the other test targets.

mod common;

use std::time::{Duration, Instant};

use common::checks::{self, Tally};
use common::*;
use posr_core::experiments::{
    load_game, run_experiment, run_ftrl_demo, ExperimentConfig, FtrlDemoConfig, GameSource, GeneratorSpec, Mode,
    RunOutput, DEFAULT_ETA_GRID, DEMO_POSR_ETA,
};
use posr_core::learner::{bregman_prox, power_iteration, prox_objective, solve_stationary, stationary_residual, Regularizer};
use posr_core::metrics::{swap_regret_exact, RegretRecorder, DEFAULT_ENUMERATION_CAP};
use posr_core::PolicyProfile;
use rand::Rng;

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: usize, limit_secs: f64, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (ok, detail) = f();
    let elapsed = start.elapsed();
    let in_time = elapsed.as_secs_f64() < limit_secs;
    let detail = if in_time { detail } else { format!("{detail}; over the {limit_secs} s limit") };
    let o = Outcome {
        id,
        pass: ok && in_time,
        detail,
        elapsed,
    };
    println!(
        "criterion {}: {} ({:.1} s) {}",
        o.id,
        if o.pass { "PASS" } else { "FAIL" },
        o.elapsed.as_secs_f64(),
        o.detail
    );
    o
}

/// `10^(-6u) / (2d)` for uniform `u`: spans six decades below the cap.
fn draw_gamma(r: &mut impl Rng, d: usize) -> f64 {
    10f64.powf(-6.0 * r.random::<f64>()) / (2.0 * d as f64)
}

fn prox_criterion() -> (bool, String) {
    let mut r = rng(101);
    let (mut kkt_fail, mut grid_fail, mut grid_n) = (0, 0, 0);
    let (mut worst_kkt, mut worst_gap) = (0f64, f64::NEG_INFINITY);
    for k in 0..10_000 {
        let d = 2 + k % 3;
        let gamma = draw_gamma(&mut r, d);
        let y = truncated_simplex(&mut r, d, gamma);
        let g: Vec<f64> = (0..d).map(|_| 3.0 * r.random::<f64>()).collect();
        let eta = 10f64.powf(-3.0 * r.random::<f64>());
        let sol = bregman_prox(&y, &g, eta, gamma).unwrap();
        worst_kkt = worst_kkt.max(sol.residual());
        if sol.residual() > 1e-10 {
            kkt_fail += 1;
        }
        if d == 2 {
            grid_n += 1;
            let gap = prox_objective(&sol.x, &y, &g, eta) - grid_prox_d2(&y, &g, eta, gamma, 4000);
            worst_gap = worst_gap.max(gap);
            if gap > 1e-5 {
                grid_fail += 1;
            }
        }
    }
    (
        kkt_fail == 0 && grid_fail == 0,
        format!(
            "10000 instances, KKT failures {kkt_fail} (worst {worst_kkt:.1e}); {grid_n} grid comparisons, failures {grid_fail} (worst objective minus grid {worst_gap:.1e})"
        ),
    )
}

fn stationary_criterion() -> (bool, String) {
    let mut r = rng(102);
    let (mut fails, mut worst_res, mut worst_pow, mut min_margin) = (0, 0f64, 0f64, f64::INFINITY);
    for k in 0..10_000 {
        let d = 2 + k % 3;
        let gamma = draw_gamma(&mut r, d);
        let rows: Vec<Vec<f64>> = (0..d).map(|_| truncated_simplex(&mut r, d, gamma)).collect();
        let pi = solve_stationary(&rows).unwrap().pi;
        let res = stationary_residual(&rows, &pi);
        let margin = pi.iter().map(|&p| p - gamma).fold(f64::INFINITY, f64::min);
        let pw = power_iteration(&rows, 1e-15, 1_000_000);
        let diff = pw.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst_res = worst_res.max(res);
        worst_pow = worst_pow.max(diff);
        min_margin = min_margin.min(margin);
        if res > 1e-10 || margin < 0.0 || diff > 1e-9 {
            fails += 1;
        }
    }
    (
        fails == 0,
        format!(
            "10000 row sets, failures {fails}; worst residual {worst_res:.1e}, worst power-iteration gap {worst_pow:.1e}, min entry minus gamma {min_margin:.1e}"
        ),
    )
}

fn lemma_criterion() -> (bool, String) {
    const N: usize = 200;
    let (identity, value_bound) = checks::value_difference(N, 201);
    let named: Vec<(&str, Tally)> = vec![
        ("value-difference identity", identity),
        ("value-difference bound", value_bound),
        ("dynamics shift", checks::dynamics_difference(N, 202)),
        ("action-value shift", checks::action_value_difference(N, 203)),
        ("induced variation", checks::induced_variation(N, 204)),
        ("occupancy variation", checks::occupancy_variation(N, 205)),
        ("product l1", checks::product_l1(N, 206)),
        ("combined-policy identity", checks::combined_policy_identity(N, 207)),
        ("iterate ratio", checks::oomd_ratio(N, 208)),
        ("rvu", checks::rvu(N, 209)),
    ];
    let ok = named.iter().all(|(_, t)| t.ok() && t.instances >= 100);
    let detail = named
        .iter()
        .map(|(n, t)| format!("{n} {}/{}", t.instances - t.violations, t.instances))
        .collect::<Vec<_>>()
        .join(", ");
    (ok, detail)
}

fn full_info_config(seed: u64, episodes: usize) -> ExperimentConfig {
    ExperimentConfig {
        mode: Mode::FullInfo,
        episodes,
        game: GameSource::Generator(GeneratorSpec { seed, ..Default::default() }),
        ..ExperimentConfig::default()
    }
}

fn starts(r: &posr_core::metrics::Residual, prefix: &str) -> bool {
    r.name.starts_with(prefix)
}

fn swap_trend_criterion(runs: &mut Vec<RunOutput>) -> (bool, String) {
    let horizons = [500, 2000, 8000];
    let (mut decreasing, mut violations, mut not_applied) = (0, 0, 0);
    let mut failing = Vec::new();
    for seed in 0..10 {
        let outs: Vec<RunOutput> = horizons.iter().map(|&t| run_experiment(&full_info_config(seed, t)).unwrap()).collect();
        let players = outs[0].report.players.len();
        let ok = (0..players).all(|i| {
            let v: Vec<f64> = outs.iter().zip(&horizons).map(|(o, &t)| o.report.players[i].swap.value / t as f64).collect();
            v[0] > v[1] && v[1] > v[2]
        });
        if ok {
            decreasing += 1;
        } else {
            let v: Vec<String> = (0..players)
                .map(|i| {
                    let r: Vec<String> =
                        outs.iter().zip(&horizons).map(|(o, &t)| format!("{:.4}", o.report.players[i].swap.value / t as f64)).collect();
                    format!("p{i} [{}]", r.join(", "))
                })
                .collect();
            failing.push(format!("seed {seed}: {}", v.join(" ")));
        }
        for o in &outs {
            for r in o.report.residuals.rows.iter().filter(|r| starts(r, "swap regret bound")) {
                violations += r.is_violation() as usize;
                not_applied += !r.applies() as usize;
            }
        }
        runs.extend(outs);
    }
    let mut detail = format!(
        "swap/T strictly decreasing for every player on {decreasing}/10 seeds; bound rows violated {violations}, not applicable {not_applied}"
    );
    if !failing.is_empty() {
        detail += &format!("; not decreasing: {}", failing.join("; "));
    }
    (decreasing >= 9 && violations == 0 && not_applied == 0, detail)
}

fn path_length_criterion(runs: &[RunOutput]) -> (bool, String) {
    let rows: Vec<_> = runs
        .iter()
        .flat_map(|o| o.report.residuals.rows.iter().filter(|r| starts(r, "second-order path length bound")))
        .collect();
    let violations = rows.iter().filter(|r| r.is_violation()).count();
    let not_applied = rows.iter().filter(|r| !r.applies()).count();
    let min_res = rows.iter().map(|r| r.residual).fold(f64::INFINITY, f64::min);
    (
        rows.len() == runs.len() && violations == 0 && not_applied == 0,
        format!("{} runs, violations {violations}, not applicable {not_applied}, smallest residual {min_res:.3e}", rows.len()),
    )
}

fn ftrl_criterion(runs: &mut Vec<RunOutput>) -> (bool, String) {
    let (mut posr_ok, mut ftrl_fail, mut min_ftrl) = (0, 0, f64::INFINITY);
    let mut ratios = Vec::new();
    for _seed in 0..10 {
        let demo = FtrlDemoConfig {
            episodes: 3000,
            eta_grid: DEFAULT_ETA_GRID.to_vec(),
            regularizers: vec![Regularizer::Entropy, Regularizer::LogBarrier],
            posr_episodes: vec![300, 3000],
            posr_eta: DEMO_POSR_ETA,
            posr_gamma: None,
        };
        let out = run_ftrl_demo(&demo).unwrap();
        let f = out.ftrl.as_ref().unwrap();
        for r in f.rows.iter().filter(|r| r.learner != "posr") {
            min_ftrl = min_ftrl.min(r.regret);
            ftrl_fail += (r.regret < 500.0) as usize;
        }
        let posr: Vec<_> = f.rows.iter().filter(|r| r.learner == "posr").collect();
        let ratio = posr[1].regret_per_episode / posr[0].regret_per_episode;
        ratios.push(ratio);
        posr_ok += (ratio <= 0.5) as usize;
        runs.push(out);
    }
    (
        ftrl_fail == 0 && posr_ok >= 9,
        format!(
            "FTRL configurations below T/6: {ftrl_fail}/120 (min regret {min_ftrl:.1}); POSR ratio (T=3000 vs 300) {:.3} on 10 runs, {posr_ok}/10 at most 0.5",
            ratios[0]
        ),
    )
}

fn bandit_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        mode: Mode::BanditBlocked,
        episodes: 1_000_000,
        seed,
        epsilon: Some(0.5),
        gamma: Some(0.25),
        delta: Some(0.1),
        checkpoints: 8,
        game: GameSource::Generator(GeneratorSpec { min_beta: Some(0.05), ..Default::default() }),
        ..ExperimentConfig::default()
    }
}

/// Feeds every block's profile once per episode and compares with the
/// reported (block-scaled) regret and with `B` times the decimated regret.
fn blocked_identity(out: &RunOutput) -> f64 {
    let config = bandit_config(0);
    let (game, _) = load_game(&config.game).unwrap();
    let blocked = out.blocked.as_ref().unwrap();
    let b = blocked.block;
    let mut per_episode = RegretRecorder::for_game(&game, blocked.episodes, 0, DEFAULT_ENUMERATION_CAP);
    let mut decimated = RegretRecorder::for_game(&game, blocked.num_blocks(), 0, DEFAULT_ENUMERATION_CAP);
    for rec in &blocked.blocks {
        let mdps: Vec<_> = (0..game.num_players()).map(|i| game.induce_mdp(&rec.profile, i).unwrap()).collect();
        for _ in 0..b {
            per_episode.push(&mdps, &rec.profile);
        }
        decimated.push(&mdps, &rec.profile);
    }
    let mut worst = 0f64;
    for i in 0..game.num_players() {
        let full = per_episode.trackers()[i].swap_regret().value;
        let dec = b as f64 * decimated.trackers()[i].swap_regret().value;
        let reported = out.report.players[i].swap.value;
        let scale = full.abs().max(1.0);
        worst = worst.max((full - dec).abs() / scale).max((full - reported).abs() / scale);
    }
    worst
}

fn bandit_criterion(runs: &mut Vec<RunOutput>) -> (bool, String) {
    let (mut cells, mut bad, mut max_err) = (0usize, 0usize, 0f64);
    let mut identity = f64::NAN;
    let mut beta_block = String::new();
    for seed in 0..20 {
        let out = run_experiment(&bandit_config(seed)).unwrap();
        let d = out.bandit.as_ref().unwrap();
        cells += d.cells;
        bad += d.inaccurate_cells;
        max_err = max_err.max(d.max_error);
        if seed == 0 {
            beta_block = format!("beta {:.3}, B {}, {} blocks", d.beta, d.block, d.blocks);
            identity = blocked_identity(&out);
        }
        runs.push(out);
    }
    let frac = bad as f64 / cells as f64;
    (
        frac <= 0.2 && identity <= 1e-9,
        format!(
            "20 runs ({beta_block}): {bad}/{cells} cells outside epsilon = {frac:.4} (limit 0.2, max error {max_err:.3}); blocked vs B x decimated relative gap {identity:.1e}"
        ),
    )
}

fn independent_config(seed: u64, episodes: usize, eta: Option<f64>) -> ExperimentConfig {
    ExperimentConfig {
        mode: Mode::IndependentTransition,
        episodes,
        eta,
        gamma: Some(1.0 / episodes as f64),
        game: GameSource::Generator(GeneratorSpec { seed, ..Default::default() }),
        ..ExperimentConfig::default()
    }
}

/// Per player: `c = (R2 - R1) / ln 4`, pass iff `R3 - R2 <= c ln 4`.
fn log_trend(r: &[f64; 3]) -> bool {
    let c = (r[1] - r[0]) / 4f64.ln();
    r[2] - r[1] <= c * 4f64.ln()
}

fn independent_criterion(runs: &mut Vec<RunOutput>) -> (bool, String) {
    let horizons = [1000, 4000, 16000];
    let (mut trend_ok, mut violations, mut not_applied, mut moved) = (0, 0, 0, 0);
    let mut example = String::new();
    for seed in 0..10 {
        let outs: Vec<RunOutput> =
            horizons.iter().map(|&t| run_experiment(&independent_config(seed, t, None)).unwrap()).collect();
        let players = outs[0].report.players.len();
        let ok = (0..players).all(|i| {
            log_trend(&[0, 1, 2].map(|k| outs[k].report.players[i].swap.value))
        });
        trend_ok += ok as usize;
        if seed == 0 {
            let r: Vec<String> = outs.iter().map(|o| format!("{:.1}", o.report.players[0].swap.value)).collect();
            example = format!("seed 0 player 0 regret [{}]", r.join(", "));
        }
        for o in &outs {
            moved += (o.kernels_invariant != Some(true)) as usize;
            for r in o.report.residuals.rows.iter().filter(|r| starts(r, "logarithmic swap regret bound")) {
                violations += r.is_violation() as usize;
                not_applied += !r.applies() as usize;
            }
        }
        runs.extend(outs);
    }
    // diagnostic only: a larger step size than the default
    let diag: Vec<String> = horizons
        .iter()
        .map(|&t| {
            let o = run_experiment(&independent_config(1, t, Some(0.5))).unwrap();
            format!("{:.2}", o.report.players[0].swap.value / (t as f64).ln())
        })
        .collect();
    (
        trend_ok == 10 && violations == 0 && not_applied == 0 && moved == 0,
        format!(
            "log-trend holds on {trend_ok}/10 seeds ({example}); log bound rows violated {violations}, not applicable {not_applied}; runs with moving kernels {moved}; diagnostic eta=0.5 seed 1 regret/ln T [{}]",
            diag.join(", ")
        ),
    )
}

fn oracle_criterion(runs: &[RunOutput]) -> (bool, String) {
    let mut r = rng(109);
    let mut worst = 0f64;
    for k in 0..100 {
        let players = 1 + k % 3;
        let actions = 2 + k % 3;
        let game = one_step_game(&mut r, players, actions);
        let rounds = 5 + k % 20;
        let profiles: Vec<PolicyProfile> = (0..rounds).map(|_| random_profile(&mut r, &game)).collect();
        let s = game.layout().initial();
        for i in 0..players {
            let plays: Vec<Vec<f64>> = profiles.iter().map(|p| p.player(i).row(s).to_vec()).collect();
            let losses: Vec<Vec<f64>> = profiles.iter().map(|p| one_step_losses(&game, p, i)).collect();
            let oracle = bandit_swap_regret(&plays, &losses);
            let value = swap_regret_exact(&game, &profiles, i).unwrap().0;
            worst = worst.max((value - oracle).abs());
        }
    }
    let gap = runs
        .iter()
        .flat_map(|o| o.report.players.iter())
        .map(|p| p.decomposition_gap / p.swap.value.abs().max(1.0))
        .fold(0f64, f64::max);
    let players: usize = runs.iter().map(|o| o.report.players.len()).sum();
    (
        worst <= 1e-10 && gap <= 1e-9,
        format!(
            "100 single-state instances, worst gap to the bandit oracle {worst:.1e}; decomposition check on {players} player runs from {} runs, worst relative gap {gap:.1e}",
            runs.len()
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut runs = Vec::new();
    let mut outcomes = vec![
        timed(1, 10.0, prox_criterion),
        timed(2, 10.0, stationary_criterion),
        timed(3, 60.0, lemma_criterion),
    ];
    let mut trend_runs = Vec::new();
    outcomes.push(timed(4, 900.0, || swap_trend_criterion(&mut trend_runs)));
    outcomes.push(timed(5, f64::INFINITY, || path_length_criterion(&trend_runs)));
    runs.extend(trend_runs);
    outcomes.push(timed(6, 300.0, || ftrl_criterion(&mut runs)));
    outcomes.push(timed(7, 1200.0, || bandit_criterion(&mut runs)));
    outcomes.push(timed(8, 900.0, || independent_criterion(&mut runs)));
    outcomes.push(timed(9, f64::INFINITY, || oracle_criterion(&runs)));
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1} s",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
}
