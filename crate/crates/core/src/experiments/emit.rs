use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::runners::{FtrlDemoReport, RunOutput};
use crate::error::{Error, Result};
use crate::estimation::write_header;
use crate::metrics::RegretReport;

fn write_file(
    dir: &Path,
    name: &str,
    written: &mut Vec<PathBuf>,
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes every output file of `run` into `dir` and returns the paths written.
/// Identical runs produce byte-identical files.
pub fn write_outputs(dir: &Path, run: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let h = &run.header;
    write_file(dir, "regret.csv", &mut written, |w| run.report.write_csv(w, h))?;
    write_file(dir, "summary.txt", &mut written, |w| {
        run.report.write_summary(&mut *w, h)?;
        if let Some(b) = &run.bandit {
            writeln!(w)?;
            writeln!(w, "estimation")?;
            writeln!(w, "  beta              {}", b.beta)?;
            writeln!(w, "  block length      {} ({} blocks)", b.block, b.blocks)?;
            writeln!(
                w,
                "  inaccurate cells  {} of {} (max error {})",
                b.inaccurate_cells, b.cells, b.max_error
            )?;
            writeln!(w, "  unvisited cells   {}", b.unvisited_cells)?;
            writeln!(
                w,
                "  visit bound       {} (missed in {} blocks)",
                b.visit_bound, b.blocks_below_visit_bound
            )?;
        }
        if let Some(k) = run.kernels_invariant {
            writeln!(w)?;
            writeln!(w, "induced kernels invariant: {k}")?;
        }
        if let Some(f) = &run.ftrl {
            writeln!(w)?;
            write_ftrl_table(w, f)?;
        }
        Ok(())
    })?;
    if !run.report.checkpoints.is_empty() {
        let svg = regret_svg(&run.report);
        write_file(dir, "regret.svg", &mut written, |w| w.write_all(svg.as_bytes()))?;
    }
    if let Some(b) = &run.blocked {
        write_file(dir, "returns.csv", &mut written, |w| b.write_returns_csv(w, h))?;
        write_file(dir, "blocks.csv", &mut written, |w| b.write_blocks_csv(w, h))?;
    }
    if let Some(f) = &run.ftrl {
        write_file(dir, "ftrl_demo.csv", &mut written, |w| write_ftrl_csv(w, f, h))?;
    }
    let json = serde_json::to_string_pretty(run)?;
    write_file(dir, "run.json", &mut written, |w| {
        w.write_all(json.as_bytes())?;
        writeln!(w)
    })?;
    Ok(written)
}

fn write_ftrl_csv(w: &mut impl Write, f: &FtrlDemoReport, header: &[(String, String)]) -> io::Result<()> {
    write_header(w, header)?;
    writeln!(
        w,
        "learner,eta,gamma,episodes,regret,regret_per_episode,swap_lower_bound,min_b_prob"
    )?;
    for r in &f.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.learner, r.eta, r.gamma, r.episodes, r.regret, r.regret_per_episode, r.swap_lower_bound, r.min_b_prob
        )?;
    }
    Ok(())
}

fn write_ftrl_table(w: &mut impl Write, f: &FtrlDemoReport) -> io::Result<()> {
    writeln!(w, "scripted environment, {} episodes", f.episodes)?;
    writeln!(
        w,
        "{:<18} {:>8} {:>10} {:>9} {:>12} {:>10} {:>10}",
        "learner", "eta", "gamma", "episodes", "regret", "regret/T", "min pi(b)"
    )?;
    for r in &f.rows {
        writeln!(
            w,
            "{:<18} {:>8} {:>10.3e} {:>9} {:>12.3} {:>10.4} {:>10.4}",
            r.learner, r.eta, r.gamma, r.episodes, r.regret, r.regret_per_episode, r.min_b_prob
        )?;
    }
    Ok(())
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

type Panel = (&'static str, fn(&crate::metrics::CheckpointRow) -> f64);

/// Two stacked panels: cumulative swap regret and the CE gap against episode,
/// one line per player, log-scaled episode axis.
pub fn regret_svg(report: &RegretReport) -> String {
    let (w, ph, pad) = (640.0, 240.0, 50.0);
    let height = 2.0 * ph + 3.0 * pad;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height}" viewBox="0 0 {w} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let players = report.players.len().max(
        report.checkpoints.iter().map(|r| r.player + 1).max().unwrap_or(0),
    );
    let max_ep = report.checkpoints.iter().map(|r| r.episode).max().unwrap_or(1).max(2) as f64;
    let x_of = |ep: usize| pad + (ep.max(1) as f64).ln() / max_ep.ln() * (w - 2.0 * pad);
    let panels: [Panel; 2] =
        [("cumulative swap regret", |r| r.swap_regret), ("CE gap (swap regret / T)", |r| r.ce_gap)];
    for (k, (title, value)) in panels.iter().enumerate() {
        let top = pad + k as f64 * (ph + pad);
        let bottom = top + ph;
        let vals: Vec<f64> = report.checkpoints.iter().map(value).filter(|v| v.is_finite()).collect();
        let lo = vals.iter().copied().fold(0.0_f64, f64::min);
        let mut hi = vals.iter().copied().fold(0.0_f64, f64::max);
        if hi - lo < 1e-12 {
            hi = lo + 1.0;
        }
        let y_of = |v: f64| bottom - (v - lo) / (hi - lo) * ph;
        let _ = writeln!(
            s,
            r#"<rect x="{pad}" y="{top}" width="{}" height="{ph}" fill="none" stroke="gray"/>"#,
            w - 2.0 * pad
        );
        let _ = writeln!(s, r#"<text x="{pad}" y="{:.1}">{title}</text>"#, top - 6.0);
        let _ = writeln!(s, r#"<text x="4" y="{:.1}">{hi:.3e}</text>"#, top + 10.0);
        let _ = writeln!(s, r#"<text x="4" y="{bottom:.1}">{lo:.3e}</text>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">episode {} (log scale)</text>"#,
            w - pad,
            bottom + 14.0,
            max_ep as usize
        );
        for p in 0..players {
            let pts: Vec<String> = report
                .checkpoints
                .iter()
                .filter(|r| r.player == p && value(r).is_finite())
                .map(|r| format!("{:.2},{:.2}", x_of(r.episode), y_of(value(r))))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let color = COLORS[p % COLORS.len()];
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" fill="{color}">player {p}</text>"#,
                w - pad - 60.0,
                top + 14.0 + 12.0 * p as f64
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
