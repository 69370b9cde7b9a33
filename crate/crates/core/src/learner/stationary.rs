use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Acceptance threshold for `||B^T pi - pi||_inf`.
pub const STATIONARY_TOL: f64 = 1e-10;
pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct StationarySolution {
    pub pi: Vec<f64>,
    /// `||B^T pi - pi||_inf`.
    pub residual: f64,
    pub used_power_iteration: bool,
}

/// `max_a |sum_b pi(b) rows[b][a] - pi(a)|`.
pub fn stationary_residual(rows: &[Vec<f64>], pi: &[f64]) -> f64 {
    let d = pi.len();
    (0..d)
        .map(|a| {
            let next: f64 = rows.iter().zip(pi).map(|(r, p)| p * r[a]).sum();
            (next - pi[a]).abs()
        })
        .fold(0.0, f64::max)
}

/// Stationary distribution of the row-stochastic matrix whose rows are `rows`:
/// the unique `pi` with `pi(a') = sum_a pi(a) rows[a](a')`.
pub fn stationary_distribution(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    solve_stationary(rows).map(|s| s.pi)
}

/// Least-squares solve of `(B^T - I) pi = 0, 1^T pi = 1`, with power
/// iteration as a fallback. The result is always checked against
/// [`STATIONARY_TOL`].
pub fn solve_stationary(rows: &[Vec<f64>]) -> Result<StationarySolution> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Dimension(format!(
            "stationary solve needs a square matrix, got {d} rows"
        )));
    }
    if d == 1 {
        return Ok(StationarySolution {
            pi: vec![1.0],
            residual: 0.0,
            used_power_iteration: false,
        });
    }
    let floor = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);

    let mut m = DMatrix::<f64>::zeros(d + 1, d);
    for a in 0..d {
        for b in 0..d {
            m[(a, b)] = rows[b][a] - if a == b { 1.0 } else { 0.0 };
        }
        m[(d, a)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(d + 1);
    rhs[d] = 1.0;
    let direct = m
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .ok()
        .map(|v| polish(rows, v.as_slice(), floor));

    if let Some(pi) = direct {
        let residual = stationary_residual(rows, &pi);
        if residual <= STATIONARY_TOL {
            return Ok(StationarySolution {
                pi,
                residual,
                used_power_iteration: false,
            });
        }
    }

    let pi = polish(rows, &power_iteration(rows, POWER_TOL, POWER_MAX_ITER), floor);
    let residual = stationary_residual(rows, &pi);
    if residual <= STATIONARY_TOL {
        Ok(StationarySolution {
            pi,
            residual,
            used_power_iteration: true,
        })
    } else {
        Err(Error::StationaryResidual { residual })
    }
}

/// Renormalizes a candidate and applies one step of the chain written as
/// `pi'(a) = f + sum_b pi(b)(B[b][a] - f)`, where `f` is the smallest entry of
/// `B`. Every output entry is then at least `f`, and the sum stays 1.
fn polish(rows: &[Vec<f64>], candidate: &[f64], floor: f64) -> Vec<f64> {
    let clipped: Vec<f64> = candidate.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let p: Vec<f64> = if total > 0.0 && total.is_finite() {
        clipped.iter().map(|v| v / total).collect()
    } else {
        vec![1.0 / rows.len() as f64; rows.len()]
    };
    let floor = floor.max(0.0);
    (0..rows.len())
        .map(|a| floor + rows.iter().zip(&p).map(|(r, pb)| pb * (r[a] - floor)).sum::<f64>())
        .collect()
}

/// Iterates `pi <- B^T pi` from uniform until the L1 change is below `tol`.
pub fn power_iteration(rows: &[Vec<f64>], tol: f64, max_iter: usize) -> Vec<f64> {
    let d = rows.len();
    let mut pi = vec![1.0 / d as f64; d];
    let mut next = vec![0.0; d];
    for _ in 0..max_iter {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (r, &p) in rows.iter().zip(&pi) {
            for (n, &x) in next.iter_mut().zip(r) {
                *n += p * x;
            }
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        let change: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if change <= tol {
            break;
        }
    }
    pi
}
