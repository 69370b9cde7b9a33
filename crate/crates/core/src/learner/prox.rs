use super::simplex::log_barrier_divergence;
use crate::error::{Error, Result};

/// Iteration cap of the multiplier bisection.
pub const PROX_MAX_ITER: usize = 200;
/// Target for `|sum x - 1|`.
pub const PROX_SUM_TOL: f64 = 1e-12;

/// Minimizer of `eta <g, x> + D_R(x, y)` over the gamma-truncated simplex,
/// with its KKT certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct ProxSolution {
    pub x: Vec<f64>,
    /// Multiplier of the sum constraint.
    pub lambda: f64,
    /// `|sum x - 1|`.
    pub sum_residual: f64,
    /// `max_a |x(a) - clamp(1/(eta g(a) + 1/y(a) + lambda), gamma, 1 - (d-1) gamma)|`.
    pub kkt_residual: f64,
    pub iterations: usize,
}

impl ProxSolution {
    pub fn residual(&self) -> f64 {
        self.sum_residual.max(self.kkt_residual)
    }
}

/// Coordinate map `x(a; lambda)` for a given shift `c(a) = eta g(a) + 1/y(a)`.
#[inline]
fn coord(c: f64, lambda: f64, lo: f64, hi: f64) -> f64 {
    let den = c + lambda;
    if den <= 0.0 {
        hi
    } else {
        (1.0 / den).clamp(lo, hi)
    }
}

fn mass(c: &[f64], lambda: f64, lo: f64, hi: f64) -> f64 {
    c.iter().map(|&ca| coord(ca, lambda, lo, hi)).sum()
}

/// Log-barrier proximal step `argmin_{x in simplex_gamma} eta <g, x> + D_R(x, y)`.
///
/// Solves for the multiplier `lambda` by bisection on the monotone map
/// `lambda -> sum_a x(a; lambda)`, then polishes with Newton steps.
pub fn bregman_prox(y: &[f64], g: &[f64], eta: f64, gamma: f64) -> Result<ProxSolution> {
    let d = y.len();
    if d < 2 || g.len() != d {
        return Err(Error::Dimension(format!(
            "prox needs d >= 2 and matching loss length, got y: {d}, g: {}",
            g.len()
        )));
    }
    if !(gamma > 0.0 && gamma * d as f64 <= 1.0) {
        return Err(Error::Parameter(format!(
            "gamma = {gamma} must lie in (0, 1/{d}]"
        )));
    }
    let lo = gamma;
    let hi = 1.0 - (d - 1) as f64 * gamma;

    if g.iter().all(|&v| v == 0.0) {
        return Ok(certify(y.to_vec(), y, g, eta, gamma, 0.0, 0));
    }

    let c: Vec<f64> = y.iter().zip(g).map(|(&ya, &ga)| eta * ga + 1.0 / ya).collect();
    let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
    // mass(l_lo) >= 1: the smallest shift maps to 1, clamped to hi; all others >= gamma.
    let mut l_lo = 1.0 - cmin;
    // mass(l_hi) = d gamma <= 1: every coordinate is at most gamma.
    let mut l_hi = 1.0 / gamma - cmin;

    let mut iterations = 0;
    let mut lambda = 0.5 * (l_lo + l_hi);
    while iterations < PROX_MAX_ITER {
        iterations += 1;
        lambda = 0.5 * (l_lo + l_hi);
        let f = mass(&c, lambda, lo, hi) - 1.0;
        if f.abs() <= PROX_SUM_TOL {
            break;
        }
        if f > 0.0 {
            l_lo = lambda;
        } else {
            l_hi = lambda;
        }
        if l_hi - l_lo <= f64::EPSILON * lambda.abs().max(1.0) {
            break;
        }
    }

    // Newton on the free coordinates: d/dlambda sum x = -sum_free x^2.
    for _ in 0..3 {
        let mut f = -1.0;
        let mut df = 0.0;
        for &ca in &c {
            let v = coord(ca, lambda, lo, hi);
            f += v;
            if v > lo && v < hi {
                df -= v * v;
            }
        }
        if f == 0.0 || df == 0.0 {
            break;
        }
        let next = lambda - f / df;
        if !(next > l_lo - 1e-9 && next < l_hi + 1e-9) {
            break;
        }
        lambda = next;
    }

    let mut x: Vec<f64> = c.iter().map(|&ca| coord(ca, lambda, lo, hi)).collect();
    // Rounding leftovers go onto the largest coordinate, which is never at the lower clamp.
    let drift = 1.0 - x.iter().sum::<f64>();
    let k = argmax(&x);
    x[k] = (x[k] + drift).clamp(lo, hi);

    let sol = certify(x, y, g, eta, gamma, lambda, iterations);
    if sol.sum_residual > PROX_SUM_TOL * 10.0 {
        return Err(Error::ProxNonConvergence {
            iterations,
            residual: sol.sum_residual,
        });
    }
    Ok(sol)
}

fn argmax(x: &[f64]) -> usize {
    let mut k = 0;
    for (a, &v) in x.iter().enumerate() {
        if v > x[k] {
            k = a;
        }
    }
    k
}

fn certify(
    x: Vec<f64>,
    y: &[f64],
    g: &[f64],
    eta: f64,
    gamma: f64,
    lambda: f64,
    iterations: usize,
) -> ProxSolution {
    let kkt_residual = kkt_residual(&x, y, g, eta, gamma, lambda);
    let sum_residual = (x.iter().sum::<f64>() - 1.0).abs();
    ProxSolution {
        x,
        lambda,
        sum_residual,
        kkt_residual,
        iterations,
    }
}

/// `max_a |x(a) - clamp(1/(eta g(a) + 1/y(a) + lambda), gamma, 1 - (d-1) gamma)|`.
pub fn kkt_residual(x: &[f64], y: &[f64], g: &[f64], eta: f64, gamma: f64, lambda: f64) -> f64 {
    let hi = 1.0 - (x.len() - 1) as f64 * gamma;
    x.iter()
        .zip(y.iter().zip(g))
        .map(|(&xa, (&ya, &ga))| (xa - coord(eta * ga + 1.0 / ya, lambda, gamma, hi)).abs())
        .fold(0.0, f64::max)
}

/// `eta <g, x> + D_R(x, y)`.
pub fn prox_objective(x: &[f64], y: &[f64], g: &[f64], eta: f64) -> f64 {
    eta * super::simplex::dot(g, x) + log_barrier_divergence(x, y)
}
