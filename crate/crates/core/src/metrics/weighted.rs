use crate::learner::{dot, log_barrier_divergence};

/// `sum_t q_t <x_t - x*, l_t>`.
pub fn weighted_regret(iterates: &[Vec<f64>], losses: &[Vec<f64>], weights: &[f64], comparator: &[f64]) -> f64 {
    iterates
        .iter()
        .zip(losses)
        .zip(weights)
        .map(|((x, l), q)| q * (dot(x, l) - dot(comparator, l)))
        .sum()
}

/// Right-hand side of the weighted OOMD regret bound for the log-barrier,
/// with the L-infinity norm as dual norm:
/// `q_1 D(x*, x~_0)/eta + sum_t (q_{t+1} - q_t) D(x*, x~_t)/eta + eta/2 sum_t q_t ||l_t - l~_t||_inf^2`,
/// where `q_{T+1} = 0`.
///
/// `intermediates` holds `x~_0, ..., x~_T` and `hints` holds `l~_1, ..., l~_T`.
pub fn weighted_oomd_rhs(
    eta: f64,
    weights: &[f64],
    comparator: &[f64],
    intermediates: &[Vec<f64>],
    losses: &[Vec<f64>],
    hints: &[Vec<f64>],
) -> f64 {
    let t_len = weights.len();
    assert_eq!(intermediates.len(), t_len + 1);
    if t_len == 0 {
        return 0.0;
    }
    let div = |t: usize| log_barrier_divergence(comparator, &intermediates[t]);
    let mut rhs = weights[0] * div(0) / eta;
    for t in 0..t_len {
        let next = weights.get(t + 1).copied().unwrap_or(0.0);
        rhs += (next - weights[t]) * div(t + 1) / eta;
        let dev = losses[t]
            .iter()
            .zip(&hints[t])
            .fold(0.0f64, |m, (l, h)| m.max((l - h).abs()));
        rhs += eta / 2.0 * weights[t] * dev * dev;
    }
    rhs
}
