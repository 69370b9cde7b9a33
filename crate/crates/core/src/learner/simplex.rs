/// Bregman divergence of the log-barrier `R(x) = sum_a -log x(a)`:
/// `D(x, y) = sum_a log(y(a)/x(a)) + (x(a) - y(a))/y(a)`.
pub fn log_barrier_divergence(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xa, &ya)| (ya / xa).ln() + (xa - ya) / ya)
        .sum()
}

/// Local norms at `x`: primal `sqrt(sum v^2/x^2)` and dual `sqrt(sum v^2 x^2)`.
pub fn local_norms(v: &[f64], x: &[f64]) -> (f64, f64) {
    let (mut p, mut d) = (0.0, 0.0);
    for (&va, &xa) in v.iter().zip(x) {
        p += (va / xa).powi(2);
        d += (va * xa).powi(2);
    }
    (p.sqrt(), d.sqrt())
}

pub fn local_norm(v: &[f64], x: &[f64]) -> f64 {
    local_norms(v, x).0
}

pub fn dual_local_norm(v: &[f64], x: &[f64]) -> f64 {
    local_norms(v, x).1
}

/// Largest violation of membership in the gamma-truncated simplex:
/// `max(|sum x - 1|, max_a (gamma - x(a))^+)`.
pub fn truncation_violation(x: &[f64], gamma: f64) -> f64 {
    let sum: f64 = x.iter().sum();
    x.iter()
        .map(|&v| (gamma - v).max(0.0))
        .fold((sum - 1.0).abs(), f64::max)
}

pub fn is_truncated(x: &[f64], gamma: f64, tol: f64) -> bool {
    x.iter().all(|v| v.is_finite()) && truncation_violation(x, gamma) <= tol
}

pub fn uniform(d: usize) -> Vec<f64> {
    vec![1.0 / d as f64; d]
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_of_point_to_itself() {
        let x = [0.2, 0.3, 0.5];
        assert_eq!(log_barrier_divergence(&x, &x), 0.0);
    }

    #[test]
    fn divergence_hand_value() {
        let x = [0.5, 0.5];
        let y = [0.25, 0.75];
        let want = (0.25f64 / 0.5).ln() + (0.75f64 / 0.5).ln() + (0.5 - 0.25) / 0.25
            + (0.5 - 0.75) / 0.75;
        assert!((log_barrier_divergence(&x, &y) - want).abs() < 1e-15);
        assert!(want > 0.0);
    }

    #[test]
    fn norms_hand_values() {
        assert_eq!(local_norms(&[0.0, 0.0], &[0.5, 0.5]), (0.0, 0.0));
        assert_eq!(local_norms(&[1.0, 0.0], &[0.5, 0.5]), (2.0, 0.5));
        let v = [0.3, -1.2, 0.4, 2.0];
        let l2 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (p, d) = local_norms(&v, &uniform(4));
        assert!((p - 4.0 * l2).abs() < 1e-12);
        assert!((d - l2 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_checks() {
        assert!(is_truncated(&[0.1, 0.9], 0.1, 1e-12));
        assert!(!is_truncated(&[0.05, 0.95], 0.1, 1e-12));
        assert!(!is_truncated(&[0.3, 0.6], 0.1, 1e-12));
    }
}
