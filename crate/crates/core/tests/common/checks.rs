//! Randomised inequality and identity checks. Each returns a [`Tally`] so the
//! plain tests can assert on it and the acceptance harness can report it.

use posr_core::learner::{dual_local_norm, local_norm, oomd_step, posr_init, BaseState};
use posr_core::metrics::rvu_base_bound;
use posr_core::{evaluate, occupancy, InducedMdp, Layout};
use rand::Rng;

use super::*;

#[derive(Clone, Copy, Debug, Default)]
pub struct Tally {
    pub instances: usize,
    pub violations: usize,
    /// Largest identity error, or largest bound excess (negative if all hold).
    pub worst: f64,
}

impl Tally {
    fn new() -> Self {
        Tally {
            instances: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    /// Records `lhs <= rhs + tol`.
    fn le(&mut self, lhs: f64, rhs: f64, tol: f64) {
        self.worst = self.worst.max(lhs - rhs);
        if lhs > rhs + tol {
            self.violations += 1;
        }
    }

    /// Records `|a - b| <= tol`.
    fn eq(&mut self, a: f64, b: f64, tol: f64) {
        let e = (a - b).abs();
        self.worst = self.worst.max(e);
        if e > tol {
            self.violations += 1;
        }
    }

    pub fn ok(&self) -> bool {
        self.violations == 0 && self.instances > 0
    }
}

fn kernel_inf1(a: &InducedMdp, b: &InducedMdp) -> f64 {
    a.kernel_distance_inf1(b)
}

fn loss_inf(a: &InducedMdp, b: &InducedMdp) -> f64 {
    a.loss_distance_inf(b)
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `V^p(s1) - V^q(s1) = sum_s occ^q(s) <Q^p(s,.), p(.|s) - q(.|s)>` and its
/// `H^2 ||p - q||_{inf,1}` bound.
pub fn value_difference(n: usize, seed: u64) -> (Tally, Tally) {
    let mut r = rng(seed);
    let (mut identity, mut bound) = (Tally::new(), Tally::new());
    for k in 0..n {
        let h = 2 + k % 3;
        let mdp = random_mdp(&mut r, h, 1 + k % 3, 2 + k % 3);
        let layout = mdp.layout();
        let p = random_policy(&mut r, layout, mdp.num_actions());
        let q = random_policy(&mut r, layout, mdp.num_actions());
        let vp = evaluate(&mdp, &p);
        let vq = evaluate(&mdp, &q);
        let occ = occupancy(&mdp, &q);
        let rhs: f64 = layout
            .decision_states()
            .map(|s| {
                let diff: Vec<f64> = p.row(s).iter().zip(q.row(s)).map(|(a, b)| a - b).collect();
                occ.q[s] * inner(&vp.q[s], &diff)
            })
            .sum();
        let lhs = vp.v[layout.initial()] - vq.v[layout.initial()];
        identity.eq(lhs, rhs, 1e-9);
        bound.le(lhs.abs(), (h * h) as f64 * policy_inf1(layout, &p, &q), 1e-12);
        identity.instances += 1;
        bound.instances += 1;
    }
    (identity, bound)
}

/// `|V^p(s1; M) - V^p(s1; M')| <= H ||l - l'||_inf + H^2 ||P - P'||_{inf,1}`.
pub fn dynamics_difference(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let h = 2 + k % 3;
        let m = random_mdp(&mut r, h, 1 + k % 3, 2 + k % 2);
        let scale = r.random::<f64>();
        let m2 = perturbed_mdp(&mut r, &m, scale);
        let p = random_policy(&mut r, m.layout(), m.num_actions());
        let lhs = (m.initial_value(&p) - m2.initial_value(&p)).abs();
        let hf = h as f64;
        t.le(lhs, hf * loss_inf(&m, &m2) + hf * hf * kernel_inf1(&m, &m2), 1e-12);
        t.instances += 1;
    }
    t
}

/// `Q^p(s,a; M) - Q^q(s,a; M') <= H^2 ||p - q|| + (H^2 + 1) ||P - P'|| + (H + 1) ||l - l'||`.
pub fn action_value_difference(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let h = 2 + k % 3;
        let m = random_mdp(&mut r, h, 1 + k % 3, 2 + k % 2);
        let scale = r.random::<f64>();
        let m2 = perturbed_mdp(&mut r, &m, scale);
        let layout = m.layout();
        let p = random_policy(&mut r, layout, m.num_actions());
        let q = random_policy(&mut r, layout, m.num_actions());
        let (qp, qq) = (evaluate(&m, &p).q, evaluate(&m2, &q).q);
        let hf = h as f64;
        let rhs = hf * hf * policy_inf1(layout, &p, &q)
            + (hf * hf + 1.0) * kernel_inf1(&m, &m2)
            + (hf + 1.0) * loss_inf(&m, &m2);
        for s in layout.decision_states() {
            for a in 0..m.num_actions() {
                t.le(qp[s][a] - qq[s][a], rhs, 1e-12);
            }
        }
        t.instances += 1;
    }
    t
}

/// Induced kernel and loss of player `i` move by at most the other players'
/// per-state policy change.
pub fn induced_variation(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let players = 2 + k % 3;
        let game = random_game(&mut r, players, 2 + k % 2, 2, 2);
        let p = random_profile(&mut r, &game);
        let q = random_profile(&mut r, &game);
        for i in 0..players {
            let (mp, mq) = (game.induce_mdp(&p, i).unwrap(), game.induce_mdp(&q, i).unwrap());
            for s in game.layout().decision_states() {
                let budget: f64 = (0..players)
                    .filter(|&j| j != i)
                    .map(|j| l1(p.player(j).row(s), q.player(j).row(s)))
                    .sum();
                for a in 0..game.action_counts()[i] {
                    t.le(l1(mp.kernel_row(s, a), mq.kernel_row(s, a)), budget, 1e-12);
                    t.le((mp.loss(s, a) - mq.loss(s, a)).abs(), budget, 1e-12);
                }
            }
        }
        t.instances += 1;
    }
    t
}

/// `||occ_P^p - occ_P'^p||_1 <= H^2 ||P - P'||_{inf,1}`.
pub fn occupancy_variation(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let h = 2 + k % 3;
        let m = random_mdp(&mut r, h, 1 + k % 3, 2 + k % 2);
        let scale = r.random::<f64>();
        let m2 = perturbed_mdp(&mut r, &m, scale);
        let p = random_policy(&mut r, m.layout(), m.num_actions());
        let (a, b) = (occupancy(&m, &p), occupancy(&m2, &p));
        let lhs: f64 = m.layout().decision_states().map(|s| (a.q[s] - b.q[s]).abs()).sum();
        t.le(lhs, (h * h) as f64 * kernel_inf1(&m, &m2), 1e-12);
        t.instances += 1;
    }
    t
}

fn product(factors: &[Vec<f64>]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, f| {
        acc.iter().flat_map(|&x| f.iter().map(move |&y| x * y)).collect()
    })
}

/// `||prod p_i - prod q_i||_1 <= sum_i ||p_i - q_i||_1` with up to four factors.
pub fn product_l1(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let m = 1 + k % 4;
        let dims: Vec<usize> = (0..m).map(|_| r.random_range(2..=4)).collect();
        let p: Vec<Vec<f64>> = dims.iter().map(|&d| simplex(&mut r, d)).collect();
        let q: Vec<Vec<f64>> = dims.iter().map(|&d| simplex(&mut r, d)).collect();
        let rhs: f64 = p.iter().zip(&q).map(|(a, b)| l1(a, b)).sum();
        t.le(l1(&product(&p), &product(&q)), rhs, 1e-12);
        t.instances += 1;
    }
    t
}

/// Before each update, `<pi(.|s), Q(s,.)> = sum_a <x^{s,a}, pi(a|s) Q(s,.)>`.
pub fn combined_policy_identity(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let actions = 2 + k % 3;
        let layout = Layout::uniform(2 + k % 2, 2).unwrap();
        let h = layout.horizon() as f64;
        let gamma = r.random_range(0.01..=0.5 / actions as f64);
        let eta = r.random_range(0.001..=1.0 / (8.0 * h));
        let mut agent = posr_init(0, &layout, actions, gamma, eta).unwrap();
        for _ in 0..10 {
            let q: Vec<Vec<f64>> = (0..layout.num_states())
                .map(|s| {
                    if layout.is_terminal(s) {
                        Vec::new()
                    } else {
                        (0..actions).map(|_| h * r.random::<f64>()).collect()
                    }
                })
                .collect();
            for s in layout.decision_states() {
                let pi = agent.policy.row(s);
                let lhs = inner(pi, &q[s]);
                let rhs: f64 = agent
                    .base_matrix(s)
                    .iter()
                    .enumerate()
                    .map(|(a, x)| pi[a] * inner(x, &q[s]))
                    .sum();
                t.eq(lhs, rhs, 1e-10);
            }
            agent.update(&q).unwrap();
        }
        t.instances += 1;
    }
    t
}

fn random_losses(r: &mut impl Rng, rounds: usize, d: usize, max: f64) -> Vec<Vec<f64>> {
    // mix smooth and adversarial sequences
    let drift = r.random::<bool>();
    let mut g: Vec<f64> = (0..d).map(|_| max * r.random::<f64>()).collect();
    (0..rounds)
        .map(|_| {
            if drift {
                for v in g.iter_mut() {
                    *v = (*v + 0.1 * max * (r.random::<f64>() - 0.5)).clamp(0.0, max);
                }
            } else {
                g = (0..d).map(|_| max * r.random::<f64>()).collect();
            }
            g.clone()
        })
        .collect()
}

/// `|x_{t+1}(a) / x_t(a) - 1| <= 32 eta (||g_t||_inf + ||g_{t-1}||_inf)` with `eta <= 1/(64 H)`.
pub fn oomd_ratio(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let d = 2 + k % 3;
        let h = (1 + k % 4) as f64;
        let eta = r.random_range(1e-4..=1.0 / (64.0 * h));
        let gamma = r.random_range(1e-3..=0.5 / d as f64);
        let losses = random_losses(&mut r, 200, d, h);
        let mut base = BaseState::uniform(d);
        let mut prev_norm = 0.0;
        for g in &losses {
            let next = oomd_step(&base, g, eta, gamma).unwrap();
            let norm = g.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let cap = 32.0 * eta * (norm + prev_norm);
            for (a, b) in base.x.iter().zip(&next.x) {
                t.le((b / a - 1.0).abs(), cap, 1e-12);
            }
            prev_norm = norm;
            base = next;
        }
        t.instances += 1;
    }
    t
}

/// Realised regret of one OOMD learner against the best point of the
/// truncated simplex is at most the local-norm RVU bound.
pub fn rvu(n: usize, seed: u64) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::new();
    for k in 0..n {
        let d = 2 + k % 3;
        let h = (1 + k % 4) as f64;
        let eta = r.random_range(1e-3..=1.0 / (64.0 * h));
        let gamma = r.random_range(1e-3..=0.5 / d as f64);
        let rounds = 50 + 50 * (k % 4);
        let losses = random_losses(&mut r, rounds, d, h);
        let mut base = BaseState::uniform(d);
        let mut prev_x = base.x.clone();
        let mut prev_g = vec![0.0; d];
        let (mut played, mut variation, mut path) = (0.0, 0.0, 0.0);
        let mut total = vec![0.0; d];
        for g in &losses {
            let x = base.x.clone();
            played += inner(&x, g);
            let dg: Vec<f64> = g.iter().zip(&prev_g).map(|(a, b)| a - b).collect();
            variation += dual_local_norm(&dg, &x).powi(2);
            let dx: Vec<f64> = x.iter().zip(&prev_x).map(|(a, b)| a - b).collect();
            path += local_norm(&dx, &x).powi(2);
            for (tt, v) in total.iter_mut().zip(g) {
                *tt += v;
            }
            base = oomd_step(&base, g, eta, gamma).unwrap();
            prev_x = x;
            prev_g = g.clone();
        }
        let best = total.iter().cloned().fold(f64::INFINITY, f64::min);
        let comparator = gamma * total.iter().sum::<f64>() + (1.0 - d as f64 * gamma) * best;
        let bound = rvu_base_bound(d, eta, gamma, h, variation, path);
        assert!(bound.precondition.is_none());
        t.le(played - comparator, bound.value, 1e-9);
        t.instances += 1;
    }
    t
}
