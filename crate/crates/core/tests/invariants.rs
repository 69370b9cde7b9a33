mod common;

use common::*;
use posr_core::learner::{bregman_prox, power_iteration, posr_init, solve_stationary, stationary_residual};
use posr_core::metrics::{checkpoint_schedule, swap_regret_exact, external_regret_exact};
use posr_core::{path_lengths, Layout, PolicyProfile};
use proptest::prelude::*;

fn point(d: usize, gamma: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(move |w| {
        let s: f64 = w.iter().sum();
        let free = 1.0 - d as f64 * gamma;
        w.iter().map(|v| gamma + free * v / s).collect()
    })
}

fn prox_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64, f64)> {
    (2usize..=4, 0.0f64..1.0).prop_flat_map(|(d, u)| {
        let gamma = 1e-4 + u * (0.5 / d as f64 - 1e-4);
        (
            point(d, gamma),
            prop::collection::vec(-5.0f64..5.0, d),
            1e-3f64..2.0,
            Just(gamma),
        )
    })
}

proptest! {
    #[test]
    fn prox_stays_in_truncated_simplex((y, g, eta, gamma) in prox_case()) {
        let sol = bregman_prox(&y, &g, eta, gamma).unwrap();
        prop_assert!(sol.residual() <= 1e-10);
        prop_assert!(sol.x.iter().all(|&v| v >= gamma - 1e-12));
        prop_assert!((sol.x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn prox_fixes_point_under_constant_loss((y, g, eta, gamma) in prox_case()) {
        let c = vec![g[0]; y.len()];
        let x = bregman_prox(&y, &c, eta, gamma).unwrap().x;
        prop_assert!(l1(&x, &y) <= 1e-9);
    }

    #[test]
    fn stationary_solution_is_fixed_and_truncated(
        rows in (2usize..=4, 0.0f64..1.0).prop_flat_map(|(d, u)| {
            let gamma = 1e-4 + u * (0.5 / d as f64 - 1e-4);
            (prop::collection::vec(point(d, gamma), d), Just(gamma))
        })
    ) {
        let (rows, gamma) = rows;
        let sol = solve_stationary(&rows).unwrap();
        prop_assert!(stationary_residual(&rows, &sol.pi) <= 1e-10);
        prop_assert!(sol.pi.iter().all(|&v| v >= gamma - 1e-12));
        let pw = power_iteration(&rows, 1e-14, 100_000);
        prop_assert!(l1(&pw, &sol.pi) <= 1e-9);
    }

    #[test]
    fn posr_policies_stay_valid(seed in any::<u64>(), actions in 2usize..=4) {
        let mut r = rng(seed);
        let layout = Layout::uniform(3, 2).unwrap();
        let gamma = 0.5 / actions as f64 * 0.5;
        let mut agent = posr_init(0, &layout, actions, gamma, 0.05).unwrap();
        for _ in 0..20 {
            let q: Vec<Vec<f64>> = (0..layout.num_states())
                .map(|s| if layout.is_terminal(s) { Vec::new() } else { (0..actions).map(|_| 3.0 * simplex(&mut r, 1)[0] * rand::Rng::random::<f64>(&mut r)).collect() })
                .collect();
            agent.update(&q).unwrap();
            for s in layout.decision_states() {
                let row = agent.policy.row(s);
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                prop_assert!(row.iter().all(|&v| v >= gamma - 1e-10));
            }
        }
    }

    #[test]
    fn swap_regret_dominates_external(seed in any::<u64>(), rounds in 1usize..12) {
        let mut r = rng(seed);
        let game = random_game(&mut r, 2, 2, 2, 2);
        let profiles: Vec<PolicyProfile> = (0..rounds).map(|_| random_profile(&mut r, &game)).collect();
        for i in 0..2 {
            let swap = swap_regret_exact(&game, &profiles, i).unwrap().0;
            let ext = external_regret_exact(&game, &profiles, i).unwrap().0;
            prop_assert!(swap >= ext - 1e-10);
            prop_assert!(swap >= -1e-10);
        }
    }

    #[test]
    fn path_lengths_are_nonnegative(seed in any::<u64>(), rounds in 1usize..8) {
        let mut r = rng(seed);
        let game = random_game(&mut r, 2, 2, 2, 2);
        let profiles: Vec<PolicyProfile> = (0..rounds).map(|_| random_profile(&mut r, &game)).collect();
        let p = path_lengths(&profiles);
        for i in 0..2 {
            prop_assert!(p.first_order[i] >= 0.0 && p.second_order[i] >= 0.0);
            prop_assert!(p.second_order[i] <= p.first_order[i] * 2.0 + 1e-12);
        }
        let same = path_lengths(&vec![profiles[0].clone(); rounds + 1]);
        prop_assert_eq!(same.total_first(), 0.0);
    }

    #[test]
    fn checkpoint_schedule_shape(rounds in 1usize..100_000, count in 1usize..64) {
        let c = checkpoint_schedule(rounds, count);
        prop_assert_eq!(c.len(), count.min(rounds));
        prop_assert_eq!(*c.last().unwrap(), rounds);
        prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(c[0] >= 1);
    }
}
