use proptest::prelude::*;
use slowdown::model::{GeneratorBlocks, ModelParams};
use slowdown::rate_matrices::{r_residual, RateMatrices};
use slowdown::boundary::{EscapeTable, LevelPassage, UpPassage};
use slowdown::solver::{marginal_total, solve_stationary};
use slowdown::variants::{find_modes, MODE_PROMINENCE};
use slowdown::solver::MarginalDistribution;

fn params() -> impl Strategy<Value = ModelParams> {
    (1usize..=12, 0.05f64..0.98, 0.01f64..1.0, 0.2f64..5.0).prop_map(|(s, rf, frac, lam_per)| {
        let rs = rf + (0.999 - rf) * frac;
        ModelParams::from_loads(s, lam_per * s as f64, rf, rs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distribution_is_a_probability(p in params()) {
        let d = solve_stationary(&p).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() < 1e-12);
        for level in d.levels().take(p.servers() + 30) {
            prop_assert!(level.iter().all(|&v| v >= 0.0 && v.is_finite()));
        }
        prop_assert!((0.0..=1.0).contains(&d.p_wait()));
    }

    #[test]
    fn rate_matrices_solve_their_equations(p in params()) {
        let blocks = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &blocks).unwrap();
        prop_assert!(r_residual(&blocks, rm.r.as_matrix()) < 1e-12);
        prop_assert!(rm.spectral_radius() < 1.0);
        for sum in rm.g.as_matrix().row_sums() {
            prop_assert!((sum - 1.0).abs() < 1e-10);
        }
        prop_assert!(rm.g.as_matrix().max_abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn upward_passage_rows_are_distributions(p in params()) {
        let s = p.servers();
        let u = LevelPassage::compute(&p, &EscapeTable::compute(&p));
        for k in 1..=s {
            for j in 0..k {
                let row: Vec<f64> = (1..=k).map(|l| u.from_below(k, l, j)).collect();
                prop_assert!(row.iter().all(|&v| v >= 0.0));
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                prop_assert!(row[..j].iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn marginal_mean_matches_distribution(p in params()) {
        let d = solve_stationary(&p).unwrap();
        // rho_slow <= 0.999, so 0.999^40000 leaves nothing beyond the cut
        let m = marginal_total(&d, p.servers() + 40_000);
        let direct = d.mean_queue() + d.mean_busy();
        prop_assert!((m.mean() - direct).abs() <= 1e-6 * direct.max(1.0));
    }

    #[test]
    fn modes_are_local_maxima(probs in prop::collection::vec(0.0f64..1.0, 1..60)) {
        let total: f64 = probs.iter().sum();
        prop_assume!(total > 0.0);
        let m = MarginalDistribution {
            probabilities: probs.iter().map(|v| v / total).collect(),
            tail_mass: 0.0,
        };
        let modes = find_modes(&m);
        let q = &m.probabilities;
        prop_assert!(!modes.is_empty());
        for &(i, v) in &modes {
            prop_assert_eq!(v, q[i]);
            prop_assert!(i == 0 || q[i - 1] <= v);
            prop_assert!(i + 1 == q.len() || q[i + 1] <= v * (1.0 + 2.0 * MODE_PROMINENCE));
        }
        let global = q.iter().cloned().fold(0.0, f64::max);
        prop_assert!(modes.iter().any(|&(_, v)| v >= global * (1.0 - 2.0 * MODE_PROMINENCE)));
    }
}
