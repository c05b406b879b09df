use slowdown::cli::validate::max_relative_difference;
use slowdown::model::ModelParams;
use slowdown::sim_oracle::truncated_generator_solve;
use slowdown::solver::{marginal_total, solve_stationary, MmsQueue};
use slowdown::variants::{
    find_modes, solve_abandonment, solve_abandonment_truncated, solve_finite_buffer,
    solve_finite_buffer_with_tail, AbandonmentParams, FiniteBufferParams, ModelVariant,
};

#[test]
fn finite_buffer_matches_direct_solve() {
    for (s, cap, rf, rs) in [(1, 1, 0.5, 1.3), (3, 10, 0.6, 0.95), (5, 12, 0.9, 1.4), (8, 30, 0.7, 1.05)] {
        let p = ModelParams::from_loads(s, s as f64, rf, rs).unwrap();
        let variant = ModelVariant::FiniteBuffer { capacity: cap };
        let exact = solve_finite_buffer(&FiniteBufferParams::new(p, cap).unwrap()).unwrap();
        let oracle = truncated_generator_solve(&p, variant, 1e-13).unwrap();
        assert_eq!(exact.max_level(), Some(cap));
        let d = max_relative_difference(&exact, &oracle.distribution, cap, 1e-250);
        assert!(d < 1e-10, "s={s} N={cap}: {d:e}");
    }
}

#[test]
fn finite_buffer_rates_reproduce_levels() {
    let p = ModelParams::from_loads(4, 4.0, 0.7, 1.1).unwrap();
    let (dist, tail) = solve_finite_buffer_with_tail(&FiniteBufferParams::new(p, 20).unwrap()).unwrap();
    assert_eq!(tail.rates.len(), 16);
    for (k, level) in tail.levels().iter().enumerate() {
        let direct = dist.level(5 + k);
        for (a, b) in level.iter().zip(&direct) {
            assert!((a - b).abs() <= 1e-15 * b.abs().max(1e-300));
        }
    }
    assert!((dist.total_mass() - 1.0).abs() < 1e-13);
}

#[test]
fn large_buffer_approaches_infinite_model() {
    let p = ModelParams::from_loads(5, 5.0, 0.6, 0.9).unwrap();
    let finite = solve_finite_buffer(&FiniteBufferParams::new(p, 400).unwrap()).unwrap();
    let infinite = solve_stationary(&p).unwrap();
    assert!((finite.p_wait() - infinite.p_wait()).abs() < 1e-12);
}

#[test]
fn capacity_below_servers_is_rejected() {
    let p = ModelParams::from_loads(5, 5.0, 0.6, 0.9).unwrap();
    assert!(FiniteBufferParams::new(p, 4).is_err());
}

#[test]
fn abandonment_matches_direct_solve() {
    let p = ModelParams::from_loads(3, 2.4, 0.5, 0.8).unwrap();
    let sol = solve_abandonment(&AbandonmentParams::new(p, 0.5).unwrap()).unwrap();
    let oracle = truncated_generator_solve(&p, ModelVariant::Abandonment { delta: 0.5 }, 1e-13).unwrap();
    let d = max_relative_difference(&sol.distribution, &oracle.distribution, 40, 1e-250);
    assert!(d < 1e-9, "{d:e}");
}

#[test]
fn abandonment_overloaded_matches_direct_solve() {
    let p = ModelParams::from_loads(6, 6.0, 0.7, 1.5).unwrap();
    let sol = solve_abandonment(&AbandonmentParams::new(p, 0.3).unwrap()).unwrap();
    let oracle = truncated_generator_solve(&p, ModelVariant::Abandonment { delta: 0.3 }, 1e-13).unwrap();
    let d = max_relative_difference(&sol.distribution, &oracle.distribution, 80, 1e-250);
    assert!(d < 1e-9, "{d:e}");
}

#[test]
fn vanishing_abandonment_recovers_base_model() {
    let p = ModelParams::from_loads(5, 5.0, 0.6, 0.85).unwrap();
    let base = solve_stationary(&p).unwrap().p_wait();
    let sol = solve_abandonment(&AbandonmentParams::new(p, 1e-4).unwrap()).unwrap();
    assert!((sol.distribution.p_wait() - base).abs() < 1e-3);
}

#[test]
fn instant_abandonment_truncates_queue() {
    let p = ModelParams::from_loads(4, 4.0, 0.7, 0.9).unwrap();
    let delta = 1e3 * p.mu_slow();
    let sol = solve_abandonment(&AbandonmentParams::new(p, delta).unwrap()).unwrap();
    let m = marginal_total(&sol.distribution, sol.truncation_level);
    let beyond: f64 = m.probabilities[6..].iter().sum::<f64>() + m.tail_mass;
    assert!(beyond <= 1e-3 * m.probabilities[4]);
}

#[test]
fn abandonment_tail_decays_superexponentially() {
    let p = ModelParams::from_loads(4, 4.0, 0.7, 1.3).unwrap();
    let (dist, _) = solve_abandonment_truncated(&AbandonmentParams::new(p, 0.2).unwrap(), 400).unwrap();
    let mass: Vec<f64> = (20..120).map(|l| dist.level(4 + l).iter().sum()).collect();
    let ratios: Vec<f64> = mass.windows(2).map(|w| w[1] / w[0]).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    assert!(ratios.last().unwrap() < &0.3);
}

#[test]
fn erlang_marginal_is_unimodal() {
    let p = ModelParams::from_loads(10, 7.0, 0.7, 0.8).unwrap();
    let mms = MmsQueue::fast(&p).unwrap();
    let pmf = mms.pmf(200);
    let tail = 1.0 - pmf.iter().sum::<f64>();
    let m = slowdown::solver::MarginalDistribution { probabilities: pmf, tail_mass: tail };
    assert_eq!(find_modes(&m).len(), 1);
}

#[test]
fn bistable_configurations() {
    let p = ModelParams::from_loads(81, 81.0, 0.8, 1.08).unwrap();
    let fb = solve_finite_buffer(&FiniteBufferParams::new(p, 93).unwrap()).unwrap();
    let modes: Vec<usize> = find_modes(&marginal_total(&fb, 93)).iter().map(|m| m.0).collect();
    assert_eq!(modes.len(), 2);
    assert!(modes[0] < 81 && modes[1] == 93);

    let p = ModelParams::from_loads(36, 36.0, 0.7, 1.2).unwrap();
    let sol = solve_abandonment(&AbandonmentParams::new(p, p.mu_slow() / 4.0).unwrap()).unwrap();
    let m = marginal_total(&sol.distribution, sol.truncation_level);
    let modes: Vec<usize> = find_modes(&m).iter().map(|m| m.0).collect();
    assert_eq!(modes.len(), 2);
    assert!(modes[0] < 36 && modes[1] > 36);
}
