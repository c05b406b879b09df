//! Invariant checks behind `slowdown validate`.

use crate::boundary::{PsiTable, StationaryDistribution, ThetaTable, UpPassage};
use crate::error::Result;
use crate::model::{GeneratorBlocks, ModelParams};
use crate::qed::{qed_convergence_table, QedParams};
use crate::rate_matrices::{r_residual, RateMatrices};
use crate::sim_oracle::{simulate_coupled_seeds, truncated_generator_solve, TruncatedChain};
use crate::solver::{erlang_c, solve_stationary, MmsQueue};
use crate::variants::{
    solve_abandonment, solve_finite_buffer, AbandonmentParams, FiniteBufferParams, ModelVariant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> CheckResult {
    match outcome {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Largest relative per-state difference over levels `0..=i_max`, ignoring
/// states whose reference mass is below `floor`.
pub fn max_relative_difference(
    a: &StationaryDistribution,
    b: &StationaryDistribution,
    i_max: usize,
    floor: f64,
) -> f64 {
    let s = a.servers();
    let mut worst: f64 = 0.0;
    for i in 0..=i_max {
        for j in 0..=i.min(s) {
            let (x, y) = (a.prob(i, j), b.prob(i, j));
            if y > floor {
                worst = worst.max((x - y).abs() / y);
            }
        }
    }
    worst
}

fn residuals(servers: &[usize]) -> Result<(bool, String)> {
    let mut worst_r: f64 = 0.0;
    let mut worst_g: f64 = 0.0;
    for &s in servers {
        let p = ModelParams::from_loads(s, s as f64, 0.7, 0.98)?;
        let blocks = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &blocks)?;
        worst_r = worst_r.max(r_residual(&blocks, rm.r.as_matrix()));
        for sum in rm.g.as_matrix().row_sums() {
            worst_g = worst_g.max((sum - 1.0).abs());
        }
    }
    Ok((
        worst_r <= 1e-12 && worst_g <= 1e-10,
        format!("R residual {worst_r:.2e}, G row-sum error {worst_g:.2e}"),
    ))
}

fn first_passage_sums(s: usize) -> Result<(bool, String)> {
    let p = ModelParams::from_loads(s, s as f64 * 0.8, 0.6, 0.9)?;
    let theta = ThetaTable::compute(&p);
    let mut worst: f64 = 0.0;
    for i in 0..s {
        for j in 0..=i {
            let total: f64 = (0..=i - j).map(|k| theta.get(k, i, j)).sum();
            worst = worst.max((total - 1.0).abs());
        }
    }
    let psi = PsiTable::compute(&theta);
    let m = psi.level_s_matrix();
    for j in 0..s {
        worst = worst.max((m.row(j).iter().sum::<f64>() - 1.0).abs());
    }
    let expected = (s * (s + 1) * (s + 2) * (s + 3) / 24) as u64;
    Ok((
        worst <= 1e-10 && psi.evaluations() == expected,
        format!("max |sum - 1| = {worst:.2e}, {} psi evaluations", psi.evaluations()),
    ))
}

fn oracle_equivalence(servers: &[usize]) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for &s in servers {
        for &(rf, rs) in &[(0.5, 0.8), (0.7, 0.95)] {
            let p = ModelParams::from_loads(s, s as f64, rf, rs)?;
            let exact = solve_stationary(&p)?;
            let oracle = truncated_generator_solve(&p, ModelVariant::Base, 1e-13)?;
            worst = worst.max(max_relative_difference(&exact, &oracle.distribution, s + 40, 1e-200));
        }
    }
    Ok((worst <= 1e-9, format!("max relative difference {worst:.2e}")))
}

fn finite_buffer_balance() -> Result<(bool, String)> {
    let p = ModelParams::from_loads(6, 6.0, 0.8, 1.05)?;
    let dist = solve_finite_buffer(&FiniteBufferParams::new(p, 20)?)?;
    let chain = TruncatedChain::build(&p, ModelVariant::FiniteBuffer { capacity: 20 }, 20)?;
    let levels: Vec<Vec<f64>> = (0..=20).map(|i| dist.level(i)).collect();
    let res = chain.balance_residual(&levels);
    Ok((res <= 1e-9, format!("global balance residual {res:.2e}")))
}

fn abandonment_oracle() -> Result<(bool, String)> {
    let p = ModelParams::from_loads(3, 3.0, 0.5, 0.8)?;
    let sol = solve_abandonment(&AbandonmentParams::new(p, 0.5)?)?;
    let oracle = truncated_generator_solve(&p, ModelVariant::Abandonment { delta: 0.5 }, 1e-13)?;
    let diff = max_relative_difference(&sol.distribution, &oracle.distribution, 40, 1e-200);
    Ok((diff <= 1e-9, format!("max relative difference {diff:.2e}")))
}

fn reduction() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for &(s, rho) in &[(1usize, 0.5), (4, 0.8), (10, 0.9)] {
        let mu = 1.0;
        let lambda = rho * s as f64 * mu;
        let p = ModelParams::new(s, lambda, mu * (1.0 + 1e-9), mu)?;
        let d = solve_stationary(&p)?;
        let mms = MmsQueue::new(s, lambda, mu)?;
        worst = worst
            .max((d.p_wait() - erlang_c(s, lambda / mu)?).abs() / mms.p_wait())
            .max((d.mean_queue() - mms.mean_queue()).abs() / mms.mean_queue());
    }
    Ok((worst <= 1e-6, format!("max relative difference {worst:.2e}")))
}

fn coupling(seeds: u64, customers: usize) -> Result<(bool, String)> {
    let p = ModelParams::from_loads(5, 5.0, 0.7, 0.95)?;
    let seeds: Vec<u64> = (0..seeds).collect();
    let r = simulate_coupled_seeds(p, customers, &seeds)?;
    Ok((
        r.total_violations() == 0,
        format!("{} customers, {} violations", r.customers_checked, r.total_violations()),
    ))
}

fn qed_sandwich(servers: &[usize]) -> Result<(bool, String)> {
    let rows = qed_convergence_table(&QedParams::new(0.5, 0.5, 1.0)?, servers)?;
    let ok = rows.iter().all(|r| r.is_sandwiched());
    Ok((ok, format!("{} rows, fast <= slowdown <= slow: {ok}", rows.len())))
}

fn large_solve() -> Result<(bool, String)> {
    let p = ModelParams::from_loads(200, 200.0, 0.7, 0.98)?;
    let started = std::time::Instant::now();
    let d = solve_stationary(&p)?;
    let secs = started.elapsed().as_secs_f64();
    let mass = (d.total_mass() - 1.0).abs();
    Ok((secs < 60.0 && mass <= 1e-12, format!("s = 200 in {secs:.2} s, mass error {mass:.1e}")))
}

pub fn run_checks(tier: Tier) -> Vec<CheckResult> {
    let full = tier == Tier::Full;
    let mut out = vec![
        check(
            "rate matrix residuals",
            residuals(if full { &[1, 15, 50, 200] } else { &[1, 15, 50] }),
        ),
        check("first-passage completeness", first_passage_sums(if full { 12 } else { 6 })),
        check(
            "truncated-generator oracle",
            oracle_equivalence(if full { &[1, 2, 3, 5, 8] } else { &[1, 2, 3] }),
        ),
        check("finite-buffer global balance", finite_buffer_balance()),
        check("abandonment oracle", abandonment_oracle()),
        check("M/M/s reduction", reduction()),
        check(
            "coupled dominance",
            if full { coupling(100, 100_000) } else { coupling(10, 10_000) },
        ),
        check(
            "QED sandwich",
            qed_sandwich(if full { &[25, 50, 100, 200, 400] } else { &[25, 50, 100] }),
        ),
    ];
    if full {
        out.push(check("large solve", large_solve()));
    }
    out
}
