//! Matrix-analytic solution against a direct solve of the truncated generator.

use slowdown::cli::validate::max_relative_difference;
use slowdown::model::ModelParams;
use slowdown::sim_oracle::truncated_generator_solve;
use slowdown::solver::solve_stationary;
use slowdown::variants::ModelVariant;

fn main() -> Result<(), slowdown::error::SlowdownError> {
    for s in [1, 2, 3, 5, 8] {
        let p = ModelParams::from_loads(s, s as f64, 0.6, 0.93)?;
        let exact = solve_stationary(&p)?;
        let oracle = truncated_generator_solve(&p, ModelVariant::Base, 1e-13)?;
        let diff = max_relative_difference(&exact, &oracle.distribution, s + 50, 1e-200);
        println!(
            "s = {s}: truncated at level {}, residual {:.1e}, max relative difference {diff:.2e}",
            oracle.truncation_level, oracle.residual,
        );
    }
    Ok(())
}
