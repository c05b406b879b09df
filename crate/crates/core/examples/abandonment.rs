//! Overloaded system kept stable by abandonments; the marginal is bimodal
//! with one mode below and one above the server count.

use slowdown::model::ModelParams;
use slowdown::solver::marginal_total;
use slowdown::variants::{find_modes, solve_abandonment, AbandonmentParams};

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let s = 36;
    let p = ModelParams::from_loads(s, s as f64, 0.7, 1.2)?;
    for divisor in [8.0, 6.0, 4.0, 3.0, 2.0] {
        let delta = p.mu_slow() / divisor;
        let sol = solve_abandonment(&AbandonmentParams::new(p, delta)?)?;
        let m = marginal_total(&sol.distribution, sol.truncation_level);
        let at: Vec<usize> = find_modes(&m).iter().map(|m| m.0).collect();
        println!(
            "delta = mu_S/{divisor}: P(W>0) {:.4}, E[L] {:.2}, modes at {at:?}, truncated at {}",
            sol.distribution.p_wait(),
            m.mean(),
            sol.truncation_level
        );
    }
    Ok(())
}
