//! Slow, slowdown and fast systems driven by common randomness stay ordered.

use slowdown::model::ModelParams;
use slowdown::sim_oracle::simulate_coupled_seeds;

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let seeds: Vec<u64> = (0..10).collect();
    for &(rf, rs) in &[(0.5, 0.8), (0.7, 0.95), (0.9, 0.99)] {
        let p = ModelParams::from_loads(10, 10.0, rf, rs)?;
        let r = simulate_coupled_seeds(p, 100_000, &seeds)?;
        println!(
            "rho_F {rf}, rho_S {rs}: {} customers, {} event epochs, {} violations, {:.3} delayed",
            r.customers_checked,
            r.events_checked,
            r.total_violations(),
            r.delayed_fraction
        );
    }
    Ok(())
}
