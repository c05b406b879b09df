//! Sample path of the total number of customers, and long congested periods.
//!
//! `cargo run --release --example simulate_path > path.csv`

use slowdown::model::ModelParams;
use slowdown::sim_oracle::{simulate, write_sample_path_csv, SimConfig};
use slowdown::solver::solve_stationary;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = ModelParams::from_loads(15, 15.0, 0.7, 0.98)?;
    let mut cfg = SimConfig::new(&p, 10_000.0, 2024)?;
    cfg.warmup = 0.0;
    cfg.record_path = true;
    let est = simulate(&cfg)?;
    let exact = solve_stationary(&p)?.p_wait();
    eprintln!(
        "P(W>0) {:.4} +- {:.4} (exact {exact:.4}); longest period with X >= s: {:.0}",
        est.p_wait.value, est.p_wait.half_width, est.excursions.max_length
    );
    write_sample_path_csv(est.sample_path.as_deref().unwrap_or(&[]), std::io::stdout().lock())?;
    Ok(())
}
