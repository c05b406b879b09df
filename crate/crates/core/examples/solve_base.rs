//! Performance of a 15-server system against its fast and slow M/M/s references.

use slowdown::model::ModelParams;
use slowdown::solver::{performance_report, solve_stationary, MmsQueue};

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let p = ModelParams::from_loads(15, 15.0, 0.7, 0.98)?;
    let dist = solve_stationary(&p)?;
    let r = performance_report(&dist, &p);
    let fast = MmsQueue::fast(&p)?;
    let slow = MmsQueue::slow(&p)?;

    println!("{:<10} {:>10} {:>10}", "system", "P(W>0)", "E[L]");
    println!("{:<10} {:>10.4} {:>10.3}", "fast", fast.p_wait(), fast.mean_system());
    println!("{:<10} {:>10.4} {:>10.3}", "slowdown", r.p_wait, r.mean_system);
    println!("{:<10} {:>10.4} {:>10.3}", "slow", slow.p_wait(), slow.mean_system());
    println!("effective load {:.4} (rho - rho_fast = {:.4})", r.rho, r.rho_minus_rho_fast);
    Ok(())
}
