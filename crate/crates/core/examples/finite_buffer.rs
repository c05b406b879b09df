//! Bistability with a bounded buffer: the marginal develops a second mode at
//! the capacity once the slow load is high enough.

use slowdown::model::ModelParams;
use slowdown::solver::marginal_total;
use slowdown::variants::{find_modes, solve_finite_buffer, FiniteBufferParams};

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let (s, capacity) = (81, 93);
    for k in 0..=10 {
        let rho_slow = 1.0 + 0.01 * k as f64;
        let p = ModelParams::from_loads(s, s as f64, 0.8, rho_slow)?;
        let dist = solve_finite_buffer(&FiniteBufferParams::new(p, capacity)?)?;
        let modes = find_modes(&marginal_total(&dist, capacity));
        let at: Vec<usize> = modes.iter().map(|m| m.0).collect();
        println!("rho_slow {rho_slow:.2}  P(W>0) {:.4}  modes at {at:?}", dist.p_wait());
    }
    Ok(())
}
