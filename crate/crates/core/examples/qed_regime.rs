//! Delay probabilities under square-root scaling approach their diffusion limits.

use slowdown::qed::{delay_bounds, diffusion_density, qed_convergence_table, QedParams, QedSystem};

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let q = QedParams::new(0.5, 0.5, 1.0)?;
    let (lower, upper) = delay_bounds(&q);
    println!("limits: fast {lower:.4}, slow {upper:.4}");
    println!("{:>5} {:>8} {:>9} {:>8}", "s", "fast", "slowdown", "slow");
    for r in qed_convergence_table(&q, &[25, 50, 100, 200, 400])? {
        println!("{:>5} {:>8.4} {:>9.4} {:>8.4}", r.s, r.p_wait_fast, r.p_wait_slowdown, r.p_wait_slow);
    }
    println!("density at x = -1, 0, 1:");
    for sys in [QedSystem::Fast, QedSystem::Slow] {
        let d: Vec<String> = [-1.0, 0.0, 1.0]
            .iter()
            .map(|&x| format!("{:.4}", diffusion_density(sys, &q, x)))
            .collect();
        println!("  {sys:?}: {}", d.join(", "));
    }
    Ok(())
}
