//! Staffing needed to reach a delay-probability target, with and without slowdown.

use slowdown::solver::dimension_servers;

fn main() -> Result<(), slowdown::error::SlowdownError> {
    println!("mu_F  mu_S  lambda  target  s_fast  s_slowdown");
    for mu_slow in [0.9, 0.7] {
        for target in [0.1, 0.5] {
            for lambda in [10.0, 12.0, 15.0, 20.0] {
                let (s_fast, s) = dimension_servers(1.0, mu_slow, lambda, target)?;
                println!("{:>4} {:>5} {:>7} {:>7} {:>7} {:>11}", 1.0, mu_slow, lambda, target, s_fast, s);
            }
        }
    }
    Ok(())
}
