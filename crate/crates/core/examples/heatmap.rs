//! Joint distribution of (customers, non-delayed in service) as long-format CSV.
//!
//! `cargo run --example heatmap > heatmap.csv`

use slowdown::model::ModelParams;
use slowdown::solver::{joint_heatmap, marginal_total, solve_stationary};

fn main() -> Result<(), slowdown::error::SlowdownError> {
    let p = ModelParams::from_loads(15, 15.0, 0.8, 0.98)?;
    let dist = solve_stationary(&p)?;
    let i_max = 60;
    let grid = joint_heatmap(&dist, i_max);
    println!("i,j,probability");
    for i in 0..=i_max {
        for j in 0..=i.min(15) {
            println!("{i},{j},{:.16e}", grid[(i, j)]);
        }
    }
    let m = marginal_total(&dist, i_max);
    eprintln!("mass shown {:.6}, beyond level {i_max}: {:.3e}", 1.0 - m.tail_mass, m.tail_mass);
    Ok(())
}
