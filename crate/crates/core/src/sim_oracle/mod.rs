//! Independent checks on the matrix-analytic results: a direct solve of the
//! truncated generator, a CTMC simulator and the coupled three-system construction.

pub mod coupling;
pub mod simulate;
pub mod truncated;

pub use coupling::{simulate_coupled, simulate_coupled_seeds, CouplingConfig, CouplingReport};
pub use simulate::{simulate, write_sample_path_csv, Estimate, ExcursionStats, PathPoint, SimConfig, SimEstimates};
pub use truncated::{truncated_generator_solve, TruncatedChain, TruncatedSolution, STATE_CAP};
