pub mod boundary;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod qed;
pub mod rate_matrices;
pub mod sim_oracle;
pub mod solver;
pub mod variants;
