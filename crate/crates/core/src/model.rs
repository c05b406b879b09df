//! Model parameters, state-space geometry and the level-transition blocks of
//! the threshold slowdown queue.
//!
//! The process is `(X, Y)`: `X` counts all customers in the system and `Y`
//! counts non-delayed customers in service. A customer who finds a free
//! server is served at the fast rate, a customer who has to wait is served
//! at the slow rate.

use crate::error::{Result, SlowdownError};
use crate::linalg::Matrix;

/// Validated parameters of the slowdown system. Construct with
/// [`ModelParams::new`] or [`ModelParams::from_loads`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    s: usize,
    lambda: f64,
    mu_fast: f64,
    mu_slow: f64,
}

impl ModelParams {
    /// Builds parameters from rates. Stability is not enforced here since the
    /// finite-buffer and abandonment variants accept `rho_slow >= 1`.
    pub fn new(s: usize, lambda: f64, mu_fast: f64, mu_slow: f64) -> Result<Self> {
        if s == 0 {
            return Err(SlowdownError::invalid("servers", "need at least one server"));
        }
        check_positive("lambda", lambda)?;
        check_positive("mu_fast", mu_fast)?;
        check_positive("mu_slow", mu_slow)?;
        if mu_fast <= mu_slow {
            return Err(SlowdownError::invalid(
                "mu_fast",
                format!("must exceed mu_slow ({mu_fast} <= {mu_slow})"),
            ));
        }
        Ok(ModelParams {
            s,
            lambda,
            mu_fast,
            mu_slow,
        })
    }

    /// Builds parameters from the loads `rho_fast = lambda / (s mu_fast)` and
    /// `rho_slow = lambda / (s mu_slow)`.
    pub fn from_loads(s: usize, lambda: f64, rho_fast: f64, rho_slow: f64) -> Result<Self> {
        if s == 0 {
            return Err(SlowdownError::invalid("servers", "need at least one server"));
        }
        check_positive("lambda", lambda)?;
        check_positive("rho_fast", rho_fast)?;
        check_positive("rho_slow", rho_slow)?;
        if rho_fast >= rho_slow {
            return Err(SlowdownError::invalid(
                "rho_fast",
                format!("must be below rho_slow ({rho_fast} >= {rho_slow})"),
            ));
        }
        let sf = s as f64;
        ModelParams::new(s, lambda, lambda / (sf * rho_fast), lambda / (sf * rho_slow))
    }

    pub fn servers(&self) -> usize {
        self.s
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu_fast(&self) -> f64 {
        self.mu_fast
    }

    pub fn mu_slow(&self) -> f64 {
        self.mu_slow
    }

    pub fn rho_fast(&self) -> f64 {
        self.lambda / (self.s as f64 * self.mu_fast)
    }

    pub fn rho_slow(&self) -> f64 {
        self.lambda / (self.s as f64 * self.mu_slow)
    }

    /// Number of phases per level at or above `s`.
    pub fn phases(&self) -> usize {
        self.s + 1
    }

    /// Same system with a different arrival rate.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ModelParams::new(self.s, lambda, self.mu_fast, self.mu_slow)
    }

    /// Same rates with a different number of servers.
    pub fn with_servers(&self, s: usize) -> Result<Self> {
        ModelParams::new(s, self.lambda, self.mu_fast, self.mu_slow)
    }

    /// Total departure rate out of `(i, j)` for `j <= min(i, s)`.
    pub fn service_rate(&self, i: usize, j: usize) -> f64 {
        let busy = i.min(self.s);
        debug_assert!(j <= busy);
        (busy - j) as f64 * self.mu_slow + j as f64 * self.mu_fast
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SlowdownError::invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// A state `(i, j)`: `i` customers in the system, `j` of them non-delayed and in service.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex {
    pub i: usize,
    pub j: usize,
}

impl StateIndex {
    pub fn new(i: usize, j: usize, s: usize) -> Option<Self> {
        (j <= i.min(s)).then_some(StateIndex { i, j })
    }

    /// Boundary states hold at most `s` customers.
    pub fn is_boundary(&self, s: usize) -> bool {
        self.i <= s
    }
}

/// Number of phases at level `i`.
pub fn phases_at(i: usize, s: usize) -> usize {
    i.min(s) + 1
}

/// The three transition-rate blocks between inner levels (`i > s`).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorBlocks {
    /// Level up: `lambda * I`.
    pub up: Matrix,
    /// Within level: diagonal with entry `-(lambda + (s-j) mu_slow + j mu_fast)`.
    pub local: Matrix,
    /// Level down: `(s-j) mu_slow` on the diagonal, `j mu_fast` at `(j, j-1)`.
    pub down: Matrix,
}

impl GeneratorBlocks {
    pub fn new(p: &ModelParams) -> Self {
        let n = p.phases();
        let s = p.servers();
        let up = Matrix::from_diagonal(&vec![p.lambda(); n]);
        let local = Matrix::from_diagonal(
            &(0..n)
                .map(|j| -(p.lambda() + p.service_rate(s, j)))
                .collect::<Vec<_>>(),
        );
        let mut down = Matrix::zeros(n, n);
        for j in 0..n {
            down[(j, j)] = (s - j) as f64 * p.mu_slow();
            if j > 0 {
                down[(j, j - 1)] = j as f64 * p.mu_fast();
            }
        }
        GeneratorBlocks { up, local, down }
    }

    pub fn order(&self) -> usize {
        self.up.rows()
    }

    /// Row sums of `up + local + down`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.up.add(&self.local).add(&self.down).row_sums()
    }
}

/// Ergodicity of the infinite-buffer model: `rho_slow < 1`.
pub fn is_ergodic(p: &ModelParams) -> bool {
    p.rho_slow() < 1.0
}

/// Mean-drift comparison with the stationary phase vector of
/// `up + local + down`, which is the unit vector on phase 0. Returns
/// `(upward drift, downward drift)`.
pub fn mean_drift(blocks: &GeneratorBlocks) -> (f64, f64) {
    let n = blocks.order();
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    let up: f64 = blocks.up.left_mul(&pi).iter().sum();
    let down: f64 = blocks.down.left_mul(&pi).iter().sum();
    (up, down)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_from_fig2_parameters() {
        let p = ModelParams::new(15, 15.0, 15.0 / (15.0 * 0.7), 15.0 / (15.0 * 0.98)).unwrap();
        assert!((p.rho_fast() - 0.7).abs() < 1e-14);
        assert!((p.rho_slow() - 0.98).abs() < 1e-14);
        assert!(is_ergodic(&p));
    }

    #[test]
    fn single_server_loads() {
        let p = ModelParams::new(1, 1.0, 2.0, 1.25).unwrap();
        assert_eq!(p.rho_fast(), 0.5);
        assert_eq!(p.rho_slow(), 0.8);
    }

    #[test]
    fn unstable_loads_are_accepted() {
        let p = ModelParams::from_loads(36, 36.0, 0.7, 1.2).unwrap();
        assert!((p.rho_slow() - 1.2).abs() < 1e-14);
        assert!(!is_ergodic(&p));
        let boundary = ModelParams::from_loads(4, 4.0, 0.5, 1.0).unwrap();
        assert!(!is_ergodic(&boundary));
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(matches!(
            ModelParams::new(3, 1.0, 1.0, 1.0),
            Err(SlowdownError::InvalidParameter { name: "mu_fast", .. })
        ));
        assert!(ModelParams::new(3, 1.0, 0.5, 1.0).is_err());
        assert!(ModelParams::new(3, 0.0, 2.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1.0, 2.0, -1.0).is_err());
        assert!(ModelParams::new(0, 1.0, 2.0, 1.0).is_err());
        assert!(ModelParams::new(2, f64::NAN, 2.0, 1.0).is_err());
    }

    #[test]
    fn single_server_blocks() {
        let p = ModelParams::new(1, 1.0, 2.0, 1.25).unwrap();
        let b = GeneratorBlocks::new(&p);
        assert_eq!(b.down, Matrix::from_rows(&[vec![1.25, 0.0], vec![2.0, 0.0]]));
        assert_eq!(b.up, Matrix::identity(2));
    }

    #[test]
    fn two_server_local_block() {
        let p = ModelParams::new(2, 1.5, 2.0, 1.0).unwrap();
        let b = GeneratorBlocks::new(&p);
        assert_eq!(b.local[(1, 1)], -(1.5 + 1.0 + 2.0));
        assert_eq!(b.down[(2, 2)], 0.0);
        assert_eq!(b.down[(2, 1)], 4.0);
        assert!(b.row_sums().iter().all(|&r| r == 0.0));
    }

    #[test]
    fn drift_matches_condition() {
        let p = ModelParams::new(4, 3.0, 2.0, 1.0).unwrap();
        let (up, down) = mean_drift(&GeneratorBlocks::new(&p));
        assert_eq!(up, 3.0);
        assert_eq!(down, 4.0);
    }
}
