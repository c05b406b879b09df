//! Closed-form rate matrix `R`, first-passage matrix `G` and `(I - R)^-1`.
//!
//! All three blocks of the inner generator are lower triangular, which makes
//! `R` lower triangular too. Its diagonal solves a scalar quadratic per phase
//! and every subdiagonal entry solves a linear equation in entries of
//! strictly smaller subdiagonal index, so `R` is obtained without iteration.

use crate::error::{Result, SlowdownError, Stage};
use crate::linalg::{LowerTriangular, Matrix};
use crate::model::{GeneratorBlocks, ModelParams};

/// Denominators below this are treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrices {
    pub r: LowerTriangular,
    pub g: LowerTriangular,
    pub inv_i_minus_r: LowerTriangular,
}

impl RateMatrices {
    pub fn compute(params: &ModelParams, blocks: &GeneratorBlocks) -> Result<Self> {
        let r = compute_r(params, blocks)?;
        let g = compute_g(blocks, &r);
        let inv_i_minus_r = invert_i_minus_r(&r)?;
        Ok(RateMatrices {
            r,
            g,
            inv_i_minus_r,
        })
    }

    /// Spectral radius of `R`, its largest diagonal entry.
    pub fn spectral_radius(&self) -> f64 {
        self.r.as_matrix().diagonal().into_iter().fold(0.0, f64::max)
    }
}

/// Smaller root of `a r^2 - b r + c = 0` in the form that avoids cancellation.
fn minimal_root(a: f64, b: f64, c: f64) -> f64 {
    let disc = (b * b - 4.0 * a * c).max(0.0);
    2.0 * c / (b + disc.sqrt())
}

/// Minimal non-negative solution of `up + R local + R^2 down = 0`.
pub fn compute_r(params: &ModelParams, blocks: &GeneratorBlocks) -> Result<LowerTriangular> {
    if params.rho_slow() >= 1.0 {
        return Err(SlowdownError::Unstable {
            rho_slow: params.rho_slow(),
        });
    }
    let s = params.servers();
    let n = s + 1;
    let lambda = params.lambda();
    let mut r = Matrix::zeros(n, n);

    for j in 0..s {
        let a = blocks.down[(j, j)];
        let b = -blocks.local[(j, j)];
        r[(j, j)] = minimal_root(a, b, lambda);
    }
    r[(s, s)] = lambda / -blocks.local[(s, s)];

    // Subdiagonal h only reads entries of subdiagonals < h.
    for h in 1..=s {
        for i in h..=s {
            let j = i - h;
            let slow = blocks.down[(j, j)];
            let fast_next = blocks.down[(j + 1, j)];
            let mut num = 0.0;
            for k in j + 1..i {
                num += r[(i, k)] * r[(k, j)] * slow;
            }
            for k in j + 1..=i {
                num += r[(i, k)] * r[(k, j + 1)] * fast_next;
            }
            let den = -blocks.local[(j, j)] - (r[(i, i)] + r[(j, j)]) * slow;
            if den.abs() <= DEGENERATE_TOL {
                return Err(SlowdownError::Degenerate {
                    stage: Stage::RateMatrix,
                    detail: format!("denominator {den:e} for R({i},{j})"),
                });
            }
            r[(i, j)] = num / den;
        }
    }
    if !r.is_finite() {
        return Err(SlowdownError::numerical(Stage::RateMatrix, "non-finite entry in R"));
    }
    Ok(LowerTriangular::new(r).expect("constructed lower triangular"))
}

/// `G = up^-1 R down`; `up` is `lambda I`.
pub fn compute_g(blocks: &GeneratorBlocks, r: &LowerTriangular) -> LowerTriangular {
    let lambda = blocks.up[(0, 0)];
    let g = r.as_matrix().mul(&blocks.down).scale(1.0 / lambda);
    LowerTriangular::new(g).expect("product of lower triangular matrices")
}

/// `(I - R)^-1` by forward substitution.
pub fn invert_i_minus_r(r: &LowerTriangular) -> Result<LowerTriangular> {
    let n = r.order();
    if let Some(j) = (0..n).find(|&j| 1.0 - r[(j, j)] <= DEGENERATE_TOL) {
        return Err(SlowdownError::Degenerate {
            stage: Stage::InverseIMinusR,
            detail: format!("1 - R({j},{j}) = {:e}; rho_slow too close to 1", 1.0 - r[(j, j)]),
        });
    }
    let i_minus_r = Matrix::identity(n).sub(r.as_matrix());
    let lt = LowerTriangular::new(i_minus_r).expect("identity minus lower triangular");
    lt.inverse(DEGENERATE_TOL).map_err(|j| SlowdownError::Degenerate {
        stage: Stage::InverseIMinusR,
        detail: format!("zero pivot at {j}"),
    })
}

/// `||up + R local + R^2 down||_inf / ||local||_inf`.
pub fn r_residual(blocks: &GeneratorBlocks, r: &Matrix) -> f64 {
    let res = blocks
        .up
        .add(&r.mul(&blocks.local))
        .add(&r.mul(r).mul(&blocks.down));
    res.norm_inf() / blocks.local.norm_inf()
}

/// `||down + local G + up G^2||_inf / ||local||_inf`.
pub fn g_residual(blocks: &GeneratorBlocks, g: &Matrix) -> f64 {
    let res = blocks
        .down
        .add(&blocks.local.mul(g))
        .add(&blocks.up.mul(&g.mul(g)));
    res.norm_inf() / blocks.local.norm_inf()
}

/// Generic fixed-point iteration `R <- -(up + R^2 down) local^-1` from zero.
/// Independent of the closed form; used as a cross-check.
pub fn fixed_point_r(blocks: &GeneratorBlocks, tol: f64, max_iter: usize) -> Result<Matrix> {
    let n = blocks.order();
    let inv_local: Vec<f64> = blocks.local.diagonal().iter().map(|d| 1.0 / d).collect();
    let mut r = Matrix::zeros(n, n);
    for _ in 0..max_iter {
        let mut next = blocks.up.add(&r.mul(&r).mul(&blocks.down)).scale(-1.0);
        for i in 0..n {
            for (v, &d) in next.row_mut(i).iter_mut().zip(&inv_local) {
                *v *= d;
            }
        }
        let delta = next.sub(&r).max_abs();
        r = next;
        if delta <= tol {
            return Ok(r);
        }
    }
    Err(SlowdownError::NoConvergence {
        stage: Stage::RateMatrix,
        detail: format!("fixed-point iteration exceeded {max_iter} steps"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(s: usize, lambda: f64, mf: f64, ms: f64) -> (ModelParams, GeneratorBlocks) {
        let p = ModelParams::new(s, lambda, mf, ms).unwrap();
        let b = GeneratorBlocks::new(&p);
        (p, b)
    }

    #[test]
    fn first_diagonal_entry_is_rho_slow() {
        for &(s, l, mf, ms) in &[(1, 1.0, 2.0, 1.25), (7, 5.0, 1.3, 0.9), (15, 15.0, 1.0 / 0.7, 1.0 / 0.98)] {
            let (p, b) = setup(s, l, mf, ms);
            let r = compute_r(&p, &b).unwrap();
            assert!((r[(0, 0)] - p.rho_slow()).abs() < 1e-14);
            assert!((r[(s, s)] - l / (l + s as f64 * mf)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_server_residual() {
        let (p, b) = setup(1, 1.0, 2.0, 1.25);
        let r = compute_r(&p, &b).unwrap();
        assert!(r_residual(&b, r.as_matrix()) <= 1e-12);
        assert_eq!(r[(0, 1)], 0.0);
    }

    #[test]
    fn unstable_is_rejected() {
        let p = ModelParams::from_loads(3, 3.0, 0.5, 1.0).unwrap();
        let b = GeneratorBlocks::new(&p);
        assert!(matches!(compute_r(&p, &b), Err(SlowdownError::Unstable { .. })));
    }

    #[test]
    fn g_is_stochastic_with_empty_last_column() {
        let p = ModelParams::from_loads(15, 15.0, 0.7, 0.98).unwrap();
        let b = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &b).unwrap();
        for sum in rm.g.as_matrix().row_sums() {
            assert!((sum - 1.0).abs() <= 1e-10, "row sum {sum}");
        }
        for i in 0..=15 {
            assert_eq!(rm.g[(i, 15)], 0.0);
        }
        assert!(g_residual(&b, rm.g.as_matrix()) <= 1e-10);
    }

    #[test]
    fn single_server_g() {
        let (p, b) = setup(1, 1.0, 2.0, 1.25);
        let rm = RateMatrices::compute(&p, &b).unwrap();
        assert!((rm.g[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_of_zero_is_identity() {
        let zero = LowerTriangular::new(Matrix::zeros(4, 4)).unwrap();
        assert_eq!(invert_i_minus_r(&zero).unwrap().as_matrix(), &Matrix::identity(4));
    }

    #[test]
    fn inverse_multiplies_back() {
        let p = ModelParams::from_loads(15, 15.0, 0.7, 0.98).unwrap();
        let b = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &b).unwrap();
        let i_minus_r = Matrix::identity(16).sub(rm.r.as_matrix());
        let prod = i_minus_r.mul(rm.inv_i_minus_r.as_matrix());
        assert!(prod.sub(&Matrix::identity(16)).max_abs() <= 1e-10);
        for j in 0..16 {
            assert!((rm.inv_i_minus_r[(j, j)] - 1.0 / (1.0 - rm.r[(j, j)])).abs() < 1e-12);
        }
    }

    #[test]
    fn near_singular_inverse_is_degenerate() {
        let r = LowerTriangular::new(Matrix::from_diagonal(&[1.0, 0.5])).unwrap();
        assert!(matches!(
            invert_i_minus_r(&r),
            Err(SlowdownError::Degenerate { stage: Stage::InverseIMinusR, .. })
        ));
    }

    #[test]
    fn minimal_root_is_the_smaller_one() {
        let (a, b, c) = (2.0, 7.0, 3.0);
        let r = minimal_root(a, b, c);
        let other = c / (a * r);
        assert!(r <= other);
        assert!((a * r * r - b * r + c).abs() < 1e-14);
    }
}
