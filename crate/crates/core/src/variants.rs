//! Finite-buffer and abandonment extensions. Both are stable for any load
//! and are solved with level-dependent rate matrices `R_i` (`p_i = p_{i-1} R_i`)
//! computed backwards from a top level, feeding `G_{s+1}` into the unchanged
//! boundary algorithm.

use crate::boundary::{normalize, solve_boundary, StationaryDistribution, Tail};
use crate::error::{Result, SlowdownError, Stage};
use crate::linalg::{LowerTriangular, Matrix};
use crate::model::{GeneratorBlocks, ModelParams};
use crate::rate_matrices::DEGENERATE_TOL;
use crate::solver::MarginalDistribution;

/// Which model a simulation or direct solve refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelVariant {
    Base,
    /// At most `capacity` customers in the system.
    FiniteBuffer { capacity: usize },
    /// Each waiting customer abandons at rate `delta`.
    Abandonment { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteBufferParams {
    pub base: ModelParams,
    pub capacity: usize,
}

impl FiniteBufferParams {
    pub fn new(base: ModelParams, capacity: usize) -> Result<Self> {
        if capacity < base.servers() {
            return Err(SlowdownError::invalid(
                "capacity",
                format!("buffer bound {capacity} below server count {}", base.servers()),
            ));
        }
        Ok(FiniteBufferParams { base, capacity })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbandonmentParams {
    pub base: ModelParams,
    pub delta: f64,
    /// Truncation is accepted once `P(W>0)` moves by at most this much
    /// when the truncation level is doubled.
    pub truncation_tail: f64,
}

impl AbandonmentParams {
    pub fn new(base: ModelParams, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(SlowdownError::invalid("delta", format!("must be positive, got {delta}")));
        }
        Ok(AbandonmentParams {
            base,
            delta,
            truncation_tail: 1e-10,
        })
    }

    /// Starting truncation level `s + max(50, ceil(10 lambda / delta))`.
    pub fn initial_truncation(&self) -> usize {
        let extra = (10.0 * self.base.lambda() / self.delta).ceil() as usize;
        self.base.servers() + extra.max(50)
    }
}

/// `R_{s+1}, ..., R_top` and the level-`s` anchor.
#[derive(Debug, Clone)]
pub struct LevelDependentTail {
    pub rates: Vec<Matrix>,
    pub anchor: Vec<f64>,
}

impl LevelDependentTail {
    /// Levels `s+1..=top` obtained from the anchor by `p_i = p_{i-1} R_i`.
    pub fn levels(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.rates.len());
        let mut v = self.anchor.clone();
        for r in &self.rates {
            v = r.left_mul(&v);
            out.push(v.clone());
        }
        out
    }
}

/// Backward recursion `R_i = -up (local_i + R_{i+1} down_{i+1})^-1` for
/// `i = top, ..., s+1` with `R_{top+1} = 0`. `local(i)` and `down(i)` give
/// the within-level block at level `i` and the block from level `i` to `i-1`.
fn backward_rates(
    s: usize,
    top: usize,
    lambda: f64,
    local: impl Fn(usize) -> Matrix,
    down: impl Fn(usize) -> Matrix,
) -> Result<Vec<Matrix>> {
    let mut rates: Vec<Matrix> = Vec::with_capacity(top - s);
    let mut next: Option<Matrix> = None;
    for i in (s + 1..=top).rev() {
        let mut a = local(i);
        if let Some(r_next) = &next {
            a = a.add(&r_next.mul(&down(i + 1)));
        }
        let lt = LowerTriangular::new(a).ok_or_else(|| {
            SlowdownError::numerical(Stage::LevelDependentTail, format!("level {i} block not lower triangular"))
        })?;
        let inv = lt.inverse(DEGENERATE_TOL).map_err(|j| {
            SlowdownError::numerical(Stage::LevelDependentTail, format!("singular pivot {j} at level {i}"))
        })?;
        let r = inv.into_matrix().scale(-lambda);
        if !r.is_finite() {
            return Err(SlowdownError::numerical(
                Stage::LevelDependentTail,
                format!("non-finite R at level {i}"),
            ));
        }
        rates.push(r.clone());
        next = Some(r);
    }
    rates.reverse();
    Ok(rates)
}

/// Solves the boundary with `G_{s+1} = up^-1 R_{s+1} down_{s+1}` (identity
/// when there is no level above `s`) and attaches the explicit tail.
fn assemble(
    p: &ModelParams,
    blocks: &GeneratorBlocks,
    rates: Vec<Matrix>,
    down_first: &Matrix,
) -> Result<(StationaryDistribution, LevelDependentTail)> {
    let n = p.phases();
    let g = match rates.first() {
        Some(r) => r.mul(down_first).scale(1.0 / p.lambda()),
        None => Matrix::identity(n),
    };
    let levels = solve_boundary(p, blocks, &g)?;
    let tail = LevelDependentTail {
        rates,
        anchor: levels[p.servers()].clone(),
    };
    let dist = normalize(levels, Tail::Explicit(tail.levels()))?;
    let scaled = LevelDependentTail {
        rates: tail.rates,
        anchor: dist.level_s().to_vec(),
    };
    Ok((dist, scaled))
}

pub fn solve_finite_buffer(fb: &FiniteBufferParams) -> Result<StationaryDistribution> {
    solve_finite_buffer_with_tail(fb).map(|(d, _)| d)
}

pub fn solve_finite_buffer_with_tail(
    fb: &FiniteBufferParams,
) -> Result<(StationaryDistribution, LevelDependentTail)> {
    let p = &fb.base;
    let blocks = GeneratorBlocks::new(p);
    let s = p.servers();
    let top = fb.capacity;
    let top_local = blocks.local.add(&blocks.up);
    let rates = backward_rates(
        s,
        top,
        p.lambda(),
        |i| if i == top { top_local.clone() } else { blocks.local.clone() },
        |_| blocks.down.clone(),
    )?;
    assemble(p, &blocks, rates, &blocks.down)
}

/// Abandonment model solved at a fixed truncation level `top` with `R_{top+1} = 0`.
pub fn solve_abandonment_truncated(
    ab: &AbandonmentParams,
    top: usize,
) -> Result<(StationaryDistribution, LevelDependentTail)> {
    let p = &ab.base;
    let s = p.servers();
    let blocks = GeneratorBlocks::new(p);
    let n = p.phases();
    let shift = |i: usize| Matrix::identity(n).scale((i - s) as f64 * ab.delta);
    let rates = backward_rates(
        s,
        top,
        p.lambda(),
        |i| blocks.local.sub(&shift(i)),
        |i| blocks.down.add(&shift(i)),
    )?;
    let down_first = blocks.down.add(&shift(s + 1));
    assemble(p, &blocks, rates, &down_first)
}

#[derive(Debug, Clone)]
pub struct AbandonmentSolution {
    pub distribution: StationaryDistribution,
    pub tail: LevelDependentTail,
    pub truncation_level: usize,
}

const MAX_DOUBLINGS: usize = 12;

/// Abandonment model with the truncation level doubled until `P(W>0)` is stable.
pub fn solve_abandonment(ab: &AbandonmentParams) -> Result<AbandonmentSolution> {
    let s = ab.base.servers();
    let mut top = ab.initial_truncation();
    let mut previous = solve_abandonment_truncated(ab, top)?.0.p_wait();
    for _ in 0..MAX_DOUBLINGS {
        top = s + 2 * (top - s);
        let (distribution, tail) = solve_abandonment_truncated(ab, top)?;
        let p_wait = distribution.p_wait();
        if (p_wait - previous).abs() <= ab.truncation_tail {
            return Ok(AbandonmentSolution {
                distribution,
                tail,
                truncation_level: top,
            });
        }
        previous = p_wait;
    }
    Err(SlowdownError::NoConvergence {
        stage: Stage::Truncation,
        detail: format!("P(W>0) not stable after {MAX_DOUBLINGS} doublings (level {top})"),
    })
}

/// Relative prominence a local maximum must have over its neighbours.
pub const MODE_PROMINENCE: f64 = 1e-6;

/// Strict local maxima of a marginal distribution as `(index, probability)`.
/// Runs of values equal within the prominence count as one plateau, reported
/// at its first index. The last index only qualifies when nothing lies beyond it.
pub fn find_modes(marginal: &MarginalDistribution) -> Vec<(usize, f64)> {
    let p = &marginal.probabilities;
    let close = |a: f64, b: f64| (a - b).abs() <= MODE_PROMINENCE * a.max(b);
    let mut modes = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let mut end = start;
        while end + 1 < p.len() && close(p[end + 1], p[start]) {
            end += 1;
        }
        let v = p[start];
        let left_ok = start == 0 || v > p[start - 1] * (1.0 + MODE_PROMINENCE);
        let right_ok = if end + 1 < p.len() {
            v > p[end + 1] * (1.0 + MODE_PROMINENCE)
        } else {
            marginal.tail_mass == 0.0
        };
        if left_ok && right_ok && v > 0.0 {
            modes.push((start, v));
        }
        start = end + 1;
    }
    modes
}
