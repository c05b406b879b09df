//! Direct solve of the level-truncated generator with banded GTH.
//!
//! States are ordered level by level, so every transition stays within
//! `s + 2` positions of the diagonal and elimination never leaves the band.

use crate::boundary::{normalize, StationaryDistribution, Tail};
use crate::error::{Result, SlowdownError, Stage};
use crate::linalg::BandedGenerator;
use crate::model::ModelParams;
use crate::variants::ModelVariant;

/// Largest state space the oracle will build.
pub const STATE_CAP: usize = 2_000_000;

/// Generator of the chain restricted to levels `0..=top`, arrivals at `top` blocked.
#[derive(Debug, Clone)]
pub struct TruncatedChain {
    s: usize,
    top: usize,
    generator: BandedGenerator,
}

impl TruncatedChain {
    pub fn build(p: &ModelParams, variant: ModelVariant, top: usize) -> Result<Self> {
        let s = p.servers();
        let top = match variant {
            ModelVariant::FiniteBuffer { capacity } => capacity,
            _ => top,
        };
        if top < s {
            return Err(SlowdownError::invalid("truncation", format!("level {top} below s = {s}")));
        }
        let states = level_offset(top + 1, s);
        if states > STATE_CAP {
            return Err(SlowdownError::StateCap { states, cap: STATE_CAP });
        }
        let delta = match variant {
            ModelVariant::Abandonment { delta } => delta,
            _ => 0.0,
        };
        let mut q = BandedGenerator::new(states, s + 2);
        for i in 0..=top {
            for j in 0..=i.min(s) {
                let from = level_offset(i, s) + j;
                if i < top {
                    let to_j = if i < s { j + 1 } else { j };
                    q.add_rate(from, level_offset(i + 1, s) + to_j, p.lambda());
                }
                if i == 0 {
                    continue;
                }
                let below = level_offset(i - 1, s);
                if j > 0 {
                    q.add_rate(from, below + j - 1, j as f64 * p.mu_fast());
                }
                // A slow completion or an abandonment leaves j unchanged.
                let slow = (i.min(s) - j) as f64 * p.mu_slow() + i.saturating_sub(s) as f64 * delta;
                if slow > 0.0 {
                    q.add_rate(from, below + j, slow);
                }
            }
        }
        Ok(TruncatedChain { s, top, generator: q })
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn states(&self) -> usize {
        self.generator.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        level_offset(i, self.s) + j
    }

    pub fn generator(&self) -> &BandedGenerator {
        &self.generator
    }

    /// Stationary vector as levels `0..=top`.
    pub fn solve_levels(&self) -> Result<Vec<Vec<f64>>> {
        let pi = self.generator.gth_stationary(Stage::Truncation)?;
        Ok((0..=self.top)
            .map(|i| pi[self.index(i, 0)..=self.index(i, i.min(self.s))].to_vec())
            .collect())
    }

    /// `max |(pi Q)_k|` for a distribution given level by level.
    pub fn balance_residual(&self, levels: &[Vec<f64>]) -> f64 {
        let flat: Vec<f64> = levels.iter().take(self.top + 1).flatten().copied().collect();
        self.generator.left_mul(&flat).into_iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn level_offset(i: usize, s: usize) -> usize {
    if i <= s {
        i * (i + 1) / 2
    } else {
        s * (s + 1) / 2 + (i - s) * (s + 1)
    }
}

/// Result of [`truncated_generator_solve`].
#[derive(Debug, Clone)]
pub struct TruncatedSolution {
    pub distribution: StationaryDistribution,
    pub truncation_level: usize,
    /// Global balance residual of the truncated generator.
    pub residual: f64,
}

/// Solves the truncated chain, doubling the levels above `s` until `P(W>0)`
/// changes by at most `tol` and the top level holds at most `tol` mass.
/// Finite buffers are solved exactly at their capacity.
pub fn truncated_generator_solve(
    p: &ModelParams,
    variant: ModelVariant,
    tol: f64,
) -> Result<TruncatedSolution> {
    let s = p.servers();
    let solve_at = |top: usize| -> Result<(StationaryDistribution, f64)> {
        let chain = TruncatedChain::build(p, variant, top)?;
        let levels = chain.solve_levels()?;
        let residual = chain.balance_residual(&levels);
        let mut levels = levels;
        let tail = levels.split_off(s + 1);
        Ok((normalize(levels, Tail::Explicit(tail))?, residual))
    };
    if let ModelVariant::FiniteBuffer { capacity } = variant {
        let (distribution, residual) = solve_at(capacity)?;
        return Ok(TruncatedSolution {
            distribution,
            truncation_level: capacity,
            residual,
        });
    }
    if variant == ModelVariant::Base && p.rho_slow() >= 1.0 {
        return Err(SlowdownError::Unstable { rho_slow: p.rho_slow() });
    }
    let mut top = s + 64;
    let mut dist = solve_at(top)?.0;
    loop {
        let next_top = s + 2 * (top - s);
        if level_offset(next_top + 1, s) > STATE_CAP {
            return Err(SlowdownError::StateCap {
                states: level_offset(next_top + 1, s),
                cap: STATE_CAP,
            });
        }
        let (next, next_residual) = solve_at(next_top)?;
        let change = (next.p_wait() - dist.p_wait()).abs();
        let top_mass: f64 = next.level(next_top).iter().sum();
        if change <= tol && top_mass <= tol {
            return Ok(TruncatedSolution {
                distribution: next,
                truncation_level: next_top,
                residual: next_residual,
            });
        }
        dist = next;
        top = next_top;
    }
}
