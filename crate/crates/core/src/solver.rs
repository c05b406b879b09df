//! End-to-end solve of the infinite-buffer model and the derived performance
//! measures, plus the `M/M/s` reference systems used for comparison.

use crate::boundary::{normalize, solve_boundary, StationaryDistribution, Tail};
use crate::error::{Result, SlowdownError};
use crate::linalg::Matrix;
use crate::model::{GeneratorBlocks, ModelParams};
use crate::rate_matrices::RateMatrices;

/// Cap on the export range beyond `s`.
pub const EXPORT_LEVEL_CAP: usize = 2000;

/// Default tail mass left out of exported grids.
pub const EXPORT_TAIL: f64 = 1e-10;

/// Stationary distribution of the infinite-buffer model. Requires `rho_slow < 1`.
pub fn solve_stationary(params: &ModelParams) -> Result<StationaryDistribution> {
    let blocks = GeneratorBlocks::new(params);
    let rm = RateMatrices::compute(params, &blocks)?;
    let levels = solve_boundary(params, &blocks, rm.g.as_matrix())?;
    normalize(levels, Tail::Geometric(rm))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceReport {
    pub p_wait: f64,
    pub mean_queue: f64,
    pub mean_system: f64,
    /// `(1 - P(W>0)) rho_fast + P(W>0) rho_slow`.
    pub rho: f64,
    pub rho_minus_rho_fast: f64,
    pub p_empty: f64,
}

pub fn performance_report(dist: &StationaryDistribution, params: &ModelParams) -> PerformanceReport {
    let p_wait = dist.p_wait();
    let mean_queue = dist.mean_queue();
    let rho = (1.0 - p_wait) * params.rho_fast() + p_wait * params.rho_slow();
    PerformanceReport {
        p_wait,
        mean_queue,
        mean_system: mean_queue + dist.mean_busy(),
        rho,
        rho_minus_rho_fast: rho - params.rho_fast(),
        p_empty: dist.prob(0, 0),
    }
}

/// `P(L = i)` for `i = 0..=i_max` and the mass above `i_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDistribution {
    pub probabilities: Vec<f64>,
    pub tail_mass: f64,
}

impl MarginalDistribution {
    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }

    pub fn cdf(&self) -> Vec<f64> {
        self.probabilities
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// Marginal distribution of the number of customers up to `i_max`.
pub fn marginal_total(dist: &StationaryDistribution, i_max: usize) -> MarginalDistribution {
    let probabilities: Vec<f64> = dist
        .levels()
        .take(i_max + 1)
        .map(|lvl| lvl.iter().sum())
        .collect();
    let tail_mass = match dist.tail() {
        Tail::Geometric(rm) => {
            // p_s R^(i_max + 1 - s) (I - R)^-1 1
            let s = dist.servers();
            let start = (i_max + 1).max(s);
            let lvl = dist.level(start);
            let ones = vec![1.0; s + 1];
            let beyond: f64 = lvl
                .iter()
                .zip(rm.inv_i_minus_r.as_matrix().right_mul(&ones))
                .map(|(a, b)| a * b)
                .sum();
            if i_max + 1 >= s {
                beyond
            } else {
                beyond + (i_max + 1..s).map(|i| dist.level(i).iter().sum::<f64>()).sum::<f64>()
            }
        }
        Tail::Explicit(_) => {
            let top = dist.max_level().expect("explicit tail");
            (i_max + 1..=top).map(|i| dist.level(i).iter().sum::<f64>()).sum()
        }
    };
    MarginalDistribution {
        probabilities,
        tail_mass,
    }
}

/// Dense `(i_max + 1) x (s + 1)` array of `p(i, j)`, zero where `j > min(i, s)`.
pub fn joint_heatmap(dist: &StationaryDistribution, i_max: usize) -> Matrix {
    let s = dist.servers();
    let mut m = Matrix::zeros(i_max + 1, s + 1);
    for (i, lvl) in dist.levels().take(i_max + 1).enumerate() {
        m.row_mut(i)[..lvl.len()].copy_from_slice(&lvl);
    }
    m
}

/// Smallest level whose remaining tail is at most `tol`, capped at `s + EXPORT_LEVEL_CAP`.
pub fn default_i_max(dist: &StationaryDistribution, tol: f64) -> usize {
    let s = dist.servers();
    let cap = s + EXPORT_LEVEL_CAP;
    if let Some(top) = dist.max_level() {
        return top.min(cap);
    }
    let mut cumulative = 0.0;
    for (i, lvl) in dist.levels().enumerate() {
        cumulative += lvl.iter().sum::<f64>();
        if i >= s && 1.0 - cumulative <= tol {
            return i;
        }
        if i >= cap {
            return cap;
        }
    }
    cap
}

/// Erlang-B blocking probability by the stable forward recursion.
pub fn erlang_b(s: usize, offered_load: f64) -> f64 {
    (1..=s).fold(1.0, |b, k| offered_load * b / (k as f64 + offered_load * b))
}

/// Erlang-C delay probability of an `M/M/s` queue with offered load `a = lambda / mu`.
pub fn erlang_c(s: usize, offered_load: f64) -> Result<f64> {
    if s == 0 {
        return Err(SlowdownError::invalid("servers", "need at least one server"));
    }
    if !(offered_load > 0.0) || offered_load >= s as f64 {
        return Err(SlowdownError::invalid(
            "offered_load",
            format!("must lie in (0, s) = (0, {s}), got {offered_load}"),
        ));
    }
    let b = erlang_b(s, offered_load);
    let sf = s as f64;
    Ok(sf * b / (sf - offered_load * (1.0 - b)))
}

/// Stationary queue-length distribution of `M/M/s` with a uniform service rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmsQueue {
    pub s: usize,
    pub lambda: f64,
    pub mu: f64,
}

impl MmsQueue {
    pub fn new(s: usize, lambda: f64, mu: f64) -> Result<Self> {
        if s == 0 || !(lambda > 0.0) || !(mu > 0.0) {
            return Err(SlowdownError::invalid("mms", "need s >= 1 and positive rates"));
        }
        if lambda >= s as f64 * mu {
            return Err(SlowdownError::Unstable {
                rho_slow: lambda / (s as f64 * mu),
            });
        }
        Ok(MmsQueue { s, lambda, mu })
    }

    /// The comparison system where every customer is served at `mu_fast`.
    pub fn fast(p: &ModelParams) -> Result<Self> {
        MmsQueue::new(p.servers(), p.lambda(), p.mu_fast())
    }

    /// The comparison system where every customer is served at `mu_slow`.
    pub fn slow(p: &ModelParams) -> Result<Self> {
        MmsQueue::new(p.servers(), p.lambda(), p.mu_slow())
    }

    pub fn load(&self) -> f64 {
        self.lambda / (self.s as f64 * self.mu)
    }

    pub fn p_wait(&self) -> f64 {
        erlang_c(self.s, self.lambda / self.mu).expect("validated in constructor")
    }

    pub fn mean_queue(&self) -> f64 {
        let rho = self.load();
        self.p_wait() * rho / (1.0 - rho)
    }

    pub fn mean_system(&self) -> f64 {
        self.mean_queue() + self.lambda / self.mu
    }

    /// `P(L = i)` for `i = 0..=i_max`, computed from the `P(L = s)` anchor
    /// without forming factorials.
    pub fn pmf(&self, i_max: usize) -> Vec<f64> {
        let a = self.lambda / self.mu;
        let s = self.s;
        let rho = self.load();
        // P(L >= s) = C, P(L = s) = C (1 - rho)
        let at_s = self.p_wait() * (1.0 - rho);
        let mut out = vec![0.0; i_max + 1];
        let mut v = at_s;
        for i in (0..=s.min(i_max)).rev() {
            out[i] = v;
            if i > 0 {
                v *= i as f64 / a;
            }
        }
        if i_max > s {
            let mut v = at_s;
            for slot in out.iter_mut().skip(s + 1) {
                v *= rho;
                *slot = v;
            }
        }
        out
    }

    pub fn cdf(&self, i_max: usize) -> Vec<f64> {
        self.pmf(i_max)
            .into_iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// Minimal staffing levels `(s_fast, s_slowdown)` reaching `P(W>0) <= target`
/// for the fast `M/M/s` system and for the slowdown system.
pub fn dimension_servers(
    mu_fast: f64,
    mu_slow: f64,
    lambda: f64,
    target_p_wait: f64,
) -> Result<(usize, usize)> {
    if !(target_p_wait > 0.0 && target_p_wait < 1.0) {
        return Err(SlowdownError::invalid("target", "must lie in (0, 1)"));
    }
    // validates the rates
    ModelParams::new(1, lambda, mu_fast, mu_slow)?;
    let cap = ((10.0 * lambda / mu_slow).ceil() as usize).max(1);

    let a_fast = lambda / mu_fast;
    let mut s_fast = a_fast.floor() as usize + 1;
    while erlang_c(s_fast, a_fast)? > target_p_wait {
        s_fast += 1;
        if s_fast > cap {
            return Err(SlowdownError::NoConvergence {
                stage: crate::error::Stage::LevelS,
                detail: format!("fast staffing exceeded cap {cap}"),
            });
        }
    }

    let stable_min = (lambda / mu_slow).floor() as usize + 1;
    let mut s = s_fast.max(stable_min);
    loop {
        let p = ModelParams::new(s, lambda, mu_fast, mu_slow)?;
        if solve_stationary(&p)?.p_wait() <= target_p_wait {
            return Ok((s_fast, s));
        }
        s += 1;
        if s > cap {
            return Err(SlowdownError::NoConvergence {
                stage: crate::error::Stage::LevelS,
                detail: format!("slowdown staffing exceeded cap {cap}"),
            });
        }
    }
}
