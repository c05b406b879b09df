//! Square-root scaling in the many-server limit.
//!
//! With `lambda = s mu_slow (1 - beta / sqrt(s))` and
//! `mu_fast = mu_slow (1 + gamma / sqrt(s))` the scaled occupancy
//! `(X - s) / sqrt(s)` of the fast and slow `M/M/s` systems converges to a
//! diffusion that is Ornstein-Uhlenbeck below zero and a reflected Brownian
//! motion with negative drift above zero.

use crate::error::{Result, SlowdownError};
use crate::model::ModelParams;
use crate::solver::{erlang_c, solve_stationary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QedParams {
    pub beta: f64,
    pub gamma: f64,
    pub mu_slow: f64,
}

impl QedParams {
    pub fn new(beta: f64, gamma: f64, mu_slow: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma), ("mu_slow", mu_slow)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SlowdownError::invalid(name, format!("must be positive, got {v}")));
            }
        }
        Ok(QedParams { beta, gamma, mu_slow })
    }
}

/// Which comparison system a diffusion quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QedSystem {
    Fast,
    Slow,
}

/// Parameters of the `s`-server system under the scaling. Requires `s > beta^2`.
pub fn scaled_params(qed: &QedParams, s: usize) -> Result<ModelParams> {
    let sf = s as f64;
    if sf <= qed.beta * qed.beta {
        return Err(SlowdownError::invalid(
            "servers",
            format!("need s > beta^2 = {}, got {s}", qed.beta * qed.beta),
        ));
    }
    let root = sf.sqrt();
    let lambda = sf * qed.mu_slow * (1.0 - qed.beta / root);
    let mu_fast = qed.mu_slow * (1.0 + qed.gamma / root);
    ModelParams::new(s, lambda, mu_fast, qed.mu_slow)
}

/// Infinitesimal mean and variance of the scaled birth-death process with
/// `s` servers at `x >= -sqrt(s)`, using the state `floor(s + x sqrt(s))`.
pub fn finite_s_drift(system: QedSystem, qed: &QedParams, s: usize, x: f64) -> (f64, f64) {
    let sf = s as f64;
    let e = (sf + x * sf.sqrt()).floor().max(0.0);
    drift_at_state(system, qed, s, x, e)
}

fn drift_at_state(system: QedSystem, qed: &QedParams, s: usize, x: f64, e: f64) -> (f64, f64) {
    let sf = s as f64;
    let root = sf.sqrt();
    let ms = qed.mu_slow;
    let (b, g) = (qed.beta, qed.gamma);
    match (system, x <= 0.0) {
        (QedSystem::Fast, true) => (
            ms * (-b - e / sf * g + (sf - e) / root),
            ms * (1.0 + e / sf - b / root + e / sf * g / root),
        ),
        (QedSystem::Fast, false) => (ms * (-b - g), ms * (2.0 - (b - g) / root)),
        (QedSystem::Slow, true) => (ms * (-b + (sf - e) / root), ms * (1.0 + e / sf - b / root)),
        (QedSystem::Slow, false) => (-b * ms, ms * (2.0 - b / root)),
    }
}

/// Limiting infinitesimal mean and variance.
pub fn limit_drift(system: QedSystem, qed: &QedParams, x: f64) -> (f64, f64) {
    let c = match system {
        QedSystem::Fast => qed.beta + qed.gamma,
        QedSystem::Slow => qed.beta,
    };
    let mean = if x <= 0.0 { qed.mu_slow * (-c - x) } else { -c * qed.mu_slow };
    (mean, 2.0 * qed.mu_slow)
}

/// `sup |m_s - m|` and `sup |sigma_s^2 - sigma^2|` over `[lo, hi]`.
///
/// Between consecutive integer states the finite-`s` coefficients and the
/// limits are both affine in `x`, so the supremum is attained at a piece
/// endpoint or as a one-sided limit there. All of those are enumerated.
pub fn drift_sup_error(system: QedSystem, qed: &QedParams, s: usize, lo: f64, hi: f64) -> (f64, f64) {
    let sf = s as f64;
    let root = sf.sqrt();
    let mut worst = (0.0f64, 0.0f64);
    let mut check = |x: f64, e: f64| {
        let (m, v) = drift_at_state(system, qed, s, x, e);
        let (ml, vl) = limit_drift(system, qed, x);
        worst.0 = worst.0.max((m - ml).abs());
        worst.1 = worst.1.max((v - vl).abs());
    };
    let neg_hi = hi.min(0.0);
    if lo <= neg_hi {
        let first = (sf + lo * root).floor();
        check(lo, first);
        let last = (sf + neg_hi * root).floor();
        let mut k = first + 1.0;
        while k <= last {
            let x = (k - sf) / root;
            check(x, k);
            check(x, k - 1.0);
            k += 1.0;
        }
        check(neg_hi, last);
    }
    if hi > 0.0 {
        let start = lo.max(f64::MIN_POSITIVE);
        check(start, sf);
        check(hi, sf);
    }
    worst
}

pub(crate) fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `HW(b) = (1 + b Phi(b) / phi(b))^-1`, the limiting `M/M/s` delay probability.
pub fn halfin_whitt(b: f64) -> f64 {
    1.0 / (1.0 + b * std_normal_cdf(b) / std_normal_pdf(b))
}

/// Mass of the limiting density on `x <= 0`.
pub fn mixing_constant(system: QedSystem, qed: &QedParams) -> f64 {
    1.0 - halfin_whitt(limit_rate(system, qed))
}

fn limit_rate(system: QedSystem, qed: &QedParams) -> f64 {
    match system {
        QedSystem::Fast => qed.beta + qed.gamma,
        QedSystem::Slow => qed.beta,
    }
}

/// Stationary density of the limiting diffusion.
pub fn diffusion_density(system: QedSystem, qed: &QedParams, x: f64) -> f64 {
    let b = limit_rate(system, qed);
    let c = mixing_constant(system, qed);
    if x <= 0.0 {
        c * std_normal_pdf(x + b) / std_normal_cdf(b)
    } else {
        (1.0 - c) * b * (-b * x).exp()
    }
}

/// `(lower, upper) = (HW(beta + gamma), HW(beta))`: the fast and slow
/// systems' limiting delay probabilities, which sandwich the slowdown system.
pub fn delay_bounds(qed: &QedParams) -> (f64, f64) {
    (halfin_whitt(qed.beta + qed.gamma), halfin_whitt(qed.beta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QedRow {
    pub s: usize,
    pub p_wait_fast: f64,
    pub p_wait_slowdown: f64,
    pub p_wait_slow: f64,
    pub lower: f64,
    pub upper: f64,
}

impl QedRow {
    pub fn is_sandwiched(&self) -> bool {
        self.p_wait_fast <= self.p_wait_slowdown && self.p_wait_slowdown <= self.p_wait_slow
    }
}

/// Exact delay probabilities of the three systems along the scaling.
pub fn qed_convergence_table(qed: &QedParams, s_list: &[usize]) -> Result<Vec<QedRow>> {
    let (lower, upper) = delay_bounds(qed);
    s_list
        .iter()
        .map(|&s| {
            let p = scaled_params(qed, s)?;
            let dist = solve_stationary(&p)?;
            Ok(QedRow {
                s,
                p_wait_fast: erlang_c(s, p.lambda() / p.mu_fast())?,
                p_wait_slowdown: dist.p_wait(),
                p_wait_slow: erlang_c(s, p.lambda() / p.mu_slow())?,
                lower,
                upper,
            })
        })
        .collect()
}
