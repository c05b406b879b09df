//! Event-driven simulation of the `(X, Y)` chain with batch-means estimators.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::error::{Result, SlowdownError};
use crate::model::ModelParams;
use crate::variants::ModelVariant;

/// Batches per replication for the batch-means confidence intervals.
pub const BATCHES: usize = 32;
/// Two-sided 95% Student-t quantile with 31 degrees of freedom.
const T_31: f64 = 2.0395134463964077;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    servers: usize,
    lambda: f64,
    mu_fast: f64,
    mu_slow: f64,
    pub variant: ModelVariant,
    pub horizon: f64,
    pub warmup: f64,
    pub seed: u64,
    pub replications: usize,
    /// Starting state `(X, Y)`.
    pub initial: (usize, usize),
    pub record_path: bool,
}

impl SimConfig {
    /// Base model from `(0, 0)`, one replication, warmup at 10% of the horizon.
    pub fn new(params: &ModelParams, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = SimConfig {
            servers: params.servers(),
            lambda: params.lambda(),
            mu_fast: params.mu_fast(),
            mu_slow: params.mu_slow(),
            variant: ModelVariant::Base,
            horizon,
            warmup: 0.1 * horizon,
            seed,
            replications: 1,
            initial: (0, 0),
            record_path: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Overrides the arrival rate; zero is allowed here.
    pub fn with_arrival_rate(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn servers(&self) -> usize {
        self.servers
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(SlowdownError::invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if !(self.warmup >= 0.0 && self.warmup < self.horizon) {
            return Err(SlowdownError::invalid("warmup", "must satisfy 0 <= warmup < horizon"));
        }
        if self.replications == 0 {
            return Err(SlowdownError::invalid("replications", "need at least one"));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(SlowdownError::invalid("lambda", "must be non-negative"));
        }
        let (x, y) = self.initial;
        if y > x.min(self.servers) {
            return Err(SlowdownError::invalid("initial", format!("({x}, {y}) is not a state")));
        }
        if let ModelVariant::FiniteBuffer { capacity } = self.variant {
            if capacity < self.servers || x > capacity {
                return Err(SlowdownError::invalid("capacity", "must be at least s and the initial level"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Half-width of the 95% confidence interval.
    pub half_width: f64,
}

impl Estimate {
    fn from_batches(batches: &[f64]) -> Estimate {
        let n = batches.len() as f64;
        let mean = batches.iter().sum::<f64>() / n;
        let var = batches.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Estimate {
            value: mean,
            half_width: T_31 * (var / n).sqrt(),
        }
    }

    pub fn covers(&self, exact: f64, widths: f64) -> bool {
        (self.value - exact).abs() <= widths * self.half_width
    }
}

/// Completed periods with `X >= s`, measured after the warmup.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExcursionStats {
    pub count: u64,
    pub mean_length: f64,
    pub max_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub time: f64,
    pub total_customers: usize,
    pub nondelayed_in_service: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimates {
    /// Time-average of `1{X >= s}`, equal to `P(W>0)` by PASTA.
    pub p_wait: Estimate,
    pub mean_customers: Estimate,
    pub excursions: ExcursionStats,
    /// Path of the first replication when requested.
    pub sample_path: Option<Vec<PathPoint>>,
    pub events: u64,
}

struct RunOutput {
    wait_batches: Vec<f64>,
    level_batches: Vec<f64>,
    excursion_total: f64,
    excursion_max: f64,
    excursion_count: u64,
    path: Option<Vec<PathPoint>>,
    events: u64,
}

struct Batcher {
    start: f64,
    width: f64,
    wait: Vec<f64>,
    level: Vec<f64>,
}

impl Batcher {
    fn add(&mut self, t0: f64, t1: f64, x: usize, s: usize) {
        let mut a = t0.max(self.start);
        while a < t1 {
            let k = (((a - self.start) / self.width) as usize).min(BATCHES - 1);
            let edge = if k + 1 == BATCHES { t1 } else { self.start + (k + 1) as f64 * self.width };
            let b = t1.min(edge).max(a);
            let dt = b - a;
            if x >= s {
                self.wait[k] += dt;
            }
            self.level[k] += dt * x as f64;
            if b <= a {
                break;
            }
            a = b;
        }
    }
}

fn run(cfg: &SimConfig, replication: u64) -> RunOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(replication);
    let s = cfg.servers;
    let (delta, cap) = match cfg.variant {
        ModelVariant::Base => (0.0, usize::MAX),
        ModelVariant::FiniteBuffer { capacity } => (0.0, capacity),
        ModelVariant::Abandonment { delta } => (delta, usize::MAX),
    };
    let (mut x, mut y) = cfg.initial;
    let mut t = 0.0;
    let width = (cfg.horizon - cfg.warmup) / BATCHES as f64;
    let mut batcher = Batcher {
        start: cfg.warmup,
        width,
        wait: vec![0.0; BATCHES],
        level: vec![0.0; BATCHES],
    };
    let mut path = (cfg.record_path && replication == 0).then(|| {
        vec![PathPoint {
            time: 0.0,
            total_customers: x,
            nondelayed_in_service: y,
        }]
    });
    let mut excursion_start = (x >= s).then_some(0.0);
    let (mut exc_total, mut exc_max, mut exc_count) = (0.0, 0.0f64, 0u64);
    let mut events = 0u64;

    loop {
        let arrival = if x < cap { cfg.lambda } else { 0.0 };
        let fast = y as f64 * cfg.mu_fast;
        let slow = (x.min(s) - y) as f64 * cfg.mu_slow;
        let abandon = x.saturating_sub(s) as f64 * delta;
        let total = arrival + fast + slow + abandon;
        let dt = if total > 0.0 {
            let e: f64 = Exp1.sample(&mut rng);
            e / total
        } else {
            f64::INFINITY
        };
        let next = (t + dt).min(cfg.horizon);
        batcher.add(t, next, x, s);
        t = next;
        if t >= cfg.horizon {
            break;
        }
        let u = rng.random::<f64>() * total;
        let was_waiting = x >= s;
        if u < arrival {
            if x < s {
                y += 1;
            }
            x += 1;
        } else if u < arrival + fast {
            x -= 1;
            y -= 1;
        } else {
            x -= 1;
        }
        events += 1;
        match (was_waiting, x >= s) {
            (false, true) => excursion_start = Some(t),
            (true, false) => {
                if let Some(start) = excursion_start.take() {
                    if start >= cfg.warmup {
                        let len = t - start;
                        exc_total += len;
                        exc_max = exc_max.max(len);
                        exc_count += 1;
                    }
                }
            }
            _ => {}
        }
        if let Some(p) = path.as_mut() {
            p.push(PathPoint {
                time: t,
                total_customers: x,
                nondelayed_in_service: y,
            });
        }
    }
    RunOutput {
        wait_batches: batcher.wait.iter().map(|v| v / width).collect(),
        level_batches: batcher.level.iter().map(|v| v / width).collect(),
        excursion_total: exc_total,
        excursion_max: exc_max,
        excursion_count: exc_count,
        path,
        events,
    }
}

/// Runs all replications (in parallel) and pools their batches.
/// Identical configurations give bit-identical results.
pub fn simulate(cfg: &SimConfig) -> Result<SimEstimates> {
    cfg.validate()?;
    let mut runs: Vec<RunOutput> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|r| run(cfg, r))
        .collect();
    let wait: Vec<f64> = runs.iter().flat_map(|r| r.wait_batches.iter().copied()).collect();
    let level: Vec<f64> = runs.iter().flat_map(|r| r.level_batches.iter().copied()).collect();
    let count: u64 = runs.iter().map(|r| r.excursion_count).sum();
    let total: f64 = runs.iter().map(|r| r.excursion_total).sum();
    Ok(SimEstimates {
        p_wait: Estimate::from_batches(&wait),
        mean_customers: Estimate::from_batches(&level),
        excursions: ExcursionStats {
            count,
            mean_length: if count > 0 { total / count as f64 } else { 0.0 },
            max_length: runs.iter().map(|r| r.excursion_max).fold(0.0, f64::max),
        },
        sample_path: runs[0].path.take(),
        events: runs.iter().map(|r| r.events).sum(),
    })
}

/// Writes `time,total_customers,nondelayed_in_service` rows.
pub fn write_sample_path_csv(path: &[PathPoint], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "time,total_customers,nondelayed_in_service")?;
    for p in path {
        writeln!(out, "{:.16e},{},{}", p.time, p.total_customers, p.nondelayed_in_service)?;
    }
    Ok(())
}
