//! Customer-level coupling of the slow, slowdown and fast `s`-server FCFS
//! queues. All three see the same arrival times and the same slow service
//! requirement `B_S`. The fast system serves `(mu_slow / mu_fast) B_S`; the
//! slowdown system serves `B_S` when the customer waited and the scaled
//! requirement otherwise.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;

use crate::error::{Result, SlowdownError};
use crate::model::ModelParams;

const ARRIVAL_STREAM: u64 = 0;
const SERVICE_STREAM: u64 = 1;

/// Differences below this (relative to the arrival epoch) are rounding.
pub const COUPLING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub params: ModelParams,
    pub customers: usize,
    pub seed: u64,
}

impl CouplingConfig {
    pub fn new(params: ModelParams, customers: usize, seed: u64) -> Result<Self> {
        if customers == 0 {
            return Err(SlowdownError::invalid("customers", "need at least one customer"));
        }
        Ok(CouplingConfig { params, customers, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CouplingReport {
    pub customers_checked: u64,
    pub violations_ws_ge_w: u64,
    pub violations_w_ge_wf: u64,
    /// Event epochs at which `X_S >= X >= X_F` was checked.
    pub events_checked: u64,
    pub violations_xs_ge_x: u64,
    pub violations_x_ge_xf: u64,
    pub max_violation_magnitude: f64,
    /// Fraction of slowdown-system customers that waited.
    pub delayed_fraction: f64,
}

impl CouplingReport {
    pub fn total_violations(&self) -> u64 {
        self.violations_ws_ge_w + self.violations_w_ge_wf + self.violations_xs_ge_x + self.violations_x_ge_xf
    }

    /// Associative merge of reports from independent runs.
    pub fn merge(self, other: CouplingReport) -> CouplingReport {
        let n = self.customers_checked + other.customers_checked;
        let delayed = if n == 0 {
            0.0
        } else {
            (self.delayed_fraction * self.customers_checked as f64
                + other.delayed_fraction * other.customers_checked as f64)
                / n as f64
        };
        CouplingReport {
            customers_checked: n,
            violations_ws_ge_w: self.violations_ws_ge_w + other.violations_ws_ge_w,
            violations_w_ge_wf: self.violations_w_ge_wf + other.violations_w_ge_wf,
            events_checked: self.events_checked + other.events_checked,
            violations_xs_ge_x: self.violations_xs_ge_x + other.violations_xs_ge_x,
            violations_x_ge_xf: self.violations_x_ge_xf + other.violations_x_ge_xf,
            max_violation_magnitude: self.max_violation_magnitude.max(other.max_violation_magnitude),
            delayed_fraction: delayed,
        }
    }
}

/// FCFS `s`-server queue driven by a min-heap of server release times.
struct Servers {
    free_at: BinaryHeap<Reverse<OrdF64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Servers {
    fn new(s: usize) -> Self {
        Servers {
            free_at: (0..s).map(|_| Reverse(OrdF64(0.0))).collect(),
        }
    }

    /// Admits a customer arriving at `t`; `service` receives whether it waits.
    /// Returns `(waiting time, departure time)`.
    fn admit(&mut self, t: f64, service: impl FnOnce(bool) -> f64) -> (f64, f64) {
        let Reverse(OrdF64(free)) = self.free_at.pop().expect("s >= 1");
        let start = free.max(t);
        let wait = start - t;
        let departure = start + service(wait > 0.0);
        self.free_at.push(Reverse(OrdF64(departure)));
        (wait, departure)
    }
}

fn run(cfg: &CouplingConfig) -> CouplingReport {
    let p = &cfg.params;
    let mut arrivals_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    arrivals_rng.set_stream(ARRIVAL_STREAM);
    let mut service_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    service_rng.set_stream(SERVICE_STREAM);
    let inter = Exp::new(p.lambda()).expect("positive rate");
    let base = Exp::new(p.mu_slow()).expect("positive rate");
    let ratio = p.mu_slow() / p.mu_fast();

    let n = cfg.customers;
    let mut slow = Servers::new(p.servers());
    let mut mid = Servers::new(p.servers());
    let mut fast = Servers::new(p.servers());
    let mut arrivals = Vec::with_capacity(n);
    let mut departures = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    let mut report = CouplingReport::default();
    let mut delayed = 0u64;
    let mut t = 0.0;

    for _ in 0..n {
        t += inter.sample(&mut arrivals_rng);
        let b_s: f64 = base.sample(&mut service_rng);
        let (w_s, d_s) = slow.admit(t, |_| b_s);
        let (w, d) = mid.admit(t, |waits| if waits { b_s } else { ratio * b_s });
        let (w_f, d_f) = fast.admit(t, |_| ratio * b_s);
        let tol = COUPLING_TOL * t.max(1.0);
        if w > w_s + tol {
            report.violations_ws_ge_w += 1;
            report.max_violation_magnitude = report.max_violation_magnitude.max(w - w_s);
        }
        if w_f > w + tol {
            report.violations_w_ge_wf += 1;
            report.max_violation_magnitude = report.max_violation_magnitude.max(w_f - w);
        }
        if w > 0.0 {
            delayed += 1;
        }
        arrivals.push(t);
        departures[0].push(d_s);
        departures[1].push(d);
        departures[2].push(d_f);
    }
    report.customers_checked = n as u64;
    report.delayed_fraction = delayed as f64 / n as f64;

    for d in departures.iter_mut() {
        d.sort_by(f64::total_cmp);
    }
    // Sweep all event epochs; X(t) = arrivals up to t minus departures up to t.
    let mut epochs: Vec<f64> = arrivals.iter().chain(departures.iter().flatten()).copied().collect();
    epochs.sort_by(f64::total_cmp);
    epochs.dedup();
    let (mut ia, mut id) = (0usize, [0usize; 3]);
    for &e in &epochs {
        while ia < n && arrivals[ia] <= e {
            ia += 1;
        }
        for (k, dep) in departures.iter().enumerate() {
            while id[k] < n && dep[id[k]] <= e {
                id[k] += 1;
            }
        }
        let x_s = ia - id[0];
        let x = ia - id[1];
        let x_f = ia - id[2];
        if x > x_s {
            report.violations_xs_ge_x += 1;
        }
        if x_f > x {
            report.violations_x_ge_xf += 1;
        }
        report.events_checked += 1;
    }
    report
}

pub fn simulate_coupled(cfg: &CouplingConfig) -> CouplingReport {
    run(cfg)
}

/// One coupled run per seed, merged.
pub fn simulate_coupled_seeds(params: ModelParams, customers: usize, seeds: &[u64]) -> Result<CouplingReport> {
    let configs = seeds
        .iter()
        .map(|&seed| CouplingConfig::new(params, customers, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(configs
        .par_iter()
        .map(run)
        .collect::<Vec<_>>()
        .into_iter()
        .fold(CouplingReport::default(), CouplingReport::merge))
}
