//! Command-line front end. Exit codes: 0 success, 1 numerical failure,
//! 2 invalid input.

pub mod output;
pub mod validate;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::SlowdownError;
use crate::model::ModelParams;
use crate::qed::{qed_convergence_table, QedParams};
use crate::sim_oracle::{simulate, simulate_coupled_seeds, write_sample_path_csv, Estimate, SimConfig};
use crate::solver::{
    default_i_max, dimension_servers, EXPORT_TAIL, marginal_total, performance_report, solve_stationary, MarginalDistribution,
    MmsQueue,
};
use crate::variants::{
    find_modes, solve_abandonment, solve_finite_buffer, AbandonmentParams, FiniteBufferParams, ModelVariant,
};
use output::{envelope, nums, num, object, to_json_string, Cell, Csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "SLOWDOWN_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "slowdown",
    version,
    about = "Stationary analysis of many-server queues where delayed customers are served slower",
    after_help = "Load flags are converted to rates before solving:\n  \
                  mu_fast = lambda / (servers * rho_fast)\n  \
                  mu_slow = lambda / (servers * rho_slow)\n\
                  SLOWDOWN_THREADS caps the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Delay probability, queue lengths and effective load.
    Solve(SolveArgs),
    /// Marginal distribution of the number of customers, with M/M/s references.
    Marginal(GridArgs),
    /// Joint distribution p(i, j) in long format.
    Heatmap(GridArgs),
    /// Minimal server counts reaching a delay-probability target.
    Dimension(DimensionArgs),
    /// Model with at most `capacity` customers in the system.
    FiniteBuffer(FiniteBufferArgs),
    /// Model where waiting customers abandon at rate `delta`.
    Abandon(AbandonArgs),
    /// Delay probabilities along the square-root scaling.
    Qed(QedArgs),
    /// Monte Carlo simulation of the chain.
    Simulate(SimulateArgs),
    /// Coupled slow/slowdown/fast simulation checking pathwise ordering.
    Couple(CoupleArgs),
    /// Runs the invariant suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TierArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Number of servers.
    #[arg(long)]
    servers: usize,
    /// Arrival rate.
    #[arg(long)]
    lambda: f64,
    /// Service rate of customers who did not wait.
    #[arg(long, conflicts_with_all = ["rho_fast", "rho_slow"], requires = "mu_slow")]
    mu_fast: Option<f64>,
    /// Service rate of customers who waited.
    #[arg(long, requires = "mu_fast")]
    mu_slow: Option<f64>,
    /// lambda / (servers * mu_fast).
    #[arg(long, conflicts_with_all = ["mu_fast", "mu_slow"], requires = "rho_slow")]
    rho_fast: Option<f64>,
    /// lambda / (servers * mu_slow).
    #[arg(long, requires = "rho_fast")]
    rho_slow: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, Failure> {
        match (self.mu_fast, self.mu_slow, self.rho_fast, self.rho_slow) {
            (Some(mf), Some(ms), None, None) => Ok(ModelParams::new(self.servers, self.lambda, mf, ms)?),
            (None, None, Some(rf), Some(rs)) => Ok(ModelParams::from_loads(self.servers, self.lambda, rf, rs)?),
            _ => Err(Failure::invalid(
                "either --mu-fast with --mu-slow or --rho-fast with --rho-slow is required",
            )),
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Last level to export; by default the level where the tail drops below 1e-10 (at most servers + 2000).
    #[arg(long)]
    i_max: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct DimensionArgs {
    #[arg(long)]
    mu_fast: f64,
    #[arg(long)]
    mu_slow: f64,
    #[arg(long)]
    lambda: f64,
    /// Required bound on the delay probability.
    #[arg(long)]
    target: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct FiniteBufferArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Maximum number of customers in the system (at least `servers`).
    #[arg(long)]
    capacity: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct AbandonArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Abandonment rate per waiting customer.
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct QedArgs {
    /// Staffing slack: lambda = s * mu_slow * (1 - beta / sqrt(s)).
    #[arg(long)]
    beta: f64,
    /// Speed gap: mu_fast = mu_slow * (1 + gamma / sqrt(s)).
    #[arg(long)]
    gamma: f64,
    /// Service rate of customers who waited.
    #[arg(long, default_value_t = 1.0)]
    mu_slow: f64,
    /// Comma-separated server counts.
    #[arg(long = "s", value_delimiter = ',', required = true)]
    servers: Vec<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Simulated time per replication.
    #[arg(long, default_value_t = 1e5)]
    horizon: f64,
    /// Discarded initial period; defaults to 10% of the horizon.
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replications: usize,
    /// Simulate the finite-buffer model with this capacity.
    #[arg(long, conflicts_with = "delta")]
    capacity: Option<usize>,
    /// Simulate the abandonment model with this rate.
    #[arg(long)]
    delta: Option<f64>,
    /// Also write the first replication's path as CSV to this file.
    #[arg(long)]
    path_output: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Customers per seed.
    #[arg(long, default_value_t = 100_000)]
    customers: usize,
    /// Number of seeds, starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "quick")]
    tier: TierArg,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<SlowdownError> for Failure {
    fn from(e: SlowdownError) -> Self {
        Failure {
            code: if e.is_validation() { EXIT_INVALID } else { EXIT_NUMERICAL },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: format!("i/o error: {e}"),
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Output goes to stdout unless `--output`.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return f.code;
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::invalid(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A pool may already exist when embedded; keep it in that case.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // reader went away, e.g. `| head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn model_json(p: &ModelParams) -> Value {
    object([
        ("s", Value::from(p.servers() as u64)),
        ("lambda", num(p.lambda())),
        ("mu_fast", num(p.mu_fast())),
        ("mu_slow", num(p.mu_slow())),
        ("rho_fast", num(p.rho_fast())),
        ("rho_slow", num(p.rho_slow())),
    ])
}

fn with_extra(mut base: Value, extra: &[(&str, Value)]) -> Value {
    if let Value::Object(m) = &mut base {
        for (k, v) in extra {
            m.insert((*k).to_string(), v.clone());
        }
    }
    base
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Solve(a) => solve_cmd(a),
        Command::Marginal(a) => marginal_cmd(a),
        Command::Heatmap(a) => heatmap_cmd(a),
        Command::Dimension(a) => dimension_cmd(a),
        Command::FiniteBuffer(a) => finite_buffer_cmd(a),
        Command::Abandon(a) => abandon_cmd(a),
        Command::Qed(a) => qed_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Couple(a) => couple_cmd(a),
        Command::Validate(a) => validate_cmd(a),
    }
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let dist = solve_stationary(&p)?;
    let r = performance_report(&dist, &p);
    let fast = MmsQueue::fast(&p)?;
    let slow = MmsQueue::slow(&p)?;
    let metrics = [
        ("p_wait", r.p_wait),
        ("mean_queue", r.mean_queue),
        ("mean_system", r.mean_system),
        ("rho", r.rho),
        ("rho_minus_rho_fast", r.rho_minus_rho_fast),
        ("p_empty", r.p_empty),
        ("p_wait_fast", fast.p_wait()),
        ("mean_system_fast", fast.mean_system()),
        ("p_wait_slow", slow.p_wait()),
        ("mean_system_slow", slow.mean_system()),
    ];
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&envelope(
            model_json(&p),
            Value::Object(metrics.iter().map(|(k, v)| (k.to_string(), num(*v))).collect()),
        )),
        Format::Csv => {
            let mut csv = Csv::new(&["metric", "value"]);
            for (k, v) in metrics {
                csv.row(&[Cell::Text(k.into()), Cell::Float(v)]);
            }
            csv.finish()
        }
    };
    emit(&a.out, &text)
}

fn marginal_table(m: &MarginalDistribution, fast: &[f64], slow: &[f64]) -> String {
    let mut csv = Csv::new(&["i", "probability", "cdf", "probability_fast", "probability_slow"]);
    for (i, (p, c)) in m.probabilities.iter().zip(m.cdf()).enumerate() {
        csv.row(&[
            Cell::Int(i as u64),
            Cell::Float(*p),
            Cell::Float(c),
            Cell::Float(fast[i]),
            Cell::Float(slow[i]),
        ]);
    }
    csv.finish()
}

fn marginal_cmd(a: GridArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let dist = solve_stationary(&p)?;
    let i_max = a.i_max.unwrap_or_else(|| default_i_max(&dist, EXPORT_TAIL));
    let m = marginal_total(&dist, i_max);
    let fast = MmsQueue::fast(&p)?.pmf(i_max);
    let slow = MmsQueue::slow(&p)?.pmf(i_max);
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => marginal_table(&m, &fast, &slow),
        Format::Json => to_json_string(&envelope(
            with_extra(model_json(&p), &[("i_max", Value::from(i_max as u64))]),
            object([
                ("probability", nums(&m.probabilities)),
                ("probability_fast", nums(&fast)),
                ("probability_slow", nums(&slow)),
                ("tail_mass", num(m.tail_mass)),
                ("mean", num(m.mean())),
            ]),
        )),
    };
    emit(&a.out, &text)
}

fn heatmap_cmd(a: GridArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let dist = solve_stationary(&p)?;
    let i_max = a.i_max.unwrap_or_else(|| default_i_max(&dist, EXPORT_TAIL));
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&["i", "j", "probability"]);
            for (i, lvl) in dist.levels().take(i_max + 1).enumerate() {
                for (j, v) in lvl.iter().enumerate() {
                    csv.row(&[Cell::Int(i as u64), Cell::Int(j as u64), Cell::Float(*v)]);
                }
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = dist.levels().take(i_max + 1).map(|l| nums(&l)).collect();
            to_json_string(&envelope(
                with_extra(model_json(&p), &[("i_max", Value::from(i_max as u64))]),
                object([("levels", Value::Array(rows))]),
            ))
        }
    };
    emit(&a.out, &text)
}

fn dimension_cmd(a: DimensionArgs) -> Result<(), Failure> {
    let (s_fast, s_slowdown) = dimension_servers(a.mu_fast, a.mu_slow, a.lambda, a.target)?;
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&envelope(
            object([
                ("lambda", num(a.lambda)),
                ("mu_fast", num(a.mu_fast)),
                ("mu_slow", num(a.mu_slow)),
                ("target", num(a.target)),
            ]),
            object([
                ("s_fast", Value::from(s_fast as u64)),
                ("s_slowdown", Value::from(s_slowdown as u64)),
            ]),
        )),
        Format::Csv => {
            let mut csv = Csv::new(&["s_fast", "s_slowdown"]);
            csv.row(&[Cell::Int(s_fast as u64), Cell::Int(s_slowdown as u64)]);
            csv.finish()
        }
    };
    emit(&a.out, &text)
}

fn variant_output(
    out: &OutputArgs,
    params: Value,
    dist: &crate::boundary::StationaryDistribution,
    extra: &[(&str, Value)],
) -> Result<(), Failure> {
    let top = dist.max_level().expect("explicit tail");
    let m = marginal_total(dist, top);
    let modes = find_modes(&m);
    let text = match out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mode_json: Vec<Value> = modes
                .iter()
                .map(|&(i, p)| object([("index", Value::from(i as u64)), ("probability", num(p))]))
                .collect();
            let results = with_extra(
                object([
                    ("p_wait", num(dist.p_wait())),
                    ("mean_queue", num(dist.mean_queue())),
                    ("mean_system", num(m.mean())),
                    ("modes", Value::Array(mode_json)),
                    ("marginal", nums(&m.probabilities)),
                ]),
                extra,
            );
            to_json_string(&envelope(params, results))
        }
        Format::Csv => {
            let mut csv = Csv::new(&["i", "probability"]);
            for (i, p) in m.probabilities.iter().enumerate() {
                csv.row(&[Cell::Int(i as u64), Cell::Float(*p)]);
            }
            csv.finish()
        }
    };
    emit(out, &text)
}

fn finite_buffer_cmd(a: FiniteBufferArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let dist = solve_finite_buffer(&FiniteBufferParams::new(p, a.capacity)?)?;
    let params = with_extra(model_json(&p), &[("capacity", Value::from(a.capacity as u64))]);
    variant_output(&a.out, params, &dist, &[])
}

fn abandon_cmd(a: AbandonArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let sol = solve_abandonment(&AbandonmentParams::new(p, a.delta)?)?;
    let params = with_extra(model_json(&p), &[("delta", num(a.delta))]);
    variant_output(
        &a.out,
        params,
        &sol.distribution,
        &[("truncation_level", Value::from(sol.truncation_level as u64))],
    )
}

fn qed_cmd(a: QedArgs) -> Result<(), Failure> {
    let q = QedParams::new(a.beta, a.gamma, a.mu_slow)?;
    let rows = qed_convergence_table(&q, &a.servers)?;
    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut csv = Csv::new(&["s", "p_wait_fast", "p_wait_slowdown", "p_wait_slow", "lower", "upper"]);
            for r in &rows {
                csv.row(&[
                    Cell::Int(r.s as u64),
                    Cell::Float(r.p_wait_fast),
                    Cell::Float(r.p_wait_slowdown),
                    Cell::Float(r.p_wait_slow),
                    Cell::Float(r.lower),
                    Cell::Float(r.upper),
                ]);
            }
            csv.finish()
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    object([
                        ("s", Value::from(r.s as u64)),
                        ("p_wait_fast", num(r.p_wait_fast)),
                        ("p_wait_slowdown", num(r.p_wait_slowdown)),
                        ("p_wait_slow", num(r.p_wait_slow)),
                        ("lower", num(r.lower)),
                        ("upper", num(r.upper)),
                    ])
                })
                .collect();
            to_json_string(&envelope(
                object([("beta", num(q.beta)), ("gamma", num(q.gamma)), ("mu_slow", num(q.mu_slow))]),
                object([("rows", Value::Array(rows))]),
            ))
        }
    };
    emit(&a.out, &text)
}

fn estimate_json(e: &Estimate) -> Value {
    object([("value", num(e.value)), ("half_width", num(e.half_width))])
}

fn simulate_cmd(a: SimulateArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let mut cfg = SimConfig::new(&p, a.horizon, a.seed)?;
    if let Some(w) = a.warmup {
        cfg.warmup = w;
    }
    cfg.replications = a.replications;
    cfg.record_path = a.path_output.is_some();
    cfg.variant = match (a.capacity, a.delta) {
        (Some(capacity), _) => ModelVariant::FiniteBuffer { capacity },
        (None, Some(delta)) => {
            AbandonmentParams::new(p, delta)?;
            ModelVariant::Abandonment { delta }
        }
        (None, None) => ModelVariant::Base,
    };
    let est = simulate(&cfg)?;
    if let (Some(path), Some(sample)) = (&a.path_output, &est.sample_path) {
        let mut buf = Vec::new();
        write_sample_path_csv(sample, &mut buf)?;
        fs::write(path, buf)?;
    }
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&envelope(
            with_extra(
                model_json(&p),
                &[
                    ("horizon", num(cfg.horizon)),
                    ("warmup", num(cfg.warmup)),
                    ("seed", Value::from(cfg.seed)),
                    ("replications", Value::from(cfg.replications as u64)),
                ],
            ),
            object([
                ("p_wait", estimate_json(&est.p_wait)),
                ("mean_customers", estimate_json(&est.mean_customers)),
                (
                    "excursions",
                    object([
                        ("count", Value::from(est.excursions.count)),
                        ("mean_length", num(est.excursions.mean_length)),
                        ("max_length", num(est.excursions.max_length)),
                    ]),
                ),
                ("events", Value::from(est.events)),
            ]),
        )),
        Format::Csv => {
            let mut csv = Csv::new(&["metric", "value", "half_width"]);
            csv.row(&[Cell::Text("p_wait".into()), Cell::Float(est.p_wait.value), Cell::Float(est.p_wait.half_width)]);
            csv.row(&[
                Cell::Text("mean_customers".into()),
                Cell::Float(est.mean_customers.value),
                Cell::Float(est.mean_customers.half_width),
            ]);
            csv.finish()
        }
    };
    emit(&a.out, &text)
}

fn couple_cmd(a: CoupleArgs) -> Result<(), Failure> {
    let p = a.model.params()?;
    let seeds: Vec<u64> = (a.seed..a.seed + a.seeds).collect();
    let r = simulate_coupled_seeds(p, a.customers, &seeds)?;
    let counts = [
        ("customers_checked", r.customers_checked),
        ("violations_ws_ge_w", r.violations_ws_ge_w),
        ("violations_w_ge_wf", r.violations_w_ge_wf),
        ("events_checked", r.events_checked),
        ("violations_xs_ge_x", r.violations_xs_ge_x),
        ("violations_x_ge_xf", r.violations_x_ge_xf),
    ];
    let text = match a.out.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut results: serde_json::Map<String, Value> =
                counts.iter().map(|(k, v)| (k.to_string(), Value::from(*v))).collect();
            results.insert("max_violation_magnitude".into(), num(r.max_violation_magnitude));
            results.insert("delayed_fraction".into(), num(r.delayed_fraction));
            to_json_string(&envelope(
                with_extra(
                    model_json(&p),
                    &[
                        ("customers", Value::from(a.customers as u64)),
                        ("seeds", Value::from(a.seeds)),
                        ("seed", Value::from(a.seed)),
                    ],
                ),
                Value::Object(results),
            ))
        }
        Format::Csv => {
            let mut csv = Csv::new(&["metric", "value"]);
            for (k, v) in counts {
                csv.row(&[Cell::Text(k.into()), Cell::Int(v)]);
            }
            csv.finish()
        }
    };
    emit(&a.out, &text)
}

fn validate_cmd(a: ValidateArgs) -> Result<(), Failure> {
    let tier = match a.tier {
        TierArg::Quick => validate::Tier::Quick,
        TierArg::Full => validate::Tier::Full,
    };
    let results = validate::run_checks(tier);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut text = String::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status}  {:width$}  {}\n", r.name, r.detail));
    }
    print!("{text}");
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_NUMERICAL,
            message: format!("{failed} check(s) failed"),
        })
    }
}
