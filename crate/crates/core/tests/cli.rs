use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowdown"))
        .args(args)
        .env_remove("SLOWDOWN_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const BASE: [&str; 8] = ["--servers", "15", "--lambda", "15", "--rho-fast", "0.7", "--rho-slow", "0.98"];

#[test]
fn solve_json_is_reproducible() {
    let args: Vec<&str> = ["solve"].iter().chain(BASE.iter()).copied().collect();
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let p_wait = v["results"]["p_wait"].as_f64().unwrap();
    assert!((p_wait - 0.6318).abs() < 1e-4);
    assert!(v["results"]["mean_system"].as_f64().unwrap() > 0.0);
}

#[test]
fn dimension_reports_staffing() {
    let o = run(&["dimension", "--mu-fast", "1", "--mu-slow", "0.9", "--lambda", "10", "--target", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = if v.get("results").is_some() { &v["results"] } else { &v };
    assert_eq!(r["s_fast"], 16);
    assert_eq!(r["s_slowdown"], 16);
}

#[test]
fn heatmap_csv_sums_to_visible_mass() {
    let args: Vec<&str> = ["heatmap"].iter().chain(BASE.iter()).chain(["--i-max", "40"].iter()).copied().collect();
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,probability"));
    let rows: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), (0..=40usize).map(|i| i.min(15) + 1).sum::<usize>());
    assert!(rows.iter().all(|r| r.1 <= r.0.min(15) && r.2 >= 0.0));
    let mass: f64 = rows.iter().map(|r| r.2).sum();
    assert!(mass > 0.5 && mass < 1.0);
}

#[test]
fn marginal_csv_and_json_agree() {
    let csv_args: Vec<&str> = ["marginal"].iter().chain(BASE.iter()).chain(["--i-max", "30"].iter()).copied().collect();
    let mut json_args = csv_args.clone();
    json_args.extend(["--format", "json"]);
    let csv = stdout(&run(&csv_args));
    let json: serde_json::Value = serde_json::from_slice(&run(&json_args).stdout).unwrap();
    let probs = json["results"]["probability"].as_array().unwrap();
    assert_eq!(csv.lines().count(), probs.len() + 1);
    let second: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(second, probs[0].as_f64().unwrap());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--servers", "3", "--lambda", "3", "--rho-fast", "0.8", "--rho-slow", "1.2"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--servers", "3"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--tier", "bogus"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_slowdown"))
        .args(["solve", "--servers", "2", "--lambda", "1", "--mu-fast", "1", "--mu-slow", "0.8"])
        .env("SLOWDOWN_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic_and_writes_files() {
    let dir = std::env::temp_dir().join(format!("slowdown-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("sim.json");
    let args = [
        "simulate", "--servers", "3", "--lambda", "2", "--mu-fast", "1.2", "--mu-slow", "1",
        "--horizon", "2000", "--seed", "5", "--output", out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(run(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&out).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_quick_passes() {
    let o = run(&["validate", "--tier", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}
