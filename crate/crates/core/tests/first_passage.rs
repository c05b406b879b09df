mod common;

use common::absorption;
use slowdown::boundary::{EscapeTable, LevelPassage, PsiTable, ThetaTable, UpPassage};
use slowdown::model::ModelParams;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1e-3)
}

/// theta_k(i, j) from an absorbing chain: phase first exceeds `j` at level `i + 1 - k`.
fn theta_oracle(p: &ModelParams, i: usize, j: usize) -> Vec<f64> {
    // before absorption the phase stays <= j and level - phase <= i - j
    let states: Vec<(usize, usize)> = (0..=i)
        .flat_map(|a| (0..=a.min(j)).map(move |b| (a, b)))
        .filter(|&(a, b)| a - b <= i - j)
        .collect();
    let probs = absorption(p, &states, i + 1, |_, _, ni, nj| {
        (nj == j + 1).then(|| i + 1 - ni)
    });
    let start = states.iter().position(|&st| st == (i, j)).unwrap();
    probs[start].clone()
}

#[test]
fn theta_matches_absorbing_chain() {
    let p = ModelParams::new(5, 3.0, 1.2, 1.0).unwrap();
    let theta = ThetaTable::compute(&p);
    let mut checked = 0;
    for i in 0..5 {
        for j in 0..=i {
            let oracle = theta_oracle(&p, i, j);
            assert!((oracle.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            for (k, &want) in oracle.iter().enumerate() {
                if theta.contains(k, i, j) {
                    let got = theta.get(k, i, j);
                    assert!(close(got, want), "theta_{k}({i},{j}) = {got}, oracle {want}");
                    checked += 1;
                } else {
                    assert!(want.abs() < 1e-15, "mass outside table at k={k} ({i},{j})");
                }
            }
            assert!((theta.escape(i, j) - (1.0 - oracle[0])).abs() < 1e-13);
        }
    }
    assert_eq!(checked, 35);
}

/// psi_(k, l)(k - 1, j) for all `l`: level `k` is first entered in phase `l`.
fn psi_oracle(p: &ModelParams, k: usize) -> Vec<Vec<f64>> {
    let states: Vec<(usize, usize)> = (0..k).flat_map(|a| (0..=a).map(move |b| (a, b))).collect();
    let probs = absorption(p, &states, k + 1, |_, _, ni, nj| (ni == k).then_some(nj));
    (0..k)
        .map(|j| probs[states.iter().position(|&st| st == (k - 1, j)).unwrap()].clone())
        .collect()
}

fn check_psi(p: &ModelParams) {
    let s = p.servers();
    let theta = ThetaTable::compute(p);
    let tables = PsiTable::compute(&theta);
    let level = LevelPassage::compute(p, &EscapeTable::compute(p));
    for k in 1..=s {
        let oracle = psi_oracle(p, k);
        for (j, row) in oracle.iter().enumerate() {
            let mass: f64 = row.iter().sum();
            assert!((mass - 1.0).abs() < 1e-12, "oracle mass {mass}");
            assert!(row[0] == 0.0);
            for l in 1..=k {
                let want = row[l];
                for (name, got) in [("tables", tables.from_below(k, l, j)), ("level", level.from_below(k, l, j))] {
                    assert!(close(got, want), "{name}: psi_({k},{l})({},{j}) = {got}, oracle {want}", k - 1);
                }
            }
        }
    }
}

#[test]
fn psi_matches_absorbing_chain() {
    check_psi(&ModelParams::new(3, 2.0, 1.5, 1.0).unwrap());
}

#[test]
fn psi_matches_absorbing_chain_larger() {
    check_psi(&ModelParams::new(8, 6.5, 1.4, 0.9).unwrap());
    check_psi(&ModelParams::new(6, 0.3, 2.0, 0.2).unwrap());
}

#[test]
fn psi_evaluation_count() {
    for s in [1usize, 4, 9] {
        let p = ModelParams::new(s, 0.5 * s as f64, 1.0, 0.8).unwrap();
        let t = PsiTable::compute(&ThetaTable::compute(&p));
        assert_eq!(t.evaluations() as usize, s * (s + 1) * (s + 2) * (s + 3) / 24);
    }
}
