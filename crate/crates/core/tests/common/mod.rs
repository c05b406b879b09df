use slowdown::model::ModelParams;

/// Transitions out of boundary state `(i, j)` with `i < s`:
/// `(rate, next_i, next_j)` for arrival, slow and fast completion.
pub fn boundary_moves(p: &ModelParams, i: usize, j: usize) -> Vec<(f64, usize, usize)> {
    let mut out = vec![(p.lambda(), i + 1, j + 1)];
    if i > j {
        out.push(((i - j) as f64 * p.mu_slow(), i - 1, j));
    }
    if j > 0 {
        out.push((j as f64 * p.mu_fast(), i - 1, j - 1));
    }
    out
}

/// Absorption probabilities of the boundary chain on `states`; a move that
/// `classify` maps to a class is absorbed there. Returns, per start state,
/// one probability per class. States are removed one at a time without
/// subtraction (state reduction), so tiny absorption rates stay accurate.
pub fn absorption<F>(
    p: &ModelParams,
    states: &[(usize, usize)],
    classes: usize,
    classify: F,
) -> Vec<Vec<f64>>
where
    F: Fn(usize, usize, usize, usize) -> Option<usize>,
{
    let n = states.len();
    let pos = |i: usize, j: usize| states.iter().position(|&s| s == (i, j));
    let mut q = vec![vec![0.0; n]; n];
    let mut a = vec![vec![0.0; classes]; n];
    for (r, &(i, j)) in states.iter().enumerate() {
        for (rate, ni, nj) in boundary_moves(p, i, j) {
            if let Some(c) = classify(i, j, ni, nj) {
                a[r][c] += rate;
            } else if let Some(t) = pos(ni, nj) {
                q[r][t] += rate;
            } else {
                panic!("move ({i},{j}) -> ({ni},{nj}) leaves the state space unclassified");
            }
        }
    }
    let mut out = vec![0.0; n];
    for m in (0..n).rev() {
        out[m] = q[m][..m].iter().sum::<f64>() + a[m].iter().sum::<f64>();
        for r in 0..m {
            let w = q[r][m];
            if w == 0.0 {
                continue;
            }
            q[r][m] = 0.0;
            for t in 0..m {
                q[r][t] += w * q[m][t] / out[m];
            }
            for c in 0..classes {
                a[r][c] += w * a[m][c] / out[m];
            }
        }
    }
    let mut h = vec![vec![0.0; classes]; n];
    for m in 0..n {
        for c in 0..classes {
            let via: f64 = (0..m).map(|t| q[m][t] * h[t][c]).sum();
            h[m][c] = (a[m][c] + via) / out[m];
        }
    }
    h
}
