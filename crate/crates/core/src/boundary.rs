//! Boundary probabilities (levels `0..=s`) in `O(s^4)` operations.
//!
//! Two families of first-passage probabilities drive the computation:
//!
//! * `theta_k(i, j)`: starting in boundary state `(i, j)`, the probability
//!   that the phase first increases (an arrival finding a free server) from
//!   level `i - k`, i.e. the process enters `(i + 1 - k, j + 1)`.
//! * `psi_(k,l)(i, j)`: starting in `(i, j)` below level `k`, the probability
//!   that level `k` is first entered in phase `l`.
//!
//! With `Psi` (from level `s - 1` into level `s`) and `G` (from level `s + 1`
//! into level `s`) the process censored on level `s` is a finite generator,
//! solved by GTH. The lower levels then follow one unknown at a time, and
//! every step of that recursion adds only non-negative terms.

use rayon::prelude::*;

use crate::error::{Result, SlowdownError, Stage};
use crate::linalg::{gth_unnormalized, Matrix};
use crate::model::{GeneratorBlocks, ModelParams};
use crate::rate_matrices::RateMatrices;

/// Values in `[-NEGATIVE_CLAMP, 0)` are rounded to zero; anything lower aborts.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// The triangle `T_(k,l) = {(i, j) : k - l <= i <= k - 1, 0 <= j <= i - (k - l)}`
/// of boundary states south-west of `(k, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangularSet {
    pub k: usize,
    pub l: usize,
}

impl TriangularSet {
    pub fn new(k: usize, l: usize) -> Self {
        assert!(l <= k, "anchor ({k},{l}) is not a state");
        TriangularSet { k, l }
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        let d = self.k - self.l;
        i >= d && i < self.k && j <= i - d
    }

    pub fn len(&self) -> usize {
        self.l * (self.l + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.k - self.l;
        (d..self.k).flat_map(move |i| (0..=i - d).map(move |j| (i, j)))
    }
}

/// `1 - theta_0(i, j)` for boundary states below level `s`, computed
/// directly rather than by subtraction.
#[derive(Debug, Clone)]
pub struct EscapeTable {
    rows: Vec<Vec<f64>>,
}

impl EscapeTable {
    pub fn compute(p: &ModelParams) -> Self {
        let s = p.servers();
        let (lambda, mf, ms) = (p.lambda(), p.mu_fast(), p.mu_slow());
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(s);
        for i in 0..s {
            let row = (0..=i)
                .map(|j| {
                    let slow = (i - j) as f64 * ms;
                    let fast_leak = if j > 0 { j as f64 * mf * rows[i - 1][j - 1] } else { 0.0 };
                    (slow + fast_leak) / (lambda + slow + fast_leak)
                })
                .collect();
            rows.push(row);
        }
        EscapeTable { rows }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }
}

/// `theta_k(i, j)` for `(i, j)` in `T_(s, s-k)`, stored as `values[k][i - k][j]`.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    s: usize,
    values: Vec<Vec<Vec<f64>>>,
    escape: EscapeTable,
}

impl ThetaTable {
    pub fn compute(p: &ModelParams) -> Self {
        let s = p.servers();
        let (lambda, mf, ms) = (p.lambda(), p.mu_fast(), p.mu_slow());
        let escape = EscapeTable::compute(p);
        let theta0: Vec<Vec<f64>> = (0..s)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let slow = (i - j) as f64 * ms;
                        let fast_leak = if j > 0 { j as f64 * mf * escape.get(i - 1, j - 1) } else { 0.0 };
                        lambda / (lambda + slow + fast_leak)
                    })
                    .collect()
            })
            .collect();

        let mut values = Vec::with_capacity(s);
        values.push(theta0);
        for k in 1..s {
            let mut level_rows: Vec<Vec<f64>> = Vec::with_capacity(s - k);
            for i in k..s {
                let mut row = Vec::with_capacity(i - k + 1);
                for j in 0..=i - k {
                    let slow = (i - j) as f64 * ms;
                    let mut num = slow * values[k - 1][i - 1 - (k - 1)][j];
                    let mut den = lambda + slow;
                    if j > 0 {
                        let fast = j as f64 * mf;
                        den += fast * escape.get(i - 1, j - 1);
                        let mut conv = 0.0;
                        for l in 1..=k.min(i - j) {
                            // theta_l(i-1, j-1) at l == k lives in the row being built.
                            let a = if l == k {
                                level_rows[i - 1 - k][j - 1]
                            } else {
                                values[l][i - 1 - l][j - 1]
                            };
                            let b = values[k - l][i - l - (k - l)][j];
                            conv += a * b;
                        }
                        num += fast * conv;
                    }
                    row.push(num / den);
                }
                level_rows.push(row);
            }
            values.push(level_rows);
        }
        ThetaTable { s, values, escape }
    }

    pub fn servers(&self) -> usize {
        self.s
    }

    pub fn contains(&self, k: usize, i: usize, j: usize) -> bool {
        i < self.s && i >= k && j + k <= i
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        debug_assert!(self.contains(k, i, j), "theta_{k}({i},{j}) outside T_(s,s-k)");
        self.values[k][i - k][j]
    }

    /// `1 - theta_0(i, j)`.
    pub fn escape(&self, i: usize, j: usize) -> f64 {
        self.escape.get(i, j)
    }

    pub fn escape_table(&self) -> &EscapeTable {
        &self.escape
    }
}

/// Probabilities of first entering level `k` in phase `l` from level `k - 1`.
pub trait UpPassage {
    fn servers(&self) -> usize;

    /// `psi_(k,l)(k - 1, j)` for `1 <= k <= s`; zero unless `j < l <= k`.
    fn from_below(&self, k: usize, l: usize, j: usize) -> f64;

    /// `Psi`, padded to `(s+1) x (s+1)`: entry `(j, l)` is `psi_(s,l)(s-1,j)`.
    /// Row `s` is zero because level `s - 1` has no phase `s`.
    fn level_s_matrix(&self) -> Matrix {
        let s = self.servers();
        let mut m = Matrix::zeros(s + 1, s + 1);
        for l in 1..=s {
            for j in 0..l {
                m[(j, l)] = self.from_below(s, l, j);
            }
        }
        m
    }
}

/// One-level upward passage matrices `U_k`, `U_k[j][l] = psi_(k,l)(k-1, j)`,
/// built level by level. Conditioning on the first jump out of `(k-1, j)`:
/// an arrival lands in `(k, j+1)`; a completion drops to level `k-2`, whose
/// return to level `k-1` is given by `U_{k-1}`, after which `U_k` applies
/// again. Every phase gain is at least one, so rows are solved from the
/// highest phase down and each step only adds non-negative terms.
#[derive(Debug, Clone)]
pub struct LevelPassage {
    s: usize,
    /// `rows[k - 1][j][l - j - 1]` for `j < l <= k`.
    rows: Vec<Vec<Vec<f64>>>,
}

impl LevelPassage {
    pub fn compute(p: &ModelParams, escape: &EscapeTable) -> Self {
        let s = p.servers();
        let (lambda, mf, ms) = (p.lambda(), p.mu_fast(), p.mu_slow());
        let mut rows: Vec<Vec<Vec<f64>>> = Vec::with_capacity(s);
        for k in 1..=s {
            let i = k - 1;
            let mut u: Vec<Vec<f64>> = (0..k).map(|j| vec![0.0; k - j]).collect();
            for j in (0..k).rev() {
                let slow = (i - j) as f64 * ms;
                let fast = j as f64 * mf;
                let mut acc = vec![0.0; k - j];
                acc[0] = lambda;
                if slow > 0.0 {
                    // (i, j) -> (i-1, j) -> level i in phase m > j.
                    for (off, &w) in rows[k - 2][j].iter().enumerate() {
                        let m = j + 1 + off;
                        add_scaled(&mut acc[m - j..], &u[m], slow * w);
                    }
                }
                if fast > 0.0 && i > 0 {
                    // (i, j) -> (i-1, j-1) -> level i in phase m; m = j is the diagonal term.
                    for (off, &w) in rows[k - 2][j - 1].iter().enumerate().skip(1) {
                        let m = j + off;
                        add_scaled(&mut acc[m - j..], &u[m], fast * w);
                    }
                }
                let leak = if j > 0 && i > 0 { fast * escape.get(i - 1, j - 1) } else { 0.0 };
                let den = lambda + slow + leak;
                u[j] = acc.into_iter().map(|v| v / den).collect();
            }
            rows.push(u);
        }
        LevelPassage { s, rows }
    }
}

/// `dst[t] += w * src[t]` where `src` covers phases above `dst`'s start.
fn add_scaled(dst: &mut [f64], src: &[f64], w: f64) {
    for (d, v) in dst.iter_mut().zip(src) {
        *d += w * v;
    }
}

impl UpPassage for LevelPassage {
    fn servers(&self) -> usize {
        self.s
    }

    fn from_below(&self, k: usize, l: usize, j: usize) -> f64 {
        debug_assert!(l >= 1 && l <= k && k <= self.s);
        if j >= l {
            0.0
        } else {
            self.rows[k - 1][j][l - j - 1]
        }
    }
}

/// First-passage probabilities `psi_(k,l)`. Only the entries from level
/// `k - 1` are kept, which is all the boundary recursion and `Psi` need.
#[derive(Debug, Clone)]
pub struct PsiTable {
    s: usize,
    /// `top[k - 1][l - 1][j] = psi_(k,l)(k - 1, j)` for `0 <= j < l <= k <= s`.
    top: Vec<Vec<Vec<f64>>>,
    evaluations: u64,
}

impl PsiTable {
    pub fn compute(theta: &ThetaTable) -> Self {
        let s = theta.servers();
        let anchors: Vec<(usize, usize)> =
            (1..=s).flat_map(|k| (1..=k).map(move |l| (k, l))).collect();
        let tables: Vec<(Vec<f64>, u64)> = anchors
            .par_iter()
            .map(|&(k, l)| psi_anchor(theta, k, l))
            .collect();

        let mut top: Vec<Vec<Vec<f64>>> = (1..=s).map(|k| Vec::with_capacity(k)).collect();
        let mut evaluations = 0;
        for (&(k, _), (row, count)) in anchors.iter().zip(tables) {
            top[k - 1].push(row);
            evaluations += count;
        }
        PsiTable {
            s,
            top,
            evaluations,
        }
    }

    /// Number of `(k, l, i, j)` combinations evaluated.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

impl UpPassage for PsiTable {
    fn servers(&self) -> usize {
        self.s
    }

    /// Zero when `j >= l` since the phase cannot fall on the way up.
    fn from_below(&self, k: usize, l: usize, j: usize) -> f64 {
        debug_assert!(l >= 1 && l <= k && k <= self.s);
        self.top[k - 1][l - 1].get(j).copied().unwrap_or(0.0)
    }
}

/// Evaluates `psi_(k,l)` over `T_(k,l)` and returns the level `k - 1` row.
fn psi_anchor(theta: &ThetaTable, k: usize, l: usize) -> (Vec<f64>, u64) {
    let d = k - l;
    let idx = |a: usize, j: usize| a * (a + 1) / 2 + j;
    let mut table = vec![0.0; l * (l + 1) / 2];
    let mut count = 0;
    for j in (0..l).rev() {
        for a in j..l {
            let i = d + a;
            let mut v = 0.0;
            for m in d + j + 1..=i + 1 {
                let target = if m == k {
                    if j + 1 == l {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    table[idx(m - d, j + 1)]
                };
                if target != 0.0 {
                    v += theta.get(i + 1 - m, i, j) * target;
                }
            }
            table[idx(a, j)] = v;
            count += 1;
        }
    }
    let a_top = l - 1;
    let row = (0..l).map(|j| table[idx(a_top, j)]).collect();
    (row, count)
}

/// Generator of the process censored on level `s`: `down Psi + local + up G`.
pub fn level_s_generator(blocks: &GeneratorBlocks, g: &Matrix, psi: &Matrix) -> Matrix {
    blocks
        .down
        .mul(psi)
        .add(&blocks.local)
        .add(&blocks.up.mul(g))
}

/// Unnormalised stationary vector of the censored level-`s` process.
///
/// Phases are eliminated from 0 upward so phase `s`, which is always
/// recurrent, is eliminated last and fixed at 1.
pub fn solve_level_s(blocks: &GeneratorBlocks, g: &Matrix, psi: &Matrix) -> Result<Vec<f64>> {
    let m = level_s_generator(blocks, g, psi);
    let n = m.rows();
    for (j, sum) in m.row_sums().into_iter().enumerate() {
        let scale = m[(j, j)].abs().max(1.0);
        if sum.abs() > 1e-8 * scale {
            return Err(SlowdownError::numerical(
                Stage::LevelS,
                format!("embedded generator row {j} sums to {sum:e}"),
            ));
        }
    }
    let mut reversed = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            reversed[(a, b)] = m[(n - 1 - a, n - 1 - b)];
        }
    }
    let pi = gth_unnormalized(&reversed, Stage::LevelS)?;
    Ok(pi.into_iter().rev().collect())
}

/// Solves the balance equations of the process censored on levels `>= i`
/// for `i = s-1, ..., 1`, then the empty state. Returns levels `0..=s`,
/// unnormalised, with level `s` equal to `p_s`.
pub fn backward_boundary(
    p: &ModelParams,
    escape: &EscapeTable,
    psi: &impl UpPassage,
    p_s: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let s = p.servers();
    assert_eq!(p_s.len(), s + 1);
    let (lambda, mf, ms) = (p.lambda(), p.mu_fast(), p.mu_slow());
    let mut levels: Vec<Vec<f64>> = (0..=s).map(|i| vec![0.0; i + 1]).collect();
    levels[s].copy_from_slice(p_s);

    for i in (1..s).rev() {
        let (lower, upper) = levels.split_at_mut(i + 1);
        let above = &upper[0];
        let current = &mut lower[i];
        for j in 0..=i {
            let mut coef = lambda + (i - j) as f64 * ms;
            if j > 0 {
                coef += j as f64 * mf * escape.get(i - 1, j - 1);
            }
            let mut rhs = above[j] * (i + 1 - j) as f64 * ms + above[j + 1] * (j + 1) as f64 * mf;
            for k in 0..j {
                rhs += current[k] * (i - k) as f64 * ms * psi.from_below(i, j, k);
            }
            for k in 1..j {
                rhs += current[k] * k as f64 * mf * psi.from_below(i, j, k - 1);
            }
            current[j] = clamp_negative(rhs / coef, i, j)?;
        }
    }
    levels[0][0] = clamp_negative((levels[1][0] * ms + levels[1][1] * mf) / lambda, 0, 0)?;
    Ok(levels)
}

fn clamp_negative(v: f64, i: usize, j: usize) -> Result<f64> {
    if !v.is_finite() || v < -NEGATIVE_CLAMP {
        Err(SlowdownError::numerical(
            Stage::BackwardBoundary,
            format!("p({i},{j}) = {v:e}"),
        ))
    } else {
        Ok(v.max(0.0))
    }
}

/// Unnormalised levels `0..=s` given `G` for level `s`, using [`LevelPassage`].
pub(crate) fn solve_boundary(
    p: &ModelParams,
    blocks: &GeneratorBlocks,
    g: &Matrix,
) -> Result<Vec<Vec<f64>>> {
    let escape = EscapeTable::compute(p);
    let passage = LevelPassage::compute(p, &escape);
    let p_s = solve_level_s(blocks, g, &passage.level_s_matrix())?;
    backward_boundary(p, &escape, &passage, &p_s)
}

/// Same as the production path but through the full `theta`/`psi` tables.
/// `O(s^5)` work; kept as a reference.
pub fn solve_boundary_with_tables(
    p: &ModelParams,
    blocks: &GeneratorBlocks,
    g: &Matrix,
) -> Result<Vec<Vec<f64>>> {
    let theta = ThetaTable::compute(p);
    let psi = PsiTable::compute(&theta);
    let p_s = solve_level_s(blocks, g, &psi.level_s_matrix())?;
    backward_boundary(p, theta.escape_table(), &psi, &p_s)
}

/// Probability mass above level `s`.
#[derive(Debug, Clone)]
pub enum Tail {
    /// `p_{s+k} = p_s R^k` for all `k >= 0`.
    Geometric(RateMatrices),
    /// Normalised levels `s+1, s+2, ...` listed explicitly; beyond the last
    /// listed level the mass is zero.
    Explicit(Vec<Vec<f64>>),
}

/// Normalised stationary distribution.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    s: usize,
    levels: Vec<Vec<f64>>,
    tail: Tail,
    normalizer: f64,
}

/// Divides everything by the total mass. `levels` holds levels `0..=s`
/// (unnormalised); an explicit tail must be on the same scale.
pub fn normalize(levels: Vec<Vec<f64>>, tail: Tail) -> Result<StationaryDistribution> {
    let s = levels.len() - 1;
    let below: f64 = levels[..s].iter().flatten().sum();
    let upper = match &tail {
        Tail::Geometric(rm) => {
            let ones = vec![1.0; s + 1];
            let v = rm.inv_i_minus_r.as_matrix().right_mul(&ones);
            dot(&levels[s], &v)
        }
        Tail::Explicit(extra) => levels[s].iter().sum::<f64>() + extra.iter().flatten().sum::<f64>(),
    };
    let total = below + upper;
    if !(total > 0.0) || !total.is_finite() {
        return Err(SlowdownError::numerical(
            Stage::Normalize,
            format!("total mass {total:e}"),
        ));
    }
    let scale = |rows: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        rows.into_iter()
            .map(|r| r.into_iter().map(|v| v / total).collect())
            .collect()
    };
    let tail = match tail {
        Tail::Explicit(extra) => Tail::Explicit(scale(extra)),
        geometric => geometric,
    };
    Ok(StationaryDistribution {
        s,
        levels: scale(levels),
        tail,
        normalizer: total,
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl StationaryDistribution {
    pub fn servers(&self) -> usize {
        self.s
    }

    /// Total unnormalised mass that was divided out.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// `p_s`, the level-`s` vector.
    pub fn level_s(&self) -> &[f64] {
        &self.levels[self.s]
    }

    /// Highest level with positive mass, if finite.
    pub fn max_level(&self) -> Option<usize> {
        match &self.tail {
            Tail::Geometric(_) => None,
            Tail::Explicit(extra) => Some(self.s + extra.len()),
        }
    }

    /// Probability vector of level `i` (length `min(i, s) + 1`).
    pub fn level(&self, i: usize) -> Vec<f64> {
        if i <= self.s {
            return self.levels[i].clone();
        }
        match &self.tail {
            Tail::Geometric(rm) => {
                let mut v = self.levels[self.s].clone();
                for _ in self.s..i {
                    v = rm.r.as_matrix().left_mul(&v);
                }
                v
            }
            Tail::Explicit(extra) => extra
                .get(i - self.s - 1)
                .cloned()
                .unwrap_or_else(|| vec![0.0; self.s + 1]),
        }
    }

    /// Iterator over level vectors `0, 1, 2, ...` (infinite for a geometric tail).
    pub fn levels(&self) -> LevelIter<'_> {
        LevelIter {
            dist: self,
            next: 0,
            current: None,
        }
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        if j > i.min(self.s) {
            return 0.0;
        }
        self.level(i)[j]
    }

    /// `P(L >= s)`, which by PASTA is the delay probability `P(W > 0)`.
    pub fn p_wait(&self) -> f64 {
        match &self.tail {
            Tail::Geometric(rm) => {
                let ones = vec![1.0; self.s + 1];
                dot(self.level_s(), &rm.inv_i_minus_r.as_matrix().right_mul(&ones))
            }
            Tail::Explicit(extra) => {
                self.level_s().iter().sum::<f64>() + extra.iter().flatten().sum::<f64>()
            }
        }
    }

    /// `E[Q]`, the mean number waiting.
    pub fn mean_queue(&self) -> f64 {
        match &self.tail {
            Tail::Geometric(rm) => {
                let ones = vec![1.0; self.s + 1];
                let inv = rm.inv_i_minus_r.as_matrix();
                let once = inv.right_mul(&ones);
                let twice = inv.right_mul(&once);
                dot(self.level_s(), &rm.r.as_matrix().right_mul(&twice))
            }
            Tail::Explicit(extra) => extra
                .iter()
                .enumerate()
                .map(|(k, lvl)| (k + 1) as f64 * lvl.iter().sum::<f64>())
                .sum(),
        }
    }

    /// Mean number of busy servers.
    pub fn mean_busy(&self) -> f64 {
        let below: f64 = self.levels[..self.s]
            .iter()
            .enumerate()
            .map(|(i, lvl)| i as f64 * lvl.iter().sum::<f64>())
            .sum();
        below + self.s as f64 * self.p_wait()
    }

    /// Mass below level `s` plus everything at or above it.
    pub fn total_mass(&self) -> f64 {
        let below: f64 = self.levels[..self.s].iter().flatten().sum();
        below + self.p_wait()
    }
}

pub struct LevelIter<'a> {
    dist: &'a StationaryDistribution,
    next: usize,
    current: Option<Vec<f64>>,
}

impl Iterator for LevelIter<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let d = self.dist;
        let i = self.next;
        let out = if i <= d.s {
            d.levels[i].clone()
        } else {
            match &d.tail {
                Tail::Geometric(rm) => {
                    let prev = self.current.as_ref().expect("previous level");
                    rm.r.as_matrix().left_mul(prev)
                }
                Tail::Explicit(extra) => extra.get(i - d.s - 1)?.clone(),
            }
        };
        self.next += 1;
        self.current = Some(out.clone());
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_set_geometry() {
        let t = TriangularSet::new(5, 3);
        let states: Vec<_> = t.states().collect();
        assert_eq!(states.len(), t.len());
        assert_eq!(states, vec![(2, 0), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2)]);
        assert!(t.contains(4, 2) && !t.contains(4, 3) && !t.contains(1, 0) && !t.contains(5, 0));
        assert!(TriangularSet::new(4, 0).is_empty());
        assert_eq!(TriangularSet::new(4, 0).states().count(), 0);
    }

    #[test]
    fn theta_diagonal_and_phase_zero() {
        let p = ModelParams::new(6, 3.0, 1.2, 1.0).unwrap();
        let t = ThetaTable::compute(&p);
        for i in 0..6 {
            assert_eq!(t.get(0, i, i), 1.0);
            assert_eq!(t.escape(i, i), 0.0);
            let expect = 3.0 / (3.0 + i as f64 * 1.0);
            assert!((t.get(0, i, 0) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn theta_rows_are_distributions() {
        let p = ModelParams::new(5, 3.0, 1.2, 1.0).unwrap();
        let t = ThetaTable::compute(&p);
        for i in 0..5 {
            for j in 0..=i {
                let total: f64 = (0..=i - j).map(|k| t.get(k, i, j)).sum();
                assert!((total - 1.0).abs() < 1e-12, "({i},{j}) sums to {total}");
                for k in 0..=i - j {
                    assert!((0.0..=1.0).contains(&t.get(k, i, j)));
                }
            }
        }
    }

    #[test]
    fn psi_evaluation_count() {
        for s in [1usize, 2, 3, 7, 12] {
            let p = ModelParams::new(s, 1.0, 1.5, 1.0).unwrap();
            let psi = PsiTable::compute(&ThetaTable::compute(&p));
            let expected = (s * (s + 1) * (s + 2) * (s + 3) / 24) as u64;
            assert_eq!(psi.evaluations(), expected);
        }
    }

    #[test]
    fn psi_matrix_is_stochastic() {
        let p = ModelParams::new(9, 7.0, 1.1, 0.8).unwrap();
        let psi = PsiTable::compute(&ThetaTable::compute(&p));
        let m = psi.level_s_matrix();
        for j in 0..9 {
            assert!((m.row(j).iter().sum::<f64>() - 1.0).abs() < 1e-10);
            assert!(m.row(j)[..=j].iter().all(|&v| v == 0.0));
        }
        assert!(m.row(9).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn level_passage_matches_psi_tables() {
        for &(s, l, mf, ms) in &[(1usize, 1.0, 2.0, 1.25), (4, 2.5, 1.3, 0.9), (11, 9.0, 1.4, 0.95)] {
            let p = ModelParams::new(s, l, mf, ms).unwrap();
            let theta = ThetaTable::compute(&p);
            let psi = PsiTable::compute(&theta);
            let fast = LevelPassage::compute(&p, theta.escape_table());
            for k in 1..=s {
                for l in 1..=k {
                    for j in 0..k {
                        let (a, b) = (psi.from_below(k, l, j), fast.from_below(k, l, j));
                        assert!((a - b).abs() <= 1e-13, "k={k} l={l} j={j}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn empty_state_from_level_one() {
        let p = ModelParams::new(3, 2.0, 1.5, 1.0).unwrap();
        let blocks = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &blocks).unwrap();
        let levels = solve_boundary(&p, &blocks, rm.g.as_matrix()).unwrap();
        let expect = (levels[1][0] * 1.0 + levels[1][1] * 1.5) / 2.0;
        assert!((levels[0][0] - expect).abs() < 1e-15);
    }

    #[test]
    fn normalization_is_scale_invariant() {
        let p = ModelParams::new(4, 2.5, 1.3, 0.9).unwrap();
        let blocks = GeneratorBlocks::new(&p);
        let rm = RateMatrices::compute(&p, &blocks).unwrap();
        let levels = solve_boundary(&p, &blocks, rm.g.as_matrix()).unwrap();
        let scaled: Vec<Vec<f64>> = levels
            .iter()
            .map(|l| l.iter().map(|v| v * 7.0).collect())
            .collect();
        let a = normalize(levels, Tail::Geometric(rm.clone())).unwrap();
        let b = normalize(scaled, Tail::Geometric(rm)).unwrap();
        assert!((a.total_mass() - 1.0).abs() < 1e-12);
        for i in 0..=6 {
            for (x, y) in a.level(i).iter().zip(b.level(i)) {
                assert!((x - y).abs() <= 1e-13 * x.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn zero_mass_is_fatal() {
        let levels = vec![vec![0.0], vec![0.0, 0.0]];
        assert!(matches!(
            normalize(levels, Tail::Explicit(vec![])),
            Err(SlowdownError::Numerical { stage: Stage::Normalize, .. })
        ));
    }

    #[test]
    fn negative_beyond_tolerance_aborts() {
        assert_eq!(clamp_negative(-1e-13, 1, 0).unwrap(), 0.0);
        assert!(clamp_negative(-1e-9, 1, 0).is_err());
        assert!(clamp_negative(f64::NAN, 1, 0).is_err());
    }
}
