//! Transition probabilities `μ_k(w;q)` of the q-Plancherel growth process.
//!
//! For a rectangular diagram with minima `x_1 < … < x_{m+1}` and maxima
//! `y_1 < … < y_m`, the weights are the coefficients of the partial fraction
//! expansion
//!
//! ```text
//! Π_i (1 − q^{x−y_i}) / Π_i (1 − q^{x−x_i}) = Σ_k μ_k / (1 − q^{x−x_k}).
//! ```
//!
//! Factors with negative exponent are rewritten as
//! `(1−q^{−a})/(1−q^{−b}) = q^{b−a} (1−q^a)/(1−q^b)` so that every ratio lies
//! in `(0, 1]` and nothing overflows.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagrams::{InterlacingDiagram, Partition};
use crate::error::{Error, Result};
use crate::qmeasure::{decimal_rational, pow_rational, rational_to_f64, QParam};

/// Largest trajectory length accepted by [`grow_trajectory`].
pub const DEFAULT_MAX_GROWTH_N: usize = 100_000;

/// Probabilities aligned with the minima of a diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionWeights {
    weights: Vec<f64>,
}

impl TransitionWeights {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Largest componentwise difference.
    pub fn max_abs_diff(&self, other: &TransitionWeights) -> f64 {
        assert_eq!(self.len(), other.len(), "weight vectors differ in length");
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl From<TransitionWeights> for Vec<f64> {
    fn from(w: TransitionWeights) -> Vec<f64> {
        w.weights
    }
}

/// `μ_k(w;q)` by the product formula; at `q = 1` the classical residues
/// `Π_i (x_k − y_i) / Π_{i≠k} (x_k − x_i)`.
pub fn transition_weights(w: &InterlacingDiagram, q: QParam) -> TransitionWeights {
    let x = w.minima();
    let y = w.maxima();
    let len = x.len();
    let factor = |d: f64| -> f64 {
        if q.is_classical() {
            d
        } else {
            q.one_minus_pow(d)
        }
    };
    // suffix[k] = Σ_{i>k} (x_i − y_{i−1})
    let mut suffix = vec![0.0; len];
    for k in (0..len - 1).rev() {
        suffix[k] = suffix[k + 1] + (x[k + 1] - y[k]);
    }
    let weights = (0..len)
        .map(|k| {
            let mut acc = 1.0;
            for i in 0..k {
                acc *= factor(x[k] - y[i]) / factor(x[k] - x[i]);
            }
            for i in k + 1..len {
                acc *= factor(y[i - 1] - x[k]) / factor(x[i] - x[k]);
            }
            if q.is_classical() {
                acc
            } else {
                acc * q.pow(suffix[k])
            }
        })
        .collect();
    TransitionWeights { weights }
}

/// Default oracle grid: `m+1` equally spaced points on `[x_max+2, x_max+m+2]`.
pub fn default_grid(w: &InterlacingDiagram) -> Vec<f64> {
    let (_, hi) = w.support();
    (0..=w.m()).map(|j| hi + 2.0 + j as f64).collect()
}

/// Transition weights recovered by solving the linear system that equates
/// `Σ_k μ_k/(1−q^{x−x_k})` with the diagram's product at each grid point.
///
/// When the diagram and the grid are integral the system is solved in exact
/// rational arithmetic (`q` taken as its shortest decimal), which
/// keeps the oracle independent of the conditioning of the Cauchy-like
/// matrix. Otherwise an LU solve with partial pivoting is used.
pub fn partial_fraction_weights(
    w: &InterlacingDiagram,
    q: QParam,
    x_grid: &[f64],
) -> Result<TransitionWeights> {
    let len = w.minima().len();
    if x_grid.len() < len {
        return Err(Error::InvalidArgument(format!(
            "grid has {} points, need at least {len}",
            x_grid.len()
        )));
    }
    let (_, hi) = w.support();
    if let Some(&bad) = x_grid.iter().find(|&&g| g <= hi + 1.0) {
        return Err(Error::Singular(format!(
            "grid point {bad} not above x_max + 1 = {}",
            hi + 1.0
        )));
    }
    let grid = &x_grid[..len];
    let integral = w
        .minima()
        .iter()
        .chain(w.maxima())
        .chain(grid)
        .all(|v| v.fract() == 0.0 && v.abs() < 1e6);
    let weights = if integral {
        solve_exact(w, q, grid)?
    } else {
        solve_float(w, q, grid)?
    };
    Ok(TransitionWeights { weights })
}

fn solve_exact(w: &InterlacingDiagram, q: QParam, grid: &[f64]) -> Result<Vec<f64>> {
    let one = BigRational::one();
    let qr = decimal_rational(q.q());
    // 1 − q^d for integer d (d may be negative), or d itself at q = 1
    let factor = |d: i64| -> BigRational {
        if q.is_classical() {
            BigRational::from_integer(BigInt::from(d))
        } else if d >= 0 {
            &one - pow_rational(&qr, d as u64)
        } else {
            &one - pow_rational(&qr, (-d) as u64).recip()
        }
    };
    let xs: Vec<i64> = w.minima().iter().map(|&v| v as i64).collect();
    let ys: Vec<i64> = w.maxima().iter().map(|&v| v as i64).collect();
    let len = xs.len();
    let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(len);
    for &g in grid {
        let g = g as i64;
        let mut row: Vec<BigRational> = xs.iter().map(|&xk| factor(g - xk).recip()).collect();
        let mut rhs = BigRational::one();
        for &yi in &ys {
            rhs *= factor(g - yi);
        }
        for &xi in &xs {
            rhs /= factor(g - xi);
        }
        row.push(rhs);
        a.push(row);
    }
    // Gauss–Jordan elimination on the augmented matrix
    for col in 0..len {
        let pivot = (col..len)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Singular(format!("column {col} has no pivot")))?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..=len {
                let delta = &f * &pivot_row[c];
                row[c] -= delta;
            }
        }
    }
    Ok(a.iter().map(|row| rational_to_f64(&row[len])).collect())
}

fn solve_float(w: &InterlacingDiagram, q: QParam, grid: &[f64]) -> Result<Vec<f64>> {
    let factor = |d: f64| if q.is_classical() { d } else { q.one_minus_pow(d) };
    let len = w.minima().len();
    let mut a = vec![vec![0.0; len + 1]; len];
    for (r, &g) in grid.iter().enumerate() {
        for (c, &xk) in w.minima().iter().enumerate() {
            a[r][c] = 1.0 / factor(g - xk);
        }
        let mut rhs = 1.0;
        for (i, &xi) in w.minima().iter().enumerate() {
            if i < w.m() {
                rhs *= factor(g - w.maxima()[i]);
            }
            rhs /= factor(g - xi);
        }
        a[r][len] = rhs;
    }
    for col in 0..len {
        let pivot = (col..len)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Singular(format!("column {col} has no pivot")));
        }
        a.swap(col, pivot);
        for r in col + 1..len {
            let f = a[r][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(r);
            for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * p;
            }
        }
    }
    let mut sol = vec![0.0; len];
    for r in (0..len).rev() {
        let s: f64 = (r + 1..len).map(|c| a[r][c] * sol[c]).sum();
        sol[r] = (a[r][len] - s) / a[r][r];
    }
    Ok(sol)
}

/// Transition weights of integral diagrams with `1 − q^d` tabulated.
pub struct LatticeKernel {
    q: QParam,
    table: Vec<f64>,
}

impl LatticeKernel {
    pub fn new(q: QParam) -> Self {
        LatticeKernel {
            q,
            table: vec![0.0],
        }
    }

    fn ensure(&mut self, d: usize) {
        while self.table.len() <= d {
            let k = self.table.len() as f64;
            let v = if self.q.is_classical() {
                k
            } else {
                self.q.one_minus_pow(k)
            };
            self.table.push(v);
        }
    }

    /// Writes `μ_k` for the integral profile into `out`.
    pub fn weights_into(&mut self, minima: &[i64], maxima: &[i64], out: &mut Vec<f64>) {
        let len = minima.len();
        let span = (minima[len - 1] - minima[0]) as usize;
        self.ensure(span);
        out.clear();
        let tab = &self.table;
        let mut suffix = 0i64;
        out.resize(len, 0.0);
        for k in (0..len).rev() {
            let xk = minima[k];
            let mut acc = 1.0;
            for i in 0..k {
                acc *= tab[(xk - maxima[i]) as usize] / tab[(xk - minima[i]) as usize];
            }
            for i in k + 1..len {
                acc *= tab[(maxima[i - 1] - xk) as usize] / tab[(minima[i] - xk) as usize];
            }
            out[k] = if self.q.is_classical() {
                acc
            } else {
                acc * self.q.pow(suffix as f64)
            };
            if k > 0 {
                suffix += minima[k] - maxima[k - 1];
            }
        }
    }
}

/// Inverse-CDF sampling over unnormalized weights with a Kahan-summed
/// cumulative sum; ties resolve to the smaller index.
pub fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let mut total = 0.0;
    let mut comp = 0.0;
    let mut cumulative = Vec::with_capacity(weights.len());
    for &w in weights {
        let y = w - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
        cumulative.push(total);
    }
    let u = rng.gen::<f64>() * total;
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(weights.len() - 1)
}

/// The random generator for trajectory `stream` of an experiment seeded by
/// `seed`: ChaCha8 with a 64-bit seed and a 64-bit stream id.
pub fn trajectory_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A path `∅ = λ^{(0)} ⊂ λ^{(1)} ⊂ …` stored as the row receiving each box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrajectory {
    rows: Vec<u32>,
    seed: u64,
    stream: u64,
    q: QParam,
}

impl GrowthTrajectory {
    /// Rebuilds a trajectory from its row sequence, checking every step.
    pub fn from_rows(rows: Vec<u32>, seed: u64, stream: u64, q: QParam) -> Result<Self> {
        let mut lam = Partition::empty();
        for &r in &rows {
            lam.add_box(r as usize)?;
        }
        Ok(GrowthTrajectory {
            rows,
            seed,
            stream,
            q,
        })
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn q(&self) -> QParam {
        self.q
    }

    /// Number of boxes added.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// All states `λ^{(0)}, …, λ^{(n)}`.
    pub fn states(&self) -> Vec<Partition> {
        let mut lam = Partition::empty();
        let mut out = Vec::with_capacity(self.rows.len() + 1);
        out.push(lam.clone());
        for &r in &self.rows {
            lam.add_box(r as usize).expect("validated trajectory");
            out.push(lam.clone());
        }
        out
    }

    pub fn final_shape(&self) -> Partition {
        let mut lam = Partition::empty();
        for &r in &self.rows {
            lam.add_box(r as usize).expect("validated trajectory");
        }
        lam
    }
}

/// Runs the chain for `n` steps from the empty diagram on stream 0.
pub fn grow_trajectory(n: usize, q: QParam, seed: u64) -> Result<GrowthTrajectory> {
    grow_trajectory_stream(n, q, seed, 0)
}

pub fn grow_trajectory_stream(n: usize, q: QParam, seed: u64, stream: u64) -> Result<GrowthTrajectory> {
    if n > DEFAULT_MAX_GROWTH_N {
        return Err(Error::Capacity {
            what: "trajectory length",
            value: n as u64,
            limit: DEFAULT_MAX_GROWTH_N as u64,
        });
    }
    let mut rng = trajectory_rng(seed, stream);
    let mut kernel = LatticeKernel::new(q);
    let mut lam = Partition::empty();
    let mut rows = Vec::with_capacity(n);
    let mut weights = Vec::new();
    for _ in 0..n {
        let profile = lam.profile();
        kernel.weights_into(&profile.minima, &profile.maxima, &mut weights);
        let k = sample_index(&weights, &mut rng);
        let row = lam.row_for_minimum(k).expect("index within minima");
        lam.add_box(row).expect("addable row");
        rows.push(row as u32);
    }
    Ok(GrowthTrajectory {
        rows,
        seed,
        stream,
        q,
    })
}

/// Probability of a path under the chain: the product of its transition
/// weights. Used to check that level marginals equal `M_q^{(n)}`.
pub fn path_probability(rows: &[u32], q: QParam) -> Result<f64> {
    let mut lam = Partition::empty();
    let mut prob = 1.0;
    for &r in rows {
        let r = r as usize;
        let addable = lam.addable_rows();
        let idx = addable
            .iter()
            .position(|&a| a == r)
            .ok_or_else(|| Error::InvalidArgument(format!("row {r} not addable in {lam}")))?;
        // minima are ordered opposite to rows
        let k = addable.len() - 1 - idx;
        let w = transition_weights(&lam.to_interlacing(), q);
        prob *= w.weights()[k];
        lam.add_box(r)?;
    }
    Ok(prob)
}

/// Exact level-`n` law of the chain, obtained by pushing the distribution
/// forward one level at a time.
pub fn level_distribution(n: usize, q: QParam) -> Vec<(Partition, f64)> {
    use std::collections::BTreeMap;
    let mut current: BTreeMap<Partition, f64> = BTreeMap::new();
    current.insert(Partition::empty(), 1.0);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (lam, p) in &current {
            let w = transition_weights(&lam.to_interlacing(), q);
            for (k, &mu) in w.weights().iter().enumerate() {
                let mut child = lam.clone();
                child
                    .add_box(lam.row_for_minimum(k).expect("index within minima"))
                    .expect("addable row");
                *next.entry(child).or_insert(0.0) += p * mu;
            }
        }
        current = next;
    }
    current.into_iter().rev().collect()
}

/// Whether every weight is positive and the weights sum to 1 within `tol`.
pub fn is_probability(w: &TransitionWeights, tol: f64) -> bool {
    w.weights.iter().all(|&v| v > 0.0) && (w.total() - 1.0).abs() <= tol
}
