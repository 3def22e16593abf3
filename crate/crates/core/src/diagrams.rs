//! Young diagrams: enumeration of levels of the Young graph, hook lengths and
//! dimensions, and the interlacing-sequence (rectangular diagram) form of a
//! diagram's profile.
//!
//! Profiles use the Russian convention: the box in row `i`, column `j`
//! (0-indexed) has content `j - i` and occupies the unit-diagonal square
//! centred at `s = j - i` above the graph of `|s|`. The local minima of the
//! profile sit at the contents of the addable cells and the local maxima at
//! the contents of the removable cells.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest level for which [`hook_data`] computes exact dimensions.
pub const DEFAULT_MAX_DIM_N: usize = 40;

/// Largest number of partitions [`enumerate_level`] will materialize.
pub const DEFAULT_MAX_PARTITIONS: u64 = 1 << 22;

/// A partition `λ_1 ≥ λ_2 ≥ … ≥ λ_l ≥ 1`.
///
/// The derived `Ord` is plain lexicographic order on the parts; the canonical
/// order used by [`enumerate_level`] is the reverse of it.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be positive",
            });
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be weakly decreasing",
            });
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// A single row of `n` boxes.
    pub fn row(n: u32) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    /// A single column of `n` boxes.
    pub fn column(n: u32) -> Self {
        Partition {
            parts: vec![1; n as usize],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// Number of rows `l(λ)`.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Row length with the convention `λ_i = 0` past the last row.
    pub fn row_len(&self, i: usize) -> u32 {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.row_len(0) as usize;
        let mut cols = vec![0u32; width];
        for &p in &self.parts {
            for c in cols.iter_mut().take(p as usize) {
                *c += 1;
            }
        }
        Partition { parts: cols }
    }

    /// `b(λ) = Σ (i-1) λ_i` with rows numbered from 1.
    pub fn b_stat(&self) -> u64 {
        self.parts
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }

    /// Rows (0-indexed) where a box can be added, top to bottom. Row
    /// `length()` is always addable.
    pub fn addable_rows(&self) -> Vec<usize> {
        (0..=self.parts.len())
            .filter(|&i| i == 0 || self.row_len(i) < self.parts[i - 1])
            .collect()
    }

    /// Rows (0-indexed) whose last box can be removed, top to bottom.
    pub fn removable_rows(&self) -> Vec<usize> {
        (0..self.parts.len())
            .filter(|&i| self.row_len(i + 1) < self.parts[i])
            .collect()
    }

    /// Adds a box at the end of `row`, which must be addable.
    pub fn add_box(&mut self, row: usize) -> Result<()> {
        let addable = row == 0 || (row <= self.parts.len() && self.row_len(row) < self.parts[row - 1]);
        if !addable {
            return Err(Error::InvalidArgument(format!(
                "row {row} is not addable in {self}"
            )));
        }
        if row == self.parts.len() {
            self.parts.push(1);
        } else {
            self.parts[row] += 1;
        }
        Ok(())
    }

    /// Diagrams `Λ` with `λ ↗ Λ`, one per addable row, top to bottom.
    pub fn children(&self) -> Vec<Partition> {
        self.addable_rows()
            .into_iter()
            .map(|r| {
                let mut c = self.clone();
                c.add_box(r).expect("addable row");
                c
            })
            .collect()
    }

    /// Diagrams `μ` with `μ ↗ λ`, one per removable row, top to bottom.
    pub fn parents(&self) -> Vec<Partition> {
        self.removable_rows()
            .into_iter()
            .map(|r| {
                let mut parts = self.parts.clone();
                parts[r] -= 1;
                if parts[r] == 0 {
                    parts.pop();
                }
                Partition { parts }
            })
            .collect()
    }

    /// Integer minima and maxima of the profile, both increasing.
    pub fn profile(&self) -> Profile {
        let minima: Vec<i64> = self
            .addable_rows()
            .into_iter()
            .rev()
            .map(|i| self.row_len(i) as i64 - i as i64)
            .collect();
        let maxima: Vec<i64> = self
            .removable_rows()
            .into_iter()
            .rev()
            .map(|i| self.parts[i] as i64 - 1 - i as i64)
            .collect();
        Profile { minima, maxima }
    }

    /// Row to which a box is added when growing at the `k`-th minimum of the
    /// profile (minima in increasing order).
    pub fn row_for_minimum(&self, k: usize) -> Option<usize> {
        let rows = self.addable_rows();
        rows.len().checked_sub(k + 1).map(|idx| rows[idx])
    }

    /// The profile as a rectangular diagram with real coordinates.
    pub fn to_interlacing(&self) -> InterlacingDiagram {
        self.profile().to_interlacing()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Vec<u32> {
        p.parts
    }
}

/// Exact integer minima/maxima of a Young diagram profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub minima: Vec<i64>,
    pub maxima: Vec<i64>,
}

impl Profile {
    pub fn to_interlacing(&self) -> InterlacingDiagram {
        InterlacingDiagram {
            minima: self.minima.iter().map(|&x| x as f64).collect(),
            maxima: self.maxima.iter().map(|&y| y as f64).collect(),
        }
    }
}

/// A rectangular diagram given by its strictly interlacing minima and maxima
/// `x_1 < y_1 < x_2 < … < y_m < x_{m+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingDiagram {
    minima: Vec<f64>,
    maxima: Vec<f64>,
}

impl InterlacingDiagram {
    pub fn new(minima: Vec<f64>, maxima: Vec<f64>) -> Result<Self> {
        if minima.len() != maxima.len() + 1 {
            return Err(Error::Interlacing(format!(
                "{} minima and {} maxima",
                minima.len(),
                maxima.len()
            )));
        }
        if minima.iter().chain(&maxima).any(|v| !v.is_finite()) {
            return Err(Error::Interlacing("non-finite coordinate".into()));
        }
        for (k, y) in maxima.iter().enumerate() {
            if !(minima[k] < *y && *y < minima[k + 1]) {
                return Err(Error::Interlacing(format!(
                    "x_{} = {}, y_{} = {}, x_{} = {}",
                    k + 1,
                    minima[k],
                    k + 1,
                    y,
                    k + 2,
                    minima[k + 1]
                )));
            }
        }
        Ok(InterlacingDiagram { minima, maxima })
    }

    /// The diagram `|s - center|`.
    pub fn trivial(center: f64) -> Self {
        InterlacingDiagram {
            minima: vec![center],
            maxima: Vec::new(),
        }
    }

    pub fn minima(&self) -> &[f64] {
        &self.minima
    }

    pub fn maxima(&self) -> &[f64] {
        &self.maxima
    }

    /// Number of maxima `m`; there are `m + 1` minima.
    pub fn m(&self) -> usize {
        self.maxima.len()
    }

    /// `Σ x_k − Σ y_k`.
    pub fn center(&self) -> f64 {
        self.minima.iter().sum::<f64>() - self.maxima.iter().sum::<f64>()
    }

    /// Smallest and largest support point (the outermost minima).
    pub fn support(&self) -> (f64, f64) {
        (self.minima[0], *self.minima.last().expect("at least one minimum"))
    }

    /// The same diagram with every coordinate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        InterlacingDiagram {
            minima: self.minima.iter().map(|x| x * factor).collect(),
            maxima: self.maxima.iter().map(|y| y * factor).collect(),
        }
    }

    /// Area between the profile and `|s - center|`, in units where one box of
    /// a Young diagram has area 1. Equals `(Σ x_k² − Σ y_k² − center²) / 2`.
    pub fn area(&self) -> f64 {
        let c = self.center();
        (self.minima.iter().map(|x| x * x).sum::<f64>()
            - self.maxima.iter().map(|y| y * y).sum::<f64>()
            - c * c)
            / 2.0
    }
}

/// Hook lengths, the `b` statistic and the dimension of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HookData {
    /// Hook lengths in row-major order.
    pub hooks: Vec<u32>,
    pub b_stat: u64,
    /// Number of standard tableaux of the shape.
    pub dim: u128,
}

pub fn hook_data(lambda: &Partition) -> Result<HookData> {
    hook_data_with_limit(lambda, DEFAULT_MAX_DIM_N)
}

pub fn hook_data_with_limit(lambda: &Partition, n_max: usize) -> Result<HookData> {
    let n = lambda.size();
    if n > n_max {
        return Err(Error::Capacity {
            what: "diagram size for exact dimension",
            value: n as u64,
            limit: n_max as u64,
        });
    }
    let hooks = hook_lengths(lambda);
    let factorial: BigUint = (1..=n as u64).map(BigUint::from).product();
    let hook_product: BigUint = hooks.iter().map(|&h| BigUint::from(h)).product();
    let rem = &factorial % &hook_product;
    debug_assert!(rem.is_zero(), "hook product must divide n!");
    if !rem.is_zero() {
        return Err(Error::InvalidArgument(format!(
            "hook product does not divide {n}! for {lambda}"
        )));
    }
    let dim = (factorial / hook_product).to_u128().ok_or(Error::Capacity {
        what: "dimension bits",
        value: n as u64,
        limit: 128,
    })?;
    Ok(HookData {
        hooks,
        b_stat: lambda.b_stat(),
        dim,
    })
}

/// `h(i,j) = λ_i − i + λ'_j − j + 1` for every box, row-major.
pub fn hook_lengths(lambda: &Partition) -> Vec<u32> {
    let conj = lambda.conjugate();
    let mut hooks = Vec::with_capacity(lambda.size());
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = conj.parts()[j] as usize - i - 1;
            hooks.push((arm + leg + 1) as u32);
        }
    }
    hooks
}

/// The partition function `p(n)` by Euler's pentagonal recurrence.
pub fn partition_count(n: usize) -> u128 {
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for i in 1..=n {
        let mut acc: i128 = 0;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[i - g1] as i128;
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= i {
                acc += sign * p[i - g2] as i128;
            }
        }
        p[i] = acc as u128;
    }
    p[n]
}

/// All partitions of `n` in decreasing lexicographic order.
pub fn enumerate_level(n: usize) -> Result<Vec<Partition>> {
    enumerate_level_with_limit(n, DEFAULT_MAX_PARTITIONS)
}

pub fn enumerate_level_with_limit(n: usize, limit: u64) -> Result<Vec<Partition>> {
    let count = partition_count(n);
    if count > limit as u128 {
        return Err(Error::Capacity {
            what: "partition count",
            value: count.min(u64::MAX as u128) as u64,
            limit,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = Vec::new();
    fill_partitions(n as u32, n as u32, &mut current, &mut out);
    Ok(out)
}

fn fill_partitions(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for k in (1..=remaining.min(max_part)).rev() {
        current.push(k);
        fill_partitions(remaining - k, k, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn rejects_invalid_parts() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert!(Partition::new(vec![2, 0]).is_err());
        assert!(Partition::new(vec![]).is_ok());
    }

    #[test]
    fn level_zero_and_four() {
        assert_eq!(enumerate_level(0).unwrap(), vec![Partition::empty()]);
        let four: Vec<Vec<u32>> = enumerate_level(4)
            .unwrap()
            .into_iter()
            .map(Vec::from)
            .collect();
        assert_eq!(
            four,
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
        assert_eq!(enumerate_level(10).unwrap().len(), 42);
    }

    #[test]
    fn enumeration_capacity() {
        let err = enumerate_level_with_limit(10, 41).unwrap_err();
        assert!(matches!(err, Error::Capacity { value: 42, .. }));
    }

    #[test]
    fn hooks_of_small_shapes() {
        let h = hook_data(&p(&[2, 1])).unwrap();
        let mut hooks = h.hooks.clone();
        hooks.sort();
        assert_eq!(hooks, vec![1, 1, 3]);
        assert_eq!((h.b_stat, h.dim), (1, 2));

        let h = hook_data(&Partition::row(5)).unwrap();
        assert_eq!(h.hooks, vec![5, 4, 3, 2, 1]);
        assert_eq!((h.b_stat, h.dim), (0, 1));

        let h = hook_data(&Partition::column(3)).unwrap();
        assert_eq!(h.hooks, vec![3, 2, 1]);
        assert_eq!((h.b_stat, h.dim), (3, 1));
    }

    #[test]
    fn dimension_limit() {
        assert!(hook_data(&Partition::row(41)).is_err());
        assert!(hook_data(&Partition::row(40)).is_ok());
        // the largest dimension on level 40 still fits in u128
        let big = p(&[9, 8, 7, 6, 5, 3, 2]);
        assert_eq!(big.size(), 40);
        assert!(hook_data(&big).unwrap().dim > 1u128 << 64);
    }

    #[test]
    fn interlacing_examples() {
        let e = Partition::empty().to_interlacing();
        assert_eq!(e.minima(), &[0.0]);
        assert!(e.maxima().is_empty());

        let one = p(&[1]).to_interlacing();
        assert_eq!(one.minima(), &[-1.0, 1.0]);
        assert_eq!(one.maxima(), &[0.0]);

        let square = p(&[2, 2]).to_interlacing();
        assert_eq!(square.minima(), &[-2.0, 2.0]);
        assert_eq!(square.maxima(), &[0.0]);

        let hook = p(&[2, 1]).profile();
        assert_eq!(hook.minima, vec![-2, 0, 2]);
        assert_eq!(hook.maxima, vec![-1, 1]);
    }

    #[test]
    fn interlacing_validation() {
        assert!(InterlacingDiagram::new(vec![0.0, 1.0], vec![0.5]).is_ok());
        assert!(InterlacingDiagram::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(InterlacingDiagram::new(vec![0.0], vec![0.5]).is_err());
    }

    #[test]
    fn row_for_minimum_matches_growth() {
        let lam = p(&[3, 1]);
        let prof = lam.profile();
        for (k, &x) in prof.minima.iter().enumerate() {
            let row = lam.row_for_minimum(k).unwrap();
            assert_eq!(lam.row_len(row) as i64 - row as i64, x);
        }
        assert_eq!(lam.row_for_minimum(prof.minima.len()), None);
    }

    #[test]
    fn area_counts_boxes() {
        for lam in enumerate_level(7).unwrap() {
            assert!((lam.to_interlacing().area() - 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn partition_count_small_values() {
        let known = [1u128, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &c) in known.iter().enumerate() {
            assert_eq!(partition_count(n), c);
        }
        assert_eq!(partition_count(100), 190_569_292);
    }
}
