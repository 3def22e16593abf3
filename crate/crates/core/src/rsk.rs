//! Major index, descents and Robinson–Schensted–Knuth row insertion, with
//! exhaustive checks that the shape of `σ` under RSK, for `σ` drawn with
//! probability `∝ q^{MAJ(σ)}`, is distributed as `M_q^{(n)}`.
//!
//! Everything here enumerates: `S(n)` up to `n = 9` and standard tableaux
//! up to 12 boxes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::{self, Partition};
use crate::error::{Error, Result};
use crate::qmeasure::{pow_rational, QParam};

pub const MAX_PUSHFORWARD_N: usize = 9;
pub const MAX_TABLEAU_N: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    one_line: Vec<u32>,
}

impl Permutation {
    /// From one-line notation over `1..=n`.
    pub fn new(one_line: Vec<u32>) -> Result<Self> {
        let n = one_line.len();
        let mut seen = vec![false; n + 1];
        for &v in &one_line {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "{one_line:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { one_line })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            one_line: (1..=n as u32).collect(),
        }
    }

    pub fn reverse(n: usize) -> Self {
        Permutation {
            one_line: (1..=n as u32).rev().collect(),
        }
    }

    pub fn one_line(&self) -> &[u32] {
        &self.one_line
    }

    pub fn len(&self) -> usize {
        self.one_line.len()
    }

    pub fn is_empty(&self) -> bool {
        self.one_line.is_empty()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.one_line.len()];
        for (i, &v) in self.one_line.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation { one_line: inv }
    }

    /// Positions `i` (1-based) with `σ(i) > σ(i+1)`.
    pub fn descents(&self) -> Vec<u32> {
        descents_of(&self.one_line)
    }
}

fn descents_of(w: &[u32]) -> Vec<u32> {
    w.windows(2)
        .enumerate()
        .filter(|(_, p)| p[0] > p[1])
        .map(|(i, _)| i as u32 + 1)
        .collect()
}

fn maj_of(w: &[u32]) -> u32 {
    w.windows(2)
        .enumerate()
        .filter(|(_, p)| p[0] > p[1])
        .map(|(i, _)| i as u32 + 1)
        .sum()
}

pub fn maj(sigma: &Permutation) -> u32 {
    maj_of(&sigma.one_line)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardTableau {
    rows: Vec<Vec<u32>>,
}

impl StandardTableau {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let shape: Vec<u32> = rows.iter().map(|r| r.len() as u32).collect();
        Partition::new(shape).map_err(|e| Error::InvalidTableau(e.to_string()))?;
        let n: usize = rows.iter().map(Vec::len).sum();
        let mut seen = vec![false; n + 1];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let vu = v as usize;
                if vu == 0 || vu > n || seen[vu] {
                    return Err(Error::InvalidTableau(format!("entries are not 1..={n}")));
                }
                seen[vu] = true;
                if j > 0 && row[j - 1] >= v {
                    return Err(Error::InvalidTableau(format!("row {} not increasing", i + 1)));
                }
                if i > 0 && rows[i - 1][j] >= v {
                    return Err(Error::InvalidTableau(format!("column {} not increasing", j + 1)));
                }
            }
        }
        Ok(StandardTableau { rows })
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn shape(&self) -> Partition {
        Partition::new(self.rows.iter().map(|r| r.len() as u32).collect())
            .expect("validated tableau")
    }

    /// Row index (0-based) of each entry `1..=n`.
    fn row_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.size() + 1];
        for (i, row) in self.rows.iter().enumerate() {
            for &v in row {
                out[v as usize] = i;
            }
        }
        out
    }

    /// Entries `i` such that `i+1` lies in a strictly lower row.
    pub fn descents(&self) -> Vec<u32> {
        let row = self.row_of();
        (1..self.size())
            .filter(|&i| row[i + 1] > row[i])
            .map(|i| i as u32)
            .collect()
    }
}

pub fn maj_tableau(t: &StandardTableau) -> u32 {
    t.descents().iter().sum()
}

/// Row insertion of `x` into `rows`; returns the row where the tableau grew.
fn insert(rows: &mut Vec<Vec<u32>>, mut x: u32) -> usize {
    for (i, row) in rows.iter_mut().enumerate() {
        match row.iter().position(|&v| v > x) {
            Some(pos) => x = std::mem::replace(&mut row[pos], x),
            None => {
                row.push(x);
                return i;
            }
        }
    }
    rows.push(vec![x]);
    rows.len() - 1
}

/// The insertion tableau `P` and recording tableau `Q` of `σ`.
pub fn rsk_shape(sigma: &Permutation) -> (StandardTableau, StandardTableau) {
    let mut p: Vec<Vec<u32>> = Vec::new();
    let mut q: Vec<Vec<u32>> = Vec::new();
    for (i, &x) in sigma.one_line.iter().enumerate() {
        let r = insert(&mut p, x);
        if r == q.len() {
            q.push(Vec::new());
        }
        q[r].push(i as u32 + 1);
    }
    (StandardTableau { rows: p }, StandardTableau { rows: q })
}

/// Shape of the RSK tableaux, reusing `scratch`.
fn shape_only(w: &[u32], scratch: &mut Vec<Vec<u32>>) -> Vec<u32> {
    for row in scratch.iter_mut() {
        row.clear();
    }
    let mut used = 0;
    for &x in w {
        let mut x = x;
        let mut placed = false;
        for row in scratch.iter_mut().take(used) {
            match row.iter().position(|&v| v > x) {
                Some(pos) => x = std::mem::replace(&mut row[pos], x),
                None => {
                    row.push(x);
                    placed = true;
                    break;
                }
            }
        }
        if !placed {
            if used == scratch.len() {
                scratch.push(Vec::new());
            }
            scratch[used].push(x);
            used += 1;
        }
    }
    scratch[..used].iter().map(|r| r.len() as u32).collect()
}

/// Lexicographic successor in place; false after the last permutation.
pub fn next_permutation(w: &mut [u32]) -> bool {
    let n = w.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && w[i - 1] >= w[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while w[j] <= w[i - 1] {
        j -= 1;
    }
    w.swap(i - 1, j);
    w[i..].reverse();
    true
}

/// Integer polynomial in `q`, coefficients by ascending degree.
pub type Polynomial = Vec<u64>;

fn add_poly(acc: &mut Polynomial, other: &Polynomial) {
    if acc.len() < other.len() {
        acc.resize(other.len(), 0);
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

/// `Σ_{σ : shape(σ) = λ} q^{MAJ(σ)}` for every shape on level `n`, by full
/// enumeration of `S(n)` in parallel blocks sharing the first letter.
pub fn maj_shape_polynomials(n: usize) -> Result<BTreeMap<Partition, Polynomial>> {
    if n > MAX_PUSHFORWARD_N {
        return Err(Error::Capacity {
            what: "permutation size for exhaustive enumeration",
            value: n as u64,
            limit: MAX_PUSHFORWARD_N as u64,
        });
    }
    if n == 0 {
        return Ok(BTreeMap::from([(Partition::empty(), vec![1])]));
    }
    let blocks: Vec<BTreeMap<Vec<u32>, Polynomial>> = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut w: Vec<u32> = std::iter::once(first)
                .chain((1..=n as u32).filter(|&v| v != first))
                .collect();
            let mut scratch = Vec::new();
            let mut local: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
            loop {
                let shape = shape_only(&w, &mut scratch);
                let m = maj_of(&w) as usize;
                let poly = local.entry(shape).or_default();
                if poly.len() <= m {
                    poly.resize(m + 1, 0);
                }
                poly[m] += 1;
                if !next_permutation(&mut w[1..]) {
                    break;
                }
            }
            local
        })
        .collect();
    let mut merged: BTreeMap<Partition, Polynomial> = BTreeMap::new();
    for block in blocks {
        for (shape, poly) in block {
            let key = Partition::new(shape).expect("RSK produces partitions");
            add_poly(merged.entry(key).or_default(), &poly);
        }
    }
    Ok(merged)
}

/// `Π_{i=1}^{n} (1 + q + … + q^{i−1})`, the generating function of MAJ.
pub fn mahonian_polynomial(n: usize) -> Polynomial {
    let mut acc: Polynomial = vec![1];
    for i in 1..=n {
        let mut next = vec![0u64; acc.len() + i - 1];
        for (d, &c) in acc.iter().enumerate() {
            for e in 0..i {
                next[d + e] += c;
            }
        }
        acc = next;
    }
    acc
}

fn eval_poly(poly: &Polynomial, q: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, &c| acc * q + c as f64)
}

fn eval_poly_exact(poly: &Polynomial, q: &BigRational) -> BigRational {
    poly.iter().rev().fold(BigRational::zero(), |acc, &c| {
        acc * q + BigRational::from_integer(BigInt::from(c))
    })
}

/// Law of the RSK shape of `σ ∈ S(n)` drawn with weight `q^{MAJ(σ)}`.
pub fn pushforward_exact(n: usize, q: QParam) -> Result<BTreeMap<Partition, f64>> {
    q.require_deformed()?;
    let polys = maj_shape_polynomials(n)?;
    let total: Polynomial = polys.values().fold(Vec::new(), |mut acc, p| {
        add_poly(&mut acc, p);
        acc
    });
    let z = eval_poly(&total, q.q());
    Ok(polys
        .into_iter()
        .map(|(shape, poly)| (shape, eval_poly(&poly, q.q()) / z))
        .collect())
}

/// [`pushforward_exact`] in rational arithmetic at rational `q`.
pub fn pushforward_rational(n: usize, q: &BigRational) -> Result<BTreeMap<Partition, BigRational>> {
    let polys = maj_shape_polynomials(n)?;
    let z = eval_poly_exact(&mahonian_polynomial(n), q);
    Ok(polys
        .into_iter()
        .map(|(shape, poly)| (shape, eval_poly_exact(&poly, q) / &z))
        .collect())
}

/// Total variation distance between two laws on partitions.
pub fn total_variation(a: &BTreeMap<Partition, f64>, b: &BTreeMap<Partition, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&Partition> = a.keys().chain(b.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// All standard tableaux of shape `λ`, built by placing `n, n−1, …` at
/// removable corners.
pub fn standard_tableaux(lambda: &Partition) -> Result<Vec<StandardTableau>> {
    let n = lambda.size();
    if n > MAX_TABLEAU_N {
        return Err(Error::Capacity {
            what: "tableau size",
            value: n as u64,
            limit: MAX_TABLEAU_N as u64,
        });
    }
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u32>> = lambda.parts().iter().map(|&p| vec![0; p as usize]).collect();
    fill_tableaux(lambda.clone(), n as u32, &mut rows, &mut out);
    Ok(out)
}

fn fill_tableaux(shape: Partition, next: u32, rows: &mut Vec<Vec<u32>>, out: &mut Vec<StandardTableau>) {
    if next == 0 {
        out.push(StandardTableau { rows: rows.clone() });
        return;
    }
    for r in shape.removable_rows() {
        let col = shape.parts()[r] as usize - 1;
        rows[r][col] = next;
        let mut parts = shape.parts().to_vec();
        parts[r] -= 1;
        if parts[r] == 0 {
            parts.pop();
        }
        fill_tableaux(Partition::new(parts).expect("corner removal"), next - 1, rows, out);
    }
}

/// `Σ_T q^{MAJ(T)} − q^{b(λ)} [n]! / Π[h(u)]` over standard tableaux `T` of
/// shape `λ`.
pub fn tableau_genfun_check(lambda: &Partition, q: QParam) -> Result<f64> {
    q.require_deformed()?;
    let tableaux = standard_tableaux(lambda)?;
    let lhs: f64 = tableaux
        .iter()
        .map(|t| q.pow(maj_tableau(t) as f64))
        .sum();
    let hd = diagrams::hook_data(lambda)?;
    let mut hooks = hd.hooks.clone();
    hooks.sort_unstable();
    // pair [i] with [h] so each ratio stays O(1)
    let ratio: f64 = (1..=lambda.size() as u32)
        .zip(hooks.iter().rev())
        .map(|(i, &h)| q.one_minus_pow(i as f64) / q.one_minus_pow(h as f64))
        .product();
    Ok(lhs - q.pow(hd.b_stat as f64) * ratio)
}

/// `Σ_{σ ∈ S(n)} q^{MAJ(σ)}` at rational `q`, and the product formula.
pub fn mahonian_identity_exact(n: usize, q: &BigRational) -> Result<(BigRational, BigRational)> {
    let polys = maj_shape_polynomials(n)?;
    let total: Polynomial = polys.values().fold(Vec::new(), |mut acc, p| {
        add_poly(&mut acc, p);
        acc
    });
    let one = BigRational::from_integer(BigInt::from(1));
    let mut product = one.clone();
    for i in 1..n as u64 {
        product *= (pow_rational(q, i + 1) - &one) / (q - &one);
    }
    Ok((eval_poly_exact(&total, q), product))
}
