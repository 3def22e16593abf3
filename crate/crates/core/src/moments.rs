//! q-moments, Rayleigh measures, the p ↔ h conversion and q-deformed
//! R-functions.
//!
//! For a probability measure `μ` and a signed measure `τ`,
//! `h_n[μ;q] = ∫ q^{−ns} μ(ds)` and `p_n[τ;q] = ∫ q^{−ns} τ(ds)`. The
//! q-Markov–Krein correspondence between a diagram's transition measure
//! `μ` and its Rayleigh measure `τ` reads
//!
//! ```text
//! Σ μ(s)/(1 − q^{x−s}) = exp Σ τ(s) ln(1/(1 − q^{x−s}))
//! ```
//!
//! and is equivalent to `1 + Σ h_n z^n = exp(Σ p_n z^n / n)` with `z = q^x`.

use serde::{Deserialize, Serialize};

use crate::diagrams::InterlacingDiagram;
use crate::error::{Error, Result};
use crate::kernel::TransitionWeights;
use crate::qmeasure::QParam;

/// Bound on `n·|s|·ln(1/q)` for a single term `q^{−ns}`.
pub const MAX_EXPONENT: f64 = 700.0;

/// Default distance between `x` and the support for R-function evaluation.
pub const DEFAULT_MARGIN: f64 = 1.0;

/// Pole-proximity threshold on `|1 − q^{x−s}|`.
pub const POLE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureMode {
    Probability,
    Signed,
}

/// Finitely many atoms `(location, weight)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<(f64, f64)>,
    mode: MeasureMode,
}

impl DiscreteMeasure {
    /// Positive weights summing to 1 within `1e−12`.
    pub fn probability(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument("measure has no atoms".into()));
        }
        if atoms.iter().any(|&(s, w)| !s.is_finite() || !(w > 0.0)) {
            return Err(Error::InvalidArgument(
                "probability atoms need finite locations and positive weights".into(),
            ));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("total mass {total} ≠ 1")));
        }
        Ok(DiscreteMeasure {
            atoms,
            mode: MeasureMode::Probability,
        })
    }

    /// Weights `±1` with total mass `+1`.
    pub fn signed(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|&(s, w)| !s.is_finite() || (w != 1.0 && w != -1.0)) {
            return Err(Error::InvalidArgument("signed atoms need weights ±1".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if total != 1.0 {
            return Err(Error::InvalidArgument(format!("total mass {total} ≠ 1")));
        }
        Ok(DiscreteMeasure {
            atoms,
            mode: MeasureMode::Signed,
        })
    }

    pub fn point_mass(s: f64) -> Self {
        DiscreteMeasure {
            atoms: vec![(s, 1.0)],
            mode: MeasureMode::Probability,
        }
    }

    /// The q-transition measure of `w`: weight `μ_k` at minimum `x_k`.
    pub fn transition_measure(w: &InterlacingDiagram, weights: &TransitionWeights) -> Result<Self> {
        if weights.len() != w.minima().len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} minima",
                weights.len(),
                w.minima().len()
            )));
        }
        Self::probability(
            w.minima()
                .iter()
                .copied()
                .zip(weights.weights().iter().copied())
                .collect(),
        )
    }

    /// Same atoms without validation, e.g. a deliberately perturbed measure.
    pub fn from_atoms_unchecked(atoms: Vec<(f64, f64)>, mode: MeasureMode) -> Self {
        DiscreteMeasure { atoms, mode }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mode(&self) -> MeasureMode {
        self.mode
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    fn max_abs_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }

    fn support(&self) -> (f64, f64) {
        self.atoms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a.0), hi.max(a.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentKind {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "h")]
    H,
}

/// Moments `v_1, …, v_N`; index with [`MomentVector::get`] from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    kind: MomentKind,
    values: Vec<f64>,
}

impl MomentVector {
    pub fn new(kind: MomentKind, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("moments must be finite".into()));
        }
        Ok(MomentVector { kind, values })
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `n`-th moment, `n ≥ 1`.
    pub fn get(&self, n: usize) -> f64 {
        self.values[n - 1]
    }

    pub fn truncate(&self, n: usize) -> MomentVector {
        MomentVector {
            kind: self.kind,
            values: self.values[..n.min(self.values.len())].to_vec(),
        }
    }
}

fn check_overflow(max_abs: f64, n: usize, q: QParam) -> Result<()> {
    let exponent = n as f64 * max_abs * q.ln_inv_q();
    if exponent > MAX_EXPONENT {
        return Err(Error::MomentOverflow { exponent });
    }
    Ok(())
}

fn q_moments(atoms: &[(f64, f64)], max_abs: f64, q: QParam, n_max: usize) -> Result<Vec<f64>> {
    q.require_deformed()?;
    check_overflow(max_abs, n_max, q)?;
    Ok((1..=n_max)
        .map(|n| {
            let scale = n as f64 * q.ln_inv_q();
            atoms.iter().map(|&(s, w)| w * (scale * s).exp()).sum()
        })
        .collect())
}

/// `h_n[μ;q] = Σ weight · q^{−n·location}` for `n = 1..=N`.
pub fn h_moments(mu: &DiscreteMeasure, q: QParam, n_max: usize) -> Result<MomentVector> {
    if mu.mode != MeasureMode::Probability {
        return Err(Error::InvalidArgument("h-moments need a probability measure".into()));
    }
    let values = q_moments(&mu.atoms, mu.max_abs_location(), q, n_max)?;
    MomentVector::new(MomentKind::H, values)
}

/// `+1` at every minimum, `−1` at every maximum.
pub fn rayleigh_measure(w: &InterlacingDiagram) -> DiscreteMeasure {
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(2 * w.m() + 1);
    for (k, &x) in w.minima().iter().enumerate() {
        atoms.push((x, 1.0));
        if k < w.m() {
            atoms.push((w.maxima()[k], -1.0));
        }
    }
    DiscreteMeasure {
        atoms,
        mode: MeasureMode::Signed,
    }
}

/// `p_n = Σ_k q^{−n x_k} − Σ_j q^{−n y_j}` for `n = 1..=N`.
pub fn p_moments(w: &InterlacingDiagram, q: QParam, n_max: usize) -> Result<MomentVector> {
    let tau = rayleigh_measure(w);
    let values = q_moments(&tau.atoms, tau.max_abs_location(), q, n_max)?;
    MomentVector::new(MomentKind::P, values)
}

/// `h` from `p` through `n h_n = Σ_{k=1}^{n} p_k h_{n−k}`, `h_0 = 1`.
pub fn p_to_h(p: &MomentVector) -> Result<MomentVector> {
    if p.kind != MomentKind::P {
        return Err(Error::InvalidArgument("expected p-moments".into()));
    }
    let n_max = p.len();
    let mut h = vec![1.0; n_max + 1];
    for n in 1..=n_max {
        let s: f64 = (1..=n).map(|k| p.values[k - 1] * h[n - k]).sum();
        h[n] = s / n as f64;
    }
    MomentVector::new(MomentKind::H, h[1..].to_vec())
}

/// Inverse of [`p_to_h`]: `p_n = n h_n − Σ_{k=1}^{n−1} p_k h_{n−k}`.
pub fn h_to_p(h: &MomentVector) -> Result<MomentVector> {
    if h.kind != MomentKind::H {
        return Err(Error::InvalidArgument("expected h-moments".into()));
    }
    let n_max = h.len();
    let hv = |i: usize| if i == 0 { 1.0 } else { h.values[i - 1] };
    let mut p = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        let s: f64 = (1..n).map(|k| p[k] * hv(n - k)).sum();
        p[n] = n as f64 * hv(n) - s;
    }
    MomentVector::new(MomentKind::P, p[1..].to_vec())
}

/// One monomial `coef · Π_k y_k^{r_k}` of the cycle-index sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTerm {
    pub coef: f64,
    /// Pairs `(k, r_k)` with `r_k ≥ 1`.
    pub powers: Vec<(usize, u32)>,
}

/// For each `n ≤ N`, the terms of
/// `Σ_{|λ|=n} Π_k y_k^{r_k} / (k^{r_k} r_k!)` where `λ = (1^{r_1} 2^{r_2} …)`.
#[derive(Debug, Clone)]
pub struct CycleIndexTable {
    levels: Vec<Vec<CycleTerm>>,
}

impl CycleIndexTable {
    pub fn new(n_max: usize) -> Result<Self> {
        let mut levels = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let parts = crate::diagrams::enumerate_level(n)?;
            let terms = parts
                .iter()
                .map(|lam| {
                    let mut counts = vec![0u32; n + 1];
                    for &p in lam.parts() {
                        counts[p as usize] += 1;
                    }
                    let mut coef = 1.0;
                    let mut powers = Vec::new();
                    for (k, &r) in counts.iter().enumerate().skip(1) {
                        if r > 0 {
                            coef /= (k as f64).powi(r as i32) * (1..=r).map(f64::from).product::<f64>();
                            powers.push((k, r));
                        }
                    }
                    CycleTerm { coef, powers }
                })
                .collect();
            levels.push(terms);
        }
        Ok(CycleIndexTable { levels })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn terms(&self, n: usize) -> &[CycleTerm] {
        &self.levels[n - 1]
    }

    /// The sum on level `n` at `y = (y_1, …)`.
    pub fn eval(&self, n: usize, y: &[f64]) -> f64 {
        self.terms(n)
            .iter()
            .map(|t| {
                t.coef
                    * t.powers
                        .iter()
                        .map(|&(k, r)| y[k - 1].powi(r as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// `h_n` for `n = 1..=N` as explicit partition sums.
    pub fn p_to_h(&self, p: &[f64]) -> Vec<f64> {
        (1..=p.len().min(self.n_max())).map(|n| self.eval(n, p)).collect()
    }
}

fn check_outside(lo: f64, hi: f64, x: f64, margin: f64) -> Result<()> {
    if x > hi + margin || x < lo - margin {
        Ok(())
    } else {
        Err(Error::InsideSupport { x, lo, hi, margin })
    }
}

fn pole_factor(q: QParam, x: f64, s: f64) -> Result<f64> {
    let f = if q.is_classical() {
        x - s
    } else {
        q.one_minus_pow(x - s)
    };
    if f.abs() < POLE_TOLERANCE {
        return Err(Error::PoleProximity { x, pole: s });
    }
    Ok(f)
}

/// `R_w(x;q) = (1−q) Π(1−q^{x−y_j}) / Π(1−q^{x−x_j})`; at `q = 1`,
/// `Π(x−y_j)/Π(x−x_j)`.
pub fn r_diagram(w: &InterlacingDiagram, q: QParam, x: f64) -> Result<f64> {
    r_diagram_with_margin(w, q, x, DEFAULT_MARGIN)
}

pub fn r_diagram_with_margin(w: &InterlacingDiagram, q: QParam, x: f64, margin: f64) -> Result<f64> {
    let (lo, hi) = w.support();
    check_outside(lo, hi, x, margin)?;
    let mut acc = 1.0;
    for (k, &xk) in w.minima().iter().enumerate() {
        acc /= pole_factor(q, x, xk)?;
        if k < w.m() {
            acc *= pole_factor(q, x, w.maxima()[k])?;
        }
    }
    Ok(if q.is_classical() {
        acc
    } else {
        q.one_minus_pow(1.0) * acc
    })
}

/// `R_μ(x;q) = (1−q) Σ weight/(1−q^{x−location})`; at `q = 1`,
/// `Σ weight/(x−location)`.
pub fn r_measure(mu: &DiscreteMeasure, q: QParam, x: f64) -> Result<f64> {
    r_measure_with_margin(mu, q, x, DEFAULT_MARGIN)
}

pub fn r_measure_with_margin(mu: &DiscreteMeasure, q: QParam, x: f64, margin: f64) -> Result<f64> {
    let (lo, hi) = mu.support();
    check_outside(lo, hi, x, margin)?;
    let mut acc = 0.0;
    for &(s, wt) in &mu.atoms {
        acc += wt / pole_factor(q, x, s)?;
    }
    Ok(if q.is_classical() {
        acc
    } else {
        q.one_minus_pow(1.0) * acc
    })
}

/// Both forms of the Markov–Krein residual over a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovKreinResidual {
    /// `max |R_w − R_μ|`.
    pub r_form: f64,
    /// `max |Σ μ/(1−q^{x−s}) − exp Σ τ ln(1/(1−q^{x−s}))|`, relative to the
    /// left side.
    pub exp_log_form: f64,
}

impl MarkovKreinResidual {
    pub fn max(&self) -> f64 {
        self.r_form.max(self.exp_log_form)
    }
}

/// Largest of the two residuals in [`markov_krein_residuals`].
pub fn markov_krein_residual(
    w: &InterlacingDiagram,
    mu: &DiscreteMeasure,
    q: QParam,
    x_grid: &[f64],
) -> Result<f64> {
    Ok(markov_krein_residuals(w, mu, q, x_grid)?.max())
}

pub fn markov_krein_residuals(
    w: &InterlacingDiagram,
    mu: &DiscreteMeasure,
    q: QParam,
    x_grid: &[f64],
) -> Result<MarkovKreinResidual> {
    let tau = rayleigh_measure(w);
    let mut out = MarkovKreinResidual {
        r_form: 0.0,
        exp_log_form: 0.0,
    };
    for &x in x_grid {
        let rw = r_diagram(w, q, x)?;
        let rm = r_measure(mu, q, x)?;
        out.r_form = out.r_form.max((rw - rm).abs());

        let mut lhs = 0.0;
        for &(s, wt) in mu.atoms() {
            lhs += wt / pole_factor(q, x, s)?;
        }
        let mut log_sum = 0.0;
        for &(s, wt) in tau.atoms() {
            log_sum -= wt * pole_factor(q, x, s)?.abs().ln();
        }
        let rhs = log_sum.exp();
        out.exp_log_form = out.exp_log_form.max((lhs - rhs).abs() / lhs.abs());
    }
    Ok(out)
}

/// Default evaluation grid above the support: `x_max + 1.5, …` in unit steps.
pub fn default_mk_grid(w: &InterlacingDiagram, points: usize) -> Vec<f64> {
    let (_, hi) = w.support();
    (0..points).map(|j| hi + 1.5 + j as f64).collect()
}
