//! Infinitesimal growth of rectangular diagrams and the Monte Carlo check
//! that rescaled simulated diagrams approach the limit shape in q-moments.
//!
//! Attaching a square of area `μ_k t` at each minimum `x_k` splits it into
//! the minima `x_k ± √(μ_k t)`; the old minima become maxima alongside the
//! old maxima.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::{InterlacingDiagram, Partition};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::kernel::{self, TransitionWeights};
use crate::moments::{self, p_moments};
use crate::qmeasure::QParam;

/// Default forward step in `t` for [`pde_residual`].
pub const DEFAULT_DT: f64 = 1e-6;
/// Default central step in `x` for [`pde_residual`].
pub const DEFAULT_DX: f64 = 1e-5;
/// Largest `n_boxes` accepted by [`mc_limit_experiment`].
pub const DEFAULT_MAX_BOXES: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DeformedDiagram {
    pub base: InterlacingDiagram,
    pub t: f64,
    deformed: InterlacingDiagram,
}

impl DeformedDiagram {
    pub fn minima_t(&self) -> &[f64] {
        self.deformed.minima()
    }

    pub fn maxima_t(&self) -> &[f64] {
        self.deformed.maxima()
    }

    pub fn diagram(&self) -> &InterlacingDiagram {
        &self.deformed
    }

    /// Area between the deformed and the base profile.
    pub fn added_area(&self) -> f64 {
        self.deformed.area() - self.base.area()
    }
}

/// `w_t`: minima `x_k ± √(μ_k t)`, maxima the old minima and maxima.
pub fn deform(w: &InterlacingDiagram, weights: &TransitionWeights, t: f64) -> Result<DeformedDiagram> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::DeformationTooLarge {
            t,
            reason: "t must be positive and finite".into(),
        });
    }
    if weights.len() != w.minima().len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} minima",
            weights.len(),
            w.minima().len()
        )));
    }
    let mut minima = Vec::with_capacity(2 * weights.len());
    let mut maxima = Vec::with_capacity(2 * w.m() + 1);
    for (k, (&x, &mu)) in w.minima().iter().zip(weights.weights()).enumerate() {
        let s = (mu * t).sqrt();
        minima.push(x - s);
        minima.push(x + s);
        maxima.push(x);
        if k < w.m() {
            maxima.push(w.maxima()[k]);
        }
    }
    let deformed = InterlacingDiagram::new(minima, maxima).map_err(|e| Error::DeformationTooLarge {
        t,
        reason: e.to_string(),
    })?;
    Ok(DeformedDiagram {
        base: w.clone(),
        t,
        deformed,
    })
}

/// `∂_t R_{w_t}(x;q)` at `t = 0`:
/// `Σ_k q^{x−x_k} μ_k ln²(1/q) / (1−q^{x−x_k})² · R_w(x;q)`.
pub fn growth_derivative(w: &InterlacingDiagram, q: QParam, x: f64) -> Result<f64> {
    q.require_deformed()?;
    let r = moments::r_diagram(w, q, x)?;
    let weights = kernel::transition_weights(w, q);
    let rho2 = q.ln_inv_q() * q.ln_inv_q();
    let sum: f64 = w
        .minima()
        .iter()
        .zip(weights.weights())
        .map(|(&xk, &mu)| {
            let d = q.one_minus_pow(x - xk);
            q.pow(x - xk) * mu * rho2 / (d * d)
        })
        .sum();
    Ok(sum * r)
}

/// `R_{w_t}(x;q)` of the deformed diagram.
fn r_deformed(w: &InterlacingDiagram, weights: &TransitionWeights, q: QParam, x: f64, t: f64) -> Result<f64> {
    let d = deform(w, weights, t)?;
    // the deformed support is wider by at most √t
    moments::r_diagram_with_margin(d.diagram(), q, x, moments::DEFAULT_MARGIN - t.sqrt())
}

/// Forward difference in `t` with two-point Richardson extrapolation.
pub fn time_derivative_fd(w: &InterlacingDiagram, q: QParam, x: f64, dt: f64) -> Result<f64> {
    let weights = kernel::transition_weights(w, q);
    let r0 = moments::r_diagram(w, q, x)?;
    let d1 = (r_deformed(w, &weights, q, x, dt)? - r0) / dt;
    let d2 = (r_deformed(w, &weights, q, x, 0.5 * dt)? - r0) / (0.5 * dt);
    Ok(2.0 * d2 - d1)
}

/// `|∂_x R + ((1−q)/ln(1/q)) R^{−1} ∂_t R|` with `∂_x R` a central difference
/// of step `dx` and `∂_t R` from [`time_derivative_fd`] with step `dt`.
pub fn pde_residual(w: &InterlacingDiagram, q: QParam, x: f64, dt: f64, dx: f64) -> Result<f64> {
    q.require_deformed()?;
    for (step, name) in [(dt, "dt"), (dx, "dx")] {
        if !(step > 0.0) || x + step == x {
            return Err(Error::StepDegenerate {
                step,
                reason: if name == "dt" {
                    "dt must be positive and resolvable"
                } else {
                    "dx must be positive and resolvable"
                },
            });
        }
    }
    let r = moments::r_diagram(w, q, x)?;
    let rx = (moments::r_diagram(w, q, x + dx)? - moments::r_diagram(w, q, x - dx)?) / (2.0 * dx);
    let rt = time_derivative_fd(w, q, x, dt)?;
    let coef = q.one_minus_pow(1.0) / q.ln_inv_q();
    Ok((rx + coef * rt / r).abs())
}

/// Result of [`mc_limit_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n_boxes: usize,
    pub q: f64,
    /// `q^{1/√n_boxes}`, the parameter of the simulated chain.
    pub q_kernel: f64,
    pub trials: usize,
    pub seed: u64,
    /// Final diagram of each trajectory, in stream order.
    pub shapes: Vec<Partition>,
    /// Rescaled `p̂_1..p̂_N` of each trajectory.
    pub moments: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `p̌_1..p̌_N`.
    pub targets: Vec<f64>,
}

impl McReport {
    /// `|mean_n − target_n| / stderr_n` for each `n`.
    pub fn z_scores(&self) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.stderr)
            .zip(&self.targets)
            .map(|((m, s), t)| (m - t).abs() / s)
            .collect()
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return f64::NAN;
        }
        (self.m2 / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Simulates `trials` trajectories of `n_boxes` steps with the chain at
/// `q^{1/√n_boxes}`, rescales each final diagram by `1/√n_boxes` and takes
/// its p-moments at `q`. Trajectory `i` uses stream `i` of `seed`; results
/// are aggregated in stream order, so the report depends only on the inputs.
pub fn mc_limit_experiment(n_boxes: usize, q: QParam, trials: usize, n_moments: usize, seed: u64) -> Result<McReport> {
    q.require_deformed()?;
    if n_boxes == 0 || trials == 0 || n_moments == 0 {
        return Err(Error::InvalidArgument(
            "n_boxes, trials and moment count must be positive".into(),
        ));
    }
    if n_boxes > DEFAULT_MAX_BOXES {
        return Err(Error::Capacity {
            what: "n_boxes",
            value: n_boxes as u64,
            limit: DEFAULT_MAX_BOXES as u64,
        });
    }
    let scale = 1.0 / (n_boxes as f64).sqrt();
    let q_kernel = QParam::new(q.q().powf(scale))?;
    let targets = dynamics::limit_moments(q, n_moments)?.values().to_vec();
    let results: Vec<Result<(Partition, Vec<f64>)>> = (0..trials as u64)
        .into_par_iter()
        .map(|stream| {
            let traj = kernel::grow_trajectory_stream(n_boxes, q_kernel, seed, stream)?;
            let shape = traj.final_shape();
            let w = shape.to_interlacing().scaled(scale);
            let p = p_moments(&w, q, n_moments)?;
            Ok((shape, p.values().to_vec()))
        })
        .collect();
    let mut shapes = Vec::with_capacity(trials);
    let mut per_trial = Vec::with_capacity(trials);
    let mut acc = vec![Welford::default(); n_moments];
    for r in results {
        let (shape, m) = r?;
        for (a, &v) in acc.iter_mut().zip(&m) {
            a.push(v);
        }
        shapes.push(shape);
        per_trial.push(m);
    }
    Ok(McReport {
        n_boxes,
        q: q.q(),
        q_kernel: q_kernel.q(),
        trials,
        seed,
        shapes,
        moments: per_trial,
        mean: acc.iter().map(|a| a.mean).collect(),
        stderr: acc.iter().map(Welford::stderr).collect(),
        targets,
    })
}
