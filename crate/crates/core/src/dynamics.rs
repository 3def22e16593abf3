//! Moment dynamics of the growth: `dy_n/dς = n² h_n(y)` in the rescaled time
//! `ς = t·ln²(1/q)`, where `h_n(y)` is the cycle-index sum of `y`.
//!
//! Integration is classical fixed-step RK4. Each run is repeated with twice
//! the steps and the difference gives a Richardson error estimate.

use crate::error::{Error, Result};
use crate::moments::{CycleIndexTable, MomentKind, MomentVector};
use crate::qmeasure::QParam;

/// Largest Richardson estimate accepted by [`integrate_moments`].
pub const ERROR_TOLERANCE: f64 = 1e-6;

/// Default number of moments.
pub const DEFAULT_N: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub sigma: f64,
    pub y: Vec<f64>,
    /// Richardson estimate of the relative error in `y`.
    pub error_estimate: f64,
}

/// `ς = t·ln²(1/q)`.
pub fn rescaled_time(t: f64, q: QParam) -> f64 {
    t * q.ln_inv_q() * q.ln_inv_q()
}

/// The right-hand side with its partition sums precomputed.
#[derive(Debug, Clone)]
pub struct MomentOde {
    table: CycleIndexTable,
}

impl MomentOde {
    pub fn new(n_max: usize) -> Result<Self> {
        Ok(MomentOde {
            table: CycleIndexTable::new(n_max)?,
        })
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    pub fn rhs_into(&self, y: &[f64], out: &mut [f64]) {
        for n in 1..=y.len() {
            out[n - 1] = (n * n) as f64 * self.table.eval(n, y);
        }
    }

    pub fn rhs(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; y.len()];
        self.rhs_into(y, &mut out);
        out
    }

    fn rk4(&self, y0: &[f64], sigma_end: f64, steps: usize) -> Vec<f64> {
        let n = y0.len();
        let h = sigma_end / steps as f64;
        let mut y = y0.to_vec();
        let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut tmp = vec![0.0; n];
        for _ in 0..steps {
            self.rhs_into(&y, &mut k1);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k1[i];
            }
            self.rhs_into(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = y[i] + 0.5 * h * k2[i];
            }
            self.rhs_into(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = y[i] + h * k3[i];
            }
            self.rhs_into(&tmp, &mut k4);
            for i in 0..n {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }

    /// Integrates to `sigma_end` with `steps` and `2·steps`, returning the
    /// finer solution and the estimate `max_n |fine − coarse| / (15 max(1,|fine|))`.
    pub fn integrate(&self, y0: &[f64], sigma_end: f64, steps: usize) -> Result<OdeState> {
        if y0.len() > self.n_max() {
            return Err(Error::InvalidArgument(format!(
                "{} initial values for a system of order {}",
                y0.len(),
                self.n_max()
            )));
        }
        if !(sigma_end >= 0.0) || !sigma_end.is_finite() {
            return Err(Error::InvalidArgument(format!("ς_end = {sigma_end} must be ≥ 0")));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("steps must be positive".into()));
        }
        let coarse = self.rk4(y0, sigma_end, steps);
        let fine = self.rk4(y0, sigma_end, 2 * steps);
        let error_estimate = coarse
            .iter()
            .zip(&fine)
            .map(|(c, f)| (f - c).abs() / (15.0 * f.abs().max(1.0)))
            .fold(0.0, f64::max);
        if fine.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepsTooFew {
                steps,
                estimate: f64::INFINITY,
                tolerance: ERROR_TOLERANCE,
            });
        }
        Ok(OdeState {
            sigma: sigma_end,
            y: fine,
            error_estimate,
        })
    }
}

/// `(dy_n/dς)_{n=1..N} = (n² h_n(y))`.
pub fn ode_rhs(y: &[f64]) -> Result<Vec<f64>> {
    Ok(MomentOde::new(y.len())?.rhs(y))
}

/// RK4 integration of the moment system from `y0` to `sigma_end`; fails with
/// [`Error::StepsTooFew`] when the Richardson estimate exceeds `1e−6`.
pub fn integrate_moments(y0: &[f64], sigma_end: f64, steps: usize) -> Result<OdeState> {
    let state = MomentOde::new(y0.len())?.integrate(y0, sigma_end, steps)?;
    if state.error_estimate > ERROR_TOLERANCE {
        return Err(Error::StepsTooFew {
            steps,
            estimate: state.error_estimate,
            tolerance: ERROR_TOLERANCE,
        });
    }
    Ok(state)
}

/// [`integrate_moments`] in the original variables `(t, q)`.
pub fn integrate_moments_tq(y0: &[f64], t: f64, q: QParam, steps: usize) -> Result<OdeState> {
    integrate_moments(y0, rescaled_time(t, q), steps)
}

/// The explicit solutions for `n ≤ 4`.
pub fn closed_form(n: usize, sigma: f64, y0: &[f64]) -> Result<f64> {
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("closed form only for n ≤ 4, got {n}")));
    }
    if y0.len() < n {
        return Err(Error::InvalidArgument(format!("need {n} initial values")));
    }
    let s = sigma;
    let a1 = y0[0];
    let e = (n as f64 * s).exp();
    let bracket = match n {
        1 => a1,
        2 => y0[1] + 2.0 * a1 * a1 * s,
        3 => {
            let (a2, a3) = (y0[1], y0[2]);
            a3 + 1.5 * a1 * (3.0 * a2 + a1 * a1) * s + 4.5 * a1.powi(3) * s * s
        }
        _ => {
            let (a2, a3, a4) = (y0[1], y0[2], y0[3]);
            let a1_4 = a1.powi(4);
            a4 + (2.0 / 3.0 * a1_4 + 4.0 * a1 * a1 * a2 + 16.0 / 3.0 * a1 * a3 + 2.0 * a2 * a2) * s
                + (16.0 * a1 * a1 * a2 + 8.0 * a1_4) * s * s
                + 32.0 / 3.0 * a1_4 * s.powi(3)
        }
    };
    Ok(bracket * e)
}

/// Steps used by [`limit_moments`].
pub fn limit_steps(n_max: usize, sigma: f64) -> usize {
    1000usize.max((200.0 * n_max as f64 * sigma).ceil() as usize)
}

/// `p̌_n[q] = y_n(ln²q)` with `y(0) = (1, …, 1)`.
pub fn limit_moments(q: QParam, n_max: usize) -> Result<MomentVector> {
    q.require_deformed()?;
    let sigma = rescaled_time(1.0, q);
    let state = integrate_moments(&vec![1.0; n_max], sigma, limit_steps(n_max, sigma))?;
    MomentVector::new(MomentKind::P, state.y)
}

/// Checks that `e^{−nς} y_n(ς)` is a polynomial of degree `n−1`: the
/// polynomial through `n` equally spaced samples on `[0, ς_max]` is
/// extrapolated to two further samples and compared. Returns the largest
/// relative mismatch over `n ≤ n_max`.
pub fn polynomial_structure_residual(y0: &[f64], sigma_max: f64, steps: usize) -> Result<f64> {
    let n_max = y0.len();
    let ode = MomentOde::new(n_max)?;
    let nodes = n_max + 2;
    let sigmas: Vec<f64> = (0..nodes)
        .map(|j| sigma_max * j as f64 / (nodes - 1) as f64)
        .collect();
    let mut samples = Vec::with_capacity(nodes);
    for &s in &sigmas {
        let st = ode.integrate(y0, s, steps.max(1))?;
        samples.push(st.y);
    }
    let mut worst = 0.0f64;
    for n in 1..=n_max {
        let g: Vec<f64> = sigmas
            .iter()
            .zip(&samples)
            .map(|(&s, y)| y[n - 1] * (-(n as f64) * s).exp())
            .collect();
        for check in n..nodes {
            let pred = lagrange(&sigmas[..n], &g[..n], sigmas[check]);
            let rel = (pred - g[check]).abs() / g[check].abs().max(1e-300);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = 1.0;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                basis *= (x - xj) / (xi - xj);
            }
        }
        acc += yi * basis;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_low_orders() {
        assert_eq!(ode_rhs(&[1.0]).unwrap(), vec![1.0]);
        let r = ode_rhs(&[1.0, 1.0]).unwrap();
        assert!((r[1] - 4.0).abs() < 1e-15);
        let r = ode_rhs(&[1.0, 1.0, 1.0]).unwrap();
        assert!((r[2] - 9.0).abs() < 1e-14);
        // ẏ₂ = 2y₁² + 2y₂ and ẏ₃ = (3/2)y₁³ + (9/2)y₂y₁ + 3y₃ at a generic point
        let y = [0.7, -0.4, 1.3];
        let r = ode_rhs(&y).unwrap();
        assert!((r[1] - (2.0 * 0.49 - 0.8)).abs() < 1e-14);
        let want3 = 1.5 * 0.343 + 4.5 * (-0.4) * 0.7 + 3.0 * 1.3;
        assert!((r[2] - want3).abs() < 1e-14);
    }

    #[test]
    fn integrator_examples() {
        let s = integrate_moments(&[1.0], 1.0, 1000).unwrap();
        assert!((s.y[0] - std::f64::consts::E).abs() < 1e-8);
        let s = integrate_moments(&[1.0, 1.0], 0.0, 10).unwrap();
        assert_eq!(s.y, vec![1.0, 1.0]);
        let s = integrate_moments(&[1.0, 1.0], 0.5, 1000).unwrap();
        assert!((s.y[1] - 2.0 * std::f64::consts::E).abs() < 1e-7);
    }

    #[test]
    fn too_few_steps_flagged() {
        let err = integrate_moments(&[1.0; 6], 2.0, 2).unwrap_err();
        assert!(matches!(err, Error::StepsTooFew { steps: 2, .. }));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form(1, 0.0, &[2.5]).unwrap(), 2.5);
        let v = closed_form(3, 1.0, &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 11.5 * 3f64.exp()).abs() < 1e-12);
        assert!(closed_form(5, 1.0, &[1.0; 5]).is_err());
        let s = 0.01;
        let num = integrate_moments(&[1.0; 4], s, 100).unwrap().y[3];
        assert!((closed_form(4, s, &[1.0; 4]).unwrap() - num).abs() < 1e-10);
    }

    #[test]
    fn limit_moment_values() {
        let q = QParam::new(0.5).unwrap();
        let s = 2f64.ln().powi(2);
        let p = limit_moments(q, 2).unwrap();
        assert!((p.get(1) - s.exp()).abs() < 1e-10);
        assert!((p.get(2) - (1.0 + 2.0 * s) * (2.0 * s).exp()).abs() < 1e-9);
        assert!((p.get(1) - 1.6168067).abs() < 1e-7);
        assert!((p.get(2) - 5.1259335).abs() < 1e-7);
        let near_one = limit_moments(QParam::new(1.0 - 1e-6).unwrap(), 4).unwrap();
        assert!(near_one.values().iter().all(|&v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn tq_interface() {
        let q = QParam::new(0.3).unwrap();
        let a = integrate_moments_tq(&[1.0, 2.0], 0.5, q, 1000).unwrap();
        let b = integrate_moments(&[1.0, 2.0], 0.5 * q.ln_inv_q().powi(2), 1000).unwrap();
        assert_eq!(a.y, b.y);
    }
}
