//! The R-function of the limiting diagram `Ω(·;q)`, defined implicitly by
//!
//! ```text
//! r (1 − q^{x − c r}) = 1 − q,    c = ln(1/q)/(1 − q).
//! ```
//!
//! With `G = r/(1−q)`, `ς = ln²q` and `z = q^x` this is
//! `G (1 − z e^{ςG}) = 1`. The left side rises from `G = 1`, peaks at the
//! point `G_max` where `z e^{ςG}(1 + ςG) = 1`, then falls; the physical
//! branch (`r → 1−q` as `x → ∞`) is the root in `[1, G_max]`. A root exists
//! iff `z` is at most the branch-point value, i.e. iff `x` is at least
//! [`admissible_x_min`].

use crate::error::{Error, Result};
use crate::moments::{MomentKind, MomentVector};
use crate::qmeasure::QParam;

/// Default relative tolerance on `G`.
pub const DEFAULT_TOL: f64 = 1e-15;

/// Largest acceptable extraction residual in [`series_h_omega`].
pub const SERIES_RESIDUAL_TOL: f64 = 1e-7;

/// The function `x ↦ R_Ω(x;q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaRFunction {
    q: QParam,
    tol: f64,
    /// `c = ln(1/q)/(1−q)`; 1 at `q = 1`.
    c: f64,
}

impl OmegaRFunction {
    pub fn new(q: QParam) -> Self {
        Self::with_tolerance(q, DEFAULT_TOL)
    }

    pub fn with_tolerance(q: QParam, tol: f64) -> Self {
        let c = if q.is_classical() {
            1.0
        } else {
            q.ln_inv_q() / q.one_minus_pow(1.0)
        };
        OmegaRFunction { q, tol, c }
    }

    pub fn q(&self) -> QParam {
        self.q
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `R_Ω(x;q)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.q.is_classical() {
            return classical_r(x);
        }
        let one_minus_q = self.q.one_minus_pow(1.0);
        Ok(one_minus_q * solve_g(x, self.q, self.tol)?)
    }

    /// `r (1 − q^{x−cr}) − (1−q)`.
    pub fn residual(&self, x: f64, r: f64) -> f64 {
        if self.q.is_classical() {
            return r * (x - r) - 1.0;
        }
        r * self.q.one_minus_pow(x - self.c * r) - self.q.one_minus_pow(1.0)
    }
}

/// `R_Ω(x;q)` on the physical branch.
pub fn solve_r_omega(x: f64, q: QParam) -> Result<f64> {
    OmegaRFunction::new(q).eval(x)
}

/// `(x − √(x²−4))/2`, the R-function of the classical limit shape.
pub fn classical_r(x: f64) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::NoRoot {
            x,
            q: 1.0,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(2.0 / (x + (x * x - 4.0).sqrt()))
}

/// Smallest `x` for which the physical branch exists; tends to 2 as `q → 1`.
pub fn admissible_x_min(q: QParam) -> f64 {
    if q.is_classical() {
        return 2.0;
    }
    let rho = q.ln_inv_q();
    let s = rho * rho;
    let h_star = 0.5 * (-1.0 + (1.0 + 4.0 / s).sqrt());
    let ln_conv = h_star.ln() - h_star.ln_1p() - s * (1.0 + h_star);
    -ln_conv / rho
}

/// `G = R_Ω/(1−q)` in terms of `ϱ = ln(1/q)`:
/// `f(G) = G·(1 − e^{−ϱ(x − ϱG)}) − 1`.
fn solve_g(x: f64, q: QParam, tol: f64) -> Result<f64> {
    let rho = q.ln_inv_q();
    let one_minus_q = q.one_minus_pow(1.0);
    let no_root = |hi_g: f64| Error::NoRoot {
        x,
        q: q.q(),
        lo: one_minus_q,
        hi: one_minus_q * hi_g,
    };
    if !(x > 0.0) || !x.is_finite() {
        return Err(no_root(1.0));
    }
    let f = |g: f64| -> f64 { g * -(-rho * (x - rho * g)).exp_m1() - 1.0 };
    // peak of f: ψ(G) = ϱ²G − ϱx + ln(1 + ϱ²G) = 0, ψ increasing on [0, x/ϱ]
    let psi = |g: f64| rho * rho * g - rho * x + (rho * rho * g).ln_1p();
    let g_max = brent(psi, 0.0, x / rho, 1e-15, 300).ok_or_else(|| no_root(x / rho))?;
    if g_max <= 1.0 || f(g_max) < 0.0 {
        return Err(no_root(g_max));
    }
    brent(f, 1.0, g_max, tol, 300).ok_or_else(|| no_root(g_max))
}

/// Brent's method on a sign-changing bracket `[a, b]` (either endpoint may
/// be a root). Returns `None` if the bracket does not change sign.
fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, max_iter: usize) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs().max(1e-300);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            // inverse quadratic interpolation or secant
            let s = fb / fa;
            let (mut p, mut qq);
            if a == c {
                p = 2.0 * m * s;
                qq = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                qq = -qq;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * qq - (tol * qq).abs()).min((e * qq).abs()) {
                e = d;
                d = p / qq;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(b)
}

/// Truncated power-series product.
fn series_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for (i, &ai) in a.iter().enumerate().take(n + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `exp(a)` for a series with `a_0 = 0`, via `n E_n = Σ k a_k E_{n−k}`.
fn series_exp(a: &[f64], n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for m in 1..=n {
        let s: f64 = (1..=m).map(|k| k as f64 * a[k] * e[m - k]).sum();
        e[m] = s / m as f64;
    }
    e
}

/// Coefficients `ȟ_1, …, ȟ_N` of `R_Ω(x;q)/(1−q) − 1` in powers of
/// `z = q^x`, from the fixed point `H = z (1+H) e^{ς(1+H)}` iterated on
/// truncated series (each pass fixes one more coefficient). The result is
/// checked against [`solve_r_omega`] at a point well inside the disc of
/// convergence.
pub fn series_h_omega(q: QParam, n_max: usize) -> Result<MomentVector> {
    q.require_deformed()?;
    if n_max == 0 {
        return Err(Error::InvalidArgument("need at least one coefficient".into()));
    }
    let rho = q.ln_inv_q();
    let s = rho * rho;
    let mut h = vec![0.0; n_max + 1];
    for _ in 0..n_max {
        let scaled: Vec<f64> = h.iter().map(|v| s * v).collect();
        let e = series_exp(&scaled, n_max);
        let mut one_plus_h = h.clone();
        one_plus_h[0] += 1.0;
        let prod = series_mul(&one_plus_h, &e, n_max);
        let mut next = vec![0.0; n_max + 1];
        for k in 1..=n_max {
            next[k] = s.exp() * prod[k - 1];
        }
        h = next;
    }
    let residual = extraction_residual(q, &h[1..])?;
    if residual > SERIES_RESIDUAL_TOL {
        return Err(Error::IllConditioned { residual });
    }
    MomentVector::new(MomentKind::H, h[1..].to_vec())
}

/// `|1 + Σ ȟ_n z₀^n − G(z₀)|` at a `z₀` where truncation is below `1e−10`.
fn extraction_residual(q: QParam, h: &[f64]) -> Result<f64> {
    let n = h.len();
    let x_min = admissible_x_min(q);
    let rho = q.ln_inv_q();
    let ratio = 0.1f64.min(1e-10f64.powf(1.0 / (n as f64 + 1.0)));
    // z₀ = ratio · z_conv  ⇔  x₀ = x_min + ln(1/ratio)/ϱ
    let x0 = x_min - ratio.ln() / rho;
    let z0 = (-rho * x0).exp();
    let series = 1.0 + h.iter().rev().fold(0.0, |acc, &c| (acc + c) * z0);
    let g = solve_g(x0, q, DEFAULT_TOL)?;
    Ok((series - g).abs())
}

/// Residuals of the self-similar form of the limit shape at `(u, ϱ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutomodelResidual {
    /// `|m (1 − e^{−ϱ(u−m)}) − ϱ|` with `m = ϱ R_Ω(u; e^{−ϱ})/(1 − e^{−ϱ})`.
    pub implicit: f64,
    /// `|2 m m_u − u m_u + ϱ m_ϱ − m|` by central differences.
    pub pde: f64,
    /// `|2 m m_u − u m_u − m|`, the classical equation, small as `ϱ → 0`.
    pub classical: f64,
}

/// Default finite-difference step for [`automodel_residual`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub fn automodel_residual(u: f64, rho: f64) -> Result<AutomodelResidual> {
    automodel_residual_with_step(u, rho, DEFAULT_FD_STEP)
}

/// `m(u, ϱ) = ϱ G`, the rescaled R-function of the self-similar profile.
fn automodel_m(u: f64, rho: f64) -> Result<f64> {
    let q = QParam::new((-rho).exp())?;
    Ok(rho * solve_g(u, q, DEFAULT_TOL)?)
}

/// As [`automodel_residual`] with step `h` in `u` and in `ln ϱ`.
pub fn automodel_residual_with_step(u: f64, rho: f64, h: f64) -> Result<AutomodelResidual> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidArgument(format!("ϱ = {rho} must be positive")));
    }
    if !(h > 0.0) || u + h == u || rho * h.exp() == rho || h >= 0.5 {
        return Err(Error::StepDegenerate {
            step: h,
            reason: "step must be positive, resolvable at (u, ϱ) and below 0.5",
        });
    }
    let m = automodel_m(u, rho)?;
    let implicit = (m * -(-rho * (u - m)).exp_m1() - rho).abs();
    let m_u = (automodel_m(u + h, rho)? - automodel_m(u - h, rho)?) / (2.0 * h);
    // ϱ ∂_ϱ m = ∂ m / ∂ ln ϱ
    let m_lnrho = (automodel_m(u, rho * h.exp())? - automodel_m(u, rho * (-h).exp())?) / (2.0 * h);
    let transport = 2.0 * m * m_u - u * m_u - m;
    Ok(AutomodelResidual {
        implicit,
        pde: (transport + m_lnrho).abs(),
        classical: transport.abs(),
    })
}
