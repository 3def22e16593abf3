//! The q-Plancherel measure `M_q(λ) = (1−q)^n dim λ q^{b(λ)} / Π[h(u)]`,
//! the harmonic function of the geometric specialization, and the hook
//! identity `Σ_{|λ|=n} q^{b(λ)} dim λ / Π[h(u)] = (1−q)^{−n}`.
//!
//! Throughout, `[k] = 1 − q^k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

use crate::diagrams::{self, Partition};
use crate::error::{Error, Result};

/// Threshold on `n·ln(1/q)` above which products are formed in log space.
const LOG_SPACE_THRESHOLD: f64 = 500.0;

/// The deformation parameter `q ∈ (0, 1]`, with `ln(1/q)` cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QParam {
    q: f64,
    ln_inv_q: f64,
}

impl QParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain { q, range: "(0, 1]" });
        }
        Ok(QParam {
            q,
            ln_inv_q: -q.ln(),
        })
    }

    /// The classical point `q = 1`.
    pub fn classical() -> Self {
        QParam {
            q: 1.0,
            ln_inv_q: 0.0,
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `ϱ = ln(1/q) ≥ 0`.
    pub fn ln_inv_q(&self) -> f64 {
        self.ln_inv_q
    }

    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// Errors unless `q < 1`.
    pub fn require_deformed(&self) -> Result<()> {
        if self.is_classical() {
            Err(Error::Domain {
                q: self.q,
                range: "(0, 1)",
            })
        } else {
            Ok(())
        }
    }

    /// `q^d` for real `d`.
    pub fn pow(&self, d: f64) -> f64 {
        (-d * self.ln_inv_q).exp()
    }

    /// `1 − q^d`, accurate when `q^d` is close to 1.
    pub fn one_minus_pow(&self, d: f64) -> f64 {
        -(-d * self.ln_inv_q).exp_m1()
    }

    /// `[k]/(1−q) = 1 + q + … + q^{k−1}`, equal to `k` at `q = 1`.
    pub fn q_integer(&self, k: u32) -> f64 {
        if self.is_classical() {
            k as f64
        } else {
            self.one_minus_pow(k as f64) / self.one_minus_pow(1.0)
        }
    }
}

impl TryFrom<f64> for QParam {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        QParam::new(q)
    }
}

impl From<QParam> for f64 {
    fn from(q: QParam) -> f64 {
        q.q
    }
}

/// `Σ_u ln([h(u)]/(1−q))` together with the hook data.
fn log_hook_factor(hooks: &[u32], q: QParam) -> f64 {
    hooks.iter().map(|&h| q.q_integer(h).ln()).sum()
}

/// `M_q^{(n)}(λ)`; at `q = 1` the Plancherel weight `dim²λ / n!`.
pub fn q_measure(lambda: &Partition, q: QParam) -> Result<f64> {
    let hd = diagrams::hook_data(lambda)?;
    let n = lambda.size() as f64;
    let dim = hd.dim as f64;
    if q.is_classical() {
        // dim / Π h(u) = dim² / n!
        let prod: f64 = hd.hooks.iter().map(|&h| h as f64).product();
        return Ok(dim / prod);
    }
    if n * q.ln_inv_q() > LOG_SPACE_THRESHOLD {
        let log = dim.ln() - hd.b_stat as f64 * q.ln_inv_q() - log_hook_factor(&hd.hooks, q);
        return Ok(log.exp());
    }
    // (1−q)^n / Π[h] as a product of per-box ratios (1−q)/[h] ∈ (0, 1]
    let ratio: f64 = hd.hooks.iter().map(|&h| 1.0 / q.q_integer(h)).product();
    Ok(dim * q.pow(hd.b_stat as f64) * ratio)
}

/// `φ(λ) = (1−q)^{|λ|} q^{b(λ)} / Π[h(u)]`, so that `M_q = dim · φ`.
pub fn harmonic(lambda: &Partition, q: QParam) -> Result<f64> {
    q.require_deformed()?;
    let hooks = diagrams::hook_lengths(lambda);
    let n = lambda.size() as f64;
    let b = lambda.b_stat() as f64;
    if n * q.ln_inv_q() > LOG_SPACE_THRESHOLD {
        return Ok((-b * q.ln_inv_q() - log_hook_factor(&hooks, q)).exp());
    }
    let ratio: f64 = hooks.iter().map(|&h| 1.0 / q.q_integer(h)).product();
    Ok(q.pow(b) * ratio)
}

/// Relative residual `(Σ_{|λ|=n} q^{b} dim/Π[h]) (1−q)^n − 1` of the hook
/// identity on level `n`.
pub fn hook_identity_residual(n: usize, q: QParam) -> Result<f64> {
    hook_identity_residual_with_limit(n, q, diagrams::DEFAULT_MAX_PARTITIONS)
}

pub fn hook_identity_residual_with_limit(n: usize, q: QParam, max_partitions: u64) -> Result<f64> {
    q.require_deformed()?;
    if n == 0 {
        return Err(Error::InvalidArgument("hook identity needs n ≥ 1".into()));
    }
    let level = diagrams::enumerate_level_with_limit(n, max_partitions)?;
    // Each term times (1−q)^n is M_q(λ); summing those avoids forming (1−q)^{−n}.
    let mut sum = 0.0;
    let mut comp = 0.0;
    for lambda in &level {
        let term = q_measure(lambda, q)?;
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok(sum - 1.0)
}

/// Absolute form of the hook identity: returns `(Σ, (1−q)^{−n})`.
pub fn hook_identity_sides(n: usize, q: QParam) -> Result<(f64, f64)> {
    q.require_deformed()?;
    let level = diagrams::enumerate_level(n)?;
    let mut sum = 0.0;
    for lambda in &level {
        let hd = diagrams::hook_data(lambda)?;
        let denom: f64 = hd.hooks.iter().map(|&h| q.one_minus_pow(h as f64)).product();
        sum += q.pow(hd.b_stat as f64) * hd.dim as f64 / denom;
    }
    Ok((sum, q.one_minus_pow(1.0).powi(-(n as i32))))
}

/// `M_q^{(n)}(λ)` in exact rational arithmetic for rational `q ∈ (0,1)`.
pub fn q_measure_exact(lambda: &Partition, q: &BigRational) -> Result<BigRational> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if !(q > &zero && q < &one) {
        return Err(Error::Domain {
            q: rational_to_f64(q),
            range: "(0, 1)",
        });
    }
    let hd = diagrams::hook_data(lambda)?;
    let mut value = BigRational::from_integer(BigInt::from(hd.dim));
    for &h in &hd.hooks {
        value *= (&one - q) / (&one - pow_rational(q, h as u64));
    }
    value *= pow_rational(q, hd.b_stat);
    Ok(value)
}

pub(crate) fn pow_rational(q: &BigRational, e: u64) -> BigRational {
    num_traits::pow::pow(q.clone(), e as usize)
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// The shortest decimal that round-trips to `v`, as an exact rational
/// (`0.3` gives `3/10`).
pub fn decimal_rational(v: f64) -> BigRational {
    let text = v.to_string();
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    match format!("{int}{frac}").parse::<BigInt>() {
        Ok(digits) => BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32)),
        Err(_) => BigRational::from_f64(v).expect("finite q"),
    }
}
