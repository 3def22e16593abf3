//! The verification suites run by `qpl verify`.

use std::collections::BTreeMap;

use qpl_core::diagrams::enumerate_level;
use qpl_core::dynamics::{closed_form, integrate_moments, limit_moments, polynomial_structure_residual};
use qpl_core::growth::{mc_limit_experiment, pde_residual};
use qpl_core::kernel::{default_grid, grow_trajectory_stream, partial_fraction_weights, transition_weights};
use qpl_core::limitshape::series_h_omega;
use qpl_core::moments::{default_mk_grid, h_moments, markov_krein_residuals, p_moments, p_to_h};
use qpl_core::qmeasure::{hook_identity_sides, q_measure};
use qpl_core::rsk::{pushforward_exact, total_variation};
use qpl_core::{DiscreteMeasure, Partition, QParam, Result};

/// Outcome of one suite: the worst observed error against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub metric: f64,
    pub tolerance: f64,
    pub detail: String,
    /// Set when the suite could not run to completion.
    pub error: Option<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.metric <= self.tolerance
    }
}

/// Inputs shared by the suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    /// Extra `q` to include next to the fixed grids.
    pub q: f64,
    /// Highest level for the hook identity.
    pub n: usize,
    /// Cap on every enumerated level.
    pub max_level: usize,
    pub seed: u64,
    /// Replaces every default tolerance when set.
    pub tolerance: Option<f64>,
}

type SuiteFn = fn(&SuiteParams) -> Result<(f64, String)>;

const SUITES: [(&str, f64, SuiteFn); 9] = [
    ("hook_identity", 1e-9, hook_identity),
    ("oracle_equivalence", 1e-9, oracle_equivalence),
    ("pushforward", 1e-12, pushforward),
    ("markov_krein", 1e-9, markov_krein),
    ("ode_closed_forms", 1e-7, ode_closed_forms),
    ("ode_polynomial_structure", 1e-8, ode_structure),
    ("limit_shape_moments", 1e-6, limit_shape_moments),
    ("pde_residual", 1e-5, growth_pde),
    ("determinism", 0.5, determinism),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.0).collect()
}

pub fn run_all(params: &SuiteParams) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|&(name, default_tol, f)| {
            let tolerance = params.tolerance.unwrap_or(default_tol);
            match f(params) {
                Ok((metric, detail)) => SuiteResult {
                    name,
                    metric,
                    tolerance,
                    detail,
                    error: None,
                },
                Err(e) => SuiteResult {
                    name,
                    metric: f64::INFINITY,
                    tolerance,
                    detail: String::new(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn q(v: f64) -> QParam {
    QParam::new(v).expect("q in (0, 1]")
}

fn with_config_q(fixed: &[f64], params: &SuiteParams) -> Vec<f64> {
    let mut qs = fixed.to_vec();
    if params.q < 1.0 && !qs.contains(&params.q) {
        qs.push(params.q);
    }
    qs
}

/// Random diagrams drawn from the growth chain itself.
fn sample_partitions(count: usize, max_boxes: usize, seed: u64) -> Result<Vec<Partition>> {
    (0..count)
        .map(|i| {
            let size = 1 + i % max_boxes;
            Ok(grow_trajectory_stream(size, q(0.6), seed, i as u64)?.final_shape())
        })
        .collect()
}

fn hook_identity(p: &SuiteParams) -> Result<(f64, String)> {
    let top = p.n.min(p.max_level);
    let mut worst = 0.0f64;
    for qv in with_config_q(&[0.1, 0.5, 0.9, 0.99], p) {
        for n in 1..=top {
            let (lhs, rhs) = hook_identity_sides(n, q(qv))?;
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    Ok((worst, format!("relative error for n <= {top}")))
}

fn oracle_equivalence(p: &SuiteParams) -> Result<(f64, String)> {
    let qs = with_config_q(&[0.3, 0.7, 0.95], p);
    let mut worst = 0.0f64;
    for (i, lam) in sample_partitions(60, 25, p.seed)?.iter().enumerate() {
        let qq = q(qs[i % qs.len()]);
        let w = lam.to_interlacing();
        let b = partial_fraction_weights(&w, qq, &default_grid(&w))?;
        worst = worst.max(transition_weights(&w, qq).max_abs_diff(&b));
    }
    Ok((worst, "max weight difference over 60 diagrams".into()))
}

fn pushforward(p: &SuiteParams) -> Result<(f64, String)> {
    let top = 8.min(p.max_level);
    let mut worst = 0.0f64;
    for qv in [0.2, 0.5, 0.8] {
        for n in 1..=top {
            let law = pushforward_exact(n, q(qv))?;
            let mut target = BTreeMap::new();
            for lam in enumerate_level(n)? {
                let v = q_measure(&lam, q(qv))?;
                target.insert(lam, v);
            }
            worst = worst.max(total_variation(&law, &target));
        }
    }
    Ok((worst, format!("total variation for n <= {top}")))
}

fn markov_krein(p: &SuiteParams) -> Result<(f64, String)> {
    let qs = with_config_q(&[0.3, 0.6, 0.9], p);
    let mut worst = 0.0f64;
    for (i, lam) in sample_partitions(50, 15, p.seed)?.iter().enumerate() {
        let qq = q(qs[i % qs.len()]);
        let w = lam.to_interlacing();
        let mu = DiscreteMeasure::transition_measure(&w, &transition_weights(&w, qq))?;
        worst = worst.max(markov_krein_residuals(&w, &mu, qq, &default_mk_grid(&w, 8))?.max());
        let h = h_moments(&mu, qq, 10)?;
        let hp = p_to_h(&p_moments(&w, qq, 10)?)?;
        for (a, b) in h.values().iter().zip(hp.values()) {
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    Ok((worst, "R residuals and h moments over 50 diagrams".into()))
}

fn ode_initial_data(seed: u64) -> Result<Vec<Vec<f64>>> {
    let mut inits = vec![vec![1.0; 6]];
    for (i, lam) in sample_partitions(3, 10, seed)?.iter().enumerate() {
        let qq = q([0.5, 0.7, 0.9][i]);
        inits.push(p_moments(&lam.to_interlacing(), qq, 6)?.values().to_vec());
    }
    Ok(inits)
}

fn ode_closed_forms(p: &SuiteParams) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for y0 in ode_initial_data(p.seed)? {
        for i in 0..=20 {
            let sigma = 0.1 * i as f64;
            let y = integrate_moments(&y0[..4], sigma, 1000)?.y;
            for n in 1..=4 {
                let c = closed_form(n, sigma, &y0)?;
                worst = worst.max((y[n - 1] - c).abs() / c.abs());
            }
        }
    }
    Ok((worst, "relative error for n <= 4 and sigma up to 2".into()))
}

fn ode_structure(p: &SuiteParams) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for y0 in ode_initial_data(p.seed)? {
        worst = worst.max(polynomial_structure_residual(&y0, 2.0, 2000)?);
    }
    Ok((worst, "polynomial fit residual for n <= 6".into()))
}

fn limit_shape_moments(p: &SuiteParams) -> Result<(f64, String)> {
    let mut worst = 0.0f64;
    for qv in with_config_q(&[0.3, 0.5, 0.7], p) {
        let series = series_h_omega(q(qv), 6)?;
        let ode = p_to_h(&limit_moments(q(qv), 6)?)?;
        for (a, b) in series.values().iter().zip(ode.values()) {
            worst = worst.max((a - b).abs() / b.abs());
        }
    }
    Ok((worst, "series vs ODE relative error for N <= 6".into()))
}

fn growth_pde(p: &SuiteParams) -> Result<(f64, String)> {
    let qs = with_config_q(&[0.3, 0.6, 0.85], p);
    let mut worst = 0.0f64;
    for (i, lam) in sample_partitions(20, 20, p.seed)?.iter().enumerate() {
        let w = lam.to_interlacing();
        let x = w.support().1 + 1.5 + (i % 4) as f64 * 0.5;
        worst = worst.max(pde_residual(&w, q(qs[i % qs.len()]), x, 1e-5, 1e-5)?);
    }
    Ok((worst, "residual at dt = dx = 1e-5 over 20 diagrams".into()))
}

fn determinism(p: &SuiteParams) -> Result<(f64, String)> {
    let mut mismatches = 0;
    let a = grow_trajectory_stream(500, q(0.7), p.seed, 3)?;
    let b = grow_trajectory_stream(500, q(0.7), p.seed, 3)?;
    if a != b {
        mismatches += 1;
    }
    let r1 = mc_limit_experiment(200, q(0.5), 4, 3, p.seed)?;
    let r2 = mc_limit_experiment(200, q(0.5), 4, 3, p.seed)?;
    if r1 != r2 {
        mismatches += 1;
    }
    Ok((mismatches as f64, "mismatching reruns".into()))
}
