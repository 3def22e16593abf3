mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qpl_core::diagrams::enumerate_level;
use qpl_core::kernel::{
    default_grid, grow_trajectory, grow_trajectory_stream, is_probability, level_distribution,
    partial_fraction_weights, path_probability, sample_index, transition_weights, GrowthTrajectory,
    LatticeKernel,
};
use qpl_core::qmeasure::q_measure;
use qpl_core::rsk::standard_tableaux;
use qpl_core::{Partition, QParam};

fn q(v: f64) -> QParam {
    QParam::new(v).unwrap()
}

/// The row receiving each box along the path encoded by a standard tableau.
fn tableau_rows(rows: &[Vec<u32>], n: usize) -> Vec<u32> {
    let mut out = vec![0; n];
    for (r, row) in rows.iter().enumerate() {
        for &e in row {
            out[e as usize - 1] = r as u32;
        }
    }
    out
}

#[test]
fn marginal_equals_q_measure_over_all_paths() {
    for qv in [0.25, 0.6, 0.9] {
        for n in 1..=6 {
            for lam in enumerate_level(n).unwrap() {
                let total: f64 = standard_tableaux(&lam)
                    .unwrap()
                    .iter()
                    .map(|t| path_probability(&tableau_rows(t.rows(), n), q(qv)).unwrap())
                    .sum();
                let target = q_measure(&lam, q(qv)).unwrap();
                assert!((total - target).abs() <= 1e-13, "{lam} q={qv}: {total} vs {target}");
            }
        }
    }
}

#[test]
fn level_distribution_matches_q_measure() {
    for qv in [0.3, 0.8, 1.0] {
        let qq = q(qv);
        for n in [8, 12] {
            for (lam, p) in level_distribution(n, qq) {
                assert!((p - q_measure(&lam, qq).unwrap()).abs() < 1e-13, "{lam}");
            }
        }
    }
}

#[test]
fn sampled_marginal_at_level_ten() {
    let n = 10;
    let qq = q(0.6);
    let trials = 20_000u64;
    let mut counts: BTreeMap<Partition, u64> = BTreeMap::new();
    for s in 0..trials {
        let t = grow_trajectory_stream(n, qq, 1234, s).unwrap();
        *counts.entry(t.final_shape()).or_default() += 1;
    }
    // pool cells with expected count below 5
    let (mut chi2, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for lam in enumerate_level(n).unwrap() {
        let expected = trials as f64 * q_measure(&lam, qq).unwrap();
        let observed = *counts.get(&lam).unwrap_or(&0) as f64;
        if expected < 5.0 {
            pooled_obs += observed;
            pooled_exp += expected;
        } else {
            chi2 += (observed - expected).powi(2) / expected;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        chi2 += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    // 0.999 quantile of χ² with ≤ 41 degrees of freedom is below 75
    assert!(cells > 10);
    assert!(chi2 < 75.0, "chi2 = {chi2} over {cells} cells");
}

#[test]
fn continuity_at_q_one() {
    for lam in common::random_partitions(30, 15, 11) {
        let w = lam.to_interlacing();
        let classical = transition_weights(&w, QParam::classical());
        let slope = |eps: f64| {
            let d = transition_weights(&w, q(1.0 - eps));
            d.weights()
                .iter()
                .zip(classical.weights())
                .map(|(a, b)| (a - b) / eps)
                .collect::<Vec<f64>>()
        };
        let (s3, s4, s5) = (slope(1e-3), slope(1e-4), slope(1e-5));
        let scale = s5.iter().fold(1e-2f64, |m, v| m.max(v.abs()));
        for k in 0..s3.len() {
            assert!((s4[k] - s5[k]).abs() < 0.05 * scale, "{lam}: {} vs {}", s4[k], s5[k]);
            assert!((s3[k] - s4[k]).abs() < 10.0 * (s4[k] - s5[k]).abs() + 0.05 * scale);
        }
    }
}

#[test]
fn trajectories_are_reproducible_and_distinct_per_stream() {
    let a = grow_trajectory(200, q(0.7), 42).unwrap();
    let b = grow_trajectory(200, q(0.7), 42).unwrap();
    let c = grow_trajectory_stream(200, q(0.7), 42, 1).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.rows(), c.rows());
    assert_eq!(a.final_shape().size(), 200);
    let states = a.states();
    assert_eq!(states.len(), 201);
    for pair in states.windows(2) {
        assert!(pair[0].children().contains(&pair[1]));
    }
    let json = serde_json::to_string(&a).unwrap();
    let back: GrowthTrajectory = serde_json::from_str(&json).unwrap();
    assert_eq!(back, a);
}

#[test]
fn invalid_rows_are_rejected() {
    assert!(GrowthTrajectory::from_rows(vec![0, 2], 0, 0, q(0.5)).is_err());
    assert!(GrowthTrajectory::from_rows(vec![0, 1, 1], 0, 0, q(0.5)).is_err());
    assert!(GrowthTrajectory::from_rows(vec![0, 1, 0], 0, 0, q(0.5)).is_ok());
}

#[test]
fn sampler_prefers_smaller_index_on_ties() {
    struct Fixed(u64);
    impl rand::RngCore for Fixed {
        fn next_u32(&mut self) -> u32 {
            self.0 as u32
        }
        fn next_u64(&mut self) -> u64 {
            self.0
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            dest.fill(0);
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            dest.fill(0);
            Ok(())
        }
    }
    // u = 0 lands on the first positive weight
    assert_eq!(sample_index(&[0.0, 1.0, 1.0], &mut Fixed(0)), 1);
    assert_eq!(sample_index(&[0.5, 0.5], &mut Fixed(0)), 0);
    assert_eq!(sample_index(&[0.5, 0.5], &mut Fixed(u64::MAX)), 1);
}

proptest! {
    #[test]
    fn weights_form_a_probability_vector(w in common::real_diagram_strategy(6), qv in 0.05f64..=1.0) {
        let tw = transition_weights(&w, q(qv));
        prop_assert_eq!(tw.len(), w.minima().len());
        prop_assert!(is_probability(&tw, 1e-12), "{:?}", tw.weights());
    }

    #[test]
    fn weights_are_shift_invariant(w in common::real_diagram_strategy(5), shift in -5.0f64..5.0, qv in 0.1f64..0.95) {
        let moved = qpl_core::InterlacingDiagram::new(
            w.minima().iter().map(|x| x + shift).collect(),
            w.maxima().iter().map(|y| y + shift).collect(),
        ).unwrap();
        let a = transition_weights(&w, q(qv));
        let b = transition_weights(&moved, q(qv));
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn lattice_kernel_matches_product_formula(lam in common::partition_strategy(25), qv in 0.05f64..=1.0) {
        let qq = q(qv);
        let profile = lam.profile();
        let mut out = Vec::new();
        LatticeKernel::new(qq).weights_into(&profile.minima, &profile.maxima, &mut out);
        let direct = transition_weights(&lam.to_interlacing(), qq);
        for (a, b) in out.iter().zip(direct.weights()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_agrees_on_small_partitions(lam in common::partition_strategy(12), qv in 0.2f64..0.95) {
        let w = lam.to_interlacing();
        let a = transition_weights(&w, q(qv));
        let b = partial_fraction_weights(&w, q(qv), &default_grid(&w)).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-9);
    }
}

#[test]
fn oracle_rejects_grid_inside_support() {
    let w = Partition::new(vec![3, 1]).unwrap().to_interlacing();
    let grid: Vec<f64> = (0..w.minima().len()).map(|j| j as f64).collect();
    assert!(partial_fraction_weights(&w, q(0.5), &grid).is_err());
}
