mod common;

use proptest::prelude::*;
use qpl_core::growth::{deform, growth_derivative, mc_limit_experiment, pde_residual, time_derivative_fd, McReport};
use qpl_core::kernel::transition_weights;
use qpl_core::moments::{r_diagram, r_measure};
use qpl_core::{DiscreteMeasure, Error, QParam};

fn q(v: f64) -> QParam {
    QParam::new(v).unwrap()
}

#[test]
fn split_weights_recombine_as_t_vanishes() {
    for (i, lam) in common::random_partitions(30, 15, 21).iter().enumerate() {
        let qq = q([0.3, 0.6, 0.9][i % 3]);
        let w = lam.to_interlacing();
        let mu = transition_weights(&w, qq);
        let paired = |t: f64| -> Vec<f64> {
            let d = deform(&w, &mu, t).unwrap();
            let nu = transition_weights(d.diagram(), qq);
            nu.weights().chunks(2).map(|c| c[0] + c[1]).collect()
        };
        let (t1, t2) = (1e-4, 1e-6);
        let (a, b) = (paired(t1), paired(t2));
        for k in 0..mu.len() {
            // linear extrapolation to t = 0
            let at_zero = b[k] - t2 * (a[k] - b[k]) / (t1 - t2);
            assert!((at_zero - mu.weights()[k]).abs() < 1e-5, "{lam} k={k}");
        }
    }
}

#[test]
fn deformation_preserves_the_r_identity() {
    for (i, lam) in common::random_partitions(30, 15, 22).iter().enumerate() {
        let qq = q([0.4, 0.7, 0.95][i % 3]);
        let w = lam.to_interlacing();
        let d = deform(&w, &transition_weights(&w, qq), 0.01).unwrap();
        let dw = d.diagram();
        let nu = DiscreteMeasure::transition_measure(dw, &transition_weights(dw, qq)).unwrap();
        let hi = dw.support().1;
        for j in 0..6 {
            let x = hi + 1.5 + 0.7 * j as f64;
            let a = r_diagram(dw, qq, x).unwrap();
            let b = r_measure(&nu, qq, x).unwrap();
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{lam} x={x}");
        }
    }
}

#[test]
fn deformation_adds_area_t() {
    for lam in common::random_partitions(20, 20, 23) {
        let w = lam.to_interlacing();
        let d = deform(&w, &transition_weights(&w, q(0.5)), 0.02).unwrap();
        assert!((d.added_area() - 0.02).abs() < 1e-10, "{lam}");
        assert_eq!(d.maxima_t().len() + 1, d.minima_t().len());
    }
}

#[test]
fn large_deformations_are_rejected() {
    let w = qpl_core::Partition::new(vec![2, 1]).unwrap().to_interlacing();
    let mu = transition_weights(&w, q(0.5));
    assert!(matches!(deform(&w, &mu, 5.0), Err(Error::DeformationTooLarge { .. })));
    assert!(deform(&w, &mu, -1.0).is_err());
    assert!(matches!(pde_residual(&w, q(0.5), 5.0, 0.0, 1e-5), Err(Error::StepDegenerate { .. })));
}

#[test]
fn seed_blocks_agree_in_distribution() {
    let a = mc_limit_experiment(400, q(0.5), 300, 2, 1).unwrap();
    let b = mc_limit_experiment(400, q(0.5), 300, 2, 2).unwrap();
    for n in 0..2 {
        let xa: Vec<f64> = a.moments.iter().map(|m| m[n]).collect();
        let xb: Vec<f64> = b.moments.iter().map(|m| m[n]).collect();
        let (d, p) = common::ks_two_sample(&xa, &xb);
        assert!(p > 1e-3, "p{}: D = {d}, p = {p}", n + 1);
    }
}

#[test]
fn report_fields_and_serialization() {
    let r = mc_limit_experiment(100, q(0.6), 8, 3, 5).unwrap();
    assert_eq!(r.shapes.len(), 8);
    assert!(r.shapes.iter().all(|s| s.size() == 100));
    assert_eq!(r.moments.len(), 8);
    assert!((r.q_kernel - 0.6f64.powf(0.1)).abs() < 1e-15);
    let mean0 = r.moments.iter().map(|m| m[0]).sum::<f64>() / 8.0;
    assert!((mean0 - r.mean[0]).abs() < 1e-12);
    assert_eq!(r.z_scores().len(), 3);
    let back: McReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert!(mc_limit_experiment(10, QParam::classical(), 2, 2, 0).is_err());
    assert!(mc_limit_experiment(0, q(0.5), 2, 2, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn growth_derivative_matches_finite_difference(
        lam in common::partition_strategy(15),
        qv in 0.2f64..0.95,
        off in 1.5f64..5.0,
    ) {
        let w = lam.to_interlacing();
        let x = w.support().1 + off;
        let exact = growth_derivative(&w, q(qv), x).unwrap();
        let fd = time_derivative_fd(&w, q(qv), x, 1e-6).unwrap();
        prop_assert!((exact - fd).abs() < 1e-5 * exact.abs().max(1e-3), "{} vs {}", exact, fd);
        prop_assert!(pde_residual(&w, q(qv), x, 1e-6, 1e-5).unwrap() < 1e-5);
    }
}
