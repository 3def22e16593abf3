mod common;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use qpl_core::diagrams::enumerate_level;
use qpl_core::kernel::transition_weights;
use qpl_core::moments::{
    h_moments, h_to_p, p_moments, p_to_h, r_diagram, r_measure, CycleIndexTable, MomentKind,
};
use qpl_core::{DiscreteMeasure, Error, InterlacingDiagram, MomentVector, QParam};

fn q(v: f64) -> QParam {
    QParam::new(v).unwrap()
}

fn measure_of(w: &InterlacingDiagram, qq: QParam) -> DiscreteMeasure {
    DiscreteMeasure::transition_measure(w, &transition_weights(w, qq)).unwrap()
}

#[test]
fn h_matches_p_to_h_for_all_small_partitions() {
    let n_max = 8;
    for qv in [0.3, 0.6, 0.9] {
        let qq = q(qv);
        for size in 1..=15 {
            for lam in enumerate_level(size).unwrap() {
                let w = lam.to_interlacing();
                let h = h_moments(&measure_of(&w, qq), qq, n_max).unwrap();
                let hp = p_to_h(&p_moments(&w, qq, n_max).unwrap()).unwrap();
                for (a, b) in h.values().iter().zip(hp.values()) {
                    assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{lam} q={qv}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn newton_recursion_matches_partition_sums() {
    let table = CycleIndexTable::new(12).unwrap();
    let mut rng = common::rng(3);
    for _ in 0..50 {
        use rand::Rng;
        let p: Vec<f64> = (0..12).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let brute = table.p_to_h(&p);
        let fast = p_to_h(&MomentVector::new(MomentKind::P, p).unwrap()).unwrap();
        for (a, b) in brute.iter().zip(fast.values()) {
            assert!((a - b).abs() <= 1e-11 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn trivial_diagram_moments() {
    let w = InterlacingDiagram::trivial(0.0);
    let p = p_moments(&w, q(0.5), 6).unwrap();
    assert!(p.values().iter().all(|&v| v == 1.0));
    let h = p_to_h(&p).unwrap();
    assert!(h.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn errors_are_reported() {
    let w = qpl_core::Partition::new(vec![3, 2]).unwrap().to_interlacing();
    let qq = q(0.5);
    assert!(matches!(r_diagram(&w, qq, 0.5), Err(Error::InsideSupport { .. })));
    assert!(matches!(p_moments(&w, q(1e-3), 200), Err(Error::MomentOverflow { .. })));
    assert!(p_moments(&w, QParam::classical(), 3).is_err());
    let signed = DiscreteMeasure::signed(vec![(0.0, 1.0), (1.0, -1.0), (2.0, 1.0)]).unwrap();
    assert!(h_moments(&signed, qq, 3).is_err());
    assert!(DiscreteMeasure::probability(vec![(0.0, 0.7), (1.0, 0.7)]).is_err());
    assert!(DiscreteMeasure::probability(vec![(0.0, -0.1), (1.0, 1.1)]).is_err());
}

#[test]
fn generating_identity_by_truncated_series() {
    let n_max = 3;
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let strategy = common::real_diagram_strategy(5);
    for case in 0..100 {
        let w = strategy.new_tree(&mut runner).unwrap().current();
        let qq = q([0.3, 0.5, 0.8][case % 3]);
        // q^{x − s_max} = 1e−3
        let x = w.support().1 + 3.0 * 10f64.ln() / qq.ln_inv_q();
        let z = qq.pow(x);
        let h = h_moments(&measure_of(&w, qq), qq, n_max).unwrap();
        let p = p_moments(&w, qq, n_max).unwrap();
        let lhs = 1.0 + (1..=n_max).map(|n| h.get(n) * z.powi(n as i32)).sum::<f64>();
        let rhs = (1..=n_max)
            .map(|n| p.get(n) * z.powi(n as i32) / n as f64)
            .sum::<f64>()
            .exp();
        let atoms = (2 * w.m() + 1) as f64;
        let bound = (2.0 + 3.0 * atoms) * 1e-3f64.powi(n_max as i32 + 1) + 1e-14;
        assert!((lhs - rhs).abs() < bound, "case {case}: {:e} vs bound {bound:e}", (lhs - rhs).abs());
    }
}

proptest! {
    #[test]
    fn p_h_round_trip(p in proptest::collection::vec(-3.0f64..3.0, 1..=12)) {
        let pv = MomentVector::new(MomentKind::P, p.clone()).unwrap();
        let back = h_to_p(&p_to_h(&pv).unwrap()).unwrap();
        for (a, b) in back.values().iter().zip(&p) {
            prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn markov_krein_on_real_diagrams(w in common::real_diagram_strategy(6), qv in 0.1f64..=1.0, off in 1.5f64..6.0) {
        let qq = q(qv);
        let mu = measure_of(&w, qq);
        for x in [w.support().1 + off, w.support().0 - off] {
            let a = r_diagram(&w, qq, x).unwrap();
            let b = r_measure(&mu, qq, x).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{} vs {}", a, b);
        }
    }

    #[test]
    fn transition_measure_is_a_probability(lam in common::partition_strategy(20), qv in 0.1f64..=1.0) {
        let mu = measure_of(&lam.to_interlacing(), q(qv));
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }
}
