use num_rational::BigRational;
use proptest::prelude::*;
use qpl_core::diagrams::{enumerate_level, hook_data};
use qpl_core::rsk::{
    maj, maj_shape_polynomials, maj_tableau, mahonian_identity_exact, mahonian_polynomial,
    next_permutation, rsk_shape, standard_tableaux, tableau_genfun_check, Permutation,
    StandardTableau,
};
use qpl_core::QParam;

fn all_permutations(n: u32) -> Vec<Permutation> {
    let mut w: Vec<u32> = (1..=n).collect();
    let mut out = vec![Permutation::new(w.clone()).unwrap()];
    while next_permutation(&mut w) {
        out.push(Permutation::new(w.clone()).unwrap());
    }
    out
}

fn longest_increasing(seq: &[u32]) -> usize {
    let mut tails: Vec<u32> = Vec::new();
    for &v in seq {
        match tails.binary_search(&v) {
            Ok(_) => {}
            Err(i) if i == tails.len() => tails.push(v),
            Err(i) => tails[i] = v,
        }
    }
    tails.len()
}

#[test]
fn descents_transport_over_s7() {
    let perms = all_permutations(7);
    assert_eq!(perms.len(), 5040);
    for sigma in &perms {
        let (p, q) = rsk_shape(sigma);
        assert_eq!(p.shape(), q.shape());
        assert_eq!(q.descents(), sigma.descents(), "{:?}", sigma.one_line());
        assert_eq!(p.descents(), sigma.inverse().descents(), "{:?}", sigma.one_line());
    }
}

#[test]
fn rsk_is_a_bijection_on_s6() {
    type Rows = Vec<Vec<u32>>;
    let mut pairs: Vec<(Rows, Rows)> = all_permutations(6)
        .iter()
        .map(|s| {
            let (p, q) = rsk_shape(s);
            (p.rows().to_vec(), q.rows().to_vec())
        })
        .collect();
    pairs.sort();
    pairs.dedup();
    assert_eq!(pairs.len(), 720);
}

#[test]
fn mahonian_identity_is_exact() {
    for (num, den) in [(1, 3), (2, 5), (7, 4)] {
        let qr = BigRational::new(num.into(), den.into());
        for n in 1..=9 {
            let (sum, product) = mahonian_identity_exact(n, &qr).unwrap();
            assert_eq!(sum, product, "n={n} q={qr}");
        }
    }
}

#[test]
fn shape_polynomials_factor_through_recording_tableaux() {
    for n in 1..=8 {
        let polys = maj_shape_polynomials(n).unwrap();
        assert_eq!(polys.len(), enumerate_level(n).unwrap().len());
        let mut total = vec![0u64; 0];
        for (shape, poly) in &polys {
            let dim = hook_data(shape).unwrap().dim as u64;
            let mut expected = vec![0u64; poly.len()];
            for t in standard_tableaux(shape).unwrap() {
                expected[maj_tableau(&t) as usize] += dim;
            }
            assert_eq!(poly, &expected, "{shape}");
            if total.len() < poly.len() {
                total.resize(poly.len(), 0);
            }
            for (a, b) in total.iter_mut().zip(poly) {
                *a += b;
            }
        }
        assert_eq!(total, mahonian_polynomial(n));
    }
}

#[test]
fn tableau_generating_function() {
    for qv in [0.3, 0.7, 0.95] {
        let qq = QParam::new(qv).unwrap();
        for n in 1..=10 {
            for lam in enumerate_level(n).unwrap() {
                let r = tableau_genfun_check(&lam, qq).unwrap();
                assert!(r.abs() < 1e-10, "{lam} q={qv}: {r:e}");
            }
        }
    }
}

#[test]
fn tableau_count_matches_hook_formula() {
    for n in 1..=10 {
        for lam in enumerate_level(n).unwrap() {
            let count = standard_tableaux(&lam).unwrap().len() as u128;
            assert_eq!(count, hook_data(&lam).unwrap().dim);
        }
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(Permutation::new(vec![1, 1, 2]).is_err());
    assert!(Permutation::new(vec![0, 1]).is_err());
    assert!(StandardTableau::new(vec![vec![1, 3], vec![2], vec![4, 5]]).is_err());
    assert!(StandardTableau::new(vec![vec![2, 1]]).is_err());
    assert!(maj_shape_polynomials(10).is_err());
}

fn permutation_strategy(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<u32>>()).prop_shuffle())
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn first_row_is_longest_increasing_subsequence(sigma in permutation_strategy(40)) {
        let (p, q) = rsk_shape(&sigma);
        prop_assert_eq!(p.rows()[0].len(), longest_increasing(sigma.one_line()));
        prop_assert_eq!(q.descents(), sigma.descents());
        prop_assert_eq!(maj_tableau(&q), maj(&sigma));
        prop_assert_eq!(p.shape().size(), sigma.len());
    }

    #[test]
    fn inverse_swaps_the_tableaux(sigma in permutation_strategy(30)) {
        let (p, q) = rsk_shape(&sigma);
        let (pi, qi) = rsk_shape(&sigma.inverse());
        prop_assert_eq!(p.rows(), qi.rows());
        prop_assert_eq!(q.rows(), pi.rows());
    }
}
