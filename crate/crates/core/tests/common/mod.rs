#![allow(dead_code)]

use qpl_core::Partition;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random partitions with `1..=max_boxes` boxes from a fixed seed: a uniform
/// size, then parts drawn uniformly from what remains and sorted.
pub fn random_partitions(count: usize, max_boxes: u32, seed: u64) -> Vec<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_boxes);
            let mut rest = n;
            let mut parts = Vec::new();
            while rest > 0 {
                let p = rng.gen_range(1..=rest);
                parts.push(p);
                rest -= p;
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            Partition::new(parts).unwrap()
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Partitions with at most `max_boxes` boxes: parts are taken in order until
/// the budget is used up, then sorted.
pub fn partition_strategy(max_boxes: u32) -> impl proptest::strategy::Strategy<Value = Partition> {
    use proptest::prelude::*;
    proptest::collection::vec(1..=max_boxes, 0..=max_boxes as usize).prop_map(move |raw| {
        let mut budget = max_boxes;
        let mut parts: Vec<u32> = Vec::new();
        for p in raw {
            if p <= budget {
                parts.push(p);
                budget -= p;
            }
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts).unwrap()
    })
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    if lambda < 0.2 {
        return (d, 1.0);
    }
    let p: f64 = (1..=100)
        .map(|k| {
            let k = k as f64;
            2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp()
        })
        .sum();
    (d, p.clamp(0.0, 1.0))
}

/// Interlacing diagrams with real coordinates: `2m+1` gaps in
/// `[0.2, 2]` accumulated from a random start.
pub fn real_diagram_strategy(
    max_m: usize,
) -> impl proptest::strategy::Strategy<Value = qpl_core::InterlacingDiagram> {
    use proptest::prelude::*;
    (0..=max_m)
        .prop_flat_map(|m| (-3.0f64..3.0, proptest::collection::vec(0.2f64..2.0, 2 * m)))
        .prop_map(|(start, gaps)| {
            let mut pts = vec![start];
            for g in gaps {
                pts.push(pts.last().unwrap() + g);
            }
            let minima = pts.iter().step_by(2).copied().collect();
            let maxima = pts.iter().skip(1).step_by(2).copied().collect();
            qpl_core::InterlacingDiagram::new(minima, maxima).unwrap()
        })
}
