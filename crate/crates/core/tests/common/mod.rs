#![allow(dead_code)]

use std::collections::BTreeSet;

use eigenratio::graph::{Edge, MeasuredGraph};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random tree plus about `n` extra edges. With `unit`, all weights are one
/// and the measure is uniform; otherwise `w`, `p`, `ell` and `mu` are random
/// and independent.
pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, unit: bool) -> MeasuredGraph<f64> {
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        pairs.insert((rng.gen_range(0..v), v));
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            pairs.insert((a.min(b), a.max(b)));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(i, j)| {
            if unit {
                Edge::pure(i, j, 1.0)
            } else {
                Edge::new(i, j, rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), Some(rng.gen_range(0.2..2.0)))
            }
        })
        .collect();
    let mu = if unit {
        vec![1.0 / n as f64; n]
    } else {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
        let s: f64 = raw.iter().sum();
        raw.iter().map(|x| x / s).collect()
    };
    MeasuredGraph::new(n, mu, edges).unwrap()
}

/// Nonnegative function with some exact zeros and repeated values.
pub fn random_nonnegative(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| match rng.gen_range(0..5) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen_range(0.0..5.0),
        })
        .collect()
}

pub fn shuffle(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    perm
}
