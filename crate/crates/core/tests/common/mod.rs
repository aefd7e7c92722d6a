#![allow(dead_code)]

use diversify::bench::data::generate_unit_disc;
use diversify::problem::score_pool;
use diversify::{KernelConfig, ProblemInstance};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-disc pool scored with the default kernels.
pub fn disc_instance(n: usize, k: usize, lambda: f64, seed: u64) -> ProblemInstance {
    let (q, pool) = generate_unit_disc(n, seed).unwrap();
    let (sim, div) = score_pool(&q, &pool, &KernelConfig::default()).unwrap();
    ProblemInstance::new(sim, div, k, lambda).unwrap()
}

/// Arbitrary relevance in (0.05, 1] and arbitrary symmetric nonnegative diversity.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize, lambda: f64) -> ProblemInstance {
    let sim: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..=1.0)).collect();
    let mut div = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = rng.random_range(0.0..2.0);
            div[(i, j)] = d;
            div[(j, i)] = d;
        }
    }
    ProblemInstance::new(sim, div, k, lambda).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(lo..hi);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let rank = rng.random_range(1..=n);
    let b = DMatrix::from_fn(n, rank, |_, _| rng.random_range(-1.0..1.0));
    &b * b.transpose()
}

/// All K-subsets scored by brute force, best first (ties to the lexicographically first set).
pub fn brute_force(inst: &ProblemInstance) -> (Vec<usize>, f64) {
    fn rec(
        inst: &ProblemInstance,
        start: usize,
        cur: &mut Vec<usize>,
        best: &mut (Vec<usize>, f64),
    ) {
        if cur.len() == inst.k() {
            let v = inst.objective_quadratic(cur).unwrap();
            if v > best.1 {
                *best = (cur.clone(), v);
            }
            return;
        }
        for i in start..inst.n() {
            cur.push(i);
            rec(inst, i + 1, cur, best);
            cur.pop();
        }
    }
    let mut best = (Vec::new(), f64::NEG_INFINITY);
    rec(inst, 0, &mut Vec::new(), &mut best);
    best
}

pub fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}
