#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclorat::rationalization::{pum_solve_closed, ClosedFormCost};
use cyclorat::{validate_simplex, Dataset, Menu, Observation, SimplexPoint, ValueVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn values(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> ValueVector {
    ValueVector::new((0..len).map(|_| rng.gen_range(-scale..=scale)).collect()).unwrap()
}

/// Uniform point of the simplex with `len` entries (any `len >= 1`).
pub fn weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn dirichlet(rng: &mut ChaCha8Rng, len: usize) -> SimplexPoint {
    validate_simplex(&weights(rng, len), 1e-9).unwrap()
}

pub fn build(size: usize, rows: Vec<(ValueVector, SimplexPoint)>) -> Dataset {
    let menu = Menu::with_size("m", size).unwrap();
    let observations = rows
        .into_iter()
        .enumerate()
        .map(|(i, (values, probs))| Observation {
            id: (i + 1).to_string(),
            values,
            probs,
        })
        .collect();
    Dataset::new(menu, observations).unwrap()
}

/// Perturbed-utility choices at random values.
pub fn pum_dataset(rng: &mut ChaCha8Rng, kind: ClosedFormCost, n: usize, size: usize) -> Dataset {
    let rows = (0..n)
        .map(|_| {
            let v = values(rng, size, 5.0);
            let p = pum_solve_closed(kind, &v);
            (v, p)
        })
        .collect();
    build(size, rows)
}

/// Random values with unrelated random probabilities.
pub fn noise_dataset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> Dataset {
    let rows = (0..n)
        .map(|_| (values(rng, size, 3.0), dirichlet(rng, size)))
        .collect();
    build(size, rows)
}

pub fn kind(k: u64) -> ClosedFormCost {
    if k % 2 == 0 {
        ClosedFormCost::NegEntropy
    } else {
        ClosedFormCost::Quadratic
    }
}
