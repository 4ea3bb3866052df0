//! Small hand-checked datasets used across tests and documentation.

use crate::choice::{validate_simplex, Dataset, Menu, Observation, ValueVector};

/// Dataset from explicit `(values, probs)` rows, with
/// observation ids `1..n`. Panics on invalid input.
pub fn dataset(rows: &[(&[f64], &[f64])]) -> Dataset {
    let size = rows.first().map_or(2, |r| r.0.len());
    let menu = Menu::with_size("m", size).expect("menu");
    let observations = rows
        .iter()
        .enumerate()
        .map(|(i, (v, p))| Observation {
            id: (i + 1).to_string(),
            values: ValueVector::new(v.to_vec()).expect("finite values"),
            probs: validate_simplex(p, 1e-9).expect("simplex point"),
        })
        .collect();
    Dataset::new(menu, observations).expect("dataset")
}

/// Logit choices at `v = (0,0)` and `v = (1,0)`; cyclically monotone.
pub fn softmax() -> Dataset {
    let e = std::f64::consts::E;
    dataset(&[
        (&[0.0, 0.0], &[0.5, 0.5]),
        (&[1.0, 0.0], &[e / (1.0 + e), 1.0 / (1.0 + e)]),
    ])
}

/// Two observations whose 2-cycle sums to -0.6.
pub fn violation() -> Dataset {
    dataset(&[(&[1.0, 0.0], &[0.3, 0.7]), (&[0.0, 1.0], &[0.6, 0.4])])
}
