use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate_extension, ConjugateCost, PotentialFit, RationalizationError};
use crate::choice::Dataset;
use crate::numeric;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    /// Random mixtures of the observed gradients tested per observation, on
    /// top of every observed gradient itself.
    pub mixtures: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            mixtures: 1000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `|<v^i, p^i> - C(p^i) - f(v^i)|` per observation.
    pub fenchel_gaps: Vec<f64>,
    pub max_fenchel_gap: f64,
    /// `max_q [<v^i, q> - C(q)] - [<v^i, p^i> - C(p^i)]` over the sampled
    /// `q`, per observation. Never negative since `q = p^i` is sampled.
    pub optimality_gaps: Vec<f64>,
    pub max_optimality_gap: f64,
    /// Largest violation of the subgradient inequalities between potentials.
    pub max_consistency_violation: f64,
    /// Candidate points checked per observation.
    pub samples: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Check that each observed `p^i` maximizes `<v^i, p> - C(p)` for the
/// conjugate cost `C` built from `fit`.
///
/// Fenchel equality is checked exactly at each observation; optimality is
/// checked against every observed gradient and `options.mixtures` random
/// points of their convex hull drawn from a generator seeded with
/// `options.seed`.
pub fn verify_rationalization(
    d: &Dataset,
    fit: &PotentialFit,
    options: &VerifyOptions,
) -> Result<VerificationReport, RationalizationError> {
    if !(options.tol > 0.0 && options.tol.is_finite()) {
        return Err(RationalizationError::BadParameter(options.tol));
    }
    let cost = ConjugateCost::new(fit, d)?;
    let n = d.len();

    let mut candidates: Vec<Vec<f64>> = cost.atoms().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for k in 0..options.mixtures {
        candidates.push(random_mixture(cost.atoms(), k, &mut rng));
    }

    let costs: Vec<f64> = candidates
        .par_iter()
        .map(|q| cost.evaluate(q))
        .collect::<Result<_, _>>()?;
    if costs.iter().any(|c| !c.is_finite()) {
        return Err(RationalizationError::Infeasible);
    }

    let mut fenchel_gaps = Vec::with_capacity(n);
    let mut optimality_gaps = Vec::with_capacity(n);
    for i in 0..n {
        let v = d.values(i);
        let own = numeric::dot(v, d.probs(i)) - costs[i];
        let extension = evaluate_extension(fit, d, v)?;
        fenchel_gaps.push((own - extension).abs());
        let best = candidates
            .iter()
            .zip(&costs)
            .map(|(q, c)| numeric::dot(v, q) - c)
            .fold(f64::NEG_INFINITY, f64::max);
        optimality_gaps.push((best - own).max(0.0));
    }
    let max_fenchel_gap = fenchel_gaps.iter().copied().fold(0.0, f64::max);
    let max_optimality_gap = optimality_gaps.iter().copied().fold(0.0, f64::max);
    Ok(VerificationReport {
        passed: max_fenchel_gap <= options.tol && max_optimality_gap <= options.tol,
        max_consistency_violation: fit.max_consistency_violation(d).max(0.0),
        fenchel_gaps,
        max_fenchel_gap,
        optimality_gaps,
        max_optimality_gap,
        samples: candidates.len(),
        tolerance: options.tol,
    })
}

/// Even draws are uniform over the hull's weight simplex; odd draws mix two
/// or three random atoms, which reaches edges and faces more often.
fn random_mixture(atoms: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = atoms.len();
    let dim = atoms[0].len();
    let mut weights = vec![0.0; n];
    if k.is_multiple_of(2) || n == 1 {
        for w in &mut weights {
            *w = -(1.0 - rng.gen::<f64>()).ln();
        }
    } else {
        let picks = rng.gen_range(2..=3usize.min(n).max(2));
        for _ in 0..picks {
            weights[rng.gen_range(0..n)] += -(1.0 - rng.gen::<f64>()).ln();
        }
    }
    let total = numeric::sum(weights.iter().copied());
    let mut q: Vec<f64> = (0..dim)
        .map(|a| numeric::sum(atoms.iter().zip(&weights).map(|(g, w)| w / total * g[a])))
        .collect();
    let s = numeric::sum(q.iter().copied());
    for x in &mut q {
        *x = x.max(0.0) / s;
    }
    q
}
