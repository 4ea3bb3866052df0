use serde::{Deserialize, Serialize};

use super::RationalizationError;
use crate::choice::{Dataset, SimplexPoint};
use crate::monotonicity::{self, CmStatus, DEFAULT_CM_TOL};
use crate::numeric;

/// Potentials and gradients defining the max-affine convex function
/// `f(v) = max_i [phi_i + <g_i, v - v^i>]` with `g_i = p^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialFit {
    /// Observation whose potential is pinned to zero.
    pub base_index: usize,
    pub potentials: Vec<f64>,
    pub gradients: Vec<SimplexPoint>,
}

impl PotentialFit {
    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }

    /// Checks that the fit refers to `d`: same size and `g_i = p^i`.
    pub fn check_matches(&self, d: &Dataset) -> Result<(), RationalizationError> {
        if self.potentials.len() != d.len() || self.gradients.len() != d.len() {
            return Err(RationalizationError::FitMismatch(format!(
                "fit has {} potentials and {} gradients for {} observations",
                self.potentials.len(),
                self.gradients.len(),
                d.len()
            )));
        }
        if self.base_index >= d.len() {
            return Err(RationalizationError::FitMismatch(format!(
                "base index {} out of range",
                self.base_index
            )));
        }
        for (i, g) in self.gradients.iter().enumerate() {
            if g.len() != d.menu().len() {
                return Err(RationalizationError::DimensionMismatch {
                    expected: d.menu().len(),
                    found: g.len(),
                });
            }
            if numeric::max_abs_diff(g.as_slice(), d.probs(i)) > 1e-12 {
                return Err(RationalizationError::FitMismatch(format!(
                    "gradient {} differs from the observed probabilities",
                    i + 1
                )));
            }
        }
        if self.potentials.iter().any(|x| !x.is_finite()) {
            return Err(RationalizationError::FitMismatch(
                "non-finite potential".into(),
            ));
        }
        Ok(())
    }

    /// Largest violation of `phi_j >= phi_i + <g_i, v^j - v^i>` over all
    /// pairs; zero when consistent.
    pub fn max_consistency_violation(&self, d: &Dataset) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let lower = self.potentials[i]
                    + numeric::dot_diff(self.gradients[i].as_slice(), d.values(j), d.values(i));
                worst = worst.max(lower - self.potentials[j]);
            }
        }
        worst
    }

    /// `c_i = <g_i, v^i> - phi_i`, the conjugate's value at `g_i`.
    pub fn intercepts(&self, d: &Dataset) -> Vec<f64> {
        self.gradients
            .iter()
            .zip(&self.potentials)
            .enumerate()
            .map(|(i, (g, phi))| numeric::dot(g.as_slice(), d.values(i)) - phi)
            .collect()
    }
}

/// [`compute_potentials_with_tol`] at the default cycle tolerance.
pub fn compute_potentials(d: &Dataset) -> Result<PotentialFit, RationalizationError> {
    compute_potentials_with_tol(d, DEFAULT_CM_TOL)
}

/// Longest-path potentials from observation 0 under edge weights
/// `u(i -> k) = <p^i, v^k - v^i>`.
///
/// Fails with the witness cycle when the data are not cyclically monotone
/// at `tol`, since longest paths are then unbounded.
pub fn compute_potentials_with_tol(
    d: &Dataset,
    tol: f64,
) -> Result<PotentialFit, RationalizationError> {
    let verdict = monotonicity::check_cyclic_monotonicity(d, tol)?;
    if let CmStatus::Violation(w) = verdict.status {
        return Err(RationalizationError::NotCyclicallyMonotone(w));
    }
    let n = d.len();
    // Shortest paths under w = -u, then negate.
    let w = monotonicity::edge_weights(d);
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    for _ in 1..n {
        let mut changed = false;
        for i in 0..n {
            let di = dist[i];
            if !di.is_finite() {
                continue;
            }
            for k in 0..n {
                if k != i && di + w[i * n + k] < dist[k] {
                    dist[k] = di + w[i * n + k];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Cycles within tolerance may pull the base slightly below zero.
    let base = dist[0];
    let potentials = dist.iter().map(|x| -(x - base)).collect();
    Ok(PotentialFit {
        base_index: 0,
        potentials,
        gradients: d.observations().iter().map(|o| o.probs.clone()).collect(),
    })
}

/// `max_i [phi_i + <g_i, v - v^i>]`.
pub fn evaluate_extension(
    fit: &PotentialFit,
    d: &Dataset,
    v: &[f64],
) -> Result<f64, RationalizationError> {
    if v.len() != d.menu().len() {
        return Err(RationalizationError::DimensionMismatch {
            expected: d.menu().len(),
            found: v.len(),
        });
    }
    if fit.len() != d.len() {
        return Err(RationalizationError::FitMismatch(format!(
            "fit has {} potentials for {} observations",
            fit.len(),
            d.len()
        )));
    }
    Ok((0..fit.len())
        .map(|i| fit.potentials[i] + numeric::dot_diff(fit.gradients[i].as_slice(), v, d.values(i)))
        .fold(f64::NEG_INFINITY, f64::max))
}
