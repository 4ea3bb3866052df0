use serde::Serialize;

use super::{PotentialFit, RationalizationError};
use crate::choice::{Dataset, SimplexPoint};
use crate::lp::{self, LpOutcome, LpTolerances, StandardLp};
use crate::numeric;

/// Up to this many observations the conjugate LP is solved by enumerating
/// bases; beyond it, by the simplex method.
pub const VERTEX_ENUMERATION_MAX: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMethod {
    /// Vertex enumeration up to [`VERTEX_ENUMERATION_MAX`] atoms, simplex
    /// above.
    Auto,
    VertexEnumeration,
    Simplex,
}

/// Convex conjugate of a max-affine function with slopes `g_i` and
/// intercepts `-c_i`:
///
/// `C(p) = min { sum_i l_i c_i : l >= 0, sum_i l_i = 1, sum_i l_i g_i = p }`,
/// and `+inf` when `p` is outside the convex hull of the `g_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateCost {
    atoms: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
    dim: usize,
}

impl ConjugateCost {
    pub fn new(fit: &PotentialFit, d: &Dataset) -> Result<Self, RationalizationError> {
        fit.check_matches(d)?;
        Ok(Self {
            atoms: fit
                .gradients
                .iter()
                .map(|g| g.as_slice().to_vec())
                .collect(),
            intercepts: fit.intercepts(d),
            dim: d.menu().len(),
        })
    }

    /// Slopes of the underlying max-affine function (the observed `p^i`).
    pub fn atoms(&self) -> &[Vec<f64>] {
        &self.atoms
    }

    /// `c_i = <g_i, v^i> - phi_i`.
    pub fn intercepts(&self) -> &[f64] {
        &self.intercepts
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn program(&self, p: &[f64]) -> StandardLp {
        // Alternative rows except the last, plus the weights-sum-to-one row;
        // the dropped row is implied because every g_i and p sum to one.
        let n = self.atoms.len();
        let mut a = Vec::with_capacity(self.dim);
        let mut b = Vec::with_capacity(self.dim);
        for k in 0..self.dim - 1 {
            a.push(self.atoms.iter().map(|g| g[k]).collect());
            b.push(p[k]);
        }
        a.push(vec![1.0; n]);
        b.push(1.0);
        StandardLp {
            a,
            b,
            c: self.intercepts.clone(),
        }
    }

    /// `C(p)`, or `f64::INFINITY` outside the domain.
    pub fn evaluate(&self, p: &[f64]) -> Result<f64, RationalizationError> {
        self.evaluate_with(p, LpMethod::Auto)
    }

    pub fn evaluate_with(&self, p: &[f64], method: LpMethod) -> Result<f64, RationalizationError> {
        if p.len() != self.dim {
            return Err(RationalizationError::DimensionMismatch {
                expected: self.dim,
                found: p.len(),
            });
        }
        let program = self.program(p);
        let tol = LpTolerances::default();
        let use_vertices = match method {
            LpMethod::Auto => self.atoms.len() <= VERTEX_ENUMERATION_MAX,
            LpMethod::VertexEnumeration => true,
            LpMethod::Simplex => false,
        };
        let outcome = if use_vertices {
            lp::solve_vertex_enumeration(&program, &tol)?
        } else {
            lp::solve_simplex(&program, &tol)?
        };
        match outcome {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Ok(f64::INFINITY),
            // The weights live on a simplex, so the program is bounded.
            LpOutcome::Unbounded => unreachable!("conjugate program is bounded"),
        }
    }
}

/// `C(p)` for the cost rationalizing `d` through `fit`; `+inf` outside the
/// convex hull of the observed probabilities.
pub fn conjugate_cost(
    fit: &PotentialFit,
    d: &Dataset,
    p: &SimplexPoint,
) -> Result<f64, RationalizationError> {
    ConjugateCost::new(fit, d)?.evaluate(p.as_slice())
}

/// A convex cost on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub enum CostEvaluator {
    /// `sum_a p_a ln p_a`.
    NegEntropy,
    /// `1/2 sum_a p_a^2`.
    Quadratic,
    /// Conjugate of the fitted max-affine function; `+inf` off the hull.
    DataDerived(ConjugateCost),
    /// `DataDerived + epsilon * sum_a p_a ln p_a`.
    DataDerivedSmoothed { cost: ConjugateCost, epsilon: f64 },
}

pub(crate) fn neg_entropy(p: &[f64]) -> f64 {
    numeric::sum(p.iter().filter(|x| **x > 0.0).map(|x| x * x.ln()))
}

impl CostEvaluator {
    pub fn data_derived(fit: &PotentialFit, d: &Dataset) -> Result<Self, RationalizationError> {
        Ok(Self::DataDerived(ConjugateCost::new(fit, d)?))
    }

    pub fn smoothed(
        fit: &PotentialFit,
        d: &Dataset,
        epsilon: f64,
    ) -> Result<Self, RationalizationError> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(RationalizationError::BadParameter(epsilon));
        }
        Ok(Self::DataDerivedSmoothed {
            cost: ConjugateCost::new(fit, d)?,
            epsilon,
        })
    }

    /// `C(p)`; `+inf` outside the effective domain (including points off the
    /// simplex).
    pub fn evaluate(&self, p: &[f64]) -> Result<f64, RationalizationError> {
        let on_simplex =
            p.iter().all(|x| *x >= 0.0) && (numeric::sum(p.iter().copied()) - 1.0).abs() <= 1e-9;
        if !on_simplex {
            return Ok(f64::INFINITY);
        }
        match self {
            CostEvaluator::NegEntropy => Ok(neg_entropy(p)),
            CostEvaluator::Quadratic => Ok(0.5 * numeric::dot(p, p)),
            CostEvaluator::DataDerived(cost) => cost.evaluate(p),
            CostEvaluator::DataDerivedSmoothed { cost, epsilon } => {
                Ok(cost.evaluate(p)? + epsilon * neg_entropy(p))
            }
        }
    }

    /// Whether maximizers of `<v, p> - C(p)` are unique for every `v`.
    pub fn strictly_convex(&self) -> bool {
        !matches!(self, CostEvaluator::DataDerived(_))
    }

    pub fn describe(&self) -> CostDescription {
        match self {
            CostEvaluator::NegEntropy => CostDescription::NegEntropy,
            CostEvaluator::Quadratic => CostDescription::Quadratic,
            CostEvaluator::DataDerived(cost) => CostDescription::DataDerived {
                slopes: cost.atoms.clone(),
                intercepts: cost.intercepts.clone(),
            },
            CostEvaluator::DataDerivedSmoothed { cost, epsilon } => {
                CostDescription::DataDerivedSmoothed {
                    slopes: cost.atoms.clone(),
                    intercepts: cost.intercepts.clone(),
                    epsilon: *epsilon,
                }
            }
        }
    }
}

/// Serializable description of a cost. For the data-derived kinds,
/// `C(p) = min { sum_i l_i intercepts_i : l in simplex, sum_i l_i slopes_i = p }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostDescription {
    NegEntropy,
    Quadratic,
    DataDerived {
        slopes: Vec<Vec<f64>>,
        intercepts: Vec<f64>,
    },
    DataDerivedSmoothed {
        slopes: Vec<Vec<f64>>,
        intercepts: Vec<f64>,
        epsilon: f64,
    },
}
