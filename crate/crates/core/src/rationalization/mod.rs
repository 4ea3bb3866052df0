//! Building a convex cost that rationalizes cyclically monotone data, and
//! solving perturbed utility problems `max_{p in simplex} <v, p> - C(p)`.
//!
//! The data-derived cost is the convex conjugate of the max-affine function
//! `f(v) = max_i [phi_i + <p^i, v - v^i>]`, where the potentials `phi` are
//! longest-path values in the observation digraph.

mod conjugate;
mod potentials;
mod pum;
mod verify;

pub use conjugate::VERTEX_ENUMERATION_MAX;
pub use conjugate::{conjugate_cost, ConjugateCost, CostDescription, CostEvaluator, LpMethod};
pub use potentials::{
    compute_potentials, compute_potentials_with_tol, evaluate_extension, PotentialFit,
};
pub use pum::{
    closed_form_value, project_to_simplex, pum_solve_closed, pum_solve_general, softmax,
    ClosedFormCost, PumSolution, MAX_ITERATIONS,
};
pub use verify::{verify_rationalization, VerificationReport, VerifyOptions};

use thiserror::Error;

use crate::choice::ChoiceError;
use crate::lp::LpError;
use crate::monotonicity::{CycleWitness, MonotonicityError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalizationError {
    #[error("data are not cyclically monotone (cycle sum {})", .0.cycle_sum)]
    NotCyclicallyMonotone(CycleWitness),
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("fit does not match the dataset: {0}")]
    FitMismatch(String),
    #[error("point lies outside the domain of the cost")]
    Infeasible,
    #[error("optimality gap {gap:e} still above tolerance after {iterations} iterations")]
    NoProgress { gap: f64, iterations: usize },
    #[error("cost has an empty domain")]
    EmptyDomain,
    #[error("parameter must be positive and finite, got {0}")]
    BadParameter(f64),
    #[error(transparent)]
    Monotonicity(#[from] MonotonicityError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}
