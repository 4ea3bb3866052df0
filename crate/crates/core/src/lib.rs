//! Stochastic choice from strength-of-preference models, cyclic
//! monotonicity tests, and perturbed-utility rationalization of finite
//! choice data.
//!
//! The pipeline: [`preference`] turns value vectors into choice
//! probabilities, [`monotonicity`] decides whether a dataset of
//! (values, probabilities) pairs is cyclically monotone, and
//! [`rationalization`] builds a convex cost whose perturbed-utility
//! maximizers reproduce the data, then verifies it. [`cli`] wires these
//! into the `cyclorat` command.

pub mod choice;
pub mod cli;
pub mod fixtures;
pub mod lp;
pub mod monotonicity;
pub mod numeric;
pub mod preference;
pub mod rationalization;

pub use choice::{
    validate_dataset, validate_simplex, ChoiceError, Dataset, Menu, Observation, RawRecord,
    SimplexPoint, ValueVector,
};
pub use monotonicity::{
    brute_force_cm, check_cyclic_monotonicity, check_two_point_monotonicity,
    check_weak_stochastic_transitivity, cycle_sum, CmStatus, CmVerdict, CycleWitness,
};
pub use preference::{eval_preference, normalize, simulate_dataset, PreferenceModel};
pub use rationalization::{
    compute_potentials, conjugate_cost, evaluate_extension, pum_solve_closed, pum_solve_general,
    verify_rationalization, ClosedFormCost, CostEvaluator, PotentialFit,
};
