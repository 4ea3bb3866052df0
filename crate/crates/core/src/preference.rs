//! Strength-of-preference families and their normalization into choice
//! probabilities.
//!
//! A model maps a value vector to a non-negative, not identically zero
//! strength per alternative. Choice probabilities are strengths divided by
//! their total. Built-in families work in log space with a shared max-shift
//! so that large values never overflow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::choice::{ChoiceError, Dataset, Menu, Observation, SimplexPoint, ValueVector};
use crate::numeric;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PreferenceError {
    #[error("strength vector is identically zero")]
    ZeroStrength,
    #[error("strength {index} is negative or not finite ({value})")]
    InvalidStrength { index: usize, value: f64 },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value vector is not listed in the custom table")]
    NotInTable,
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("no value vectors to simulate")]
    EmptyDataset,
    #[error(transparent)]
    Choice(#[from] ChoiceError),
}

/// Odd, increasing interaction kernel used by [`PreferenceModel::PairwiseRegret`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegretKernel {
    /// `r(x) = tanh(x)`.
    #[default]
    Tanh,
    /// `r(x) = x^3`, concave below zero and convex above.
    Cubic,
}

impl RegretKernel {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            RegretKernel::Tanh => x.tanh(),
            RegretKernel::Cubic => x * x * x,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub values: Vec<f64>,
    pub strengths: Vec<f64>,
}

/// A strength-of-preference family with its parameters.
///
/// The serialized form is the model schema accepted by the CLI, e.g.
/// `{"family": "pairwise_regret", "theta": 1.0, "kernel": "tanh"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PreferenceModel {
    /// `T_a(v) = exp(v_a)`.
    LuceExponential,
    /// `T_a(v) = exp(v_a + theta * sum_{b != a} r(v_a - v_b))`.
    PairwiseRegret {
        theta: f64,
        #[serde(default)]
        kernel: RegretKernel,
    },
    /// `T_a(v) = softplus(v_a) * (1 + sigma * |v_a - m| / (1 + |v_a| + |m|))`
    /// with `m` the mean of `v`.
    SalienceWeighted { sigma: f64 },
    /// Strengths listed explicitly for specific value vectors; undefined
    /// elsewhere.
    CustomTable { rows: Vec<TableRow> },
}

impl PreferenceModel {
    pub fn validate(&self) -> Result<(), PreferenceError> {
        match self {
            PreferenceModel::LuceExponential => Ok(()),
            PreferenceModel::PairwiseRegret { theta, .. } if theta.is_finite() => Ok(()),
            PreferenceModel::PairwiseRegret { theta, .. } => Err(
                PreferenceError::InvalidParameter(format!("theta must be finite, got {theta}")),
            ),
            PreferenceModel::SalienceWeighted { sigma } if sigma.is_finite() && *sigma >= 0.0 => {
                Ok(())
            }
            PreferenceModel::SalienceWeighted { sigma } => Err(PreferenceError::InvalidParameter(
                format!("sigma must be finite and non-negative, got {sigma}"),
            )),
            PreferenceModel::CustomTable { rows } => {
                for (i, row) in rows.iter().enumerate() {
                    if row.values.len() != row.strengths.len() {
                        return Err(PreferenceError::InvalidParameter(format!(
                            "table row {} has {} values but {} strengths",
                            i + 1,
                            row.values.len(),
                            row.strengths.len()
                        )));
                    }
                    if row.values.iter().any(|x| !x.is_finite()) {
                        return Err(PreferenceError::InvalidParameter(format!(
                            "table row {} has a non-finite value",
                            i + 1
                        )));
                    }
                    check_strengths(&row.strengths)?;
                }
                Ok(())
            }
        }
    }
}

/// Strengths stored as `exp(log_scale) * scaled`.
///
/// Normalization only needs `scaled`, so the overall scale can exceed the
/// range of `f64` without affecting choice probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct StrengthVector {
    log_scale: f64,
    scaled: Vec<f64>,
}

impl StrengthVector {
    pub fn from_values(values: Vec<f64>) -> Result<Self, PreferenceError> {
        check_strengths(&values)?;
        Ok(Self {
            log_scale: 0.0,
            scaled: values,
        })
    }

    fn from_log(log_strengths: &[f64]) -> Result<Self, PreferenceError> {
        if let Some(index) = log_strengths
            .iter()
            .position(|x| x.is_nan() || *x == f64::INFINITY)
        {
            return Err(PreferenceError::InvalidStrength {
                index,
                value: log_strengths[index],
            });
        }
        let shift = log_strengths
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if shift == f64::NEG_INFINITY {
            return Err(PreferenceError::ZeroStrength);
        }
        Ok(Self {
            log_scale: shift,
            scaled: log_strengths.iter().map(|x| (x - shift).exp()).collect(),
        })
    }

    /// The strengths themselves. May overflow for extreme inputs.
    pub fn values(&self) -> Vec<f64> {
        let scale = self.log_scale.exp();
        self.scaled.iter().map(|x| x * scale).collect()
    }

    pub fn scaled(&self) -> &[f64] {
        &self.scaled
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn len(&self) -> usize {
        self.scaled.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scaled.is_empty()
    }
}

fn check_strengths(values: &[f64]) -> Result<(), PreferenceError> {
    if let Some(index) = values.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(PreferenceError::InvalidStrength {
            index,
            value: values[index],
        });
    }
    if values.iter().all(|x| *x == 0.0) {
        return Err(PreferenceError::ZeroStrength);
    }
    Ok(())
}

/// Choice probabilities proportional to strengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedChoice {
    pub probs: SimplexPoint,
}

/// Evaluate the strength of preference of every alternative at `v`.
pub fn eval_preference(
    model: &PreferenceModel,
    v: &ValueVector,
) -> Result<StrengthVector, PreferenceError> {
    model.validate()?;
    let v = v.as_slice();
    match model {
        PreferenceModel::LuceExponential => StrengthVector::from_log(v),
        PreferenceModel::PairwiseRegret { theta, kernel } => {
            let logs: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(a, &va)| {
                    let interaction = numeric::sum(
                        v.iter()
                            .enumerate()
                            .filter(|(b, _)| *b != a)
                            .map(|(_, &vb)| kernel.apply(va - vb)),
                    );
                    va + theta * interaction
                })
                .collect();
            StrengthVector::from_log(&logs)
        }
        PreferenceModel::SalienceWeighted { sigma } => {
            let mean = numeric::sum(v.iter().copied()) / v.len() as f64;
            let logs: Vec<f64> = v
                .iter()
                .map(|&va| {
                    let salience = (va - mean).abs() / (1.0 + va.abs() + mean.abs());
                    log_softplus(va) + (sigma * salience).ln_1p()
                })
                .collect();
            StrengthVector::from_log(&logs)
        }
        PreferenceModel::CustomTable { rows } => rows
            .iter()
            .find(|row| row.values == v)
            .ok_or(PreferenceError::NotInTable)
            .and_then(|row| StrengthVector::from_values(row.strengths.clone())),
    }
}

/// `ln(ln(1 + e^x))` without overflow or underflow.
fn log_softplus(x: f64) -> f64 {
    if x < -30.0 {
        // ln(1 + e^x) = e^x (1 - e^x / 2 + ...)
        x + (-0.5 * x.exp()).ln_1p()
    } else {
        (x.max(0.0) + (-x.abs()).exp().ln_1p()).ln()
    }
}

/// Divide strengths by their total.
pub fn normalize(t: &StrengthVector) -> Result<NormalizedChoice, PreferenceError> {
    normalize_scaled(t.scaled())
}

/// [`normalize`] for a plain slice of strengths.
pub fn normalize_strengths(t: &[f64]) -> Result<NormalizedChoice, PreferenceError> {
    check_strengths(t)?;
    normalize_scaled(t)
}

fn normalize_scaled(t: &[f64]) -> Result<NormalizedChoice, PreferenceError> {
    check_strengths(t)?;
    let total = numeric::sum(t.iter().copied());
    let probs = t.iter().map(|x| x / total).collect();
    Ok(NormalizedChoice {
        probs: SimplexPoint::from_normalized(probs),
    })
}

/// Choice probabilities of `model` at `v`.
pub fn choice_probabilities(
    model: &PreferenceModel,
    v: &ValueVector,
) -> Result<SimplexPoint, PreferenceError> {
    Ok(normalize(&eval_preference(model, v)?)?.probs)
}

/// Dataset whose probabilities are the model's normalized strengths at each
/// value vector. Observation ids are `1..n`.
pub fn simulate_dataset(
    model: &PreferenceModel,
    menu: Menu,
    values: &[ValueVector],
) -> Result<Dataset, PreferenceError> {
    if values.is_empty() {
        return Err(PreferenceError::EmptyDataset);
    }
    model.validate()?;
    if let Some(bad) = values.iter().find(|v| v.len() != menu.len()) {
        return Err(PreferenceError::LengthMismatch {
            expected: menu.len(),
            found: bad.len(),
        });
    }
    let observations = values
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            Ok(Observation {
                id: (i + 1).to_string(),
                values: v.clone(),
                probs: choice_probabilities(model, v)?,
            })
        })
        .collect::<Result<Vec<_>, PreferenceError>>()?;
    Ok(Dataset::new(menu, observations)?)
}
