//! Menus, value vectors, simplex points and validated datasets.
//!
//! Everything here is immutable once constructed. Observation indices are
//! zero-based positions in [`Dataset::observations`]; reports render them
//! one-based.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric;

/// Default tolerance for simplex membership.
pub const DEFAULT_SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoiceError {
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("a menu needs at least two alternatives, found {0}")]
    TooFewAlternatives(usize),
    #[error("duplicate alternative label `{0}`")]
    DuplicateAlternative(String),
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, not 1")]
    BadSum { sum: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("records mix menus `{expected}` and `{found}`")]
    MixedMenus { expected: String, found: String },
    #[error("dataset has no observations")]
    EmptyDataset,
    #[error("{} invalid record(s); first: record {} ({})", .0.len(), .0[0].index + 1, .0[0].error)]
    InvalidRecords(Vec<RecordError>),
}

/// A validation failure attached to a zero-based record index.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordError {
    pub index: usize,
    pub error: ChoiceError,
}

/// A finite set of alternatives with a fixed ordering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Menu {
    id: String,
    alternatives: Vec<String>,
}

impl Menu {
    pub fn new(id: impl Into<String>, alternatives: Vec<String>) -> Result<Self, ChoiceError> {
        if alternatives.len() < 2 {
            return Err(ChoiceError::TooFewAlternatives(alternatives.len()));
        }
        for (i, label) in alternatives.iter().enumerate() {
            if alternatives[..i].contains(label) {
                return Err(ChoiceError::DuplicateAlternative(label.clone()));
            }
        }
        Ok(Self {
            id: id.into(),
            alternatives,
        })
    }

    /// Menu with alternatives labelled `a1..aN`.
    pub fn with_size(id: impl Into<String>, size: usize) -> Result<Self, ChoiceError> {
        Self::new(id, (1..=size).map(|i| format!("a{i}")).collect())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn len(&self) -> usize {
        self.alternatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alternatives.is_empty()
    }
}

/// Utility-relevant values, one per alternative. Entries are finite but
/// otherwise unrestricted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(entries: Vec<f64>) -> Result<Self, ChoiceError> {
        if let Some(index) = entries.iter().position(|x| !x.is_finite()) {
            return Err(ChoiceError::NonFinite { index });
        }
        Ok(Self(entries))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl From<ValueVector> for Vec<f64> {
    fn from(v: ValueVector) -> Self {
        v.0
    }
}

/// A probability vector: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexPoint(Vec<f64>);

impl TryFrom<Vec<f64>> for SimplexPoint {
    type Error = ChoiceError;

    fn try_from(raw: Vec<f64>) -> Result<Self, Self::Error> {
        validate_simplex(&raw, DEFAULT_SIMPLEX_TOL)
    }
}

impl From<SimplexPoint> for Vec<f64> {
    fn from(p: SimplexPoint) -> Self {
        p.0
    }
}

impl SimplexPoint {
    /// Wraps entries already known to be non-negative and sum to one.
    pub(crate) fn from_normalized(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|x| *x >= 0.0));
        Self(entries)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// The uniform distribution over `n` alternatives.
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }
}

/// Validate and normalize a raw probability vector.
///
/// Entries in `[-tol, 0)` are clamped to zero; the vector is then divided by
/// its compensated sum unless that sum is already one to within
/// `1e-15 * len`, which makes the operation idempotent.
pub fn validate_simplex(raw: &[f64], tol: f64) -> Result<SimplexPoint, ChoiceError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ChoiceError::BadTolerance(tol));
    }
    if raw.len() < 2 {
        return Err(ChoiceError::LengthMismatch {
            expected: 2,
            found: raw.len(),
        });
    }
    let mut entries = Vec::with_capacity(raw.len());
    for (index, &x) in raw.iter().enumerate() {
        if !x.is_finite() {
            return Err(ChoiceError::NonFinite { index });
        }
        if x < -tol {
            return Err(ChoiceError::NegativeEntry { index, value: x });
        }
        entries.push(x.max(0.0));
    }
    let total = numeric::sum(entries.iter().copied());
    if (total - 1.0).abs() > tol {
        return Err(ChoiceError::BadSum { sum: total });
    }
    if (total - 1.0).abs() > exact_sum_slack(entries.len()) {
        for x in &mut entries {
            *x /= total;
        }
    }
    Ok(SimplexPoint(entries))
}

/// Largest deviation of a normalized point's sum from one that is accepted
/// as exact.
pub fn exact_sum_slack(len: usize) -> f64 {
    1e-15 * len as f64
}

/// One recorded (values, probabilities) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub id: String,
    pub values: ValueVector,
    pub probs: SimplexPoint,
}

/// Observations over a single menu.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    menu: Menu,
    observations: Vec<Observation>,
}

impl Dataset {
    pub fn new(menu: Menu, observations: Vec<Observation>) -> Result<Self, ChoiceError> {
        if observations.is_empty() {
            return Err(ChoiceError::EmptyDataset);
        }
        for obs in &observations {
            for len in [obs.values.len(), obs.probs.len()] {
                if len != menu.len() {
                    return Err(ChoiceError::LengthMismatch {
                        expected: menu.len(),
                        found: len,
                    });
                }
            }
        }
        Ok(Self { menu, observations })
    }

    pub fn menu(&self) -> &Menu {
        &self.menu
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn values(&self, i: usize) -> &[f64] {
        self.observations[i].values.as_slice()
    }

    pub fn probs(&self, i: usize) -> &[f64] {
        self.observations[i].probs.as_slice()
    }

    /// Same dataset with `shift` added to every value entry.
    pub fn translated(&self, shift: f64) -> Result<Self, ChoiceError> {
        let observations = self
            .observations
            .iter()
            .map(|o| {
                Ok(Observation {
                    id: o.id.clone(),
                    values: ValueVector::new(
                        o.values.as_slice().iter().map(|x| x + shift).collect(),
                    )?,
                    probs: o.probs.clone(),
                })
            })
            .collect::<Result<Vec<_>, ChoiceError>>()?;
        Self::new(self.menu.clone(), observations)
    }
}

/// Unvalidated input for [`validate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub menu_id: String,
    pub obs_id: String,
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetWarning {
    /// Two observations share a value vector but report different
    /// probabilities, so the data cannot come from a single-valued map.
    DuplicateValues { first: usize, second: usize },
}

impl fmt::Display for DatasetWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetWarning::DuplicateValues { first, second } => write!(
                f,
                "observations {} and {} share a value vector but differ in probabilities",
                first + 1,
                second + 1
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ValidatedDataset {
    pub dataset: Dataset,
    pub warnings: Vec<DatasetWarning>,
}

/// Build a [`Dataset`] from raw records over `menu`.
///
/// Record-level errors are collected and returned together.
pub fn validate_dataset(
    menu: Menu,
    records: &[RawRecord],
    tol: f64,
) -> Result<ValidatedDataset, ChoiceError> {
    if records.is_empty() {
        return Err(ChoiceError::EmptyDataset);
    }
    if let Some(bad) = records.iter().find(|r| r.menu_id != menu.id()) {
        return Err(ChoiceError::MixedMenus {
            expected: menu.id().to_string(),
            found: bad.menu_id.clone(),
        });
    }

    let mut errors = Vec::new();
    let mut observations = Vec::with_capacity(records.len());
    for (index, record) in records.iter().enumerate() {
        match validate_record(&menu, record, tol) {
            Ok(obs) => observations.push(obs),
            Err(error) => errors.push(RecordError { index, error }),
        }
    }
    if !errors.is_empty() {
        return Err(ChoiceError::InvalidRecords(errors));
    }

    let mut warnings = Vec::new();
    for j in 0..observations.len() {
        for i in 0..j {
            if observations[i].values == observations[j].values
                && observations[i].probs != observations[j].probs
            {
                log::warn!(
                    "menu `{}`: observations {} and {} share values but differ in probabilities",
                    menu.id(),
                    i + 1,
                    j + 1
                );
                warnings.push(DatasetWarning::DuplicateValues {
                    first: i,
                    second: j,
                });
            }
        }
    }

    Ok(ValidatedDataset {
        dataset: Dataset::new(menu, observations)?,
        warnings,
    })
}

fn validate_record(menu: &Menu, record: &RawRecord, tol: f64) -> Result<Observation, ChoiceError> {
    for len in [record.values.len(), record.probs.len()] {
        if len != menu.len() {
            return Err(ChoiceError::LengthMismatch {
                expected: menu.len(),
                found: len,
            });
        }
    }
    Ok(Observation {
        id: record.obs_id.clone(),
        values: ValueVector::new(record.values.clone())?,
        probs: validate_simplex(&record.probs, tol)?,
    })
}
