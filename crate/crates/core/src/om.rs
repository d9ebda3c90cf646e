//! Ontological models over a finite ontic space.
//!
//! An [`OntologicalModel`] assigns every preparation an [`EpistemicState`]
//! (a distribution over ontic states λ) and every measurement a
//! [`ResponseFunction`] ξ(k|λ). The model predicts
//! `Pr(k | prep, meas) = Σ_λ p_prep(λ) ξ_meas(k|λ)`, and is judged by whether
//! those predictions reproduce a table of Born probabilities.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{format_rational, serde_rational};
use crate::quantum::FLOAT_TOLERANCE;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("ontic space must contain at least one state")]
    EmptySpace,
    #[error("duplicate ontic label `{0}`")]
    DuplicateLabel(String),
    #[error("expected {expected} weights, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("negative weight {0}")]
    NegativeWeight(String),
    #[error("weights sum to {0}, expected 1")]
    NotNormalized(String),
    #[error("response entry {0} outside [0, 1]")]
    ResponseOutOfRange(String),
    #[error("responses at ontic state `{label}` sum to {sum}, expected 1")]
    ResponseNotNormalized { label: String, sum: String },
    #[error("response function has no outcomes")]
    NoOutcomes,
    #[error("duplicate outcome `{0}`")]
    DuplicateOutcome(String),
    #[error("component defined over a different ontic space")]
    SpaceMismatch,
    #[error("unknown preparation `{0}`")]
    UnknownPreparation(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("unknown outcome `{outcome}` for measurement `{measurement}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("no quantum probability given for ({0}, {1}, {2})")]
    MissingQuantumEntry(String, String, String),
    #[error("classification needs at least two preparations")]
    TooFewPreparations,
    #[error("invalid relabeling")]
    BadRelabeling,
    #[error("invalid model document: {0}")]
    Document(String),
}

/// The finite set Λ of ontic states, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OnticSpace {
    labels: Vec<String>,
}

impl OnticSpace {
    pub fn new<L: Into<String>>(labels: impl IntoIterator<Item = L>) -> Result<Self, ModelError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptySpace);
        }
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(ModelError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Λ = {1, …, n}.
    pub fn numbered(n: usize) -> Result<Self, ModelError> {
        Self::new((1..=n).map(|k| k.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A probability distribution p(λ) with exact rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicState {
    space: OnticSpace,
    weights: Vec<BigRational>,
}

impl EpistemicState {
    pub fn new(space: OnticSpace, weights: Vec<BigRational>) -> Result<Self, ModelError> {
        if weights.len() != space.len() {
            return Err(ModelError::WrongLength { expected: space.len(), found: weights.len() });
        }
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(ModelError::NegativeWeight(format_rational(w)));
        }
        let sum: BigRational = weights.iter().sum();
        if !sum.is_one() {
            return Err(ModelError::NotNormalized(format_rational(&sum)));
        }
        Ok(Self { space, weights })
    }

    /// Point mass on the ontic state at `index`.
    pub fn point_mass(space: OnticSpace, index: usize) -> Result<Self, ModelError> {
        let mut weights = vec![BigRational::zero(); space.len()];
        *weights.get_mut(index).ok_or(ModelError::WrongLength {
            expected: space.len(),
            found: index + 1,
        })? = BigRational::one();
        Self::new(space, weights)
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> &BigRational {
        &self.weights[index]
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.iter().enumerate().filter(|(_, w)| w.is_positive()).map(|(i, _)| i)
    }

    /// The index carrying all the weight, if this is a point mass.
    pub fn point_mass_index(&self) -> Option<usize> {
        self.weights.iter().position(|w| w.is_one())
    }
}

/// Outcome probabilities ξ(k|λ), stored as a table indexed `[outcome][λ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseFunction {
    space: OnticSpace,
    outcomes: Vec<String>,
    table: Vec<Vec<BigRational>>,
}

impl ResponseFunction {
    pub fn new(
        space: OnticSpace,
        outcomes: Vec<String>,
        table: Vec<Vec<BigRational>>,
    ) -> Result<Self, ModelError> {
        Self::build(space, outcomes, table, true)
    }

    /// Like [`ResponseFunction::new`] but only requires Σ_k ξ(k|λ) ≤ 1; the
    /// missing mass is an outcome the model does not report.
    pub fn subnormalized(
        space: OnticSpace,
        outcomes: Vec<String>,
        table: Vec<Vec<BigRational>>,
    ) -> Result<Self, ModelError> {
        Self::build(space, outcomes, table, false)
    }

    /// A copy with one entry replaced, keeping the result at most normalized.
    pub fn with_entry(
        &self,
        outcome: usize,
        lambda: usize,
        value: BigRational,
    ) -> Result<Self, ModelError> {
        let mut table = self.table.clone();
        let slot = table
            .get_mut(outcome)
            .and_then(|row| row.get_mut(lambda))
            .ok_or(ModelError::WrongLength { expected: self.space.len(), found: lambda + 1 })?;
        *slot = value;
        Self::subnormalized(self.space.clone(), self.outcomes.clone(), table)
    }

    fn build(
        space: OnticSpace,
        outcomes: Vec<String>,
        table: Vec<Vec<BigRational>>,
        normalized: bool,
    ) -> Result<Self, ModelError> {
        if outcomes.is_empty() {
            return Err(ModelError::NoOutcomes);
        }
        let mut seen = BTreeSet::new();
        for o in &outcomes {
            if !seen.insert(o) {
                return Err(ModelError::DuplicateOutcome(o.clone()));
            }
        }
        if table.len() != outcomes.len() {
            return Err(ModelError::WrongLength { expected: outcomes.len(), found: table.len() });
        }
        for row in &table {
            if row.len() != space.len() {
                return Err(ModelError::WrongLength { expected: space.len(), found: row.len() });
            }
            if let Some(v) = row.iter().find(|v| v.is_negative() || **v > BigRational::one()) {
                return Err(ModelError::ResponseOutOfRange(format_rational(v)));
            }
        }
        for (lambda, label) in space.labels().iter().enumerate() {
            let sum: BigRational = table.iter().map(|row| &row[lambda]).sum();
            let ok = if normalized { sum.is_one() } else { sum <= BigRational::one() };
            if !ok {
                return Err(ModelError::ResponseNotNormalized {
                    label: label.clone(),
                    sum: format_rational(&sum),
                });
            }
        }
        Ok(Self { space, outcomes, table })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn table(&self) -> &[Vec<BigRational>] {
        &self.table
    }

    pub fn outcome_index(&self, outcome: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == outcome)
    }

    pub fn response(&self, outcome: usize, lambda: usize) -> &BigRational {
        &self.table[outcome][lambda]
    }
}

/// ψ-classification of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    PsiComplete,
    PsiSupplemented,
    PsiEpistemic,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::PsiComplete => "psi_complete",
            Classification::PsiSupplemented => "psi_supplemented",
            Classification::PsiEpistemic => "psi_epistemic",
        })
    }
}

/// A probability that is either exact or a float.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    Float(f64),
}

impl Probability {
    pub fn to_f64(&self) -> f64 {
        match self {
            Probability::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Probability::Float(x) => *x,
        }
    }

    /// Exact comparison for exact values, [`FLOAT_TOLERANCE`] otherwise.
    pub fn matches(&self, model: &BigRational) -> bool {
        match self {
            Probability::Exact(r) => r == model,
            Probability::Float(x) => {
                (x - model.to_f64().unwrap_or(f64::NAN)).abs() <= FLOAT_TOLERANCE
            }
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(r) => write!(f, "{}", format_rational(r)),
            Probability::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Born probabilities keyed by (preparation, measurement, outcome).
pub type BornTable = BTreeMap<(String, String, String), Probability>;

/// One line of a reproduction report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionRow {
    pub preparation: String,
    pub measurement: String,
    pub outcome: String,
    pub model: BigRational,
    pub quantum: Probability,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionReport {
    pub rows: Vec<ReproductionRow>,
}

impl ReproductionReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ReproductionRow> {
        self.rows.iter().filter(|r| !r.matches)
    }
}

/// Preparations and measurements over one shared ontic space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologicalModel {
    space: OnticSpace,
    preparations: BTreeMap<String, EpistemicState>,
    measurements: BTreeMap<String, ResponseFunction>,
}

impl OntologicalModel {
    pub fn new(
        space: OnticSpace,
        preparations: BTreeMap<String, EpistemicState>,
        measurements: BTreeMap<String, ResponseFunction>,
    ) -> Result<Self, ModelError> {
        let same_space = preparations.values().all(|p| p.space == space)
            && measurements.values().all(|m| m.space == space);
        if !same_space {
            return Err(ModelError::SpaceMismatch);
        }
        Ok(Self { space, preparations, measurements })
    }

    pub fn space(&self) -> &OnticSpace {
        &self.space
    }

    pub fn preparations(&self) -> &BTreeMap<String, EpistemicState> {
        &self.preparations
    }

    pub fn measurements(&self) -> &BTreeMap<String, ResponseFunction> {
        &self.measurements
    }

    pub fn preparation(&self, label: &str) -> Result<&EpistemicState, ModelError> {
        self.preparations
            .get(label)
            .ok_or_else(|| ModelError::UnknownPreparation(label.to_string()))
    }

    pub fn measurement(&self, label: &str) -> Result<&ResponseFunction, ModelError> {
        self.measurements
            .get(label)
            .ok_or_else(|| ModelError::UnknownMeasurement(label.to_string()))
    }

    /// Σ_λ p_prep(λ) · ξ_meas(outcome | λ), exactly.
    pub fn predicted_probability(
        &self,
        prep: &str,
        meas: &str,
        outcome: &str,
    ) -> Result<BigRational, ModelError> {
        let p = self.preparation(prep)?;
        let m = self.measurement(meas)?;
        let k = m.outcome_index(outcome).ok_or_else(|| ModelError::UnknownOutcome {
            measurement: meas.to_string(),
            outcome: outcome.to_string(),
        })?;
        Ok(p.weights
            .iter()
            .enumerate()
            .map(|(lambda, w)| w * m.response(k, lambda))
            .sum())
    }

    /// Compares every (preparation, measurement, outcome) prediction against `quantum`.
    pub fn reproduction_check(&self, quantum: &BornTable) -> Result<ReproductionReport, ModelError> {
        let mut rows = Vec::new();
        for prep in self.preparations.keys() {
            for (meas, response) in &self.measurements {
                for outcome in response.outcomes() {
                    let key = (prep.clone(), meas.clone(), outcome.clone());
                    let q = quantum.get(&key).ok_or_else(|| {
                        ModelError::MissingQuantumEntry(key.0.clone(), key.1.clone(), key.2.clone())
                    })?;
                    let model = self.predicted_probability(prep, meas, outcome)?;
                    rows.push(ReproductionRow {
                        preparation: prep.clone(),
                        measurement: meas.clone(),
                        outcome: outcome.clone(),
                        matches: q.matches(&model),
                        quantum: q.clone(),
                        model,
                    });
                }
            }
        }
        Ok(ReproductionReport { rows })
    }

    /// Strict reading of ψ-completeness: every epistemic state is a point mass
    /// and the induced map preparation → λ is a bijection onto all of Λ.
    pub fn classify(&self) -> Result<Classification, ModelError> {
        if self.preparations.len() < 2 {
            return Err(ModelError::TooFewPreparations);
        }
        let states: Vec<&EpistemicState> = self.preparations.values().collect();
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                if overlap_witness(a, b)?.is_some() {
                    return Ok(Classification::PsiEpistemic);
                }
            }
        }
        let points: Option<BTreeSet<usize>> =
            states.iter().map(|s| s.point_mass_index()).collect();
        match points {
            Some(points) if points.len() == states.len() && points.len() == self.space.len() => {
                Ok(Classification::PsiComplete)
            }
            _ => Ok(Classification::PsiSupplemented),
        }
    }

    /// Renames ontic states: `new_order[i]` is the old index placed at position `i`.
    pub fn permute_space(&self, new_order: &[usize]) -> Result<Self, ModelError> {
        let n = self.space.len();
        let distinct: BTreeSet<usize> = new_order.iter().copied().collect();
        if new_order.len() != n || distinct.len() != n || distinct.iter().any(|&i| i >= n) {
            return Err(ModelError::BadRelabeling);
        }
        let space = OnticSpace::new(new_order.iter().map(|&i| self.space.labels[i].clone()))?;
        let preparations = self
            .preparations
            .iter()
            .map(|(k, p)| {
                let w = new_order.iter().map(|&i| p.weights[i].clone()).collect();
                Ok((k.clone(), EpistemicState::new(space.clone(), w)?))
            })
            .collect::<Result<_, ModelError>>()?;
        let measurements = self
            .measurements
            .iter()
            .map(|(k, m)| {
                let table = m
                    .table
                    .iter()
                    .map(|row| new_order.iter().map(|&i| row[i].clone()).collect())
                    .collect();
                Ok((k.clone(), ResponseFunction::new(space.clone(), m.outcomes.clone(), table)?))
            })
            .collect::<Result<_, ModelError>>()?;
        Self::new(space, preparations, measurements)
    }

    /// Merges ontic state `drop` into `keep`. Weights add; the merged response
    /// is the weight-averaged one (uniform average where both weights vanish),
    /// so predictions of every preparation are preserved whenever responses
    /// at the two states agree.
    pub fn merge_states(&self, keep: usize, drop: usize) -> Result<Self, ModelError> {
        let n = self.space.len();
        if keep == drop || keep >= n || drop >= n {
            return Err(ModelError::BadRelabeling);
        }
        let survivors: Vec<usize> = (0..n).filter(|&i| i != drop).collect();
        let space = OnticSpace::new(survivors.iter().map(|&i| self.space.labels[i].clone()))?;
        let preparations = self
            .preparations
            .iter()
            .map(|(k, p)| {
                let w = survivors
                    .iter()
                    .map(|&i| {
                        if i == keep {
                            &p.weights[keep] + &p.weights[drop]
                        } else {
                            p.weights[i].clone()
                        }
                    })
                    .collect();
                Ok((k.clone(), EpistemicState::new(space.clone(), w)?))
            })
            .collect::<Result<_, ModelError>>()?;
        let half = BigRational::new(1.into(), 2.into());
        let measurements = self
            .measurements
            .iter()
            .map(|(k, m)| {
                let table = m
                    .table
                    .iter()
                    .map(|row| {
                        survivors
                            .iter()
                            .map(|&i| {
                                if i == keep {
                                    (&row[keep] + &row[drop]) * &half
                                } else {
                                    row[i].clone()
                                }
                            })
                            .collect()
                    })
                    .collect();
                Ok((k.clone(), ResponseFunction::new(space.clone(), m.outcomes.clone(), table)?))
            })
            .collect::<Result<_, ModelError>>()?;
        Self::new(space, preparations, measurements)
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            lambda: self.space.labels.iter().cloned().map(OnticLabel::Text).collect(),
            preparations: self
                .preparations
                .iter()
                .map(|(k, p)| (k.clone(), RationalVec(p.weights.clone())))
                .collect(),
            measurements: self
                .measurements
                .iter()
                .map(|(k, m)| {
                    (
                        k.clone(),
                        MeasurementDocument { outcomes: m.outcomes.clone(), table: m.table.clone() },
                    )
                })
                .collect(),
        }
    }

    pub fn from_document(doc: ModelDocument) -> Result<Self, ModelError> {
        let space = OnticSpace::new(doc.lambda.into_iter().map(OnticLabel::into_string))?;
        let preparations = doc
            .preparations
            .into_iter()
            .map(|(k, w)| Ok((k, EpistemicState::new(space.clone(), w.0)?)))
            .collect::<Result<_, ModelError>>()?;
        let measurements = doc
            .measurements
            .into_iter()
            .map(|(k, m)| Ok((k, ResponseFunction::new(space.clone(), m.outcomes, m.table)?)))
            .collect::<Result<_, ModelError>>()?;
        Self::new(space, preparations, measurements)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("model documents serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| ModelError::Document(e.to_string()))?;
        Self::from_document(doc)
    }
}

/// Some λ with p_a(λ)·p_b(λ) > 0, if one exists.
pub fn overlap_witness(a: &EpistemicState, b: &EpistemicState) -> Result<Option<usize>, ModelError> {
    if a.space != b.space {
        return Err(ModelError::SpaceMismatch);
    }
    Ok(a.weights
        .iter()
        .zip(&b.weights)
        .position(|(x, y)| x.is_positive() && y.is_positive()))
}

/// Ontic labels in a model document may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OnticLabel {
    Text(String),
    Number(i64),
}

impl OnticLabel {
    fn into_string(self) -> String {
        match self {
            OnticLabel::Text(s) => s,
            OnticLabel::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalVec(#[serde(with = "serde_rational::vec")] pub Vec<BigRational>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementDocument {
    pub outcomes: Vec<String>,
    #[serde(with = "serde_rational::grid")]
    pub table: Vec<Vec<BigRational>>,
}

/// JSON wire form of an [`OntologicalModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub lambda: Vec<OnticLabel>,
    pub preparations: BTreeMap<String, RationalVec>,
    pub measurements: BTreeMap<String, MeasurementDocument>,
}
