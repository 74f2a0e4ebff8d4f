//! Measurement scenarios `(X, O, M)` and the event sheaf over them.
//!
//! A context is a sorted set of measurement indices. Sections over a context
//! are enumerated lexicographically: the first measurement of the context is
//! the most significant digit and outcomes follow their declared order. Row
//! and column indices of the incidence system depend on this order, so it is
//! part of the public contract.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Upper bound on `|O|^|X|` accepted by global-section enumeration.
pub const DEFAULT_GLOBAL_SECTION_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("scenario has no measurements")]
    NoMeasurements,
    #[error("scenario has no outcomes")]
    NoOutcomes,
    #[error("duplicate measurement label `{0}`")]
    DuplicateMeasurement(String),
    #[error("duplicate outcome label `{0}`")]
    DuplicateOutcome(String),
    #[error("context #{0} of the cover is empty")]
    EmptyContext(usize),
    #[error("cover is not an antichain: context {sub} is contained in context {sup}")]
    NotAntichain { sub: String, sup: String },
    #[error("measurement `{0}` appears in no context")]
    DanglingMeasurement(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("measurement index {0} out of range")]
    InvalidMeasurementIndex(usize),
    #[error("outcome index {0} out of range")]
    InvalidOutcomeIndex(usize),
    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),
    #[error("assignment has {got} outcomes for a context of size {expected}")]
    AssignmentLength { expected: usize, got: usize },
    #[error("context {sub:?} is not contained in {sup:?}")]
    NotContained { sub: Vec<usize>, sup: Vec<usize> },
    #[error("{count} global sections exceed the cap of {cap}")]
    TooManyGlobalSections { count: String, cap: u64 },
    #[error("sections disagree on measurement {measurement}")]
    Disagreement { measurement: usize },
}

/// A sorted, duplicate-free set of measurement indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Context(Vec<usize>);

impl Context {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Context(indices)
    }

    pub fn empty() -> Self {
        Context(Vec::new())
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: usize) -> bool {
        self.0.binary_search(&m).is_ok()
    }

    pub fn position(&self, m: usize) -> Option<usize> {
        self.0.binary_search(&m).ok()
    }

    pub fn is_subset(&self, other: &Context) -> bool {
        self.0.iter().all(|&m| other.contains(m))
    }

    pub fn intersection(&self, other: &Context) -> Context {
        Context(self.0.iter().copied().filter(|&m| other.contains(m)).collect())
    }

    pub fn union(&self, other: &Context) -> Context {
        Context::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }
}

impl From<Vec<usize>> for Context {
    fn from(v: Vec<usize>) -> Self {
        Context::new(v)
    }
}

/// An outcome assignment `s ∈ O^C`; `outcomes[k]` belongs to the k-th member
/// of the context.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Section {
    context: Context,
    outcomes: Vec<usize>,
}

impl Section {
    pub fn new(context: Context, outcomes: Vec<usize>) -> Result<Self, ScenarioError> {
        if context.len() != outcomes.len() {
            return Err(ScenarioError::AssignmentLength { expected: context.len(), got: outcomes.len() });
        }
        Ok(Section { context, outcomes })
    }

    /// Builds a section from `(measurement, outcome)` pairs in any order.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self, ScenarioError> {
        let mut sorted = pairs.to_vec();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 != w[1].1 {
                return Err(ScenarioError::Disagreement { measurement: w[0].0 });
            }
        }
        sorted.dedup();
        let (members, outcomes): (Vec<_>, Vec<_>) = sorted.into_iter().unzip();
        Ok(Section { context: Context(members), outcomes })
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn outcome_of(&self, measurement: usize) -> Option<usize> {
        self.context.position(measurement).map(|k| self.outcomes[k])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.context.members().iter().copied().zip(self.outcomes.iter().copied())
    }

    /// Position of this section in `enumerate_sections(self.context())`.
    pub fn index(&self, outcome_count: usize) -> usize {
        self.outcomes.iter().fold(0, |acc, &o| acc * outcome_count + o)
    }

    /// Inverse of [`Section::index`].
    pub fn from_index(context: &Context, mut index: usize, outcome_count: usize) -> Section {
        let mut outcomes = vec![0; context.len()];
        for slot in outcomes.iter_mut().rev() {
            *slot = index % outcome_count;
            index /= outcome_count;
        }
        Section { context: context.clone(), outcomes }
    }

    /// Forgets the outcomes of measurements outside `sub`.
    pub fn restrict(&self, sub: &Context) -> Result<Section, ScenarioError> {
        let mut outcomes = Vec::with_capacity(sub.len());
        for &m in sub.members() {
            match self.outcome_of(m) {
                Some(o) => outcomes.push(o),
                None => {
                    return Err(ScenarioError::NotContained {
                        sub: sub.members().to_vec(),
                        sup: self.context.members().to_vec(),
                    })
                }
            }
        }
        Ok(Section { context: sub.clone(), outcomes })
    }

    /// True when both sections assign the same outcome on every shared measurement.
    pub fn agrees_with(&self, other: &Section) -> bool {
        self.pairs().all(|(m, o)| other.outcome_of(m).is_none_or(|p| p == o))
    }
}

/// Glues a family of pairwise-agreeing sections into the unique section over
/// the union of their contexts.
pub fn glue(sections: &[Section]) -> Result<Section, ScenarioError> {
    let pairs: Vec<(usize, usize)> = sections.iter().flat_map(|s| s.pairs()).collect();
    Section::from_pairs(&pairs)
}

/// The triple `(X, O, M)`. Immutable once validated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementScenario {
    measurements: Vec<String>,
    outcomes: Vec<String>,
    cover: Vec<Context>,
}

impl MeasurementScenario {
    pub fn new<S: Into<String>, T: Into<String>>(
        measurements: Vec<S>,
        outcomes: Vec<T>,
        cover: Vec<Vec<usize>>,
    ) -> Result<Self, ScenarioError> {
        let measurements: Vec<String> = measurements.into_iter().map(Into::into).collect();
        let outcomes: Vec<String> = outcomes.into_iter().map(Into::into).collect();
        if measurements.is_empty() {
            return Err(ScenarioError::NoMeasurements);
        }
        if outcomes.is_empty() {
            return Err(ScenarioError::NoOutcomes);
        }
        if let Some(dup) = first_duplicate(&measurements) {
            return Err(ScenarioError::DuplicateMeasurement(dup));
        }
        if let Some(dup) = first_duplicate(&outcomes) {
            return Err(ScenarioError::DuplicateOutcome(dup));
        }
        let mut contexts = Vec::with_capacity(cover.len());
        for (i, raw) in cover.into_iter().enumerate() {
            if raw.is_empty() {
                return Err(ScenarioError::EmptyContext(i));
            }
            if let Some(&bad) = raw.iter().find(|&&m| m >= measurements.len()) {
                return Err(ScenarioError::InvalidMeasurementIndex(bad));
            }
            contexts.push(Context::new(raw));
        }
        let scenario = MeasurementScenario { measurements, outcomes, cover: contexts };
        for (i, a) in scenario.cover.iter().enumerate() {
            for (j, b) in scenario.cover.iter().enumerate() {
                if i != j && a.is_subset(b) && (a != b || i > j) {
                    return Err(ScenarioError::NotAntichain {
                        sub: scenario.context_key(a),
                        sup: scenario.context_key(b),
                    });
                }
            }
        }
        for (m, label) in scenario.measurements.iter().enumerate() {
            if !scenario.cover.iter().any(|c| c.contains(m)) {
                return Err(ScenarioError::DanglingMeasurement(label.clone()));
            }
        }
        Ok(scenario)
    }

    pub fn measurements(&self) -> &[String] {
        &self.measurements
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn cover(&self) -> &[Context] {
        &self.cover
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements.len()
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    pub fn measurement_index(&self, label: &str) -> Result<usize, ScenarioError> {
        self.measurements
            .iter()
            .position(|m| m == label)
            .ok_or_else(|| ScenarioError::UnknownMeasurement(label.to_string()))
    }

    pub fn outcome_index(&self, label: &str) -> Result<usize, ScenarioError> {
        self.outcomes.iter().position(|o| o == label).ok_or_else(|| ScenarioError::UnknownOutcome(label.to_string()))
    }

    pub fn context_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Context, ScenarioError> {
        let indices = labels.iter().map(|l| self.measurement_index(l.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Ok(Context::new(indices))
    }

    /// The context `X` of all measurements.
    pub fn full_context(&self) -> Context {
        Context((0..self.measurements.len()).collect())
    }

    /// Position of `context` in the cover.
    pub fn cover_position(&self, context: &Context) -> Option<usize> {
        self.cover.iter().position(|c| c == context)
    }

    /// Comma-joined measurement labels in context order, e.g. `A1,B1`.
    pub fn context_key(&self, context: &Context) -> String {
        context
            .members()
            .iter()
            .map(|&m| self.measurements.get(m).map_or("?", String::as_str))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Human-readable section label, e.g. `A1=0,B1=1`.
    pub fn section_label(&self, section: &Section) -> String {
        section
            .pairs()
            .map(|(m, o)| {
                format!(
                    "{}={}",
                    self.measurements.get(m).map_or("?", String::as_str),
                    self.outcomes.get(o).map_or("?", String::as_str)
                )
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn check_context(&self, context: &Context) -> Result<(), ScenarioError> {
        match context.members().iter().find(|&&m| m >= self.measurements.len()) {
            Some(&bad) => Err(ScenarioError::InvalidMeasurementIndex(bad)),
            None => Ok(()),
        }
    }

    pub fn check_section(&self, section: &Section) -> Result<(), ScenarioError> {
        self.check_context(section.context())?;
        match section.outcomes().iter().find(|&&o| o >= self.outcomes.len()) {
            Some(&bad) => Err(ScenarioError::InvalidOutcomeIndex(bad)),
            None => Ok(()),
        }
    }

    /// Number of sections over a context of the given size.
    pub fn section_count(&self, context_size: usize) -> Option<usize> {
        self.outcome_count().checked_pow(context_size as u32)
    }

    /// All `|O|^|C|` sections of `context` in lexicographic order.
    pub fn enumerate_sections(&self, context: &Context) -> Result<Vec<Section>, ScenarioError> {
        self.check_context(context)?;
        let count = self
            .section_count(context.len())
            .ok_or_else(|| ScenarioError::TooManyGlobalSections { count: "overflow".into(), cap: u64::MAX })?;
        let k = self.outcome_count();
        Ok((0..count).map(|i| Section::from_index(context, i, k)).collect())
    }

    pub fn global_section_count(&self) -> Option<u64> {
        (self.outcome_count() as u64).checked_pow(self.measurement_count() as u32)
    }

    pub fn enumerate_global_sections(&self) -> Result<Vec<Section>, ScenarioError> {
        self.enumerate_global_sections_capped(DEFAULT_GLOBAL_SECTION_CAP)
    }

    pub fn enumerate_global_sections_capped(&self, cap: u64) -> Result<Vec<Section>, ScenarioError> {
        self.ensure_global_cap(cap)?;
        self.enumerate_sections(&self.full_context())
    }

    pub fn ensure_global_cap(&self, cap: u64) -> Result<(), ScenarioError> {
        match self.global_section_count() {
            Some(count) if count <= cap => Ok(()),
            Some(count) => Err(ScenarioError::TooManyGlobalSections { count: count.to_string(), cap }),
            None => Err(ScenarioError::TooManyGlobalSections {
                count: format!("{}^{}", self.outcome_count(), self.measurement_count()),
                cap,
            }),
        }
    }

    pub fn description(&self) -> ScenarioDescription {
        ScenarioDescription {
            measurements: self.measurements.clone(),
            outcomes: self.outcomes.clone(),
            cover: self
                .cover
                .iter()
                .map(|c| c.members().iter().map(|&m| self.measurements[m].clone()).collect())
                .collect(),
        }
    }
}

impl fmt::Display for MeasurementScenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cover: Vec<String> = self.cover.iter().map(|c| format!("{{{}}}", self.context_key(c))).collect();
        write!(
            f,
            "X = {{{}}}, O = {{{}}}, M = {{{}}}",
            self.measurements.join(","),
            self.outcomes.join(","),
            cover.join(", ")
        )
    }
}

fn first_duplicate(labels: &[String]) -> Option<String> {
    let mut seen = HashSet::new();
    labels.iter().find(|l| !seen.insert(l.as_str())).cloned()
}

/// Scenario file format: cover entries name measurements by label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioDescription {
    pub measurements: Vec<String>,
    pub outcomes: Vec<String>,
    pub cover: Vec<Vec<String>>,
}

pub fn validate_scenario(raw: &ScenarioDescription) -> Result<MeasurementScenario, ScenarioError> {
    let mut cover = Vec::with_capacity(raw.cover.len());
    for context in &raw.cover {
        let mut indices = Vec::with_capacity(context.len());
        for label in context {
            let idx = raw
                .measurements
                .iter()
                .position(|m| m == label)
                .ok_or_else(|| ScenarioError::UnknownMeasurement(label.clone()))?;
            indices.push(idx);
        }
        cover.push(indices);
    }
    MeasurementScenario::new(raw.measurements.clone(), raw.outcomes.clone(), cover)
}

impl Serialize for MeasurementScenario {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.description().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementScenario {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = ScenarioDescription::deserialize(d)?;
        validate_scenario(&raw).map_err(serde::de::Error::custom)
    }
}
