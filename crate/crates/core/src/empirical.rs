//! Semiring-valued distributions over sections and empirical models.

use std::fmt;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::exact;
use crate::rational::{format_rational, parse_rational, Rational, RationalError, RationalizePolicy};
use crate::scenario::{Context, MeasurementScenario, ScenarioDescription, ScenarioError, Section};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmpiricalError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("context {context} expects {expected} weights, got {got}")]
    WeightCount { context: String, expected: usize, got: usize },
    #[error("weights for context {context} are not valid for the {semiring} semiring: {reason}")]
    NotNormalized { context: String, semiring: SemiringTag, reason: String },
    #[error("semiring mismatch: expected {expected}, found {found}")]
    SemiringMismatch { expected: SemiringTag, found: SemiringTag },
    #[error("model has {got} distributions for a cover of {expected} contexts")]
    TableSize { expected: usize, got: usize },
    #[error("distribution for cover context {expected} is over {found}")]
    ContextMismatch { expected: String, found: String },
    #[error("missing table entry for context {0}")]
    MissingContext(String),
    #[error("table entry {0} is not a cover context")]
    UnknownContext(String),
    #[error("event over {0} does not belong to the cover")]
    UnknownEvent(String),
    #[error("operation requires the prob semiring, model is {0}")]
    RequiresProbability(SemiringTag),
    #[error("distribution is over {found}, expected all measurements")]
    NotGlobal { found: String },
    #[error("weight {value} for context {context} is negative")]
    NegativeWeight { context: String, value: f64 },
    #[error("floating-point table cannot be made exactly normalized and compatible: {0}")]
    NotRepresentable(String),
    #[error("malformed model description: {0}")]
    Malformed(String),
}

/// Which semiring the weights live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemiringTag {
    /// Nonnegative rationals summing to one.
    #[serde(rename = "prob")]
    Probability,
    /// Rationals summing to one, sign unrestricted.
    #[serde(rename = "signed")]
    Signed,
    /// Booleans with at least one `true`.
    #[serde(rename = "bool")]
    Possibilistic,
}

impl fmt::Display for SemiringTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemiringTag::Probability => "prob",
            SemiringTag::Signed => "signed",
            SemiringTag::Possibilistic => "bool",
        })
    }
}

impl std::str::FromStr for SemiringTag {
    type Err = EmpiricalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prob" => Ok(SemiringTag::Probability),
            "signed" => Ok(SemiringTag::Signed),
            "bool" => Ok(SemiringTag::Possibilistic),
            other => Err(EmpiricalError::Malformed(format!("unknown semiring `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weights {
    Rational(Vec<Rational>),
    Boolean(Vec<bool>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Rational(v) => v.len(),
            Weights::Boolean(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// JSON-ready weights: `num/den` strings or booleans.
    pub fn to_json(&self) -> Value {
        match self {
            Weights::Rational(v) => Value::Array(v.iter().map(|r| Value::String(format_rational(r))).collect()),
            Weights::Boolean(v) => Value::Array(v.iter().map(|&b| Value::Bool(b)).collect()),
        }
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = match self {
            Weights::Rational(v) => v.iter().map(|r| r.to_string()).collect(),
            Weights::Boolean(v) => v.iter().map(|&b| if b { "T".into() } else { "F".into() }).collect(),
        };
        write!(f, "({})", items.join(", "))
    }
}

/// `e_C`: weights aligned with `enumerate_sections(context)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    context: Context,
    outcome_count: usize,
    semiring: SemiringTag,
    weights: Weights,
}

impl Distribution {
    pub fn new(
        context: Context,
        outcome_count: usize,
        semiring: SemiringTag,
        weights: Weights,
    ) -> Result<Self, EmpiricalError> {
        let label = format!("{:?}", context.members());
        let expected = outcome_count.checked_pow(context.len() as u32).unwrap_or(usize::MAX);
        if weights.len() != expected {
            return Err(EmpiricalError::WeightCount { context: label, expected, got: weights.len() });
        }
        let invalid = |reason: &str| EmpiricalError::NotNormalized {
            context: label.clone(),
            semiring,
            reason: reason.to_string(),
        };
        match (&weights, semiring) {
            (Weights::Rational(v), SemiringTag::Probability) => {
                if v.iter().any(Signed::is_negative) {
                    return Err(invalid("negative weight"));
                }
                if !crate::rational::sum(v).is_one() {
                    return Err(invalid("weights do not sum to 1"));
                }
            }
            (Weights::Rational(v), SemiringTag::Signed) => {
                if !crate::rational::sum(v).is_one() {
                    return Err(invalid("weights do not sum to 1"));
                }
            }
            (Weights::Boolean(v), SemiringTag::Possibilistic) => {
                if !v.iter().any(|&b| b) {
                    return Err(invalid("no section is possible"));
                }
            }
            _ => return Err(invalid("weight kind does not match semiring")),
        }
        Ok(Distribution { context, outcome_count, semiring, weights })
    }

    pub fn probability(context: Context, outcome_count: usize, weights: Vec<Rational>) -> Result<Self, EmpiricalError> {
        Distribution::new(context, outcome_count, SemiringTag::Probability, Weights::Rational(weights))
    }

    pub fn possibilistic(context: Context, outcome_count: usize, weights: Vec<bool>) -> Result<Self, EmpiricalError> {
        Distribution::new(context, outcome_count, SemiringTag::Possibilistic, Weights::Boolean(weights))
    }

    /// Point mass on `section`.
    pub fn dirac(section: &Section, outcome_count: usize, semiring: SemiringTag) -> Self {
        let n = outcome_count.pow(section.context().len() as u32);
        let hit = section.index(outcome_count);
        let weights = match semiring {
            SemiringTag::Possibilistic => Weights::Boolean((0..n).map(|i| i == hit).collect()),
            _ => Weights::Rational((0..n).map(|i| if i == hit { Rational::one() } else { Rational::zero() }).collect()),
        };
        Distribution { context: section.context().clone(), outcome_count, semiring, weights }
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn semiring(&self) -> SemiringTag {
        self.semiring
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn rational_weights(&self) -> Option<&[Rational]> {
        match &self.weights {
            Weights::Rational(v) => Some(v),
            Weights::Boolean(_) => None,
        }
    }

    pub fn boolean_weights(&self) -> Option<&[bool]> {
        match &self.weights {
            Weights::Boolean(v) => Some(v),
            Weights::Rational(_) => None,
        }
    }

    /// Weight of `section`, which must lie over this distribution's context.
    pub fn rational_weight(&self, section: &Section) -> Option<&Rational> {
        if section.context() != &self.context {
            return None;
        }
        self.rational_weights().and_then(|w| w.get(section.index(self.outcome_count)))
    }

    /// Boolean support: sections with nonzero (or true) weight.
    pub fn support(&self) -> Distribution {
        let weights = match &self.weights {
            Weights::Rational(v) => v.iter().map(|r| !r.is_zero()).collect(),
            Weights::Boolean(v) => v.clone(),
        };
        Distribution {
            context: self.context.clone(),
            outcome_count: self.outcome_count,
            semiring: SemiringTag::Possibilistic,
            weights: Weights::Boolean(weights),
        }
    }

    pub fn marginalize(&self, sub: &Context) -> Result<Distribution, EmpiricalError> {
        if !sub.is_subset(&self.context) {
            return Err(ScenarioError::NotContained {
                sub: sub.members().to_vec(),
                sup: self.context.members().to_vec(),
            }
            .into());
        }
        let k = self.outcome_count;
        let target = k.pow(sub.len() as u32);
        let positions: Vec<usize> = sub.members().iter().map(|&m| self.context.position(m).unwrap()).collect();
        let image = |i: usize| {
            let s = Section::from_index(&self.context, i, k);
            positions.iter().fold(0, |acc, &p| acc * k + s.outcomes()[p])
        };
        let weights = match &self.weights {
            Weights::Rational(v) => {
                let mut out = vec![Rational::zero(); target];
                for (i, w) in v.iter().enumerate() {
                    if !w.is_zero() {
                        out[image(i)] += w;
                    }
                }
                Weights::Rational(out)
            }
            Weights::Boolean(v) => {
                let mut out = vec![false; target];
                for (i, &w) in v.iter().enumerate() {
                    out[image(i)] |= w;
                }
                Weights::Boolean(out)
            }
        };
        Ok(Distribution { context: sub.clone(), outcome_count: k, semiring: self.semiring, weights })
    }
}

pub fn marginalize(dist: &Distribution, sub: &Context) -> Result<Distribution, EmpiricalError> {
    dist.marginalize(sub)
}

/// One distribution per cover context, all in the same semiring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel {
    scenario: MeasurementScenario,
    semiring: SemiringTag,
    table: Vec<Distribution>,
}

impl EmpiricalModel {
    pub fn new(
        scenario: MeasurementScenario,
        semiring: SemiringTag,
        table: Vec<Distribution>,
    ) -> Result<Self, EmpiricalError> {
        if table.len() != scenario.cover().len() {
            return Err(EmpiricalError::TableSize { expected: scenario.cover().len(), got: table.len() });
        }
        for (context, dist) in scenario.cover().iter().zip(&table) {
            if dist.context() != context {
                return Err(EmpiricalError::ContextMismatch {
                    expected: scenario.context_key(context),
                    found: scenario.context_key(dist.context()),
                });
            }
            if dist.semiring() != semiring {
                return Err(EmpiricalError::SemiringMismatch { expected: semiring, found: dist.semiring() });
            }
            if dist.outcome_count() != scenario.outcome_count() {
                return Err(EmpiricalError::Malformed("outcome count differs from scenario".into()));
            }
        }
        Ok(EmpiricalModel { scenario, semiring, table })
    }

    /// Convenience constructor from rational rows in cover order.
    pub fn from_rows(
        scenario: MeasurementScenario,
        semiring: SemiringTag,
        rows: Vec<Vec<Rational>>,
    ) -> Result<Self, EmpiricalError> {
        let k = scenario.outcome_count();
        let table = scenario
            .cover()
            .iter()
            .zip(rows)
            .map(|(c, w)| Distribution::new(c.clone(), k, semiring, Weights::Rational(w)))
            .collect::<Result<Vec<_>, _>>()?;
        EmpiricalModel::new(scenario, semiring, table)
    }

    pub fn scenario(&self) -> &MeasurementScenario {
        &self.scenario
    }

    pub fn semiring(&self) -> SemiringTag {
        self.semiring
    }

    pub fn table(&self) -> &[Distribution] {
        &self.table
    }

    pub fn distribution(&self, context: &Context) -> Option<&Distribution> {
        self.scenario.cover_position(context).map(|i| &self.table[i])
    }

    /// The possibilistic collapse of this model.
    pub fn support(&self) -> EmpiricalModel {
        EmpiricalModel {
            scenario: self.scenario.clone(),
            semiring: SemiringTag::Possibilistic,
            table: self.table.iter().map(Distribution::support).collect(),
        }
    }

    pub fn to_file(&self) -> ModelFile {
        let mut table = Map::new();
        for (c, d) in self.scenario.cover().iter().zip(&self.table) {
            table.insert(self.scenario.context_key(c), d.weights().to_json());
        }
        ModelFile { scenario: ScenarioSource::Inline(self.scenario.description()), semiring: self.semiring, table }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model serializes")
    }
}

/// Two cover contexts whose marginals on their overlap differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub first: usize,
    pub second: usize,
    pub overlap: Context,
    pub first_marginal: Distribution,
    pub second_marginal: Distribution,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    Incompatible(CompatibilityWitness),
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// Checks `e_C|C∩C' = e_C'|C∩C'` for every pair of cover contexts in
/// lexicographic pair order and reports the first failure.
pub fn check_compatibility(model: &EmpiricalModel) -> Compatibility {
    let cover = model.scenario.cover();
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = cover[i].intersection(&cover[j]);
            if overlap.is_empty() {
                continue;
            }
            let a = model.table[i].marginalize(&overlap).expect("overlap is a subcontext");
            let b = model.table[j].marginalize(&overlap).expect("overlap is a subcontext");
            if a.weights() != b.weights() {
                return Compatibility::Incompatible(CompatibilityWitness {
                    first: i,
                    second: j,
                    overlap,
                    first_marginal: a,
                    second_marginal: b,
                });
            }
        }
    }
    Compatibility::Compatible
}

/// Marginalizes a distribution over global sections onto every cover context.
pub fn model_from_global_distribution(
    scenario: &MeasurementScenario,
    global: &Distribution,
) -> Result<EmpiricalModel, EmpiricalError> {
    if global.context() != &scenario.full_context() || global.outcome_count() != scenario.outcome_count() {
        return Err(EmpiricalError::NotGlobal { found: scenario.context_key(global.context()) });
    }
    let table = scenario.cover().iter().map(|c| global.marginalize(c)).collect::<Result<Vec<_>, _>>()?;
    EmpiricalModel::new(scenario.clone(), global.semiring(), table)
}

/// `Σ w_i e_{C_i}(s_i)` for events given as sections over cover contexts.
pub fn evaluate_expression(model: &EmpiricalModel, terms: &[(Section, Rational)]) -> Result<Rational, EmpiricalError> {
    if model.semiring != SemiringTag::Probability {
        return Err(EmpiricalError::RequiresProbability(model.semiring));
    }
    let mut total = Rational::zero();
    for (event, weight) in terms {
        model.scenario.check_section(event)?;
        let dist = model
            .distribution(event.context())
            .ok_or_else(|| EmpiricalError::UnknownEvent(model.scenario.context_key(event.context())))?;
        let p = dist
            .rational_weight(event)
            .ok_or_else(|| EmpiricalError::UnknownEvent(model.scenario.section_label(event)))?;
        total += weight * p;
    }
    Ok(total)
}

/// Turns floating-point context tables into an exactly normalized, exactly
/// compatible probability model.
///
/// Each entry is first rationalized under `policy`. If the result is already
/// normalized and compatible it is returned as is. Otherwise (irrational
/// probabilities) the entries are placed on a grid of denominator
/// `max_denominator²` and corrected by the least-norm exact adjustment that
/// restores normalization and overlap agreement, touching only entries that
/// are nonzero. Strict policies refuse the correction step.
pub fn rationalize_model(
    scenario: &MeasurementScenario,
    rows: &[Vec<f64>],
    policy: RationalizePolicy,
) -> Result<EmpiricalModel, EmpiricalError> {
    const ZERO_TOL: f64 = 1e-12;
    if rows.len() != scenario.cover().len() {
        return Err(EmpiricalError::TableSize { expected: scenario.cover().len(), got: rows.len() });
    }
    let mut cleaned: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (c, row) in scenario.cover().iter().zip(rows) {
        let mut r = Vec::with_capacity(row.len());
        for &x in row {
            if x < -ZERO_TOL || !x.is_finite() {
                return Err(EmpiricalError::NegativeWeight { context: scenario.context_key(c), value: x });
            }
            r.push(if x.abs() <= ZERO_TOL { 0.0 } else { x });
        }
        cleaned.push(r);
    }
    let first: Vec<Vec<Rational>> = cleaned
        .iter()
        .map(|row| row.iter().map(|&x| policy.apply(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    if let Ok(model) = EmpiricalModel::from_rows(scenario.clone(), SemiringTag::Probability, first) {
        if check_compatibility(&model).is_compatible() {
            return Ok(model);
        }
    }
    if policy.strict {
        return Err(EmpiricalError::NotRepresentable("strict policy forbids correction".into()));
    }

    let grid = Rational::from_integer((policy.max_denominator as i128 * policy.max_denominator as i128).into());
    let grid_f = policy.max_denominator as f64 * policy.max_denominator as f64;
    let mut values: Vec<Rational> = Vec::new();
    let mut offsets = Vec::with_capacity(cleaned.len());
    for row in &cleaned {
        offsets.push(values.len());
        for &x in row {
            values.push(Rational::from_integer(((x * grid_f).round() as i128).into()) / &grid);
        }
    }
    let free: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_zero()).collect();
    let column_of = |global: usize| free.iter().position(|&f| f == global);

    // equality constraints over the free entries: normalization, then overlaps
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    let k = scenario.outcome_count();
    let cover = scenario.cover();
    for (ci, row) in cleaned.iter().enumerate() {
        let mut eq = vec![Rational::zero(); free.len()];
        for s in 0..row.len() {
            if let Some(col) = column_of(offsets[ci] + s) {
                eq[col] = Rational::one();
            }
        }
        a.push(eq);
        b.push(Rational::one());
    }
    for i in 0..cover.len() {
        for j in i + 1..cover.len() {
            let overlap = cover[i].intersection(&cover[j]);
            if overlap.is_empty() {
                continue;
            }
            for target in 0..k.pow(overlap.len() as u32) {
                let mut eq = vec![Rational::zero(); free.len()];
                for (ctx, sign) in [(i, Rational::one()), (j, -Rational::one())] {
                    for s in 0..cleaned[ctx].len() {
                        let sec = Section::from_index(&cover[ctx], s, k);
                        if sec.restrict(&overlap)?.index(k) == target {
                            if let Some(col) = column_of(offsets[ctx] + s) {
                                eq[col] += &sign;
                            }
                        }
                    }
                }
                a.push(eq);
                b.push(Rational::zero());
            }
        }
    }
    let current: Vec<Rational> = free.iter().map(|&i| values[i].clone()).collect();
    let residual: Vec<Rational> = exact::mat_vec(&a, &current).iter().zip(&b).map(|(ax, bi)| bi - ax).collect();
    let delta = exact::min_norm_solution(&a, &residual)
        .ok_or_else(|| EmpiricalError::NotRepresentable("support admits no compatible completion".into()))?;
    for (col, &i) in free.iter().enumerate() {
        values[i] += &delta[col];
        if values[i].is_negative() {
            return Err(EmpiricalError::NotRepresentable("correction produced a negative weight".into()));
        }
    }
    let rows: Vec<Vec<Rational>> =
        offsets.iter().enumerate().map(|(ci, &o)| values[o..o + cleaned[ci].len()].to_vec()).collect();
    let model = EmpiricalModel::from_rows(scenario.clone(), SemiringTag::Probability, rows)?;
    match check_compatibility(&model) {
        Compatibility::Compatible => Ok(model),
        Compatibility::Incompatible(_) => {
            Err(EmpiricalError::NotRepresentable("correction left an overlap mismatch".into()))
        }
    }
}

/// Scenario reference inside model files: inline description or builtin name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    Builtin(String),
    Inline(ScenarioDescription),
}

/// On-disk model format; `table` keys are comma-joined context labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub scenario: ScenarioSource,
    pub semiring: SemiringTag,
    pub table: Map<String, Value>,
}

impl ModelFile {
    /// Resolves the scenario (builtin names via `resolve`) and validates the
    /// table. Table keys may list a context's labels in any order. JSON
    /// numbers are rationalized under `policy`; strings are parsed exactly.
    pub fn into_model(
        self,
        policy: RationalizePolicy,
        resolve: impl Fn(&str) -> Option<MeasurementScenario>,
    ) -> Result<EmpiricalModel, EmpiricalError> {
        let scenario = match &self.scenario {
            ScenarioSource::Builtin(name) => {
                resolve(name).ok_or_else(|| EmpiricalError::Malformed(format!("unknown builtin scenario `{name}`")))?
            }
            ScenarioSource::Inline(raw) => crate::scenario::validate_scenario(raw)?,
        };
        let mut rows: Vec<Option<&Value>> = vec![None; scenario.cover().len()];
        for (key, value) in &self.table {
            let labels: Vec<&str> = key.split(',').map(str::trim).collect();
            let context = scenario.context_from_labels(&labels)?;
            let pos = scenario.cover_position(&context).ok_or_else(|| EmpiricalError::UnknownContext(key.clone()))?;
            rows[pos] = Some(value);
        }
        let k = scenario.outcome_count();
        let mut table = Vec::with_capacity(rows.len());
        for (context, value) in scenario.cover().iter().zip(rows) {
            let key = scenario.context_key(context);
            let value = value.ok_or_else(|| EmpiricalError::MissingContext(key.clone()))?;
            let items = value
                .as_array()
                .ok_or_else(|| EmpiricalError::Malformed(format!("table entry {key} is not an array")))?;
            let weights = match self.semiring {
                SemiringTag::Possibilistic => Weights::Boolean(
                    items
                        .iter()
                        .map(|v| {
                            v.as_bool().ok_or_else(|| EmpiricalError::Malformed(format!("{key}: expected booleans")))
                        })
                        .collect::<Result<_, _>>()?,
                ),
                _ => Weights::Rational(items.iter().map(|v| json_rational(v, policy, &key)).collect::<Result<_, _>>()?),
            };
            table.push(Distribution::new(context.clone(), k, self.semiring, weights)?);
        }
        EmpiricalModel::new(scenario, self.semiring, table)
    }
}

fn json_rational(v: &Value, policy: RationalizePolicy, key: &str) -> Result<Rational, EmpiricalError> {
    match v {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                Ok(policy.apply(n.as_f64().unwrap_or(f64::NAN))?)
            }
        }
        _ => Err(EmpiricalError::Malformed(format!("{key}: weights must be strings or numbers"))),
    }
}
