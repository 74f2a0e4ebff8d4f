//! Pure states, projective measurements and the empirical models and
//! orthonormal representations they generate.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::empirical::{rationalize_model, EmpiricalError, EmpiricalModel, ScenarioSource};
use crate::exgraph::ExclusivityGraph;
use crate::rational::{to_f64, Rational, RationalizePolicy};
use crate::scenario::{MeasurementScenario, ScenarioError, Section};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Projector identities: Hermiticity, idempotence, completeness, commutation.
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Unit norm of states and representation vectors.
pub const NORM_TOL: f64 = 1e-12;
/// `|⟨vᵢ|vⱼ⟩|` for pairs required to be orthogonal.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("vector is not unit norm (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("operator is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("projector {outcome} is not idempotent (residual {residual:e})")]
    NotIdempotent { outcome: usize, residual: f64 },
    #[error("projectors {first} and {second} are not orthogonal (residual {residual:e})")]
    NotOrthogonal { first: usize, second: usize, residual: f64 },
    #[error("projectors do not sum to the identity (residual {residual:e})")]
    NotComplete { residual: f64 },
    #[error("operator does not square to the identity (residual {residual:e})")]
    NotInvolution { residual: f64 },
    #[error("measurement {measurement} has {got} projectors, scenario has {expected} outcomes")]
    OutcomeCount { measurement: String, expected: usize, got: usize },
    #[error("realization has {got} observables, scenario has {expected} measurements")]
    MeasurementCount { expected: usize, got: usize },
    #[error("measurements {first} and {second} share context {context} but do not commute (residual {residual:e})")]
    NonCommuting { context: String, first: String, second: String, residual: f64 },
    #[error("{vectors} vectors for a graph on {vertices} vertices")]
    CountMismatch { vertices: usize, vectors: usize },
    #[error("event {event} has probability {probability:e}; no representation vector")]
    ZeroProbability { event: String, probability: f64 },
    #[error("event {event} selects a projector of rank {rank}, not one")]
    NotRankOne { event: String, rank: f64 },
    #[error("orthogonality fails on pair ({0}, {1}) with residual {2:e}")]
    OrthogonalityFailed(usize, usize, f64),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Empirical(#[from] EmpiricalError),
    #[error("malformed quantum input: {0}")]
    Malformed(String),
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `|v⟩⟨v|`
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Largest entry modulus, used for all matrix residuals.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

fn check_square(m: &CMatrix, d: usize) -> Result<(), QuantumError> {
    if m.nrows() != d || m.ncols() != d {
        return Err(QuantumError::Dimension { expected: d, got: m.nrows().max(m.ncols()) });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self, QuantumError> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(QuantumError::NotUnit { norm });
        }
        Ok(StateVector { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self, QuantumError> {
        let norm = amplitudes.norm();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(QuantumError::NotUnit { norm });
        }
        StateVector::new(amplitudes / c(norm, 0.0))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self, QuantumError> {
        StateVector::normalized(CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0))))
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[i] = c(1.0, 0.0);
        StateVector { amplitudes: v }
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus() -> Self {
        StateVector::from_real(&[1.0, 0.0, 0.0, 1.0]).expect("nonzero")
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }
}

/// One projector per outcome label, in outcome order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveObservable {
    projectors: Vec<CMatrix>,
}

impl ProjectiveObservable {
    pub fn new(projectors: Vec<CMatrix>) -> Result<Self, QuantumError> {
        let Some(first) = projectors.first() else {
            return Err(QuantumError::Malformed("observable without projectors".into()));
        };
        let d = first.nrows();
        let mut total = CMatrix::zeros(d, d);
        for (i, p) in projectors.iter().enumerate() {
            check_square(p, d)?;
            let residual = hermitian_residual(p);
            if residual > STRUCTURAL_TOL {
                return Err(QuantumError::NotHermitian { residual });
            }
            let residual = max_abs(&(p * p - p));
            if residual > STRUCTURAL_TOL {
                return Err(QuantumError::NotIdempotent { outcome: i, residual });
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                check_square(q, d)?;
                let residual = max_abs(&(p * q));
                if residual > STRUCTURAL_TOL {
                    return Err(QuantumError::NotOrthogonal { first: i, second: j, residual });
                }
            }
            total += p;
        }
        let residual = max_abs(&(total - identity(d)));
        if residual > STRUCTURAL_TOL {
            return Err(QuantumError::NotComplete { residual });
        }
        Ok(ProjectiveObservable { projectors })
    }

    /// Spectral projectors `(I + A)/2`, `(I − A)/2` of a ±1-valued observable:
    /// outcome 0 is eigenvalue +1, outcome 1 is eigenvalue −1.
    pub fn from_pm_one(a: &CMatrix) -> Result<Self, QuantumError> {
        let d = a.nrows();
        check_square(a, d)?;
        let residual = hermitian_residual(a);
        if residual > STRUCTURAL_TOL {
            return Err(QuantumError::NotHermitian { residual });
        }
        let residual = max_abs(&(a * a - identity(d)));
        if residual > STRUCTURAL_TOL {
            return Err(QuantumError::NotInvolution { residual });
        }
        let half = c(0.5, 0.0);
        ProjectiveObservable::new(vec![(identity(d) + a) * half, (identity(d) - a) * half])
    }

    /// Two-outcome test of the ray through `v`: outcome 0 is the orthogonal
    /// complement, outcome 1 the ray itself.
    pub fn ray_test(v: &CVector) -> Result<Self, QuantumError> {
        let norm = v.norm();
        if norm <= 0.0 || norm.is_nan() {
            return Err(QuantumError::NotUnit { norm });
        }
        let p = outer(&(v / c(norm, 0.0)));
        ProjectiveObservable::new(vec![identity(v.len()) - &p, p])
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn dimension(&self) -> usize {
        self.projectors[0].nrows()
    }

    pub fn outcome_count(&self) -> usize {
        self.projectors.len()
    }
}

/// Observables assigned to every measurement of a scenario, commuting
/// within each context.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumRealization {
    scenario: MeasurementScenario,
    observables: Vec<ProjectiveObservable>,
    dimension: usize,
}

impl QuantumRealization {
    pub fn new(scenario: MeasurementScenario, observables: Vec<ProjectiveObservable>) -> Result<Self, QuantumError> {
        if observables.len() != scenario.measurement_count() {
            return Err(QuantumError::MeasurementCount {
                expected: scenario.measurement_count(),
                got: observables.len(),
            });
        }
        let dimension = observables[0].dimension();
        for (label, obs) in scenario.measurements().iter().zip(&observables) {
            if obs.dimension() != dimension {
                return Err(QuantumError::Dimension { expected: dimension, got: obs.dimension() });
            }
            if obs.outcome_count() != scenario.outcome_count() {
                return Err(QuantumError::OutcomeCount {
                    measurement: label.clone(),
                    expected: scenario.outcome_count(),
                    got: obs.outcome_count(),
                });
            }
        }
        for context in scenario.cover() {
            let members = context.members();
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    let residual = observables[a]
                        .projectors
                        .iter()
                        .flat_map(|p| observables[b].projectors.iter().map(move |q| commutator_residual(p, q)))
                        .fold(0.0, f64::max);
                    if residual > STRUCTURAL_TOL {
                        return Err(QuantumError::NonCommuting {
                            context: scenario.context_key(context),
                            first: scenario.measurements()[a].clone(),
                            second: scenario.measurements()[b].clone(),
                            residual,
                        });
                    }
                }
            }
        }
        Ok(QuantumRealization { scenario, observables, dimension })
    }

    /// Realization from ±1-valued observables on a two-outcome scenario.
    pub fn from_pm_one(scenario: MeasurementScenario, operators: &[CMatrix]) -> Result<Self, QuantumError> {
        let observables = operators.iter().map(ProjectiveObservable::from_pm_one).collect::<Result<Vec<_>, _>>()?;
        QuantumRealization::new(scenario, observables)
    }

    pub fn scenario(&self) -> &MeasurementScenario {
        &self.scenario
    }

    pub fn observables(&self) -> &[ProjectiveObservable] {
        &self.observables
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `Π_C(s)`, the product of the projectors a section selects.
    pub fn event_projector(&self, section: &Section) -> Result<CMatrix, QuantumError> {
        self.scenario.check_section(section)?;
        let mut p = identity(self.dimension);
        for (m, o) in section.pairs() {
            p *= &self.observables[m].projectors[o];
        }
        Ok(p)
    }

    fn apply_event(&self, section: &Section, psi: &CVector) -> CVector {
        let mut phi = psi.clone();
        for (m, o) in section.pairs() {
            phi = &self.observables[m].projectors[o] * phi;
        }
        phi
    }

    fn check_state(&self, state: &StateVector) -> Result<(), QuantumError> {
        if state.dimension() != self.dimension {
            return Err(QuantumError::Dimension { expected: self.dimension, got: state.dimension() });
        }
        Ok(())
    }
}

/// Floating-point Born probabilities `‖Π_C(s)ψ‖²`, one row per cover context.
pub fn born_probabilities(
    state: &StateVector,
    realization: &QuantumRealization,
) -> Result<Vec<Vec<f64>>, QuantumError> {
    realization.check_state(state)?;
    let scenario = &realization.scenario;
    scenario
        .cover()
        .iter()
        .map(|context| {
            Ok(scenario
                .enumerate_sections(context)?
                .iter()
                .map(|s| realization.apply_event(s, state.amplitudes()).norm_squared())
                .collect())
        })
        .collect()
}

pub fn quantum_model(state: &StateVector, realization: &QuantumRealization) -> Result<EmpiricalModel, QuantumError> {
    quantum_model_with_policy(state, realization, RationalizePolicy::default())
}

pub fn quantum_model_with_policy(
    state: &StateVector,
    realization: &QuantumRealization,
    policy: RationalizePolicy,
) -> Result<EmpiricalModel, QuantumError> {
    let rows = born_probabilities(state, realization)?;
    Ok(rationalize_model(&realization.scenario, &rows, policy)?)
}

/// Real part of `⟨ψ|H|ψ⟩` together with the discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectation {
    pub value: f64,
    pub imaginary_residual: f64,
}

pub fn expectation(state: &StateVector, operator: &CMatrix) -> Result<Expectation, QuantumError> {
    check_square(operator, state.dimension())?;
    let residual = hermitian_residual(operator);
    if residual > STRUCTURAL_TOL {
        return Err(QuantumError::NotHermitian { residual });
    }
    let psi = state.amplitudes();
    let z = psi.dotc(&(operator * psi));
    Ok(Expectation { value: z.re, imaginary_residual: z.im.abs() })
}

/// Unit vectors, one per graph vertex, with a handle state.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSystem {
    vectors: Vec<CVector>,
    handle: StateVector,
}

impl VectorSystem {
    pub fn new(vectors: Vec<CVector>, handle: StateVector) -> Result<Self, QuantumError> {
        for v in &vectors {
            if v.len() != handle.dimension() {
                return Err(QuantumError::Dimension { expected: handle.dimension(), got: v.len() });
            }
            let norm = v.norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(QuantumError::NotUnit { norm });
            }
        }
        Ok(VectorSystem { vectors, handle })
    }

    /// Normalizes each nonzero vector first.
    pub fn normalized(vectors: Vec<CVector>, handle: StateVector) -> Result<Self, QuantumError> {
        let vectors = vectors
            .into_iter()
            .map(|v| StateVector::normalized(v).map(|s| s.amplitudes))
            .collect::<Result<Vec<_>, _>>()?;
        VectorSystem::new(vectors, handle)
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn handle(&self) -> &StateVector {
        &self.handle
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// `|vᵢ⟩ = Π(eᵢ)|ψ⟩ / ‖Π(eᵢ)|ψ⟩‖` for rank-one events, with `ψ` as handle.
pub fn vector_system_from_events(
    state: &StateVector,
    realization: &QuantumRealization,
    events: &[Section],
) -> Result<VectorSystem, QuantumError> {
    realization.check_state(state)?;
    let scenario = &realization.scenario;
    let mut vectors = Vec::with_capacity(events.len());
    for e in events {
        let p = realization.event_projector(e)?;
        let rank = p.trace().re;
        if (rank - 1.0).abs() > 1e-8 {
            return Err(QuantumError::NotRankOne { event: scenario.section_label(e), rank });
        }
        let phi = &p * state.amplitudes();
        let prob = phi.norm_squared();
        if prob < 1e-14 {
            return Err(QuantumError::ZeroProbability { event: scenario.section_label(e), probability: prob });
        }
        vectors.push(phi / c(prob.sqrt(), 0.0));
    }
    VectorSystem::normalized(vectors, state.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrMode {
    /// Nonadjacent pairs must be orthogonal.
    Graph,
    /// Adjacent pairs must be orthogonal (exclusive events).
    Complement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrVerdict {
    pub passed: bool,
    /// Pair with the largest `|⟨vᵢ|vⱼ⟩|` among those checked.
    pub worst_pair: Option<(usize, usize)>,
    pub residual: f64,
}

pub fn check_or(graph: &ExclusivityGraph, system: &VectorSystem, mode: OrMode) -> Result<OrVerdict, QuantumError> {
    let n = graph.n();
    if system.len() != n {
        return Err(QuantumError::CountMismatch { vertices: n, vectors: system.len() });
    }
    let mut worst: Option<(usize, usize)> = None;
    let mut residual = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let required = match mode {
                OrMode::Graph => !graph.adjacent(i, j),
                OrMode::Complement => graph.adjacent(i, j),
            };
            if !required {
                continue;
            }
            let overlap = system.vectors[i].dotc(&system.vectors[j]).norm();
            if worst.is_none() || overlap > residual {
                worst = Some((i, j));
                residual = overlap;
            }
        }
    }
    Ok(OrVerdict { passed: residual <= ORTHOGONALITY_TOL, worst_pair: worst, residual })
}

/// `Σ wᵢ |⟨ψ|vᵢ⟩|²` for a system whose exclusive pairs are orthogonal.
pub fn lovasz_value_from_or(
    graph: &ExclusivityGraph,
    system: &VectorSystem,
    weights: &[Rational],
) -> Result<f64, QuantumError> {
    if weights.len() != graph.n() {
        return Err(QuantumError::CountMismatch { vertices: graph.n(), vectors: weights.len() });
    }
    let verdict = check_or(graph, system, OrMode::Complement)?;
    if !verdict.passed {
        let (i, j) = verdict.worst_pair.unwrap_or((0, 0));
        return Err(QuantumError::OrthogonalityFailed(i, j, verdict.residual));
    }
    let psi = system.handle.amplitudes();
    Ok(system.vectors.iter().zip(weights).map(|(v, w)| to_f64(w) * psi.dotc(v).norm_sqr()).sum())
}

/// On-disk state: `[re, im]` amplitude pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dimension: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(state: &StateVector) -> Self {
        StateFile {
            dimension: state.dimension(),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Amplitudes are renormalized when they are within rounding of unit norm.
    pub fn into_state(self) -> Result<StateVector, QuantumError> {
        if self.amplitudes.len() != self.dimension {
            return Err(QuantumError::Dimension { expected: self.dimension, got: self.amplitudes.len() });
        }
        let v = CVector::from_iterator(self.dimension, self.amplitudes.iter().map(|&[re, im]| c(re, im)));
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QuantumError::NotUnit { norm });
        }
        StateVector::normalized(v)
    }
}

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableEntry {
    pub measurement: String,
    /// In outcome order.
    pub projectors: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFile {
    pub scenario: ScenarioSource,
    pub dimension: usize,
    pub observables: Vec<ObservableEntry>,
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    m.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson, d: usize) -> Result<CMatrix, QuantumError> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(QuantumError::Dimension { expected: d, got: rows.len() });
    }
    Ok(CMatrix::from_fn(d, d, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

impl RealizationFile {
    pub fn from_realization(r: &QuantumRealization) -> Self {
        RealizationFile {
            scenario: ScenarioSource::Inline(r.scenario.description()),
            dimension: r.dimension,
            observables: r
                .scenario
                .measurements()
                .iter()
                .zip(&r.observables)
                .map(|(label, obs)| ObservableEntry {
                    measurement: label.clone(),
                    projectors: obs.projectors.iter().map(matrix_to_json).collect(),
                })
                .collect(),
        }
    }

    /// Observables may be listed in any order; each measurement exactly once.
    pub fn into_realization(
        self,
        resolve: impl Fn(&str) -> Option<MeasurementScenario>,
    ) -> Result<QuantumRealization, QuantumError> {
        let scenario = match &self.scenario {
            ScenarioSource::Builtin(name) => {
                resolve(name).ok_or_else(|| QuantumError::Malformed(format!("unknown builtin scenario `{name}`")))?
            }
            ScenarioSource::Inline(raw) => crate::scenario::validate_scenario(raw)?,
        };
        let mut slots: Vec<Option<ProjectiveObservable>> = vec![None; scenario.measurement_count()];
        for entry in &self.observables {
            let m = scenario.measurement_index(&entry.measurement)?;
            if slots[m].is_some() {
                return Err(QuantumError::Malformed(format!("measurement {} listed twice", entry.measurement)));
            }
            let projectors =
                entry.projectors.iter().map(|p| matrix_from_json(p, self.dimension)).collect::<Result<Vec<_>, _>>()?;
            slots[m] = Some(ProjectiveObservable::new(projectors)?);
        }
        let observables = slots
            .into_iter()
            .zip(scenario.measurements())
            .map(|(o, label)| {
                o.ok_or_else(|| QuantumError::Malformed(format!("no observable for measurement {label}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        QuantumRealization::new(scenario, observables)
    }
}
