//! Built-in catalog: CHSH, its exclusivity graphs, KCBS, Peres–Mermin, the
//! PR box and the Yu–Oh rays, each with expected values that
//! [`run_fixture_checks`] recomputes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::empirical::{evaluate_expression, EmpiricalModel, SemiringTag};
use crate::exgraph::{fractional_packing, graph_from_events, independence_number, lovasz_theta, ExclusivityGraph};
use crate::hidden_variable::{build_incidence, classify, solve_possibilistic, stack_support, ContextualityClass};
use crate::quantum::{
    c, check_or, expectation, identity, kron, lovasz_value_from_or, max_abs, pauli_x, pauli_y, pauli_z, quantum_model,
    vector_system_from_events, CMatrix, CVector, OrMode, ProjectiveObservable, QuantumRealization, RealizationFile,
    StateFile, StateVector, VectorSystem, C64,
};
use crate::rational::{format_rational, int, ratio, to_f64, Rational};
use crate::scenario::{MeasurementScenario, Section};

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// A literature value for this fixture.
    Published,
    /// Obtained by running this toolkit's algorithms and cross-checked by
    /// independent tests.
    Computed,
    /// True by construction.
    Definitional,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Published => "published",
            Source::Computed => "computed",
            Source::Definitional => "definitional",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedValue {
    Rational(Rational),
    Real(f64),
    Class(ContextualityClass),
    Flag(bool),
}

impl fmt::Display for ExpectedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpectedValue::Rational(r) => f.write_str(&format_rational(r)),
            ExpectedValue::Real(x) => write!(f, "{x:.9}"),
            ExpectedValue::Class(cl) => write!(f, "{cl}"),
            ExpectedValue::Flag(b) => write!(f, "{b}"),
        }
    }
}

/// Named quantity a fixture promises. `tolerance` is zero for exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedQuantity {
    pub key: &'static str,
    pub value: ExpectedValue,
    pub tolerance: f64,
    pub source: Source,
}

fn exact(key: &'static str, value: Rational, source: Source) -> ExpectedQuantity {
    ExpectedQuantity { key, value: ExpectedValue::Rational(value), tolerance: 0.0, source }
}

fn real(key: &'static str, value: f64, tolerance: f64, source: Source) -> ExpectedQuantity {
    ExpectedQuantity { key, value: ExpectedValue::Real(value), tolerance, source }
}

fn class(value: ContextualityClass, source: Source) -> ExpectedQuantity {
    ExpectedQuantity { key: "class", value: ExpectedValue::Class(value), tolerance: 0.0, source }
}

fn flag(key: &'static str, source: Source) -> ExpectedQuantity {
    ExpectedQuantity { key, value: ExpectedValue::Flag(true), tolerance: 0.0, source }
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub scenario: Option<MeasurementScenario>,
    pub model: Option<EmpiricalModel>,
    /// Correlation expression `Σ wᵢ P(eᵢ)` over events of `scenario`.
    pub expression: Option<Vec<(Section, Rational)>>,
    pub graph: Option<ExclusivityGraph>,
    /// Second weighting of `graph` with its own expected invariants.
    pub alternate_weights: Option<Vec<Rational>>,
    pub state: Option<StateVector>,
    pub realization: Option<QuantumRealization>,
    pub vectors: Option<VectorSystem>,
    /// Named operators, e.g. the Peres–Mermin `χ`.
    pub operators: Vec<(&'static str, CMatrix)>,
    pub expected: Vec<ExpectedQuantity>,
}

impl Fixture {
    fn new(name: &'static str, description: &'static str) -> Self {
        Fixture {
            name,
            description,
            scenario: None,
            model: None,
            expression: None,
            graph: None,
            alternate_weights: None,
            state: None,
            realization: None,
            vectors: None,
            operators: Vec::new(),
            expected: Vec::new(),
        }
    }

    pub fn expected(&self, key: &str) -> Option<&ExpectedQuantity> {
        self.expected.iter().find(|e| e.key == key)
    }

    pub fn operator(&self, name: &str) -> Option<&CMatrix> {
        self.operators.iter().find(|(n, _)| *n == name).map(|(_, m)| m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{name}`; available: {}", available.join(", "))]
    Unknown { name: String, available: Vec<String> },
}

pub const FIXTURE_NAMES: [&str; 7] =
    ["chsh", "chsh-graph-8", "chsh-graph-16", "kcbs", "peres-mermin", "pr-box", "yu-oh"];

pub fn catalog() -> &'static [Fixture] {
    static CATALOG: OnceLock<Vec<Fixture>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        vec![chsh_fixture(), chsh_graph_8(), chsh_graph_16(), kcbs_fixture(), peres_mermin(), pr_box(), yu_oh()]
    })
}

pub fn get_fixture(name: &str) -> Result<&'static Fixture, FixtureError> {
    catalog().iter().find(|f| f.name == name).ok_or_else(|| FixtureError::Unknown {
        name: name.to_string(),
        available: FIXTURE_NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

/// Scenario of a fixture, used to resolve `"scenario": "<name>"` in files.
pub fn builtin_scenario(name: &str) -> Option<MeasurementScenario> {
    get_fixture(name).ok().and_then(|f| f.scenario.clone())
}

// ---------------------------------------------------------------- builders

pub fn chsh_scenario() -> MeasurementScenario {
    MeasurementScenario::new(
        vec!["A1", "A2", "B1", "B2"],
        vec!["0", "1"],
        vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
    )
    .expect("valid CHSH scenario")
}

fn eighths(rows: [[i64; 4]; 4]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| ratio(x, 8)).collect()).collect()
}

/// Bell-state statistics with entries in eighths.
pub fn table1_model() -> EmpiricalModel {
    let rows = eighths([[4, 0, 0, 4], [3, 1, 1, 3], [3, 1, 1, 3], [1, 3, 3, 1]]);
    EmpiricalModel::from_rows(chsh_scenario(), SemiringTag::Probability, rows).expect("valid table")
}

pub fn pr_box_model() -> EmpiricalModel {
    let rows = eighths([[4, 0, 0, 4], [4, 0, 0, 4], [4, 0, 0, 4], [0, 4, 4, 0]]);
    EmpiricalModel::from_rows(chsh_scenario(), SemiringTag::Probability, rows).expect("valid table")
}

/// The eight CHSH events: `a = b` on the first three contexts, `a ≠ b` on
/// `{A2, B2}`, in cover order.
pub fn chsh_events() -> Vec<Section> {
    let s = chsh_scenario();
    s.cover()
        .iter()
        .enumerate()
        .flat_map(|(ci, ctx)| {
            let pairs: [(usize, usize); 2] = if ci == 3 { [(0, 1), (1, 0)] } else { [(0, 0), (1, 1)] };
            pairs.map(|(a, b)| Section::new(ctx.clone(), vec![a, b]).expect("binary section"))
        })
        .collect()
}

pub fn chsh_expression() -> Vec<(Section, Rational)> {
    chsh_events().into_iter().map(|e| (e, int(1))).collect()
}

/// All sixteen local sections of the CHSH cover, in cover order.
pub fn all_chsh_events() -> Vec<Section> {
    let s = chsh_scenario();
    s.cover().iter().flat_map(|c| s.enumerate_sections(c).expect("cover context")).collect()
}

/// `[[0, e^{−iπ/3}], [e^{iπ/3}, 0]]`
pub fn tilted_observable() -> CMatrix {
    CMatrix::from_row_slice(
        2,
        2,
        &[c(0.0, 0.0), C64::from_polar(1.0, -PI / 3.0), C64::from_polar(1.0, PI / 3.0), c(0.0, 0.0)],
    )
}

fn two_party(a: [CMatrix; 2], b: [CMatrix; 2]) -> QuantumRealization {
    let id = identity(2);
    let ops = [kron(&a[0], &id), kron(&a[1], &id), kron(&id, &b[0]), kron(&id, &b[1])];
    QuantumRealization::from_pm_one(chsh_scenario(), &ops).expect("commuting local observables")
}

/// `A₁ = B₁ = σₓ`, `A₂ = B₂ =` [`tilted_observable`], outcome 0 ↔ eigenvalue +1.
pub fn chsh_realization() -> QuantumRealization {
    two_party([pauli_x(), tilted_observable()], [pauli_x(), tilted_observable()])
}

/// `A₁ = Z`, `A₂ = X`, `B₁,₂ = (Z ± X)/√2`, reaching `2 + √2` on `|φ⁺⟩`.
pub fn chsh_optimal_realization() -> QuantumRealization {
    let r = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    two_party([pauli_z(), pauli_x()], [(pauli_z() + pauli_x()) * r, (pauli_z() - pauli_x()) * r])
}

pub fn kcbs_scenario() -> MeasurementScenario {
    MeasurementScenario::new(
        (0..5).map(|i| format!("M{i}")).collect(),
        vec!["0", "1"],
        (0..5).map(|i| vec![i, (i + 1) % 5]).collect(),
    )
    .expect("valid pentagon scenario")
}

/// Event `j`: `Mⱼ = 1, Mⱼ₊₁ = 0`.
pub fn kcbs_events() -> Vec<Section> {
    (0..5).map(|j| Section::from_pairs(&[(j, 1), ((j + 1) % 5, 0)]).expect("distinct measurements")).collect()
}

/// Pentagram rays around the handle `(0,0,1)`; consecutive rays are orthogonal.
pub fn kcbs_vectors() -> Vec<[f64; 3]> {
    let cos_pi_5 = (PI / 5.0).cos();
    let cos_theta = (cos_pi_5 / (1.0 + cos_pi_5)).sqrt();
    let sin_theta = (1.0 - cos_theta * cos_theta).sqrt();
    (0..5)
        .map(|j| {
            let phi = 4.0 * PI * j as f64 / 5.0;
            [sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta]
        })
        .collect()
}

fn real_vector(v: &[f64]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0)))
}

pub fn kcbs_handle() -> StateVector {
    StateVector::basis(3, 2)
}

pub fn kcbs_realization() -> QuantumRealization {
    let obs = kcbs_vectors()
        .iter()
        .map(|v| ProjectiveObservable::ray_test(&real_vector(v)))
        .collect::<Result<Vec<_>, _>>()
        .expect("unit rays");
    QuantumRealization::new(kcbs_scenario(), obs).expect("orthogonal neighbours commute")
}

pub const PERES_MERMIN_LABELS: [&str; 9] = ["XI", "IX", "XX", "IZ", "ZI", "ZZ", "XZ", "ZX", "YY"];

pub fn peres_mermin_scenario() -> MeasurementScenario {
    MeasurementScenario::new(
        PERES_MERMIN_LABELS.to_vec(),
        vec!["0", "1"],
        vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8], vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]],
    )
    .expect("valid square")
}

/// The nine two-qubit Pauli products, row-major.
pub fn peres_mermin_operators() -> Vec<CMatrix> {
    let pauli = |ch: char| match ch {
        'I' => identity(2),
        'X' => pauli_x(),
        'Y' => pauli_y(),
        'Z' => pauli_z(),
        _ => unreachable!(),
    };
    PERES_MERMIN_LABELS
        .iter()
        .map(|l| {
            let mut it = l.chars();
            kron(&pauli(it.next().unwrap()), &pauli(it.next().unwrap()))
        })
        .collect()
}

/// Row and column products of the square, rows first.
pub fn peres_mermin_products() -> Vec<CMatrix> {
    let ops = peres_mermin_operators();
    let prod = |idx: [usize; 3]| &ops[idx[0]] * &ops[idx[1]] * &ops[idx[2]];
    vec![prod([0, 1, 2]), prod([3, 4, 5]), prod([6, 7, 8]), prod([0, 3, 6]), prod([1, 4, 7]), prod([2, 5, 8])]
}

/// Signs making every context term of `χ` equal `+I`.
pub const PERES_MERMIN_SIGNS: [i8; 6] = [1, 1, 1, 1, 1, -1];

/// `χ = R₁ + R₂ + R₃ + C₁ + C₂ − C₃`.
pub fn peres_mermin_chi() -> CMatrix {
    peres_mermin_products()
        .iter()
        .zip(PERES_MERMIN_SIGNS)
        .fold(CMatrix::zeros(4, 4), |acc, (p, s)| acc + p * c(s as f64, 0.0))
}

/// Largest value of `χ` under ±1 value assignments to the nine observables.
pub fn peres_mermin_noncontextual_bound() -> i64 {
    let s = peres_mermin_scenario();
    (0..512u32)
        .map(|bits| {
            let value = |m: usize| if bits >> m & 1 == 0 { 1i64 } else { -1 };
            s.cover()
                .iter()
                .zip(PERES_MERMIN_SIGNS)
                .map(|(ctx, sign)| sign as i64 * ctx.members().iter().map(|&m| value(m)).product::<i64>())
                .sum::<i64>()
        })
        .max()
        .unwrap()
}

/// Thirteen integer rays: three axes, six face diagonals, four body diagonals.
pub const YU_OH_RAYS: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 0, 1],
    [1, 0, -1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 1, 1],
    [-1, 1, 1],
    [1, -1, 1],
    [1, 1, -1],
];

/// Orthogonality graph of the rays from exact integer inner products.
pub fn yu_oh_graph() -> ExclusivityGraph {
    let mut edges = Vec::new();
    for (i, a) in YU_OH_RAYS.iter().enumerate() {
        for (j, b) in YU_OH_RAYS.iter().enumerate().skip(i + 1) {
            let dot: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            if dot == 0 {
                edges.push((i, j));
            }
        }
    }
    let labels = YU_OH_RAYS.iter().map(|r| format!("({},{},{})", r[0], r[1], r[2])).collect();
    ExclusivityGraph::unit(13, &edges).and_then(|g| g.with_labels(labels)).expect("13 vertices")
}

// ---------------------------------------------------------------- catalog

fn chsh_fixture() -> Fixture {
    let mut f =
        Fixture::new("chsh", "Bell scenario with the Bell-state table in eighths and its two-qubit realization");
    f.scenario = Some(chsh_scenario());
    f.model = Some(table1_model());
    f.expression = Some(chsh_expression());
    f.state = Some(StateVector::phi_plus());
    f.realization = Some(chsh_realization());
    f.expected = vec![
        flag("quantum-reproduces-model", Source::Published),
        class(ContextualityClass::ProbabilisticallyContextual, Source::Computed),
        exact("expression", ratio(13, 4), Source::Computed),
        exact("classical-bound", int(3), Source::Published),
    ];
    f
}

fn chsh_graph(events: Vec<Section>) -> ExclusivityGraph {
    let n = events.len();
    graph_from_events(&chsh_scenario(), &events, vec![int(1); n]).expect("valid CHSH events")
}

fn chsh_graph_8() -> Fixture {
    let mut f = Fixture::new("chsh-graph-8", "exclusivity graph of the eight CHSH events, a copy of Ci8(1,4)");
    let s = chsh_scenario();
    let realization = chsh_optimal_realization();
    let state = StateVector::phi_plus();
    f.vectors = Some(vector_system_from_events(&state, &realization, &chsh_events()).expect("rank-one events"));
    f.scenario = Some(s);
    f.graph = Some(chsh_graph(chsh_events()));
    f.expression = Some(chsh_expression());
    f.state = Some(state);
    f.realization = Some(realization);
    let tsirelson = 2.0 + 2f64.sqrt();
    f.expected = vec![
        exact("alpha", int(3), Source::Published),
        real("theta", tsirelson, 1e-4, Source::Published),
        exact("alpha-star", int(4), Source::Published),
        flag("or-check", Source::Computed),
        real("or-value", tsirelson, 1e-6, Source::Computed),
    ];
    f
}

fn chsh_graph_16() -> Fixture {
    let mut f =
        Fixture::new("chsh-graph-16", "exclusivity graph of all sixteen CHSH events; each context is a 4-clique");
    let events = all_chsh_events();
    let chsh = chsh_events();
    f.alternate_weights = Some(events.iter().map(|e| if chsh.contains(e) { int(1) } else { int(0) }).collect());
    f.scenario = Some(chsh_scenario());
    f.graph = Some(chsh_graph(events));
    f.expected = vec![
        exact("alpha", int(4), Source::Computed),
        real("theta", 4.0, 1e-4, Source::Computed),
        exact("alpha-star", int(4), Source::Computed),
        exact("alpha-alternate", int(3), Source::Published),
        real("theta-alternate", 2.0 + 2f64.sqrt(), 1e-4, Source::Published),
        exact("alpha-star-alternate", int(4), Source::Published),
    ];
    f
}

fn kcbs_fixture() -> Fixture {
    let mut f =
        Fixture::new("kcbs", "five-cycle scenario with the pentagram state-and-ray construction in dimension 3");
    let handle = kcbs_handle();
    let realization = kcbs_realization();
    let vectors: Vec<CVector> = kcbs_vectors().iter().map(|v| real_vector(v)).collect();
    f.vectors = Some(VectorSystem::normalized(vectors, handle.clone()).expect("unit rays"));
    f.model = Some(quantum_model(&handle, &realization).expect("compatible quantum model"));
    f.scenario = Some(kcbs_scenario());
    f.graph = Some(graph_from_events(&kcbs_scenario(), &kcbs_events(), vec![int(1); 5]).expect("valid events"));
    f.expression = Some(kcbs_events().into_iter().map(|e| (e, int(1))).collect());
    f.state = Some(handle);
    f.realization = Some(realization);
    let sqrt5 = 5f64.sqrt();
    f.expected = vec![
        exact("alpha", int(2), Source::Published),
        real("theta", sqrt5, 1e-4, Source::Published),
        exact("alpha-star", ratio(5, 2), Source::Published),
        flag("or-check", Source::Computed),
        real("or-value", sqrt5, 1e-6, Source::Published),
        exact("classical-bound", int(2), Source::Computed),
        real("expression", sqrt5, 1e-6, Source::Computed),
    ];
    f
}

fn peres_mermin() -> Fixture {
    let mut f =
        Fixture::new("peres-mermin", "3x3 square of two-qubit Pauli products with rows and columns as contexts");
    let realization =
        QuantumRealization::from_pm_one(peres_mermin_scenario(), &peres_mermin_operators()).expect("commuting rows");
    let state = StateVector::phi_plus();
    f.model = Some(quantum_model(&state, &realization).expect("compatible quantum model"));
    f.scenario = Some(peres_mermin_scenario());
    f.state = Some(state);
    f.realization = Some(realization);
    f.operators = vec![("chi", peres_mermin_chi())];
    f.expected = vec![
        flag("context-products", Source::Computed),
        real("chi", 6.0, 1e-8, Source::Computed),
        exact("chi-noncontextual-bound", int(4), Source::Published),
        class(ContextualityClass::StronglyContextual, Source::Computed),
    ];
    f
}

fn pr_box() -> Fixture {
    let mut f = Fixture::new(
        "pr-box",
        "Popescu-Rohrlich box: perfect correlations on three contexts, anticorrelation on the fourth",
    );
    f.scenario = Some(chsh_scenario());
    f.model = Some(pr_box_model());
    f.expression = Some(chsh_expression());
    f.graph = Some(chsh_graph(chsh_events()));
    f.expected = vec![
        class(ContextualityClass::StronglyContextual, Source::Computed),
        exact("candidates", int(0), Source::Computed),
        exact("expression", int(4), Source::Published),
        exact("alpha-star", int(4), Source::Published),
    ];
    f
}

fn yu_oh() -> Fixture {
    let mut f = Fixture::new("yu-oh", "thirteen integer rays in dimension 3 and their orthogonality graph");
    let graph = yu_oh_graph();
    let vectors: Vec<CVector> = YU_OH_RAYS.iter().map(|r| real_vector(&r.map(|x| x as f64))).collect();
    let handle = StateVector::basis(3, 0);
    f.vectors = Some(VectorSystem::normalized(vectors, handle.clone()).expect("nonzero rays"));
    f.state = Some(handle);
    f.graph = Some(graph);
    f.expected = vec![
        exact("vertex-count", int(13), Source::Published),
        flag("or-check", Source::Computed),
        exact("alpha", int(YU_OH_ALPHA), Source::Computed),
        real("theta", YU_OH_THETA, 1e-4, Source::Computed),
        exact("alpha-star", ratio(YU_OH_ALPHA_STAR.0, YU_OH_ALPHA_STAR.1), Source::Computed),
    ];
    f
}

/// Recorded from this toolkit's own solvers.
pub const YU_OH_ALPHA: i64 = 5;
pub const YU_OH_THETA: f64 = 5.0;
pub const YU_OH_ALPHA_STAR: (i64, i64) = (17, 3);

// ---------------------------------------------------------------- checks

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub key: String,
    pub expected: String,
    pub measured: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub source: Source,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub checks: Vec<CheckResult>,
}

impl FixtureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn measure(f: &Fixture, key: &str) -> Result<ExpectedValue, String> {
    let need = |what: &str| format!("fixture has no {what}");
    let graph = || f.graph.as_ref().ok_or_else(|| need("graph"));
    let model = || f.model.as_ref().ok_or_else(|| need("model"));
    let alternate = || -> Result<ExclusivityGraph, String> {
        let w = f.alternate_weights.clone().ok_or_else(|| need("alternate weights"))?;
        graph()?.clone().with_weights(w).map_err(|e| e.to_string())
    };
    let err = |e: &dyn fmt::Display| e.to_string();
    Ok(match key {
        "alpha" => ExpectedValue::Rational(independence_number(graph()?).0),
        "theta" => ExpectedValue::Real(lovasz_theta(graph()?).map_err(|e| err(&e))?.value),
        "alpha-star" => ExpectedValue::Rational(fractional_packing(graph()?).0),
        "alpha-alternate" => ExpectedValue::Rational(independence_number(&alternate()?).0),
        "theta-alternate" => ExpectedValue::Real(lovasz_theta(&alternate()?).map_err(|e| err(&e))?.value),
        "alpha-star-alternate" => ExpectedValue::Rational(fractional_packing(&alternate()?).0),
        "vertex-count" => ExpectedValue::Rational(int(graph()?.n() as i64)),
        "class" => ExpectedValue::Class(classify(model()?).map_err(|e| err(&e))?),
        "candidates" => {
            let m = model()?;
            let sys = build_incidence(m.scenario()).map_err(|e| err(&e))?;
            let v = solve_possibilistic(&sys, &stack_support(m)).map_err(|e| err(&e))?;
            ExpectedValue::Rational(int(v.candidate_count.unwrap_or(0) as i64))
        }
        "expression" => {
            let terms = f.expression.as_ref().ok_or_else(|| need("expression"))?;
            let value = evaluate_expression(model()?, terms).map_err(|e| err(&e))?;
            match f.expected(key).map(|e| &e.value) {
                Some(ExpectedValue::Real(_)) => ExpectedValue::Real(to_f64(&value)),
                _ => ExpectedValue::Rational(value),
            }
        }
        "classical-bound" => {
            let s = f.scenario.as_ref().ok_or_else(|| need("scenario"))?;
            let terms = f.expression.as_ref().ok_or_else(|| need("expression"))?;
            let globals = s.enumerate_global_sections().map_err(|e| err(&e))?;
            let best = globals
                .iter()
                .map(|t| {
                    terms.iter().fold(Rational::zero(), |acc, (e, w)| {
                        if e.pairs().all(|(m, o)| t.outcome_of(m) == Some(o)) {
                            acc + w
                        } else {
                            acc
                        }
                    })
                })
                .max()
                .unwrap_or_else(Rational::zero);
            ExpectedValue::Rational(best)
        }
        "quantum-reproduces-model" => {
            let state = f.state.as_ref().ok_or_else(|| need("state"))?;
            let r = f.realization.as_ref().ok_or_else(|| need("realization"))?;
            ExpectedValue::Flag(&quantum_model(state, r).map_err(|e| err(&e))? == model()?)
        }
        "or-check" => {
            let sys = f.vectors.as_ref().ok_or_else(|| need("vector system"))?;
            ExpectedValue::Flag(check_or(graph()?, sys, OrMode::Complement).map_err(|e| err(&e))?.passed)
        }
        "or-value" => {
            let sys = f.vectors.as_ref().ok_or_else(|| need("vector system"))?;
            let g = graph()?;
            ExpectedValue::Real(lovasz_value_from_or(g, sys, g.weights()).map_err(|e| err(&e))?)
        }
        "context-products" => {
            let ok = peres_mermin_products()
                .iter()
                .zip(PERES_MERMIN_SIGNS)
                .all(|(p, s)| max_abs(&(p - identity(4) * c(s as f64, 0.0))) < 1e-10);
            ExpectedValue::Flag(ok)
        }
        "chi" => {
            let state = f.state.as_ref().ok_or_else(|| need("state"))?;
            let chi = f.operator("chi").ok_or_else(|| need("chi operator"))?;
            ExpectedValue::Real(expectation(state, chi).map_err(|e| err(&e))?.value)
        }
        "chi-noncontextual-bound" => ExpectedValue::Rational(int(peres_mermin_noncontextual_bound())),
        other => return Err(format!("no check for `{other}`")),
    })
}

fn compare(expected: &ExpectedQuantity, measured: &ExpectedValue) -> (f64, bool) {
    match (&expected.value, measured) {
        (ExpectedValue::Rational(a), ExpectedValue::Rational(b)) => {
            let d = to_f64(&(a - b).abs());
            (d, a == b)
        }
        (ExpectedValue::Real(a), ExpectedValue::Real(b)) => {
            let d = (a - b).abs();
            (d, d <= expected.tolerance)
        }
        (a, b) => {
            let same = a == b;
            (if same { 0.0 } else { 1.0 }, same)
        }
    }
}

/// Recomputes every expected value of a fixture through the public API.
pub fn run_fixture_checks(name: &str) -> Result<FixtureReport, FixtureError> {
    let f = get_fixture(name)?;
    let checks = f
        .expected
        .iter()
        .map(|e| match measure(f, e.key) {
            Ok(m) => {
                let (deviation, passed) = compare(e, &m);
                CheckResult {
                    key: e.key.to_string(),
                    expected: e.value.to_string(),
                    measured: m.to_string(),
                    deviation,
                    tolerance: e.tolerance,
                    source: e.source,
                    passed,
                }
            }
            Err(msg) => CheckResult {
                key: e.key.to_string(),
                expected: e.value.to_string(),
                measured: format!("error: {msg}"),
                deviation: f64::INFINITY,
                tolerance: e.tolerance,
                source: e.source,
                passed: false,
            },
        })
        .collect();
    Ok(FixtureReport { name: name.to_string(), checks })
}

/// `(file name, JSON text)` pairs for every object the fixture carries.
pub fn fixture_files(name: &str) -> Result<Vec<(String, String)>, FixtureError> {
    let f = get_fixture(name)?;
    let mut out = Vec::new();
    if let Some(s) = &f.scenario {
        out.push((format!("{name}.scenario.json"), pretty(&s.description())));
    }
    if let Some(m) = &f.model {
        out.push((format!("{name}.model.json"), m.to_json_string()));
    }
    if let Some(g) = &f.graph {
        out.push((format!("{name}.graph.json"), pretty(&g.to_file())));
    }
    if let Some(s) = &f.state {
        out.push((format!("{name}.state.json"), pretty(&StateFile::from_state(s))));
    }
    if let Some(r) = &f.realization {
        out.push((format!("{name}.realization.json"), pretty(&RealizationFile::from_realization(r))));
    }
    Ok(out)
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_passes_its_checks() {
        for name in FIXTURE_NAMES {
            let report = run_fixture_checks(name).unwrap();
            for c in &report.checks {
                assert!(c.passed, "{name}/{}: expected {} measured {}", c.key, c.expected, c.measured);
            }
            assert!(!report.checks.is_empty());
        }
    }

    #[test]
    fn unknown_fixture_lists_names() {
        let err = get_fixture("nope").unwrap_err().to_string();
        assert!(err.contains("chsh") && err.contains("yu-oh"), "{err}");
    }

    #[test]
    fn real_valued_expectations_carry_a_tolerance() {
        for f in catalog() {
            for e in &f.expected {
                assert!(e.tolerance >= 0.0);
                if matches!(e.value, ExpectedValue::Real(_)) {
                    assert!(e.tolerance > 0.0, "{}/{}", f.name, e.key);
                }
            }
        }
    }

    #[test]
    fn exported_files_parse_back() {
        for name in FIXTURE_NAMES {
            for (file, text) in fixture_files(name).unwrap() {
                let v: serde_json::Value = serde_json::from_str(&text).unwrap();
                assert!(v.is_object(), "{file}");
            }
        }
    }

    #[test]
    fn pr_box_and_chsh_share_the_scenario() {
        assert_eq!(get_fixture("pr-box").unwrap().scenario, get_fixture("chsh").unwrap().scenario);
        assert_eq!(builtin_scenario("chsh"), Some(chsh_scenario()));
        assert!(builtin_scenario("yu-oh").is_none());
    }
}
