//! Contextuality and nonlocality toolkit.
//!
//! Two complementary views of the same question, "do these statistics have a
//! classical explanation?":
//!
//! * the event-sheaf view ([`scenario`], [`empirical`], [`hidden_variable`]):
//!   an empirical model is classical iff its context tables glue into one
//!   distribution over global sections, decided exactly as a linear
//!   feasibility problem over the chosen semiring;
//! * the exclusivity-graph view ([`exgraph`]): a correlation expression
//!   `Σ wᵢ P(eᵢ)` is bounded by `α(G,w)` classically, by `ϑ(G,w)` in quantum
//!   theory and by `α*(G,w)` under the exclusivity principle.
//!
//! [`quantum`] generates models and orthonormal representations from states
//! and projectors, and [`fixtures`] bundles the canonical examples (CHSH,
//! KCBS, Peres–Mermin, PR box, Yu–Oh).

pub mod empirical;
pub mod exact;
pub mod exgraph;
pub mod fixtures;
pub mod hidden_variable;
pub mod quantum;
pub mod rational;
pub mod scenario;
pub mod simplex;

pub use empirical::{
    check_compatibility, evaluate_expression, marginalize, model_from_global_distribution, Compatibility, Distribution,
    EmpiricalError, EmpiricalModel, SemiringTag, Weights,
};
pub use exgraph::{
    complement, e1_membership, fractional_packing, graph_from_events, independence_number, lovasz_theta,
    maximal_cliques, odd_hole_or_antihole, ExclusivityGraph, GraphError, InvariantReport, PerfectionVerdict,
};
pub use hidden_variable::{
    build_incidence, classify, realize_hv, solve_possibilistic, solve_probabilistic, solve_signed, ContextualityClass,
    FeasibilityVerdict, HiddenVariableModel, IncidenceSystem,
};
pub use quantum::{
    check_or, expectation, lovasz_value_from_or, quantum_model, OrMode, ProjectiveObservable, QuantumError,
    QuantumRealization, StateVector, VectorSystem,
};
pub use rational::{Rational, RationalizePolicy};
pub use scenario::{validate_scenario, Context, MeasurementScenario, ScenarioError, Section};
