//! Weighted exclusivity graphs and the invariant chain `α ≤ ϑ ≤ α*`.

mod cliques;
mod independence;
mod packing;
mod perfect;
mod theta;

use std::fmt::Write as _;

use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, int, parse_rational, to_f64, Rational, RationalError};
use crate::scenario::{MeasurementScenario, ScenarioError, Section};

pub use cliques::maximal_cliques;
pub use independence::independence_number;
pub use packing::{e1_membership, fractional_packing, E1Verdict};
pub use perfect::{odd_hole_or_antihole, PerfectionVerdict};
pub use theta::{lovasz_theta, lovasz_theta_with, ThetaOptions, ThetaResult};

/// Vertex limit imposed by the `u128` adjacency rows.
pub const MAX_VERTICES: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("{n} vertices exceed the cap of {cap}")]
    TooManyVertices { n: usize, cap: usize },
    #[error("edge ({0}, {1}) references a vertex outside the graph")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("{got} weights for {n} vertices")]
    WeightCount { n: usize, got: usize },
    #[error("vertex {0} has a negative weight")]
    NegativeWeight(usize),
    #[error("{got} labels for {n} vertices")]
    LabelCount { n: usize, got: usize },
    #[error("event {0} is listed twice")]
    DuplicateEvent(String),
    #[error("event {0} does not lie in any context")]
    NotJointlyMeasurable(String),
    #[error("vector has length {got}, graph has {n} vertices")]
    LengthMismatch { n: usize, got: usize },
    #[error("theta iteration stopped after {iterations} steps with residual {residual:e}")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Simple undirected graph with nonnegative rational vertex weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusivityGraph {
    n: usize,
    adj: Vec<u128>,
    weights: Vec<Rational>,
    labels: Option<Vec<String>>,
}

pub(crate) fn bits(mut set: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if set == 0 {
            return None;
        }
        let i = set.trailing_zeros() as usize;
        set &= set - 1;
        Some(i)
    })
}

pub(crate) fn full_set(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl ExclusivityGraph {
    pub fn new(n: usize, edges: &[(usize, usize)], weights: Vec<Rational>) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices { n, cap: MAX_VERTICES });
        }
        if weights.len() != n {
            return Err(GraphError::WeightCount { n, got: weights.len() });
        }
        if let Some(i) = weights.iter().position(Signed::is_negative) {
            return Err(GraphError::NegativeWeight(i));
        }
        let mut adj = vec![0u128; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(GraphError::VertexOutOfRange(i, j));
            }
            if i == j {
                return Err(GraphError::SelfLoop(i));
            }
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Ok(ExclusivityGraph { n, adj, weights, labels: None })
    }

    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        ExclusivityGraph::new(n, edges, vec![int(1); n])
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        ExclusivityGraph::unit(n, &edges).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        ExclusivityGraph::unit(n, &edges).expect("valid clique")
    }

    pub fn empty(n: usize) -> Self {
        ExclusivityGraph::unit(n, &[]).expect("valid empty graph")
    }

    /// `Ciₙ(offsets)`: `i ~ i ± k (mod n)` for each offset `k`.
    pub fn circulant(n: usize, offsets: &[usize]) -> Self {
        let edges: Vec<_> =
            (0..n).flat_map(|i| offsets.iter().map(move |&k| (i, (i + k) % n))).filter(|(i, j)| i != j).collect();
        ExclusivityGraph::unit(n, &edges).expect("valid circulant")
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LabelCount { n: self.n, got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_weights(mut self, weights: Vec<Rational>) -> Result<Self, GraphError> {
        if weights.len() != self.n {
            return Err(GraphError::WeightCount { n: self.n, got: weights.len() });
        }
        if let Some(i) = weights.iter().position(Signed::is_negative) {
            return Err(GraphError::NegativeWeight(i));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    pub fn neighbors(&self, i: usize) -> u128 {
        self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| bits(self.adj[i] >> i >> 1).map(move |k| (i, i + 1 + k))).collect()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.weights.iter().map(to_f64).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| !self.adjacent(i, j)))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| self.adjacent(i, j)))
    }

    pub fn set_weight(&self, set: &[usize]) -> Rational {
        set.iter().fold(Rational::zero(), |acc, &i| acc + &self.weights[i])
    }

    pub fn without_edge(&self, i: usize, j: usize) -> Self {
        let mut g = self.clone();
        g.adj[i] &= !(1 << j);
        g.adj[j] &= !(1 << i);
        g
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            weights: self.weights.iter().map(format_rational).collect(),
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Graphviz rendering; vertex names fall back to indices.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exclusivity {\n");
        for i in 0..self.n {
            let label = self.label(i).replace('\\', "\\\\").replace('"', "\\\"");
            let _ = writeln!(out, "  {i} [label=\"{label}\", weight_value=\"{}\"];", format_rational(&self.weights[i]));
        }
        for (i, j) in self.edges() {
            let _ = writeln!(out, "  {i} -- {j};");
        }
        out.push_str("}\n");
        out
    }
}

/// Involution swapping edges and non-edges; weights and labels are kept.
pub fn complement(graph: &ExclusivityGraph) -> ExclusivityGraph {
    let all = full_set(graph.n);
    let adj = (0..graph.n).map(|i| all & !graph.adj[i] & !(1 << i)).collect();
    ExclusivityGraph { n: graph.n, adj, weights: graph.weights.clone(), labels: graph.labels.clone() }
}

/// Events are exclusive when some shared measurement has different outcomes.
pub fn graph_from_events(
    scenario: &MeasurementScenario,
    events: &[Section],
    weights: Vec<Rational>,
) -> Result<ExclusivityGraph, GraphError> {
    for (i, e) in events.iter().enumerate() {
        scenario.check_section(e)?;
        if !scenario.cover().iter().any(|c| e.context().is_subset(c)) {
            return Err(GraphError::NotJointlyMeasurable(scenario.section_label(e)));
        }
        if events[..i].contains(e) {
            return Err(GraphError::DuplicateEvent(scenario.section_label(e)));
        }
    }
    let mut edges = Vec::new();
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            if !events[i].agrees_with(&events[j]) {
                edges.push((i, j));
            }
        }
    }
    let labels = events.iter().map(|e| scenario.section_label(e)).collect();
    ExclusivityGraph::new(events.len(), &edges, weights)?.with_labels(labels)
}

/// On-disk graph format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub weights: Vec<String>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<ExclusivityGraph, GraphError> {
        let weights = self.weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>, _>>()?;
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[i, j]| (i, j)).collect();
        let g = ExclusivityGraph::new(self.n, &edges, weights)?;
        match self.labels {
            Some(l) => g.with_labels(l),
            None => Ok(g),
        }
    }
}

/// All three invariants with their witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub alpha: Rational,
    pub alpha_witness: Vec<usize>,
    pub theta: ThetaResult,
    pub alpha_star: Rational,
    pub packing: Vec<Rational>,
}

pub fn invariants(graph: &ExclusivityGraph) -> Result<InvariantReport, GraphError> {
    let (alpha, alpha_witness) = independence_number(graph);
    let theta = lovasz_theta(graph)?;
    let (alpha_star, packing) = fractional_packing(graph);
    Ok(InvariantReport { alpha, alpha_witness, theta, alpha_star, packing })
}
