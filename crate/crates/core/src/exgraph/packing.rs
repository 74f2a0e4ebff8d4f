use num::{One, Signed, Zero};

use super::{maximal_cliques, ExclusivityGraph, GraphError};
use crate::rational::Rational;
use crate::simplex::{maximize, LpOutcome};

/// `α*(G,w)`: maximize `w·p` with `p ≥ 0` and `Σ_{i∈K} pᵢ ≤ 1` for each
/// maximal clique `K`. Returns the value and the optimal vertex the simplex
/// lands on.
pub fn fractional_packing(graph: &ExclusivityGraph) -> (Rational, Vec<Rational>) {
    let n = graph.n();
    if n == 0 {
        return (Rational::zero(), Vec::new());
    }
    let cliques = maximal_cliques(graph);
    let a: Vec<Vec<Rational>> = cliques
        .iter()
        .map(|k| {
            let mut row = vec![Rational::zero(); n];
            for &i in k {
                row[i] = Rational::one();
            }
            row
        })
        .collect();
    let b = vec![Rational::one(); cliques.len()];
    match maximize(graph.weights(), &a, &b) {
        LpOutcome::Optimal { x, value } => (value, x),
        // every vertex lies in some clique, so p is boxed by 0 ≤ p ≤ 1
        other => unreachable!("clique LP is bounded and feasible: {other:?}"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Verdict {
    pub member: bool,
    /// First maximal clique (in sorted order) whose sum exceeds 1, with that sum.
    pub violated: Option<(Vec<usize>, Rational)>,
}

pub fn e1_membership(graph: &ExclusivityGraph, p: &[Rational]) -> Result<E1Verdict, GraphError> {
    if p.len() != graph.n() {
        return Err(GraphError::LengthMismatch { n: graph.n(), got: p.len() });
    }
    if let Some(i) = p.iter().position(Signed::is_negative) {
        return Err(GraphError::NegativeWeight(i));
    }
    for k in maximal_cliques(graph) {
        let s = k.iter().fold(Rational::zero(), |acc, &i| acc + &p[i]);
        if s > Rational::one() {
            return Ok(E1Verdict { member: false, violated: Some((k, s)) });
        }
    }
    Ok(E1Verdict { member: true, violated: None })
}
