use num::Zero;

use super::{bits, full_set, ExclusivityGraph};
use crate::rational::Rational;

struct Search<'a> {
    g: &'a ExclusivityGraph,
    /// vertices by decreasing weight, ties by index
    order: Vec<usize>,
    best: Rational,
}

impl Search<'_> {
    /// Greedy clique cover of `p` in weight order; each clique contributes the
    /// weight of its first (heaviest) member.
    fn bound(&self, p: u128) -> Rational {
        let mut cliques: Vec<u128> = Vec::new();
        let mut total = Rational::zero();
        for &v in &self.order {
            if p >> v & 1 == 0 {
                continue;
            }
            let nv = self.g.neighbors(v);
            match cliques.iter_mut().find(|c| **c & !nv == 0) {
                Some(c) => *c |= 1 << v,
                None => {
                    cliques.push(1 << v);
                    total += &self.g.weights()[v];
                }
            }
        }
        total
    }

    fn run(&mut self, p: u128, acc: Rational) {
        if p == 0 {
            if acc > self.best {
                self.best = acc;
            }
            return;
        }
        if &acc + self.bound(p) <= self.best {
            return;
        }
        let v = *self.order.iter().find(|&&v| p >> v & 1 == 1).unwrap();
        let w = &self.g.weights()[v];
        self.run(p & !self.g.neighbors(v) & !(1 << v), &acc + w);
        self.run(p & !(1 << v), acc);
    }
}

/// Maximum weight of an independent set inside `candidates`.
pub(crate) fn max_weight_within(g: &ExclusivityGraph, candidates: u128) -> Rational {
    let mut order: Vec<usize> = bits(candidates).collect();
    order.sort_by(|&a, &b| g.weights()[b].cmp(&g.weights()[a]).then(a.cmp(&b)));
    let mut search = Search { g, order, best: Rational::zero() };
    // zero-weight vertices never help
    let positive = bits(candidates).filter(|&v| !g.weights()[v].is_zero()).fold(0u128, |s, v| s | 1 << v);
    search.run(positive, Rational::zero());
    search.best
}

/// `α(G,w)` and the lexicographically least optimal independent set, where
/// sets are compared as increasing vertex sequences (a proper prefix is
/// smaller, so zero-weight padding is never added).
pub fn independence_number(graph: &ExclusivityGraph) -> (Rational, Vec<usize>) {
    let n = graph.n();
    let alpha = max_weight_within(graph, full_set(n));
    let mut chosen = Vec::new();
    let mut acc = Rational::zero();
    let mut allowed = full_set(n);
    let mut next = 0;
    while acc != alpha {
        let v = (next..n)
            .find(|&v| {
                if allowed >> v & 1 == 0 {
                    return false;
                }
                let rest = allowed & !graph.neighbors(v) & !full_set(v + 1);
                &acc + &graph.weights()[v] + max_weight_within(graph, rest) == alpha
            })
            .expect("an optimal extension exists");
        acc += &graph.weights()[v];
        allowed &= !graph.neighbors(v);
        chosen.push(v);
        next = v + 1;
    }
    (alpha, chosen)
}
