use super::{bits, full_set, ExclusivityGraph};

/// Maximal cliques by Bron–Kerbosch with Tomita pivoting. Each clique is
/// sorted and the list is sorted lexicographically.
pub fn maximal_cliques(graph: &ExclusivityGraph) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if graph.n() > 0 {
        expand(graph, 0, full_set(graph.n()), 0, &mut out);
    }
    out.sort();
    out
}

fn expand(g: &ExclusivityGraph, r: u128, mut p: u128, mut x: u128, out: &mut Vec<Vec<usize>>) {
    if p == 0 {
        if x == 0 {
            out.push(bits(r).collect());
        }
        return;
    }
    // pivot maximizing |P ∩ N(u)|
    let pivot = bits(p | x).max_by_key(|&u| ((p & g.neighbors(u)).count_ones(), std::cmp::Reverse(u))).unwrap();
    for v in bits(p & !g.neighbors(pivot)) {
        let nv = g.neighbors(v);
        expand(g, r | 1 << v, p & nv, x & nv, out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(
            maximal_cliques(&ExclusivityGraph::cycle(5)),
            vec![vec![0, 1], vec![0, 4], vec![1, 2], vec![2, 3], vec![3, 4]]
        );
        assert_eq!(maximal_cliques(&ExclusivityGraph::complete(4)), vec![vec![0, 1, 2, 3]]);
        assert_eq!(maximal_cliques(&ExclusivityGraph::empty(3)), vec![vec![0], vec![1], vec![2]]);
        assert!(maximal_cliques(&ExclusivityGraph::empty(0)).is_empty());
    }
}
