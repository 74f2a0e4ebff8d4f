use super::{complement, ExclusivityGraph};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PerfectionVerdict {
    None,
    /// Induced odd cycle of length ≥ 5, vertices in cycle order.
    OddHole(Vec<usize>),
    /// Induced odd cycle of the complement, vertices in its cycle order.
    OddAntihole(Vec<usize>),
}

impl PerfectionVerdict {
    pub fn is_none(&self) -> bool {
        matches!(self, PerfectionVerdict::None)
    }
}

/// Searches holes of every odd length first, then antiholes. Each cycle is
/// found starting from its smallest vertex `v₀` with `v₁ < v_last`, so the
/// first witness in DFS order is canonical.
pub fn odd_hole_or_antihole(graph: &ExclusivityGraph) -> PerfectionVerdict {
    if let Some(c) = first_odd_hole(graph) {
        return PerfectionVerdict::OddHole(c);
    }
    if let Some(c) = first_odd_hole(&complement(graph)) {
        return PerfectionVerdict::OddAntihole(c);
    }
    PerfectionVerdict::None
}

fn first_odd_hole(g: &ExclusivityGraph) -> Option<Vec<usize>> {
    let n = g.n();
    let mut k = 5;
    while k <= n {
        for start in 0..n {
            let mut path = vec![start];
            if extend(g, k, &mut path) {
                return Some(path);
            }
        }
        k += 2;
    }
    None
}

fn extend(g: &ExclusivityGraph, k: usize, path: &mut Vec<usize>) -> bool {
    let start = path[0];
    let last = *path.last().unwrap();
    let len = path.len();
    let closing = len == k - 1;
    for v in (start + 1)..g.n() {
        if !g.adjacent(last, v) || path.contains(&v) {
            continue;
        }
        // only the path's last vertex (and v₀ when closing) may touch v
        let touches = path[..len - 1].iter().enumerate().any(|(idx, &u)| {
            let may = closing && idx == 0;
            g.adjacent(u, v) != may
        });
        if len >= 2 && touches {
            continue;
        }
        if closing && v < path[1] {
            continue;
        }
        path.push(v);
        if closing || extend(g, k, path) {
            return true;
        }
        path.pop();
    }
    false
}
