//! Brute-force oracles shared by the integration tests. None of these call
//! into the solvers they are used to check.

#![allow(dead_code)]

use ctx_core::exgraph::ExclusivityGraph;
use ctx_core::rational::{ratio, to_f64, Rational};
use ctx_core::scenario::MeasurementScenario;
use ctx_core::EmpiricalModel;
use num::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_weight(rng: &mut impl Rng) -> Rational {
    let den = rng.gen_range(1..=12i64);
    ratio(rng.gen_range(0..=den), den)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, density: f64, weighted: bool) -> ExclusivityGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push((i, j));
            }
        }
    }
    let weights = (0..n).map(|_| if weighted { random_weight(rng) } else { Rational::one() }).collect();
    ExclusivityGraph::new(n, &edges, weights).unwrap()
}

pub fn is_connected(g: &ExclusivityGraph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for (u, s) in seen.iter_mut().enumerate() {
            if g.adjacent(v, u) && !*s {
                *s = true;
                stack.push(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn independent(g: &ExclusivityGraph, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| !g.adjacent(i, j)))
}

fn clique(g: &ExclusivityGraph, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(a, &i)| set[a + 1..].iter().all(|&j| g.adjacent(i, j)))
}

/// Maximum-weight independent set over all subsets; ties go to the
/// lexicographically least sorted vertex list.
pub fn brute_alpha(g: &ExclusivityGraph) -> (Rational, Vec<usize>) {
    let n = g.n();
    let mut best = (Rational::zero(), Vec::new());
    for mask in 0..1u64 << n {
        let set = members(mask, n);
        if !independent(g, &set) {
            continue;
        }
        let w: Rational = set.iter().map(|&i| g.weights()[i].clone()).sum();
        if w > best.0 || (w == best.0 && set < best.1) {
            best = (w, set);
        }
    }
    best
}

pub fn brute_maximal_cliques(g: &ExclusivityGraph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut out = Vec::new();
    for mask in 1..1u64 << n {
        let set = members(mask, n);
        if !clique(g, &set) {
            continue;
        }
        let extendable = (0..n).any(|v| mask >> v & 1 == 0 && set.iter().all(|&u| g.adjacent(u, v)));
        if !extendable {
            out.push(set);
        }
    }
    out.sort();
    out
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    a[r][col..n].iter_mut().zip(&pivot_row[col..n]).for_each(|(x, y)| *x -= f * y);
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// `α*` by enumerating every vertex of `{p ≥ 0, Σ_{i∈K} pᵢ ≤ 1}` over the
/// maximal cliques `K`. Only practical for small `n`.
pub fn lp_vertex_alpha_star(g: &ExclusivityGraph) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    let w = g.weights_f64();
    let cliques = brute_maximal_cliques(g);
    let mut rows: Vec<(Vec<f64>, f64)> =
        cliques.iter().map(|k| ((0..n).map(|i| if k.contains(&i) { 1.0 } else { 0.0 }).collect(), 1.0)).collect();
    for i in 0..n {
        rows.push(((0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect(), 0.0));
    }
    let feasible = |p: &[f64]| {
        p.iter().all(|&x| x >= -1e-9) && cliques.iter().all(|k| k.iter().map(|&i| p[i]).sum::<f64>() <= 1.0 + 1e-9)
    };
    let mut best = f64::NEG_INFINITY;
    let mut chosen = Vec::with_capacity(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        start: usize,
        n: usize,
        rows: &[(Vec<f64>, f64)],
        chosen: &mut Vec<usize>,
        basis: &mut Vec<Vec<f64>>,
        w: &[f64],
        feasible: &dyn Fn(&[f64]) -> bool,
        best: &mut f64,
    ) {
        if chosen.len() == n {
            let a = chosen.iter().map(|&r| rows[r].0.clone()).collect();
            let b = chosen.iter().map(|&r| rows[r].1).collect();
            if let Some(p) = solve_dense(a, b) {
                if feasible(&p) {
                    *best = best.max(p.iter().zip(w).map(|(x, y)| x * y).sum());
                }
            }
            return;
        }
        for idx in start..rows.len() {
            if rows.len() - idx < n - chosen.len() {
                break;
            }
            let mut v = rows[idx].0.clone();
            for q in basis.iter() {
                let d: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-9 {
                continue;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
            chosen.push(idx);
            recurse(idx + 1, n, rows, chosen, basis, w, feasible, best);
            chosen.pop();
            basis.pop();
        }
    }
    recurse(0, n, &rows, &mut chosen, &mut basis, &w, &feasible, &mut best);
    best
}

/// Dense floating-point tableau simplex (Bland's rule) for
/// `max cᵀx, Ax ≤ b, x ≥ 0` with `b ≥ 0`.
pub fn float_simplex_max(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
    let (m, n) = (a.len(), c.len());
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|j| if i == j { 1.0 } else { 0.0 }));
            row.push(b[i]);
            row
        })
        .collect();
    let mut z: Vec<f64> = c.iter().map(|x| -x).collect();
    z.extend(std::iter::repeat_n(0.0, m + 1));
    let mut basis: Vec<usize> = (n..n + m).collect();
    while let Some(enter) = (0..n + m).find(|&j| z[j] < -1e-12) {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][enter] > 1e-12 {
                let r = t[i][width - 1] / t[i][enter];
                match leave {
                    Some((li, lr)) if r > lr + 1e-12 || (r > lr - 1e-12 && basis[i] > basis[li]) => {}
                    _ => leave = Some((i, r)),
                }
            }
        }
        let (pr, _) = leave.expect("bounded");
        let pv = t[pr][enter];
        t[pr].iter_mut().for_each(|x| *x /= pv);
        let pivot_row = t[pr].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != pr && row[enter] != 0.0 {
                let f = row[enter];
                row.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
            }
        }
        let f = z[enter];
        z.iter_mut().zip(&pivot_row).for_each(|(x, y)| *x -= f * y);
        basis[pr] = enter;
    }
    z[width - 1]
}

/// `α*` by floating-point simplex over the brute-forced maximal cliques.
pub fn simplex_alpha_star(g: &ExclusivityGraph) -> f64 {
    let n = g.n();
    let cliques = brute_maximal_cliques(g);
    let a: Vec<Vec<f64>> =
        cliques.iter().map(|k| (0..n).map(|i| if k.contains(&i) { 1.0 } else { 0.0 }).collect()).collect();
    float_simplex_max(&a, &vec![1.0; a.len()], &g.weights_f64())
}

/// Does the graph, or its complement, have an induced odd cycle of length ≥ 5?
pub fn brute_has_odd_hole_or_antihole(g: &ExclusivityGraph) -> bool {
    let n = g.n();
    let induced_cycle = |mask: u64, adj: &dyn Fn(usize, usize) -> bool| {
        let set = members(mask, n);
        if !set.iter().all(|&v| set.iter().filter(|&&u| u != v && adj(u, v)).count() == 2) {
            return false;
        }
        let mut seen = vec![set[0]];
        let mut frontier = vec![set[0]];
        while let Some(v) = frontier.pop() {
            for &u in &set {
                if u != v && adj(u, v) && !seen.contains(&u) {
                    seen.push(u);
                    frontier.push(u);
                }
            }
        }
        seen.len() == set.len()
    };
    let plain = |u: usize, v: usize| g.adjacent(u, v);
    let comp = |u: usize, v: usize| !g.adjacent(u, v);
    (0..1u64 << n)
        .filter(|m| m.count_ones() >= 5 && m.count_ones() % 2 == 1)
        .any(|m| induced_cycle(m, &plain) || induced_cycle(m, &comp))
}

/// Is `cycle`, in the order given, an induced cycle under `adj`?
pub fn is_induced_cycle(cycle: &[usize], adj: &dyn Fn(usize, usize) -> bool) -> bool {
    let k = cycle.len();
    (0..k).all(|i| {
        (i + 1..k).all(|j| {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            adj(cycle[i], cycle[j]) == consecutive
        })
    })
}

/// A vertex permutation `π` with `a(i,j) ⇔ b(π i, π j)`, by trying them all.
pub fn find_isomorphism(a: &ExclusivityGraph, b: &ExclusivityGraph) -> Option<Vec<usize>> {
    let n = a.n();
    if n != b.n() || a.edges().len() != b.edges().len() {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let check = |p: &[usize]| a.edges().iter().all(|&(i, j)| b.adjacent(p[i], p[j]));
    if check(&perm) {
        return Some(perm);
    }
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if check(&perm) {
                return Some(perm);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    None
}

/// Every assignment of `k` outcomes to `n` measurements, first measurement
/// varying slowest.
pub fn all_assignments(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|p| (0..k).map(move |o| [p.clone(), vec![o]].concat())).collect();
    }
    out
}

/// Row index, inside context `c`'s table, of the restriction of `assignment`.
pub fn restricted_index(scenario: &MeasurementScenario, c: usize, assignment: &[usize]) -> usize {
    let k = scenario.outcome_count();
    scenario.cover()[c].members().iter().fold(0, |acc, &m| acc * k + assignment[m])
}

/// Assignments whose every restriction lies in the model's support.
pub fn brute_candidates(model: &EmpiricalModel) -> Vec<Vec<usize>> {
    let s = model.scenario();
    all_assignments(s.measurement_count(), s.outcome_count())
        .into_iter()
        .filter(|t| {
            (0..s.cover().len()).all(|c| {
                let row = model.table()[c].rational_weights().unwrap();
                !row[restricted_index(s, c, t)].is_zero()
            })
        })
        .collect()
}

/// Context tables produced by a weighting of the assignments.
pub fn brute_marginals(scenario: &MeasurementScenario, weights: &[Rational]) -> Vec<Vec<Rational>> {
    let k = scenario.outcome_count();
    let assignments = all_assignments(scenario.measurement_count(), k);
    (0..scenario.cover().len())
        .map(|c| {
            let mut row = vec![Rational::zero(); k.pow(scenario.cover()[c].len() as u32)];
            for (t, w) in assignments.iter().zip(weights) {
                row[restricted_index(scenario, c, t)] += w;
            }
            row
        })
        .collect()
}

/// Random probability vector with denominators dividing `den`.
pub fn random_distribution(rng: &mut impl Rng, len: usize, den: i64) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..len - 1).map(|_| rng.gen_range(0..=den)).collect();
    cuts.push(0);
    cuts.push(den);
    cuts.sort();
    cuts.windows(2).map(|w| ratio(w[1] - w[0], den)).collect()
}

pub fn approx(a: &Rational) -> f64 {
    to_f64(a)
}
