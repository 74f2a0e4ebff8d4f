//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problem sizes here are desk scale (tens of rows, a few hundred columns),
//! so a dense tableau keeps the pivoting logic easy to audit.

use num::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// `m` rows of `ncols + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize, objective: &mut [Rational]) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                eliminate(row, &pivot_row, c);
            }
        }
        if !objective[c].is_zero() {
            eliminate(objective, &pivot_row, c);
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for minimizing `cost · x` in the current basis; the
    /// last entry holds minus the objective value.
    fn reduced_costs(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !cost[b].is_zero() {
                let f = cost[b].clone();
                for (o, v) in obj.iter_mut().zip(row) {
                    if !v.is_zero() {
                        *o -= &f * v;
                    }
                }
            }
        }
        obj
    }

    /// Minimizes `cost · x` over columns allowed to enter. Returns `false` on
    /// an unbounded direction.
    fn minimize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> bool {
        let mut obj = self.reduced_costs(cost);
        loop {
            // Bland: lowest-index improving column, then lowest-index leaving variable.
            let Some(c) = (0..self.ncols).find(|&j| allowed(j) && obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.ncols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return false;
            };
            self.pivot(r, c, &mut obj);
        }
    }

    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < n {
                x[b] = row[self.ncols].clone();
            }
        }
        x
    }
}

fn eliminate(row: &mut [Rational], pivot_row: &[Rational], c: usize) {
    let f = row[c].clone();
    for (v, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *v -= &f * p;
        }
    }
}

/// Phase one on `a x = b, x >= 0`. On success the tableau holds a feasible
/// basis with every artificial column either nonbasic or stuck on a
/// redundant row.
fn phase_one(a: &[Vec<Rational>], b: &[Rational]) -> Option<Tableau> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), n, "ragged constraint matrix");
        let flip = rhs.is_negative();
        let mut r: Vec<Rational> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
        r.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
        r.push(if flip { -rhs } else { rhs.clone() });
        rows.push(r);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), ncols };
    let mut cost = vec![Rational::zero(); ncols];
    for c in cost.iter_mut().skip(n) {
        *c = Rational::from_integer(1.into());
    }
    t.minimize(&cost, |_| true);
    let infeasibility = t
        .rows
        .iter()
        .zip(&t.basis)
        .filter(|(_, &bv)| bv >= n)
        .fold(Rational::zero(), |acc, (row, _)| acc + &row[ncols]);
    if !infeasibility.is_zero() {
        return None;
    }
    // drive zero-valued artificials out of the basis where possible
    let mut scratch = vec![Rational::zero(); ncols + 1];
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                t.pivot(r, c, &mut scratch);
            }
        }
    }
    Some(t)
}

/// Finds `x >= 0` with `a x = b`, or `None` when no such point exists.
pub fn find_feasible(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first().map_or(0, Vec::len);
    if a.is_empty() {
        return Some(Vec::new());
    }
    phase_one(a, b).map(|t| t.solution(n))
}

/// Maximizes `c · x` subject to `a x <= b`, `x >= 0`.
pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = a.len();
    // slack columns turn the inequalities into equalities
    let eq: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|k| if k == i { Rational::from_integer(1.into()) } else { Rational::zero() }));
            r
        })
        .collect();
    if m == 0 {
        return if c.iter().any(Signed::is_positive) {
            LpOutcome::Unbounded
        } else {
            LpOutcome::Optimal { x: vec![Rational::zero(); n], value: Rational::zero() }
        };
    }
    let Some(mut t) = phase_one(&eq, b) else {
        return LpOutcome::Infeasible;
    };
    let structural = n + m;
    let mut cost: Vec<Rational> = c.iter().map(|v| -v).collect();
    cost.resize(t.ncols, Rational::zero());
    if !t.minimize(&cost, |j| j < structural) {
        return LpOutcome::Unbounded;
    }
    let full = t.solution(structural);
    let x: Vec<Rational> = full[..n].to_vec();
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { x, value }
}
