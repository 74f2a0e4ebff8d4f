//! Exact linear algebra over the rationals.

use num::Zero;

use crate::rational::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Solves `a x = b`, returning the basic solution (free variables at zero),
/// or `None` when the system is inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Indices of a maximal set of linearly independent rows, chosen greedily in
/// row order.
pub fn independent_rows(a: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut kept = Vec::new();
    for (idx, row) in a.iter().enumerate() {
        let mut v = row.clone();
        for (pc, brow) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone();
                for (x, y) in v.iter_mut().zip(brow) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[pc].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            // keep the stored basis fully reduced so later rows only need one pass
            for (_, brow) in basis.iter_mut() {
                if !brow[pc].is_zero() {
                    let f = brow[pc].clone();
                    for (x, y) in brow.iter_mut().zip(&v) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            basis.push((pc, v));
            kept.push(idx);
        }
    }
    kept
}

pub fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter(|(r, v)| !r.is_zero() && !v.is_zero())
                .fold(Rational::zero(), |acc, (r, v)| acc + r * v)
        })
        .collect()
}

/// Least-norm solution of a consistent system `a x = b`.
pub fn min_norm_solution(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let keep = independent_rows(a);
    if keep.is_empty() {
        return b.iter().all(Zero::is_zero).then(|| vec![Rational::zero(); cols]);
    }
    let sub: Matrix = keep.iter().map(|&i| a[i].clone()).collect();
    let gram: Matrix = sub
        .iter()
        .map(|ri| sub.iter().map(|rj| ri.iter().zip(rj).fold(Rational::zero(), |acc, (x, y)| acc + x * y)).collect())
        .collect();
    let rhs: Vec<Rational> = keep.iter().map(|&i| b[i].clone()).collect();
    let y = solve(&gram, &rhs)?;
    let mut x = vec![Rational::zero(); cols];
    for (row, yi) in sub.iter().zip(&y) {
        for (xj, aij) in x.iter_mut().zip(row) {
            if !aij.is_zero() {
                *xj += aij * yi;
            }
        }
    }
    (mat_vec(a, &x) == b).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn solves_square_and_underdetermined_systems() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);

        let a = m(&[&[1, 1, 1]]);
        let x = solve(&a, &[int(1)]).unwrap();
        assert_eq!(mat_vec(&a, &x), vec![int(1)]);
    }

    #[test]
    fn detects_inconsistency() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[int(1), int(3)]).is_none());
        assert!(solve(&a, &[int(1), int(2)]).is_some());
    }

    #[test]
    fn independent_rows_skips_redundant_ones() {
        let a = m(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2], &[0, 0, 1]]);
        assert_eq!(independent_rows(&a), vec![0, 1, 3]);
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_the_kernel() {
        let a = m(&[&[1, 1, 0], &[2, 2, 0]]);
        let x = min_norm_solution(&a, &[int(2), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(0)]);
        assert!(min_norm_solution(&a, &[int(2), int(5)]).is_none());
    }
}
