use nalgebra::{DMatrix, SymmetricEigen};
use num::Zero;

use super::{ExclusivityGraph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ThetaOptions {
    fn default() -> Self {
        ThetaOptions { tolerance: 1e-7, max_iterations: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaResult {
    pub value: f64,
    /// Final max of affine violation, PSD-projection gap and dual step.
    pub residual: f64,
    pub iterations: usize,
}

/// `ϑ(G,w) = max Σᵢⱼ √(wᵢwⱼ) Bᵢⱼ` over PSD `B` with unit trace and
/// `Bᵢⱼ = 0` on edges.
pub fn lovasz_theta(graph: &ExclusivityGraph) -> Result<ThetaResult, GraphError> {
    lovasz_theta_with(graph, ThetaOptions::default())
}

pub fn lovasz_theta_with(graph: &ExclusivityGraph, options: ThetaOptions) -> Result<ThetaResult, GraphError> {
    // zero-weight vertices contribute nothing and can be dropped
    let support: Vec<usize> = (0..graph.n()).filter(|&i| !graph.weights()[i].is_zero()).collect();
    let n = support.len();
    if n == 0 {
        return Ok(ThetaResult { value: 0.0, residual: 0.0, iterations: 0 });
    }
    let w: Vec<f64> = support.iter().map(|&i| graph.weights_f64()[i]).collect();
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let edge = DMatrix::from_fn(n, n, |a, b| graph.adjacent(support[a], support[b]));
    if n == 1 || (0..n).all(|a| (0..n).all(|b| a == b || edge[(a, b)])) {
        // complete on the support: B is diagonal, optimum is the heaviest vertex
        return Ok(ThetaResult { value: w.iter().cloned().fold(0.0, f64::max), residual: 0.0, iterations: 0 });
    }
    let cost = DMatrix::from_fn(n, n, |a, b| sqrt_w[a] * sqrt_w[b]);
    // iterate on the unit-norm cost; the value is read off the original
    let c = &cost / cost.norm();

    let mut z = DMatrix::<f64>::identity(n, n) / n as f64;
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut rho = 1.0;
    let mut residual = f64::INFINITY;
    for it in 1..=options.max_iterations {
        let x = project_affine(&(&z - &u + &c / rho), &edge);
        let z_prev = z;
        z = project_psd(&(&x + &u));
        u += &x - &z;
        let primal = (&x - &z).amax();
        let dual = rho * (&z - &z_prev).amax();
        residual = primal.max(dual);
        if residual < options.tolerance {
            let value = cost.component_mul(&x).sum();
            return Ok(ThetaResult { value, residual, iterations: it });
        }
        if it % 10 == 0 {
            if primal > 10.0 * dual {
                rho *= 2.0;
                u /= 2.0;
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }
    Err(GraphError::NonConvergence { iterations: options.max_iterations, residual })
}

/// Orthogonal projection onto `{tr B = 1, Bᵢⱼ = 0 on edges}`; the two
/// constraint families touch disjoint entries, so they decouple.
fn project_affine(y: &DMatrix<f64>, edge: &DMatrix<bool>) -> DMatrix<f64> {
    let n = y.nrows();
    let mut out = (y + y.transpose()) / 2.0;
    for a in 0..n {
        for b in 0..n {
            if edge[(a, b)] {
                out[(a, b)] = 0.0;
            }
        }
    }
    let shift = (1.0 - out.trace()) / n as f64;
    for a in 0..n {
        out[(a, a)] += shift;
    }
    out
}

fn project_psd(y: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (y + y.transpose()) / 2.0;
    let eig = SymmetricEigen::new(sym);
    let clipped = eig.eigenvalues.map(|l| l.max(0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()
}
