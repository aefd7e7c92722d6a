//! Spectral (l2-ball) relaxation and the top-K rounding rule shared with the
//! semidefinite relaxation.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{default_max_iter, leading_eigenpair, DEFAULT_EIGEN_TOL};
use crate::problem::{ProblemInstance, Selection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RelaxationMethod {
    L2,
    L1,
}

/// Fractional solution of a relaxation.
#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    pub method: RelaxationMethod,
    /// Fractional membership scores, nonnegative.
    pub x_star: Vec<f64>,
    /// Upper bound on `max x' A x` over 0/1 vectors with `K` ones.
    pub relaxed_value: f64,
}

/// l2 relaxation output with the spectral details kept around.
#[derive(Debug, Clone)]
pub struct L2Solution {
    pub relaxation: RelaxationSolution,
    pub eigenvalue: f64,
    /// `K * x*' A x*` for the clamped vector.
    pub clamped_value: f64,
}

/// Leading eigenvector of `A`, clamped entrywise at `1/sqrt(K)`.
pub fn solve_l2(instance: &ProblemInstance) -> Result<L2Solution> {
    solve_l2_with(instance, DEFAULT_EIGEN_TOL, default_max_iter(instance.n()))
}

pub fn solve_l2_with(instance: &ProblemInstance, tol: f64, max_iter: usize) -> Result<L2Solution> {
    l2_from_matrix(instance.matrix(), instance.k(), tol, max_iter)
}

fn l2_from_matrix(a: &DMatrix<f64>, k: usize, tol: f64, max_iter: usize) -> Result<L2Solution> {
    let pair = leading_eigenpair(a, tol, max_iter)?;
    let k = k as f64;
    let cap = 1.0 / k.sqrt();
    let x_star: Vec<f64> = pair.vector.iter().map(|&v| v.min(cap).max(0.0)).collect();

    let mut quad = 0.0;
    for i in 0..x_star.len() {
        for j in 0..x_star.len() {
            quad += x_star[i] * a[(i, j)] * x_star[j];
        }
    }
    Ok(L2Solution {
        relaxation: RelaxationSolution {
            method: RelaxationMethod::L2,
            x_star,
            relaxed_value: k * pair.value,
        },
        eigenvalue: pair.value,
        clamped_value: k * quad,
    })
}

/// The `K` largest entries of `x_star`; ties go to the more relevant
/// candidate, then to the smaller index.
pub fn round_topk(x_star: &[f64], instance: &ProblemInstance) -> Result<Selection> {
    if x_star.len() != instance.n() {
        return Err(Error::invalid(format!(
            "score vector has length {}, n = {}",
            x_star.len(),
            instance.n()
        )));
    }
    if x_star.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite fractional solution".into()));
    }
    let sim = instance.sim();
    let mut order: Vec<usize> = (0..x_star.len()).collect();
    order.sort_by(|&a, &b| {
        x_star[b]
            .total_cmp(&x_star[a])
            .then(sim[b].total_cmp(&sim[a]))
            .then(a.cmp(&b))
    });
    order.truncate(instance.k());
    Selection::evaluate(instance, order)
}

/// Solve the l2 relaxation and round it.
pub fn select_l2(instance: &ProblemInstance) -> Result<Selection> {
    let sol = solve_l2(instance)?;
    round_topk(&sol.relaxation.x_star, instance)
}
