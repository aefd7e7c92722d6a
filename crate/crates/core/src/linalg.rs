//! Dense symmetric eigen machinery shared by both relaxations.
//!
//! The leading eigenpair comes from plain power iteration started at the
//! uniform vector, which has positive overlap with the Perron vector of any
//! nonnegative matrix. The full decomposition (used for PSD projection and
//! as an independent check on power iteration) is backed by nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-10;

/// Iteration cap used when the caller has no better estimate.
pub fn default_max_iter(n: usize) -> usize {
    10 * n + 1000
}

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    /// Unit norm, oriented so its largest-magnitude component is positive.
    pub vector: DVector<f64>,
    /// `|M v - value v|` at exit.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    /// `V diag(values) V'`
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }
}

pub(crate) fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::invalid(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if !a.is_finite() {
                return Err(Error::invalid(format!("non-finite entry at ({i},{j})")));
            }
            if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::invalid(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

fn orient(v: &mut DVector<f64>) {
    let mut pivot = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[pivot].abs() {
            pivot = i;
        }
    }
    if v[pivot] < 0.0 {
        v.neg_mut();
    }
}

/// Largest eigenpair of a symmetric matrix by power iteration.
///
/// The iteration runs on `M + sigma I` with `sigma` the largest absolute row
/// sum, which moves the spectrum into `[0, 2 sigma]`. The top eigenvalue then
/// dominates even when `M` has an eigenvalue of nearly equal magnitude and
/// opposite sign (zero-diagonal trade-off matrices often do). Eigenvectors are
/// unchanged and the Rayleigh quotient is taken on `M` itself. The iteration
/// stops once two successive quotients agree to `tol` (relative to
/// `max(1, |value|)`). For an entrywise-nonnegative matrix every iterate is
/// nonnegative, so the returned vector is the Perron vector.
pub fn leading_eigenpair(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<EigenPair> {
    check_symmetric(m)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = m.nrows();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let sigma = m
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if sigma == 0.0 {
        // the zero matrix: every vector is an eigenvector for 0
        return Ok(EigenPair {
            value: 0.0,
            vector: v,
            residual: 0.0,
            iterations: 0,
        });
    }
    let mut mv = m * &v;
    let mut rho = v.dot(&mv);
    let mut residual = (&mv - &v * rho).norm();

    for it in 1..=max_iter {
        let shifted = &mv + &v * sigma;
        v = &shifted / shifted.norm();
        mv = m * &v;
        let next = v.dot(&mv);
        residual = (&mv - &v * next).norm();
        if !next.is_finite() {
            return Err(Error::Numeric(
                "power iteration produced a non-finite value".into(),
            ));
        }
        let settled = (next - rho).abs() <= tol * next.abs().max(1.0);
        rho = next;
        if settled {
            orient(&mut v);
            return Ok(EigenPair {
                value: rho,
                vector: v,
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual,
    })
}

pub(crate) fn eigen_unchecked(m: &DMatrix<f64>) -> EigenDecomposition {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    EigenDecomposition { values, vectors }
}

/// Full spectrum of a symmetric matrix, eigenvalues sorted descending.
pub fn symmetric_eigendecomposition(m: &DMatrix<f64>) -> Result<EigenDecomposition> {
    check_symmetric(m)?;
    Ok(eigen_unchecked(m))
}

pub(crate) fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn project_psd_unchecked(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let col = eig.eigenvectors.column(k);
        for j in 0..n {
            let cj = lam * col[j];
            for i in j..n {
                out[(i, j)] += col[i] * cj;
            }
        }
    }
    for j in 0..n {
        for i in (j + 1)..n {
            out[(j, i)] = out[(i, j)];
        }
    }
    out
}

/// Frobenius-nearest positive semidefinite matrix: negative eigenvalues are clamped to zero.
pub fn project_psd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    Ok(project_psd_unchecked(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_analytic() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, default_max_iter(2)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p.value - 3.0).abs() < 1e-10);
        assert!((p.vector[0] - h).abs() < 1e-10 && (p.vector[1] - h).abs() < 1e-10);

        let d = symmetric_eigendecomposition(&m).unwrap();
        assert!((d.values[0] - 3.0).abs() < 1e-12 && (d.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matrix() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![5.0, 1.0, 1.0]));
        let p = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, default_max_iter(3)).unwrap();
        // the stop leaves a quotient error of order tol * value
        assert!((p.value - 5.0).abs() < 1e-9);
        assert!((p.vector[0] - 1.0).abs() < 1e-5);
        assert!(p.vector[1].abs() < 1e-5 && p.vector[2].abs() < 1e-5);
        assert!(((p.vector.norm()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_decomposition() {
        let d = symmetric_eigendecomposition(&DMatrix::identity(4, 4)).unwrap();
        assert!(d.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let vtv = d.vectors.transpose() * &d.vectors;
        assert!((vtv - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn orientation_makes_largest_component_positive() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -3.0, -3.0, 1.0]);
        let p = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, default_max_iter(2)).unwrap();
        // uniform start is an eigenvector for -2; power iteration stays there
        assert!((p.value + 2.0).abs() < 1e-12);
        assert!(p.vector[0] > 0.0);
    }

    #[test]
    fn zero_matrix_is_its_own_eigenspace() {
        let p = leading_eigenpair(&DMatrix::zeros(3, 3), DEFAULT_EIGEN_TOL, 10).unwrap();
        assert_eq!(p.value, 0.0);
        assert!((p.vector.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn opposite_sign_partner_does_not_stall() {
        // spectrum close to +-0.169 with zero diagonal
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                0.0, 0.0028, 0.0111, 0.0028, 0.0, 0.1688, 0.0111, 0.1688, 0.0,
            ],
        );
        let p = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, default_max_iter(3)).unwrap();
        let top = symmetric_eigendecomposition(&m).unwrap().values[0];
        assert!((p.value - top).abs() < 1e-10);
    }

    #[test]
    fn returns_the_largest_not_the_largest_in_magnitude() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -4.0]));
        let p = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, 1000).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9);
        assert!((p.vector[0] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn rejects_non_symmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            leading_eigenpair(&m, 1e-10, 100),
            Err(Error::InvalidInput(_))
        ));
        assert!(symmetric_eigendecomposition(&m).is_err());
        assert!(project_psd(&m).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        // eigenvalues 1 and 0.999, start vector far from the top one
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.999]);
        let err = leading_eigenpair(&m, 1e-15, 3).unwrap_err();
        assert!(matches!(err, Error::Convergence { iterations: 3, .. }));
    }

    #[test]
    fn psd_clamp() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -2.0]));
        let p = project_psd(&m).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!((p - expect).norm() < 1e-12);
    }

    #[test]
    fn psd_fixed_point() {
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.5, -0.2, 2.0, 0.3, 0.1]);
        let m = &b * b.transpose();
        assert!((project_psd(&m).unwrap() - &m).norm() < 1e-8);
    }
}
