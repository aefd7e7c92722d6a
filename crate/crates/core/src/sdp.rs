//! Semidefinite (l1-ball) relaxation.
//!
//! Solves
//!
//! ```text
//! maximize   <X, A>
//! subject to X >= 0 (PSD),  Diag(t) - X >= 0 (PSD),  t >= 0,  sum(t) <= 1
//! ```
//!
//! with scaled-form ADMM. The splitting keeps `(X, t)` free and introduces
//! copies `U = X`, `V = Diag(t) - X` and `s = t` that live in the PSD cone,
//! the PSD cone and the capped simplex respectively, so each iteration is a
//! closed-form affine step followed by two eigenvalue clamps and one simplex
//! projection.
//!
//! Iterates only satisfy the coupling constraints approximately. At regular
//! checkpoints the current `(U, s)` is pulled back into the feasible set by a
//! uniform shrink, and the best such feasible point is what gets returned. The
//! scaled dual for the `V` block yields a certified upper bound on the optimum
//! (`dual_bound`); small residuals alone can hide a slow tail, so convergence
//! also requires the feasible objective to be within `tol` of that bound.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_symmetric, min_eigenvalue, project_psd_unchecked};
use crate::problem::{ProblemInstance, Selection};
use crate::relax_l2::{round_topk, RelaxationMethod, RelaxationSolution};

const OVER_RELAX: f64 = 1.6;

/// Penalty rebalancing interval: frequent early, sparse later so it cannot cycle.
fn rho_period(it: usize) -> usize {
    if it <= 500 {
        10
    } else {
        100
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SdpSettings {
    /// Stop once both normalized residuals and the normalized gap between
    /// the best feasible objective and `dual_bound` fall below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Residual balancing on the penalty.
    pub adaptive_rho: bool,
    /// Iterations between feasibility checkpoints.
    pub check_every: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20_000,
            rho: 1.0,
            adaptive_rho: true,
            check_every: 25,
        }
    }
}

impl SdpSettings {
    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid(format!(
                "sdp tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::invalid(format!(
                "sdp rho must be positive, got {}",
                self.rho
            )));
        }
        if self.max_iter == 0 || self.check_every == 0 {
            return Err(Error::invalid("sdp max_iter and check_every must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Feasible PSD matrix.
    pub x: DMatrix<f64>,
    /// Diagonal budget with `Diag(t) >= X`.
    pub t: Vec<f64>,
    /// `<X, A>`
    pub objective: f64,
    /// Upper bound on the optimum from a repaired dual certificate.
    pub dual_bound: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best feasible objective at each checkpoint.
    pub history: Vec<f64>,
}

/// Smallest eigenvalues and budget slack of a solution.
#[derive(Debug, Clone, Copy)]
pub struct Feasibility {
    pub min_eig_x: f64,
    pub min_eig_slack: f64,
    pub budget: f64,
    pub min_t: f64,
}

impl SdpSolution {
    pub fn feasibility(&self) -> Feasibility {
        let mut slack = -self.x.clone();
        for (i, ti) in self.t.iter().enumerate() {
            slack[(i, i)] += ti;
        }
        Feasibility {
            min_eig_x: min_eigenvalue(&self.x),
            min_eig_slack: min_eigenvalue(&slack),
            budget: self.t.iter().sum(),
            min_t: self.t.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

/// Euclidean projection onto `{t >= 0, sum(t) <= 1}`.
pub(crate) fn project_capped_simplex(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let cand = (cum - 1.0) / (i + 1) as f64;
        if u - cand > 0.0 {
            theta = cand;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn frob_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Shrinks `(u, s)` until `Diag(t) - X` is PSD; `u` must already be PSD and `s`
/// in the capped simplex.
fn repair(u: &DMatrix<f64>, s: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
    let n = s.len();
    let mut slack = -u.clone();
    for (i, si) in s.iter().enumerate() {
        slack[(i, i)] += si;
    }
    let c = (-min_eigenvalue(&slack)).max(0.0);
    let scale = 1.0 / (1.0 + n as f64 * c);
    let x = u * scale;
    let t = s.iter().map(|si| (si + c) * scale).collect();
    (x, t)
}

/// Turns an approximate dual `W` (`W >= A`, `W >= 0`, constant diagonal) into
/// an exact one and returns its diagonal value, which bounds the optimum.
fn certified_bound(a: &DMatrix<f64>, w: &DMatrix<f64>) -> f64 {
    let w = (w + w.transpose()) * 0.5;
    let shift = (-min_eigenvalue(&(&w - a)))
        .max(-min_eigenvalue(&w))
        .max(0.0);
    (0..w.nrows())
        .map(|i| w[(i, i)] + shift)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Maximizes `<X, A>` over the l1-ball lifting.
pub fn solve_sdp(a: &DMatrix<f64>, settings: &SdpSettings) -> Result<SdpSolution> {
    check_symmetric(a)?;
    settings.validate()?;
    if a.iter().any(|v| *v < 0.0) {
        return Err(Error::invalid(
            "trade-off matrix must be entrywise nonnegative",
        ));
    }
    let n = a.nrows();
    let scale = 1.0 + a.norm();
    let mut rho = settings.rho;

    let mut u = DMatrix::<f64>::identity(n, n) / n as f64;
    let mut v = DMatrix::<f64>::zeros(n, n);
    let mut s = vec![1.0 / n as f64; n];
    let mut lu = DMatrix::<f64>::zeros(n, n);
    let mut lv = DMatrix::<f64>::zeros(n, n);
    let mut ls = vec![0.0; n];

    let mut x = DMatrix::<f64>::zeros(n, n);
    let mut t = vec![0.0; n];

    let (mut best_x, mut best_t) = repair(&u, &s);
    let mut best_obj = frob_inner(&best_x, a);
    let mut history = vec![best_obj];

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut dual_bound = f64::INFINITY;

    for it in 1..=settings.max_iter {
        iterations = it;

        // affine step on (X, t)
        for j in 0..n {
            for i in 0..n {
                let p = u[(i, j)] - lu[(i, j)];
                let q = v[(i, j)] - lv[(i, j)];
                let g = a[(i, j)] / rho + p - q;
                if i == j {
                    let r = s[i] - ls[i];
                    let xi = (2.0 * g + q + r) / 3.0;
                    x[(i, i)] = xi;
                    t[i] = (q + r + xi) / 2.0;
                } else {
                    x[(i, j)] = g / 2.0;
                }
            }
        }

        // over-relaxed copies of the affine iterate
        let mut dt_x = -x.clone();
        for i in 0..n {
            dt_x[(i, i)] += t[i];
        }
        let hat_u = &x * OVER_RELAX + &u * (1.0 - OVER_RELAX);
        let hat_v = &dt_x * OVER_RELAX + &v * (1.0 - OVER_RELAX);
        let hat_s: Vec<f64> = t
            .iter()
            .zip(&s)
            .map(|(ti, si)| OVER_RELAX * ti + (1.0 - OVER_RELAX) * si)
            .collect();

        // cone projections
        let u_next = project_psd_unchecked(&(&hat_u + &lu));
        let v_next = project_psd_unchecked(&(&hat_v + &lv));
        let shifted: Vec<f64> = hat_s.iter().zip(&ls).map(|(hi, li)| hi + li).collect();
        let s_next = project_capped_simplex(&shifted);

        // residuals
        let r_u = &x - &u_next;
        let r_v = &dt_x - &v_next;
        let r_s: Vec<f64> = t.iter().zip(&s_next).map(|(ti, si)| ti - si).collect();

        primal = (r_u.norm_squared() + r_v.norm_squared() + sq(&r_s)).sqrt() / scale;
        let ds: Vec<f64> = s_next.iter().zip(&s).map(|(a, b)| a - b).collect();
        dual = rho
            * ((&u_next - &u).norm_squared() + (&v_next - &v).norm_squared() + sq(&ds)).sqrt()
            / scale;
        if !primal.is_finite() || !dual.is_finite() {
            return Err(Error::Numeric(format!(
                "sdp residual became non-finite at iteration {it}"
            )));
        }

        // dual update
        lu += &hat_u - &u_next;
        lv += &hat_v - &v_next;
        for ((l, h), sn) in ls.iter_mut().zip(&hat_s).zip(&s_next) {
            *l += h - sn;
        }
        u = u_next;
        v = v_next;
        s = s_next;

        let small = primal.max(dual) <= settings.tol;
        if it % settings.check_every == 0 || small || it == settings.max_iter {
            let (fx, ft) = repair(&u, &s);
            let obj = frob_inner(&fx, a);
            if obj > best_obj {
                best_obj = obj;
                best_x = fx;
                best_t = ft;
            }
            history.push(best_obj);
            if small {
                dual_bound = dual_bound.min(certified_bound(a, &(-&lv * rho)));
                converged = dual_bound - best_obj <= settings.tol * (1.0 + dual_bound.abs());
            }
        }
        if converged || it == settings.max_iter {
            break;
        }

        if settings.adaptive_rho && it % rho_period(it) == 0 {
            let factor = if primal > 10.0 * dual {
                2.0
            } else if dual > 10.0 * primal {
                0.5
            } else {
                1.0
            };
            if factor != 1.0 {
                rho *= factor;
                lu /= factor;
                lv /= factor;
                for l in ls.iter_mut() {
                    *l /= factor;
                }
            }
        }
    }

    let dual_bound = dual_bound.min(certified_bound(a, &(-&lv * rho)));
    Ok(SdpSolution {
        x: best_x,
        t: best_t,
        objective: best_obj,
        dual_bound,
        primal_residual: primal,
        dual_residual: dual,
        iterations,
        converged,
        history,
    })
}

/// `x*_i = min(sqrt(X_ii), 1/K)`.
pub fn extract_x(sol: &SdpSolution, k: usize) -> Vec<f64> {
    let cap = 1.0 / k as f64;
    (0..sol.x.nrows())
        .map(|i| sol.x[(i, i)].max(0.0).sqrt().min(cap))
        .collect()
}

/// Everything produced by one l1 run.
#[derive(Debug, Clone)]
pub struct L1Outcome {
    pub selection: Selection,
    pub relaxation: RelaxationSolution,
    pub sdp: SdpSolution,
}

/// SDP, extraction, then the shared top-K rounding.
///
/// Diagonal entries of `X` at or below the solver's resolution
/// (`10 * tol * (1 + |A|_F)`) are zeroed before extraction, so coordinates the
/// solver left empty tie and fall back to relevance order.
pub fn solve_l1(instance: &ProblemInstance, settings: &SdpSettings) -> Result<L1Outcome> {
    let a = instance.matrix();
    let sdp = solve_sdp(a, settings)?;
    let floor = 10.0 * settings.tol * (1.0 + a.norm());
    let mut cleaned = sdp.clone();
    for i in 0..instance.n() {
        if cleaned.x[(i, i)] <= floor {
            cleaned.x[(i, i)] = 0.0;
        }
    }
    let x_star = extract_x(&cleaned, instance.k());
    let selection = round_topk(&x_star, instance)?;
    let k = instance.k() as f64;
    Ok(L1Outcome {
        selection,
        relaxation: RelaxationSolution {
            method: RelaxationMethod::L1,
            x_star,
            // the feasible objective can sit just under the SDP optimum; the
            // dual bound cannot
            relaxed_value: k * k * sdp.dual_bound,
        },
        sdp,
    })
}
