//! Candidates, kernels, the trade-off matrix and the two set objectives.
//!
//! A [`ProblemInstance`] bundles everything a selector needs for one query:
//! the relevance vector `sim`, the pairwise diversity matrix `div`, the
//! budget `K`, the trade-off `lambda` and the blended matrix
//!
//! ```text
//! A[i][j] = (sim[i] * sim[j])^(1 - lambda) * div[i][j]^lambda
//! ```
//!
//! whose quadratic form `x' A x` over 0/1 membership vectors is the objective
//! every solver in this crate maximizes.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A retrievable item with an embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub vector: Vec<f64>,
}

/// The query every candidate is scored against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub vector: Vec<f64>,
}

impl Candidate {
    pub fn new(id: impl Into<String>, vector: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            vector,
        }
    }
}

impl Query {
    pub fn new(id: impl Into<String>, vector: Vec<f64>) -> Self {
        Self {
            id: id.into(),
            vector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SimKind {
    /// `1 - |q - s| / diameter`
    ScaledDistance,
    /// `(1 + cos(q, s)) / 2`
    ScaledCosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DivKind {
    /// `|a - b|`
    Euclidean,
    /// `1 - cos(a, b)`
    CosineDistance,
}

/// Concrete relevance and diversity kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KernelConfig {
    pub sim_kind: SimKind,
    pub div_kind: DivKind,
    /// Lower clamp on relevance, keeps every relevance factor of `A` positive.
    pub sim_floor: f64,
    /// Distance normalizer for [`SimKind::ScaledDistance`].
    pub diameter: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            sim_kind: SimKind::ScaledDistance,
            div_kind: DivKind::Euclidean,
            sim_floor: 1e-6,
            diameter: 2.0,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sim_floor > 0.0 && self.sim_floor < 1.0) {
            return Err(Error::invalid(format!(
                "sim_floor must lie in (0, 1), got {}",
                self.sim_floor
            )));
        }
        if !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return Err(Error::invalid(format!(
                "diameter must be positive, got {}",
                self.diameter
            )));
        }
        Ok(())
    }
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::invalid("empty vector"));
    }
    Ok(())
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::invalid(
            "cosine kernel is undefined for a zero vector",
        ));
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Relevance of a candidate to the query, in `[sim_floor, 1]`.
pub fn compute_similarity(query: &[f64], candidate: &[f64], cfg: &KernelConfig) -> Result<f64> {
    cfg.validate()?;
    check_dims(query, candidate)?;
    let raw = match cfg.sim_kind {
        SimKind::ScaledDistance => 1.0 - euclidean(query, candidate) / cfg.diameter,
        SimKind::ScaledCosine => (1.0 + cosine(query, candidate)?) / 2.0,
    };
    Ok(raw.clamp(cfg.sim_floor, 1.0))
}

/// Distance between two candidates; symmetric and zero on coincident inputs.
pub fn compute_diversity(a: &[f64], b: &[f64], cfg: &KernelConfig) -> Result<f64> {
    check_dims(a, b)?;
    Ok(match cfg.div_kind {
        DivKind::Euclidean => euclidean(a, b),
        DivKind::CosineDistance => {
            // parallel vectors land within a few ulps of cos = 1
            let d = 1.0 - cosine(a, b)?;
            if d <= 4.0 * f64::EPSILON {
                0.0
            } else {
                d
            }
        }
    })
}

/// Builds the trade-off matrix `A[i][j] = (sim[i] sim[j])^(1-lambda) div[i][j]^lambda`.
///
/// Uses `t^0 = 1` for every `t >= 0`, so `lambda = 0` yields `sim sim'` and
/// `lambda = 1` yields `div`. Only the upper triangle is computed; the lower
/// one is mirrored so the result is bitwise symmetric.
pub fn build_matrix(sim: &[f64], div: &DMatrix<f64>, lambda: f64) -> DMatrix<f64> {
    let n = sim.len();
    let rel_exp = 1.0 - lambda;
    let pow = |base: f64, exp: f64| if exp == 0.0 { 1.0 } else { base.powf(exp) };
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = pow(sim[i] * sim[j], rel_exp) * pow(div[(i, j)], lambda);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

/// Per-query bundle of relevance, diversity, budget and the trade-off matrix.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    k: usize,
    lambda: f64,
    sim: Vec<f64>,
    div: DMatrix<f64>,
    a: DMatrix<f64>,
}

impl ProblemInstance {
    /// Validates the inputs and builds the trade-off matrix.
    pub fn new(sim: Vec<f64>, div: DMatrix<f64>, k: usize, lambda: f64) -> Result<Self> {
        let n = sim.len();
        if n == 0 {
            return Err(Error::invalid("empty candidate pool"));
        }
        if k == 0 || k > n {
            return Err(Error::invalid(format!("K must be in [1, {n}], got {k}")));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!(
                "lambda must be in [0, 1], got {lambda}"
            )));
        }
        if let Some(s) = sim.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return Err(Error::invalid(format!("relevance {s} outside (0, 1]")));
        }
        if div.nrows() != n || div.ncols() != n {
            return Err(Error::invalid(format!(
                "diversity matrix is {}x{}, expected {n}x{n}",
                div.nrows(),
                div.ncols()
            )));
        }
        for i in 0..n {
            if div[(i, i)] != 0.0 {
                return Err(Error::invalid(format!(
                    "diversity diagonal at {i} is nonzero"
                )));
            }
            for j in 0..n {
                let d = div[(i, j)];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(format!("diversity ({i},{j}) = {d}")));
                }
                if d != div[(j, i)] {
                    return Err(Error::invalid(format!(
                        "diversity not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let a = build_matrix(&sim, &div, lambda);
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric(
                "trade-off matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            k,
            lambda,
            sim,
            div,
            a,
        })
    }

    /// Scores a candidate pool against a query with the given kernels.
    pub fn from_vectors(
        query: &Query,
        pool: &[Candidate],
        k: usize,
        lambda: f64,
        kernel: &KernelConfig,
    ) -> Result<Self> {
        let (sim, div) = score_pool(query, pool, kernel)?;
        Self::new(sim, div, k, lambda)
    }

    /// Same relevance and diversity, different trade-off.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.sim.clone(), self.div.clone(), self.k, lambda)
    }

    /// Same relevance and diversity, different budget.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(self.sim.clone(), self.div.clone(), k, self.lambda)
    }

    pub fn n(&self) -> usize {
        self.sim.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sim(&self) -> &[f64] {
        &self.sim
    }

    pub fn div(&self) -> &DMatrix<f64> {
        &self.div
    }

    /// The trade-off matrix `A`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    fn check_indices(&self, indices: &[usize]) -> Result<()> {
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n() {
                return Err(Error::invalid(format!(
                    "index {i} out of range for n = {}",
                    self.n()
                )));
            }
            if !seen.insert(i) {
                return Err(Error::invalid(format!("duplicate index {i}")));
            }
        }
        Ok(())
    }

    // Both objectives sum in ascending index order so equal sets score bit-identically.

    /// `(1 - lambda) * sum sim[i] + lambda * sum_{i,j} div[i][j]` over ordered pairs of the set.
    pub fn objective_f(&self, indices: &[usize]) -> Result<f64> {
        self.check_indices(indices)?;
        let sorted = sorted(indices);
        let rel: f64 = sorted.iter().map(|&i| self.sim[i]).sum();
        let mut spread = 0.0;
        for &i in &sorted {
            for &j in &sorted {
                spread += self.div[(i, j)];
            }
        }
        Ok((1.0 - self.lambda) * rel + self.lambda * spread)
    }

    /// `x' A x` for the 0/1 indicator `x` of the set.
    pub fn objective_quadratic(&self, indices: &[usize]) -> Result<f64> {
        self.check_indices(indices)?;
        Ok(quadratic_unchecked(&self.a, &sorted(indices)))
    }

    /// Candidate indices by descending relevance, ties by smaller index.
    pub fn relevance_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| self.sim[b].total_cmp(&self.sim[a]).then(a.cmp(&b)));
        order
    }

    /// The `K` most relevant candidates, in relevance order.
    pub fn top_k_by_relevance(&self) -> Vec<usize> {
        let mut order = self.relevance_order();
        order.truncate(self.k);
        order
    }
}

fn sorted(indices: &[usize]) -> Vec<usize> {
    let mut v = indices.to_vec();
    v.sort_unstable();
    v
}

pub(crate) fn quadratic_unchecked(a: &DMatrix<f64>, indices: &[usize]) -> f64 {
    let mut total = 0.0;
    for &i in indices {
        for &j in indices {
            total += a[(i, j)];
        }
    }
    total
}

/// Relevance vector and diversity matrix of a pool against a query.
pub fn score_pool(
    query: &Query,
    pool: &[Candidate],
    kernel: &KernelConfig,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    kernel.validate()?;
    let n = pool.len();
    if n == 0 {
        return Err(Error::invalid("empty candidate pool"));
    }
    let d = query.vector.len();
    let mut ids = HashSet::with_capacity(n);
    for c in pool {
        if c.vector.len() != d {
            return Err(Error::invalid(format!(
                "candidate {} has dimension {}, query has {d}",
                c.id,
                c.vector.len()
            )));
        }
        if c.vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "candidate {} has non-finite entries",
                c.id
            )));
        }
        if !ids.insert(c.id.as_str()) {
            return Err(Error::invalid(format!("duplicate candidate id {}", c.id)));
        }
    }
    if query.vector.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("query has non-finite entries"));
    }
    let sim = pool
        .iter()
        .map(|c| compute_similarity(&query.vector, &c.vector, kernel))
        .collect::<Result<Vec<_>>>()?;
    let mut div = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = compute_diversity(&pool[i].vector, &pool[j].vector, kernel)?;
            div[(i, j)] = v;
            div[(j, i)] = v;
        }
    }
    Ok((sim, div))
}

/// A chosen `K`-subset together with both objective values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Selection {
    pub indices: Vec<usize>,
    pub objective_quadratic: f64,
    pub objective_f: f64,
}

impl Selection {
    /// Scores `indices` on `instance`; the set must have exactly `K` distinct members.
    pub fn evaluate(instance: &ProblemInstance, indices: Vec<usize>) -> Result<Self> {
        if indices.len() != instance.k() {
            return Err(Error::invalid(format!(
                "selection has {} members, K = {}",
                indices.len(),
                instance.k()
            )));
        }
        let objective_quadratic = instance.objective_quadratic(&indices)?;
        let objective_f = instance.objective_f(&indices)?;
        Ok(Self {
            indices,
            objective_quadratic,
            objective_f,
        })
    }

    /// The selected indices in ascending order.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }
}
