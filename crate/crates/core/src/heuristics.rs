//! Greedy and swap-based diversification baselines.
//!
//! All five work directly on a [`ProblemInstance`] and always return exactly
//! `K` distinct indices. MMR, Motley and Bswap reason in terms of relevance
//! and raw pairwise diversity; GMC and GNE use marginal gains of the
//! quadratic objective `x' A x`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{ProblemInstance, Selection};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeuristicConfig {
    /// Minimum diversity to every accepted item. `None` means
    /// `0.1 * mean pairwise diversity` of the instance.
    pub motley_theta: Option<f64>,
    /// Largest relevance drop a swap may cause. `None` means
    /// `0.1 * max relevance` of the instance.
    pub bswap_theta: Option<f64>,
    /// GNE restarts.
    pub gne_imax: usize,
    /// GNE restricted candidate list length.
    pub gne_r: usize,
    pub seed: u64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self {
            motley_theta: None,
            bswap_theta: None,
            gne_imax: 50,
            gne_r: 3,
            seed: 0,
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gne_imax == 0 || self.gne_r == 0 {
            return Err(Error::invalid("gne_imax and gne_r must be >= 1"));
        }
        for theta in [self.motley_theta, self.bswap_theta].into_iter().flatten() {
            if theta.is_nan() || theta < 0.0 {
                return Err(Error::invalid(format!(
                    "threshold must be >= 0, got {theta}"
                )));
            }
        }
        Ok(())
    }

    pub fn motley_theta_for(&self, instance: &ProblemInstance) -> f64 {
        self.motley_theta.unwrap_or_else(|| {
            let n = instance.n();
            if n < 2 {
                return 0.0;
            }
            let div = instance.div();
            let mut total = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    total += div[(i, j)];
                }
            }
            0.1 * total / (n * (n - 1) / 2) as f64
        })
    }

    pub fn bswap_theta_for(&self, instance: &ProblemInstance) -> f64 {
        self.bswap_theta.unwrap_or_else(|| {
            0.1 * instance
                .sim()
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }
}

/// Maximal marginal relevance with a distance-form redundancy term:
/// after the most relevant item, repeatedly add the item maximizing
/// `(1 - lambda) * sim[u] + lambda * min_{j in S} div[u][j]`.
pub fn mmr(instance: &ProblemInstance) -> Result<Selection> {
    let n = instance.n();
    let sim = instance.sim();
    let div = instance.div();
    let lambda = instance.lambda();

    let mut picked = vec![false; n];
    let mut nearest = vec![f64::INFINITY; n];
    let mut chosen = Vec::with_capacity(instance.k());
    let mut next = instance.relevance_order()[0];
    loop {
        picked[next] = true;
        chosen.push(next);
        if chosen.len() == instance.k() {
            break;
        }
        for v in 0..n {
            nearest[v] = nearest[v].min(div[(next, v)]);
        }
        let mut best: Option<(usize, f64)> = None;
        for u in (0..n).filter(|&u| !picked[u]) {
            let score = (1.0 - lambda) * sim[u] + lambda * nearest[u];
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((u, score));
            }
        }
        next = best.expect("fewer than K candidates left").0;
    }
    Selection::evaluate(instance, chosen)
}

/// Relevance-ordered scan accepting items whose diversity to everything
/// already accepted exceeds the threshold; underfull results are topped up
/// with the most relevant rejected items.
pub fn motley(instance: &ProblemInstance, cfg: &HeuristicConfig) -> Result<Selection> {
    let theta = cfg.motley_theta_for(instance);
    let div = instance.div();
    let k = instance.k();
    let mut accepted: Vec<usize> = Vec::with_capacity(k);
    let mut rejected = Vec::new();
    for u in instance.relevance_order() {
        if accepted.len() == k {
            break;
        }
        let nearest = accepted
            .iter()
            .map(|&j| div[(u, j)])
            .fold(f64::INFINITY, f64::min);
        if nearest > theta {
            accepted.push(u);
        } else {
            rejected.push(u);
        }
    }
    let missing = k - accepted.len();
    accepted.extend(rejected.into_iter().take(missing));
    Selection::evaluate(instance, accepted)
}

/// Bswap plus the number of swaps it performed.
pub fn bswap_counted(
    instance: &ProblemInstance,
    cfg: &HeuristicConfig,
) -> Result<(Selection, usize)> {
    let theta = cfg.bswap_theta_for(instance);
    let n = instance.n();
    let sim = instance.sim();
    let div = instance.div();
    let mut set = instance.top_k_by_relevance();
    let mut inside = vec![false; n];
    for &i in &set {
        inside[i] = true;
    }

    let mut swaps = 0;
    loop {
        let contribution = |i: usize, set: &[usize]| set.iter().map(|&j| div[(i, j)]).sum::<f64>();

        // weakest member: smallest diversity to the rest, ties by smaller index
        let mut out_pos = 0;
        let mut out_score = f64::INFINITY;
        for (pos, &i) in set.iter().enumerate() {
            let c = contribution(i, &set);
            if c < out_score || c == out_score && i < set[out_pos] {
                out_pos = pos;
                out_score = c;
            }
        }
        let d_out = set[out_pos];

        // strongest outsider against the remaining members
        let mut best_in: Option<(usize, f64)> = None;
        for u in (0..n).filter(|&u| !inside[u]) {
            let score: f64 = set
                .iter()
                .filter(|&&j| j != d_out)
                .map(|&j| div[(u, j)])
                .sum();
            if best_in.is_none_or(|(_, b)| score > b) {
                best_in = Some((u, score));
            }
        }
        let Some((c_in, in_score)) = best_in else {
            break;
        };

        let gains_diversity = in_score > out_score;
        let within_budget = sim[d_out] - sim[c_in] <= theta;
        if !(gains_diversity && within_budget) {
            break;
        }
        set[out_pos] = c_in;
        inside[d_out] = false;
        inside[c_in] = true;
        swaps += 1;
    }
    Ok((Selection::evaluate(instance, set)?, swaps))
}

/// Starts from the `K` most relevant items and swaps the least diverse member
/// for the most diverse outsider while total diversity strictly grows and
/// the relevance drop stays within the threshold.
pub fn bswap(instance: &ProblemInstance, cfg: &HeuristicConfig) -> Result<Selection> {
    bswap_counted(instance, cfg).map(|(s, _)| s)
}

/// Marginal gain of adding `u` to a set whose row sums over `A` are `row_sum`.
fn gain(instance: &ProblemInstance, row_sum: &[f64], u: usize) -> f64 {
    instance.matrix()[(u, u)] + 2.0 * row_sum[u]
}

/// Outsiders sorted by gain, then relevance, then index.
fn ranked_outsiders(instance: &ProblemInstance, inside: &[bool], row_sum: &[f64]) -> Vec<usize> {
    let sim = instance.sim();
    let mut cand: Vec<(usize, f64)> = (0..instance.n())
        .filter(|&u| !inside[u])
        .map(|u| (u, gain(instance, row_sum, u)))
        .collect();
    cand.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then(sim[b.0].total_cmp(&sim[a.0]))
            .then(a.0.cmp(&b.0))
    });
    cand.into_iter().map(|(u, _)| u).collect()
}

fn construct(instance: &ProblemInstance, pick: &mut impl FnMut(&[usize]) -> usize) -> Vec<usize> {
    let n = instance.n();
    let a = instance.matrix();
    let mut inside = vec![false; n];
    let mut row_sum = vec![0.0; n];
    let mut set = Vec::with_capacity(instance.k());
    while set.len() < instance.k() {
        let ranked = ranked_outsiders(instance, &inside, &row_sum);
        let u = ranked[pick(&ranked)];
        inside[u] = true;
        set.push(u);
        for v in 0..n {
            row_sum[v] += a[(v, u)];
        }
    }
    set
}

/// Greedy marginal contribution on `x' A x`.
pub fn gmc(instance: &ProblemInstance) -> Result<Selection> {
    let set = construct(instance, &mut |_| 0);
    Selection::evaluate(instance, set)
}

/// Best-improvement single swaps until no swap raises `x' A x`.
fn local_search(instance: &ProblemInstance, set: &mut [usize]) {
    let n = instance.n();
    let a = instance.matrix();
    let mut inside = vec![false; n];
    for &i in set.iter() {
        inside[i] = true;
    }
    loop {
        let mut row_sum = vec![0.0; n];
        for &j in set.iter() {
            for v in 0..n {
                row_sum[v] += a[(v, j)];
            }
        }
        let current: f64 = set.iter().map(|&i| row_sum[i]).sum();
        let mut best: Option<(usize, usize, f64)> = None;
        for (pos, &i) in set.iter().enumerate() {
            let leave = 2.0 * row_sum[i] - a[(i, i)];
            for u in (0..n).filter(|&u| !inside[u]) {
                let enter = a[(u, u)] + 2.0 * (row_sum[u] - a[(u, i)]);
                let delta = enter - leave;
                if best.is_none_or(|(_, _, b)| delta > b) {
                    best = Some((pos, u, delta));
                }
            }
        }
        match best {
            Some((pos, u, delta)) if delta > 1e-12 * (1.0 + current.abs()) => {
                inside[set[pos]] = false;
                inside[u] = true;
                set[pos] = u;
            }
            _ => return,
        }
    }
}

/// GRASP with swap neighbourhood: `gne_imax` randomized greedy constructions
/// (uniform pick among the `gne_r` best gains) each polished by local search.
pub fn gne(instance: &ProblemInstance, cfg: &HeuristicConfig) -> Result<Selection> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<Selection> = None;
    for _ in 0..cfg.gne_imax {
        let mut set = construct(instance, &mut |ranked: &[usize]| {
            rng.random_range(0..cfg.gne_r.min(ranked.len()))
        });
        local_search(instance, &mut set);
        let sel = Selection::evaluate(instance, set)?;
        if best
            .as_ref()
            .is_none_or(|b| sel.objective_quadratic > b.objective_quadratic)
        {
            best = Some(sel);
        }
    }
    Ok(best.expect("gne_imax >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn line_instance(pos: &[f64], k: usize, lambda: f64) -> ProblemInstance {
        let n = pos.len();
        let sim = pos.iter().map(|p| 1.0 - p.abs() / 2.0).collect();
        let div = DMatrix::from_fn(n, n, |i, j| (pos[i] - pos[j]).abs());
        ProblemInstance::new(sim, div, k, lambda).unwrap()
    }

    #[test]
    fn mmr_prefers_the_distant_item() {
        let div = DMatrix::from_row_slice(3, 3, &[0.0, 0.1, 0.9, 0.1, 0.0, 0.5, 0.9, 0.5, 0.0]);
        let inst = ProblemInstance::new(vec![0.9, 0.8, 0.7], div, 2, 0.8).unwrap();
        assert_eq!(mmr(&inst).unwrap().indices, vec![0, 2]);
    }

    #[test]
    fn k_one_is_most_relevant_everywhere() {
        let inst = line_instance(&[0.4, -0.1, 0.7, 0.3], 1, 0.6);
        let cfg = HeuristicConfig::default();
        assert_eq!(mmr(&inst).unwrap().indices, vec![1]);
        assert_eq!(motley(&inst, &cfg).unwrap().indices, vec![1]);
        assert_eq!(bswap(&inst, &cfg).unwrap().indices, vec![1]);
    }

    #[test]
    fn gmc_tie_on_the_diagonal_goes_to_relevance() {
        let div = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 4.0, 1.0, 0.0, 2.0, 4.0, 2.0, 0.0]);
        let inst = ProblemInstance::new(vec![0.3, 0.2, 0.1], div, 2, 1.0).unwrap();
        assert_eq!(gmc(&inst).unwrap().indices, vec![0, 2]);
        assert_eq!(gmc(&inst).unwrap().objective_quadratic, 8.0);
    }

    #[test]
    fn motley_degenerate_thresholds() {
        let inst = line_instance(&[0.4, -0.1, 0.7, 0.3, -0.5], 3, 0.5);
        let top = inst.top_k_by_relevance();
        let zero = HeuristicConfig {
            motley_theta: Some(0.0),
            ..Default::default()
        };
        assert_eq!(motley(&inst, &zero).unwrap().indices, top);
        let huge = HeuristicConfig {
            motley_theta: Some(100.0),
            ..Default::default()
        };
        assert_eq!(motley(&inst, &huge).unwrap().indices, top);
    }

    #[test]
    fn bswap_zero_threshold_keeps_top_k() {
        let inst = line_instance(&[0.4, -0.1, 0.7, 0.3, -0.5], 2, 0.5);
        let cfg = HeuristicConfig {
            bswap_theta: Some(0.0),
            ..Default::default()
        };
        let (sel, swaps) = bswap_counted(&inst, &cfg).unwrap();
        assert_eq!(swaps, 0);
        assert_eq!(sel.indices, inst.top_k_by_relevance());
    }

    #[test]
    fn bswap_unbounded_reaches_the_widest_pair() {
        let pos = [0.1, -0.12, 0.9, -0.95];
        let inst = line_instance(&pos, 2, 0.5);
        let cfg = HeuristicConfig {
            bswap_theta: Some(f64::INFINITY),
            ..Default::default()
        };
        let mut widest = (0, 1);
        for i in 0..4 {
            for j in (i + 1)..4 {
                if inst.div()[(i, j)] > inst.div()[widest] {
                    widest = (i, j);
                }
            }
        }
        assert_eq!(widest, (2, 3));
        assert_eq!(bswap(&inst, &cfg).unwrap().sorted_indices(), vec![2, 3]);
    }

    #[test]
    fn gne_with_single_choice_dominates_gmc() {
        let inst = line_instance(&[0.4, -0.1, 0.7, 0.3, -0.5, 0.05, -0.8], 3, 0.7);
        let cfg = HeuristicConfig {
            gne_r: 1,
            gne_imax: 1,
            ..Default::default()
        };
        let g = gmc(&inst).unwrap();
        assert!(gne(&inst, &cfg).unwrap().objective_quadratic >= g.objective_quadratic);
    }

    #[test]
    fn default_thresholds() {
        let inst = line_instance(&[0.0, 0.5, 1.0], 1, 0.5);
        let cfg = HeuristicConfig::default();
        // pairwise distances 0.5, 1, 0.5
        assert!((cfg.motley_theta_for(&inst) - 0.1 * 2.0 / 3.0).abs() < 1e-15);
        assert!((cfg.bswap_theta_for(&inst) - 0.1).abs() < 1e-15);
        let bad = HeuristicConfig {
            gne_r: 0,
            ..Default::default()
        };
        assert!(gne(&inst, &bad).is_err());
    }
}
