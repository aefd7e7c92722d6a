//! Exhaustive oracle, gap and precision, and per-query evaluation of every
//! selector against the oracle.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{bswap, gmc, gne, mmr, motley, HeuristicConfig};
use crate::problem::{ProblemInstance, Selection};
use crate::relax_l2::select_l2;
use crate::sdp::{solve_l1, SdpSettings};

pub const DEFAULT_ORACLE_BUDGET: u128 = 2_000_000;

/// Which set objective the oracle maximizes and gaps are measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObjectiveKind {
    /// `x' A x`
    #[default]
    Quadratic,
    /// Linear relevance plus ordered-pair diversity.
    F,
}

impl ObjectiveKind {
    pub fn of(self, sel: &Selection) -> f64 {
        match self {
            ObjectiveKind::Quadratic => sel.objective_quadratic,
            ObjectiveKind::F => sel.objective_f,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub selection: Selection,
    pub value: f64,
    pub objective_kind: ObjectiveKind,
    pub subsets_enumerated: u128,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Best `K`-subset by full enumeration in lexicographic order; ties keep the
/// lexicographically smallest subset.
pub fn exhaustive_optimum(
    instance: &ProblemInstance,
    kind: ObjectiveKind,
    budget: u128,
) -> Result<OracleResult> {
    let (n, k) = (instance.n(), instance.k());
    let subsets = binomial(n, k);
    if subsets > budget {
        return Err(Error::OracleBudget { subsets, budget });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut count: u128 = 0;
    for subset in (0..n).combinations(k) {
        count += 1;
        let value = match kind {
            ObjectiveKind::Quadratic => instance.objective_quadratic(&subset)?,
            ObjectiveKind::F => instance.objective_f(&subset)?,
        };
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((subset, value));
        }
    }
    let (indices, value) = best.expect("at least one subset");
    Ok(OracleResult {
        selection: Selection::evaluate(instance, indices)?,
        value,
        objective_kind: kind,
        subsets_enumerated: count,
    })
}

/// `|algo - opt| / opt`.
pub fn gap(value_algo: f64, value_opt: f64) -> Result<f64> {
    if value_opt.is_nan() || value_opt <= 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "gap needs a positive optimum, got {value_opt}"
        )));
    }
    Ok((value_algo - value_opt).abs() / value_opt)
}

/// Fraction of the optimal set recovered.
pub fn precision(s_algo: &[usize], s_opt: &[usize]) -> Result<f64> {
    if s_opt.is_empty() {
        return Err(Error::UndefinedMetric(
            "precision against an empty set".into(),
        ));
    }
    let hits = s_algo.iter().filter(|i| s_opt.contains(i)).count();
    Ok(hits as f64 / s_opt.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    L1,
    L2,
    Mmr,
    Motley,
    Bswap,
    Gmc,
    Gne,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::L1,
        Algorithm::L2,
        Algorithm::Mmr,
        Algorithm::Motley,
        Algorithm::Bswap,
        Algorithm::Gmc,
        Algorithm::Gne,
        Algorithm::Oracle,
    ];

    /// Every selector except the oracle.
    pub const SOLVERS: [Algorithm; 7] = [
        Algorithm::L1,
        Algorithm::L2,
        Algorithm::Mmr,
        Algorithm::Motley,
        Algorithm::Bswap,
        Algorithm::Gmc,
        Algorithm::Gne,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::L1 => "l1",
            Algorithm::L2 => "l2",
            Algorithm::Mmr => "mmr",
            Algorithm::Motley => "motley",
            Algorithm::Bswap => "bswap",
            Algorithm::Gmc => "gmc",
            Algorithm::Gne => "gne",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm {s:?}")))
    }
}

/// Knobs shared by every selector during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub objective_kind: ObjectiveKind,
    pub heuristic: HeuristicConfig,
    pub sdp: SdpSettings,
    pub oracle_budget: u128,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            objective_kind: ObjectiveKind::default(),
            heuristic: HeuristicConfig::default(),
            sdp: SdpSettings::default(),
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

/// One selector's output on one instance.
#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub selection: Selection,
    /// `false` only for an l1 run whose SDP hit its iteration cap.
    pub converged: bool,
}

pub fn run_algorithm(
    algorithm: Algorithm,
    instance: &ProblemInstance,
    cfg: &EvalConfig,
) -> Result<AlgorithmRun> {
    let plain = |selection| AlgorithmRun {
        selection,
        converged: true,
    };
    Ok(match algorithm {
        Algorithm::L1 => {
            let out = solve_l1(instance, &cfg.sdp)?;
            AlgorithmRun {
                converged: out.sdp.converged,
                selection: out.selection,
            }
        }
        Algorithm::L2 => plain(select_l2(instance)?),
        Algorithm::Mmr => plain(mmr(instance)?),
        Algorithm::Motley => plain(motley(instance, &cfg.heuristic)?),
        Algorithm::Bswap => plain(bswap(instance, &cfg.heuristic)?),
        Algorithm::Gmc => plain(gmc(instance)?),
        Algorithm::Gne => plain(gne(instance, &cfg.heuristic)?),
        Algorithm::Oracle => {
            plain(exhaustive_optimum(instance, cfg.objective_kind, cfg.oracle_budget)?.selection)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub algorithm: Algorithm,
    pub lambda: f64,
    /// `None` when the optimum is not positive; such rows are left out of averages.
    pub gap: Option<f64>,
    pub precision: f64,
    pub runtime_ms: f64,
    pub objective: f64,
    pub converged: bool,
}

impl MetricRow {
    pub fn excluded(&self) -> bool {
        self.gap.is_none()
    }
}

/// Runs the oracle once and every requested algorithm against it.
pub fn evaluate_query(
    instance: &ProblemInstance,
    algorithms: &[Algorithm],
    cfg: &EvalConfig,
) -> Result<Vec<MetricRow>> {
    let start = Instant::now();
    let oracle = exhaustive_optimum(instance, cfg.objective_kind, cfg.oracle_budget)?;
    let oracle_ms = start.elapsed().as_secs_f64() * 1e3;
    let optimal = oracle.selection.sorted_indices();

    let mut rows = Vec::with_capacity(algorithms.len());
    for &algorithm in algorithms {
        let (run, runtime_ms) = if algorithm == Algorithm::Oracle {
            let run = AlgorithmRun {
                selection: oracle.selection.clone(),
                converged: true,
            };
            (run, oracle_ms)
        } else {
            let start = Instant::now();
            let run = run_algorithm(algorithm, instance, cfg)?;
            (run, start.elapsed().as_secs_f64() * 1e3)
        };
        let objective = cfg.objective_kind.of(&run.selection);
        rows.push(MetricRow {
            algorithm,
            lambda: instance.lambda(),
            gap: gap(objective, oracle.value).ok(),
            precision: precision(&run.selection.indices, &optimal)?,
            runtime_ms,
            objective,
            converged: run.converged,
        });
    }
    Ok(rows)
}
