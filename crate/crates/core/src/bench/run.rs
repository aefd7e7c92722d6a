//! λ-sweep orchestration over a batch of queries.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{generate_unit_disc, knn_retrieve, load_embeddings};
use super::report::{fmt_sig6, line_chart, Series};
use crate::error::{Error, Result};
use crate::eval::{
    evaluate_query, Algorithm, EvalConfig, MetricRow, ObjectiveKind, DEFAULT_ORACLE_BUDGET,
};
use crate::heuristics::HeuristicConfig;
use crate::problem::{score_pool, KernelConfig, ProblemInstance};
use crate::sdp::SdpSettings;

pub const RESULTS_HEADER: &str =
    "dataset,algorithm,lambda,K,n_queries,avg_gap,avg_precision,avg_runtime_ms,n_excluded";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DatasetKind {
    UnitDisc,
    EmbeddingFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n_candidates: usize,
    #[serde(default = "default_n_queries")]
    pub n_queries: usize,
    #[serde(default)]
    pub seed: u64,
    /// Corpus file (`EMBEDDING_FILE` only).
    #[serde(default)]
    pub path: Option<PathBuf>,
    /// File the queries are sampled from (`EMBEDDING_FILE` only).
    #[serde(default)]
    pub query_path: Option<PathBuf>,
    #[serde(default)]
    pub kernel: KernelConfig,
    /// Label for the `dataset` column; defaults to `unit-disc` or the corpus file stem.
    #[serde(default)]
    pub name: Option<String>,
}

fn default_n_queries() -> usize {
    100
}

impl DatasetSpec {
    pub fn unit_disc(n_candidates: usize, n_queries: usize, seed: u64) -> Self {
        Self {
            kind: DatasetKind::UnitDisc,
            n_candidates,
            n_queries,
            seed,
            path: None,
            query_path: None,
            kernel: KernelConfig::default(),
            name: None,
        }
    }

    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        match self.kind {
            DatasetKind::UnitDisc => "unit-disc".into(),
            DatasetKind::EmbeddingFile => self
                .path
                .as_deref()
                .and_then(Path::file_stem)
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "embeddings".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset: DatasetSpec,
    #[serde(rename = "K", alias = "k")]
    pub k: usize,
    pub lambdas: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub heuristic: HeuristicConfig,
    #[serde(default)]
    pub sdp: SdpSettings,
    #[serde(default)]
    pub objective_kind: ObjectiveKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_budget")]
    pub oracle_budget: u128,
    /// Wall-clock timings make `results.csv` vary between runs, so they are
    /// only recorded on request; otherwise runtimes are written as 0.
    #[serde(default)]
    pub record_runtime: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("bench-out")
}

fn default_budget() -> u128 {
    DEFAULT_ORACLE_BUDGET
}

impl RunConfig {
    /// n = 12, K = 3, 100 queries, lambda in {0, 0.1, ..., 0.9}, every solver.
    pub fn default_unit_disc() -> Self {
        Self {
            dataset: DatasetSpec::unit_disc(12, 100, 0),
            k: 3,
            lambdas: (0..10).map(|i| i as f64 / 10.0).collect(),
            algorithms: Algorithm::SOLVERS.to_vec(),
            heuristic: HeuristicConfig::default(),
            sdp: SdpSettings::default(),
            objective_kind: ObjectiveKind::Quadratic,
            output_dir: default_output_dir(),
            oracle_budget: DEFAULT_ORACLE_BUDGET,
            record_runtime: false,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        if d.n_candidates == 0 || d.n_queries == 0 {
            return Err(Error::invalid("n_candidates and n_queries must be >= 1"));
        }
        if self.k == 0 || self.k > d.n_candidates {
            return Err(Error::invalid(format!(
                "K must be in [1, {}], got {}",
                d.n_candidates, self.k
            )));
        }
        if self.lambdas.is_empty() {
            return Err(Error::invalid("lambdas must not be empty"));
        }
        if self.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::invalid("lambdas must lie in [0, 1]"));
        }
        if self.lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("lambdas must be strictly increasing"));
        }
        if self.algorithms.is_empty() {
            return Err(Error::invalid("no algorithms selected"));
        }
        let mut algs = self.algorithms.clone();
        algs.sort();
        algs.dedup();
        if algs.len() != self.algorithms.len() {
            return Err(Error::invalid("algorithms listed twice"));
        }
        if d.kind == DatasetKind::EmbeddingFile && (d.path.is_none() || d.query_path.is_none()) {
            return Err(Error::invalid(
                "EMBEDDING_FILE datasets need path and query_path",
            ));
        }
        d.kernel.validate()?;
        self.heuristic.validate()?;
        self.sdp.validate()
    }
}

/// One aggregated `(algorithm, lambda)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub lambda: f64,
    pub k: usize,
    pub n_queries: usize,
    pub avg_gap: f64,
    pub avg_precision: f64,
    pub avg_runtime_ms: f64,
    pub n_excluded: usize,
    /// l1 runs whose SDP stopped at the iteration cap.
    pub n_unconverged: usize,
}

/// One per-query measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RawRow {
    pub query: usize,
    pub metric: MetricRow,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    pub raw: Vec<RawRow>,
    pub chart_paths: Vec<PathBuf>,
    pub results_path: PathBuf,
    pub raw_path: PathBuf,
}

impl BenchReport {
    pub fn row(&self, algorithm: Algorithm, lambda: f64) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && r.lambda == lambda)
    }
}

/// Relevance and diversity of every query's pool, in query order.
fn build_pools(config: &RunConfig) -> Result<Vec<(Vec<f64>, DMatrix<f64>)>> {
    let d = &config.dataset;
    match d.kind {
        DatasetKind::UnitDisc => (0..d.n_queries)
            .map(|i| {
                let (q, pool) = generate_unit_disc(d.n_candidates, d.seed.wrapping_add(i as u64))?;
                score_pool(&q, &pool, &d.kernel)
            })
            .collect(),
        DatasetKind::EmbeddingFile => {
            let corpus = load_embeddings(d.path.as_ref().expect("validated"))?;
            let queries = load_embeddings(d.query_path.as_ref().expect("validated"))?;
            if d.n_queries > queries.len() {
                return Err(Error::invalid(format!(
                    "n_queries = {} but the query file has {} rows",
                    d.n_queries,
                    queries.len()
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(d.seed);
            let picks = rand::seq::index::sample(&mut rng, queries.len(), d.n_queries);
            picks
                .into_iter()
                .map(|qi| {
                    let q = &queries[qi];
                    let query = crate::problem::Query::new(q.id.clone(), q.vector.clone());
                    let pool = knn_retrieve(&query, &corpus, d.n_candidates)?;
                    score_pool(&query, &pool, &d.kernel)
                })
                .collect()
        }
    }
}

/// Runs the whole sweep and writes `results.csv`, `raw.csv`, `gap.svg` and
/// `precision.svg` into the output directory.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchReport> {
    config.validate()?;
    let pools = build_pools(config)?;

    let per_query: Vec<Vec<MetricRow>> = pools
        .par_iter()
        .enumerate()
        .map(|(qi, (sim, div))| {
            let mut eval = EvalConfig {
                objective_kind: config.objective_kind,
                heuristic: config.heuristic,
                sdp: config.sdp,
                oracle_budget: config.oracle_budget,
            };
            eval.heuristic.seed = config.heuristic.seed.wrapping_add(qi as u64);
            let base = ProblemInstance::new(sim.clone(), div.clone(), config.k, config.lambdas[0])?;
            let mut rows = Vec::new();
            for &lambda in &config.lambdas {
                let inst = base.with_lambda(lambda)?;
                rows.extend(evaluate_query(&inst, &config.algorithms, &eval)?);
            }
            if !config.record_runtime {
                for r in &mut rows {
                    r.runtime_ms = 0.0;
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;

    let raw: Vec<RawRow> = per_query
        .into_iter()
        .enumerate()
        .flat_map(|(query, rows)| rows.into_iter().map(move |metric| RawRow { query, metric }))
        .collect();

    let dataset = config.dataset.label();
    let mut algorithms = config.algorithms.clone();
    algorithms.sort();
    let mut rows = Vec::new();
    for &algorithm in &algorithms {
        for &lambda in &config.lambdas {
            let cell: Vec<&MetricRow> = raw
                .iter()
                .map(|r| &r.metric)
                .filter(|m| m.algorithm == algorithm && m.lambda == lambda)
                .collect();
            let kept: Vec<&&MetricRow> = cell.iter().filter(|m| !m.excluded()).collect();
            let count = kept.len() as f64;
            let mean = |f: &dyn Fn(&MetricRow) -> f64| {
                if kept.is_empty() {
                    f64::NAN
                } else {
                    kept.iter().map(|m| f(m)).sum::<f64>() / count
                }
            };
            rows.push(ReportRow {
                dataset: dataset.clone(),
                algorithm,
                lambda,
                k: config.k,
                n_queries: config.dataset.n_queries,
                avg_gap: mean(&|m| m.gap.expect("kept rows have a gap")),
                avg_precision: mean(&|m| m.precision),
                avg_runtime_ms: mean(&|m| m.runtime_ms),
                n_excluded: cell.len() - kept.len(),
                n_unconverged: cell.iter().filter(|m| !m.converged).count(),
            });
        }
    }

    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let results_path = out.join("results.csv");
    let raw_path = out.join("raw.csv");
    write_file(&results_path, &render_results(&rows))?;
    write_file(&raw_path, &render_raw(&dataset, &raw))?;

    let mut chart_paths = Vec::new();
    for (file, title, y_label, pick) in [
        (
            "gap.svg",
            "Average gap to the exhaustive optimum",
            "average gap (%)",
            (|r: &ReportRow| r.avg_gap * 100.0) as fn(&ReportRow) -> f64,
        ),
        (
            "precision.svg",
            "Average precision against the optimal set",
            "average precision",
            |r: &ReportRow| r.avg_precision,
        ),
    ] {
        let series: Vec<Series> = algorithms
            .iter()
            .map(|&a| Series {
                name: a.name().to_string(),
                points: rows
                    .iter()
                    .filter(|r| r.algorithm == a)
                    .map(|r| (r.lambda, pick(r)))
                    .collect(),
            })
            .collect();
        let path = out.join(file);
        write_file(&path, &line_chart(title, "lambda", y_label, &series))?;
        chart_paths.push(path);
    }

    Ok(BenchReport {
        rows,
        raw,
        chart_paths,
        results_path,
        raw_path,
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `results.csv` contents, header included.
pub fn render_results(rows: &[ReportRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.algorithm,
            fmt_sig6(r.lambda),
            r.k,
            r.n_queries,
            fmt_sig6(r.avg_gap),
            fmt_sig6(r.avg_precision),
            fmt_sig6(r.avg_runtime_ms),
            r.n_excluded
        );
    }
    s
}

/// `raw.csv` contents: one full-precision row per (query, lambda, algorithm).
pub fn render_raw(dataset: &str, raw: &[RawRow]) -> String {
    let mut s = String::from(
        "dataset,query,algorithm,lambda,gap,precision,runtime_ms,objective,excluded,converged\n",
    );
    for r in raw {
        let m = &r.metric;
        let gap = m.gap.map(|g| format!("{g:?}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{dataset},{},{},{:?},{gap},{:?},{:?},{:?},{},{}",
            r.query,
            m.algorithm,
            m.lambda,
            m.precision,
            m.runtime_ms,
            m.objective,
            m.excluded(),
            m.converged
        );
    }
    s
}
