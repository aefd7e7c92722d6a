//! Embedding-file workflow: write a corpus, read it back, retrieve a pool by
//! exact kNN and run a small benchmark over sampled queries.
//!
//! cargo run --release --example embedding_file -- [work_dir]

use std::path::PathBuf;

use diversify::bench::data::{knn_retrieve, load_embeddings, write_embeddings};
use diversify::bench::run::{run_benchmark, DatasetKind, DatasetSpec, RunConfig};
use diversify::problem::{DivKind, SimKind};
use diversify::{select_l2, Algorithm, Candidate, KernelConfig, ProblemInstance, Query};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rows(rng: &mut ChaCha8Rng, prefix: &str, n: usize, dim: usize) -> Vec<Candidate> {
    (0..n)
        .map(|i| {
            let v = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            Candidate::new(format!("{prefix}{i:04}"), v)
        })
        .collect()
}

fn main() -> diversify::Result<()> {
    let dir: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "embedding-demo".into())
        .into();
    std::fs::create_dir_all(&dir).expect("create work dir");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let corpus_path = dir.join("corpus.csv");
    let query_path = dir.join("queries.csv");
    write_embeddings(&corpus_path, &random_rows(&mut rng, "doc", 400, 16))?;
    write_embeddings(&query_path, &random_rows(&mut rng, "q", 20, 16))?;

    let corpus = load_embeddings(&corpus_path)?;
    let q = &load_embeddings(&query_path)?[0];
    let query = Query::new(q.id.clone(), q.vector.clone());
    let pool = knn_retrieve(&query, &corpus, 12)?;
    let kernel = KernelConfig {
        sim_kind: SimKind::ScaledCosine,
        div_kind: DivKind::CosineDistance,
        ..KernelConfig::default()
    };
    let inst = ProblemInstance::from_vectors(&query, &pool, 3, 0.5, &kernel)?;
    let sel = select_l2(&inst)?;
    let ids: Vec<&str> = sel.indices.iter().map(|&i| pool[i].id.as_str()).collect();
    println!(
        "{}: 12 nearest of {}, l2 keeps {ids:?}",
        query.id,
        corpus.len()
    );

    let config = RunConfig {
        dataset: DatasetSpec {
            kind: DatasetKind::EmbeddingFile,
            n_candidates: 12,
            n_queries: 10,
            seed: 9,
            path: Some(corpus_path),
            query_path: Some(query_path),
            kernel,
            name: None,
        },
        k: 3,
        lambdas: vec![0.2, 0.5, 0.8],
        algorithms: vec![Algorithm::L1, Algorithm::L2, Algorithm::Mmr, Algorithm::Gne],
        output_dir: dir.join("out"),
        ..RunConfig::default_unit_disc()
    };
    let report = run_benchmark(&config)?;
    print!(
        "{}",
        std::fs::read_to_string(&report.results_path).expect("results written")
    );
    Ok(())
}
