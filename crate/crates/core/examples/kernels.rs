//! Relevance and diversity kernels, and the trade-off matrix they induce.
//!
//! cargo run --example kernels

use diversify::problem::{compute_diversity, compute_similarity, DivKind, SimKind};
use diversify::{Candidate, KernelConfig, ProblemInstance, Query};

fn main() -> diversify::Result<()> {
    let query = Query::new("q", vec![0.0, 0.0]);
    let pool = vec![
        Candidate::new("near", vec![0.1, 0.0]),
        Candidate::new("near-twin", vec![0.12, 0.01]),
        Candidate::new("mid", vec![-0.4, 0.3]),
        Candidate::new("far", vec![0.0, -0.9]),
    ];

    let kernel = KernelConfig::default();
    println!("relevance (scaled distance, diameter {}):", kernel.diameter);
    for c in &pool {
        println!(
            "  {:<10} {:.4}",
            c.id,
            compute_similarity(&query.vector, &c.vector, &kernel)?
        );
    }

    let cosine = KernelConfig {
        sim_kind: SimKind::ScaledCosine,
        div_kind: DivKind::CosineDistance,
        ..KernelConfig::default()
    };
    println!(
        "cosine distance near/mid: {:.4}",
        compute_diversity(&pool[0].vector, &pool[2].vector, &cosine)?
    );

    for lambda in [0.0, 0.5, 1.0] {
        let inst = ProblemInstance::from_vectors(&query, &pool, 2, lambda, &kernel)?;
        println!("\nlambda = {lambda}, A =");
        for i in 0..inst.n() {
            let row: Vec<String> = (0..inst.n())
                .map(|j| format!("{:7.4}", inst.matrix()[(i, j)]))
                .collect();
            println!("  {}", row.join(" "));
        }
        for pair in [[0, 1], [0, 3]] {
            println!(
                "  {{{}, {}}}: x'Ax = {:.4}, F = {:.4}",
                pool[pair[0]].id,
                pool[pair[1]].id,
                inst.objective_quadratic(&pair)?,
                inst.objective_f(&pair)?
            );
        }
    }
    Ok(())
}
