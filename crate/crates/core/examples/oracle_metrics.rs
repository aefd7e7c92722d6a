//! Exhaustive optimum, gap and precision for every selector on one query.
//!
//! cargo run --release --example oracle_metrics

use diversify::bench::data::generate_unit_disc;
use diversify::eval::{binomial, gap, precision};
use diversify::{
    evaluate_query, exhaustive_optimum, Algorithm, EvalConfig, KernelConfig, ObjectiveKind,
    ProblemInstance,
};

fn main() -> diversify::Result<()> {
    let (query, pool) = generate_unit_disc(12, 5)?;
    let inst = ProblemInstance::from_vectors(&query, &pool, 3, 0.5, &KernelConfig::default())?;
    let cfg = EvalConfig::default();

    let opt = exhaustive_optimum(&inst, ObjectiveKind::Quadratic, cfg.oracle_budget)?;
    println!(
        "optimum {:.6} over {} subsets (C(12,3) = {}), set {:?}",
        opt.value,
        opt.subsets_enumerated,
        binomial(12, 3),
        opt.selection.sorted_indices()
    );
    println!(
        "gap(v, v) = {}, precision(S, S) = {}",
        gap(1.5, 1.5)?,
        precision(&[0, 1, 2], &[2, 1, 0])?
    );

    println!(
        "\n{:<8} {:>10} {:>8} {:>10}",
        "algo", "objective", "gap", "precision"
    );
    for row in evaluate_query(&inst, &Algorithm::ALL, &cfg)? {
        let g = row.gap.map_or("n/a".to_string(), |g| format!("{g:.4}"));
        println!(
            "{:<8} {:>10.6} {:>8} {:>10.3}",
            row.algorithm.name(),
            row.objective,
            g,
            row.precision
        );
    }

    let big = ProblemInstance::new(vec![0.5; 60], nalgebra::DMatrix::zeros(60, 60), 10, 0.5)?;
    match exhaustive_optimum(&big, ObjectiveKind::Quadratic, cfg.oracle_budget) {
        Err(e) => println!("\nn = 60, K = 10: {e} (exit code {})", e.exit_code()),
        Ok(_) => unreachable!("C(60,10) is far over budget"),
    }
    Ok(())
}
