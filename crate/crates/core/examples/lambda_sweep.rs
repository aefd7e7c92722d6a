//! Full benchmark sweep on unit-disc pools: every solver against the
//! exhaustive optimum, lambda from 0 to 0.9.
//!
//! cargo run --release --example lambda_sweep -- [n_queries] [out_dir]

use diversify::bench::run::{run_benchmark, RunConfig};

fn main() -> diversify::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = RunConfig::default_unit_disc();
    if let Some(q) = args.next() {
        config.dataset.n_queries = q.parse().expect("n_queries must be an integer");
    }
    config.output_dir = args.next().unwrap_or_else(|| "bench-out".into()).into();
    config.record_runtime = true;

    let report = run_benchmark(&config)?;
    println!(
        "{:<8} {:>6} {:>10} {:>10} {:>10}",
        "algo", "lambda", "avg_gap", "precision", "ms"
    );
    for r in &report.rows {
        println!(
            "{:<8} {:>6.1} {:>10.5} {:>10.3} {:>10.3}",
            r.algorithm.name(),
            r.lambda,
            r.avg_gap,
            r.avg_precision,
            r.avg_runtime_ms
        );
    }
    println!("wrote {}", report.results_path.display());
    Ok(())
}
