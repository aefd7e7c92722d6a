//! The baseline selectors side by side on one pool, across lambda.
//!
//! cargo run --example heuristics

use diversify::bench::data::generate_unit_disc;
use diversify::heuristics::{bswap_counted, gmc, gne, mmr, motley};
use diversify::{HeuristicConfig, KernelConfig, ProblemInstance};

fn main() -> diversify::Result<()> {
    let (query, pool) = generate_unit_disc(30, 11)?;
    let base = ProblemInstance::from_vectors(&query, &pool, 4, 0.0, &KernelConfig::default())?;
    let cfg = HeuristicConfig::default();

    println!("n = 30, K = 4; quadratic objective per selector");
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "lambda", "mmr", "motley", "bswap", "gmc", "gne", "swaps"
    );
    for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let inst = base.with_lambda(lambda)?;
        let (b, swaps) = bswap_counted(&inst, &cfg)?;
        println!(
            "{lambda:>6.2} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {swaps:>6}",
            mmr(&inst)?.objective_quadratic,
            motley(&inst, &cfg)?.objective_quadratic,
            b.objective_quadratic,
            gmc(&inst)?.objective_quadratic,
            gne(&inst, &cfg)?.objective_quadratic,
        );
    }

    let inst = base.with_lambda(0.5)?;
    println!(
        "\nlambda = 0.5 default thresholds: motley {:.4}, bswap {:.4}",
        cfg.motley_theta_for(&inst),
        cfg.bswap_theta_for(&inst)
    );
    let strict = HeuristicConfig {
        motley_theta: Some(0.8),
        ..cfg
    };
    let ids: Vec<&str> = motley(&inst, &strict)?
        .indices
        .iter()
        .map(|&i| pool[i].id.as_str())
        .collect();
    println!("motley with theta 0.8 picks {ids:?}");
    Ok(())
}
