//! Power iteration and the l2 (spectral) relaxation.
//!
//! cargo run --example spectral

use diversify::bench::data::generate_unit_disc;
use diversify::linalg::{leading_eigenpair, symmetric_eigendecomposition, DEFAULT_EIGEN_TOL};
use diversify::relax_l2::{round_topk, solve_l2};
use diversify::{KernelConfig, ProblemInstance};
use nalgebra::DMatrix;

fn main() -> diversify::Result<()> {
    let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
    let pair = leading_eigenpair(&m, DEFAULT_EIGEN_TOL, 1000)?;
    println!(
        "[[2,1],[1,2]]: lambda = {:.12}, v = ({:.6}, {:.6}), {} iterations",
        pair.value, pair.vector[0], pair.vector[1], pair.iterations
    );

    let (query, pool) = generate_unit_disc(12, 42)?;
    let inst = ProblemInstance::from_vectors(&query, &pool, 3, 0.6, &KernelConfig::default())?;
    let full = symmetric_eigendecomposition(inst.matrix())?;
    let l2 = solve_l2(&inst)?;
    println!("\nunit disc, n = 12, K = 3, lambda = 0.6");
    println!("  power iteration  {:.10}", l2.eigenvalue);
    println!(
        "  full spectrum    {:.10} (next {:.4})",
        full.values[0], full.values[1]
    );
    println!(
        "  upper bound K*lambda_max = {:.6}",
        l2.relaxation.relaxed_value
    );
    println!("  clamped K*x'Ax           = {:.6}", l2.clamped_value);

    let x: Vec<String> = l2
        .relaxation
        .x_star
        .iter()
        .map(|v| format!("{v:.3}"))
        .collect();
    println!("  x* = [{}]", x.join(", "));
    let sel = round_topk(&l2.relaxation.x_star, &inst)?;
    let ids: Vec<&str> = sel.indices.iter().map(|&i| pool[i].id.as_str()).collect();
    println!("  rounded: {ids:?}, x'Ax = {:.6}", sel.objective_quadratic);
    Ok(())
}
