//! The semidefinite (l1) relaxation: solver diagnostics, certificate and rounding.
//!
//! cargo run --release --example sdp

use diversify::bench::data::generate_unit_disc;
use diversify::eval::{exhaustive_optimum, DEFAULT_ORACLE_BUDGET};
use diversify::{solve_l1, solve_sdp, KernelConfig, ObjectiveKind, ProblemInstance, SdpSettings};
use nalgebra::DMatrix;

fn main() -> diversify::Result<()> {
    let settings = SdpSettings::default();

    let diag = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0]);
    let sol = solve_sdp(&diag, &settings)?;
    println!(
        "diag(3, 1): objective {:.7}, dual bound {:.7}, t = ({:.5}, {:.5})",
        sol.objective, sol.dual_bound, sol.t[0], sol.t[1]
    );

    let (query, pool) = generate_unit_disc(12, 7)?;
    let inst = ProblemInstance::from_vectors(&query, &pool, 3, 0.7, &KernelConfig::default())?;
    let out = solve_l1(&inst, &settings)?;
    let f = out.sdp.feasibility();
    println!("\nunit disc, n = 12, K = 3, lambda = 0.7");
    println!(
        "  {} iterations, converged = {}, residuals {:.1e} / {:.1e}",
        out.sdp.iterations, out.sdp.converged, out.sdp.primal_residual, out.sdp.dual_residual
    );
    println!(
        "  feasibility: min eig X {:.1e}, min eig Diag(t)-X {:.1e}, sum t {:.9}",
        f.min_eig_x, f.min_eig_slack, f.budget
    );
    println!(
        "  SDP objective {:.6}, dual bound {:.6}",
        out.sdp.objective, out.sdp.dual_bound
    );

    let opt = exhaustive_optimum(&inst, ObjectiveKind::Quadratic, DEFAULT_ORACLE_BUDGET)?;
    let k2 = 9.0;
    println!(
        "  K^2 * [objective, dual bound] = [{:.6}, {:.6}] vs optimum {:.6}",
        k2 * out.sdp.objective,
        out.relaxation.relaxed_value,
        opt.value
    );
    let ids: Vec<&str> = out
        .selection
        .indices
        .iter()
        .map(|&i| pool[i].id.as_str())
        .collect();
    println!(
        "  l1 picks {ids:?} worth {:.6}",
        out.selection.objective_quadratic
    );
    Ok(())
}
