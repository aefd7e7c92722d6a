pub mod bench;
pub mod error;
pub mod eval;
pub mod heuristics;
pub mod linalg;
pub mod problem;
pub mod relax_l2;
pub mod sdp;

pub use error::{Error, Result};
pub use eval::{
    evaluate_query, exhaustive_optimum, Algorithm, EvalConfig, MetricRow, ObjectiveKind,
};
pub use heuristics::HeuristicConfig;
pub use problem::{Candidate, KernelConfig, ProblemInstance, Query, Selection};
pub use relax_l2::{select_l2, solve_l2};
pub use sdp::{solve_l1, solve_sdp, SdpSettings};
