//! LP-based branch-and-cut for models with concave rows `w <= f(a'x)`.

pub mod model;
pub mod problems;
pub mod simplex;

pub use model::{LinRow, LpModel, ModelError, Sense};
pub use simplex::{solve_lp, solve_lp_bounded, LpError, LpSolution};
pub mod bnc;
pub use bnc::{
    branch_and_cut, build_eum, build_problem, build_wta, oa_cut, solve_problem, ConcaveMilp, ConcaveRow,
    SolveConfig, SolveError, SolveStats, SolveStatus,
};
