//! Lifted valid inequalities for `{(w, x) : w <= f(a'x), 0 <= x <= mu, x integer}`
//! with `f` concave, plus the branch-and-cut machinery to use them.

pub mod bench;
pub mod concave_core;
pub mod cutgen;
pub mod lifting;
pub mod milp;
pub mod polyoracle;
pub mod seed;
pub mod separation;
pub mod subadditive_family;
