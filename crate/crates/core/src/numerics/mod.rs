//! Exact arithmetic and linear programming.
//!
//! No tolerances live here: every comparison is an exact comparison of
//! rationals, and every solver outcome carries a witness that can be
//! re-checked independently of the pivoting path that produced it.

mod rational;
mod simplex;

pub use rational::{parse_rational, rational_to_f64, ratio, Rational};
pub use simplex::{
    solve, Constraint, FarkasCertificate, LinearProgram, LpOutcome, OptimalSolution, Ray,
    Relation, Sense,
};
