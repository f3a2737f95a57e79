//! Exact comparison of finite statistical experiments.
//!
//! The crate decides and certifies order relations between experiments
//! (Blackwell garbling, weighted garbling, conditional informativeness),
//! evaluates decision problems and value-of-information bounds, and runs
//! finite-horizon stopping problems over hidden Markov states.
//!
//! Everything outside [`dynamics`] is exact: probabilities, payoffs and
//! certificates are [`Rational`]s and every check is an equality of
//! rationals.
//!
//! Module map:
//!
//! * [`numerics`]: rationals and a dense two-phase simplex with Farkas
//!   certificates.
//! * [`experiment`]: experiments, priors, weights, decision problems and
//!   the single-experiment constructions (weighting, dilution, residual,
//!   regularization).
//! * [`order`]: Blackwell and weighted-garbling checks, size intervals,
//!   certificate mixing and composition, conditional informativeness.
//! * [`beliefs`]: posterior distributions, hull membership and the
//!   belief-based order test.
//! * [`value`]: decision-problem values, the payoff-guarantee bound and
//!   its falsifier.
//! * [`dynamics`]: hidden-Markov belief updates, reachable belief sets,
//!   belief merging and optimal stopping.
//! * [`corpus`]: seeded generators used by the test batteries.

pub mod beliefs;
pub mod corpus;
pub mod dynamics;
mod error;
pub mod experiment;
pub mod numerics;
pub mod order;
pub mod value;

pub use error::{Error, Result};
pub use numerics::{parse_rational, Rational};
