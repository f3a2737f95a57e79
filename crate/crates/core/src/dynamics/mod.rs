//! Hidden-Markov dynamics: the state moves by a Markov chain ρ each
//! period and the decision maker observes a signal from Π about the new
//! state.
//!
//! Belief updates, belief sets and stopping values are exact. The only
//! floating-point quantities are distances used as convergence criteria
//! for the reachable-set iteration and the merging horizon.

mod belief_set;
mod chain;
mod merging;
mod stopping;

pub use belief_set::BeliefSet;
pub use chain::{next_signal_probability, update, MarkovChain};
pub use merging::{merging_horizon, MergingReport};
pub use stopping::{
    counterexample, stopping_value, Counterexample, StoppingProblem, COUNTEREXAMPLE_HORIZONS,
};

use crate::experiment::{Experiment, Prior};
use crate::{Error, Result};

/// The hull of all one-step updates from the extreme points of `set`.
///
/// Every (extreme point, signal) pair must have positive probability;
/// a zero normalizer is reported as an error.
pub fn eta_step(chain: &MarkovChain, experiment: &Experiment, set: &BeliefSet) -> Result<BeliefSet> {
    chain.ensure_matches(experiment)?;
    let mut images = Vec::with_capacity(set.points().len() * experiment.signal_count());
    for point in set.points() {
        for s in 0..experiment.signal_count() {
            images.push(update(chain, experiment, point, s)?);
        }
    }
    BeliefSet::new(images)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaLimit {
    pub set: BeliefSet,
    /// The index n of the returned iterate.
    pub iterations: usize,
    /// Hausdorff distance between the returned iterate and the next one.
    pub gap: f64,
    pub converged: bool,
}

/// Iterates [`eta_step`] from the full simplex. Returns the first iterate
/// X_n whose successor is within `tol` (or equal when `tol` is zero);
/// the sequence is nested, so X_n contains the limit set.
pub fn eta_limit(
    chain: &MarkovChain,
    experiment: &Experiment,
    tol: f64,
    max_iter: usize,
) -> Result<EtaLimit> {
    let states = experiment.state_count();
    if states > 3 {
        return Err(Error::Precondition(format!(
            "reachable-set iteration supports at most 3 states, got {states}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::Precondition("max_iter must be positive".into()));
    }
    let mut current = eta_step(chain, experiment, &BeliefSet::simplex(states))?;
    let mut gap = f64::INFINITY;
    for n in 1..=max_iter {
        let next = eta_step(chain, experiment, &current)?;
        gap = if next == current { 0.0 } else { current.hausdorff(&next)? };
        if gap == 0.0 || gap < tol {
            return Ok(EtaLimit {
                set: current,
                iterations: n,
                gap,
                converged: true,
            });
        }
        current = next;
    }
    Ok(EtaLimit {
        set: current,
        iterations: max_iter,
        gap,
        converged: false,
    })
}

/// Whether every one-step posterior from `prior` lies within `tol` (in
/// Euclidean distance) of `eta`. Signals of probability zero are skipped.
pub fn regular_prior_check(
    chain: &MarkovChain,
    experiment: &Experiment,
    prior: &Prior,
    eta: &BeliefSet,
    tol: f64,
) -> Result<bool> {
    use num_traits::Zero;
    for s in 0..experiment.signal_count() {
        if next_signal_probability(chain, experiment, prior.weights(), s).is_zero() {
            continue;
        }
        let posterior = update(chain, experiment, prior.weights(), s)?;
        if eta.distance(&posterior)? > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
