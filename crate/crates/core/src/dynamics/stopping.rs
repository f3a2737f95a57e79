use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use super::chain::{next_signal_probability, update};
use super::MarkovChain;
use crate::beliefs::{decide_weighted_beliefs, posteriors, BeliefOrder};
use crate::experiment::{Belief, DecisionProblem, Experiment, Prior};
use crate::numerics::Rational;
use crate::{Error, Result};

/// Largest signal tree, in leaves, that backward induction will expand.
const MAX_LEAVES: u128 = 1 << 20;

/// A decision problem played over `horizon` periods of a hidden Markov
/// state. Each period the decision maker either stops and takes an
/// action at the current belief, or waits: the state moves by ρ and a
/// fresh signal arrives. At the horizon an action must be taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoppingProblem {
    problem: DecisionProblem,
    chain: MarkovChain,
    horizon: usize,
}

impl StoppingProblem {
    pub fn new(problem: DecisionProblem, chain: MarkovChain, horizon: usize) -> Result<Self> {
        if problem.state_count() != chain.state_count() {
            return Err(Error::Mismatch(format!(
                "decision problem over {} states, chain over {}",
                problem.state_count(),
                chain.state_count()
            )));
        }
        let largest = problem.max_abs_payoff();
        if largest > Rational::one() {
            return Err(Error::PayoffOutOfRange(largest));
        }
        Ok(StoppingProblem {
            problem,
            chain,
            horizon,
        })
    }

    pub fn problem(&self) -> &DecisionProblem {
        &self.problem
    }

    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: usize) -> Self {
        StoppingProblem {
            horizon,
            ..self.clone()
        }
    }
}

struct Induction<'a> {
    problem: &'a DecisionProblem,
    chain: &'a MarkovChain,
    experiment: &'a Experiment,
    horizon: usize,
    memo: HashMap<(usize, Belief), Rational>,
}

impl Induction<'_> {
    fn stop(&self, belief: &[Rational]) -> Rational {
        self.problem.best_response(belief).1
    }

    fn value(&mut self, period: usize, belief: Belief) -> Result<Rational> {
        let stop = self.stop(&belief);
        if period == self.horizon {
            return Ok(stop);
        }
        let key = (period, belief);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let belief = &key.1;
        let mut wait = Rational::zero();
        for s in 0..self.experiment.signal_count() {
            let p = next_signal_probability(self.chain, self.experiment, belief, s);
            if p.is_zero() {
                continue;
            }
            let next = update(self.chain, self.experiment, belief, s)?;
            wait += p * self.value(period + 1, next)?;
        }
        let best = if wait > stop { wait } else { stop };
        self.memo.insert(key, best.clone());
        Ok(best)
    }
}

/// The optimal expected payoff from the prior of the decision problem,
/// by exact backward induction over the signal tree.
pub fn stopping_value(stopping: &StoppingProblem, experiment: &Experiment) -> Result<Rational> {
    stopping.chain.ensure_matches(experiment)?;
    let signals = experiment.signal_count();
    let leaves = u32::try_from(stopping.horizon)
        .ok()
        .and_then(|t| (signals as u128).checked_pow(t));
    if leaves.is_none_or(|l| l > MAX_LEAVES) {
        return Err(Error::TreeTooLarge {
            horizon: stopping.horizon,
            signals,
        });
    }
    let mut induction = Induction {
        problem: &stopping.problem,
        chain: &stopping.chain,
        experiment,
        horizon: stopping.horizon,
        memo: HashMap::new(),
    };
    induction.value(0, stopping.problem.prior().weights().to_vec())
}

/// A stopping problem on which Π earns strictly more than Π′.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub problem: DecisionProblem,
    pub chain: MarkovChain,
    /// A signal of Π whose posterior lies outside the hull of the
    /// posteriors of Π′.
    pub signal: usize,
    pub belief: Belief,
    /// h with h·μ′ < c < h·μ_s for every posterior μ′ of Π′.
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

/// Horizons at which a counterexample is checked before it is returned.
pub const COUNTEREXAMPLE_HORIZONS: [usize; 4] = [1, 2, 3, 4];

/// When Π is not a weighted garbling of Π′, builds a stopping problem
/// with i.i.d. states drawn from `prior` on which Π is strictly better at
/// every horizon.
///
/// The action set is a risky action with payoff h(θ) − c, positive at the
/// separated posterior and negative at every posterior of Π′, and a safe
/// action paying −δ with δ half the expected gain of waiting for the
/// separated signal. Every belief reachable under Π′ lies in the hull of
/// its posteriors, where both actions pay less than zero; under Π waiting
/// one period and acting on the separated signal already earns more than
/// zero. Payoffs are then scaled into [−1, 1].
pub fn counterexample(
    pi: &Experiment,
    reference: &Experiment,
    prior: &Prior,
) -> Result<Option<Counterexample>> {
    let (atom, belief, normal) = match decide_weighted_beliefs(pi, reference, prior)? {
        BeliefOrder::Coupled(_) => return Ok(None),
        BeliefOrder::Separated {
            atom,
            belief,
            normal,
            ..
        } => (atom, belief, normal),
    };
    let dot = |a: &[Rational], b: &[Rational]| -> Rational { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let source = posteriors(pi, prior)?;
    let target = posteriors(reference, prior)?;
    let highest = target
        .atoms
        .iter()
        .map(|a| dot(&normal, &a.belief))
        .max()
        .ok_or_else(|| Error::Internal("reference has no posteriors".into()))?;
    let peak = dot(&normal, &belief);
    let offset = (&highest + &peak) / Rational::from_integer(2.into());
    let risky: Vec<Rational> = normal.iter().map(|h| h - &offset).collect();
    let gain = &source.atoms[atom].probability * (&peak - &offset);
    let safe = -(gain / Rational::from_integer(2.into()));
    let largest = risky
        .iter()
        .chain(std::iter::once(&safe))
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    if largest.is_zero() {
        return Err(Error::Internal("separating functional vanished".into()));
    }
    let payoffs = vec![
        risky.iter().map(|u| u / &largest).collect(),
        vec![&safe / &largest; risky.len()],
    ];
    let problem = DecisionProblem::new(vec!["risky".into(), "safe".into()], payoffs, prior.clone())?;
    let chain = MarkovChain::iid(prior.weights())?;
    for horizon in COUNTEREXAMPLE_HORIZONS {
        let stopping = StoppingProblem::new(problem.clone(), chain.clone(), horizon)?;
        let better = stopping_value(&stopping, pi)?;
        let worse = stopping_value(&stopping, reference)?;
        if better <= worse {
            return Err(Error::Internal(format!(
                "counterexample fails at horizon {horizon}: {better} <= {worse}"
            )));
        }
    }
    let signal = source.atoms[atom].signals[0];
    Ok(Some(Counterexample {
        problem,
        chain,
        signal,
        belief,
        normal,
        offset,
    }))
}
