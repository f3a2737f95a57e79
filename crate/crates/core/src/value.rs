//! Decision-problem values and the payoff guarantee of weighted garbling.
//!
//! If Π is a weighted garbling of Π′ with size β, then for every decision
//! problem A
//!
//! V^A(Π′) ≥ (1/β)V^A(Π) + (1 − 1/β)V^A(∅),
//!
//! and conversely a violating A exists whenever the dilution of Π by β is
//! not a Blackwell garbling of Π′.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::{
    dilute, residual_experiment, DecisionProblem, Experiment, PolicyTable, Prior, Weight,
};
use crate::numerics::Rational;
use crate::order::{decide_blackwell, Garbling, GarblingCertificate};
use crate::{Error, Result};

fn ensure_states(problem: &DecisionProblem, experiment: &Experiment) -> Result<()> {
    if problem.state_count() != experiment.state_count() {
        return Err(Error::Mismatch(format!(
            "decision problem over {} states, experiment over {}",
            problem.state_count(),
            experiment.state_count()
        )));
    }
    Ok(())
}

/// π(s|θ)μ₀(θ) for every θ.
fn joint_column(problem: &DecisionProblem, experiment: &Experiment, signal: usize) -> Vec<Rational> {
    problem
        .prior()
        .weights()
        .iter()
        .enumerate()
        .map(|(theta, mu)| experiment.prob(theta, signal) * mu)
        .collect()
}

/// V^A(Π) = ∑_s max_a ∑_θ u(a,θ)π(s|θ)μ₀(θ), with the maximizing action
/// per signal (ties to the lowest index).
pub fn value(problem: &DecisionProblem, experiment: &Experiment) -> Result<(Rational, PolicyTable)> {
    ensure_states(problem, experiment)?;
    let mut total = Rational::zero();
    let mut policy = Vec::with_capacity(experiment.signal_count());
    for s in 0..experiment.signal_count() {
        let (action, payoff) = problem.best_response(&joint_column(problem, experiment, s));
        total += payoff;
        policy.push(action);
    }
    Ok((total, PolicyTable(policy)))
}

/// V^A(∅) = max_a ∑_θ u(a,θ)μ₀(θ).
pub fn value_null(problem: &DecisionProblem) -> Rational {
    problem.best_response(problem.prior().weights()).1
}

/// U^A(σ; Π) for a deterministic strategy.
pub fn policy_payoff(
    problem: &DecisionProblem,
    experiment: &Experiment,
    policy: &PolicyTable,
) -> Result<Rational> {
    ensure_states(problem, experiment)?;
    if policy.len() != experiment.signal_count() {
        return Err(Error::Dimension("policy length differs from signal count".into()));
    }
    if policy.0.iter().any(|&a| a >= problem.action_count()) {
        return Err(Error::Dimension("policy names an unknown action".into()));
    }
    Ok((0..experiment.signal_count())
        .map(|s| problem.expected_payoff(policy.action(s), &joint_column(problem, experiment, s)))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub reference_value: Rational,
    pub garbled_value: Rational,
    pub null_value: Rational,
    pub beta: Rational,
    /// V(Π′) − [(1/β)V(Π) + (1 − 1/β)V(∅)].
    pub slack: Rational,
    pub holds: bool,
}

/// Evaluates both sides of the payoff guarantee exactly.
pub fn verify_bound(
    problem: &DecisionProblem,
    pi: &Experiment,
    reference: &Experiment,
    beta: &Rational,
) -> Result<BoundReport> {
    if *beta < Rational::one() {
        return Err(Error::SizeBelowOne(beta.clone()));
    }
    let (reference_value, _) = value(problem, reference)?;
    let (garbled_value, _) = value(problem, pi)?;
    let null_value = value_null(problem);
    let keep = beta.recip();
    let rhs = &keep * &garbled_value + (Rational::one() - &keep) * &null_value;
    let slack = &reference_value - rhs;
    Ok(BoundReport {
        holds: !slack.is_negative(),
        reference_value,
        garbled_value,
        null_value,
        beta: beta.clone(),
        slack,
    })
}

/// Builds a decision problem violating the payoff guarantee at β, or
/// returns `None` when the dilution of Π by β is a Blackwell garbling of
/// Π′ (in which case no violation exists).
///
/// Actions are the signals of the diluted experiment. With the Farkas
/// multipliers w(s,θ) of the garbling program and a uniform prior,
/// u(s,θ) = |Θ|·w(s,θ) makes "report the signal" on the diluted
/// experiment strictly better than anything achievable from Π′.
pub fn falsify_bound(
    pi: &Experiment,
    reference: &Experiment,
    beta: &Rational,
) -> Result<Option<DecisionProblem>> {
    let diluted = dilute(pi, beta)?;
    let refutation = match decide_blackwell(&diluted, reference)? {
        Garbling::Certified(_) => return Ok(None),
        Garbling::Refuted(r) => r,
    };
    let states = pi.state_count();
    let scale = Rational::from_integer((states as i64).into());
    let raw: Vec<Vec<Rational>> = refutation
        .identity
        .iter()
        .map(|row| row.iter().map(|w| w * &scale).collect())
        .collect();
    let largest = raw
        .iter()
        .flatten()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero);
    if largest.is_zero() {
        return Err(Error::Internal("refutation has no payoff content".into()));
    }
    let payoffs = raw
        .iter()
        .map(|row| row.iter().map(|u| u / &largest).collect())
        .collect();
    let problem = DecisionProblem::new(
        diluted.signals().to_vec(),
        payoffs,
        Prior::uniform(states),
    )?;
    let report = verify_bound(&problem, pi, reference, beta)?;
    if report.holds {
        return Err(Error::Internal(format!(
            "constructed decision problem does not violate the bound (slack {})",
            report.slack
        )));
    }
    Ok(Some(problem))
}

fn random_rational(rng: &mut ChaCha8Rng, denominator_bound: u64) -> Rational {
    let d = rng.gen_range(1..=denominator_bound.max(1)) as i64;
    let n = rng.gen_range(-d..=d);
    Rational::new(n.into(), d.into())
}

/// A seeded decision problem with payoffs in [−1, 1] whose denominators
/// are at most `denominator_bound`, and a full-support prior.
pub fn random_decision_problem(
    seed: u64,
    states: usize,
    actions: usize,
    denominator_bound: u64,
) -> Result<DecisionProblem> {
    if states == 0 || actions == 0 {
        return Err(Error::Empty("decision problem"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payoffs = (0..actions)
        .map(|_| {
            (0..states)
                .map(|_| random_rational(&mut rng, denominator_bound))
                .collect()
        })
        .collect();
    let masses: Vec<i64> = (0..states)
        .map(|_| rng.gen_range(1..=denominator_bound.max(1) as i64))
        .collect();
    let total: i64 = masses.iter().sum();
    let prior = Prior::new(
        masses
            .iter()
            .map(|&m| Rational::new(m.into(), total.into()))
            .collect(),
    )?;
    DecisionProblem::from_payoffs(payoffs, prior)
}

/// The payoff of the mixed strategy on Π′ that imitates σ on Π with
/// probability γ(s′)/γ̄ and plays σ′ otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedPayoff {
    /// U^A(σ̄; Π′), computed directly.
    pub direct: Rational,
    /// U^A(σ; Π).
    pub garbled: Rational,
    /// U^A(σ′; Π̃′(γ)).
    pub residual: Rational,
    /// (1/γ̄)U^A(σ; Π) + (1 − 1/γ̄)U^A(σ′; Π̃′(γ)).
    pub decomposed: Rational,
}

impl MixedPayoff {
    pub fn identity_holds(&self) -> bool {
        self.direct == self.decomposed
    }
}

pub fn mixed_strategy_payoff(
    problem: &DecisionProblem,
    cert: &GarblingCertificate,
    policy: &PolicyTable,
    residual_policy: &PolicyTable,
) -> Result<MixedPayoff> {
    let check = cert.verify();
    if !check.is_valid() {
        return Err(Error::InvalidCertificate(check.violations.join("; ")));
    }
    let pi = cert.garbled();
    let reference = cert.reference();
    let size = cert.size();
    if size.is_one() {
        return Err(Error::DegenerateWeight);
    }
    let gamma = cert.weight();
    let kernel = cert.kernel();
    let weight = Weight::new(reference, gamma.clone())?;
    let residual = residual_experiment(reference, &weight)?;
    let garbled = policy_payoff(problem, pi, policy)?;
    let residual_value = policy_payoff(problem, &residual, residual_policy)?;

    let mut direct = Rational::zero();
    for sp in 0..reference.signal_count() {
        let column = joint_column(problem, reference, sp);
        let imitate = &gamma[sp] / &size;
        let imitated: Rational = (0..pi.signal_count())
            .map(|s| &kernel[sp][s] * problem.expected_payoff(policy.action(s), &column))
            .sum();
        let fallback = problem.expected_payoff(residual_policy.action(sp), &column);
        direct += &imitate * imitated + (Rational::one() - &imitate) * fallback;
    }
    let keep = size.recip();
    let decomposed = &keep * &garbled + (Rational::one() - &keep) * &residual_value;
    Ok(MixedPayoff {
        direct,
        garbled,
        residual: residual_value,
        decomposed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;
    use crate::order::min_size;

    fn matching() -> DecisionProblem {
        DecisionProblem::matching(Prior::uniform(2))
    }

    #[test]
    fn matching_values() {
        let bsc = Experiment::binary_symmetric(ratio(4, 5)).unwrap();
        assert_eq!(value(&matching(), &bsc).unwrap().0, ratio(4, 5));
        assert_eq!(value(&matching(), &bsc).unwrap().1, PolicyTable(vec![0, 1]));
        assert_eq!(value(&matching(), &Experiment::uninformative(2)).unwrap().0, ratio(1, 2));
        let ex1 = Experiment::with_null_signal(ratio(9, 10)).unwrap();
        assert_eq!(value(&matching(), &ex1).unwrap().0, ratio(7, 10));
    }

    #[test]
    fn null_values() {
        assert_eq!(value_null(&matching()), ratio(1, 2));
        let constant = DecisionProblem::from_payoffs(
            vec![vec![ratio(1, 3), ratio(1, 3)]],
            Prior::new(vec![ratio(1, 4), ratio(3, 4)]).unwrap(),
        )
        .unwrap();
        assert_eq!(value_null(&constant), ratio(1, 3));
        let single =
            DecisionProblem::from_payoffs(vec![vec![ratio(1, 2), ratio(-3, 2)]], Prior::uniform(2))
                .unwrap();
        assert_eq!(value_null(&single), ratio(-1, 2));
    }

    #[test]
    fn tight_bound() {
        let pi = Experiment::binary_symmetric(ratio(4, 5)).unwrap();
        let reference = Experiment::with_null_signal(ratio(9, 10)).unwrap();
        let report = verify_bound(&matching(), &pi, &reference, &ratio(3, 2)).unwrap();
        assert_eq!(report.reference_value, ratio(7, 10));
        assert!(report.slack.is_zero());
        assert!(report.holds);
    }

    #[test]
    fn blackwell_bound_and_failure() {
        let pi = Experiment::binary_symmetric(ratio(3, 5)).unwrap();
        let reference = Experiment::with_null_signal(ratio(4, 5)).unwrap();
        let report = verify_bound(&matching(), &pi, &reference, &ratio(1, 1)).unwrap();
        // Signal-wise maxima on the reference: 1/4, 1/5, 1/5.
        assert_eq!((report.reference_value, report.garbled_value), (ratio(13, 20), ratio(3, 5)));
        assert!(report.holds);

        let report = verify_bound(
            &matching(),
            &Experiment::perfectly_informative(2),
            &Experiment::uninformative(2),
            &ratio(2, 1),
        )
        .unwrap();
        assert_eq!(report.slack, ratio(-1, 4));
        assert!(!report.holds);
        assert!(verify_bound(&matching(), &pi, &pi, &ratio(1, 2)).is_err());
    }

    #[test]
    fn falsifier() {
        let pi = Experiment::binary_symmetric(ratio(4, 5)).unwrap();
        let reference = Experiment::with_null_signal(ratio(9, 10)).unwrap();
        assert!(falsify_bound(&pi, &reference, &ratio(3, 2)).unwrap().is_none());
        assert!(falsify_bound(&pi, &reference, &ratio(2, 1)).unwrap().is_none());
        assert!(falsify_bound(&pi, &reference, &ratio(5, 4)).unwrap().is_some());

        let perfect = Experiment::perfectly_informative(2);
        let blind = Experiment::uninformative(2);
        for beta in [ratio(1, 1), ratio(10, 1)] {
            let problem = falsify_bound(&perfect, &blind, &beta).unwrap().unwrap();
            assert!(problem.max_abs_payoff() <= ratio(1, 1));
            assert!(!verify_bound(&problem, &perfect, &blind, &beta).unwrap().holds);
        }
    }

    #[test]
    fn generator_is_deterministic_and_bounded() {
        let a = random_decision_problem(7, 3, 4, 12).unwrap();
        assert_eq!(a, random_decision_problem(7, 3, 4, 12).unwrap());
        for seed in 0..100 {
            let p = random_decision_problem(seed, 3, 3, 12).unwrap();
            assert!(p.max_abs_payoff() <= ratio(1, 1));
            assert!(p.prior().is_full_support());
        }
    }

    #[test]
    fn mixed_strategy_on_tight_instance() {
        let pi = Experiment::binary_symmetric(ratio(4, 5)).unwrap();
        let reference = Experiment::with_null_signal(ratio(9, 10)).unwrap();
        let (_, cert) = min_size(&pi, &reference).unwrap().unwrap();
        let weight = Weight::new(&reference, cert.weight()).unwrap();
        let residual = residual_experiment(&reference, &weight).unwrap();
        let (_, sigma) = value(&matching(), &pi).unwrap();
        let (_, sigma_r) = value(&matching(), &residual).unwrap();
        let mixed = mixed_strategy_payoff(&matching(), &cert, &sigma, &sigma_r).unwrap();
        assert!(mixed.identity_holds());
        assert_eq!(mixed.direct, ratio(7, 10));

        let constant = mixed_strategy_payoff(
            &matching(),
            &cert,
            &PolicyTable::constant(2, 1),
            &PolicyTable::constant(3, 1),
        )
        .unwrap();
        assert_eq!(constant.direct, ratio(1, 2));
        assert!(constant.identity_holds());
    }
}
