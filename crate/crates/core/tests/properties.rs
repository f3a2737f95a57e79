mod common;

use garbling::beliefs::{check_weighted_beliefs, coupling_to_weight, posteriors, verify_coupling};
use garbling::corpus::Generator;
use garbling::dynamics::{stopping_value, MarkovChain, StoppingProblem};
use garbling::experiment::{apply_weight, regularize, weight_check, Prior, Weight};
use garbling::numerics::{ratio, solve};
use garbling::order::{check_blackwell, check_weighted, min_size, reflexive, verify_certificate};
use garbling::value::{random_decision_problem, value, value_null};
use garbling::Rational;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regularize_is_idempotent_and_keeps_posteriors(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let exp = g.experiment(3, 4, 6);
        let reg = regularize(&exp);
        prop_assert_eq!(regularize(&reg), reg.clone());
        for _ in 0..3 {
            let prior = g.prior(3, 9);
            let before = posteriors(&exp, &prior).unwrap();
            let after = posteriors(&reg, &prior).unwrap();
            let mut a: Vec<_> = before.atoms.iter().map(|x| (x.belief.clone(), x.probability.clone())).collect();
            let mut b: Vec<_> = after.atoms.iter().map(|x| (x.belief.clone(), x.probability.clone())).collect();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn posteriors_average_to_prior(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let states = 2 + (seed % 3) as usize;
        let exp = g.experiment(states, 4, 12);
        let prior = g.prior(states, 12);
        let dist = posteriors(&exp, &prior).unwrap();
        prop_assert_eq!(dist.barycenter(), prior.weights().to_vec());
        let total: Rational = dist.probabilities().iter().sum();
        prop_assert_eq!(total, ratio(1, 1));
    }

    #[test]
    fn every_experiment_garbles_itself(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let exp = g.experiment(3, 3, 12);
        prop_assert!(verify_certificate(&reflexive(&exp)).is_valid());
        prop_assert!(check_blackwell(&exp, &exp).unwrap().is_some());
        let (size, cert) = min_size(&exp, &exp).unwrap().unwrap();
        prop_assert_eq!(size, ratio(1, 1));
        prop_assert!(cert.verify().is_valid());
    }

    #[test]
    fn solver_witnesses_match_vertex_oracle(seed in any::<u64>()) {
        let lp = common::random_lp(seed, true);
        let outcome = solve(&lp).unwrap();
        prop_assert!(outcome.verify(&lp));
        if let Err(e) = common::audit_lp(&lp, &outcome) {
            prop_assert!(false, "{}", e);
        }
    }

    #[test]
    fn certificates_yield_valid_weights(seed in any::<u64>()) {
        let pair = Generator::new(seed).pair();
        if let Some(cert) = check_weighted(&pair.garbled, &pair.reference).unwrap() {
            let gamma = cert.weight();
            prop_assert!(weight_check(&pair.reference, &gamma).unwrap());
            let weight = Weight::new(&pair.reference, gamma).unwrap();
            let weighted = apply_weight(&weight, &pair.reference).unwrap();
            prop_assert!(check_blackwell(&pair.garbled, &weighted).unwrap().is_some());
        }
    }

    #[test]
    fn coupling_weights_satisfy_identity(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let pair = g.pair();
        let prior = g.prior(pair.garbled.state_count(), 12);
        if let Some(coupling) = check_weighted_beliefs(&pair.garbled, &pair.reference, &prior).unwrap() {
            prop_assert!(verify_coupling(&coupling, &pair.garbled, &pair.reference, &prior).is_valid());
            let weight = coupling_to_weight(&coupling, &pair.reference, &prior).unwrap();
            prop_assert!(weight_check(&pair.reference, weight.values()).unwrap());
        }
    }

    #[test]
    fn order_depends_only_on_posterior_support(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let pair = g.pair();
        let states = pair.garbled.state_count();
        // Averaging a certificate's weight with the unit weight gives a
        // strictly positive weight, which keeps every posterior in play.
        let dil = garbling::experiment::dilute(&pair.reference, &ratio(2, 1)).unwrap();
        let cert = check_weighted(&pair.reference, &dil).unwrap().unwrap();
        let gamma: Vec<Rational> = cert.weight().iter().map(|x| (x + ratio(1, 1)) / ratio(2, 1)).collect();
        let weight = Weight::new(&dil, gamma).unwrap();
        let rescaled = apply_weight(&weight, &dil).unwrap();
        let prior = g.prior(states, 12);
        let before = check_weighted_beliefs(&pair.garbled, &dil, &prior).unwrap().is_some();
        let after = check_weighted_beliefs(&pair.garbled, &rescaled, &prior).unwrap().is_some();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn information_never_hurts(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let exp = g.experiment(3, 4, 12);
        let problem = random_decision_problem(seed, 3, 3, 12).unwrap();
        prop_assert!(value(&problem, &exp).unwrap().0 >= value_null(&problem));
    }

    #[test]
    fn waiting_longer_never_hurts(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let exp = g.experiment(2, 2, 6);
        let rows = vec![g.prior(2, 6).weights().to_vec(), g.prior(2, 6).weights().to_vec()];
        let chain = MarkovChain::from_rows(rows).unwrap();
        let problem = random_decision_problem(seed, 2, 2, 6).unwrap();
        let game = StoppingProblem::new(problem, chain, 0).unwrap();
        let mut previous = stopping_value(&game, &exp).unwrap();
        for t in 1..=5 {
            let v = stopping_value(&game.with_horizon(t), &exp).unwrap();
            prop_assert!(v >= previous);
            previous = v;
        }
    }
}

#[test]
fn full_support_priors_are_required() {
    let prior = Prior::new(vec![ratio(1, 1), ratio(0, 1)]).unwrap();
    let exp = garbling::experiment::Experiment::uninformative(2);
    assert!(check_weighted_beliefs(&exp, &exp, &prior).is_err());
}
