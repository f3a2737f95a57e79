//! Experiments, priors, weights and decision problems.
//!
//! An [`Experiment`] is a row-stochastic matrix indexed by state (rows)
//! and signal (columns). States and signals are identified by position;
//! the string labels are carried along for reporting.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::numerics::Rational;
use crate::{Error, Result};

/// A belief or prior written as a probability vector over states.
pub type Belief = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Experiment {
    states: Vec<String>,
    signals: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl Experiment {
    /// Validates a labelled table: entries nonnegative, rows summing to
    /// exactly one.
    pub fn new(states: Vec<String>, signals: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("state set"));
        }
        if signals.is_empty() {
            return Err(Error::Empty("signal set"));
        }
        if rows.len() != states.len() {
            return Err(Error::Dimension(format!(
                "{} rows for {} states",
                rows.len(),
                states.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            check_distribution(i, row, signals.len())?;
        }
        Ok(Experiment {
            states,
            signals,
            rows,
        })
    }

    /// Validates an unlabelled table; states become `t1, t2, …` and
    /// signals `s1, s2, …`.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        Experiment::new(
            default_labels("t", rows.len()),
            default_labels("s", width),
            rows,
        )
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn signals(&self) -> &[String] {
        &self.signals
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn signal_count(&self) -> usize {
        self.signals.len()
    }

    /// π(s|θ).
    pub fn prob(&self, state: usize, signal: usize) -> &Rational {
        &self.rows[state][signal]
    }

    pub fn column(&self, signal: usize) -> Vec<Rational> {
        self.rows.iter().map(|row| row[signal].clone()).collect()
    }

    /// Probability of `signal` under `prior`: ∑_θ π(s|θ)μ(θ).
    pub fn signal_probability(&self, prior: &[Rational], signal: usize) -> Rational {
        self.rows
            .iter()
            .zip(prior)
            .map(|(row, p)| &row[signal] * p)
            .sum()
    }

    pub fn ensure_same_states(&self, other: &Experiment) -> Result<()> {
        if self.state_count() != other.state_count() {
            return Err(Error::Mismatch(format!(
                "{} states versus {} states",
                self.state_count(),
                other.state_count()
            )));
        }
        Ok(())
    }

    /// True if every entry is strictly positive.
    pub fn has_full_support(&self) -> bool {
        self.rows.iter().flatten().all(Rational::is_positive)
    }

    /// Columns that are zero in every state.
    pub fn null_signals(&self) -> Vec<usize> {
        (0..self.signal_count())
            .filter(|&s| self.rows.iter().all(|row| row[s].is_zero()))
            .collect()
    }

    /// The experiment with one state-independent signal.
    pub fn uninformative(states: usize) -> Self {
        Experiment::from_rows(vec![vec![Rational::one()]; states]).expect("valid")
    }

    /// The identity matrix: the signal reveals the state.
    pub fn perfectly_informative(states: usize) -> Self {
        let rows = (0..states)
            .map(|i| {
                (0..states)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Experiment::from_rows(rows).expect("valid")
    }

    /// Two states, two signals, `π(s_i|θ_i) = q`.
    pub fn binary_symmetric(q: Rational) -> Result<Self> {
        let p = Rational::one() - &q;
        Experiment::from_rows(vec![vec![q.clone(), p.clone()], vec![p, q]])
    }

    /// The three-signal experiment with a null signal `s0` reached with
    /// probability one half in both states and, otherwise, a symmetric
    /// binary signal of accuracy `q`. Signals are ordered `(s0, s1, s2)`.
    pub fn with_null_signal(q: Rational) -> Result<Self> {
        let half = Rational::new(1.into(), 2.into());
        let hi = &half * &q;
        let lo = &half * (Rational::one() - &q);
        Experiment::new(
            default_labels("t", 2),
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![
                vec![half.clone(), hi.clone(), lo.clone()],
                vec![half, lo, hi],
            ],
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (label, row) in self.states.iter().zip(&self.rows) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{label}: [{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub(crate) fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn check_distribution(row_index: usize, row: &[Rational], width: usize) -> Result<()> {
    if row.len() != width {
        return Err(Error::Dimension(format!(
            "row {row_index} has {} entries, expected {width}",
            row.len()
        )));
    }
    if let Some((column, value)) = row.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeEntry {
            row: row_index,
            column,
            value: value.clone(),
        });
    }
    let sum: Rational = row.iter().sum();
    if !sum.is_one() {
        return Err(Error::RowSum {
            row: row_index,
            sum,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Prior(Vec<Rational>);

impl Prior {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty("prior"));
        }
        check_distribution(0, &weights, weights.len())?;
        Ok(Prior(weights))
    }

    pub fn uniform(states: usize) -> Self {
        let w = Rational::new(1.into(), (states as i64).into());
        Prior(vec![w; states])
    }

    pub fn is_full_support(&self) -> bool {
        self.0.iter().all(Rational::is_positive)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A weight γ for a reference experiment: γ ≥ 0 and ∑_s γ(s)π(s|θ) = 1 in
/// every state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight(Vec<Rational>);

impl Weight {
    pub fn new(experiment: &Experiment, values: Vec<Rational>) -> Result<Self> {
        if !weight_check(experiment, &values)? {
            return Err(Error::InvalidWeight(
                "negative entry or weighted rows do not sum to one".into(),
            ));
        }
        let weight = Weight(values);
        if weight.size() < Rational::one() {
            // Unreachable for a valid weight: the weighted rows sum to one.
            return Err(Error::Internal("valid weight with size below one".into()));
        }
        Ok(weight)
    }

    /// The all-ones weight.
    pub fn unit(signals: usize) -> Self {
        Weight(vec![Rational::one(); signals])
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    /// max_s γ(s).
    pub fn size(&self) -> Rational {
        self.0.iter().max().cloned().unwrap_or_else(Rational::zero)
    }
}

/// Checks γ ≥ 0 and ∑_s γ(s)π(s|θ) = 1 for every θ.
pub fn weight_check(experiment: &Experiment, gamma: &[Rational]) -> Result<bool> {
    if gamma.len() != experiment.signal_count() {
        return Err(Error::Dimension(format!(
            "weight has {} entries for {} signals",
            gamma.len(),
            experiment.signal_count()
        )));
    }
    if gamma.iter().any(Rational::is_negative) {
        return Ok(false);
    }
    Ok(experiment.rows().iter().all(|row| {
        let total: Rational = row.iter().zip(gamma).map(|(p, g)| p * g).sum();
        total.is_one()
    }))
}

/// The weighted experiment (γ∘π)(s|θ) = γ(s)π(s|θ).
pub fn apply_weight(weight: &Weight, experiment: &Experiment) -> Result<Experiment> {
    if !weight_check(experiment, weight.values())? {
        return Err(Error::InvalidWeight(
            "weight is not valid for this experiment".into(),
        ));
    }
    let rows = experiment
        .rows()
        .iter()
        .map(|row| row.iter().zip(weight.values()).map(|(p, g)| p * g).collect())
        .collect();
    Experiment::new(
        experiment.states().to_vec(),
        experiment.signals().to_vec(),
        rows,
    )
}

/// Result of [`regularize_with_map`]: the regular experiment and, for
/// each original signal, the merged signal it maps to (`None` for
/// signals that are null in every state).
#[derive(Debug, Clone, PartialEq)]
pub struct Regularized {
    pub experiment: Experiment,
    pub groups: Vec<Option<usize>>,
}

/// Drops null signals and merges signals whose likelihood columns are
/// positive multiples of one another.
pub fn regularize(experiment: &Experiment) -> Experiment {
    regularize_with_map(experiment).experiment
}

pub fn regularize_with_map(experiment: &Experiment) -> Regularized {
    let mut representatives: Vec<usize> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut groups = vec![None; experiment.signal_count()];
    for s in 0..experiment.signal_count() {
        let column = experiment.column(s);
        if column.iter().all(Zero::is_zero) {
            continue;
        }
        let found = representatives
            .iter()
            .position(|&rep| proportional(&experiment.column(rep), &column));
        let group = match found {
            Some(g) => g,
            None => {
                representatives.push(s);
                members.push(Vec::new());
                representatives.len() - 1
            }
        };
        members[group].push(s);
        groups[s] = Some(group);
    }
    let signals = members
        .iter()
        .map(|m| {
            m.iter()
                .map(|&s| experiment.signals()[s].as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let rows = experiment
        .rows()
        .iter()
        .map(|row| {
            members
                .iter()
                .map(|m| m.iter().map(|&s| &row[s]).sum())
                .collect()
        })
        .collect();
    Regularized {
        experiment: Experiment::new(experiment.states().to_vec(), signals, rows)
            .expect("merging columns preserves row sums"),
        groups,
    }
}

/// Nonzero columns `a`, `b` with `a = λb` for some λ > 0. Entries are
/// nonnegative, so cross-multiplication suffices.
fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    let pivot = match a.iter().position(|v| !v.is_zero()) {
        Some(p) => p,
        None => return false,
    };
    if b[pivot].is_zero() {
        return false;
    }
    a.iter()
        .zip(b)
        .all(|(x, y)| x * &b[pivot] == y * &a[pivot])
}

pub const NULL_SIGNAL: &str = "null";

/// Observes the experiment with probability 1/β and an extra null signal
/// otherwise.
pub fn dilute(experiment: &Experiment, beta: &Rational) -> Result<Experiment> {
    if *beta < Rational::one() {
        return Err(Error::SizeBelowOne(beta.clone()));
    }
    let keep = beta.recip();
    let null_mass = Rational::one() - &keep;
    let rows = experiment
        .rows()
        .iter()
        .map(|row| {
            let mut out: Vec<Rational> = row.iter().map(|p| p * &keep).collect();
            out.push(null_mass.clone());
            out
        })
        .collect();
    let mut signals = experiment.signals().to_vec();
    let mut label = NULL_SIGNAL.to_string();
    while signals.contains(&label) {
        label.push('\'');
    }
    signals.push(label);
    Experiment::new(experiment.states().to_vec(), signals, rows)
}

/// The residual experiment left after removing the weighted part:
/// π̃(s|θ) = ((1 − γ(s)/γ̄)/(1 − 1/γ̄))·π(s|θ).
pub fn residual_experiment(experiment: &Experiment, weight: &Weight) -> Result<Experiment> {
    if !weight_check(experiment, weight.values())? {
        return Err(Error::InvalidWeight(
            "weight is not valid for this experiment".into(),
        ));
    }
    let size = weight.size();
    if size.is_one() {
        return Err(Error::DegenerateWeight);
    }
    let denominator = Rational::one() - size.recip();
    let factors: Vec<Rational> = weight
        .values()
        .iter()
        .map(|g| (Rational::one() - g / &size) / &denominator)
        .collect();
    let rows = experiment
        .rows()
        .iter()
        .map(|row| row.iter().zip(&factors).map(|(p, f)| p * f).collect())
        .collect();
    Experiment::new(
        experiment.states().to_vec(),
        experiment.signals().to_vec(),
        rows,
    )
}

/// Actions, a payoff table indexed `[action][state]`, and a prior.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecisionProblem {
    actions: Vec<String>,
    payoffs: Vec<Vec<Rational>>,
    prior: Prior,
}

impl DecisionProblem {
    pub fn new(actions: Vec<String>, payoffs: Vec<Vec<Rational>>, prior: Prior) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::Empty("action set"));
        }
        if payoffs.len() != actions.len() {
            return Err(Error::Dimension(format!(
                "{} payoff rows for {} actions",
                payoffs.len(),
                actions.len()
            )));
        }
        if let Some(row) = payoffs.iter().find(|row| row.len() != prior.len()) {
            return Err(Error::Dimension(format!(
                "payoff row has {} entries for {} states",
                row.len(),
                prior.len()
            )));
        }
        Ok(DecisionProblem {
            actions,
            payoffs,
            prior,
        })
    }

    pub fn from_payoffs(payoffs: Vec<Vec<Rational>>, prior: Prior) -> Result<Self> {
        DecisionProblem::new(default_labels("a", payoffs.len()), payoffs, prior)
    }

    /// u(a_i, θ_j) = 1 if i = j, else 0.
    pub fn matching(prior: Prior) -> Self {
        let n = prior.len();
        let payoffs = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        DecisionProblem::from_payoffs(payoffs, prior).expect("square table")
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn payoffs(&self) -> &[Vec<Rational>] {
        &self.payoffs
    }

    pub fn payoff(&self, action: usize, state: usize) -> &Rational {
        &self.payoffs[action][state]
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn state_count(&self) -> usize {
        self.prior.len()
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// ∑_θ u(a,θ)·w(θ) for an arbitrary (possibly unnormalized) state
    /// weighting `w`.
    pub fn expected_payoff(&self, action: usize, weights: &[Rational]) -> Rational {
        self.payoffs[action]
            .iter()
            .zip(weights)
            .map(|(u, w)| u * w)
            .sum()
    }

    /// Best action against `weights`, ties to the lowest index.
    pub fn best_response(&self, weights: &[Rational]) -> (usize, Rational) {
        let mut best = (0, self.expected_payoff(0, weights));
        for a in 1..self.action_count() {
            let v = self.expected_payoff(a, weights);
            if v > best.1 {
                best = (a, v);
            }
        }
        best
    }

    pub fn max_abs_payoff(&self) -> Rational {
        self.payoffs
            .iter()
            .flatten()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Deterministic strategy: the action chosen after each signal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyTable(pub Vec<usize>);

impl PolicyTable {
    pub fn constant(signals: usize, action: usize) -> Self {
        PolicyTable(vec![action; signals])
    }

    pub fn action(&self, signal: usize) -> usize {
        self.0[signal]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ratio;

    fn rows(table: &[&[(i64, i64)]]) -> Vec<Vec<Rational>> {
        table
            .iter()
            .map(|row| row.iter().map(|&(n, d)| ratio(n, d)).collect())
            .collect()
    }

    #[test]
    fn validates_row_sums() {
        assert!(Experiment::from_rows(rows(&[&[(4, 5), (1, 5)], &[(1, 5), (4, 5)]])).is_ok());
        let ex1 = Experiment::from_rows(rows(&[
            &[(1, 2), (9, 20), (1, 20)],
            &[(1, 2), (1, 20), (9, 20)],
        ]))
        .unwrap();
        assert_eq!(ex1, Experiment::with_null_signal(ratio(9, 10)).unwrap().relabel_for_test());
        match Experiment::from_rows(rows(&[&[(1, 2), (1, 2)], &[(1, 2), (2, 3)]])) {
            Err(Error::RowSum { row: 1, sum }) => assert_eq!(sum, ratio(7, 6)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_and_empty() {
        assert!(matches!(
            Experiment::from_rows(rows(&[&[(3, 2), (-1, 2)]])),
            Err(Error::NegativeEntry { .. })
        ));
        assert!(matches!(
            Experiment::from_rows(vec![]),
            Err(Error::Empty(_))
        ));
        assert!(matches!(
            Experiment::from_rows(vec![vec![]]),
            Err(Error::Empty(_))
        ));
    }

    impl Experiment {
        fn relabel_for_test(mut self) -> Self {
            self.signals = default_labels("s", self.signals.len());
            self
        }
    }

    #[test]
    fn weight_identity() {
        let pi = Experiment::with_null_signal(ratio(4, 5)).unwrap();
        assert!(weight_check(&pi, &vec![ratio(1, 1); 3]).unwrap());
        assert!(weight_check(&pi, &[ratio(0, 1), ratio(2, 1), ratio(2, 1)]).unwrap());
        assert!(!weight_check(&pi, &vec![ratio(2, 1); 3]).unwrap());
        assert!(!weight_check(&pi, &[ratio(-1, 1), ratio(3, 1), ratio(3, 1)]).unwrap());
        assert!(matches!(
            weight_check(&pi, &[ratio(1, 1)]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn weighting_example_experiment() {
        let gamma = vec![ratio(0, 1), ratio(2, 1), ratio(2, 1)];
        for (q, hi, lo) in [((4, 5), (4, 5), (1, 5)), ((9, 10), (9, 10), (1, 10))] {
            let pi = Experiment::with_null_signal(ratio(q.0, q.1)).unwrap();
            let w = Weight::new(&pi, gamma.clone()).unwrap();
            assert_eq!(w.size(), ratio(2, 1));
            let out = apply_weight(&w, &pi).unwrap();
            assert_eq!(out.rows()[0], vec![ratio(0, 1), ratio(hi.0, hi.1), ratio(lo.0, lo.1)]);
            assert_eq!(out.rows()[1], vec![ratio(0, 1), ratio(lo.0, lo.1), ratio(hi.0, hi.1)]);
        }
        let pi = Experiment::binary_symmetric(ratio(3, 5)).unwrap();
        assert_eq!(apply_weight(&Weight::unit(2), &pi).unwrap(), pi);
    }

    #[test]
    fn regularize_merges_proportional_columns() {
        let dup = Experiment::from_rows(rows(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]])).unwrap();
        let reg = regularize(&dup);
        assert_eq!(reg.rows(), &rows(&[&[(1, 1)], &[(1, 1)]])[..]);
        assert_eq!(reg.signals(), &["s1+s2".to_string()]);

        let pi = Experiment::from_rows(rows(&[
            &[(1, 4), (1, 4), (1, 2)],
            &[(1, 8), (1, 8), (3, 4)],
        ]))
        .unwrap();
        let reg = regularize(&pi);
        assert_eq!(reg.rows(), &rows(&[&[(1, 2), (1, 2)], &[(1, 4), (3, 4)]])[..]);

        let regular = Experiment::binary_symmetric(ratio(3, 5)).unwrap();
        assert_eq!(regularize(&regular), regular);
    }

    #[test]
    fn regularize_drops_null_and_scaled_columns() {
        let pi = Experiment::from_rows(rows(&[
            &[(1, 6), (0, 1), (1, 3), (1, 2)],
            &[(1, 4), (0, 1), (1, 2), (1, 4)],
        ]))
        .unwrap();
        let reg = regularize_with_map(&pi);
        assert_eq!(reg.groups, vec![Some(0), None, Some(0), Some(1)]);
        assert_eq!(
            reg.experiment.rows(),
            &rows(&[&[(1, 2), (1, 2)], &[(3, 4), (1, 4)]])[..]
        );
        assert_eq!(regularize(&reg.experiment), reg.experiment);
    }

    #[test]
    fn dilution() {
        let pi = Experiment::binary_symmetric(ratio(3, 5)).unwrap();
        let same = dilute(&pi, &ratio(1, 1)).unwrap();
        assert_eq!(same.rows()[0], vec![ratio(3, 5), ratio(2, 5), ratio(0, 1)]);
        let half = dilute(&pi, &ratio(2, 1)).unwrap();
        assert_eq!(half.rows()[0], vec![ratio(3, 10), ratio(1, 5), ratio(1, 2)]);
        assert_eq!(half.signals()[2], NULL_SIGNAL);
        let perfect = dilute(&Experiment::perfectly_informative(2), &ratio(2, 1)).unwrap();
        assert_eq!(perfect.rows()[0], vec![ratio(1, 2), ratio(0, 1), ratio(1, 2)]);
        assert_eq!(
            dilute(&pi, &ratio(1, 2)),
            Err(Error::SizeBelowOne(ratio(1, 2)))
        );
    }

    #[test]
    fn residual_keeps_underweighted_signals() {
        let pi = Experiment::with_null_signal(ratio(4, 5)).unwrap();
        let w = Weight::new(&pi, vec![ratio(0, 1), ratio(2, 1), ratio(2, 1)]).unwrap();
        let res = residual_experiment(&pi, &w).unwrap();
        assert_eq!(res.rows(), &rows(&[&[(1, 1), (0, 1), (0, 1)], &[(1, 1), (0, 1), (0, 1)]])[..]);

        // One signal at the size, the others equal: residual rows are the
        // remaining mass, renormalized.
        let pi = Experiment::from_rows(rows(&[
            &[(1, 2), (1, 4), (1, 4)],
            &[(1, 2), (1, 4), (1, 4)],
        ]))
        .unwrap();
        let w = Weight::new(&pi, vec![ratio(3, 2), ratio(1, 2), ratio(1, 2)]).unwrap();
        let res = residual_experiment(&pi, &w).unwrap();
        assert_eq!(res.rows()[0], vec![ratio(0, 1), ratio(1, 2), ratio(1, 2)]);

        assert_eq!(
            residual_experiment(&pi, &Weight::unit(3)),
            Err(Error::DegenerateWeight)
        );
    }

    #[test]
    fn best_response_breaks_ties_low() {
        let dp = DecisionProblem::matching(Prior::uniform(2));
        assert_eq!(dp.best_response(&[ratio(1, 2), ratio(1, 2)]).0, 0);
        assert_eq!(dp.best_response(&[ratio(1, 4), ratio(3, 4)]).0, 1);
    }
}
