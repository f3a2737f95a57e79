use num_traits::{One, Signed, Zero};

use crate::experiment::{default_labels, Belief, Experiment};
use crate::numerics::Rational;
use crate::{Error, Result};

/// A Markov chain on the state set, `rows[θ][θ′] = ρ(θ′|θ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkovChain {
    states: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl MarkovChain {
    pub fn new(states: Vec<String>, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("transition matrix"));
        }
        if states.len() != rows.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} transition rows",
                states.len(),
                rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != rows.len() {
                return Err(Error::Dimension(format!(
                    "transition row {i} has {} entries, expected {}",
                    row.len(),
                    rows.len()
                )));
            }
            if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| v.is_negative()) {
                return Err(Error::NegativeEntry {
                    row: i,
                    column: j,
                    value: v.clone(),
                });
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(Error::RowSum { row: i, sum });
            }
        }
        Ok(MarkovChain { states, rows })
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        MarkovChain::new(default_labels("t", rows.len()), rows)
    }

    /// ρ(θ′|θ) = δ_{θθ′}.
    pub fn identity(states: usize) -> Self {
        let rows = (0..states)
            .map(|i| {
                (0..states)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        MarkovChain {
            states: default_labels("t", states),
            rows,
        }
    }

    /// Every row equal to `next`: states are drawn i.i.d. from it.
    pub fn iid(next: &[Rational]) -> Result<Self> {
        MarkovChain::from_rows(vec![next.to_vec(); next.len()])
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn state_count(&self) -> usize {
        self.rows.len()
    }

    pub fn prob(&self, from: usize, to: usize) -> &Rational {
        &self.rows[from][to]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.rows.iter().flatten().all(Signed::is_positive)
    }

    fn reachability_power(&self, power: usize) -> Vec<Vec<bool>> {
        let n = self.state_count();
        let step: Vec<Vec<bool>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| !v.is_zero()).collect())
            .collect();
        let mut current = step.clone();
        for _ in 1..power {
            current = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).any(|k| current[i][k] && step[k][j]))
                        .collect()
                })
                .collect();
        }
        current
    }

    pub fn is_irreducible(&self) -> bool {
        let n = self.state_count();
        let step: Vec<Vec<bool>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|v| !v.is_zero()).collect())
            .collect();
        (0..n).all(|start| {
            let mut seen = vec![false; n];
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if step[i][j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
            seen.into_iter().all(|b| b)
        })
    }

    /// Irreducible and aperiodic, i.e. some power of ρ is strictly
    /// positive (it suffices to check the power (n−1)² + 1).
    pub fn is_primitive(&self) -> bool {
        let n = self.state_count();
        self.is_irreducible()
            && self
                .reachability_power((n - 1) * (n - 1) + 1)
                .iter()
                .flatten()
                .all(|&b| b)
    }

    /// ν(θ′) = ∑_θ ρ(θ′|θ)μ(θ).
    pub fn push_forward(&self, belief: &[Rational]) -> Belief {
        (0..self.state_count())
            .map(|to| {
                belief
                    .iter()
                    .enumerate()
                    .map(|(from, m)| &self.rows[from][to] * m)
                    .sum()
            })
            .collect()
    }

    pub fn ensure_matches(&self, experiment: &Experiment) -> Result<()> {
        if self.state_count() != experiment.state_count() {
            return Err(Error::Mismatch(format!(
                "chain over {} states, experiment over {}",
                self.state_count(),
                experiment.state_count()
            )));
        }
        Ok(())
    }
}

/// Pr(s|μ) = ∑_{θ′} π(s|θ′)∑_θ ρ(θ′|θ)μ(θ).
pub fn next_signal_probability(
    chain: &MarkovChain,
    experiment: &Experiment,
    belief: &[Rational],
    signal: usize,
) -> Rational {
    chain
        .push_forward(belief)
        .iter()
        .enumerate()
        .map(|(theta, nu)| nu * experiment.prob(theta, signal))
        .sum()
}

/// r(s|μ)(θ′) ∝ π(s|θ′)∑_θ ρ(θ′|θ)μ(θ): the belief after one transition
/// and the signal `s`.
pub fn update(
    chain: &MarkovChain,
    experiment: &Experiment,
    belief: &[Rational],
    signal: usize,
) -> Result<Belief> {
    chain.ensure_matches(experiment)?;
    if belief.len() != chain.state_count() {
        return Err(Error::Dimension("belief length differs from state count".into()));
    }
    if signal >= experiment.signal_count() {
        return Err(Error::Dimension(format!("no signal with index {signal}")));
    }
    let unnormalized: Vec<Rational> = chain
        .push_forward(belief)
        .iter()
        .enumerate()
        .map(|(theta, nu)| nu * experiment.prob(theta, signal))
        .collect();
    let total: Rational = unnormalized.iter().sum();
    if total.is_zero() {
        return Err(Error::ZeroProbabilitySignal { signal });
    }
    Ok(unnormalized.into_iter().map(|v| v / &total).collect())
}
