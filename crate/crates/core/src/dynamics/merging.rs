use num_traits::Zero;

use super::MarkovChain;
use crate::experiment::Experiment;
use crate::numerics::rational_to_f64;
use crate::{Error, Result};

/// Upper bound on the number of signal strings enumerated.
const MAX_STRINGS: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct MergingReport {
    /// Least n with maximal pairwise row distance below ε.
    pub horizon: Option<usize>,
    /// Maximal L1 distance between normalized rows, for n = 1, 2, ….
    pub distances: Vec<f64>,
    /// Whether `distances` is nonincreasing.
    pub monotone: bool,
}

/// Finds the least n such that, after any signal string of length n, the
/// posteriors starting from any two point-mass beliefs are within `eps`
/// in L1 distance.
///
/// The θ-row of R(s₁)⋯R(sₙ), with R(s)[θ][θ′] = π(s|θ′)ρ(θ′|θ), normalized
/// to sum to one, is the posterior after sⁿ starting from θ. Strings are
/// enumerated depth-first so prefixes share their products.
pub fn merging_horizon(
    chain: &MarkovChain,
    experiment: &Experiment,
    eps: f64,
    n_max: usize,
) -> Result<MergingReport> {
    chain.ensure_matches(experiment)?;
    if !chain.is_strictly_positive() {
        return Err(Error::Precondition("transition matrix must be strictly positive".into()));
    }
    if !experiment.null_signals().is_empty() {
        return Err(Error::Precondition("experiment has a signal that never occurs".into()));
    }
    let signals = experiment.signal_count();
    let total: u128 = (1..=n_max as u32).map(|n| (signals as u128).saturating_pow(n)).sum();
    if total > MAX_STRINGS {
        return Err(Error::TreeTooLarge {
            horizon: n_max,
            signals,
        });
    }
    let states = chain.state_count();
    let steps: Vec<Vec<Vec<f64>>> = (0..signals)
        .map(|s| {
            (0..states)
                .map(|theta| {
                    (0..states)
                        .map(|next| {
                            if experiment.prob(next, s).is_zero() {
                                0.0
                            } else {
                                rational_to_f64(&(experiment.prob(next, s) * chain.prob(theta, next)))
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut distances = Vec::new();
    let mut horizon = None;
    for n in 1..=n_max {
        let mut worst: f64 = 0.0;
        let identity: Vec<Vec<f64>> = (0..states)
            .map(|i| (0..states).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        deepest_gap(&identity, &steps, n, &mut worst);
        distances.push(worst);
        if worst < eps {
            horizon = Some(n);
            break;
        }
    }
    let monotone = distances.windows(2).all(|w| w[1] <= w[0]);
    Ok(MergingReport {
        horizon,
        distances,
        monotone,
    })
}

fn deepest_gap(prefix: &[Vec<f64>], steps: &[Vec<Vec<f64>>], remaining: usize, worst: &mut f64) {
    if remaining == 0 {
        *worst = worst.max(max_row_distance(prefix));
        return;
    }
    for step in steps {
        let product = normalize_rows(multiply(prefix, step));
        deepest_gap(&product, steps, remaining - 1, worst);
    }
}

fn multiply(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b[0].len();
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum())
                .collect()
        })
        .collect()
}

fn normalize_rows(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for row in &mut m {
        let total: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= total;
        }
    }
    m
}

fn max_row_distance(m: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            let d: f64 = m[i].iter().zip(&m[j]).map(|(x, y)| (x - y).abs()).sum();
            worst = worst.max(d);
        }
    }
    worst
}
