//! Seeded generators for experiments, priors and experiment pairs.
//!
//! Pairs are drawn from a mix of constructions so that both ordered and
//! unordered pairs occur often: independent draws, column merges (always
//! Blackwell garblings), merges of an experiment against its dilution
//! (weighted garblings that are usually not Blackwell), and the reverse
//! of the latter two.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::experiment::{dilute, Experiment, Prior};
use crate::numerics::{ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairKind {
    Independent,
    Merged,
    Diluted,
    Reversed,
}

/// A candidate garbled experiment Π and reference Π′ over the same states.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPair {
    pub kind: PairKind,
    pub garbled: Experiment,
    pub reference: Experiment,
}

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A probability vector with entries k/d, d ≤ `denominator_bound`.
    fn composition(&mut self, parts: usize, denominator_bound: i64) -> Vec<Rational> {
        let d = self.rng.gen_range(1..=denominator_bound.max(1));
        let mut cuts: Vec<i64> = (0..parts - 1).map(|_| self.rng.gen_range(0..=d)).collect();
        cuts.sort_unstable();
        let mut previous = 0;
        let mut out = Vec::with_capacity(parts);
        for c in cuts.into_iter().chain(std::iter::once(d)) {
            out.push(ratio(c - previous, d));
            previous = c;
        }
        out
    }

    pub fn experiment(&mut self, states: usize, signals: usize, denominator_bound: i64) -> Experiment {
        let rows = (0..states)
            .map(|_| self.composition(signals, denominator_bound))
            .collect();
        Experiment::from_rows(rows).expect("compositions are distributions")
    }

    /// A full-support prior with denominators at most `denominator_bound`
    /// (at least `states`).
    pub fn prior(&mut self, states: usize, denominator_bound: i64) -> Prior {
        let masses: Vec<i64> = (0..states)
            .map(|_| self.rng.gen_range(1..=denominator_bound.max(1)))
            .collect();
        let total: i64 = masses.iter().sum();
        Prior::new(masses.iter().map(|&m| ratio(m, total)).collect()).expect("positive masses")
    }

    /// Merges the columns of `experiment` into `target` groups through a
    /// random surjection.
    fn merge(&mut self, experiment: &Experiment, target: usize) -> Experiment {
        let n = experiment.signal_count();
        let mut map: Vec<usize> = (0..n).map(|s| if s < target { s } else { self.rng.gen_range(0..target) }).collect();
        map.shuffle(&mut self.rng);
        let rows = experiment
            .rows()
            .iter()
            .map(|row| {
                let mut out = vec![ratio(0, 1); target];
                for (s, p) in row.iter().enumerate() {
                    out[map[s]] += p;
                }
                out
            })
            .collect();
        Experiment::from_rows(rows).expect("merging preserves row sums")
    }

    pub fn pair(&mut self) -> ExperimentPair {
        let states = self.rng.gen_range(2..=4);
        let roll = self.rng.gen_range(0..20);
        match roll {
            0..=5 => {
                let a = self.rng.gen_range(1..=4);
                let b = self.rng.gen_range(1..=4);
                ExperimentPair {
                    kind: PairKind::Independent,
                    garbled: self.experiment(states, a, 12),
                    reference: self.experiment(states, b, 12),
                }
            }
            6..=10 => {
                let (garbled, reference) = self.merged(states);
                ExperimentPair {
                    kind: PairKind::Merged,
                    garbled,
                    reference,
                }
            }
            11..=15 => {
                let (garbled, reference) = self.diluted(states);
                ExperimentPair {
                    kind: PairKind::Diluted,
                    garbled,
                    reference,
                }
            }
            _ => {
                let (garbled, reference) = if self.rng.gen_bool(0.5) {
                    self.merged(states)
                } else {
                    self.diluted(states)
                };
                ExperimentPair {
                    kind: PairKind::Reversed,
                    garbled: reference,
                    reference: garbled,
                }
            }
        }
    }

    fn merged(&mut self, states: usize) -> (Experiment, Experiment) {
        let signals = self.rng.gen_range(1..=4);
        let reference = self.experiment(states, signals, 12);
        let target = self.rng.gen_range(1..=signals);
        (self.merge(&reference, target), reference)
    }

    /// Π′ observes Π₀ with probability 1/β and nothing otherwise; Π is a
    /// merge of Π₀. Denominators stay within 12.
    fn diluted(&mut self, states: usize) -> (Experiment, Experiment) {
        let signals = self.rng.gen_range(1..=3);
        let (beta, bound) = if self.rng.gen_bool(0.5) {
            (ratio(2, 1), 6)
        } else {
            (ratio(3, 2), 4)
        };
        let base = self.experiment(states, signals, bound);
        let reference = dilute(&base, &beta).expect("β ≥ 1");
        let target = self.rng.gen_range(1..=signals);
        (self.merge(&base, target), reference)
    }

    pub fn pairs(&mut self, count: usize) -> Vec<ExperimentPair> {
        (0..count).map(|_| self.pair()).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
