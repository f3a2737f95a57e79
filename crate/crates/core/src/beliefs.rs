//! Posterior beliefs and the belief-based form of the weighted-garbling
//! order: Π is a weighted garbling of Π′ exactly when every posterior of
//! Π lies in the convex hull of the posteriors of Π′.

use num_traits::{One, Signed, Zero};

use crate::experiment::{Belief, Experiment, Prior, Weight};
use crate::numerics::{solve, LinearProgram, LpOutcome, Rational, Relation};
use crate::order::GarblingCertificate;
use crate::{Error, Result};

/// One support point of the posterior distribution together with every
/// signal that leads to it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosteriorAtom {
    pub signals: Vec<usize>,
    pub belief: Belief,
    pub probability: Rational,
}

/// The distribution over posteriors induced by an experiment and a prior.
/// Signals with identical posteriors share an atom; zero-probability
/// signals are omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PosteriorDistribution {
    pub prior: Belief,
    pub atoms: Vec<PosteriorAtom>,
}

impl PosteriorDistribution {
    /// ∑ Pr(μ)·μ, which equals the prior.
    pub fn barycenter(&self) -> Belief {
        let mut total = vec![Rational::zero(); self.prior.len()];
        for atom in &self.atoms {
            for (t, b) in total.iter_mut().zip(&atom.belief) {
                *t += &atom.probability * b;
            }
        }
        total
    }

    pub fn beliefs(&self) -> Vec<Belief> {
        self.atoms.iter().map(|a| a.belief.clone()).collect()
    }

    pub fn probabilities(&self) -> Vec<Rational> {
        self.atoms.iter().map(|a| a.probability.clone()).collect()
    }

    /// The atom reached by `signal`, if the signal has positive probability.
    pub fn atom_of(&self, signal: usize) -> Option<usize> {
        self.atoms.iter().position(|a| a.signals.contains(&signal))
    }
}

fn require_full_support(prior: &Prior) -> Result<()> {
    if prior.is_full_support() {
        Ok(())
    } else {
        Err(Error::PriorNotFullSupport)
    }
}

/// Bayes' rule: μ_s(θ) = π(s|θ)μ₀(θ)/Pr(s).
pub fn posteriors(experiment: &Experiment, prior: &Prior) -> Result<PosteriorDistribution> {
    require_full_support(prior)?;
    if prior.len() != experiment.state_count() {
        return Err(Error::Dimension(format!(
            "prior over {} states for an experiment over {}",
            prior.len(),
            experiment.state_count()
        )));
    }
    let mut atoms: Vec<PosteriorAtom> = Vec::new();
    for s in 0..experiment.signal_count() {
        let probability = experiment.signal_probability(prior.weights(), s);
        if probability.is_zero() {
            continue;
        }
        let belief: Belief = (0..experiment.state_count())
            .map(|theta| experiment.prob(theta, s) * &prior.weights()[theta] / &probability)
            .collect();
        match atoms.iter_mut().find(|a| a.belief == belief) {
            Some(atom) => {
                atom.signals.push(s);
                atom.probability += probability;
            }
            None => atoms.push(PosteriorAtom {
                signals: vec![s],
                belief,
                probability,
            }),
        }
    }
    Ok(PosteriorDistribution {
        prior: prior.weights().to_vec(),
        atoms,
    })
}

/// μ = ∑_k χ_k μ′_k with χ ≥ 0 and ∑ χ = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullMembershipCertificate {
    pub target: Belief,
    pub generators: Vec<Belief>,
    pub coefficients: Vec<Rational>,
}

impl HullMembershipCertificate {
    pub fn verify(&self) -> bool {
        if self.coefficients.len() != self.generators.len()
            || self.coefficients.iter().any(Signed::is_negative)
            || !self.coefficients.iter().sum::<Rational>().is_one()
        {
            return false;
        }
        (0..self.target.len()).all(|theta| {
            let combined: Rational = self
                .generators
                .iter()
                .zip(&self.coefficients)
                .map(|(g, c)| &g[theta] * c)
                .sum();
            combined == self.target[theta]
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HullDecision {
    Member(HullMembershipCertificate),
    /// h·μ′ ≤ c for every generator and h·μ > c.
    Separated { normal: Vec<Rational>, offset: Rational },
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Decides whether `point` is in the convex hull of `generators`, with a
/// separating hyperplane read from the dual multipliers when it is not.
pub fn hull_decision(point: &[Rational], generators: &[Belief]) -> Result<HullDecision> {
    if generators.is_empty() {
        return Err(Error::Empty("generator set"));
    }
    if let Some(g) = generators.iter().find(|g| g.len() != point.len()) {
        return Err(Error::Dimension(format!(
            "generator of length {} for a point of length {}",
            g.len(),
            point.len()
        )));
    }
    let k = generators.len();
    let mut lp = LinearProgram::new(k);
    lp.push(vec![Rational::one(); k], Relation::Eq, Rational::one());
    for (theta, target) in point.iter().enumerate() {
        let coefficients = generators.iter().map(|g| g[theta].clone()).collect();
        lp.push(coefficients, Relation::Eq, target.clone());
    }
    match solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(HullDecision::Member(HullMembershipCertificate {
            target: point.to_vec(),
            generators: generators.to_vec(),
            coefficients: sol.x,
        })),
        LpOutcome::Infeasible(farkas) => {
            let normal = farkas.multipliers[1..].to_vec();
            let offset = -farkas.multipliers[0].clone();
            let separated = generators.iter().all(|g| dot(&normal, g) <= offset)
                && dot(&normal, point) > offset;
            if !separated {
                return Err(Error::Internal("hull dual does not separate".into()));
            }
            Ok(HullDecision::Separated { normal, offset })
        }
        LpOutcome::Unbounded(_) => Err(Error::Internal("feasibility program unbounded".into())),
    }
}

pub fn hull_membership(
    point: &[Rational],
    generators: &[Belief],
) -> Result<Option<HullMembershipCertificate>> {
    Ok(match hull_decision(point, generators)? {
        HullDecision::Member(cert) => Some(cert),
        HullDecision::Separated { .. } => None,
    })
}

/// A joint distribution f over (posteriors of Π) × (posteriors of Π′).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingCertificate {
    pub source: PosteriorDistribution,
    pub target: PosteriorDistribution,
    /// f indexed `[source atom][target atom]`.
    pub joint: Vec<Vec<Rational>>,
}

impl CouplingCertificate {
    /// f(μ′) = ∑_μ f(μ, μ′).
    pub fn target_marginal(&self) -> Vec<Rational> {
        (0..self.target.atoms.len())
            .map(|j| self.joint.iter().map(|row| &row[j]).sum())
            .collect()
    }

    /// max_{μ′} f(μ′)/q′(μ′).
    pub fn size(&self) -> Rational {
        self.target_marginal()
            .iter()
            .zip(&self.target.atoms)
            .map(|(f, atom)| f / &atom.probability)
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// The belief-order outcome: a coupling, or a posterior of Π outside the
/// hull of Π′'s posteriors together with the separating hyperplane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BeliefOrder {
    Coupled(CouplingCertificate),
    Separated {
        atom: usize,
        belief: Belief,
        normal: Vec<Rational>,
        offset: Rational,
    },
}

/// Posteriors of Π′ with identical beliefs are merged, which under a
/// full-support prior is the same as regularizing Π′ first.
pub fn decide_weighted_beliefs(
    pi: &Experiment,
    reference: &Experiment,
    prior: &Prior,
) -> Result<BeliefOrder> {
    pi.ensure_same_states(reference)?;
    let source = posteriors(pi, prior)?;
    let target = posteriors(reference, prior)?;
    let generators = target.beliefs();
    let mut joint = Vec::with_capacity(source.atoms.len());
    for (i, atom) in source.atoms.iter().enumerate() {
        match hull_decision(&atom.belief, &generators)? {
            HullDecision::Member(cert) => joint.push(
                cert.coefficients
                    .iter()
                    .map(|chi| chi * &atom.probability)
                    .collect(),
            ),
            HullDecision::Separated { normal, offset } => {
                return Ok(BeliefOrder::Separated {
                    atom: i,
                    belief: atom.belief.clone(),
                    normal,
                    offset,
                })
            }
        }
    }
    Ok(BeliefOrder::Coupled(CouplingCertificate {
        source,
        target,
        joint,
    }))
}

pub fn check_weighted_beliefs(
    pi: &Experiment,
    reference: &Experiment,
    prior: &Prior,
) -> Result<Option<CouplingCertificate>> {
    Ok(match decide_weighted_beliefs(pi, reference, prior)? {
        BeliefOrder::Coupled(cert) => Some(cert),
        BeliefOrder::Separated { .. } => None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CouplingCheck {
    pub violations: Vec<String>,
    /// The realized size when the coupling is valid.
    pub size: Option<Rational>,
}

impl CouplingCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that f is nonnegative, that its first marginal is q^Π, that
/// every conditional f(·|μ) has barycenter μ, and that its atoms are the
/// posteriors of Π and Π′ under `prior`.
pub fn verify_coupling(
    coupling: &CouplingCertificate,
    pi: &Experiment,
    reference: &Experiment,
    prior: &Prior,
) -> CouplingCheck {
    let mut violations = Vec::new();
    match (posteriors(pi, prior), posteriors(reference, prior)) {
        (Ok(source), Ok(target)) => {
            if source != coupling.source {
                violations.push("source atoms are not the posteriors of the garbled experiment".into());
            }
            if target != coupling.target {
                violations.push("target atoms are not the posteriors of the reference".into());
            }
        }
        (Err(e), _) | (_, Err(e)) => violations.push(e.to_string()),
    }
    let rows = coupling.source.atoms.len();
    let cols = coupling.target.atoms.len();
    if coupling.joint.len() != rows || coupling.joint.iter().any(|r| r.len() != cols) {
        violations.push("joint table has the wrong shape".into());
        return CouplingCheck {
            violations,
            size: None,
        };
    }
    for (i, (row, atom)) in coupling.joint.iter().zip(&coupling.source.atoms).enumerate() {
        if row.iter().any(Signed::is_negative) {
            violations.push(format!("negative mass in row {i}"));
        }
        let mass: Rational = row.iter().sum();
        if mass != atom.probability {
            violations.push(format!("row {i} has mass {mass}, expected {}", atom.probability));
            continue;
        }
        for theta in 0..atom.belief.len() {
            let center: Rational = row
                .iter()
                .zip(&coupling.target.atoms)
                .map(|(f, t)| f * &t.belief[theta])
                .sum();
            if center != &mass * &atom.belief[theta] {
                violations.push(format!("barycenter fails in row {i}, state {theta}"));
            }
        }
    }
    if coupling.target.atoms.iter().any(|a| !a.probability.is_positive()) {
        violations.push("target atom with zero probability".into());
    }
    let size = violations.is_empty().then(|| coupling.size());
    CouplingCheck { violations, size }
}

/// γ(s′) = f(μ′_{s′})/q′(μ′_{s′}); signals that never occur get 0.
pub fn coupling_to_weight(
    coupling: &CouplingCertificate,
    reference: &Experiment,
    prior: &Prior,
) -> Result<Weight> {
    let target = posteriors(reference, prior)?;
    if target != coupling.target {
        return Err(Error::Mismatch("coupling refers to another experiment".into()));
    }
    let marginal = coupling.target_marginal();
    let mut gamma = vec![Rational::zero(); reference.signal_count()];
    for (atom, f) in coupling.target.atoms.iter().zip(&marginal) {
        let ratio = f / &atom.probability;
        for &s in &atom.signals {
            gamma[s] = ratio.clone();
        }
    }
    Weight::new(reference, gamma)
}

/// The coupling induced by a weighted-garbling certificate: the pair of
/// signals (s, s′) has joint probability ψ(s,s′)·Pr(s′), mapped to the
/// pair of posteriors they induce.
pub fn coupling_from_certificate(cert: &GarblingCertificate, prior: &Prior) -> Result<CouplingCertificate> {
    let source = posteriors(cert.garbled(), prior)?;
    let target = posteriors(cert.reference(), prior)?;
    let mut joint = vec![vec![Rational::zero(); target.atoms.len()]; source.atoms.len()];
    for s in 0..cert.garbled().signal_count() {
        for sp in 0..cert.reference().signal_count() {
            let mass = &cert.joint()[s][sp]
                * cert.reference().signal_probability(prior.weights(), sp);
            if mass.is_zero() {
                continue;
            }
            let i = source
                .atom_of(s)
                .ok_or_else(|| Error::Internal("mass on a zero-probability signal".into()))?;
            let j = target
                .atom_of(sp)
                .ok_or_else(|| Error::Internal("mass on a zero-probability signal".into()))?;
            joint[i][j] += mass;
        }
    }
    Ok(CouplingCertificate {
        source,
        target,
        joint,
    })
}
