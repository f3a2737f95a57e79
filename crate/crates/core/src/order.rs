//! Blackwell and weighted-garbling orders.
//!
//! Π is a weighted garbling of Π′ when π(s|θ) = ∑_{s′} φ(s|s′)γ(s′)π′(s′|θ)
//! for a weight γ of Π′ and a kernel φ. The product γ(s′)φ(s|s′) is
//! carried as a single nonnegative joint table ψ(s,s′), which turns every
//! question about the order into one exact linear program; γ and φ are
//! recovered as the column sums of ψ and its column-normalized form.

use num_traits::{One, Signed, Zero};

use crate::experiment::{apply_weight, Experiment, Weight};
use crate::numerics::{solve, LinearProgram, LpOutcome, Rational, Relation};
use crate::{Error, Result};

/// Witness that `garbled` (Π) is a weighted garbling of `reference` (Π′).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GarblingCertificate {
    garbled: Experiment,
    reference: Experiment,
    /// ψ indexed `[s][s′]`.
    joint: Vec<Vec<Rational>>,
}

impl GarblingCertificate {
    /// Wraps a joint table. Shapes are checked; validity is not (see
    /// [`verify_certificate`]).
    pub fn new(garbled: Experiment, reference: Experiment, joint: Vec<Vec<Rational>>) -> Result<Self> {
        garbled.ensure_same_states(&reference)?;
        if joint.len() != garbled.signal_count()
            || joint.iter().any(|row| row.len() != reference.signal_count())
        {
            return Err(Error::Dimension(format!(
                "joint table must be {} × {}",
                garbled.signal_count(),
                reference.signal_count()
            )));
        }
        Ok(GarblingCertificate {
            garbled,
            reference,
            joint,
        })
    }

    /// Builds ψ(s,s′) = γ(s′)φ(s|s′) from a weight and a kernel indexed
    /// `[s′][s]`.
    pub fn from_parts(
        garbled: Experiment,
        reference: Experiment,
        weight: &[Rational],
        kernel: &[Vec<Rational>],
    ) -> Result<Self> {
        if weight.len() != reference.signal_count() || kernel.len() != reference.signal_count() {
            return Err(Error::Dimension("weight or kernel length".into()));
        }
        let joint = (0..garbled.signal_count())
            .map(|s| {
                (0..reference.signal_count())
                    .map(|sp| {
                        kernel[sp]
                            .get(s)
                            .map(|phi| phi * &weight[sp])
                            .ok_or_else(|| Error::Dimension("kernel row length".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GarblingCertificate::new(garbled, reference, joint)
    }

    /// Π.
    pub fn garbled(&self) -> &Experiment {
        &self.garbled
    }

    /// Π′.
    pub fn reference(&self) -> &Experiment {
        &self.reference
    }

    pub fn joint(&self) -> &[Vec<Rational>] {
        &self.joint
    }

    /// γ(s′) = ∑_s ψ(s,s′).
    pub fn weight(&self) -> Vec<Rational> {
        (0..self.reference.signal_count())
            .map(|sp| self.joint.iter().map(|row| &row[sp]).sum())
            .collect()
    }

    /// φ(s|s′) = ψ(s,s′)/γ(s′), indexed `[s′][s]`. Columns with γ(s′) = 0
    /// get the uniform distribution.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.garbled.signal_count();
        let uniform = Rational::new(1.into(), (n as i64).into());
        self.weight()
            .iter()
            .enumerate()
            .map(|(sp, g)| {
                if g.is_zero() {
                    vec![uniform.clone(); n]
                } else {
                    self.joint.iter().map(|row| &row[sp] / g).collect()
                }
            })
            .collect()
    }

    /// max_{s′} γ(s′).
    pub fn size(&self) -> Rational {
        self.weight().into_iter().max().unwrap_or_else(Rational::zero)
    }

    pub fn verify(&self) -> CertificateCheck {
        verify_certificate(self)
    }

    fn identity(garbled: &Experiment) -> Self {
        let n = garbled.signal_count();
        let joint = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        GarblingCertificate {
            garbled: garbled.clone(),
            reference: garbled.clone(),
            joint,
        }
    }
}

/// Every violated invariant of a certificate; empty when valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CertificateCheck {
    pub violations: Vec<String>,
}

impl CertificateCheck {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-substitutes the certificate into the defining identity and the
/// weight conditions, exactly.
pub fn verify_certificate(cert: &GarblingCertificate) -> CertificateCheck {
    let mut violations = Vec::new();
    let pi = &cert.garbled;
    let reference = &cert.reference;
    if pi.state_count() != reference.state_count() {
        violations.push("state sets differ".to_string());
        return CertificateCheck { violations };
    }
    for (s, row) in cert.joint.iter().enumerate() {
        for (sp, v) in row.iter().enumerate() {
            if v.is_negative() {
                violations.push(format!("psi({s},{sp}) = {v} is negative"));
            }
        }
    }
    for theta in 0..pi.state_count() {
        for s in 0..pi.signal_count() {
            let rebuilt: Rational = (0..reference.signal_count())
                .map(|sp| &cert.joint[s][sp] * reference.prob(theta, sp))
                .sum();
            if &rebuilt != pi.prob(theta, s) {
                violations.push(format!(
                    "identity fails at state {theta}, signal {s}: {rebuilt} != {}",
                    pi.prob(theta, s)
                ));
            }
        }
    }
    let gamma = cert.weight();
    for theta in 0..reference.state_count() {
        let total: Rational = gamma
            .iter()
            .enumerate()
            .map(|(sp, g)| g * reference.prob(theta, sp))
            .sum();
        if !total.is_one() {
            violations.push(format!("weight identity fails at state {theta}: {total}"));
        }
    }
    for (sp, row) in cert.kernel().iter().enumerate() {
        let total: Rational = row.iter().sum();
        if !total.is_one() || row.iter().any(Signed::is_negative) {
            violations.push(format!("kernel row {sp} is not a distribution"));
        }
    }
    CertificateCheck { violations }
}

/// Variable index of ψ(s,s′).
fn joint_var(reference_signals: usize, s: usize, sp: usize) -> usize {
    s * reference_signals + sp
}

/// The identity constraints ∑_{s′} ψ(s,s′)π′(s′|θ) = π(s|θ), one row per
/// `(s, θ)` in row-major order, over `extra` additional variables.
fn joint_program(pi: &Experiment, reference: &Experiment, extra: usize) -> LinearProgram {
    let ns = pi.signal_count();
    let nsp = reference.signal_count();
    let vars = ns * nsp + extra;
    let mut lp = LinearProgram::new(vars);
    for s in 0..ns {
        for theta in 0..pi.state_count() {
            let mut coefficients = vec![Rational::zero(); vars];
            for sp in 0..nsp {
                coefficients[joint_var(nsp, s, sp)] = reference.prob(theta, sp).clone();
            }
            lp.push(coefficients, Relation::Eq, pi.prob(theta, s).clone());
        }
    }
    lp
}

fn certificate_from_solution(
    pi: &Experiment,
    reference: &Experiment,
    x: &[Rational],
) -> Result<GarblingCertificate> {
    let nsp = reference.signal_count();
    let joint = (0..pi.signal_count())
        .map(|s| (0..nsp).map(|sp| x[joint_var(nsp, s, sp)].clone()).collect())
        .collect();
    let cert = GarblingCertificate::new(pi.clone(), reference.clone(), joint)?;
    let check = cert.verify();
    if !check.is_valid() {
        return Err(Error::Internal(format!(
            "solver produced an invalid certificate: {:?}",
            check.violations
        )));
    }
    Ok(cert)
}

/// Dual witness that no Blackwell garbling exists: multipliers for the
/// kernel normalization rows (`[s′]`) and the identity rows (`[s][θ]`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlackwellRefutation {
    pub normalization: Vec<Rational>,
    pub identity: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Garbling {
    Certified(GarblingCertificate),
    Refuted(BlackwellRefutation),
}

impl Garbling {
    pub fn certificate(self) -> Option<GarblingCertificate> {
        match self {
            Garbling::Certified(cert) => Some(cert),
            Garbling::Refuted(_) => None,
        }
    }
}

/// Decides whether Π is a Blackwell garbling of Π′, returning either a
/// certificate with γ ≡ 1 or the Farkas multipliers of the garbling
/// program.
pub fn decide_blackwell(pi: &Experiment, reference: &Experiment) -> Result<Garbling> {
    pi.ensure_same_states(reference)?;
    let ns = pi.signal_count();
    let nsp = reference.signal_count();
    let mut lp = joint_program(pi, reference, 0);
    for sp in 0..nsp {
        let mut coefficients = vec![Rational::zero(); ns * nsp];
        for s in 0..ns {
            coefficients[joint_var(nsp, s, sp)] = Rational::one();
        }
        lp.push(coefficients, Relation::Eq, Rational::one());
    }
    match solve(&lp)? {
        LpOutcome::Optimal(sol) => Ok(Garbling::Certified(certificate_from_solution(
            pi, reference, &sol.x,
        )?)),
        LpOutcome::Infeasible(farkas) => {
            let y = farkas.multipliers;
            let states = pi.state_count();
            let identity = (0..ns)
                .map(|s| y[s * states..(s + 1) * states].to_vec())
                .collect();
            let normalization = y[ns * states..].to_vec();
            Ok(Garbling::Refuted(BlackwellRefutation {
                normalization,
                identity,
            }))
        }
        LpOutcome::Unbounded(_) => Err(Error::Internal("feasibility program unbounded".into())),
    }
}

pub fn check_blackwell(pi: &Experiment, reference: &Experiment) -> Result<Option<GarblingCertificate>> {
    decide_blackwell(pi, reference).map(Garbling::certificate)
}

/// Decides whether Π is a weighted garbling of Π′.
///
/// The weight identity for Π′ is implied by summing the identity rows
/// over s, so it is not added to the program.
pub fn check_weighted(pi: &Experiment, reference: &Experiment) -> Result<Option<GarblingCertificate>> {
    pi.ensure_same_states(reference)?;
    let lp = joint_program(pi, reference, 0);
    match solve(&lp)? {
        LpOutcome::Optimal(sol) => certificate_from_solution(pi, reference, &sol.x).map(Some),
        LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded(_) => Err(Error::Internal("feasibility program unbounded".into())),
    }
}

/// Smallest size over all weighted garblings of Π′ that yield Π.
pub fn min_size(
    pi: &Experiment,
    reference: &Experiment,
) -> Result<Option<(Rational, GarblingCertificate)>> {
    pi.ensure_same_states(reference)?;
    let ns = pi.signal_count();
    let nsp = reference.signal_count();
    let t = ns * nsp;
    let mut lp = joint_program(pi, reference, 1);
    for sp in 0..nsp {
        let mut coefficients = vec![Rational::zero(); t + 1];
        for s in 0..ns {
            coefficients[joint_var(nsp, s, sp)] = Rational::one();
        }
        coefficients[t] = -Rational::one();
        lp.push(coefficients, Relation::Le, Rational::zero());
    }
    let mut objective = vec![Rational::zero(); t + 1];
    objective[t] = Rational::one();
    let lp = lp.minimize(objective);
    match solve(&lp)? {
        LpOutcome::Optimal(sol) => {
            let cert = certificate_from_solution(pi, reference, &sol.x[..t])?;
            if cert.size() != sol.objective {
                return Err(Error::Internal("minimal size disagrees with witness".into()));
            }
            Ok(Some((sol.objective, cert)))
        }
        LpOutcome::Infeasible(_) => Ok(None),
        LpOutcome::Unbounded(_) => Err(Error::Internal("size below zero is impossible".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UpperSize {
    Bounded {
        size: Rational,
        witness: GarblingCertificate,
    },
    /// Some signal of Π′ is null in every state, so its weight is free.
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeInterval {
    pub min: Rational,
    pub min_witness: GarblingCertificate,
    pub max: UpperSize,
}

impl SizeInterval {
    pub fn contains(&self, beta: &Rational) -> bool {
        *beta >= self.min
            && match &self.max {
                UpperSize::Bounded { size, .. } => beta <= size,
                UpperSize::Unbounded => true,
            }
    }
}

/// The set of sizes with which Π is a weighted garbling of Π′.
///
/// The maximum is a maximum over signals of the largest attainable γ(s′),
/// one program per signal of Π′.
pub fn size_interval(pi: &Experiment, reference: &Experiment) -> Result<Option<SizeInterval>> {
    let (min, min_witness) = match min_size(pi, reference)? {
        Some(found) => found,
        None => return Ok(None),
    };
    let ns = pi.signal_count();
    let nsp = reference.signal_count();
    let mut best: Option<(Rational, GarblingCertificate)> = None;
    for sp in 0..nsp {
        let mut objective = vec![Rational::zero(); ns * nsp];
        for s in 0..ns {
            objective[joint_var(nsp, s, sp)] = Rational::one();
        }
        let lp = joint_program(pi, reference, 0).maximize(objective);
        match solve(&lp)? {
            LpOutcome::Optimal(sol) => {
                if best.as_ref().is_none_or(|(b, _)| sol.objective > *b) {
                    let cert = certificate_from_solution(pi, reference, &sol.x)?;
                    best = Some((sol.objective, cert));
                }
            }
            LpOutcome::Unbounded(_) => {
                return Ok(Some(SizeInterval {
                    min,
                    min_witness,
                    max: UpperSize::Unbounded,
                }))
            }
            LpOutcome::Infeasible(_) => {
                return Err(Error::Internal("feasible program became infeasible".into()))
            }
        }
    }
    let (size, witness) = best.ok_or_else(|| Error::Internal("no signals".into()))?;
    if witness.size() != size {
        return Err(Error::Internal("maximal size disagrees with witness".into()));
    }
    Ok(Some(SizeInterval {
        min,
        min_witness,
        max: UpperSize::Bounded { size, witness },
    }))
}

fn ensure_same_pair(a: &GarblingCertificate, b: &GarblingCertificate) -> Result<()> {
    if a.garbled != b.garbled || a.reference != b.reference {
        return Err(Error::Mismatch("certificates refer to different pairs".into()));
    }
    Ok(())
}

/// ψ_λ = (1−λ)ψ′ + λψ″; the implied γ_λ and φ_λ are the convex mix of
/// the weights and the γ-weighted mix of the kernels.
pub fn mix_certificates(
    first: &GarblingCertificate,
    second: &GarblingCertificate,
    lambda: &Rational,
) -> Result<GarblingCertificate> {
    ensure_same_pair(first, second)?;
    if lambda.is_negative() || *lambda > Rational::one() {
        return Err(Error::Precondition(format!("mixing weight {lambda} outside [0, 1]")));
    }
    let keep = Rational::one() - lambda;
    let joint = first
        .joint
        .iter()
        .zip(&second.joint)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x * &keep + y * lambda).collect())
        .collect();
    GarblingCertificate::new(first.garbled.clone(), first.reference.clone(), joint)
}

/// Chains Π ≼ Π′ (`inner`) and Π′ ≼ Π″ (`outer`) into Π ≼ Π″ with
///
/// γ̂(s″) = γ₂(s″)·∑_{s′} γ₁(s′)φ₂(s′|s″),
/// φ̂(s|s″) = ∑_{s′} γ₁(s′)φ₁(s|s′)φ₂(s′|s″) / ∑_{s′} γ₁(s′)φ₂(s′|s″).
///
/// The size of the result is at most the product of the two sizes.
pub fn compose(inner: &GarblingCertificate, outer: &GarblingCertificate) -> Result<GarblingCertificate> {
    if inner.reference != outer.garbled {
        return Err(Error::Mismatch(
            "middle experiment of the chain differs".into(),
        ));
    }
    let gamma1 = inner.weight();
    let phi1 = inner.kernel();
    let gamma2 = outer.weight();
    let phi2 = outer.kernel();
    let ns = inner.garbled.signal_count();
    let nmid = inner.reference.signal_count();
    let nfar = outer.reference.signal_count();
    let uniform = Rational::new(1.into(), (ns as i64).into());

    let mut gamma = Vec::with_capacity(nfar);
    let mut kernel = Vec::with_capacity(nfar);
    for spp in 0..nfar {
        let normalizer: Rational = (0..nmid).map(|sp| &gamma1[sp] * &phi2[spp][sp]).sum();
        gamma.push(&gamma2[spp] * &normalizer);
        if normalizer.is_zero() {
            kernel.push(vec![uniform.clone(); ns]);
        } else {
            kernel.push(
                (0..ns)
                    .map(|s| {
                        let mass: Rational = (0..nmid)
                            .map(|sp| &gamma1[sp] * &phi1[sp][s] * &phi2[spp][sp])
                            .sum();
                        mass / &normalizer
                    })
                    .collect(),
            );
        }
    }
    let cert = GarblingCertificate::from_parts(
        inner.garbled.clone(),
        outer.reference.clone(),
        &gamma,
        &kernel,
    )?;
    Ok(cert)
}

/// Π′ refined by an extra state-independent event `d ∈ {0, 1}`:
/// `observed[θ][s′] = π″(s′,1|θ)` and `unobserved[θ][s′] = π″(s′,0|θ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionalExperiment {
    reference: Experiment,
    observed: Vec<Vec<Rational>>,
    unobserved: Vec<Vec<Rational>>,
}

/// The four defining conditions of conditional informativeness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionChecks {
    /// Summing over the event recovers π′.
    pub marginal: bool,
    /// π″(1|θ) is the same α ∈ (0, 1] in every state.
    pub constant_event: bool,
    /// π″(1|s′,θ) does not depend on θ.
    pub uninformative_event: bool,
    /// The experiment conditioned on the event Blackwell-dominates Π.
    pub dominates: bool,
}

impl ConditionChecks {
    pub fn all(&self) -> bool {
        self.marginal && self.constant_event && self.uninformative_event && self.dominates
    }
}

impl ConditionalExperiment {
    pub fn new(
        reference: Experiment,
        observed: Vec<Vec<Rational>>,
        unobserved: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let shape_ok = |t: &Vec<Vec<Rational>>| {
            t.len() == reference.state_count()
                && t.iter().all(|row| row.len() == reference.signal_count())
        };
        if !shape_ok(&observed) || !shape_ok(&unobserved) {
            return Err(Error::Dimension("conditional table shape".into()));
        }
        Ok(ConditionalExperiment {
            reference,
            observed,
            unobserved,
        })
    }

    pub fn reference(&self) -> &Experiment {
        &self.reference
    }

    pub fn observed(&self) -> &[Vec<Rational>] {
        &self.observed
    }

    pub fn unobserved(&self) -> &[Vec<Rational>] {
        &self.unobserved
    }

    /// π″(1|θ) when it is the same in every state.
    pub fn event_probability(&self) -> Option<Rational> {
        let mut totals = self.observed.iter().map(|row| row.iter().sum::<Rational>());
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    fn marginal_ok(&self) -> bool {
        let entries_ok = self
            .observed
            .iter()
            .chain(&self.unobserved)
            .flatten()
            .all(|v| !v.is_negative());
        entries_ok
            && (0..self.reference.state_count()).all(|theta| {
                (0..self.reference.signal_count()).all(|sp| {
                    &self.observed[theta][sp] + &self.unobserved[theta][sp]
                        == *self.reference.prob(theta, sp)
                })
            })
    }

    /// κ(1|s′) = π″(s′,1|θ)/π′(s′|θ), if it is state-independent wherever
    /// π′(s′|θ) > 0. Signals that are null in every state get 0.
    pub fn event_given_signal(&self) -> Option<Vec<Rational>> {
        (0..self.reference.signal_count())
            .map(|sp| {
                let mut ratio: Option<Rational> = None;
                for theta in 0..self.reference.state_count() {
                    let base = self.reference.prob(theta, sp);
                    let joint = &self.observed[theta][sp];
                    if base.is_zero() {
                        if !joint.is_zero() {
                            return None;
                        }
                        continue;
                    }
                    let r = joint / base;
                    match &ratio {
                        Some(existing) if *existing != r => return None,
                        Some(_) => {}
                        None => ratio = Some(r),
                    }
                }
                Some(ratio.unwrap_or_else(Rational::zero))
            })
            .collect()
    }

    /// π″(s′|1,θ) = π″(s′,1|θ)/π″(1|θ).
    pub fn conditioned(&self) -> Result<Experiment> {
        let alpha = self
            .event_probability()
            .filter(Rational::is_positive)
            .ok_or_else(|| Error::Conditional("event probability is not a positive constant".into()))?;
        let rows = self
            .observed
            .iter()
            .map(|row| row.iter().map(|v| v / &alpha).collect())
            .collect();
        Experiment::new(
            self.reference.states().to_vec(),
            self.reference.signals().to_vec(),
            rows,
        )
    }

    /// Evaluates all four conditions against Π.
    pub fn conditions(&self, pi: &Experiment) -> Result<ConditionChecks> {
        let marginal = self.marginal_ok();
        let constant_event = self
            .event_probability()
            .is_some_and(|a| a.is_positive() && a <= Rational::one());
        let uninformative_event = self.event_given_signal().is_some();
        let dominates = marginal
            && constant_event
            && match self.conditioned() {
                Ok(conditioned) => check_blackwell(pi, &conditioned)?.is_some(),
                Err(_) => false,
            };
        Ok(ConditionChecks {
            marginal,
            constant_event,
            uninformative_event,
            dominates,
        })
    }
}

/// From a weighted garbling with weight γ and size γ̄, builds the event
/// π″(s′,1|θ) = γ(s′)π′(s′|θ)/γ̄ of probability α = 1/γ̄, conditioned on
/// which Π′ Blackwell-dominates Π.
pub fn to_conditional(reference: &Experiment, cert: &GarblingCertificate) -> Result<ConditionalExperiment> {
    if cert.reference != *reference {
        return Err(Error::Mismatch("certificate refers to another experiment".into()));
    }
    let check = cert.verify();
    if !check.is_valid() {
        return Err(Error::InvalidCertificate(check.violations.join("; ")));
    }
    let gamma = cert.weight();
    let size = cert.size();
    let observed: Vec<Vec<Rational>> = reference
        .rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&gamma)
                .map(|(p, g)| p * g / &size)
                .collect()
        })
        .collect();
    // The event's complement carries the rest of π′ so that the marginal
    // over d is π′.
    let unobserved = reference
        .rows()
        .iter()
        .zip(&observed)
        .map(|(row, obs)| row.iter().zip(obs).map(|(p, o)| p - o).collect())
        .collect();
    ConditionalExperiment::new(reference.clone(), observed, unobserved)
}

/// Recovers a weighted-garbling certificate with γ(s′) = κ(1|s′)/α; its
/// size is max_{s′} κ(1|s′)/α.
pub fn from_conditional(
    conditional: &ConditionalExperiment,
    reference: &Experiment,
    pi: &Experiment,
) -> Result<GarblingCertificate> {
    if conditional.reference != *reference {
        return Err(Error::Mismatch("conditional experiment refines another experiment".into()));
    }
    if !conditional.marginal_ok() {
        return Err(Error::Conditional("marginal over the event is not the base experiment".into()));
    }
    let alpha = conditional
        .event_probability()
        .filter(|a| a.is_positive() && *a <= Rational::one())
        .ok_or_else(|| Error::Conditional("event probability is not a constant in (0, 1]".into()))?;
    let kappa = conditional
        .event_given_signal()
        .ok_or_else(|| Error::Conditional("event is informative about the state".into()))?;
    let gamma: Vec<Rational> = kappa.iter().map(|k| k / &alpha).collect();
    let weight = Weight::new(reference, gamma.clone())?;
    let weighted = apply_weight(&weight, reference)?;
    debug_assert_eq!(weighted, conditional.conditioned()?);
    let garbling = check_blackwell(pi, &weighted)?.ok_or_else(|| {
        Error::Conditional("conditioned experiment does not Blackwell-dominate".into())
    })?;
    let kernel = garbling.kernel();
    let cert = GarblingCertificate::from_parts(pi.clone(), reference.clone(), &gamma, &kernel)?;
    let check = cert.verify();
    if !check.is_valid() {
        return Err(Error::Internal(format!(
            "recovered certificate invalid: {:?}",
            check.violations
        )));
    }
    Ok(cert)
}

/// The certificate of Π ≼ Π with γ ≡ 1 and φ the identity.
pub fn reflexive(pi: &Experiment) -> GarblingCertificate {
    GarblingCertificate::identity(pi)
}
