use std::path::Path;

use garbling::beliefs::{decide_weighted_beliefs, hull_decision, posteriors, BeliefOrder, HullDecision};
use garbling::dynamics::{
    counterexample, eta_limit, merging_horizon, stopping_value, StoppingProblem,
    COUNTEREXAMPLE_HORIZONS,
};
use garbling::experiment::{dilute, Experiment, Prior};
use garbling::order::{
    check_weighted, compose, decide_blackwell, from_conditional, min_size, size_interval,
    to_conditional, Garbling, GarblingCertificate, UpperSize,
};
use garbling::value::{falsify_bound, value, verify_bound};
use garbling::Rational;
use serde_json::{json, Value};

use crate::doc::{self, matrix, rat, rats};
use crate::CliError;

/// Whether the relation or computation a command reports on succeeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
}

pub struct Outcome {
    pub doc: Value,
    pub status: Status,
}

impl Outcome {
    fn holds(doc: Value) -> Self {
        Outcome {
            doc,
            status: Status::Holds,
        }
    }

    fn fails(doc: Value) -> Self {
        Outcome {
            doc,
            status: Status::Fails,
        }
    }

    fn when(ok: bool, doc: Value) -> Self {
        if ok {
            Self::holds(doc)
        } else {
            Self::fails(doc)
        }
    }
}

type Run = Result<Outcome, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Relation {
    Blackwell,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Witness {
    Any,
    Min,
    Max,
}

fn report(name: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("kind".into(), json!("report"));
    m.insert("report".into(), json!(name));
    m
}

fn separation(pi: &Experiment, reference: &Experiment, prior: &Prior) -> Result<Value, CliError> {
    Ok(match decide_weighted_beliefs(pi, reference, prior)? {
        BeliefOrder::Coupled(_) => Value::Null,
        BeliefOrder::Separated {
            atom,
            belief,
            normal,
            offset,
        } => {
            let dist = posteriors(pi, prior)?;
            let signals: Vec<_> = dist.atoms[atom]
                .signals
                .iter()
                .map(|&s| pi.signals()[s].clone())
                .collect();
            json!({
                "signals": signals,
                "belief": rats(&belief),
                "normal": rats(&normal),
                "offset": rat(&offset),
            })
        }
    })
}

pub fn check(relation: Relation, witness: Witness, a: &Path, b: &Path) -> Run {
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    let uniform = Prior::uniform(pi.state_count());
    if relation == Relation::Blackwell {
        return Ok(match decide_blackwell(&pi, &reference)? {
            Garbling::Certified(cert) => Outcome::holds(doc::certificate_doc(&cert)),
            Garbling::Refuted(refutation) => {
                let mut r = report("check");
                r.insert("relation".into(), json!("blackwell"));
                r.insert("holds".into(), json!(false));
                r.insert(
                    "farkas".into(),
                    json!({
                        "identity": matrix(&refutation.identity),
                        "normalization": rats(&refutation.normalization),
                    }),
                );
                Outcome::fails(Value::Object(r))
            }
        });
    }
    let found = match witness {
        Witness::Any => check_weighted(&pi, &reference)?,
        Witness::Min => min_size(&pi, &reference)?.map(|(_, cert)| cert),
        Witness::Max => match size_interval(&pi, &reference)? {
            None => None,
            Some(interval) => match interval.max {
                UpperSize::Bounded { witness, .. } => Some(witness),
                UpperSize::Unbounded => {
                    let mut r = report("check");
                    r.insert("relation".into(), json!("weighted"));
                    r.insert("holds".into(), json!(true));
                    r.insert("max_size".into(), json!("unbounded"));
                    r.insert("certificate".into(), doc::certificate_doc(&interval.min_witness));
                    return Ok(Outcome::holds(Value::Object(r)));
                }
            },
        },
    };
    Ok(match found {
        Some(cert) => Outcome::holds(doc::certificate_doc(&cert)),
        None => {
            let mut r = report("check");
            r.insert("relation".into(), json!("weighted"));
            r.insert("holds".into(), json!(false));
            r.insert("separation".into(), separation(&pi, &reference, &uniform)?);
            Outcome::fails(Value::Object(r))
        }
    })
}

pub fn verify(path: &Path) -> Run {
    let cert = doc::load_certificate(path)?;
    let check = cert.verify();
    let mut r = report("verify");
    r.insert("valid".into(), json!(check.is_valid()));
    r.insert("violations".into(), json!(check.violations));
    r.insert("beta".into(), rat(&cert.size()));
    Ok(Outcome::when(check.is_valid(), Value::Object(r)))
}

pub fn size_range(a: &Path, b: &Path) -> Run {
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    let mut r = report("size-interval");
    let Some(interval) = size_interval(&pi, &reference)? else {
        r.insert("ordered".into(), json!(false));
        return Ok(Outcome::fails(Value::Object(r)));
    };
    r.insert("ordered".into(), json!(true));
    r.insert("min".into(), rat(&interval.min));
    r.insert("min_witness".into(), doc::certificate_doc(&interval.min_witness));
    match &interval.max {
        UpperSize::Bounded { size, witness } => {
            r.insert("max".into(), rat(size));
            r.insert("max_witness".into(), doc::certificate_doc(witness));
        }
        UpperSize::Unbounded => {
            r.insert("max".into(), json!("unbounded"));
        }
    }
    Ok(Outcome::holds(Value::Object(r)))
}

fn load_valid(path: &Path) -> Result<GarblingCertificate, CliError> {
    let cert = doc::load_certificate(path)?;
    let check = cert.verify();
    if !check.is_valid() {
        return Err(CliError::Input(format!(
            "{} is not a valid certificate: {}",
            path.display(),
            check.violations.join("; ")
        )));
    }
    Ok(cert)
}

pub fn compose_files(first: &Path, second: &Path) -> Run {
    let inner = load_valid(first)?;
    let outer = load_valid(second)?;
    let composed = compose(&inner, &outer)?;
    let bound = inner.size() * outer.size();
    let ok = composed.verify().is_valid() && composed.size() <= bound;
    let mut doc = doc::certificate_doc(&composed);
    doc["size_bound"] = rat(&bound);
    Ok(Outcome::when(ok, doc))
}

pub fn conditional_to(cert_path: &Path) -> Run {
    let cert = load_valid(cert_path)?;
    let conditional = to_conditional(cert.reference(), &cert)?;
    let checks = conditional.conditions(cert.garbled())?;
    let mut doc = doc::conditional_doc(&conditional);
    if let Some(alpha) = conditional.event_probability() {
        doc["alpha"] = rat(&alpha);
    }
    doc["checks"] = json!({
        "marginal": checks.marginal,
        "constant_event": checks.constant_event,
        "uninformative_event": checks.uninformative_event,
        "dominates": checks.dominates,
    });
    Ok(Outcome::when(checks.all(), doc))
}

pub fn conditional_from(conditional_path: &Path, pi_path: &Path) -> Run {
    let conditional = doc::load_conditional(conditional_path)?;
    let pi = doc::load_experiment(pi_path)?;
    let checks = conditional.conditions(&pi)?;
    if !checks.all() {
        let mut r = report("conditional-from");
        r.insert("holds".into(), json!(false));
        r.insert(
            "checks".into(),
            json!({
                "marginal": checks.marginal,
                "constant_event": checks.constant_event,
                "uninformative_event": checks.uninformative_event,
                "dominates": checks.dominates,
            }),
        );
        return Ok(Outcome::fails(Value::Object(r)));
    }
    let cert = from_conditional(&conditional, conditional.reference(), &pi)?;
    Ok(Outcome::when(cert.verify().is_valid(), doc::certificate_doc(&cert)))
}

pub fn show_posteriors(path: &Path, prior: &Prior) -> Run {
    let e = doc::load_experiment(path)?;
    let dist = posteriors(&e, prior)?;
    Ok(Outcome::holds(doc::posteriors_doc(&e, &dist)))
}

/// The generators are either an experiment (whose posteriors under
/// `prior` are used) or a JSON array of beliefs.
pub fn hull_check(path: &Path, point: &[Rational], prior: Option<&Prior>) -> Run {
    let value = doc::read_json(path)?;
    let generators = if value.is_array() {
        doc::belief_list(&value)?
    } else {
        let e = doc::parse_experiment(&value)?;
        let prior = prior
            .ok_or_else(|| CliError::Input("--prior is required when the generators are an experiment".into()))?;
        posteriors(&e, prior)?.beliefs()
    };
    let mut r = report("hull-check");
    r.insert("point".into(), rats(point));
    r.insert("generators".into(), matrix(&generators));
    Ok(match hull_decision(point, &generators)? {
        HullDecision::Member(cert) => {
            r.insert("member".into(), json!(cert.verify()));
            r.insert("coefficients".into(), rats(&cert.coefficients));
            Outcome::holds(Value::Object(r))
        }
        HullDecision::Separated { normal, offset } => {
            r.insert("member".into(), json!(false));
            r.insert("normal".into(), rats(&normal));
            r.insert("offset".into(), rat(&offset));
            Outcome::fails(Value::Object(r))
        }
    })
}

pub fn beliefs_check(a: &Path, b: &Path, prior: &Prior) -> Run {
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    Ok(match decide_weighted_beliefs(&pi, &reference, prior)? {
        BeliefOrder::Coupled(coupling) => Outcome::holds(doc::coupling_doc(&coupling)),
        BeliefOrder::Separated { .. } => {
            let mut r = report("beliefs-check");
            r.insert("holds".into(), json!(false));
            r.insert("separation".into(), separation(&pi, &reference, prior)?);
            Outcome::fails(Value::Object(r))
        }
    })
}

pub fn show_value(problem_path: &Path, experiment_path: &Path) -> Run {
    let problem = doc::load_problem(problem_path)?;
    let e = doc::load_experiment(experiment_path)?;
    let (v, policy) = value(&problem, &e)?;
    let plan: serde_json::Map<String, Value> = e
        .signals()
        .iter()
        .enumerate()
        .map(|(s, name)| (name.clone(), json!(problem.actions()[policy.action(s)])))
        .collect();
    let mut r = report("value");
    r.insert("value".into(), rat(&v));
    r.insert("policy".into(), Value::Object(plan));
    Ok(Outcome::holds(Value::Object(r)))
}

fn bound_fields(r: &mut serde_json::Map<String, Value>, b: &garbling::value::BoundReport) {
    r.insert("beta".into(), rat(&b.beta));
    r.insert("reference_value".into(), rat(&b.reference_value));
    r.insert("garbled_value".into(), rat(&b.garbled_value));
    r.insert("null_value".into(), rat(&b.null_value));
    r.insert("slack".into(), rat(&b.slack));
    r.insert("holds".into(), json!(b.holds));
}

pub fn bound_verify(problem_path: &Path, a: &Path, b: &Path, beta: &Rational) -> Run {
    let problem = doc::load_problem(problem_path)?;
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    let bound = verify_bound(&problem, &pi, &reference, beta)?;
    let mut r = report("bound-verify");
    bound_fields(&mut r, &bound);
    Ok(Outcome::when(bound.holds, Value::Object(r)))
}

/// On success the output is itself a decision problem document, with the
/// violated bound attached, so it can be fed back to `bound-verify`.
pub fn bound_falsify(a: &Path, b: &Path, beta: &Rational) -> Run {
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    Ok(match falsify_bound(&pi, &reference, beta)? {
        Some(problem) => {
            let bound = verify_bound(&problem, &pi, &reference, beta)?;
            let mut violation = serde_json::Map::new();
            bound_fields(&mut violation, &bound);
            let mut doc = doc::problem_doc(&problem);
            doc["violation"] = Value::Object(violation);
            Outcome::fails(doc)
        }
        None => {
            let mut r = report("bound-falsify");
            r.insert("beta".into(), rat(beta));
            r.insert("holds".into(), json!(true));
            r.insert(
                "note".into(),
                json!("the diluted experiment is a Blackwell garbling of the reference, so no decision problem violates the bound"),
            );
            Outcome::holds(Value::Object(r))
        }
    })
}

pub fn dilute_file(path: &Path, beta: &Rational) -> Run {
    let e = doc::load_experiment(path)?;
    Ok(Outcome::holds(doc::experiment_doc(&dilute(&e, beta)?)))
}

pub fn eta(path: &Path, chain_path: &Path, tol: f64, max_iter: usize) -> Run {
    let e = doc::load_experiment(path)?;
    let chain = doc::load_chain(chain_path)?;
    let limit = eta_limit(&chain, &e, tol, max_iter)?;
    let mut r = report("eta");
    r.insert("points".into(), matrix(limit.set.points()));
    r.insert("iterations".into(), json!(limit.iterations));
    r.insert("gap".into(), json!(limit.gap));
    r.insert("converged".into(), json!(limit.converged));
    Ok(Outcome::holds(Value::Object(r)))
}

pub fn merge_horizon(path: &Path, chain_path: &Path, eps: f64, n_max: usize) -> Run {
    let e = doc::load_experiment(path)?;
    let chain = doc::load_chain(chain_path)?;
    let merging = merging_horizon(&chain, &e, eps, n_max)?;
    let mut r = report("merge-horizon");
    r.insert("horizon".into(), json!(merging.horizon));
    r.insert("distances".into(), json!(merging.distances));
    r.insert("monotone".into(), json!(merging.monotone));
    Ok(Outcome::holds(Value::Object(r)))
}

pub fn stopping(problem_path: &Path, path: &Path, chain_path: &Path, horizon: usize) -> Run {
    let problem = doc::load_problem(problem_path)?;
    let e = doc::load_experiment(path)?;
    let chain = doc::load_chain(chain_path)?;
    let game = StoppingProblem::new(problem, chain, horizon)?;
    let mut r = report("stopping");
    r.insert("horizon".into(), json!(horizon));
    r.insert("value".into(), rat(&stopping_value(&game, &e)?));
    Ok(Outcome::holds(Value::Object(r)))
}

pub fn find_counterexample(a: &Path, b: &Path, prior: &Prior) -> Run {
    let pi = doc::load_experiment(a)?;
    let reference = doc::load_experiment(b)?;
    let mut r = report("counterexample");
    let Some(found) = counterexample(&pi, &reference, prior)? else {
        r.insert("found".into(), json!(false));
        r.insert(
            "note".into(),
            json!("the first experiment is a weighted garbling of the second"),
        );
        return Ok(Outcome::fails(Value::Object(r)));
    };
    let game = StoppingProblem::new(found.problem.clone(), found.chain.clone(), 0)?;
    let values = COUNTEREXAMPLE_HORIZONS
        .iter()
        .map(|&t| {
            let game = game.with_horizon(t);
            Ok(json!({
                "horizon": t,
                "garbled": rat(&stopping_value(&game, &pi)?),
                "reference": rat(&stopping_value(&game, &reference)?),
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    r.insert("found".into(), json!(true));
    r.insert("problem".into(), doc::problem_doc(&found.problem));
    r.insert("chain".into(), doc::chain_doc(&found.chain));
    r.insert("signal".into(), json!(pi.signals()[found.signal]));
    r.insert("belief".into(), rats(&found.belief));
    r.insert("normal".into(), rats(&found.normal));
    r.insert("offset".into(), rat(&found.offset));
    r.insert("values".into(), Value::Array(values));
    Ok(Outcome::holds(Value::Object(r)))
}
