//! JSON documents. Every number is written as an exact rational string
//! ("3/5", "-1", "0"); on input, JSON numbers and decimal strings are
//! accepted as well.

use std::path::Path;

use garbling::beliefs::{CouplingCertificate, PosteriorDistribution};
use garbling::dynamics::MarkovChain;
use garbling::experiment::{DecisionProblem, Experiment, Prior};
use garbling::order::{ConditionalExperiment, GarblingCertificate};
use garbling::{parse_rational, Rational};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

/// A JSON value together with its location, for error messages.
struct Node<'a> {
    value: &'a Value,
    path: String,
}

fn schema(path: &str, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: if path.is_empty() { "$".into() } else { path.into() },
        message: message.into(),
    }
}

impl<'a> Node<'a> {
    fn root(value: &'a Value) -> Self {
        Node {
            value,
            path: String::new(),
        }
    }

    fn object(&self) -> Result<&'a Map<String, Value>, CliError> {
        self.value
            .as_object()
            .ok_or_else(|| schema(&self.path, "expected an object"))
    }

    fn field(&self, name: &str) -> Result<Node<'a>, CliError> {
        let path = format!("{}.{name}", self.path);
        let value = self
            .object()?
            .get(name)
            .ok_or_else(|| schema(&path, "missing field"))?;
        Ok(Node { value, path })
    }

    fn has(&self, name: &str) -> bool {
        self.value.get(name).is_some()
    }

    fn array(&self) -> Result<&'a [Value], CliError> {
        self.value
            .as_array()
            .map(Vec::as_slice)
            .ok_or_else(|| schema(&self.path, "expected an array"))
    }

    fn rational(&self) -> Result<Rational, CliError> {
        let text = match self.value {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(schema(&self.path, "expected a number or a rational string")),
        };
        parse_rational(&text).map_err(|e| schema(&self.path, e.to_string()))
    }

    fn rationals(&self) -> Result<Vec<Rational>, CliError> {
        self.array()?
            .iter()
            .enumerate()
            .map(|(i, value)| {
                let path = format!("{}[{i}]", self.path);
                Node { value, path }.rational()
            })
            .collect()
    }

    fn matrix(&self) -> Result<Vec<Vec<Rational>>, CliError> {
        self.array()?
            .iter()
            .enumerate()
            .map(|(i, value)| {
                let path = format!("{}[{i}]", self.path);
                Node { value, path }.rationals()
            })
            .collect()
    }

    fn strings(&self) -> Result<Vec<String>, CliError> {
        self.array()?
            .iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| schema(&format!("{}[{i}]", self.path), "expected a string"))
            })
            .collect()
    }

    fn expect_kind(&self, kind: &str) -> Result<(), CliError> {
        match self.object()?.get("kind") {
            None => Ok(()),
            Some(Value::String(k)) if k == kind => Ok(()),
            Some(other) => Err(schema(
                &format!("{}.kind", self.path),
                format!("expected \"{kind}\", found {other}"),
            )),
        }
    }
}

fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Attaches the document path to a library error.
fn at(path: &str, err: garbling::Error) -> CliError {
    schema(path, err.to_string())
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", path.display())))
}

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn rats(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat).collect())
}

pub fn matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| rats(row)).collect())
}

// Experiments.

pub fn experiment_doc(e: &Experiment) -> Value {
    json!({
        "kind": "experiment",
        "states": e.states(),
        "signals": e.signals(),
        "matrix": matrix(e.rows()),
    })
}

fn experiment_at(node: Node) -> Result<Experiment, CliError> {
    node.expect_kind("experiment")?;
    let rows = node.field("matrix")?.matrix()?;
    let labels = |name: &str, prefix: &str, n: usize| -> Result<Vec<String>, CliError> {
        if node.has(name) {
            node.field(name)?.strings()
        } else {
            Ok(default_labels(prefix, n))
        }
    };
    let states = labels("states", "t", rows.len())?;
    let signals = labels("signals", "s", rows.first().map_or(0, Vec::len))?;
    Experiment::new(states, signals, rows).map_err(|e| at(&node.path, e))
}

pub fn parse_experiment(value: &Value) -> Result<Experiment, CliError> {
    experiment_at(Node::root(value))
}

pub fn load_experiment(path: &Path) -> Result<Experiment, CliError> {
    parse_experiment(&read_json(path)?)
}

/// SHA-256 of the canonical serialization of an experiment.
pub fn digest(e: &Experiment) -> String {
    let canonical = serde_json::to_string(&experiment_doc(e)).expect("values serialize");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

// Priors: either a JSON array in a file or an inline comma-separated list.

pub fn parse_prior(spec: &str) -> Result<Prior, CliError> {
    let path = Path::new(spec);
    let weights = if path.is_file() {
        let value = read_json(path)?;
        let node = Node::root(&value);
        match value.as_object() {
            Some(_) => {
                node.expect_kind("prior")?;
                node.field("weights")?.rationals()?
            }
            None => node.rationals()?,
        }
    } else {
        spec.split(',')
            .enumerate()
            .map(|(i, t)| parse_rational(t).map_err(|e| schema(&format!("prior[{i}]"), e.to_string())))
            .collect::<Result<_, _>>()?
    };
    Prior::new(weights).map_err(|e| at("prior", e))
}

pub fn parse_point(spec: &str) -> Result<Vec<Rational>, CliError> {
    spec.split(',')
        .enumerate()
        .map(|(i, t)| parse_rational(t).map_err(|e| schema(&format!("point[{i}]"), e.to_string())))
        .collect()
}

pub fn belief_list(value: &Value) -> Result<Vec<Vec<Rational>>, CliError> {
    Node::root(value).matrix()
}

// Decision problems.

pub fn problem_doc(d: &DecisionProblem) -> Value {
    json!({
        "kind": "decision_problem",
        "actions": d.actions(),
        "payoffs": matrix(d.payoffs()),
        "prior": rats(d.prior().weights()),
    })
}

pub fn load_problem(path: &Path) -> Result<DecisionProblem, CliError> {
    let value = read_json(path)?;
    let node = Node::root(&value);
    node.expect_kind("decision_problem")?;
    let payoffs = node.field("payoffs")?.matrix()?;
    let prior_node = node.field("prior")?;
    let prior = Prior::new(prior_node.rationals()?).map_err(|e| at(&prior_node.path, e))?;
    let actions = if node.has("actions") {
        node.field("actions")?.strings()?
    } else {
        default_labels("a", payoffs.len())
    };
    DecisionProblem::new(actions, payoffs, prior).map_err(|e| at("", e))
}

// Markov chains.

pub fn chain_doc(c: &MarkovChain) -> Value {
    json!({
        "kind": "chain",
        "states": c.states(),
        "transition": matrix(c.rows()),
    })
}

pub fn load_chain(path: &Path) -> Result<MarkovChain, CliError> {
    let value = read_json(path)?;
    let node = Node::root(&value);
    node.expect_kind("chain")?;
    let rows = node.field("transition")?.matrix()?;
    let states = if node.has("states") {
        node.field("states")?.strings()?
    } else {
        default_labels("t", rows.len())
    };
    MarkovChain::new(states, rows).map_err(|e| at("", e))
}

// Garbling certificates.

pub fn certificate_doc(c: &GarblingCertificate) -> Value {
    json!({
        "kind": "certificate",
        "garbled": experiment_doc(c.garbled()),
        "reference": experiment_doc(c.reference()),
        "garbled_digest": digest(c.garbled()),
        "reference_digest": digest(c.reference()),
        "psi": matrix(c.joint()),
        "gamma": rats(&c.weight()),
        "phi": matrix(&c.kernel()),
        "beta": rat(&c.size()),
    })
}

/// Rebuilds a certificate from ψ and checks that the embedded digests,
/// γ, φ and β agree with it. Validity of the garbling itself is left to
/// the caller.
pub fn parse_certificate(value: &Value) -> Result<GarblingCertificate, CliError> {
    let node = Node::root(value);
    node.expect_kind("certificate")?;
    let garbled = experiment_at(node.field("garbled")?)?;
    let reference = experiment_at(node.field("reference")?)?;
    for (name, e) in [("garbled_digest", &garbled), ("reference_digest", &reference)] {
        let field = node.field(name)?;
        if field.value.as_str() != Some(digest(e).as_str()) {
            return Err(schema(&field.path, "digest does not match the embedded experiment"));
        }
    }
    let psi = node.field("psi")?.matrix()?;
    let cert = GarblingCertificate::new(garbled, reference, psi).map_err(|e| at(".psi", e))?;
    if node.field("gamma")?.rationals()? != cert.weight() {
        return Err(schema(".gamma", "does not equal the column sums of psi"));
    }
    if node.field("phi")?.matrix()? != cert.kernel() {
        return Err(schema(".phi", "does not equal psi divided by gamma"));
    }
    if node.field("beta")?.rational()? != cert.size() {
        return Err(schema(".beta", "does not equal the largest weight"));
    }
    Ok(cert)
}

pub fn load_certificate(path: &Path) -> Result<GarblingCertificate, CliError> {
    parse_certificate(&read_json(path)?)
}

// Conditional experiments.

pub fn conditional_doc(c: &ConditionalExperiment) -> Value {
    json!({
        "kind": "conditional",
        "reference": experiment_doc(c.reference()),
        "reference_digest": digest(c.reference()),
        "observed": matrix(c.observed()),
        "unobserved": matrix(c.unobserved()),
    })
}

pub fn load_conditional(path: &Path) -> Result<ConditionalExperiment, CliError> {
    let value = read_json(path)?;
    let node = Node::root(&value);
    node.expect_kind("conditional")?;
    let reference = experiment_at(node.field("reference")?)?;
    let field = node.field("reference_digest")?;
    if field.value.as_str() != Some(digest(&reference).as_str()) {
        return Err(schema(&field.path, "digest does not match the embedded experiment"));
    }
    let observed = node.field("observed")?.matrix()?;
    let unobserved = node.field("unobserved")?.matrix()?;
    ConditionalExperiment::new(reference, observed, unobserved).map_err(|e| at("", e))
}

// Beliefs.

pub fn posteriors_doc(e: &Experiment, d: &PosteriorDistribution) -> Value {
    let atoms: Vec<Value> = d
        .atoms
        .iter()
        .map(|a| {
            json!({
                "signals": a.signals.iter().map(|&s| e.signals()[s].clone()).collect::<Vec<_>>(),
                "belief": rats(&a.belief),
                "probability": rat(&a.probability),
            })
        })
        .collect();
    json!({
        "kind": "report",
        "report": "posteriors",
        "prior": rats(&d.prior),
        "atoms": atoms,
    })
}

pub fn coupling_doc(c: &CouplingCertificate) -> Value {
    let side = |d: &PosteriorDistribution| -> Value {
        json!({
            "beliefs": matrix(&d.beliefs()),
            "probabilities": rats(&d.probabilities()),
        })
    };
    json!({
        "kind": "coupling",
        "source": side(&c.source),
        "target": side(&c.target),
        "joint": matrix(&c.joint),
        "size": rat(&c.size()),
    })
}
