//! `garble`: decide, certify and apply order relations between finite
//! statistical experiments from JSON documents.
//!
//! Exit codes: 0 when the relation holds or the computation succeeded,
//! 1 when the relation is certified false, 2 on any input error.

mod commands;
mod doc;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use garbling::{parse_rational, Rational};

use commands::{Outcome, Relation, Status, Witness};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] garbling::Error),
}

fn rational_arg(text: &str) -> Result<Rational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(name = "garble", version, about = "Weighted garbling and Blackwell order toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Is A a (weighted) garbling of B? Emits a certificate or a refutation.
    Check {
        relation: Relation,
        a: PathBuf,
        b: PathBuf,
        /// Which certificate to return for the weighted order.
        #[arg(long, value_enum, default_value = "any")]
        witness: Witness,
    },
    /// Re-verify a certificate document.
    Verify { certificate: PathBuf },
    /// The interval of sizes with which A is a weighted garbling of B.
    SizeInterval { a: PathBuf, b: PathBuf },
    /// Chain two certificates (A→B, B→C) into one for A→C.
    Compose { first: PathBuf, second: PathBuf },
    /// Convert between weighted garbling and conditional informativeness.
    Conditional {
        #[command(subcommand)]
        direction: Direction,
    },
    /// Posterior beliefs of an experiment under a prior.
    Posteriors {
        experiment: PathBuf,
        /// Comma-separated weights or a JSON file.
        #[arg(long)]
        prior: String,
    },
    /// Is a belief in the convex hull of the generators?
    HullCheck {
        /// A JSON array of beliefs, or an experiment (with --prior).
        generators: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        prior: Option<String>,
    },
    /// Decide the weighted order through posterior supports.
    BeliefsCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        prior: String,
    },
    /// Optimal expected payoff and policy.
    Value { problem: PathBuf, experiment: PathBuf },
    /// Check V(B) ≥ (1/β)V(A) + (1 − 1/β)V(∅) on one decision problem.
    BoundVerify {
        problem: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        beta: Rational,
    },
    /// Search for a decision problem violating the bound at β.
    BoundFalsify {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        beta: Rational,
    },
    /// Reveal the experiment with probability 1/β and nothing otherwise.
    Dilute {
        experiment: PathBuf,
        #[arg(long, value_parser = rational_arg)]
        beta: Rational,
    },
    /// Long-run reachable belief set under a hidden Markov state.
    Eta {
        experiment: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Signal-string length after which posteriors forget the initial state.
    MergeHorizon {
        experiment: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        nmax: usize,
    },
    /// Value of the finite-horizon stopping problem.
    Stopping {
        problem: PathBuf,
        experiment: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// A stopping problem on which A earns strictly more than B.
    Counterexample {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        prior: String,
    },
    /// Run the cross-module consistency battery on a seeded corpus.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

#[derive(Subcommand)]
enum Direction {
    /// Certificate → conditional experiment.
    To { certificate: PathBuf },
    /// Conditional experiment and A → certificate.
    From { conditional: PathBuf, a: PathBuf },
}

fn run(command: Command) -> Result<Outcome, CliError> {
    use commands::*;
    match command {
        Command::Check {
            relation,
            a,
            b,
            witness,
        } => check(relation, witness, &a, &b),
        Command::Verify { certificate } => verify(&certificate),
        Command::SizeInterval { a, b } => size_range(&a, &b),
        Command::Compose { first, second } => compose_files(&first, &second),
        Command::Conditional { direction } => match direction {
            Direction::To { certificate } => conditional_to(&certificate),
            Direction::From { conditional, a } => conditional_from(&conditional, &a),
        },
        Command::Posteriors { experiment, prior } => {
            show_posteriors(&experiment, &doc::parse_prior(&prior)?)
        }
        Command::HullCheck {
            generators,
            point,
            prior,
        } => {
            let prior = prior.as_deref().map(doc::parse_prior).transpose()?;
            hull_check(&generators, &doc::parse_point(&point)?, prior.as_ref())
        }
        Command::BeliefsCheck { a, b, prior } => beliefs_check(&a, &b, &doc::parse_prior(&prior)?),
        Command::Value {
            problem,
            experiment,
        } => show_value(&problem, &experiment),
        Command::BoundVerify {
            problem,
            a,
            b,
            beta,
        } => bound_verify(&problem, &a, &b, &beta),
        Command::BoundFalsify { a, b, beta } => bound_falsify(&a, &b, &beta),
        Command::Dilute { experiment, beta } => dilute_file(&experiment, &beta),
        Command::Eta {
            experiment,
            chain,
            tol,
            max_iter,
        } => eta(&experiment, &chain, tol, max_iter),
        Command::MergeHorizon {
            experiment,
            chain,
            eps,
            nmax,
        } => merge_horizon(&experiment, &chain, eps, nmax),
        Command::Stopping {
            problem,
            experiment,
            chain,
            horizon,
        } => stopping(&problem, &experiment, &chain, horizon),
        Command::Counterexample { a, b, prior } => {
            find_counterexample(&a, &b, &doc::parse_prior(&prior)?)
        }
        Command::Selftest { seed, pairs } => selftest::run(seed, pairs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&outcome.doc).expect("values serialize")
            );
            match outcome.status {
                Status::Holds => ExitCode::SUCCESS,
                Status::Fails => ExitCode::from(1),
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
