use garbling::beliefs::check_weighted_beliefs;
use garbling::corpus::Generator;
use garbling::dynamics::counterexample;
use garbling::experiment::Prior;
use garbling::numerics::ratio;
use garbling::order::{check_blackwell, check_weighted, min_size, to_conditional};
use garbling::value::{falsify_bound, random_decision_problem, verify_bound};
use serde_json::{json, Value};

use crate::commands::Outcome;
use crate::{doc, CliError};

#[derive(Default)]
struct Tally {
    rows: Vec<(&'static str, usize, usize)>,
}

impl Tally {
    fn record(&mut self, name: &'static str, ok: bool) {
        let row = match self.rows.iter().position(|r| r.0 == name) {
            Some(i) => &mut self.rows[i],
            None => {
                self.rows.push((name, 0, 0));
                self.rows.last_mut().expect("just pushed")
            }
        };
        row.1 += 1;
        row.2 += usize::from(!ok);
    }

    fn failures(&self) -> usize {
        self.rows.iter().map(|r| r.2).sum()
    }
}

/// Cross-checks the LP and posterior-hull paths, certificate
/// serialization, the payoff guarantee and the stopping counterexample on
/// a seeded corpus of experiment pairs.
pub fn run(seed: u64, count: usize) -> Result<Outcome, CliError> {
    let mut g = Generator::new(seed);
    let pairs = g.pairs(count);
    let mut tally = Tally::default();
    for (i, pair) in pairs.iter().enumerate() {
        let (pi, reference) = (&pair.garbled, &pair.reference);
        let states = pi.state_count();
        let weighted = check_weighted(pi, reference)?;
        for _ in 0..2 {
            let prior = g.prior(states, 12);
            let beliefs = check_weighted_beliefs(pi, reference, &prior)?;
            tally.record("order-paths-agree", beliefs.is_some() == weighted.is_some());
        }
        let minimal = min_size(pi, reference)?;
        let blackwell = check_blackwell(pi, reference)?.is_some();
        let unit = minimal.as_ref().is_some_and(|(size, _)| *size == ratio(1, 1));
        tally.record("blackwell-iff-size-one", blackwell == unit);

        if let Some((size, cert)) = minimal {
            let text = serde_json::to_string(&doc::certificate_doc(&cert)).expect("values serialize");
            let value: Value = serde_json::from_str(&text).expect("own output parses");
            let back = doc::parse_certificate(&value)?;
            tally.record("certificate-round-trip", back == cert && back.verify().is_valid());
            for k in 0..5u64 {
                let problem = random_decision_problem(seed ^ ((i as u64) << 8 | k), states, 3, 12)?;
                tally.record(
                    "bound-sound-at-min-size",
                    verify_bound(&problem, pi, reference, &size)?.holds,
                );
            }
            let conditional = to_conditional(reference, &cert)?;
            tally.record("conditional-conditions", conditional.conditions(pi)?.all());
        } else {
            let beta = ratio(2, 1);
            let falsified = match falsify_bound(pi, reference, &beta)? {
                Some(problem) => !verify_bound(&problem, pi, reference, &beta)?.holds,
                None => false,
            };
            tally.record("bound-falsified", falsified);
            let found = counterexample(pi, reference, &Prior::uniform(states))?;
            tally.record("stopping-counterexample", found.is_some());
        }
    }
    let checks: Vec<Value> = tally
        .rows
        .iter()
        .map(|(name, checked, failed)| json!({"check": name, "checked": checked, "failed": failed}))
        .collect();
    let failures = tally.failures();
    let doc = json!({
        "kind": "report",
        "report": "selftest",
        "seed": seed,
        "pairs": count,
        "checks": checks,
        "failures": failures,
    });
    Ok(if failures == 0 {
        Outcome {
            doc,
            status: crate::commands::Status::Holds,
        }
    } else {
        Outcome {
            doc,
            status: crate::commands::Status::Fails,
        }
    })
}
