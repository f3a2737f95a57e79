#![allow(dead_code)]

use garbling::numerics::{ratio, LinearProgram, LpOutcome, Relation, Sense};
use garbling::Rational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small LP with integer data in [−4, 4]; the last variable is free when
/// `allow_free` and the coin says so.
pub fn random_lp(seed: u64, allow_free: bool) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=4);
    let int = |rng: &mut ChaCha8Rng| ratio(rng.gen_range(-4..=4), 1);
    let objective = (0..n).map(|_| int(&mut rng)).collect();
    let mut lp = LinearProgram::new(n);
    for _ in 0..m {
        let coefficients = (0..n).map(|_| int(&mut rng)).collect();
        let relation = match rng.gen_range(0..3) {
            0 => Relation::Le,
            1 => Relation::Eq,
            _ => Relation::Ge,
        };
        let rhs = int(&mut rng);
        lp.push(coefficients, relation, rhs);
    }
    let mut lp = if rng.gen_bool(0.5) {
        lp.minimize(objective)
    } else {
        lp.maximize(objective)
    };
    if allow_free && rng.gen_bool(0.3) {
        lp = lp.free(n - 1);
    }
    lp
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn satisfies(relation: Relation, lhs: &Rational, rhs: &Rational) -> bool {
    match relation {
        Relation::Le => lhs <= rhs,
        Relation::Eq => lhs == rhs,
        Relation::Ge => lhs >= rhs,
    }
}

fn feasible(lp: &LinearProgram, x: &[Rational]) -> bool {
    x.iter().zip(&lp.nonnegative).all(|(v, &nn)| !nn || !v.is_negative())
        && lp
            .constraints
            .iter()
            .all(|c| satisfies(c.relation, &dot(&c.coefficients, x), &c.rhs))
}

/// Solves a square system by Gauss–Jordan elimination; `None` if singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let v = &a[col][j] * &f;
                    a[r][j] -= v;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some(b)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Feasible vertices of an LP whose variables are all nonnegative, by
/// enumerating every choice of n tight hyperplanes.
pub fn vertices(lp: &LinearProgram) -> Vec<Vec<Rational>> {
    assert!(lp.nonnegative.iter().all(|&b| b));
    let n = lp.variables();
    let mut planes: Vec<(Vec<Rational>, Rational)> = lp
        .constraints
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs.clone()))
        .collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = ratio(1, 1);
        planes.push((e, Rational::zero()));
    }
    let mut out = Vec::new();
    for choice in subsets(planes.len(), n) {
        let a = choice.iter().map(|&i| planes[i].0.clone()).collect();
        let b = choice.iter().map(|&i| planes[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if feasible(lp, &x) && !out.contains(&x) {
                out.push(x);
            }
        }
    }
    out
}

/// Checks a solver outcome against vertex enumeration and re-derives the
/// witness conditions from scratch. Returns a description of the first
/// discrepancy.
pub fn audit_lp(lp: &LinearProgram, outcome: &LpOutcome) -> Result<(), String> {
    let all_nonneg = lp.nonnegative.iter().all(|&b| b);
    let verts = if all_nonneg { Some(vertices(lp)) } else { None };
    let sense = if lp.sense == Sense::Minimize { 1 } else { -1 };
    match outcome {
        LpOutcome::Optimal(sol) => {
            if !feasible(lp, &sol.x) {
                return Err("optimal point infeasible".into());
            }
            if dot(&lp.objective, &sol.x) != sol.objective {
                return Err("objective mismatch".into());
            }
            let yb: Rational = lp.constraints.iter().zip(&sol.duals).map(|(c, y)| y * &c.rhs).sum();
            if yb != sol.objective {
                return Err(format!("dual objective {yb} != primal {}", sol.objective));
            }
            for j in 0..lp.variables() {
                let ya: Rational = lp
                    .constraints
                    .iter()
                    .zip(&sol.duals)
                    .map(|(c, y)| y * &c.coefficients[j])
                    .sum();
                let reduced = (&lp.objective[j] - ya) * ratio(sense, 1);
                let ok = if lp.nonnegative[j] { !reduced.is_negative() } else { reduced.is_zero() };
                if !ok {
                    return Err(format!("dual infeasible at column {j}"));
                }
            }
            for (c, y) in lp.constraints.iter().zip(&sol.duals) {
                let y = y * ratio(sense, 1);
                let ok = match c.relation {
                    Relation::Le => !y.is_positive(),
                    Relation::Ge => !y.is_negative(),
                    Relation::Eq => true,
                };
                if !ok {
                    return Err("dual multiplier has the wrong sign".into());
                }
            }
            if let Some(verts) = verts {
                let best = verts
                    .iter()
                    .map(|v| dot(&lp.objective, v) * ratio(sense, 1))
                    .min()
                    .ok_or("optimal reported but no vertex")?;
                if best != &sol.objective * ratio(sense, 1) {
                    return Err(format!("vertex optimum {} differs", best * ratio(sense, 1)));
                }
            }
            Ok(())
        }
        LpOutcome::Infeasible(cert) => {
            let y = &cert.multipliers;
            for (c, yi) in lp.constraints.iter().zip(y) {
                let ok = match c.relation {
                    Relation::Le => !yi.is_positive(),
                    Relation::Ge => !yi.is_negative(),
                    Relation::Eq => true,
                };
                if !ok {
                    return Err("Farkas multiplier sign".into());
                }
            }
            for j in 0..lp.variables() {
                let ya: Rational = lp
                    .constraints
                    .iter()
                    .zip(y)
                    .map(|(c, yi)| yi * &c.coefficients[j])
                    .sum();
                let ok = if lp.nonnegative[j] { !ya.is_positive() } else { ya.is_zero() };
                if !ok {
                    return Err(format!("Farkas column {j} violates sign"));
                }
            }
            let yb: Rational = lp.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
            if !yb.is_positive() {
                return Err("Farkas yb not positive".into());
            }
            if let Some(verts) = verts {
                if !verts.is_empty() {
                    return Err("infeasible reported but a vertex exists".into());
                }
            }
            Ok(())
        }
        LpOutcome::Unbounded(ray) => {
            if !feasible(lp, &ray.point) {
                return Err("ray base infeasible".into());
            }
            for (d, &nn) in ray.direction.iter().zip(&lp.nonnegative) {
                if nn && d.is_negative() {
                    return Err("ray leaves the orthant".into());
                }
            }
            for c in &lp.constraints {
                let ad = dot(&c.coefficients, &ray.direction);
                let ok = match c.relation {
                    Relation::Le => !ad.is_positive(),
                    Relation::Eq => ad.is_zero(),
                    Relation::Ge => !ad.is_negative(),
                };
                if !ok {
                    return Err("ray leaves the feasible set".into());
                }
            }
            if !(dot(&lp.objective, &ray.direction) * ratio(sense, 1)).is_negative() {
                return Err("ray does not improve".into());
            }
            Ok(())
        }
    }
}
