//! Dense two-phase simplex over exact rationals.
//!
//! Pivoting follows Bland's rule in both phases, so the method terminates
//! on every input. Each outcome carries a witness:
//!
//! * `Optimal`: primal point and dual multipliers with equal objectives,
//! * `Infeasible`: Farkas multipliers,
//! * `Unbounded`: a feasible point and an improving ray.
//!
//! Sign conventions for multipliers `y` (one per constraint, in input
//! order): for `≤` rows `y ≤ 0`, for `≥` rows `y ≥ 0`, `=` rows are free.
//! A Farkas certificate then satisfies `yᵀA_j ≤ 0` on nonnegative columns,
//! `yᵀA_j = 0` on free columns and `yᵀb > 0`.

use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub nonnegative: Vec<bool>,
}

impl LinearProgram {
    /// A feasibility problem over `variables` nonnegative variables with a
    /// zero objective.
    pub fn new(variables: usize) -> Self {
        LinearProgram {
            sense: Sense::Minimize,
            objective: vec![Rational::zero(); variables],
            constraints: Vec::new(),
            nonnegative: vec![true; variables],
        }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(mut self, objective: Vec<Rational>) -> Self {
        self.sense = Sense::Minimize;
        self.objective = objective;
        self
    }

    pub fn maximize(mut self, objective: Vec<Rational>) -> Self {
        self.sense = Sense::Maximize;
        self.objective = objective;
        self
    }

    pub fn free(mut self, variable: usize) -> Self {
        self.nonnegative[variable] = false;
        self
    }

    pub fn push(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::Empty("linear program"));
        }
        if self.nonnegative.len() != n {
            return Err(Error::Dimension(format!(
                "{} sign flags for {n} variables",
                self.nonnegative.len()
            )));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint {i} has {} coefficients for {n} variables",
                    row.coefficients.len()
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// Exact feasibility of `x`.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        if x.len() != self.variables() {
            return false;
        }
        let signs_ok = x
            .iter()
            .zip(&self.nonnegative)
            .all(|(v, &nonneg)| !nonneg || !v.is_negative());
        signs_ok
            && self.constraints.iter().all(|row| {
                let lhs = dot(&row.coefficients, x);
                match row.relation {
                    Relation::Le => lhs <= row.rhs,
                    Relation::Eq => lhs == row.rhs,
                    Relation::Ge => lhs >= row.rhs,
                }
            })
    }

    /// `yᵀA` as a vector over variables.
    fn combine(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.variables()];
        for (row, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (acc, a) in out.iter_mut().zip(&row.coefficients) {
                *acc += yi * a;
            }
        }
        out
    }

    fn multiplier_signs_ok(&self, y: &[Rational]) -> bool {
        y.len() == self.constraints.len()
            && self
                .constraints
                .iter()
                .zip(y)
                .all(|(row, yi)| match row.relation {
                    Relation::Le => !yi.is_positive(),
                    Relation::Ge => !yi.is_negative(),
                    Relation::Eq => true,
                })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub x: Vec<Rational>,
    pub objective: Rational,
    /// Dual multipliers; `duals · b` equals `objective`.
    pub duals: Vec<Rational>,
}

impl OptimalSolution {
    /// Primal feasibility, dual feasibility and equal objectives.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if !lp.is_feasible(&self.x) || lp.objective_value(&self.x) != self.objective {
            return false;
        }
        let signs = match lp.sense {
            Sense::Minimize => lp.multiplier_signs_ok(&self.duals),
            Sense::Maximize => {
                let flipped: Vec<Rational> = self.duals.iter().map(|v| -v).collect();
                lp.multiplier_signs_ok(&flipped)
            }
        };
        if !signs {
            return false;
        }
        let ya = lp.combine(&self.duals);
        let reduced_ok = lp
            .objective
            .iter()
            .zip(&ya)
            .zip(&lp.nonnegative)
            .all(|((c, a), &nonneg)| {
                let reduced = c - a;
                match (nonneg, lp.sense) {
                    (false, _) => reduced.is_zero(),
                    (true, Sense::Minimize) => !reduced.is_negative(),
                    (true, Sense::Maximize) => !reduced.is_positive(),
                }
            });
        let yb: Rational = lp
            .constraints
            .iter()
            .zip(&self.duals)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        reduced_ok && yb == self.objective
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if !lp.multiplier_signs_ok(&self.multipliers) {
            return false;
        }
        let ya = lp.combine(&self.multipliers);
        let columns_ok = ya.iter().zip(&lp.nonnegative).all(|(v, &nonneg)| {
            if nonneg {
                !v.is_positive()
            } else {
                v.is_zero()
            }
        });
        let yb: Rational = lp
            .constraints
            .iter()
            .zip(&self.multipliers)
            .map(|(row, y)| y * &row.rhs)
            .sum();
        columns_ok && yb.is_positive()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

impl Ray {
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        if !lp.is_feasible(&self.point) || self.direction.len() != lp.variables() {
            return false;
        }
        let signs_ok = self
            .direction
            .iter()
            .zip(&lp.nonnegative)
            .all(|(d, &nonneg)| !nonneg || !d.is_negative());
        let rows_ok = lp.constraints.iter().all(|row| {
            let ad = dot(&row.coefficients, &self.direction);
            match row.relation {
                Relation::Le => !ad.is_positive(),
                Relation::Eq => ad.is_zero(),
                Relation::Ge => !ad.is_negative(),
            }
        });
        let cd = lp.objective_value(&self.direction);
        let improving = match lp.sense {
            Sense::Minimize => cd.is_negative(),
            Sense::Maximize => cd.is_positive(),
        };
        signs_ok && rows_ok && improving
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded(Ray),
}

impl LpOutcome {
    pub fn optimal(self) -> Option<OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible(_))
    }

    /// Re-checks the witness against `lp`.
    pub fn verify(&self, lp: &LinearProgram) -> bool {
        match self {
            LpOutcome::Optimal(sol) => sol.verify(lp),
            LpOutcome::Infeasible(cert) => cert.verify(lp),
            LpOutcome::Unbounded(ray) => ray.verify(lp),
        }
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// Where an original variable lives among the standardized columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    Single(usize),
    Split(usize, usize),
}

struct Tableau {
    /// `rows × (structural + rows + 1)`; the last column is the rhs.
    cells: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    structural: usize,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.cells.len()
    }

    fn rhs(&self, row: usize) -> &Rational {
        self.cells[row].last().expect("rhs column")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.cells[row][col].recip();
        for v in self.cells[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.cells[row].clone();
        for (r, cells) in self.cells.iter_mut().enumerate() {
            if r == row || cells[col].is_zero() {
                continue;
            }
            let factor = cells[col].clone();
            for (v, p) in cells.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[row] = col;
    }

    /// `c_B B⁻¹`, read from the artificial columns which started as the
    /// identity.
    fn multipliers(&self, costs: &[Rational]) -> Vec<Rational> {
        let m = self.rows();
        (0..m)
            .map(|k| {
                (0..m)
                    .map(|i| &costs[self.basis[i]] * &self.cells[i][self.structural + k])
                    .sum()
            })
            .collect()
    }

    fn reduced_cost(&self, costs: &[Rational], col: usize) -> Rational {
        let mut r = costs[col].clone();
        for i in 0..self.rows() {
            let a = &self.cells[i][col];
            if !a.is_zero() {
                r -= &costs[self.basis[i]] * a;
            }
        }
        r
    }

    /// Runs Bland's rule over columns `< limit`. Returns the entering
    /// column of an unbounded direction, if one is found.
    fn optimize(&mut self, costs: &[Rational], limit: usize) -> Option<usize> {
        loop {
            let entering = (0..limit).find(|&j| {
                !self.basis.contains(&j) && self.reduced_cost(costs, j).is_negative()
            })?;
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows() {
                let a = &self.cells[i][entering];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((row, _)) => self.pivot(row, entering),
                None => return Some(entering),
            }
        }
    }

    fn basic_values(&self) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); self.structural + self.rows()];
        for (i, &b) in self.basis.iter().enumerate() {
            values[b] = self.rhs(i).clone();
        }
        values
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.variables();
    let m = lp.constraints.len();

    let mut columns = Vec::with_capacity(n);
    let mut structural = 0;
    for &nonneg in &lp.nonnegative {
        if nonneg {
            columns.push(Column::Single(structural));
            structural += 1;
        } else {
            columns.push(Column::Split(structural, structural + 1));
            structural += 2;
        }
    }
    let slack_start = structural;
    let slack_rows: Vec<usize> = (0..m)
        .filter(|&i| lp.constraints[i].relation != Relation::Eq)
        .collect();
    structural += slack_rows.len();

    let width = structural + m + 1;
    let mut signs = Vec::with_capacity(m);
    let mut cells = Vec::with_capacity(m);
    for (i, row) in lp.constraints.iter().enumerate() {
        let sign = if row.rhs.is_negative() { -1 } else { 1 };
        signs.push(sign);
        let flip = |v: &Rational| if sign < 0 { -v } else { v.clone() };
        let mut cells_row = vec![Rational::zero(); width];
        for (j, a) in row.coefficients.iter().enumerate() {
            match columns[j] {
                Column::Single(c) => cells_row[c] = flip(a),
                Column::Split(p, q) => {
                    cells_row[p] = flip(a);
                    cells_row[q] = -flip(a);
                }
            }
        }
        if let Some(k) = slack_rows.iter().position(|&r| r == i) {
            let slack = match row.relation {
                Relation::Le => Rational::one(),
                Relation::Ge => -Rational::one(),
                Relation::Eq => unreachable!(),
            };
            cells_row[slack_start + k] = flip(&slack);
        }
        cells_row[structural + i] = Rational::one();
        cells_row[width - 1] = flip(&row.rhs);
        cells.push(cells_row);
    }

    let mut tableau = Tableau {
        cells,
        basis: (structural..structural + m).collect(),
        structural,
    };

    // Phase one: minimize the sum of artificials.
    let mut phase_one = vec![Rational::zero(); structural + m];
    for c in phase_one.iter_mut().skip(structural) {
        *c = Rational::one();
    }
    tableau.optimize(&phase_one, structural + m);
    let infeasibility: Rational = (0..m)
        .map(|i| &phase_one[tableau.basis[i]] * tableau.rhs(i))
        .sum();
    if infeasibility.is_positive() {
        let y = tableau.multipliers(&phase_one);
        let multipliers = y
            .into_iter()
            .zip(&signs)
            .map(|(v, &s)| if s < 0 { -v } else { v })
            .collect();
        let cert = FarkasCertificate { multipliers };
        return checked(LpOutcome::Infeasible(cert), lp);
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // with no structural entry are redundant and keep their artificial.
    for row in 0..m {
        if tableau.basis[row] < structural {
            continue;
        }
        if let Some(col) = (0..structural).find(|&j| !tableau.cells[row][j].is_zero()) {
            tableau.pivot(row, col);
        }
    }

    // Phase two on the minimization form.
    let minimizing: Vec<Rational> = match lp.sense {
        Sense::Minimize => lp.objective.clone(),
        Sense::Maximize => lp.objective.iter().map(|c| -c).collect(),
    };
    let mut costs = vec![Rational::zero(); structural + m];
    for (j, c) in minimizing.iter().enumerate() {
        match columns[j] {
            Column::Single(k) => costs[k] = c.clone(),
            Column::Split(p, q) => {
                costs[p] = c.clone();
                costs[q] = -c;
            }
        }
    }

    let unbounded = tableau.optimize(&costs, structural);
    let values = tableau.basic_values();
    let collapse = |v: &[Rational]| -> Vec<Rational> {
        columns
            .iter()
            .map(|col| match *col {
                Column::Single(k) => v[k].clone(),
                Column::Split(p, q) => &v[p] - &v[q],
            })
            .collect()
    };
    let x = collapse(&values);

    if let Some(entering) = unbounded {
        let mut direction = vec![Rational::zero(); structural + m];
        direction[entering] = Rational::one();
        for i in 0..m {
            let b = tableau.basis[i];
            direction[b] = -tableau.cells[i][entering].clone();
        }
        let ray = Ray {
            point: x,
            direction: collapse(&direction),
        };
        return checked(LpOutcome::Unbounded(ray), lp);
    }

    let y = tableau.multipliers(&costs);
    let duals = y
        .into_iter()
        .zip(&signs)
        .map(|(v, &s)| {
            let v = if s < 0 { -v } else { v };
            match lp.sense {
                Sense::Minimize => v,
                Sense::Maximize => -v,
            }
        })
        .collect();
    let objective = lp.objective_value(&x);
    checked(
        LpOutcome::Optimal(OptimalSolution {
            x,
            objective,
            duals,
        }),
        lp,
    )
}

fn checked(outcome: LpOutcome, lp: &LinearProgram) -> Result<LpOutcome> {
    if outcome.verify(lp) {
        Ok(outcome)
    } else {
        Err(Error::Internal(format!(
            "simplex witness failed re-verification: {outcome:?}"
        )))
    }
}
