//! Exact rational simplex (two phases, Bland's rule).
//!
//! Solves `maximize c·x subject to A x (<= | =) b, x >= 0` with `b >= 0`,
//! which covers the feasibility and weight-extraction programs used by the
//! classical module. Bland's rule makes cycling impossible, so every call
//! terminates; all arithmetic is exact, so faces of the feasible region are
//! decided without a tolerance.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, Rational)>,
    relation: Relation,
    rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    vars: usize,
    rows: Vec<Row>,
    objective: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    /// A program over `vars` nonnegative variables with zero objective.
    pub fn new(vars: usize) -> Self {
        LinearProgram {
            vars,
            rows: Vec::new(),
            objective: vec![Rational::zero(); vars],
        }
    }

    pub fn maximize(&mut self, objective: Vec<Rational>) -> &mut Self {
        assert_eq!(objective.len(), self.vars);
        self.objective = objective;
        self
    }

    /// Adds `Σ coeff_j x_j (relation) rhs`; coefficients are sparse
    /// `(variable, value)` pairs.
    pub fn constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> &mut Self {
        assert!(coeffs.iter().all(|(j, _)| *j < self.vars));
        self.rows.push(Row { coeffs, relation, rhs });
        self
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let mut rows = self.rows.clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if r.rhs.is_negative() {
                match r.relation {
                    Relation::Eq => {
                        r.rhs = -r.rhs.clone();
                        for (_, v) in r.coeffs.iter_mut() {
                            *v = -v.clone();
                        }
                    }
                    Relation::Le => {
                        return Err(Error::Lp(format!(
                            "row {i}: <= constraint with negative right-hand side is not supported"
                        )))
                    }
                }
            }
        }
        Tableau::build(self.vars, &rows).solve(&self.objective)
    }
}

struct Tableau {
    /// Constraint rows; the last entry of each is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    structural: usize,
    artificial_from: usize,
    cols: usize,
}

impl Tableau {
    fn build(vars: usize, rows: &[Row]) -> Self {
        let slacks = rows.iter().filter(|r| r.relation == Relation::Le).count();
        let arts = rows.len() - slacks;
        let artificial_from = vars + slacks;
        let cols = artificial_from + arts;
        let mut t = Vec::with_capacity(rows.len());
        let mut basis = Vec::with_capacity(rows.len());
        let (mut next_slack, mut next_art) = (vars, artificial_from);
        for r in rows {
            let mut row = vec![Rational::zero(); cols + 1];
            for (j, v) in &r.coeffs {
                row[*j] += v;
            }
            row[cols] = r.rhs.clone();
            match r.relation {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            t.push(row);
        }
        Tableau {
            t,
            basis,
            structural: vars,
            artificial_from,
            cols,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.t[r][c];
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns with `allowed[j]`; returns false when
    /// unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            // Reduced cost of column j: c_B·T_j - c_j. Bland: first negative.
            let entering = (0..self.cols).filter(|&j| allowed[j]).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut rc = -cost[j].clone();
                for (row, &b) in self.t.iter().zip(&self.basis) {
                    if !cost[b].is_zero() && !row[j].is_zero() {
                        rc += &cost[b] * &row[j];
                    }
                }
                rc.is_negative()
            });
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn objective_value(&self, cost: &[Rational]) -> Rational {
        self.t
            .iter()
            .zip(&self.basis)
            .map(|(row, &b)| &cost[b] * &row[self.cols])
            .sum()
    }

    fn solve(mut self, objective: &[Rational]) -> Result<LpOutcome> {
        if self.artificial_from < self.cols {
            let mut phase1 = vec![Rational::zero(); self.cols];
            for v in &mut phase1[self.artificial_from..] {
                *v = -Rational::one();
            }
            let all = vec![true; self.cols];
            self.optimize(&phase1, &all);
            if !self.objective_value(&phase1).is_zero() {
                return Ok(LpOutcome::Infeasible);
            }
            // Drive zero-level artificials out of the basis; rows where that is
            // impossible are redundant and dropped.
            let mut i = 0;
            while i < self.t.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.t[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.t.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![Rational::zero(); self.cols];
        cost[..self.structural].clone_from_slice(objective);
        let allowed: Vec<bool> = (0..self.cols).map(|j| j < self.artificial_from).collect();
        if !self.optimize(&cost, &allowed) {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![Rational::zero(); self.structural];
        for (row, &b) in self.t.iter().zip(&self.basis) {
            if b < self.structural {
                x[b] = row[self.cols].clone();
            }
        }
        Ok(LpOutcome::Optimal {
            value: self.objective_value(&cost),
            x,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn optimal(o: LpOutcome) -> (Rational, Vec<Rational>) {
        match o {
            LpOutcome::Optimal { value, x } => (value, x),
            other => panic!("expected optimum, got {other:?}"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![int(3), int(5)])
            .constraint(vec![(0, int(1))], Relation::Le, int(4))
            .constraint(vec![(1, int(2))], Relation::Le, int(12))
            .constraint(vec![(0, int(3)), (1, int(2))], Relation::Le, int(18));
        let (v, x) = optimal(lp.solve().unwrap());
        assert_eq!(v, int(36));
        assert_eq!(x, vec![int(2), int(6)]);
    }

    #[test]
    fn equality_feasibility_with_redundant_row() {
        // x + y = 1, 2x + 2y = 2 (redundant), x - y = 1/2.
        let mut lp = LinearProgram::new(2);
        lp.constraint(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(1))
            .constraint(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(2))
            .constraint(vec![(0, int(1)), (1, int(-1))], Relation::Eq, ratio(1, 2));
        let (_, x) = optimal(lp.solve().unwrap());
        assert_eq!(x, vec![ratio(3, 4), ratio(1, 4)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.constraint(vec![(0, int(1))], Relation::Eq, int(1))
            .constraint(vec![(0, int(1))], Relation::Eq, int(2));
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.maximize(vec![int(1), int(0)])
            .constraint(vec![(1, int(1))], Relation::Le, int(1));
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_equality_rhs_is_flipped() {
        let mut lp = LinearProgram::new(1);
        lp.constraint(vec![(0, int(-2))], Relation::Eq, int(-1));
        let (_, x) = optimal(lp.solve().unwrap());
        assert_eq!(x, vec![ratio(1, 2)]);
        let mut lp = LinearProgram::new(1);
        lp.constraint(vec![(0, int(1))], Relation::Le, int(-1));
        assert!(lp.solve().is_err());
    }

    #[test]
    fn degenerate_program_terminates() {
        // Chvatal's cycling example for the largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.maximize(vec![int(10), int(-57), int(-9), int(-24)]);
        lp.constraint(
            vec![(0, ratio(1, 2)), (1, ratio(-11, 2)), (2, ratio(-5, 2)), (3, int(9))],
            Relation::Le,
            int(0),
        )
        .constraint(
            vec![(0, ratio(1, 2)), (1, ratio(-3, 2)), (2, ratio(-1, 2)), (3, int(1))],
            Relation::Le,
            int(0),
        )
        .constraint(vec![(0, int(1))], Relation::Le, int(1));
        let (v, _) = optimal(lp.solve().unwrap());
        assert_eq!(v, int(1));
    }
}
