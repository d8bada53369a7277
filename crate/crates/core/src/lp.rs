//! Dense two-phase simplex for the handful-of-variables programs used by the
//! exposed-point analysis. Bland's rule throughout; degenerate vertices are
//! the norm here, not the exception.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// `maximize c.x` subject to linear rows; variables are free unless marked
/// nonnegative.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    objective: Vec<f64>,
    nonneg: Vec<bool>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn new(vars: usize) -> Self {
        Self {
            objective: vec![0.0; vars],
            nonneg: vec![false; vars],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        assert_eq!(objective.len(), self.vars());
        self.objective = objective;
        self
    }

    pub fn nonnegative(mut self, var: usize) -> Self {
        self.nonneg[var] = true;
        self
    }

    pub fn all_nonnegative(mut self) -> Self {
        self.nonneg.iter_mut().for_each(|v| *v = true);
        self
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.vars());
        self.rows.push((coeffs, relation, rhs));
    }

    pub fn solve(&self) -> Result<Outcome> {
        Tableau::build(self).run()
    }
}

struct Tableau {
    /// Column of each original variable's positive part, and its negative
    /// part for free variables.
    columns: Vec<(usize, Option<usize>)>,
    artificial_from: usize,
    width: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let mut columns = Vec::with_capacity(lp.vars());
        let mut next = 0;
        for &nonneg in &lp.nonneg {
            if nonneg {
                columns.push((next, None));
                next += 1;
            } else {
                columns.push((next, Some(next + 1)));
                next += 2;
            }
        }
        let structural = next;
        let slack_count = lp.rows.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let artificial_from = structural + slack_count;

        let mut normalized: Vec<(Vec<f64>, Relation, f64)> = lp
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let artificial_count = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let width = artificial_from + artificial_count;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut rhs = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let mut slack = structural;
        let mut artificial = artificial_from;
        for (a, rel, b) in normalized.drain(..) {
            let mut row = vec![0.0; width];
            for (j, &(pos, neg)) in columns.iter().enumerate() {
                row[pos] = a[j];
                if let Some(neg) = neg {
                    row[neg] = -a[j];
                }
            }
            match rel {
                Relation::Le => {
                    row[slack] = 1.0;
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                    row[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
                Relation::Eq => {
                    row[artificial] = 1.0;
                    basis.push(artificial);
                    artificial += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }

        let mut cost = vec![0.0; width];
        for (j, &(pos, neg)) in columns.iter().enumerate() {
            // the tableau minimizes, so negate the objective
            cost[pos] = -lp.objective[j];
            if let Some(neg) = neg {
                cost[neg] = lp.objective[j];
            }
        }
        Self {
            columns,
            artificial_from,
            width,
            rows,
            rhs,
            basis,
            cost,
        }
    }

    fn run(mut self) -> Result<Outcome> {
        if self.width > self.artificial_from {
            let phase_one: Vec<f64> = (0..self.width)
                .map(|j| if j >= self.artificial_from { 1.0 } else { 0.0 })
                .collect();
            if !self.optimize(&phase_one, self.width)? {
                return Err(Error::Solver("phase one cannot be unbounded".into()));
            }
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(&b, _)| b >= self.artificial_from)
                .map(|(_, &v)| v)
                .sum();
            if infeasibility > FEAS_TOL {
                return Ok(Outcome::Infeasible);
            }
            self.drive_out_artificials();
        }
        let cost = self.cost.clone();
        if !self.optimize(&cost, self.artificial_from)? {
            return Ok(Outcome::Unbounded);
        }
        let mut column_values = vec![0.0; self.width];
        for (&b, &v) in self.basis.iter().zip(&self.rhs) {
            column_values[b] = v;
        }
        let x: Vec<f64> = self
            .columns
            .iter()
            .map(|&(pos, neg)| column_values[pos] - neg.map_or(0.0, |n| column_values[n]))
            .collect();
        let value = -self
            .basis
            .iter()
            .zip(&self.rhs)
            .map(|(&b, &v)| self.cost[b] * v)
            .sum::<f64>();
        Ok(Outcome::Optimal { x, value })
    }

    /// Minimizes `cost` using only columns below `allowed`. Returns `false`
    /// when the objective is unbounded below.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(entering) =
                (0..allowed).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j) < -PIVOT_TOL)
            else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][entering];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i] / a;
                    let better = match leaving {
                        None => true,
                        Some((k, best)) => {
                            ratio < best - PIVOT_TOL || (ratio <= best + PIVOT_TOL && self.basis[i] < self.basis[k])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(false);
            };
            self.pivot(row, entering);
        }
        Err(Error::Solver(format!("no convergence after {MAX_PIVOTS} pivots")))
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        cost[j]
            - self
                .basis
                .iter()
                .zip(&self.rows)
                .map(|(&b, row)| cost[b] * row[j])
                .sum::<f64>()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                self.rhs[i] -= factor * pivot_rhs;
                if self.rhs[i].abs() < 1e-15 {
                    self.rhs[i] = 0.0;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Pivots zero-valued artificials out of the basis, dropping redundant rows.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_from {
                match (0..self.artificial_from).find(|&j| self.rows[i][j].abs() > PIVOT_TOL) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.rhs.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
