//! Dense two-phase simplex for small linear programs
//! `min c·x  s.t.  A x {≤,=,≥} b,  x ≥ 0`.
//!
//! Bland's rule is used for both entering and leaving variables, so the
//! method terminates without anti-cycling perturbations.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;
const FEASIBILITY_TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Number of structural plus slack columns; artificials follow.
    width: usize,
    columns: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.columns]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `< limit`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], limit: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let entering = (0..limit).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                reduced < -PIVOT_TOL
            });
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        if ratio < best - PIVOT_TOL || (ratio <= best + PIVOT_TOL && self.basis[i] < self.basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
        Err(Error::Domain(format!("simplex did not converge in {MAX_PIVOTS} pivots")))
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    let n = lp.objective.len();
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint {i} has {} coefficients, objective has {n}",
                c.coeffs.len()
            )));
        }
    }
    // Normalize to non-negative right-hand sides.
    let normalized: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            if c.rhs < 0.0 {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Eq => Relation::Eq,
                    Relation::Ge => Relation::Le,
                };
                (c.coeffs.iter().map(|v| -v).collect(), flipped, -c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs)
            }
        })
        .collect();

    let slacks = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
    let artificials = normalized.iter().filter(|c| c.1 != Relation::Le).count();
    let width = n + slacks;
    let columns = width + artificials;
    let mut rows = Vec::with_capacity(normalized.len());
    let mut basis = Vec::with_capacity(normalized.len());
    let (mut next_slack, mut next_art) = (n, width);
    for (coeffs, relation, rhs) in &normalized {
        let mut row = vec![0.0; columns + 1];
        row[..n].copy_from_slice(coeffs);
        row[columns] = *rhs;
        match relation {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis,
        width,
        columns,
    };

    if artificials > 0 {
        let mut phase1 = vec![0.0; columns];
        phase1[width..].iter_mut().for_each(|c| *c = 1.0);
        t.optimize(&phase1, columns)?;
        let infeasibility: f64 = (0..t.rows.len())
            .filter(|&i| t.basis[i] >= t.width)
            .map(|i| t.rhs(i))
            .sum();
        if infeasibility > FEASIBILITY_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive remaining (zero-valued) artificials out, dropping redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= t.width {
                match (0..t.width).find(|&j| t.rows[i][j].abs() > PIVOT_TOL) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![0.0; columns];
    cost[..n].copy_from_slice(&lp.objective);
    if !t.optimize(&cost, t.width)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i).max(0.0);
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, c)| a * c).sum();
    Ok(LpOutcome::Optimal { x, value })
}
