//! Dense two-phase simplex over exact rationals with Bland's pivoting rule.
//!
//! All variables are non-negative; the objective is maximized.

use num::{BigRational, One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    n_cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v /= &p;
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Reduced costs of `cost` with respect to the current basis.
    fn reduced_costs(&self, cost: &[Q]) -> Vec<Q> {
        let mut r = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (rj, a) in r.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *rj -= cb * a;
                }
            }
        }
        r
    }

    /// Maximizes `cost . x` over columns allowed by `usable`. Returns false
    /// when unbounded.
    fn optimize(&mut self, cost: &[Q], usable: &[bool]) -> bool {
        loop {
            let r = self.reduced_costs(cost);
            let Some(col) = (0..self.n_cols).find(|&j| usable[j] && r[j].is_positive()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

impl LinearProgram {
    pub fn new(n_vars: usize, objective: Vec<Q>) -> Self {
        assert_eq!(objective.len(), n_vars);
        LinearProgram {
            n_vars,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<Q>, relation: Relation, rhs: Q) {
        assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome {
        let n = self.n_vars;
        let m = self.constraints.len();
        // Column layout: originals, one slack/surplus per inequality, then artificials.
        let n_slack = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut needs_artificial = Vec::with_capacity(m);
        let mut slack_col = n;
        let mut basis = vec![usize::MAX; m];
        for (i, c) in self.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sign = if flip { -Q::one() } else { Q::one() };
            let mut row: Vec<Q> = c.coeffs.iter().map(|a| a * &sign).collect();
            row.resize(n + n_slack, Q::zero());
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match c.relation {
                Relation::Eq => {}
                _ => {
                    let s = if c.relation == Relation::Le { Q::one() } else { -Q::one() };
                    row[slack_col] = s * &sign;
                    if relation == Relation::Le {
                        basis[i] = slack_col;
                    }
                    slack_col += 1;
                }
            }
            needs_artificial.push(relation != Relation::Le);
            rows.push(row);
            rhs.push(&c.rhs * &sign);
        }
        let n_art = needs_artificial.iter().filter(|&&a| a).count();
        let n_cols = n + n_slack + n_art;
        let mut art = n + n_slack;
        for (i, row) in rows.iter_mut().enumerate() {
            row.resize(n_cols, Q::zero());
            if needs_artificial[i] {
                row[art] = Q::one();
                basis[i] = art;
                art += 1;
            }
        }
        let mut t = Tableau {
            rows,
            rhs,
            basis,
            n_cols,
        };

        if n_art > 0 {
            let mut phase1 = vec![Q::zero(); n_cols];
            for c in phase1.iter_mut().skip(n + n_slack) {
                *c = -Q::one();
            }
            let usable = vec![true; n_cols];
            t.optimize(&phase1, &usable);
            let infeasibility: Q = t
                .basis
                .iter()
                .zip(&t.rhs)
                .filter(|(&b, _)| b >= n + n_slack)
                .map(|(_, v)| v.clone())
                .sum();
            if infeasibility.is_positive() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut i = 0;
            while i < t.rows.len() {
                if t.basis[i] >= n + n_slack {
                    match (0..n + n_slack).find(|&j| !t.rows[i][j].is_zero()) {
                        Some(j) => {
                            t.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            // redundant row
                            t.rows.remove(i);
                            t.rhs.remove(i);
                            t.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut cost = self.objective.clone();
        cost.resize(n_cols, Q::zero());
        let usable: Vec<bool> = (0..n_cols).map(|j| j < n + n_slack).collect();
        if !t.optimize(&cost, &usable) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); n];
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                x[b] = t.rhs[i].clone();
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(2, vec![q(3, 1), q(5, 1)]);
        lp.add(vec![q(1, 1), q(0, 1)], Relation::Le, q(4, 1));
        lp.add(vec![q(0, 1), q(2, 1)], Relation::Le, q(12, 1));
        lp.add(vec![q(3, 1), q(2, 1)], Relation::Le, q(18, 1));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(2, 1), q(6, 1)],
                value: q(36, 1)
            }
        );
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y s.t. x + y >= 1/3, x - y = 1/6
        let mut lp = LinearProgram::new(2, vec![q(-1, 1), q(-1, 1)]);
        lp.add(vec![q(1, 1), q(1, 1)], Relation::Ge, q(1, 3));
        lp.add(vec![q(1, 1), q(-1, 1)], Relation::Eq, q(1, 6));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![q(1, 4), q(1, 12)]);
                assert_eq!(value, q(-1, 3));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1, vec![q(1, 1)]);
        lp.add(vec![q(1, 1)], Relation::Le, q(1, 1));
        lp.add(vec![q(1, 1)], Relation::Ge, q(2, 1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(2, vec![q(1, 1), q(0, 1)]);
        lp.add(vec![q(1, 1), q(-1, 1)], Relation::Le, q(1, 1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // max x s.t. -x >= -5/2
        let mut lp = LinearProgram::new(1, vec![q(1, 1)]);
        lp.add(vec![q(-1, 1)], Relation::Ge, q(-5, 2));
        assert_eq!(
            lp.solve(),
            LpOutcome::Optimal {
                x: vec![q(5, 2)],
                value: q(5, 2)
            }
        );
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2, vec![q(1, 1), q(0, 1)]);
        lp.add(vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1));
        lp.add(vec![q(2, 1), q(2, 1)], Relation::Eq, q(2, 1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 1)),
            other => panic!("{other:?}"),
        }
    }
}
