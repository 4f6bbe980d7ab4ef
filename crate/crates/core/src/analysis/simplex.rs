//! Phase-1 simplex over exact rationals.
//!
//! Dense tableau, Bland's rule for both entering and leaving choices, so the
//! method terminates on degenerate problems. Only feasibility is decided.

use crate::exact::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// A feasibility problem over variables that are either free or nonnegative.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    pub nonnegative: Vec<bool>,
    pub constraints: Vec<Constraint>,
}

impl FeasibilityProblem {
    pub fn new(nonnegative: Vec<bool>) -> Self {
        FeasibilityProblem {
            nonnegative,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        debug_assert_eq!(coeffs.len(), self.nonnegative.len());
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// A point satisfying every constraint, or `None` when none exists.
    pub fn solve(&self) -> Option<Vec<Rational>> {
        Tableau::build(self).phase_one()
    }
}

struct Tableau {
    /// `rows[i]` holds the constraint row followed by its right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs of the phase-1 objective followed by minus its value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
    /// For each structural variable: column of its positive part and, for
    /// free variables, of its negative part.
    columns: Vec<(usize, Option<usize>)>,
    width: usize,
}

impl Tableau {
    fn build(problem: &FeasibilityProblem) -> Tableau {
        let mut columns = Vec::with_capacity(problem.nonnegative.len());
        let mut next = 0;
        for &nonneg in &problem.nonnegative {
            if nonneg {
                columns.push((next, None));
                next += 1;
            } else {
                columns.push((next, Some(next + 1)));
                next += 2;
            }
        }
        let structural = next;
        let slack_count = problem
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();

        // Rows whose slack ends with coefficient +1 after making the rhs
        // nonnegative start with that slack basic; the rest get artificials.
        let mut needs_artificial = Vec::with_capacity(problem.constraints.len());
        for c in &problem.constraints {
            let flip = c.rhs.is_negative();
            let slack_sign_positive = match c.relation {
                Relation::Le => !flip,
                Relation::Ge => flip,
                Relation::Eq => false,
            };
            needs_artificial.push(!(c.relation != Relation::Eq && slack_sign_positive));
        }
        let artificial_count = needs_artificial.iter().filter(|&&a| a).count();
        let width = structural + slack_count + artificial_count;

        let mut rows = Vec::with_capacity(problem.constraints.len());
        let mut basis = Vec::with_capacity(problem.constraints.len());
        let mut slack_col = structural;
        let mut art_col = structural + slack_count;
        for (c, &artificial) in problem.constraints.iter().zip(&needs_artificial) {
            let mut row = vec![Rational::zero(); width + 1];
            let sign = if c.rhs.is_negative() { -Rational::one() } else { Rational::one() };
            for (k, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let (pos, neg) = columns[k];
                let v = a * &sign;
                if let Some(neg) = neg {
                    row[neg] = -&v;
                }
                row[pos] = v;
            }
            row[width] = &c.rhs * &sign;
            match c.relation {
                Relation::Le | Relation::Ge => {
                    let base = if c.relation == Relation::Le { Rational::one() } else { -Rational::one() };
                    row[slack_col] = base * &sign;
                    if !artificial {
                        basis.push(slack_col);
                    }
                    slack_col += 1;
                }
                Relation::Eq => {}
            }
            if artificial {
                row[art_col] = Rational::one();
                basis.push(art_col);
                art_col += 1;
            }
            rows.push(row);
        }

        // Phase-1 cost: sum of artificials, priced out against the basis.
        let first_art = structural + slack_count;
        let mut cost = vec![Rational::zero(); width + 1];
        for (row, &b) in rows.iter().zip(&basis) {
            if b >= first_art {
                for (j, v) in row.iter().enumerate() {
                    if (j < first_art || j == width) && !v.is_zero() {
                        cost[j] = &cost[j] - v;
                    }
                }
            }
        }

        Tableau {
            rows,
            cost,
            basis,
            columns,
            width,
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let inv = self.rows[r][e].recip().expect("pivot element is nonzero");
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let factor = row[e].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &nonzero {
                row[j] = &row[j] - &(&factor * &pivot_row[j]);
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost);
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    fn phase_one(mut self) -> Option<Vec<Rational>> {
        let width = self.width;
        loop {
            let entering = (0..width).find(|&j| self.cost[j].is_negative());
            let Some(e) = entering else { break };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[e].is_positive() {
                    continue;
                }
                let ratio = &row[width] / &row[e];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // The phase-1 objective is bounded below by zero.
            let (r, _) = leave.expect("phase-1 problem is bounded");
            self.pivot(r, e);
        }
        if !self.cost[width].is_zero() {
            return None;
        }
        let mut values = vec![Rational::zero(); width];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            values[b] = row[width].clone();
        }
        Some(
            self.columns
                .iter()
                .map(|&(pos, neg)| match neg {
                    Some(neg) => &values[pos] - &values[neg],
                    None => values[pos].clone(),
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn satisfies(p: &FeasibilityProblem, x: &[Rational]) -> bool {
        p.nonnegative.iter().zip(x).all(|(&nn, v)| !nn || !v.is_negative())
            && p.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    #[test]
    fn interval_infeasible() {
        let mut p = FeasibilityProblem::new(vec![false]);
        p.push(vec![q(1)], Relation::Le, q(1));
        p.push(vec![q(-1)], Relation::Le, q(-2));
        assert!(p.solve().is_none());
    }

    #[test]
    fn free_variable_goes_negative() {
        let mut p = FeasibilityProblem::new(vec![false, true]);
        p.push(vec![q(1), q(1)], Relation::Eq, q(-3));
        p.push(vec![q(0), q(1)], Relation::Ge, q(2));
        let x = p.solve().unwrap();
        assert!(satisfies(&p, &x), "{x:?}");
        assert!(x[0] <= q(-5));
    }

    #[test]
    fn empty_problem_is_feasible() {
        assert_eq!(FeasibilityProblem::new(vec![]).solve(), Some(vec![]));
        assert_eq!(FeasibilityProblem::new(vec![true, false]).solve(), Some(vec![q(0), q(0)]));
    }

    #[test]
    fn degenerate_equalities() {
        // Redundant, degenerate equality rows.
        let mut p = FeasibilityProblem::new(vec![true; 3]);
        p.push(vec![q(1), q(1), q(0)], Relation::Eq, q(0));
        p.push(vec![q(2), q(2), q(0)], Relation::Eq, q(0));
        p.push(vec![q(0), q(0), q(0)], Relation::Eq, q(0));
        p.push(vec![q(1), q(-1), q(1)], Relation::Eq, q(1));
        let x = p.solve().unwrap();
        assert!(satisfies(&p, &x));
    }
}
