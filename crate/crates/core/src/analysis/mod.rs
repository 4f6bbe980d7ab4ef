//! Redundancy detection, equivalence of inequality systems and numeric
//! validation of projections.
//!
//! Implication between rows is conic dominance: a target row is implied by a
//! set of rows when a nonnegative combination of them reproduces the target's
//! variable coefficients exactly and its bound is no larger than the target's
//! (componentwise on symbols when they are nonnegative). Every such decision is
//! backed by a [`ConicCertificate`] that re-verifies with exact arithmetic.

pub mod simplex;

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::model::{canonicalize_row, Inequality, InequalitySystem};
use simplex::{FeasibilityProblem, Relation};

/// Nonnegative multipliers over a list of rows, keyed by row index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConicCertificate {
    pub multipliers: BTreeMap<usize, Rational>,
}

impl ConicCertificate {
    /// The combination of `rows` described by this certificate.
    pub fn combine(&self, rows: &[Inequality], variables: usize, symbols: usize) -> Inequality {
        let mut acc = Inequality::zero(variables, symbols);
        for (&i, k) in &self.multipliers {
            acc.add_scaled(&rows[i], k);
        }
        acc
    }

    /// Re-checks the certificate from scratch.
    pub fn verify(&self, target: &Inequality, rows: &[Inequality], symbols_nonnegative: bool) -> bool {
        if self
            .multipliers
            .iter()
            .any(|(&i, k)| i >= rows.len() || k.is_negative())
        {
            return false;
        }
        let acc = self.combine(rows, target.coeffs.len(), target.bound.terms.len());
        acc.coeffs == target.coeffs
            && acc.bound.constant <= target.bound.constant
            && if symbols_nonnegative {
                acc.bound.terms.iter().zip(&target.bound.terms).all(|(a, t)| a <= t)
            } else {
                acc.bound.terms == target.bound.terms
            }
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            self.multipliers
                .iter()
                .map(|(i, k)| (i.to_string(), Value::String(k.to_string())))
                .collect(),
        )
    }
}

/// Finds a point satisfying a system whose bounds are purely numeric.
///
/// All variables are free. Returns `Ok(None)` when the system is infeasible.
pub fn lp_feasible(system: &InequalitySystem) -> Result<Option<Vec<Rational>>> {
    if system
        .rows()
        .iter()
        .any(|r| r.bound.terms.iter().any(|t| !t.is_zero()))
    {
        return Err(Error::Usage("lp_feasible needs numeric bounds; found symbolic terms".into()));
    }
    let mut problem = FeasibilityProblem::new(vec![false; system.variables().len()]);
    for row in system.rows() {
        problem.push(row.coeffs.clone(), Relation::Le, row.bound.constant.clone());
    }
    Ok(problem.solve())
}

/// Looks for `λ >= 0` with `Σ λ_j rows_j` dominating `target` (see the module
/// documentation). Returns `None` when no such combination exists.
pub fn conic_decompose(
    target: &Inequality,
    rows: &[Inequality],
    symbols_nonnegative: bool,
) -> Option<ConicCertificate> {
    let variables = target.coeffs.len();
    let symbols = target.bound.terms.len();

    if target.is_trivial() && target.bound.constant >= Rational::zero() {
        let vacuous = if symbols_nonnegative {
            target.bound.terms.iter().all(|t| !t.is_negative())
        } else {
            target.bound.terms.iter().all(Rational::is_zero)
        };
        if vacuous {
            return Some(ConicCertificate::default());
        }
    }

    // With nonnegative symbols, a symbol the target lacks can only come from
    // rows that all carry it with a nonnegative sign; such rows get λ = 0.
    let mut candidates: Vec<usize> = (0..rows.len()).collect();
    if symbols_nonnegative {
        for s in 0..symbols {
            if !target.bound.terms[s].is_zero() {
                continue;
            }
            if candidates.iter().all(|&j| !rows[j].bound.terms[s].is_negative()) {
                candidates.retain(|&j| rows[j].bound.terms[s].is_zero());
            }
        }
    }

    let mut problem = FeasibilityProblem::new(vec![true; candidates.len()]);
    let column = |pick: &dyn Fn(&Inequality) -> &Rational| -> Vec<Rational> {
        candidates.iter().map(|&j| pick(&rows[j]).clone()).collect()
    };
    for v in 0..variables {
        problem.push(column(&|r| &r.coeffs[v]), Relation::Eq, target.coeffs[v].clone());
    }
    let symbol_relation = if symbols_nonnegative { Relation::Le } else { Relation::Eq };
    for s in 0..symbols {
        let coeffs = column(&|r| &r.bound.terms[s]);
        if coeffs.iter().all(Rational::is_zero) && target.bound.terms[s].is_zero() {
            continue;
        }
        problem.push(coeffs, symbol_relation, target.bound.terms[s].clone());
    }
    problem.push(column(&|r| &r.bound.constant), Relation::Le, target.bound.constant.clone());

    let lambda = problem.solve()?;
    let multipliers = candidates
        .into_iter()
        .zip(lambda)
        .filter(|(_, k)| !k.is_zero())
        .collect();
    Some(ConicCertificate { multipliers })
}

/// A row dropped by [`remove_redundant`] with the certificate justifying it.
/// Certificate indices refer to the rows of the returned system.
pub type Removal = (Inequality, ConicCertificate);

/// Drops rows implied by the remaining ones until none is.
///
/// Rows are canonicalized and sorted first. Each pass scans from the
/// canonically-latest row backwards, so among mutually redundant rows the
/// latest goes first. The output is sorted canonically.
pub fn remove_redundant(system: &InequalitySystem) -> (InequalitySystem, Vec<Removal>) {
    let nonneg = system.symbols_nonnegative();
    let mut rows: Vec<Inequality> = system.rows().iter().map(canonicalize_row).collect();
    rows.sort();

    let mut removed_rows = Vec::new();
    let mut active: Vec<Inequality> = Vec::with_capacity(rows.len());
    for row in rows {
        if active.last() == Some(&row) {
            removed_rows.push(row);
        } else {
            active.push(row);
        }
    }

    loop {
        let mut changed = false;
        let mut i = active.len();
        while i > 0 {
            i -= 1;
            let target = active.remove(i);
            if conic_decompose(&target, &active, nonneg).is_some() {
                removed_rows.push(target);
                changed = true;
            } else {
                active.insert(i, target);
            }
        }
        if !changed {
            break;
        }
    }

    let removed = removed_rows
        .into_iter()
        .map(|row| {
            let cert = conic_decompose(&row, &active, nonneg)
                .expect("kept rows generate every removed row");
            (row, cert)
        })
        .collect();
    (system.with_rows(active), removed)
}

#[derive(Clone, Debug)]
pub struct Equivalence {
    pub equivalent: bool,
    /// For each row of the first system, its certificate over the second.
    pub first_in_second: Vec<Option<ConicCertificate>>,
    /// For each row of the second system, its certificate over the first.
    pub second_in_first: Vec<Option<ConicCertificate>>,
}

impl Equivalence {
    pub fn to_json(&self) -> Value {
        let certs = |v: &[Option<ConicCertificate>]| {
            Value::Array(
                v.iter()
                    .map(|c| c.as_ref().map_or(Value::Null, ConicCertificate::to_json))
                    .collect(),
            )
        };
        json!({
            "equivalent": self.equivalent,
            "first_in_second": certs(&self.first_in_second),
            "second_in_first": certs(&self.second_in_first),
        })
    }
}

/// Decides mutual conic implication of two systems over the same declarations.
pub fn systems_equivalent(a: &InequalitySystem, b: &InequalitySystem) -> Result<Equivalence> {
    if !a.same_declarations(b) {
        return Err(Error::Usage(
            "systems_equivalent: variables or symbols differ between the two systems".into(),
        ));
    }
    let nonneg = a.symbols_nonnegative() && b.symbols_nonnegative();
    let first_in_second: Vec<_> = a
        .rows()
        .iter()
        .map(|r| conic_decompose(r, b.rows(), nonneg))
        .collect();
    let second_in_first: Vec<_> = b
        .rows()
        .iter()
        .map(|r| conic_decompose(r, a.rows(), nonneg))
        .collect();
    let equivalent = first_in_second.iter().chain(&second_in_first).all(Option::is_some);
    Ok(Equivalence {
        equivalent,
        first_in_second,
        second_in_first,
    })
}

/// 64-bit linear congruential generator used for reproducible sampling.
///
/// `state <- 6364136223846793005 * state + 1442695040888963407 (mod 2^64)`,
/// starting from the seed. Each draw advances the state once and yields
/// `k / 16` where `k` is the top six bits of the new state (0..=63).
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    pub fn next_rational(&mut self) -> Rational {
        let k = self.next_u64() >> 58;
        Rational::new(k as i64, 16).expect("nonzero denominator")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disagreement {
    pub trial: u64,
    pub symbol_values: Vec<Rational>,
    pub point: Vec<Rational>,
    pub in_projection: bool,
    /// Values for the eliminated variables when the original is feasible.
    pub witness: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub trials: u64,
    pub accepted: u64,
    pub disagreements: Vec<Disagreement>,
}

impl ValidationReport {
    pub fn to_json(&self) -> Value {
        let strings = |v: &[Rational]| Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect());
        json!({
            "trials": self.trials,
            "accepted": self.accepted,
            "disagreements": self.disagreements.iter().map(|d| json!({
                "trial": d.trial,
                "symbol_values": strings(&d.symbol_values),
                "point": strings(&d.point),
                "in_projection": d.in_projection,
                "witness": d.witness.as_deref().map_or(Value::Null, strings),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Samples symbol values and kept-variable points and checks that membership
/// in `projected` matches feasibility of `original` in the eliminated
/// variables.
///
/// Per trial the generator is drawn first for every symbol in declared order,
/// then for every kept variable in declared order.
pub fn validate_projection(
    original: &InequalitySystem,
    projected: &InequalitySystem,
    trials: u64,
    seed: u64,
) -> Result<ValidationReport> {
    let kept = original.kept_indices();
    let elim = original.eliminate_indices();
    let kept_names: Vec<_> = kept.iter().map(|&i| original.variables()[i].clone()).collect();
    if projected.variables() != kept_names.as_slice() || projected.symbols() != original.symbols() {
        return Err(Error::Usage(
            "projected system must be declared over the original's kept variables and symbols".into(),
        ));
    }

    let mut rng = Lcg::new(seed);
    let mut report = ValidationReport {
        trials,
        accepted: 0,
        disagreements: Vec::new(),
    };
    for trial in 0..trials {
        let symbol_values: Vec<Rational> = (0..original.symbols().len()).map(|_| rng.next_rational()).collect();
        let point: Vec<Rational> = (0..kept.len()).map(|_| rng.next_rational()).collect();

        let in_projection = projected
            .rows()
            .iter()
            .all(|r| r.lhs_at(&point) <= r.bound.evaluate(&symbol_values));

        let mut problem = FeasibilityProblem::new(vec![false; elim.len()]);
        for row in original.rows() {
            let fixed: Rational = kept.iter().zip(&point).map(|(&i, x)| &row.coeffs[i] * x).sum();
            problem.push(
                elim.iter().map(|&i| row.coeffs[i].clone()).collect(),
                Relation::Le,
                row.bound.evaluate(&symbol_values) - fixed,
            );
        }
        let witness = problem.solve();
        if in_projection {
            report.accepted += 1;
        }
        if in_projection != witness.is_some() {
            report.disagreements.push(Disagreement {
                trial,
                symbol_values,
                point,
                in_projection,
                witness,
            });
        }
    }
    Ok(report)
}
