//! Textbook Fourier-Motzkin elimination, one variable per round.
//!
//! Every produced row carries a [`Combination`] over the rows of the system
//! that entered [`fme_eliminate_all`].

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis::remove_redundant;
use crate::error::{Error, Result};
use crate::model::{Combination, Inequality, InequalitySystem};
use crate::report::{EliminationReport, RoundStats};

#[derive(Clone, Debug, Default)]
pub struct FmeOptions {
    /// Elimination order; defaults to the eliminate-set order.
    pub order: Option<Vec<String>>,
    /// Drop rows that are vacuous under nonnegative symbols from the final output.
    pub drop_trivial: bool,
    /// Run exact redundancy removal after every round.
    pub prune_each_round: bool,
}

#[derive(Clone, Debug)]
pub struct FmeOutcome {
    pub system: InequalitySystem,
    pub report: EliminationReport,
    /// One per output row.
    pub certificates: Vec<Combination>,
}

type Tracked = (Inequality, Combination);

fn eliminate_column(rows: Vec<Tracked>, col: usize) -> (Vec<Tracked>, RoundStats) {
    let rows_in = rows.len();
    let mut zero = Vec::new();
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for t in rows {
        let c = &t.0.coeffs[col];
        if c.is_positive() {
            positive.push(t);
        } else if c.is_negative() {
            negative.push(t);
        } else {
            zero.push(t);
        }
    }
    let (p, n) = (positive.len(), negative.len());

    let pairs: Vec<Tracked> = positive
        .par_iter()
        .flat_map_iter(|(prow, pcomb)| {
            let pv = prow.coeffs[col].clone();
            negative.iter().map(move |(nrow, ncomb)| {
                let nv = -&nrow.coeffs[col];
                let mut row = prow.scaled(&nv);
                row.add_scaled(nrow, &pv);
                let comb = pcomb.mix(&nv, ncomb, &pv);
                (row, comb)
            })
        })
        .collect();

    let mut out: Vec<Tracked> = zero.into_iter().chain(pairs).collect();
    let generated = out.len();
    for (row, comb) in out.iter_mut() {
        row.coeffs.remove(col);
        let (canon, scale) = row.canonical_with_scale();
        *row = canon;
        *comb = comb.scaled(&scale);
    }
    dedup_tracked(&mut out);
    let stats = RoundStats {
        variable: String::new(),
        rows_in,
        positive: p,
        negative: n,
        generated,
        rows_out: out.len(),
    };
    (out, stats)
}

/// Sorts by row and keeps the first certificate of each duplicate.
fn dedup_tracked(rows: &mut Vec<Tracked>) {
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    rows.dedup_by(|later, earlier| later.0 == earlier.0);
}

/// One elimination round on `var`, without provenance.
pub fn fme_eliminate_one(system: &InequalitySystem, var: &str) -> Result<InequalitySystem> {
    let col = eliminable_index(system, var)?;
    let tracked = system
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), Combination::unit(i, system.rows().len())))
        .collect();
    let (rows, _) = eliminate_column(tracked, col);
    Ok(system.drop_variable(col, rows.into_iter().map(|t| t.0).collect()))
}

fn eliminable_index(system: &InequalitySystem, var: &str) -> Result<usize> {
    if !system.eliminate().iter().any(|v| v.as_str() == var) {
        return Err(Error::Usage(format!("{var} is not in the eliminate-set")));
    }
    Ok(system.variable_index(var).expect("eliminate-set is declared"))
}

/// Eliminates the whole eliminate-set, round by round.
pub fn fme_eliminate_all(system: &InequalitySystem, options: &FmeOptions) -> Result<FmeOutcome> {
    let start = Instant::now();
    let order: Vec<String> = match &options.order {
        Some(order) => {
            let mut given: Vec<&str> = order.iter().map(String::as_str).collect();
            let mut expected: Vec<&str> = system.eliminate().iter().map(|v| v.as_str()).collect();
            given.sort_unstable();
            expected.sort_unstable();
            if given != expected {
                return Err(Error::Usage(format!(
                    "order {order:?} is not a permutation of the eliminate-set"
                )));
            }
            order.clone()
        }
        None => system.eliminate().iter().map(|v| v.to_string()).collect(),
    };

    let source_len = system.rows().len();
    let mut current = system.clone();
    let mut tracked: Vec<Tracked> = system
        .rows()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), Combination::unit(i, source_len)))
        .collect();
    let mut rounds = Vec::with_capacity(order.len());

    for var in &order {
        let col = eliminable_index(&current, var)?;
        let (rows, mut stats) = eliminate_column(tracked, col);
        stats.variable = var.clone();
        tracked = rows;
        current = current.drop_variable(col, Vec::new());
        if options.prune_each_round {
            tracked = prune(&current, tracked);
            stats.rows_out = tracked.len();
        }
        rounds.push(stats);
    }

    if order.is_empty() {
        for t in tracked.iter_mut() {
            let (canon, scale) = t.0.canonical_with_scale();
            t.0 = canon;
            t.1 = t.1.scaled(&scale);
        }
        dedup_tracked(&mut tracked);
    }

    let mut trivial_dropped = 0;
    if options.drop_trivial && current.symbols_nonnegative() {
        tracked.retain(|(row, _)| {
            let vacuous = row.is_vacuous();
            trivial_dropped += usize::from(vacuous);
            !vacuous
        });
    }

    let (rows, certificates): (Vec<_>, Vec<_>) = tracked.into_iter().unzip();
    let report = EliminationReport {
        method: "fme",
        constraint_count: source_len,
        aux_var_count: order.len(),
        basis_element_count: rows.len(),
        non_redundant_count: None,
        trivial_dropped,
        elapsed: start.elapsed(),
        rounds,
    };
    Ok(FmeOutcome {
        system: current.with_rows(rows),
        report,
        certificates,
    })
}

fn prune(current: &InequalitySystem, tracked: Vec<Tracked>) -> Vec<Tracked> {
    let provenance: HashMap<Inequality, Combination> = tracked.into_iter().collect();
    let (kept, _) = remove_redundant(&current.with_rows(provenance.keys().cloned().collect()));
    kept.rows()
        .iter()
        .map(|r| (r.clone(), provenance[r].clone()))
        .collect()
}

/// `(rows - positive - negative) + positive * negative`, the size of one
/// round's output before deduplication.
pub fn round_growth(rows: usize, positive: usize, negative: usize) -> usize {
    rows - positive - negative + positive * negative
}
