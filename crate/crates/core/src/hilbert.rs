//! One-shot elimination through the dual Diophantine system.
//!
//! A nonnegative combination of rows cancels every eliminated variable exactly
//! when its multiplier vector `a` solves `aᵀB = 0, a >= 0`, where `B` holds
//! the eliminated columns of the integer-scaled rows. The minimal nonzero
//! integer solutions (the Hilbert basis of that monoid) generate all others,
//! so their combinations generate every projected inequality.
//!
//! The basis is computed by completion: starting from the unit vectors, a
//! vector `t` with value `v(t) = tᵀB` is extended by `e_i` only when
//! `<v(t), B_i> < 0`, and candidates dominated componentwise by a solution
//! already found are pruned. Levels are processed in order of increasing
//! coordinate sum, so every solution reached is minimal.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, PartialStats, Result};
use crate::exact::{row_to_coprime_integers, Rational};
use crate::model::{Combination, Inequality, InequalitySystem};
use crate::report::EliminationReport;

/// Integer matrix `B` (one row per source row, one column per eliminated
/// variable) with the factors that scaled each source row to integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiophantineMatrix {
    entries: Vec<Vec<BigInt>>,
    row_scales: Vec<Rational>,
}

impl DiophantineMatrix {
    /// A raw matrix with unit row scales.
    pub fn new(entries: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(first) = entries.first() {
            if entries.iter().any(|r| r.len() != first.len()) {
                return Err(Error::MalformedMatrix("rows have different lengths".into()));
            }
        }
        let row_scales = vec![Rational::one(); entries.len()];
        Ok(DiophantineMatrix { entries, row_scales })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    pub fn row_scales(&self) -> &[Rational] {
        &self.row_scales
    }

    pub fn row_count(&self) -> usize {
        self.entries.len()
    }

    pub fn column_count(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    /// Whitespace-separated integers, one matrix row per line. Blank lines are
    /// skipped.
    pub fn parse_raw(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<BigInt>()
                        .map_err(|_| Error::MalformedMatrix(format!("line {}: bad integer `{tok}`", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows)
    }

    /// Whether `a` solves `aᵀB = 0`.
    pub fn annihilates(&self, a: &[u32]) -> bool {
        (0..self.column_count()).all(|j| {
            a.iter()
                .zip(&self.entries)
                .map(|(&k, row)| BigInt::from(k) * &row[j])
                .sum::<BigInt>()
                .is_zero()
        })
    }
}

impl fmt::Display for DiophantineMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// A minimal nonzero nonnegative solution of `aᵀB = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HilbertBasisElement {
    pub multipliers: Vec<u32>,
}

impl HilbertBasisElement {
    pub fn norm(&self) -> u64 {
        self.multipliers.iter().map(|&k| u64::from(k)).sum()
    }

    /// `self <= other` componentwise.
    pub fn dominated_by(&self, other: &HilbertBasisElement) -> bool {
        self.multipliers.iter().zip(&other.multipliers).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for HilbertBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.multipliers.iter().map(u32::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HilbertLimits {
    /// Largest number of open vectors allowed on one level.
    pub max_frontier: usize,
    /// Largest coordinate sum explored.
    pub max_norm: u32,
}

impl Default for HilbertLimits {
    fn default() -> Self {
        HilbertLimits {
            max_frontier: 20_000_000,
            max_norm: 10_000,
        }
    }
}

/// Builds `B` from the eliminated columns of `system`.
///
/// Each row is scaled over its variable coefficients to coprime integers; the
/// scale is kept so basis elements map back to combinations of the original
/// rows.
pub fn dual_matrix(system: &InequalitySystem) -> Result<DiophantineMatrix> {
    if system.eliminate().is_empty() {
        return Err(Error::Usage("nothing to eliminate".into()));
    }
    let elim = system.eliminate_indices();
    let mut entries = Vec::with_capacity(system.rows().len());
    let mut row_scales = Vec::with_capacity(system.rows().len());
    for row in system.rows() {
        let (ints, scale) = row_to_coprime_integers(&row.coeffs);
        entries.push(elim.iter().map(|&i| ints[i].clone()).collect());
        row_scales.push(scale);
    }
    Ok(DiophantineMatrix { entries, row_scales })
}

/// Integer types the completion can run on. `i64` is used when the limits
/// prove no intermediate value can overflow, `BigInt` otherwise.
trait Value: Clone + Send + Sync + Signed + From<u32> {
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl Value for i64 {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

impl Value for BigInt {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

fn dot<V: Value>(a: &[V], b: &[V]) -> V {
    a.iter().zip(b).fold(V::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

/// Support of a multiplier vector as a bitset.
#[derive(Clone, Debug)]
struct Support(Vec<u64>);

impl Support {
    fn of(mult: &[u32]) -> Self {
        let mut words = vec![0u64; mult.len().div_ceil(64).max(1)];
        for (i, &k) in mult.iter().enumerate() {
            if k > 0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Support(words)
    }

    fn subset_of(&self, other: &Support) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Solutions {
    elements: Vec<Vec<u32>>,
    supports: Vec<Support>,
}

impl Solutions {
    fn dominates(&self, candidate: &[u32]) -> bool {
        let support = Support::of(candidate);
        self.elements
            .iter()
            .zip(&self.supports)
            .any(|(m, s)| s.subset_of(&support) && m.iter().zip(candidate).all(|(a, b)| a <= b))
    }

    fn push(&mut self, mult: Vec<u32>) {
        self.supports.push(Support::of(&mult));
        self.elements.push(mult);
    }
}

struct Node<V> {
    mult: Vec<u32>,
    value: Vec<V>,
}

fn complete<V: Value>(rows: &[Vec<V>], limits: HilbertLimits) -> Result<Vec<Vec<u32>>> {
    let m = rows.len();
    let mut solutions = Solutions {
        elements: Vec::new(),
        supports: Vec::new(),
    };
    let mut frontier = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut mult = vec![0u32; m];
        mult[i] = 1;
        if row.iter().all(Zero::is_zero) {
            solutions.push(mult);
        } else {
            frontier.push(Node { mult, value: row.clone() });
        }
    }

    let mut level = 1u32;
    while !frontier.is_empty() {
        if level >= limits.max_norm {
            return Err(Error::Resource {
                limit: "max_norm",
                stats: PartialStats {
                    level,
                    frontier_size: frontier.len(),
                    solutions_found: solutions.elements.len(),
                },
            });
        }
        let solutions_ref = &solutions;
        let mut next: Vec<Node<V>> = frontier
            .par_iter()
            .flat_map_iter(|t| {
                rows.iter().enumerate().filter_map(move |(j, row)| {
                    if !dot(&t.value, row).is_negative() {
                        return None;
                    }
                    let mut mult = t.mult.clone();
                    mult[j] += 1;
                    if solutions_ref.dominates(&mult) {
                        return None;
                    }
                    let value = t.value.iter().zip(row).map(|(a, b)| a.plus(b)).collect();
                    Some(Node { mult, value })
                })
            })
            .collect();
        next.par_sort_unstable_by(|a, b| a.mult.cmp(&b.mult));
        next.dedup_by(|a, b| a.mult == b.mult);

        let (found, open): (Vec<_>, Vec<_>) = next
            .into_iter()
            .partition(|n| n.value.iter().all(Zero::is_zero));
        for node in found {
            solutions.push(node.mult);
        }
        level += 1;
        if open.len() > limits.max_frontier {
            return Err(Error::Resource {
                limit: "max_frontier",
                stats: PartialStats {
                    level,
                    frontier_size: open.len(),
                    solutions_found: solutions.elements.len(),
                },
            });
        }
        frontier = open;
    }
    Ok(solutions.elements)
}

/// Keeps the componentwise-minimal vectors and sorts them.
fn minimal_elements(mut vectors: Vec<Vec<u32>>) -> Vec<HilbertBasisElement> {
    vectors.sort_by_key(|v| v.iter().map(|&k| u64::from(k)).sum::<u64>());
    let mut minimal = Solutions {
        elements: Vec::new(),
        supports: Vec::new(),
    };
    for v in vectors {
        if !minimal.dominates(&v) {
            minimal.push(v);
        }
    }
    let mut out: Vec<HilbertBasisElement> = minimal
        .elements
        .into_iter()
        .map(|multipliers| HilbertBasisElement { multipliers })
        .collect();
    out.sort();
    out
}

fn rows_as<V: Value>(matrix: &DiophantineMatrix, convert: impl Fn(&BigInt) -> V) -> Vec<Vec<V>> {
    matrix
        .entries
        .iter()
        .map(|r| r.iter().map(&convert).collect())
        .collect()
}

fn max_abs_entry(matrix: &DiophantineMatrix) -> BigInt {
    matrix
        .entries
        .iter()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_default()
}

/// True when `|x| <= bound` for every value the search can form:
/// `columns * (norm * max|B|) * max|B|` for inner products.
fn fits_i64(matrix: &DiophantineMatrix, norm: u64) -> bool {
    let bound = BigInt::from(matrix.column_count().max(1)) * BigInt::from(norm) * max_abs_entry(matrix).pow(2);
    bound < BigInt::from(i64::MAX / 2)
}

/// All componentwise-minimal nonzero solutions of `aᵀB = 0, a >= 0`, sorted
/// lexicographically.
///
/// Fails with [`Error::Resource`] rather than returning a partial basis.
pub fn hilbert_basis(matrix: &DiophantineMatrix, limits: HilbertLimits) -> Result<Vec<HilbertBasisElement>> {
    if limits.max_frontier == 0 || limits.max_norm == 0 {
        return Err(Error::Usage("Hilbert basis limits must be positive".into()));
    }
    if matrix.row_count() == 0 {
        return Ok(Vec::new());
    }
    let found = if fits_i64(matrix, u64::from(limits.max_norm) + 1) {
        complete(&rows_as(matrix, |x| x.to_i64().expect("checked range")), limits)?
    } else {
        complete(&rows_as(matrix, Clone::clone), limits)?
    };
    Ok(minimal_elements(found))
}

/// Exhaustive search over `{0..=bound}^m`, for cross-checking.
pub fn brute_force_minimal_solutions(matrix: &DiophantineMatrix, bound: u32) -> Result<Vec<HilbertBasisElement>> {
    if bound == 0 {
        return Err(Error::Usage("brute-force bound must be at least 1".into()));
    }
    let m = matrix.row_count();
    let mut count: u64 = 1;
    for _ in 0..m {
        count = count
            .checked_mul(u64::from(bound) + 1)
            .filter(|&c| c <= 100_000_000)
            .ok_or_else(|| Error::Usage(format!("(bound + 1)^{m} exceeds 10^8 enumeration guard")))?;
    }
    let norm = u64::from(bound) * m as u64;
    if fits_i64(matrix, norm) {
        Ok(enumerate(&rows_as(matrix, |x| x.to_i64().expect("checked range")), bound))
    } else {
        Ok(enumerate(&rows_as(matrix, Clone::clone), bound))
    }
}

fn enumerate<V: Value>(rows: &[Vec<V>], bound: u32) -> Vec<HilbertBasisElement> {
    let m = rows.len();
    let e = rows.first().map_or(0, Vec::len);
    let mut solutions = Vec::new();
    let mut a = vec![0u32; m];
    let mut value = vec![V::zero(); e];
    // Odometer over all vectors; `value` tracks aᵀB incrementally.
    loop {
        let mut i = 0;
        loop {
            if i == m {
                return minimal_elements(solutions);
            }
            if a[i] < bound {
                a[i] += 1;
                for (v, b) in value.iter_mut().zip(&rows[i]) {
                    *v = v.plus(b);
                }
                break;
            }
            let back = V::from(a[i]);
            for (v, b) in value.iter_mut().zip(&rows[i]) {
                *v = v.minus(&back.times(b));
            }
            a[i] = 0;
            i += 1;
        }
        if value.iter().all(Zero::is_zero) {
            solutions.push(a.clone());
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DualityOptions {
    pub drop_trivial: bool,
    pub limits: HilbertLimits,
}

#[derive(Clone, Debug)]
pub struct DualityOutcome {
    /// The projected system, one row per kept basis element, in basis order.
    pub system: InequalitySystem,
    pub report: EliminationReport,
    /// The basis element behind each output row.
    pub certificates: Vec<HilbertBasisElement>,
    /// The same certificates as rational combinations of the source rows,
    /// including the canonical scaling of the output row.
    pub combinations: Vec<Combination>,
}

/// Projects `system` onto its kept variables in one step through the Hilbert
/// basis of the dual Diophantine system.
pub fn eliminate_by_duality(system: &InequalitySystem, options: &DualityOptions) -> Result<DualityOutcome> {
    let start = Instant::now();
    let matrix = dual_matrix(system)?;
    let basis = hilbert_basis(&matrix, options.limits)?;
    let kept = system.kept_indices();
    let drop = options.drop_trivial && system.symbols_nonnegative();

    let mut rows = Vec::with_capacity(basis.len());
    let mut certificates = Vec::with_capacity(basis.len());
    let mut combinations = Vec::with_capacity(basis.len());
    let mut trivial_dropped = 0;
    for h in &basis {
        let weights: Vec<Rational> = h
            .multipliers
            .iter()
            .zip(&matrix.row_scales)
            .map(|(&k, s)| Rational::from(i64::from(k)) * s)
            .collect();
        let mut acc = Inequality::zero(system.variables().len(), system.symbols().len());
        for (w, row) in weights.iter().zip(system.rows()) {
            acc.add_scaled(row, w);
        }
        let (row, scale) = acc.restricted(&kept).canonical_with_scale();
        if drop && row.is_vacuous() {
            trivial_dropped += 1;
            continue;
        }
        rows.push(row);
        certificates.push(h.clone());
        combinations.push(Combination { multipliers: weights }.scaled(&scale));
    }

    let report = EliminationReport {
        method: "hilbert",
        constraint_count: system.rows().len(),
        aux_var_count: system.eliminate().len(),
        basis_element_count: basis.len(),
        non_redundant_count: None,
        trivial_dropped,
        elapsed: start.elapsed(),
        rounds: Vec::new(),
    };
    Ok(DualityOutcome {
        system: system.project_declarations(rows),
        report,
        certificates,
        combinations,
    })
}

#[cfg(test)]
mod tests;
