//! Inequality systems with symbolic right-hand sides.
//!
//! A row reads `sum_v coeffs[v] * v <= sum_s terms[s] * s + constant`. Rows are
//! stored densely against the declarations of their enclosing
//! [`InequalitySystem`]: `coeffs[k]` belongs to `variables[k]` and
//! `bound.terms[k]` to `symbols[k]`.

use std::collections::HashSet;
use std::fmt;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exact::{row_to_coprime_integers, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId(String);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(String);

macro_rules! name_type {
    ($ty:ident, $what:literal) => {
        impl $ty {
            pub fn new(name: impl Into<String>) -> Result<Self> {
                let name = name.into();
                if name.is_empty() {
                    return Err(Error::Usage(concat!("empty ", $what, " name").into()));
                }
                Ok($ty(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(VariableId, "variable");
name_type!(SymbolId, "symbol");

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearBound {
    /// One coefficient per declared symbol.
    pub terms: Vec<Rational>,
    pub constant: Rational,
}

impl LinearBound {
    pub fn zero(symbols: usize) -> Self {
        LinearBound {
            terms: vec![Rational::zero(); symbols],
            constant: Rational::zero(),
        }
    }

    /// Evaluates the bound at the given symbol values.
    pub fn evaluate(&self, symbol_values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .zip(symbol_values)
            .map(|(c, v)| c * v)
            .sum::<Rational>()
            + &self.constant
    }
}

/// One constraint `coeffs · x <= bound`.
///
/// The derived ordering is the canonical row order: variable coefficients,
/// then symbol coefficients, then the constant, each lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub bound: LinearBound,
}

impl Inequality {
    pub fn new(coeffs: Vec<Rational>, terms: Vec<Rational>, constant: Rational) -> Self {
        Inequality {
            coeffs,
            bound: LinearBound { terms, constant },
        }
    }

    pub fn zero(variables: usize, symbols: usize) -> Self {
        Inequality {
            coeffs: vec![Rational::zero(); variables],
            bound: LinearBound::zero(symbols),
        }
    }

    /// `self += k * other`.
    pub fn add_scaled(&mut self, other: &Inequality, k: &Rational) {
        if k.is_zero() {
            return;
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += &(b * k);
            }
        }
        for (a, b) in self.bound.terms.iter_mut().zip(&other.bound.terms) {
            if !b.is_zero() {
                *a += &(b * k);
            }
        }
        self.bound.constant += &(&other.bound.constant * k);
    }

    pub fn scaled(&self, k: &Rational) -> Inequality {
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            bound: LinearBound {
                terms: self.bound.terms.iter().map(|c| c * k).collect(),
                constant: &self.bound.constant * k,
            },
        }
    }

    /// The row with only the variable columns at `keep` retained.
    pub fn restricted(&self, keep: &[usize]) -> Inequality {
        Inequality {
            coeffs: keep.iter().map(|&i| self.coeffs[i].clone()).collect(),
            bound: self.bound.clone(),
        }
    }

    /// All variable coefficients are zero.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// Trivial and true for every nonnegative assignment of the symbols.
    pub fn is_vacuous(&self) -> bool {
        self.is_trivial()
            && self.bound.terms.iter().all(|t| !t.is_negative())
            && !self.bound.constant.is_negative()
    }

    /// Variable coefficients, symbol coefficients and the constant, in order.
    pub fn concat(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.coeffs.len() + self.bound.terms.len() + 1);
        out.extend(self.coeffs.iter().cloned());
        out.extend(self.bound.terms.iter().cloned());
        out.push(self.bound.constant.clone());
        out
    }

    /// The canonical positive multiple of this row and the factor used.
    pub fn canonical_with_scale(&self) -> (Inequality, Rational) {
        let (ints, scale) = row_to_coprime_integers(&self.concat());
        let mut values = ints.into_iter().map(Rational::from);
        let coeffs = values.by_ref().take(self.coeffs.len()).collect();
        let terms = values.by_ref().take(self.bound.terms.len()).collect();
        let constant = values.next().expect("constant column");
        (Inequality::new(coeffs, terms, constant), scale)
    }

    pub fn lhs_at(&self, point: &[Rational]) -> Rational {
        self.coeffs.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

pub fn canonicalize_row(row: &Inequality) -> Inequality {
    row.canonical_with_scale().0
}

/// A system of inequalities together with its declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalitySystem {
    variables: Vec<VariableId>,
    eliminate: Vec<VariableId>,
    symbols: Vec<SymbolId>,
    rows: Vec<Inequality>,
    symbols_nonnegative: bool,
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
    }
    Ok(())
}

impl InequalitySystem {
    pub fn new(
        variables: Vec<VariableId>,
        eliminate: Vec<VariableId>,
        symbols: Vec<SymbolId>,
        rows: Vec<Inequality>,
    ) -> Result<Self> {
        check_unique(variables.iter().map(VariableId::as_str).chain(symbols.iter().map(SymbolId::as_str)))?;
        check_unique(eliminate.iter().map(VariableId::as_str))?;
        for v in &eliminate {
            if !variables.contains(v) {
                return Err(Error::UnknownVariable(v.to_string()));
            }
        }
        for row in &rows {
            if row.coeffs.len() != variables.len() || row.bound.terms.len() != symbols.len() {
                return Err(Error::Usage(format!(
                    "row has {} coefficients and {} terms; system declares {} variables and {} symbols",
                    row.coeffs.len(),
                    row.bound.terms.len(),
                    variables.len(),
                    symbols.len()
                )));
            }
        }
        Ok(InequalitySystem {
            variables,
            eliminate,
            symbols,
            rows,
            symbols_nonnegative: true,
        })
    }

    /// Convenience constructor from plain names and textual rows, e.g.
    /// `"R1 + 2 R1c <= I_a + 3"`.
    pub fn from_text(variables: &[&str], eliminate: &[&str], symbols: &[&str], rows: &[&str]) -> Result<Self> {
        let ids = |names: &[&str]| names.iter().map(|n| VariableId::new(*n)).collect::<Result<Vec<_>>>();
        let mut system = InequalitySystem::new(
            ids(variables)?,
            ids(eliminate)?,
            symbols.iter().map(|n| SymbolId::new(*n)).collect::<Result<_>>()?,
            Vec::new(),
        )?;
        system.rows = rows.iter().map(|r| system.parse_row(r)).collect::<Result<_>>()?;
        Ok(system)
    }

    pub fn variables(&self) -> &[VariableId] {
        &self.variables
    }

    pub fn eliminate(&self) -> &[VariableId] {
        &self.eliminate
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn symbols_nonnegative(&self) -> bool {
        self.symbols_nonnegative
    }

    pub fn set_symbols_nonnegative(&mut self, value: bool) {
        self.symbols_nonnegative = value;
    }

    /// Same declarations, different rows.
    pub fn with_rows(&self, rows: Vec<Inequality>) -> Self {
        debug_assert!(rows
            .iter()
            .all(|r| r.coeffs.len() == self.variables.len() && r.bound.terms.len() == self.symbols.len()));
        InequalitySystem {
            variables: self.variables.clone(),
            eliminate: self.eliminate.clone(),
            symbols: self.symbols.clone(),
            rows,
            symbols_nonnegative: self.symbols_nonnegative,
        }
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.as_str() == name)
    }

    pub fn symbol_index(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.as_str() == name)
    }

    /// Indices of the variables that stay after elimination, in declared order.
    pub fn kept_indices(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| !self.eliminate.contains(&self.variables[i]))
            .collect()
    }

    /// Indices of the eliminate-set, in eliminate-set order.
    pub fn eliminate_indices(&self) -> Vec<usize> {
        self.eliminate
            .iter()
            .map(|v| self.variable_index(v.as_str()).expect("validated on construction"))
            .collect()
    }

    /// The system over the kept variables only, with an empty eliminate-set.
    /// Rows are restricted to those columns without any combination step.
    pub fn project_declarations(&self, rows: Vec<Inequality>) -> Self {
        let keep = self.kept_indices();
        InequalitySystem {
            variables: keep.iter().map(|&i| self.variables[i].clone()).collect(),
            eliminate: Vec::new(),
            symbols: self.symbols.clone(),
            rows,
            symbols_nonnegative: self.symbols_nonnegative,
        }
    }

    /// Removes one variable column from declarations, eliminate-set and rows.
    pub(crate) fn drop_variable(&self, index: usize, rows: Vec<Inequality>) -> Self {
        let name = &self.variables[index];
        let mut variables = self.variables.clone();
        variables.remove(index);
        InequalitySystem {
            variables,
            eliminate: self.eliminate.iter().filter(|v| *v != name).cloned().collect(),
            symbols: self.symbols.clone(),
            rows,
            symbols_nonnegative: self.symbols_nonnegative,
        }
    }

    /// Checks that two systems share kept variables and symbols, in order.
    pub fn same_declarations(&self, other: &InequalitySystem) -> bool {
        self.variables == other.variables && self.symbols == other.symbols
    }

    /// Parses `"<lhs> <= <rhs>"`: the left side mentions variables, the
    /// right side symbols and at most one constant.
    pub fn parse_row(&self, text: &str) -> Result<Inequality> {
        let (lhs, rhs) = text
            .split_once("<=")
            .ok_or_else(|| Error::Usage(format!("row `{text}` lacks `<=`")))?;
        let mut row = Inequality::zero(self.variables.len(), self.symbols.len());
        for (coef, name) in linear_terms(lhs)? {
            let Some(name) = name else {
                if coef.is_zero() {
                    continue;
                }
                return Err(Error::Usage(format!("constant on left side of `{text}`")));
            };
            let i = self
                .variable_index(&name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            row.coeffs[i] += &coef;
        }
        for (coef, name) in linear_terms(rhs)? {
            match name {
                None => row.bound.constant += &coef,
                Some(name) => {
                    let i = self
                        .symbol_index(&name)
                        .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                    row.bound.terms[i] += &coef;
                }
            }
        }
        Ok(row)
    }

    pub fn display_row(&self, row: &Inequality) -> String {
        let lhs = render_terms(self.variables.iter().map(VariableId::as_str).zip(&row.coeffs), None);
        let rhs = render_terms(
            self.symbols.iter().map(SymbolId::as_str).zip(&row.bound.terms),
            Some(&row.bound.constant),
        );
        format!("{lhs} <= {rhs}")
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{}", self.display_row(row))?;
        }
        Ok(())
    }
}

fn render_terms<'a>(terms: impl Iterator<Item = (&'a str, &'a Rational)>, constant: Option<&Rational>) -> String {
    let mut out = String::new();
    let mut push = |coef: &Rational, name: Option<&str>| {
        let negative = coef.is_negative();
        let magnitude = coef.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        match name {
            Some(name) if magnitude == Rational::one() => out.push_str(name),
            Some(name) => out.push_str(&format!("{magnitude} {name}")),
            None => out.push_str(&magnitude.to_string()),
        }
    };
    for (name, coef) in terms {
        if !coef.is_zero() {
            push(coef, Some(name));
        }
    }
    if let Some(c) = constant {
        if !c.is_zero() {
            push(c, None);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Splits `"2 x - 1/2 y + 3"` into `(coefficient, Some(name) | None)` pairs.
fn linear_terms(text: &str) -> Result<Vec<(Rational, Option<String>)>> {
    let mut out = Vec::new();
    let mut sign = Rational::one();
    let mut pending: Option<Rational> = None;
    for token in text.split_whitespace().flat_map(split_signs) {
        match token.as_str() {
            "+" | "-" => {
                if let Some(c) = pending.take() {
                    out.push((&sign * &c, None));
                    sign = Rational::one();
                }
                if token == "-" {
                    sign = -sign;
                }
            }
            "*" => {}
            _ if token.starts_with(|c: char| c.is_ascii_digit()) => {
                if pending.is_some() {
                    return Err(Error::Usage(format!("two numbers in a row in `{text}`")));
                }
                pending = Some(token.parse()?);
            }
            _ => {
                let coef = pending.take().unwrap_or_else(Rational::one);
                out.push((&sign * &coef, Some(token)));
                sign = Rational::one();
            }
        }
    }
    if let Some(c) = pending {
        out.push((&sign * &c, None));
    }
    Ok(out)
}

fn split_signs(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for ch in word.chars() {
        if ch == '+' || ch == '-' || ch == '*' {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(ch.to_string());
        } else {
            current.push(ch);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Scales every row to canonical form, drops exact duplicates and sorts.
pub fn canonicalize_system(system: &InequalitySystem) -> InequalitySystem {
    let mut rows: Vec<Inequality> = system.rows.iter().map(canonicalize_row).collect();
    rows.sort();
    rows.dedup();
    system.with_rows(rows)
}

/// Nonnegative multipliers over the rows of a source system, one per row.
///
/// Certifies that a projected row is exactly the weighted sum of source rows
/// and that the weighted sum cancels every eliminated column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combination {
    pub multipliers: Vec<Rational>,
}

impl Combination {
    pub fn unit(index: usize, len: usize) -> Self {
        let mut multipliers = vec![Rational::zero(); len];
        multipliers[index] = Rational::one();
        Combination { multipliers }
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        Combination {
            multipliers: self.multipliers.iter().map(|m| m * k).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn mix(&self, a: &Rational, other: &Combination, b: &Rational) -> Self {
        Combination {
            multipliers: self
                .multipliers
                .iter()
                .zip(&other.multipliers)
                .map(|(x, y)| x * a + y * b)
                .collect(),
        }
    }

    /// Checks `row` against the full combination of `source` rows: eliminated
    /// columns must cancel and everything else must match exactly.
    pub fn verify(&self, source: &InequalitySystem, row: &Inequality) -> bool {
        if self.multipliers.len() != source.rows.len() || self.multipliers.iter().any(Rational::is_negative) {
            return false;
        }
        let mut acc = Inequality::zero(source.variables.len(), source.symbols.len());
        for (k, r) in self.multipliers.iter().zip(&source.rows) {
            acc.add_scaled(r, k);
        }
        source.eliminate_indices().iter().all(|&i| acc.coeffs[i].is_zero())
            && acc.restricted(&source.kept_indices()) == *row
    }
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

fn rational_map<'a, N: fmt::Display + 'a>(names: impl Iterator<Item = &'a N>, values: &[Rational]) -> Value {
    let mut map = Map::new();
    for (name, v) in names.zip(values) {
        if !v.is_zero() {
            map.insert(name.to_string(), Value::String(v.to_string()));
        }
    }
    Value::Object(map)
}

/// Emits rows in stored order; canonicalized systems therefore serialize in
/// canonical order.
pub fn serialize_system(system: &InequalitySystem) -> String {
    let strings = |names: Vec<String>| Value::Array(names.into_iter().map(Value::String).collect());
    let mut top = Map::new();
    top.insert(
        "variables".into(),
        strings(system.variables.iter().map(|v| v.to_string()).collect()),
    );
    top.insert(
        "eliminate".into(),
        strings(system.eliminate.iter().map(|v| v.to_string()).collect()),
    );
    top.insert(
        "symbols".into(),
        strings(system.symbols.iter().map(|s| s.to_string()).collect()),
    );
    let rows = system
        .rows
        .iter()
        .map(|row| {
            let mut bound = Map::new();
            bound.insert("terms".into(), rational_map(system.symbols.iter(), &row.bound.terms));
            bound.insert("const".into(), Value::String(row.bound.constant.to_string()));
            let mut obj = Map::new();
            obj.insert("coeffs".into(), rational_map(system.variables.iter(), &row.coeffs));
            obj.insert("bound".into(), Value::Object(bound));
            Value::Object(obj)
        })
        .collect();
    top.insert("rows".into(), Value::Array(rows));
    top.insert("symbols_nonnegative".into(), Value::Bool(system.symbols_nonnegative));
    let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedJson(msg.into())
}

fn string_list(top: &Map<String, Value>, key: &str, required: bool) -> Result<Vec<String>> {
    match top.get(key) {
        None if required => Err(malformed(format!("missing key \"{key}\""))),
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::String(s) if !s.is_empty() => Ok(s.clone()),
                Value::String(_) => Err(malformed(format!("empty name in \"{key}\""))),
                other => Err(malformed(format!("expected string in \"{key}\", got {other}"))),
            })
            .collect(),
        Some(other) => Err(malformed(format!("\"{key}\" must be an array, got {other}"))),
    }
}

fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse(),
        other => Err(malformed(format!("expected rational string, got {other}"))),
    }
}

pub fn parse_system(text: &[u8]) -> Result<InequalitySystem> {
    let value: Value = serde_json::from_slice(text).map_err(|e| malformed(e.to_string()))?;
    let top = value
        .as_object()
        .ok_or_else(|| malformed("top level must be an object"))?;
    let variables = string_list(top, "variables", true)?
        .into_iter()
        .map(VariableId)
        .collect::<Vec<_>>();
    let symbols = string_list(top, "symbols", false)?
        .into_iter()
        .map(SymbolId)
        .collect::<Vec<_>>();
    let eliminate = string_list(top, "eliminate", false)?
        .into_iter()
        .map(VariableId)
        .collect::<Vec<_>>();
    let mut system = InequalitySystem::new(variables, eliminate, symbols, Vec::new())?;
    if let Some(flag) = top.get("symbols_nonnegative") {
        system.symbols_nonnegative = flag
            .as_bool()
            .ok_or_else(|| malformed("\"symbols_nonnegative\" must be a boolean"))?;
    }
    let rows = match top.get("rows") {
        Some(Value::Array(rows)) => rows,
        Some(_) => return Err(malformed("\"rows\" must be an array")),
        None => return Err(malformed("missing key \"rows\"")),
    };
    for (k, row) in rows.iter().enumerate() {
        let obj = row
            .as_object()
            .ok_or_else(|| malformed(format!("row {k} must be an object")))?;
        let mut ineq = Inequality::zero(system.variables.len(), system.symbols.len());
        if let Some(coeffs) = obj.get("coeffs") {
            let coeffs = coeffs
                .as_object()
                .ok_or_else(|| malformed(format!("row {k}: \"coeffs\" must be an object")))?;
            for (name, v) in coeffs {
                let i = system
                    .variable_index(name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                ineq.coeffs[i] = rational_value(v)?;
            }
        }
        let bound = obj
            .get("bound")
            .and_then(Value::as_object)
            .ok_or_else(|| malformed(format!("row {k}: missing \"bound\" object")))?;
        if let Some(terms) = bound.get("terms") {
            let terms = terms
                .as_object()
                .ok_or_else(|| malformed(format!("row {k}: \"terms\" must be an object")))?;
            for (name, v) in terms {
                let i = system
                    .symbol_index(name)
                    .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
                ineq.bound.terms[i] = rational_value(v)?;
            }
        }
        if let Some(c) = bound.get("const") {
            ineq.bound.constant = rational_value(c)?;
        }
        system.rows.push(ineq);
    }
    Ok(system)
}
