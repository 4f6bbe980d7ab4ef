//! Rate-splitting inequalities of the symmetric `l`-user interference channel.
//!
//! Sender `i` splits its rate into a private part and a common part `R_ic`
//! decoded by every receiver. After substituting `R_ip = R_i - R_ic`, decoder
//! `i` contributes one row per binary tuple `α`:
//!
//! ```text
//! R_i + Σ_{j != i} α_j R_jc - α_i R_ic <= I_i_α
//! ```
//!
//! Tuples run in increasing binary order with `α_1` as the most significant
//! bit; rows are decoder-major.

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::model::{Inequality, InequalitySystem, SymbolId, VariableId};

pub const MAX_SENDERS: usize = 6;

/// Bit `j` (0-based, `α_1` first) of tuple `alpha` over `l` positions.
fn bit(alpha: usize, j: usize, l: usize) -> bool {
    (alpha >> (l - 1 - j)) & 1 == 1
}

pub fn symbol_name(decoder: usize, alpha: usize, l: usize) -> String {
    let bits: String = (0..l).map(|j| if bit(alpha, j, l) { '1' } else { '0' }).collect();
    format!("I_{}_{}", decoder + 1, bits)
}

/// The system `C_l R <= I_l` over `[R1..Rl, R1c..Rlc]`, eliminating the
/// common rates.
pub fn hk_system(l: usize) -> Result<InequalitySystem> {
    if !(1..=MAX_SENDERS).contains(&l) {
        return Err(Error::Usage(format!(
            "number of senders must be between 1 and {MAX_SENDERS}, got {l}"
        )));
    }
    let rates: Vec<VariableId> = (1..=l)
        .map(|i| VariableId::new(format!("R{i}")))
        .collect::<Result<_>>()?;
    let commons: Vec<VariableId> = (1..=l)
        .map(|i| VariableId::new(format!("R{i}c")))
        .collect::<Result<_>>()?;
    let tuples = 1usize << l;
    let symbols: Vec<SymbolId> = (0..l)
        .flat_map(|i| (0..tuples).map(move |a| (i, a)))
        .map(|(i, a)| SymbolId::new(symbol_name(i, a, l)))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(l * tuples);
    for i in 0..l {
        for alpha in 0..tuples {
            let mut row = Inequality::zero(2 * l, l * tuples);
            row.coeffs[i] = Rational::one();
            for j in 0..l {
                if bit(alpha, j, l) {
                    row.coeffs[l + j] = if j == i { -Rational::one() } else { Rational::one() };
                }
            }
            row.bound.terms[i * tuples + alpha] = Rational::one();
            rows.push(row);
        }
    }
    let variables = rates.into_iter().chain(commons.iter().cloned()).collect();
    InequalitySystem::new(variables, commons, symbols, rows)
}
