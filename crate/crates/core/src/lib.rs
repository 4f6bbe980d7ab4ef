//! Exact variable elimination for systems of linear inequalities whose
//! right-hand sides are nonnegative combinations of named symbols.
//!
//! Two eliminators share one data model:
//!
//! * [`fme`]: Fourier-Motzkin elimination, one variable per round.
//! * [`hilbert`]: all variables at once, through the Hilbert basis of the
//!   homogeneous Diophantine system whose solutions are exactly the row
//!   multipliers that cancel the eliminated columns.
//!
//! [`analysis`] decides redundancy and equivalence with exact conic
//! certificates, and [`ratereg`] generates the rate-splitting systems of the
//! symmetric multi-user interference channel.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod fme;
pub mod hilbert;
pub mod model;
pub mod ratereg;
pub mod report;

pub use error::{Error, Result};
pub use exact::Rational;
pub use model::{Inequality, InequalitySystem, LinearBound, SymbolId, VariableId};
