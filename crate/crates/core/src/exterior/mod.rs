//! Graded exterior algebra over the coframe `α1, α2, α3, β4, β5, β6, dr` of
//! the cone over S³×S³, with symbolic coefficients in `A(r, t)`, `B(r, t)`.

pub mod coframe;
pub mod expr;
pub mod form;
pub mod ops;
pub mod profile;

use thiserror::Error;

pub use coframe::{Blade, CoframeIndex};
pub use expr::{CoeffExpr, Field, Rational, Symbol, SymbolValues, Var};
pub use form::{Coefficient, Form, KForm, NumForm};
pub use ops::{blade_differential, d, eval, structure_differential, time_derivative};
pub use profile::{PointJet, Poly2, PolynomialProfile, Profile, ProfileAt};

/// Failure to evaluate a coefficient numerically.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative radicand {0}")]
    NegativeRadicand(f64),
    #[error("no value for symbol {0}")]
    MissingSymbol(Symbol),
    #[error("profile does not supply {0}")]
    Unsupported(Symbol),
    #[error("{field} = {value} is not positive")]
    NonPositive { field: Field, value: f64 },
    #[error("point outside profile domain: {0}")]
    OutOfDomain(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExteriorError {
    #[error("coframe index {0} outside 1..=7")]
    InvalidIndex(u8),
    #[error("cannot contract scalar")]
    ContractScalar,
    #[error("cannot add forms of degree {left} and {right}")]
    DegreeMismatch { left: u8, right: u8 },
    #[error("evaluating coefficient of {blade}: {source}")]
    Eval { blade: Blade, source: EvalError },
    #[error("coefficient {value} of {blade} is not an integer")]
    NotInteger { blade: Blade, value: f64 },
}
