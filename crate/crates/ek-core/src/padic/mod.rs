//! p-adic numbers with absolute precision, unramified extensions and the
//! fixed embedding of cyclotomic fields.

pub mod elem;
pub mod embed;
pub mod unram;

pub use elem::{congruent_mod, teichmuller, PadicElem};
pub use embed::PadicEmbedding;
pub use unram::{congruent_mod_q, QqElem, UnramCtx};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PadicError {
    #[error("{a} is not a unit mod {p}")]
    NonUnit { a: i64, p: u64 },
    #[error("insufficient precision: need {need}, have {have}")]
    InsufficientPrecision { need: i64, have: i64 },
    #[error("unsupported embedding: {0}")]
    UnsupportedEmbedding(String),
    #[error("value does not lie in Q_p")]
    NotRational,
    #[error("division by zero")]
    DivisionByZero,
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("embedding choice {choice} out of range (0..{count})")]
    BadChoice { choice: usize, count: usize },
}
