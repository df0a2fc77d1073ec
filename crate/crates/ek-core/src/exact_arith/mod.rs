//! Rationals, Q(√−D), cyclotomic numbers and Hermitian matrices.

pub mod cyclotomic;
pub mod hermitian;
pub mod nt;
pub mod quad;
pub mod rational;
pub mod scaled;

pub use cyclotomic::CycNumber;
pub use hermitian::{enumerate_hermitian, is_positive_definite, leading_minors, HermitianMatrix};
pub use quad::QuadFieldElem;
pub use rational::Rational;
pub use scaled::ScaledUnit;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot move an element of level {from} to level {to}")]
    LevelMismatch { from: u64, to: u64 },
    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },
    #[error("entries over different fields")]
    DiscMismatch,
    #[error("expected a {expected}x{expected} matrix, got {got} entries")]
    Shape { expected: usize, got: usize },
    #[error("enumeration exceeded the cap of {cap} matrices")]
    ResourceBound { cap: usize },
    #[error("mixed bases {a} and {b}")]
    BaseMismatch { a: u64, b: u64 },
    #[error("D = {0} is not a positive square-free integer")]
    BadDiscriminant(u64),
}
