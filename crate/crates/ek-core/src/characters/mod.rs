//! Dirichlet characters, Gauss sums, the quadratic character of K, Euler
//! factors, and characters of Q_p^× and K_p^× = Q_p^× × Q_p^×.

pub mod dirichlet;
pub mod local;

pub use dirichlet::DirichletChar;
pub use local::{LocalChar, SplitPCharPair};

use thiserror::Error;

use crate::exact_arith::nt::{is_prime, lcm, split_p_part};
use crate::exact_arith::rational::{is_integer, prime_pow, Rational};
use crate::exact_arith::{ArithError, CycNumber, QuadFieldElem};
use crate::padic::PadicError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("character of modulus {modulus} has conductor {conductor}; a primitive character is required")]
    Imprimitive { modulus: u64, conductor: u64 },
    #[error("{0} is not a power of an odd prime")]
    NotPrimePower(u64),
    #[error("inconsistent character data: {0}")]
    Inconsistent(String),
    #[error("pole: chi({q}) q^(-s) = 1")]
    Pole { q: u64 },
    #[error("{q} divides the conductor {conductor}")]
    RamifiedPrime { q: u64, conductor: u64 },
    #[error("moduli {a} and {b} are incompatible")]
    ModulusMismatch { a: u64, b: u64 },
    #[error("conductor condition failed: {0}")]
    Conductor(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Embedding(#[from] PadicError),
}

/// 𝔤(χ) = Σ_{a mod p^t} χ(a) ζ_{p^t}^a for χ primitive of modulus p^t.
pub fn gauss_sum(chi: &DirichletChar) -> Result<CycNumber, CharError> {
    let m = chi.modulus();
    prime_power_base(m)?;
    if !chi.is_primitive() {
        return Err(CharError::Imprimitive { modulus: m, conductor: chi.conductor() });
    }
    let level = lcm(m, chi.order());
    let (sa, sz) = (level / chi.order(), level / m);
    let mut counts = vec![0i64; level as usize];
    for a in 1..m {
        if let Some(e) = chi.exponent(a as i64) {
            counts[((e as u64 * sa + a * sz) % level) as usize] += 1;
        }
    }
    Ok(CycNumber::from_exponent_counts(level, &counts))
}

/// (p, t) with m = p^t, p odd, t ≥ 1.
pub fn prime_power_base(m: u64) -> Result<(u64, u32), CharError> {
    if m < 3 {
        return Err(CharError::NotPrimePower(m));
    }
    let p = crate::exact_arith::nt::factor(m)[0].0;
    let (t, rest) = split_p_part(m, p);
    if rest != 1 || p == 2 {
        return Err(CharError::NotPrimePower(m));
    }
    Ok((p, t))
}

/// +1 if q splits in Q(√−D), −1 if inert, 0 if ramified.
pub fn chi_k(disc: u64, q: u64) -> i32 {
    crate::exact_arith::nt::kronecker(QuadFieldElem::field_discriminant(disc), q)
}

/// χ_K as a Dirichlet character mod |d_K|.
pub fn chi_k_char(disc: u64) -> DirichletChar {
    DirichletChar::kronecker_char(QuadFieldElem::field_discriminant(disc))
}

/// Value of a local Euler factor (1 − χ(q) q^{−s})^{−1}.
#[derive(Clone, Debug, PartialEq)]
pub enum EulerValue {
    Exact(CycNumber),
    /// (1 − unit · q^exponent)^{−1} with a non-integral exponent.
    Symbolic { unit: CycNumber, q: u64, exponent: Rational },
}

impl EulerValue {
    pub fn exact(&self) -> Option<&CycNumber> {
        match self {
            EulerValue::Exact(x) => Some(x),
            EulerValue::Symbolic { .. } => None,
        }
    }
}

/// (1 − χ(q) q^{−s})^{−1}, using the primitive character inducing χ.
pub fn euler_factor(chi: &DirichletChar, q: u64, s: &Rational) -> Result<EulerValue, CharError> {
    if !is_prime(q) {
        return Err(CharError::Inconsistent(format!("{q} is not prime")));
    }
    let prim = chi.primitive();
    if prim.conductor() % q == 0 {
        return Err(CharError::RamifiedPrime { q, conductor: prim.conductor() });
    }
    let unit = prim.value(q as i64);
    euler_factor_at(&unit, q, s)
}

/// (1 − u q^{−s})^{−1} for a given character value u = χ(q).
pub fn euler_factor_at(unit: &CycNumber, q: u64, s: &Rational) -> Result<EulerValue, CharError> {
    if !is_integer(s) {
        return Ok(EulerValue::Symbolic { unit: unit.clone(), q, exponent: -s.clone() });
    }
    let e: i64 = (-s).to_integer().try_into().map_err(|_| CharError::Inconsistent("exponent too large".into()))?;
    let t = unit.scale(&prime_pow(q, e));
    let d = CycNumber::one(1).sub(&t);
    if d.is_zero() {
        return Err(CharError::Pole { q });
    }
    Ok(EulerValue::Exact(d.inverse()?))
}

/// 1 − χ(q) q^{−s}, the inverse Euler factor, allowed to vanish.
pub fn inverse_euler_factor(unit: &CycNumber, q: u64, s: i64) -> CycNumber {
    CycNumber::one(1).sub(&unit.scale(&prime_pow(q, -s)))
}
