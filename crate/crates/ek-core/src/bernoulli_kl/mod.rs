//! Bernoulli numbers, generalized Bernoulli numbers B_{k,χ}, Dirichlet
//! L-values at non-positive integers and Kubota-Leopoldt values.

use std::collections::BTreeSet;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::characters::{CharError, DirichletChar};
use crate::exact_arith::nt::lcm;
use crate::exact_arith::rational::{binomial, prime_pow, Rational};
use crate::exact_arith::{ArithError, CycNumber};
use crate::padic::{PadicElem, PadicEmbedding, PadicError, QqElem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KlError {
    #[error("k must be positive")]
    BadWeight,
    #[error("the point k = 1 with trivial twisted character is excluded")]
    ExcludedPoint,
    #[error("character order {order} is not covered by the embedding (tame level {tame})")]
    Level { order: u64, tame: u64 },
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

static BERNOULLI: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();

/// B_n with B_1 = −1/2, from Σ_{j≤n} C(n+1, j) B_j = 0. Memoized; readers
/// share the table and extensions take the write lock.
pub fn bernoulli(n: usize) -> Rational {
    let table = BERNOULLI.get_or_init(|| RwLock::new(vec![Rational::one()]));
    {
        let t = table.read().expect("bernoulli table poisoned");
        if n < t.len() {
            return t[n].clone();
        }
    }
    let mut t = table.write().expect("bernoulli table poisoned");
    while t.len() <= n {
        let m = t.len();
        let mut acc = Rational::zero();
        for (j, b) in t.iter().enumerate() {
            if !b.is_zero() {
                acc += Rational::from_integer(binomial(m as u64 + 1, j as u64)) * b;
            }
        }
        t.push(-acc / Rational::from_integer(BigInt::from(m + 1)));
    }
    t[n].clone()
}

/// B_k(x) = Σ_j C(k, j) B_j x^{k−j}.
pub fn bernoulli_poly(k: usize, x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut xp = Rational::one();
    for j in (0..=k).rev() {
        let b = bernoulli(j);
        if !b.is_zero() {
            acc += Rational::from_integer(binomial(k as u64, j as u64)) * b * &xp;
        }
        xp *= x;
    }
    acc
}

/// B_{k,χ} = f^{k−1} Σ_{a=1}^{f} χ(a) B_k(a/f) for the primitive character
/// of conductor f inducing χ.
pub fn gen_bernoulli(chi: &DirichletChar, k: usize) -> Result<CycNumber, KlError> {
    if k == 0 {
        return Err(KlError::BadWeight);
    }
    let prim = chi.primitive();
    let f = prim.conductor();
    let order = prim.order();
    // f^{k−1} B_k(a/f) = Σ_j C(k,j) B_j a^{k−j} f^{j−1}
    let mut by_exp = vec![Rational::zero(); order as usize];
    let fr = Rational::from_integer(BigInt::from(f));
    for a in 1..=f {
        if let Some(e) = prim.exponent(a as i64) {
            let v = bernoulli_poly(k, &(Rational::from_integer(BigInt::from(a)) / &fr));
            by_exp[e as usize] += v;
        }
    }
    let scale = crate::exact_arith::rational::rat_pow(&fr, k as i64 - 1);
    for c in by_exp.iter_mut() {
        *c *= &scale;
    }
    Ok(CycNumber::from_power_coeffs(order, &by_exp))
}

/// L(χ, 1−k) = −B_{k,χ}/k.
pub fn l_at_nonpositive(chi: &DirichletChar, k: usize) -> Result<CycNumber, KlError> {
    let b = gen_bernoulli(chi, k)?;
    Ok(b.scale(&-Rational::new(BigInt::one(), BigInt::from(k))))
}

/// A Dirichlet L-value at 1−k with the Euler factors at `euler_removed`
/// multiplied out.
#[derive(Clone, Debug, PartialEq)]
pub struct LSpecialValue {
    pub chi: DirichletChar,
    pub point: i64,
    pub value: CycNumber,
    pub euler_removed: BTreeSet<u64>,
}

/// (1 − χ(q) q^{k−1}) for the primitive χ; the inverse Euler factor at 1−k.
fn depletion(chi: &DirichletChar, q: u64, k: usize) -> CycNumber {
    let v = chi.value(q as i64);
    CycNumber::one(1).sub(&v.scale(&prime_pow(q, k as i64 - 1)))
}

/// L^Σ(χ, 1−k) = L(χ, 1−k) Π_{q∈Σ} (1 − χ(q) q^{k−1}).
pub fn l_special_value(chi: &DirichletChar, k: usize, sigma: &BTreeSet<u64>) -> Result<LSpecialValue, KlError> {
    let prim = chi.primitive();
    let mut value = l_at_nonpositive(&prim, k)?;
    for &q in sigma {
        value = value.mul(&depletion(&prim, q, k));
    }
    Ok(LSpecialValue { chi: prim, point: 1 - k as i64, value, euler_removed: sigma.clone() })
}

/// The twisted character χω^{−k} attached to the embedding's ω.
pub fn kl_twist(chi: &DirichletChar, k: usize, emb: &PadicEmbedding) -> DirichletChar {
    let w = DirichletChar::teichmuller_power(emb, -(k as i64));
    chi.mul(&w).primitive()
}

/// Exact algebraic value (1 − ψ(p) p^{k−1}) (−B_{k,ψ}/k) Π_{q∈Σ∖{p}} (1 − ψ(q) q^{k−1})
/// with ψ = χω^{−k}.
pub fn kl_value_exact(chi: &DirichletChar, k: usize, sigma: &BTreeSet<u64>, emb: &PadicEmbedding) -> Result<CycNumber, KlError> {
    if k == 0 {
        return Err(KlError::BadWeight);
    }
    let p = emb.p();
    let psi = kl_twist(chi, k, emb);
    if k == 1 && psi.is_trivial() {
        return Err(KlError::ExcludedPoint);
    }
    let mut s = sigma.clone();
    s.insert(p);
    Ok(l_special_value(&psi, k, &s)?.value)
}

fn check_level(chi: &DirichletChar, emb: &PadicEmbedding) -> Result<(), KlError> {
    let (_, tame) = crate::exact_arith::nt::split_p_part(chi.order(), emb.p());
    if emb.tame_level() % tame != 0 {
        return Err(KlError::Level { order: chi.order(), tame: emb.tame_level() });
    }
    Ok(())
}

/// L_p^Σ(1−k, χ) in Z_q ⊗ Q via the embedding.
pub fn kl_specialization_q(chi: &DirichletChar, k: usize, sigma: &BTreeSet<u64>, emb: &PadicEmbedding) -> Result<QqElem, KlError> {
    check_level(chi, emb)?;
    let v = kl_value_exact(chi, k, sigma, emb)?;
    Ok(emb.embed(&v)?)
}

/// L_p^Σ(1−k, χ) as an element of Q_p; the value must lie in Q_p.
pub fn kl_specialization(chi: &DirichletChar, k: usize, sigma: &BTreeSet<u64>, emb: &PadicEmbedding) -> Result<PadicElem, KlError> {
    check_level(chi, emb)?;
    let v = kl_value_exact(chi, k, sigma, emb)?;
    Ok(emb.embed_qp(&v)?)
}

/// Embedding of level lcm(order, p−1) with the given choice, suitable for
/// `kl_specialization`.
pub fn kl_embedding(chi: &DirichletChar, p: u64, prec: i64, choice: usize) -> Result<PadicEmbedding, KlError> {
    Ok(PadicEmbedding::new(p, lcm(chi.order(), p - 1), prec, choice)?)
}
