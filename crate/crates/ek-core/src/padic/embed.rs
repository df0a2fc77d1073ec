use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use super::elem::PadicElem;
use super::unram::{QqElem, UnramCtx};
use super::PadicError;
use crate::exact_arith::nt::{gcd, inv_mod, lcm, mult_order, split_p_part};
use crate::exact_arith::rational::{rat, Rational};
use crate::exact_arith::CycNumber;

const GUARD: i64 = 24;

/// A fixed embedding ι of Q(ζ_N) into an extension of Q_p.
///
/// Writing N = p^k·m with p ∤ m, the prime-to-p part ζ_m goes to a
/// Teichmüller root of unity θ^u in the unramified ring Z_q, q = p^f with
/// f = ord_m(p). The chosen unit u (by `choice`, an index into the units mod
/// m in increasing order) fixes the prime above p. Values carrying p-power
/// roots of unity are embedded only after they descend to Q(ζ_m).
#[derive(Debug)]
pub struct PadicEmbedding {
    p: u64,
    m: u64,
    prec: i64,
    choice: usize,
    u: u64,
    ctx: Arc<UnramCtx>,
    powers: RwLock<(i64, Vec<QqElem>)>,
}

impl PadicEmbedding {
    /// Embedding for values of level dividing `level` (times any power of
    /// p), always including the (p−1)-st roots of unity.
    pub fn new(p: u64, level: u64, prec: i64, choice: usize) -> Result<Self, PadicError> {
        if p < 3 || !crate::exact_arith::nt::is_prime(p) {
            return Err(PadicError::BadPrime(p));
        }
        if prec < 1 {
            return Err(PadicError::InsufficientPrecision { need: 1, have: prec });
        }
        let (_, m0) = split_p_part(level.max(1), p);
        let m = lcm(m0, p - 1);
        let units: Vec<u64> = (1..=m).filter(|&a| gcd(a, m) == 1).collect();
        let u = *units.get(choice).ok_or(PadicError::BadChoice { choice, count: units.len() })?;
        let f = mult_order(p, m) as usize;
        let ctx = UnramCtx::new(p, f);
        let emb = PadicEmbedding {
            p,
            m,
            prec,
            choice,
            u,
            ctx,
            powers: RwLock::new((0, Vec::new())),
        };
        emb.ensure_powers(prec + GUARD)?;
        Ok(emb)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Prime-to-p level covered.
    pub fn tame_level(&self) -> u64 {
        self.m
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn choice(&self) -> usize {
        self.choice
    }

    pub fn degree(&self) -> usize {
        self.ctx.f
    }

    pub fn ctx(&self) -> &Arc<UnramCtx> {
        &self.ctx
    }

    fn ensure_powers(&self, w: i64) -> Result<(), PadicError> {
        if self.powers.read().expect("embedding cache poisoned").0 >= w {
            return Ok(());
        }
        let theta = self.ctx.root_of_unity(self.m, w)?.pow(self.u as u128);
        let mut pw = Vec::with_capacity(self.m as usize);
        let mut cur = QqElem::one(&self.ctx, w);
        for _ in 0..self.m {
            pw.push(cur.clone());
            cur = cur.mul(&theta);
        }
        let mut guard = self.powers.write().expect("embedding cache poisoned");
        if guard.0 < w {
            *guard = (w, pw);
        }
        Ok(())
    }

    /// Exact image of x in Q(ζ_m) with the p-power roots of unity removed.
    pub fn descend(&self, x: &CycNumber) -> Result<CycNumber, PadicError> {
        let (k, mx) = split_p_part(x.level(), self.p);
        if self.m % mx != 0 {
            return Err(PadicError::UnsupportedEmbedding(format!(
                "level {} has prime-to-p part {mx} not dividing {}",
                x.level(),
                self.m
            )));
        }
        if k == 0 {
            return Ok(x.lift(self.m).expect("divides"));
        }
        let pk = self.p.pow(k);
        let big = self.m * pk;
        let y = x.lift(big).expect("divides");
        let a_inv = inv_mod(pk as i64, self.m).expect("coprime");
        let b_inv = inv_mod(self.m as i64, pk).expect("coprime");
        // coefficients of Y^β with values in Q(ζ_m), Y = ζ_{p^k}
        let mut table: Vec<Vec<Rational>> = vec![vec![Rational::zero(); self.m as usize]; pk as usize];
        for (e, c) in y.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = e as u64;
            let alpha = (e % self.m) * a_inv % self.m;
            let beta = (e % pk) * b_inv % pk;
            table[beta as usize][alpha as usize] += c;
        }
        let mut coef: Vec<CycNumber> =
            table.iter().map(|t| CycNumber::from_power_coeffs(self.m, t)).collect();
        // reduce modulo Φ_{p^k}(Y) = Σ_{i<p} Y^{i p^{k−1}}
        let step = (pk / self.p) as usize;
        let phi = pk as usize - step;
        for j in (phi..pk as usize).rev() {
            let c = std::mem::replace(&mut coef[j], CycNumber::zero(self.m));
            if c.is_zero() {
                continue;
            }
            for i in 0..(self.p as usize - 1) {
                let idx = j - phi + i * step;
                coef[idx] = coef[idx].sub(&c);
            }
        }
        if coef[1..phi].iter().any(|c| !c.is_zero()) {
            return Err(PadicError::UnsupportedEmbedding(format!(
                "value of level {} does not descend below the p-power roots of unity",
                x.level()
            )));
        }
        Ok(coef.swap_remove(0))
    }

    /// ι(x) in Z_q ⊗ Q, to absolute precision `prec`.
    pub fn embed(&self, x: &CycNumber) -> Result<QqElem, PadicError> {
        let y = self.descend(x)?;
        self.embed_tame(&y)
    }

    fn embed_tame(&self, y: &CycNumber) -> Result<QqElem, PadicError> {
        let den = y.denominator();
        let a = crate::exact_arith::nt::val_bigint(den, self.p) as i64;
        let w = self.prec + a + GUARD;
        self.ensure_powers(w)?;
        let guard = self.powers.read().expect("embedding cache poisoned");
        let mut acc = QqElem::zero(&self.ctx, guard.0);
        for (j, n) in y.numerators().iter().enumerate() {
            if n.is_zero() {
                continue;
            }
            acc = acc.add(&guard.1[j].mul_int(n));
        }
        drop(guard);
        let inv_den = PadicElem::from_rational(&Rational::new(BigInt::from(1), den.clone()), self.p, w);
        let out = acc.scale(&inv_den);
        if out.precision() < self.prec {
            return Err(PadicError::InsufficientPrecision { need: self.prec, have: out.precision() });
        }
        Ok(out.with_precision(self.prec))
    }

    /// ι(x) when it lies in Q_p (x fixed by the Frobenius ζ_m ↦ ζ_m^p).
    pub fn embed_qp(&self, x: &CycNumber) -> Result<PadicElem, PadicError> {
        let y = self.descend(x)?;
        if y.galois(self.p as i64) != y {
            return Err(PadicError::NotRational);
        }
        let e = self.embed_tame(&y)?;
        Ok(e.to_qp().expect("Frobenius-fixed values lie in Q_p"))
    }

    /// v_p(ι(x)) normalized by v_p(p) = 1, via the norm down the totally
    /// ramified part.
    pub fn valuation(&self, x: &CycNumber) -> Result<Option<Rational>, PadicError> {
        if x.is_zero() {
            return Ok(None);
        }
        let (k, mx) = split_p_part(x.level(), self.p);
        if k == 0 {
            let e = self.embed(x)?;
            return match e.valuation() {
                Some(v) => Ok(Some(Rational::from_integer(v.into()))),
                None => Err(PadicError::InsufficientPrecision { need: self.prec + 1, have: self.prec }),
            };
        }
        let n = x.level();
        let mut norm = CycNumber::one(n);
        for a in 1..n {
            if gcd(a, n) == 1 && a % mx == 1 % mx {
                norm = norm.mul(&x.galois(a as i64));
            }
        }
        let deg = (self.p - 1) * self.p.pow(k - 1);
        let e = self.embed(&norm)?;
        match e.valuation() {
            Some(v) => Ok(Some(rat(v, deg as i64))),
            None => Err(PadicError::InsufficientPrecision { need: self.prec + 1, have: self.prec }),
        }
    }

    /// Residue mod p of ι(ζ_{p−1}); defines the Teichmüller character.
    pub fn omega_generator(&self) -> u64 {
        let z = CycNumber::zeta(self.p - 1, 1);
        let t = self.embed_qp(&z).expect("(p−1)-st roots of unity lie in Z_p");
        let r = t.residue().expect("unit");
        (r % BigInt::from(self.p)).to_string().parse().expect("small residue")
    }

    /// Residue mod p of ι(√−D), for D with −D a square mod p.
    pub fn sqrt_minus_d_residue(&self, disc: u64) -> Result<u64, PadicError> {
        let s = crate::exact_arith::QuadFieldElem::sqrt_minus_d(disc).to_cyclotomic();
        let t = self.embed_qp(&s)?;
        if t.valuation() != Some(0) {
            return Err(PadicError::NotRational);
        }
        let r = t.residue().expect("unit");
        Ok((r % BigInt::from(self.p)).to_string().parse().expect("small residue"))
    }
}
