use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::PadicError;
use crate::exact_arith::nt::val_bigint;
use crate::exact_arith::rational::{prime_pow, rational_to_string, val_rational, Rational};

pub(crate) fn pp(p: u64, e: i64) -> BigInt {
    debug_assert!(e >= 0);
    num_traits::pow(BigInt::from(p), e as usize)
}

pub(crate) fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// p-adic number p^val·unit known modulo p^prec (absolute precision).
///
/// A zero flag means the value is ≡ 0 modulo p^prec.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicElem {
    p: u64,
    val: Option<i64>,
    unit: BigInt,
    prec: i64,
}

impl PadicElem {
    pub fn zero(p: u64, prec: i64) -> Self {
        PadicElem { p, val: None, unit: BigInt::zero(), prec }
    }

    /// p^v·x known modulo p^prec, x any integer.
    pub(crate) fn make(p: u64, prec: i64, v: i64, x: BigInt) -> Self {
        if x.is_zero() || prec <= v {
            return Self::zero(p, prec);
        }
        let w = val_bigint(&x, p) as i64;
        let v2 = v + w;
        if v2 >= prec {
            return Self::zero(p, prec);
        }
        let u = x / pp(p, w);
        let u = u.mod_floor(&pp(p, prec - v2));
        PadicElem { p, val: Some(v2), unit: u, prec }
    }

    pub fn from_int(n: i64, p: u64, prec: i64) -> Self {
        Self::make(p, prec, 0, BigInt::from(n))
    }

    pub fn from_bigint(n: &BigInt, p: u64, prec: i64) -> Self {
        Self::make(p, prec, 0, n.clone())
    }

    pub fn from_rational(q: &Rational, p: u64, prec: i64) -> Self {
        if q.is_zero() {
            return Self::zero(p, prec);
        }
        let v = val_rational(q, p);
        if prec <= v {
            return Self::zero(p, prec);
        }
        let u = q * prime_pow(p, -v);
        let m = pp(p, prec - v);
        let dinv = inv_mod_big(u.denom(), &m).expect("unit denominator");
        let unit = (u.numer() * dinv).mod_floor(&m);
        PadicElem { p, val: Some(v), unit, prec }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// None when the value is zero to the known precision.
    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    /// Drop precision to at most k.
    pub fn with_precision(&self, k: i64) -> Self {
        if k >= self.prec {
            return self.clone();
        }
        match self.val {
            None => Self::zero(self.p, k),
            Some(v) => Self::make(self.p, k, v, self.unit.clone()),
        }
    }

    /// Rational representative p^val·unit.
    pub fn to_rational(&self) -> Rational {
        match self.val {
            None => Rational::zero(),
            Some(v) => Rational::from_integer(self.unit.clone()) * prime_pow(self.p, v),
        }
    }

    /// Integer representative in [0, p^prec), for elements with val ≥ 0.
    pub fn residue(&self) -> Option<BigInt> {
        match self.val {
            None => Some(BigInt::zero()),
            Some(v) if v >= 0 => Some(&self.unit * pp(self.p, v)),
            _ => None,
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.p, o.p, "mixed primes");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let prec = self.prec.min(o.prec);
        match (self.val, o.val) {
            (None, _) => o.with_precision(prec),
            (_, None) => self.with_precision(prec),
            (Some(va), Some(vb)) => {
                let m = va.min(vb);
                let x = &self.unit * pp(self.p, va - m) + &o.unit * pp(self.p, vb - m);
                Self::make(self.p, prec, m, x)
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => Self::make(self.p, self.prec, v, -&self.unit),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        match (self.val, o.val) {
            (None, None) => Self::zero(self.p, self.prec + o.prec),
            (None, Some(vb)) => Self::zero(self.p, self.prec + vb),
            (Some(va), None) => Self::zero(self.p, o.prec + va),
            (Some(va), Some(vb)) => {
                let prec = (self.prec + vb).min(o.prec + va);
                Self::make(self.p, prec, va + vb, &self.unit * &o.unit)
            }
        }
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, n: &BigInt) -> Self {
        if n.is_zero() {
            return Self::zero(self.p, i64::MAX / 4);
        }
        let w = val_bigint(n, self.p) as i64;
        let u = n / pp(self.p, w);
        match self.val {
            None => Self::zero(self.p, self.prec + w),
            Some(v) => Self::make(self.p, self.prec + w, v + w, &self.unit * u),
        }
    }

    pub fn inverse(&self) -> Result<Self, PadicError> {
        let v = self.val.ok_or(PadicError::DivisionByZero)?;
        let rel = self.prec - v;
        let m = pp(self.p, rel);
        let inv = inv_mod_big(&self.unit, &m).expect("unit part is invertible");
        Ok(PadicElem { p: self.p, val: Some(-v), unit: inv, prec: rel - v })
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        Ok(self.mul(&o.inverse()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::from_int(1, self.p, self.prec.max(1));
        let mut b = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                acc = if first { b.clone() } else { acc.mul(&b) };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "valuation": self.val,
            "unit": self.unit.to_string(),
            "prec": self.prec,
            "value": rational_to_string(&self.to_rational()),
        })
    }
}

impl fmt::Display for PadicElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None => write!(f, "O({}^{})", self.p, self.prec),
            Some(v) => write!(f, "{}^{}·{} + O({}^{})", self.p, v, self.unit, self.p, self.prec),
        }
    }
}

/// The (p−1)-st root of unity congruent to a mod p, to absolute precision prec.
pub fn teichmuller(a: i64, p: u64, prec: i64) -> Result<PadicElem, PadicError> {
    if a.rem_euclid(p as i64) == 0 {
        return Err(PadicError::NonUnit { a, p });
    }
    let m = pp(p, prec);
    let mut x = BigInt::from(a).mod_floor(&m);
    let pe = BigInt::from(p);
    for _ in 0..prec {
        x = x.modpow(&pe, &m);
    }
    Ok(PadicElem::from_bigint(&x, p, prec))
}

/// val(a − b) ≥ k, provided both sides are known to precision k.
pub fn congruent_mod(a: &PadicElem, b: &PadicElem, k: i64) -> Result<bool, PadicError> {
    let have = a.prec.min(b.prec);
    if have < k {
        return Err(PadicError::InsufficientPrecision { need: k, have });
    }
    Ok(match a.sub(b).val {
        None => true,
        Some(v) => v >= k,
    })
}

impl PadicElem {
    /// True when |self| ≤ 1.
    pub fn is_integral(&self) -> bool {
        self.val.map(|v| v >= 0).unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn teichmuller_examples() {
        let one = teichmuller(1, 5, 6).unwrap();
        assert_eq!(one, PadicElem::from_int(1, 5, 6));
        let t = teichmuller(2, 5, 3).unwrap();
        assert_eq!(t.pow(4), PadicElem::from_int(1, 5, 3));
        assert_eq!(t.residue().unwrap().mod_floor(&BigInt::from(5)), BigInt::from(2));
        assert_eq!(teichmuller(2, 3, 5).unwrap(), PadicElem::from_int(-1, 3, 5));
        assert!(matches!(teichmuller(10, 5, 3), Err(PadicError::NonUnit { .. })));
    }

    #[test]
    fn congruence_examples() {
        let a = PadicElem::from_int(1, 5, 4);
        let b = PadicElem::from_int(6, 5, 4);
        assert!(congruent_mod(&a, &b, 1).unwrap());
        assert!(!congruent_mod(&a, &b, 2).unwrap());
        assert!(congruent_mod(&a, &a, 4).unwrap());
        assert!(matches!(congruent_mod(&a, &b, 5), Err(PadicError::InsufficientPrecision { .. })));
        // (1−5)ζ(−1) and (1−5^5)ζ(−5), with ζ(−1) = −1/12 and ζ(−5) = −1/252
        let x = PadicElem::from_rational(&(int(1 - 5) * rat(-1, 12)), 5, 6);
        let y = PadicElem::from_rational(&(int(1 - 3125) * rat(-1, 252)), 5, 6);
        assert!(congruent_mod(&x, &y, 1).unwrap());
    }

    #[test]
    fn precision_rules() {
        let a = PadicElem::from_rational(&rat(1, 25), 5, 3);
        assert_eq!(a.valuation(), Some(-2));
        let b = PadicElem::from_int(5, 5, 3);
        let c = a.mul(&b);
        // min(3 + 1, 3 − 2) = 1
        assert_eq!(c.precision(), 1);
        assert_eq!(c.valuation(), Some(-1));
        let inv = b.inverse().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.precision(), 1);
        let s = a.add(&b);
        assert_eq!(s.precision(), 3);
    }

    fn arb(p: u64) -> impl Strategy<Value = PadicElem> {
        (-500i64..500, 1i64..60, 2i64..7).prop_map(move |(n, d, prec)| {
            PadicElem::from_rational(&rat(n, d), p, prec)
        })
    }

    proptest! {
        #[test]
        fn teichmuller_is_root_of_unity(p in prop::sample::select(vec![3u64, 5, 7]), a in 1i64..50, prec in 1i64..=6) {
            prop_assume!(a % p as i64 != 0);
            let t = teichmuller(a, p, prec).unwrap();
            prop_assert_eq!(t.pow(p - 1), PadicElem::from_int(1, p, prec));
        }

        #[test]
        fn ring_axioms_up_to_precision(a in arb(5), b in arb(5), c in arb(5)) {
            let l = a.add(&b).add(&c);
            let r = a.add(&b.add(&c));
            let k = l.precision().min(r.precision());
            prop_assert!(k <= a.precision().min(b.precision()).min(c.precision()));
            prop_assert_eq!(l.with_precision(k), r.with_precision(k));
            let l = a.mul(&b).mul(&c);
            let r = a.mul(&b.mul(&c));
            let k = l.precision().min(r.precision());
            prop_assert_eq!(l.with_precision(k), r.with_precision(k));
            let l = a.mul(&b.add(&c));
            let r = a.mul(&b).add(&a.mul(&c));
            let k = l.precision().min(r.precision());
            prop_assert_eq!(l.with_precision(k), r.with_precision(k));
        }

        #[test]
        fn precision_never_exceeds_truth(n in -500i64..500, d in 1i64..60, m in -500i64..500, e in 1i64..60) {
            // results agree with the exact rational to their stated precision
            let x = rat(n, d);
            let y = rat(m, e);
            let a = PadicElem::from_rational(&x, 5, 4);
            let b = PadicElem::from_rational(&y, 5, 4);
            let s = a.mul(&b);
            let exact = PadicElem::from_rational(&(&x * &y), 5, s.precision());
            prop_assert_eq!(s, exact);
            let t = a.add(&b);
            let exact = PadicElem::from_rational(&(&x + &y), 5, t.precision());
            prop_assert_eq!(t, exact);
        }
    }
}
