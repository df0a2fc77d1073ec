use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::cyclotomic::CycNumber;
use super::nt::kronecker;
use super::rational::{int, is_integer, is_p_integral, rational_to_string, Rational};
use super::ArithError;

/// a + b·√(−D) in K = Q(√−D).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadFieldElem {
    pub a: Rational,
    pub b: Rational,
    pub disc: u64,
}

impl QuadFieldElem {
    pub fn new(a: Rational, b: Rational, disc: u64) -> Self {
        QuadFieldElem { a, b, disc }
    }

    pub fn from_rational(a: Rational, disc: u64) -> Self {
        QuadFieldElem { a, b: Rational::zero(), disc }
    }

    pub fn from_int(n: i64, disc: u64) -> Self {
        Self::from_rational(int(n), disc)
    }

    pub fn zero(disc: u64) -> Self {
        Self::from_int(0, disc)
    }

    pub fn one(disc: u64) -> Self {
        Self::from_int(1, disc)
    }

    /// √(−D).
    pub fn sqrt_minus_d(disc: u64) -> Self {
        QuadFieldElem { a: Rational::zero(), b: Rational::one(), disc }
    }

    /// Generator ω of O_K = Z[ω].
    pub fn omega(disc: u64) -> Self {
        if disc % 4 == 3 {
            QuadFieldElem { a: super::rational::rat(1, 2), b: super::rational::rat(1, 2), disc }
        } else {
            Self::sqrt_minus_d(disc)
        }
    }

    /// x + y·ω.
    pub fn from_basis(x: i64, y: i64, disc: u64) -> Self {
        let w = Self::omega(disc);
        Self::from_int(x, disc).add(&w.scale(&int(y)))
    }

    /// Field discriminant: −D if D ≡ 3 mod 4, else −4D.
    pub fn field_discriminant(disc: u64) -> i64 {
        if disc % 4 == 3 {
            -(disc as i64)
        } else {
            -4 * disc as i64
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.disc, other.disc, "mixed imaginary quadratic fields");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        QuadFieldElem { a: &self.a + &o.a, b: &self.b + &o.b, disc: self.disc }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.check(o);
        QuadFieldElem { a: &self.a - &o.a, b: &self.b - &o.b, disc: self.disc }
    }

    pub fn neg(&self) -> Self {
        QuadFieldElem { a: -&self.a, b: -&self.b, disc: self.disc }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = int(self.disc as i64);
        QuadFieldElem {
            a: &self.a * &o.a - d * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
            disc: self.disc,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        QuadFieldElem { a: &self.a * q, b: &self.b * q, disc: self.disc }
    }

    pub fn conj(&self) -> Self {
        QuadFieldElem { a: self.a.clone(), b: -&self.b, disc: self.disc }
    }

    pub fn norm(&self) -> Rational {
        &self.a * &self.a + int(self.disc as i64) * &self.b * &self.b
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&o.inverse()?))
    }

    pub fn pow(&self, e: u64) -> Self {
        let mut acc = Self::one(self.disc);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Membership in O_K: trace and norm are integers.
    pub fn is_integral(&self) -> bool {
        is_integer(&self.trace()) && is_integer(&self.norm())
    }

    /// Membership in O_K ⊗ Z_(q).
    pub fn is_integral_at(&self, q: u64) -> bool {
        is_p_integral(&self.trace(), q) && is_p_integral(&self.norm(), q)
    }

    /// Coordinates (x, y) with self = x + y·ω.
    pub fn basis_coords(&self) -> (Rational, Rational) {
        if self.disc % 4 == 3 {
            let y = &self.b + &self.b;
            let x = &self.a - &self.b;
            (x, y)
        } else {
            (self.a.clone(), self.b.clone())
        }
    }

    /// Compact text form used in JSON: "a/b+c/d*s" with s = √−D.
    pub fn to_string_canonical(&self) -> String {
        format!("{}+{}*s", rational_to_string(&self.a), rational_to_string(&self.b))
    }

    /// Level |d_K| at which √−D lives.
    pub fn cyclotomic_level(disc: u64) -> u64 {
        Self::field_discriminant(disc).unsigned_abs()
    }

    /// Image in Q(ζ_{|d_K|}) via the quadratic Gauss sum, which equals √d_K.
    pub fn to_cyclotomic(&self) -> CycNumber {
        let d = Self::field_discriminant(self.disc);
        let n = d.unsigned_abs();
        let counts: Vec<i64> = (0..n).map(|a| kronecker(d, a) as i64).collect();
        let mut root = CycNumber::from_exponent_counts(n, &counts);
        if d != -(self.disc as i64) {
            root = root.scale(&super::rational::rat(1, 2));
        }
        CycNumber::from_rational(&self.a).add(&root.scale(&self.b))
    }

    /// Integer pair if both parts are integers.
    pub fn integer_parts(&self) -> Option<(BigInt, BigInt)> {
        if is_integer(&self.a) && is_integer(&self.b) {
            Some((self.a.numer().clone(), self.b.numer().clone()))
        } else {
            None
        }
    }
}

impl fmt::Display for QuadFieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}+{}√-{}", self.a, self.b, self.disc)
        }
    }
}
