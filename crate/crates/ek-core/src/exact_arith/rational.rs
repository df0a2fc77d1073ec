use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Canonical "num/den" encoding used in every JSON report.
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// q^e for a rational base and integer exponent.
pub fn rat_pow(q: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        num_traits::pow(q.recip(), (-e) as usize)
    }
}

/// Integer power p^e as a Rational, e may be negative.
pub fn prime_pow(p: u64, e: i64) -> Rational {
    rat_pow(&Rational::from_integer(BigInt::from(p)), e)
}

/// p-adic valuation of a nonzero rational.
pub fn val_rational(q: &Rational, p: u64) -> i64 {
    assert!(!q.is_zero(), "valuation of zero");
    super::nt::val_bigint(q.numer(), p) as i64 - super::nt::val_bigint(q.denom(), p) as i64
}

/// Whether q lies in Z_(p).
pub fn is_p_integral(q: &Rational, p: u64) -> bool {
    q.is_zero() || val_rational(q, p) >= 0
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn abs_rational(q: &Rational) -> Rational {
    q.abs()
}
