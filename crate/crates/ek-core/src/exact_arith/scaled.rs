use std::fmt;

use num_traits::Zero;

use super::rational::{is_integer, prime_pow, rational_to_string, Rational};
use super::{ArithError, CycNumber};

/// unit · base^exp with a cyclotomic unit part and an exact rational
/// exponent. Values with half-integral exponents stay in this form.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledUnit {
    pub unit: CycNumber,
    pub base: u64,
    pub exp: Rational,
}

impl ScaledUnit {
    pub fn new(unit: CycNumber, base: u64, exp: Rational) -> Self {
        ScaledUnit { unit, base, exp }
    }

    pub fn one(base: u64) -> Self {
        Self::new(CycNumber::one(1), base, Rational::zero())
    }

    pub fn zero(base: u64) -> Self {
        Self::new(CycNumber::zero(1), base, Rational::zero())
    }

    pub fn from_unit(unit: CycNumber, base: u64) -> Self {
        Self::new(unit, base, Rational::zero())
    }

    pub fn power_of_base(base: u64, exp: Rational) -> Self {
        Self::new(CycNumber::one(1), base, exp)
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    fn check_base(&self, o: &Self) -> Result<(), ArithError> {
        if self.base != o.base && !self.is_zero() && !o.is_zero() {
            return Err(ArithError::BaseMismatch { a: self.base, b: o.base });
        }
        Ok(())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, ArithError> {
        self.check_base(o)?;
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero(self.base));
        }
        Ok(Self::new(self.unit.mul(&o.unit), self.base, &self.exp + &o.exp))
    }

    pub fn mul_unit(&self, u: &CycNumber) -> Self {
        Self::new(self.unit.mul(u), self.base, self.exp.clone())
    }

    pub fn shift(&self, e: &Rational) -> Self {
        Self::new(self.unit.clone(), self.base, &self.exp + e)
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        Ok(Self::new(self.unit.inverse()?, self.base, -&self.exp))
    }

    pub fn div(&self, o: &Self) -> Result<Self, ArithError> {
        self.mul(&o.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        Ok(Self::new(self.unit.pow(e)?, self.base, &self.exp * Rational::from_integer(e.into())))
    }

    /// Exact value when the exponent is an integer.
    pub fn materialize(&self) -> Option<CycNumber> {
        if self.is_zero() {
            return Some(CycNumber::zero(1));
        }
        if !is_integer(&self.exp) {
            return None;
        }
        let e: i64 = self.exp.to_integer().try_into().ok()?;
        Some(self.unit.scale(&prime_pow(self.base, e)))
    }

    /// Moves base-powers out of a rational unit part so that it becomes a
    /// base-adic unit (when the unit is rational).
    pub fn normalize(&self) -> Self {
        match self.unit.as_rational() {
            Some(q) if !q.is_zero() => {
                let v = super::rational::val_rational(&q, self.base);
                Self::new(
                    CycNumber::from_rational(&(q * prime_pow(self.base, -v))),
                    self.base,
                    &self.exp + Rational::from_integer(v.into()),
                )
            }
            _ => self.clone(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "unit": self.unit.to_json(),
            "base": self.base,
            "exponent": rational_to_string(&self.exp),
        })
    }
}

impl fmt::Display for ScaledUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * {}^({})", self.unit.to_json(), self.base, rational_to_string(&self.exp))
    }
}
