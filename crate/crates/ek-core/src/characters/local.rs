use super::{gauss_sum, prime_power_base, CharError, DirichletChar};
use crate::exact_arith::rational::Rational;
use crate::exact_arith::{CycNumber, ScaledUnit};

/// Character of Q_p^×: τ(p^k u) = at_p^k · χ(u) for u ∈ Z_p^×, where χ is a
/// Dirichlet character of p-power modulus read on u mod p^t.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalChar {
    p: u64,
    unit: DirichletChar,
    at_p: ScaledUnit,
}

impl LocalChar {
    pub fn new(p: u64, unit: DirichletChar, at_p: ScaledUnit) -> Result<Self, CharError> {
        let m = unit.modulus();
        if m != 1 {
            let (q, _) = prime_power_base(m)?;
            if q != p {
                return Err(CharError::ModulusMismatch { a: p, b: m });
            }
        }
        if at_p.is_zero() {
            return Err(CharError::Inconsistent("τ(p) must be nonzero".into()));
        }
        if at_p.base != p && !at_p.exp.eq(&Rational::from_integer(0.into())) {
            return Err(CharError::Inconsistent("τ(p) must be a power of p times a unit".into()));
        }
        let at_p = ScaledUnit::new(at_p.unit, p, at_p.exp);
        Ok(LocalChar { p, unit, at_p })
    }

    /// Character with τ(p) a root of unity.
    pub fn with_root(p: u64, unit: DirichletChar, at_p: CycNumber) -> Result<Self, CharError> {
        Self::new(p, unit, ScaledUnit::from_unit(at_p, p))
    }

    pub fn unramified(p: u64, at_p: ScaledUnit) -> Result<Self, CharError> {
        Self::new(p, DirichletChar::trivial(1), at_p)
    }

    pub fn trivial(p: u64) -> Self {
        LocalChar { p, unit: DirichletChar::trivial(1), at_p: ScaledUnit::one(p) }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Restriction to Z_p^×.
    pub fn unit_char(&self) -> &DirichletChar {
        &self.unit
    }

    /// τ(p).
    pub fn at_p(&self) -> &ScaledUnit {
        &self.at_p
    }

    /// Exponent t of the conductor p^t (0 if unramified).
    pub fn conductor_exponent(&self) -> u32 {
        let f = self.unit.conductor();
        if f == 1 {
            0
        } else {
            crate::exact_arith::nt::split_p_part(f, self.p).0
        }
    }

    /// τ(p^k u) for an integer p^k · u.
    pub fn eval_int(&self, x: i64) -> Result<ScaledUnit, CharError> {
        if x == 0 {
            return Err(CharError::Inconsistent("τ(0) is undefined".into()));
        }
        let (k, u) = crate::exact_arith::nt::split_p_part(x.unsigned_abs(), self.p);
        let u = if x < 0 { -(u as i64) } else { u as i64 };
        let a = self.at_p.pow(k as i64)?;
        Ok(a.mul_unit(&self.unit.value(u)))
    }

    /// τ(x) for a nonzero rational x.
    pub fn eval_rational(&self, x: &Rational) -> Result<ScaledUnit, CharError> {
        let n: i64 = x.numer().try_into().map_err(|_| CharError::Inconsistent("numerator too large".into()))?;
        let d: i64 = x.denom().try_into().map_err(|_| CharError::Inconsistent("denominator too large".into()))?;
        self.eval_int(n)?.div(&self.eval_int(d)?).map_err(CharError::from)
    }

    /// Value on a p-adic unit given by its residue mod p^t.
    pub fn on_unit(&self, u: i64) -> CycNumber {
        self.unit.value(u)
    }

    pub fn mul(&self, o: &Self) -> Result<Self, CharError> {
        if self.p != o.p {
            return Err(CharError::ModulusMismatch { a: self.p, b: o.p });
        }
        let unit = self.unit.mul(&o.unit).primitive();
        Ok(LocalChar { p: self.p, unit, at_p: self.at_p.mul(&o.at_p)? })
    }

    pub fn inverse(&self) -> Result<Self, CharError> {
        Ok(LocalChar { p: self.p, unit: self.unit.conj(), at_p: self.at_p.inverse()? })
    }

    pub fn pow(&self, k: i64) -> Result<Self, CharError> {
        Ok(LocalChar { p: self.p, unit: self.unit.pow(k), at_p: self.at_p.pow(k)? })
    }

    /// τ̄: complex conjugation of a unitary character equals the inverse on
    /// the unit part; τ(p) is conjugated.
    pub fn conj(&self) -> Self {
        LocalChar {
            p: self.p,
            unit: self.unit.conj(),
            at_p: ScaledUnit::new(self.at_p.unit.conj(), self.p, self.at_p.exp.clone()),
        }
    }

    /// 𝔤(τ) of the unit part on its conductor.
    pub fn gauss_sum(&self) -> Result<CycNumber, CharError> {
        gauss_sum(&self.unit.primitive())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "p": self.p,
            "unit": self.unit.primitive().to_json(),
            "at_p": self.at_p.to_json(),
        })
    }
}

/// τ_p = (τ_1, τ_2) on K_p^× = Q_p^× × Q_p^× together with the weight κ of
/// the infinity type.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPCharPair {
    pub tau1: LocalChar,
    pub tau2: LocalChar,
    pub wt: i64,
}

impl SplitPCharPair {
    pub fn new(tau1: LocalChar, tau2: LocalChar, wt: i64) -> Result<Self, CharError> {
        if tau1.p() != tau2.p() {
            return Err(CharError::ModulusMismatch { a: tau1.p(), b: tau2.p() });
        }
        Ok(SplitPCharPair { tau1, tau2, wt })
    }

    pub fn p(&self) -> u64 {
        self.tau1.p()
    }

    /// τ′ = τ|_{Q_p^×}, x ↦ τ_1(x)τ_2(x).
    pub fn tau_prime(&self) -> LocalChar {
        self.tau1.mul(&self.tau2).expect("same p")
    }

    /// τ^c = (τ_2, τ_1).
    pub fn conj_c(&self) -> Self {
        SplitPCharPair { tau1: self.tau2.clone(), tau2: self.tau1.clone(), wt: self.wt }
    }

    /// τ̄ componentwise.
    pub fn conj(&self) -> Self {
        SplitPCharPair { tau1: self.tau1.conj(), tau2: self.tau2.conj(), wt: self.wt }
    }

    /// τ(x, y) = τ_1(x) τ_2(y).
    pub fn eval(&self, x: &Rational, y: &Rational) -> Result<ScaledUnit, CharError> {
        self.tau1.eval_rational(x)?.mul(&self.tau2.eval_rational(y)?).map_err(CharError::from)
    }

    /// τ_1, τ_2 and τ_1τ_2 all of conductor p.
    pub fn check_pullback_conductors(&self) -> Result<(), CharError> {
        let p = self.p();
        for (name, c) in [("tau1", &self.tau1), ("tau2", &self.tau2), ("tau1*tau2", &self.tau_prime())] {
            let f = c.unit_char().conductor();
            if f != p {
                return Err(CharError::Conductor(format!("{name} has conductor {f}, expected {p}")));
            }
        }
        Ok(())
    }

    /// τ_1τ_2 of conductor p.
    pub fn check_siegel_conductor(&self) -> Result<(), CharError> {
        let f = self.tau_prime().unit_char().conductor();
        if f != self.p() {
            return Err(CharError::Conductor(format!("tau1*tau2 has conductor {f}, expected {}", self.p())));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tau1": self.tau1.to_json(),
            "tau2": self.tau2.to_json(),
            "weight": self.wt,
        })
    }
}
