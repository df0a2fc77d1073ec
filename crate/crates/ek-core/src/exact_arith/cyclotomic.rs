use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::nt::{euler_phi, gcd, lcm};
use super::rational::{rational_to_string, Rational};
use super::ArithError;

/// Per-level data: reductions of ζ^k modulo Φ_N for 0 ≤ k < N.
struct LevelData {
    phi: usize,
    powers: Vec<Vec<i64>>,
}

fn level_cache() -> &'static RwLock<HashMap<u64, Arc<LevelData>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<LevelData>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic, exact division
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        q[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

fn cyclotomic_poly(n: u64, memo: &mut HashMap<u64, Vec<i64>>) -> Vec<i64> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in super::nt::divisors(n) {
        if d < n {
            let pd = cyclotomic_poly(d, memo);
            num = poly_div_exact(&num, &pd);
        }
    }
    memo.insert(n, num.clone());
    num
}

fn level_data(n: u64) -> Arc<LevelData> {
    if let Some(d) = level_cache().read().expect("level cache poisoned").get(&n) {
        return d.clone();
    }
    let mut memo = HashMap::new();
    let phi_poly = cyclotomic_poly(n, &mut memo);
    let phi = euler_phi(n) as usize;
    debug_assert_eq!(phi_poly.len(), phi + 1);
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    cur[0] = 1;
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce
        let top = cur[phi - 1];
        let mut next = vec![0i64; phi];
        next[1..phi].copy_from_slice(&cur[..(phi - 1)]);
        if top != 0 {
            for j in 0..phi {
                next[j] = next[j]
                    .checked_sub(top.checked_mul(phi_poly[j]).expect("cyclotomic table overflow"))
                    .expect("cyclotomic table overflow");
            }
        }
        cur = next;
    }
    let data = Arc::new(LevelData { phi, powers });
    level_cache()
        .write()
        .expect("level cache poisoned")
        .entry(n)
        .or_insert(data)
        .clone()
}

/// Element of Q(ζ_N) in the power basis modulo Φ_N.
///
/// Stored as an integer numerator vector over one positive denominator, kept
/// in lowest terms.
#[derive(Clone, Debug)]
pub struct CycNumber {
    level: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNumber {
    fn normalized(level: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for c in num.iter_mut() {
                *c = -&*c;
            }
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if num.iter().all(|c| c.is_zero()) {
            den = BigInt::one();
        } else if !g.is_one() {
            den /= &g;
            for c in num.iter_mut() {
                *c /= &g;
            }
        }
        CycNumber { level, num, den }
    }

    pub fn zero(level: u64) -> Self {
        let phi = euler_phi(level) as usize;
        CycNumber { level, num: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn one(level: u64) -> Self {
        Self::from_rational_at(&Rational::one(), level)
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_rational_at(q, 1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational_at(q: &Rational, level: u64) -> Self {
        let mut z = Self::zero(level);
        z.num[0] = q.numer().clone();
        Self::normalized(level, z.num, q.denom().clone())
    }

    /// ζ_N^k.
    pub fn zeta(level: u64, k: i64) -> Self {
        let e = k.rem_euclid(level as i64) as u64;
        let d = level_data(level);
        let num = d.powers[e as usize].iter().map(|&c| BigInt::from(c)).collect();
        CycNumber { level, num, den: BigInt::one() }
    }

    /// Σ counts[k]·ζ_N^k for k < N.
    pub fn from_exponent_counts(level: u64, counts: &[i64]) -> Self {
        assert_eq!(counts.len() as u64, level, "need one count per residue");
        let d = level_data(level);
        let mut acc = vec![0i64; d.phi];
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                for (a, &t) in acc.iter_mut().zip(&d.powers[k]) {
                    *a += c * t;
                }
            }
        }
        CycNumber::normalized(level, acc.into_iter().map(BigInt::from).collect(), BigInt::one())
    }

    /// Σ c_k·ζ_N^k with rational coefficients, k < N.
    pub fn from_power_coeffs(level: u64, coeffs: &[Rational]) -> Self {
        let d = level_data(level);
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut acc = vec![BigInt::zero(); d.phi];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let scaled = c.numer() * (&den / c.denom());
            for (a, &t) in acc.iter_mut().zip(&d.powers[k % level as usize]) {
                if t != 0 {
                    *a += &scaled * t;
                }
            }
        }
        CycNumber::normalized(level, acc, den)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Power-basis coefficients (length φ(N)).
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|q| q.is_one()).unwrap_or(false)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num.iter().skip(1).all(|c| c.is_zero()) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Re-express in Q(ζ_M) for a multiple M of the level.
    pub fn lift(&self, target: u64) -> Result<Self, ArithError> {
        if target % self.level != 0 {
            return Err(ArithError::LevelMismatch { from: self.level, to: target });
        }
        if target == self.level {
            return Ok(self.clone());
        }
        let t = (target / self.level) as usize;
        let d = level_data(target);
        let mut acc = vec![BigInt::zero(); d.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (a, &r) in acc.iter_mut().zip(&d.powers[j * t]) {
                if r != 0 {
                    *a += c * r;
                }
            }
        }
        Ok(CycNumber::normalized(target, acc, self.den.clone()))
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        if self.level == o.level {
            return (self.clone(), o.clone());
        }
        let l = lcm(self.level, o.level);
        (self.lift(l).expect("lcm lift"), o.lift(l).expect("lcm lift"))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.level != o.level {
            let (a, b) = self.common(o);
            return a.add(&b);
        }
        let den = self.den.lcm(&o.den);
        let fa = &den / &self.den;
        let fb = &den / &o.den;
        let num = self
            .num
            .iter()
            .zip(&o.num)
            .map(|(x, y)| x * &fa + y * &fb)
            .collect();
        CycNumber::normalized(self.level, num, den)
    }

    pub fn neg(&self) -> Self {
        CycNumber {
            level: self.level,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        CycNumber::normalized(self.level, num, &self.den * q.denom())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.level != o.level {
            if let Some(q) = o.as_rational() {
                return self.scale(&q);
            }
            if let Some(q) = self.as_rational() {
                return o.scale(&q);
            }
            let (a, b) = self.common(o);
            return a.mul(&b);
        }
        let d = level_data(self.level);
        let phi = d.phi;
        let mut conv = vec![BigInt::zero(); 2 * phi - 1];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.num.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let n = self.level as usize;
        let mut acc: Vec<BigInt> = conv[..phi].to_vec();
        for (k, c) in conv.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (a, &t) in acc.iter_mut().zip(&d.powers[k % n]) {
                if t != 0 {
                    *a += c * t;
                }
            }
        }
        CycNumber::normalized(self.level, acc, &self.den * &o.den)
    }

    pub fn pow(&self, e: i64) -> Result<Self, ArithError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycNumber::one(self.level);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// The automorphism ζ ↦ ζ^a, gcd(a, N) = 1.
    pub fn galois(&self, a: i64) -> Self {
        let n = self.level as i64;
        assert_eq!(gcd(a.rem_euclid(n) as u64, self.level), 1, "not a unit mod level");
        let d = level_data(self.level);
        let mut acc = vec![BigInt::zero(); d.phi];
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = (a * j as i64).rem_euclid(n) as usize;
            for (x, &t) in acc.iter_mut().zip(&d.powers[k]) {
                if t != 0 {
                    *x += c * t;
                }
            }
        }
        CycNumber::normalized(self.level, acc, self.den.clone())
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(CycNumber::from_rational_at(&q.recip(), self.level));
        }
        let c = self.conj();
        if let Some(q) = self.mul(&c).as_rational() {
            return Ok(c.scale(&q.recip()));
        }
        // product of the nontrivial conjugates over the norm
        let n = self.level;
        let mut rest = CycNumber::one(n);
        for a in 2..n {
            if gcd(a, n) == 1 {
                rest = rest.mul(&self.galois(a as i64));
            }
        }
        let norm = self.mul(&rest).as_rational().expect("norm is rational");
        Ok(rest.scale(&norm.recip()))
    }

    pub fn div(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&o.inverse()?))
    }

    /// Field norm to Q.
    pub fn norm(&self) -> Rational {
        let n = self.level;
        let mut acc = self.clone();
        for a in 2..n {
            if gcd(a, n) == 1 {
                acc = acc.mul(&self.galois(a as i64));
            }
        }
        acc.as_rational().expect("norm is rational")
    }

    /// Floating evaluation at ζ_N = e^{2πi/N}; a sanity check only.
    pub fn to_complex(&self) -> (f64, f64) {
        let d = self.den.to_f64().unwrap_or(f64::NAN);
        let n = self.level as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.num.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN) / d;
            let ang = 2.0 * std::f64::consts::PI * j as f64 / n;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    /// Smallest level M | N with the element in Q(ζ_M), tried over divisors.
    pub fn reduce_level(&self) -> Self {
        if let Some(q) = self.as_rational() {
            return CycNumber::from_rational(&q);
        }
        for m in super::nt::divisors(self.level) {
            if m == self.level {
                break;
            }
            if let Some(c) = self.descend(m) {
                return c;
            }
        }
        self.clone()
    }

    /// Express in Q(ζ_M) if possible (M | N). Fixed-field test on the kernel
    /// of (Z/N)^× → (Z/M)^×.
    pub fn descend(&self, m: u64) -> Option<Self> {
        if self.level % m != 0 {
            return None;
        }
        let n = self.level;
        for a in 1..n {
            if gcd(a, n) == 1 && a % m == 1 % m && a != 1 && self.galois(a as i64) != *self {
                return None;
            }
        }
        // Solve by averaging: trace from Q(ζ_N) to Q(ζ_M) divided by degree
        // gives the element itself; read off coefficients by linear solve
        // against the lifted basis of Q(ζ_M).
        let phi_m = euler_phi(m) as usize;
        let lifted: Vec<CycNumber> = (0..phi_m)
            .map(|j| CycNumber::zeta(m, j as i64).lift(n).expect("divisor lift"))
            .collect();
        let rows: Vec<Vec<Rational>> = lifted.iter().map(|c| c.coeffs()).collect();
        let target = self.coeffs();
        let sol = solve_in_span(&rows, &target)?;
        Some(CycNumber::from_power_coeffs(m, &sol))
    }

    /// {level, coeffs} in canonical string form; rationals are written at level 1.
    pub fn to_json(&self) -> serde_json::Value {
        if self.level > 1 {
            if let Some(q) = self.as_rational() {
                return CycNumber::from_rational(&q).to_json();
            }
        }
        serde_json::json!({
            "level": self.level,
            "coeffs": self.coeffs().iter().map(rational_to_string).collect::<Vec<_>>(),
        })
    }
}

/// Solve Σ x_j rows[j] = target over Q, if solvable.
fn solve_in_span(rows: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let k = rows.len();
    let dim = target.len();
    // augmented matrix: dim equations, k unknowns
    let mut m: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rational> = rows.iter().map(|r| r[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(pr) = (r..dim).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, pr);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..dim {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = m[i][k].clone();
    }
    Some(sol)
}

impl PartialEq for CycNumber {
    fn eq(&self, o: &Self) -> bool {
        if self.level == o.level {
            self.den == o.den && self.num == o.num
        } else {
            let (a, b) = self.common(o);
            a.den == b.den && a.num == b.num
        }
    }
}

impl Eq for CycNumber {}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (j, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let q = Rational::new(c.clone(), self.den.clone());
            write!(f, "({q})z{}^{j}", self.level)?;
        }
        Ok(())
    }
}

impl std::ops::Add for &CycNumber {
    type Output = CycNumber;
    fn add(self, o: &CycNumber) -> CycNumber {
        CycNumber::add(self, o)
    }
}

impl std::ops::Sub for &CycNumber {
    type Output = CycNumber;
    fn sub(self, o: &CycNumber) -> CycNumber {
        CycNumber::sub(self, o)
    }
}

impl std::ops::Mul for &CycNumber {
    type Output = CycNumber;
    fn mul(self, o: &CycNumber) -> CycNumber {
        CycNumber::mul(self, o)
    }
}

impl std::ops::Neg for &CycNumber {
    type Output = CycNumber;
    fn neg(self) -> CycNumber {
        CycNumber::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn zeta_order() {
        for n in [1u64, 2, 3, 4, 5, 12, 20, 28, 140] {
            let z = CycNumber::zeta(n, 1);
            assert!(z.pow(n as i64).unwrap().is_one(), "level {n}");
            if n > 1 {
                assert!(!z.pow((n / 2).max(1) as i64).unwrap().is_one() || n == 2);
            }
        }
    }

    #[test]
    fn sum_of_primitive_roots_is_mobius() {
        // Σ_{a∈(Z/N)^×} ζ^a = μ(N)
        for (n, mu) in [(5u64, -1i64), (6, 1), (4, 0), (12, 0), (15, 1), (7, -1)] {
            let counts: Vec<i64> = (0..n).map(|a| if gcd(a, n) == 1 { 1 } else { 0 }).collect();
            let s = CycNumber::from_exponent_counts(n, &counts);
            assert_eq!(s.as_rational(), Some(int(mu)), "N={n}");
        }
    }

    #[test]
    fn lift_and_mixed_levels() {
        let i = CycNumber::zeta(4, 1);
        let w = CycNumber::zeta(3, 1);
        let prod = i.mul(&w);
        assert_eq!(prod.level(), 12);
        assert_eq!(prod, CycNumber::zeta(12, 3 + 4));
        assert_eq!(i.lift(20).unwrap(), CycNumber::zeta(20, 5));
        assert!(i.lift(6).is_err());
    }

    #[test]
    fn inverse_and_norm() {
        let x = CycNumber::from_power_coeffs(7, &[int(2), int(1), int(0), int(3)]);
        let y = x.inverse().unwrap();
        assert!(x.mul(&y).is_one());
        let one_plus_i = CycNumber::from_power_coeffs(4, &[int(1), int(1)]);
        assert_eq!(one_plus_i.norm(), int(2));
        assert_eq!(CycNumber::zero(5).inverse(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn descend_rational_and_subfield() {
        let g = CycNumber::from_exponent_counts(5, &[0, 1, -1, -1, 1]);
        let g2 = g.mul(&g);
        assert_eq!(g2.as_rational(), Some(int(5)));
        let i20 = CycNumber::zeta(20, 5);
        assert_eq!(i20.descend(4), Some(CycNumber::zeta(4, 1)));
        assert_eq!(CycNumber::zeta(20, 1).descend(4), None);
        assert_eq!(CycNumber::zeta(20, 5).reduce_level().level(), 4);
    }

    #[test]
    fn json_shape() {
        let x = CycNumber::from_power_coeffs(3, &[rat(1, 2), int(0), int(1)]);
        let j = x.to_json();
        assert_eq!(j["level"], 3);
        assert_eq!(j["coeffs"].as_array().unwrap().len(), 2);
    }

    fn arb_cyc(level: u64) -> impl Strategy<Value = CycNumber> {
        let phi = euler_phi(level) as usize;
        proptest::collection::vec((-9i64..10, 1i64..5), phi)
            .prop_map(move |v| {
                let c: Vec<Rational> = v.iter().map(|&(n, d)| rat(n, d)).collect();
                CycNumber::from_power_coeffs(level, &c)
            })
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-9 * (1.0 + a.0.abs()) && (a.1 - b.1).abs() < 1e-9 * (1.0 + a.1.abs())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mul_matches_float((a, b) in (1u64..=40).prop_flat_map(|l| (arb_cyc(l), arb_cyc(l)))) {
            let (ar, ai) = a.to_complex();
            let (br, bi) = b.to_complex();
            let want = (ar * br - ai * bi, ar * bi + ai * br);
            prop_assert!(close(a.mul(&b).to_complex(), want));
        }

        #[test]
        fn ring_axioms(a in arb_cyc(12), b in arb_cyc(12), c in arb_cyc(12)) {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        }

        #[test]
        fn inverse_is_inverse(a in arb_cyc(15)) {
            prop_assume!(!a.is_zero());
            prop_assert!(a.mul(&a.inverse().unwrap()).is_one());
        }
    }
}
