use std::collections::VecDeque;
use std::fmt;

use super::CharError;
use crate::exact_arith::nt::{divisors, gcd, kronecker, lcm, pow_mod};
use crate::exact_arith::CycNumber;
use crate::padic::PadicEmbedding;

/// Dirichlet character as a full value table: χ(a) = ζ_order^{exps[a]} for
/// units a, 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletChar {
    modulus: u64,
    order: u64,
    exps: Vec<Option<u32>>,
    conductor: u64,
}

impl DirichletChar {
    /// Table constructor; the caller guarantees multiplicativity.
    fn from_table(modulus: u64, order: u64, exps: Vec<Option<u32>>) -> Self {
        let mut order = order.max(1);
        let g = exps.iter().flatten().fold(order, |acc, &e| gcd(acc, e as u64));
        let exps: Vec<Option<u32>> = if g > 1 {
            order /= g;
            exps.iter().map(|e| e.map(|x| (x as u64 / g) as u32)).collect()
        } else {
            exps
        };
        let mut c = DirichletChar { modulus, order, exps, conductor: modulus };
        c.conductor = c.compute_conductor();
        c
    }

    pub fn trivial(modulus: u64) -> Self {
        let modulus = modulus.max(1);
        let exps = (0..modulus).map(|a| (gcd(a, modulus) == 1).then_some(0)).collect();
        Self::from_table(modulus, 1, exps)
    }

    /// χ(g_i) = ζ_order^{e_i}; the generators must span (Z/modulus)^×.
    pub fn from_generators(modulus: u64, order: u64, gens: &[(u64, u32)]) -> Result<Self, CharError> {
        if modulus == 0 || order == 0 {
            return Err(CharError::Inconsistent("modulus and order must be positive".into()));
        }
        let mut exps: Vec<Option<u32>> = vec![None; modulus as usize];
        let one = 1 % modulus;
        exps[one as usize] = Some(0);
        for &(g, _) in gens {
            if gcd(g % modulus, modulus) != 1 {
                return Err(CharError::Inconsistent(format!("generator {g} is not a unit mod {modulus}")));
            }
        }
        let mut queue = VecDeque::from([one]);
        while let Some(a) = queue.pop_front() {
            let ea = exps[a as usize].expect("visited");
            for &(g, e) in gens {
                let b = (a as u128 * (g % modulus) as u128 % modulus as u128) as u64;
                let eb = ((ea as u64 + e as u64) % order) as u32;
                match exps[b as usize] {
                    None => {
                        exps[b as usize] = Some(eb);
                        queue.push_back(b);
                    }
                    Some(x) if x != eb => {
                        return Err(CharError::Inconsistent(format!(
                            "generator images are not multiplicative at {b} mod {modulus}"
                        )))
                    }
                    _ => {}
                }
            }
        }
        for a in 0..modulus {
            if gcd(a, modulus) == 1 && exps[a as usize].is_none() {
                return Err(CharError::Inconsistent(format!(
                    "generators do not span (Z/{modulus})^x (missing {a})"
                )));
            }
        }
        Ok(Self::from_table(modulus, order, exps))
    }

    /// The quadratic character mod an odd prime.
    pub fn legendre(p: u64) -> Self {
        let exps = (0..p)
            .map(|a| match kronecker(a as i64, p) {
                1 => Some(0),
                -1 => Some(1),
                _ => None,
            })
            .collect();
        Self::from_table(p, 2, exps)
    }

    /// a ↦ (d/a), a character mod |d| for a fundamental discriminant d.
    pub fn kronecker_char(d: i64) -> Self {
        let m = d.unsigned_abs();
        let exps = (0..m)
            .map(|a| match kronecker(d, a) {
                1 => Some(0),
                -1 => Some(1),
                _ => None,
            })
            .collect();
        Self::from_table(m, 2, exps)
    }

    /// ω^k for the Teichmüller character ω mod p attached to the embedding:
    /// ι(ω(a)) is the Teichmüller lift of a.
    pub fn teichmuller_power(emb: &PadicEmbedding, k: i64) -> Self {
        let p = emb.p();
        let g = emb.omega_generator();
        let mut exps = vec![None; p as usize];
        let mut x = 1u64;
        for j in 0..(p - 1) {
            exps[x as usize] = Some((j as i64 * k).rem_euclid(p as i64 - 1) as u32);
            x = x * g % p;
        }
        Self::from_table(p, p - 1, exps)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order of the character (size of its image).
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Exponent e with χ(a) = ζ_order^e, None for non-units.
    pub fn exponent(&self, a: i64) -> Option<u32> {
        self.exps[a.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn value(&self, a: i64) -> CycNumber {
        match self.exponent(a) {
            None => CycNumber::zero(1),
            Some(e) => CycNumber::zeta(self.order, e as i64),
        }
    }

    /// χ(−1) as ±1.
    pub fn parity(&self) -> i64 {
        match self.exponent(-1) {
            Some(0) => 1,
            Some(_) => -1,
            None => 1,
        }
    }

    fn compute_conductor(&self) -> u64 {
        let m = self.modulus;
        for f in divisors(m) {
            let ok = (0..m).all(|a| {
                gcd(a, m) != 1 || a % f != 1 % f || self.exps[a as usize] == Some(0)
            });
            if ok {
                return f;
            }
        }
        m
    }

    /// Same character on a multiple of the modulus.
    pub fn lift_modulus(&self, target: u64) -> Result<Self, CharError> {
        if target % self.modulus != 0 {
            return Err(CharError::ModulusMismatch { a: self.modulus, b: target });
        }
        let exps = (0..target)
            .map(|a| if gcd(a, target) == 1 { self.exps[(a % self.modulus) as usize] } else { None })
            .collect();
        Ok(Self::from_table(target, self.order, exps))
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> Self {
        let f = self.conductor;
        if f == self.modulus {
            return self.clone();
        }
        let m = self.modulus;
        let mut exps = vec![None; f as usize];
        for r in 0..f {
            if gcd(r, f) != 1 {
                continue;
            }
            // some a ≡ r mod f coprime to m
            let mut a = r;
            while gcd(a, m) != 1 {
                a += f;
            }
            exps[r as usize] = self.exps[a as usize];
        }
        Self::from_table(f, self.order, exps)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = lcm(self.modulus, o.modulus);
        let n = lcm(self.order, o.order);
        let (sa, sb) = (n / self.order, n / o.order);
        let exps = (0..m)
            .map(|a| {
                if gcd(a, m) != 1 {
                    return None;
                }
                let x = self.exps[(a % self.modulus) as usize]? as u64 * sa;
                let y = o.exps[(a % o.modulus) as usize]? as u64 * sb;
                Some(((x + y) % n) as u32)
            })
            .collect();
        Self::from_table(m, n, exps)
    }

    pub fn pow(&self, k: i64) -> Self {
        let n = self.order as i64;
        let exps = self
            .exps
            .iter()
            .map(|e| e.map(|x| (x as i64 * k).rem_euclid(n) as u32))
            .collect();
        Self::from_table(self.modulus, self.order, exps)
    }

    pub fn conj(&self) -> Self {
        self.pow(-1)
    }

    /// Value at a prime power-free rational unit: χ(n)χ(d)^{-1}.
    pub fn value_at_ratio(&self, n: i64, d: i64) -> CycNumber {
        let m = self.modulus as i64;
        let inv = crate::exact_arith::nt::inv_mod(d, self.modulus);
        match inv {
            Some(di) => self.value((n.rem_euclid(m) as u128 * di as u128 % m as u128) as i64),
            None => CycNumber::zero(1),
        }
    }

    /// Canonical description for reports.
    pub fn to_json(&self) -> serde_json::Value {
        let gens = generator_images(self);
        serde_json::json!({
            "modulus": self.modulus,
            "order": self.order,
            "conductor": self.conductor,
            "generators": gens,
        })
    }
}

/// Images of a generating set in increasing order (greedy).
fn generator_images(c: &DirichletChar) -> Vec<(u64, u32)> {
    let m = c.modulus;
    let mut reached = vec![false; m as usize];
    reached[(1 % m) as usize] = true;
    let mut count = 1usize;
    let total = (0..m).filter(|&a| gcd(a, m) == 1).count();
    let mut gens = Vec::new();
    for g in 1..m.max(2) {
        if count >= total {
            break;
        }
        if gcd(g, m) != 1 || reached[g as usize] {
            continue;
        }
        gens.push((g, c.exps[g as usize].expect("unit")));
        // close the subgroup
        let mut frontier: Vec<u64> = (0..m).filter(|&a| reached[a as usize]).collect();
        while let Some(a) = frontier.pop() {
            for &(h, _) in &gens {
                let b = a * h % m;
                if !reached[b as usize] {
                    reached[b as usize] = true;
                    count += 1;
                    frontier.push(b);
                }
            }
        }
    }
    gens
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi(mod {}, order {}, cond {})", self.modulus, self.order, self.conductor)
    }
}

/// Whether a is a primitive root mod p.
pub fn is_primitive_root(a: u64, p: u64) -> bool {
    crate::exact_arith::nt::mult_order(a, p) == p - 1 && pow_mod(a, p - 1, p) == 1
}
