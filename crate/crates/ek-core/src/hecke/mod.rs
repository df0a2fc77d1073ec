//! Weights, the κ_i dictionary and U_p eigenvalues of stabilized vectors.

use thiserror::Error;

use crate::characters::{CharError, SplitPCharPair};
use crate::exact_arith::rational::{int, rat, Rational};
use crate::exact_arith::{ArithError, CycNumber, ScaledUnit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeckeError {
    #[error("malformed weight: {0}")]
    Weight(String),
    #[error("expected {expected} character values, got {got}")]
    Count { expected: usize, got: usize },
    #[error("characters {i} and {j} coincide; the stabilized vector is not unique")]
    NotDistinct { i: usize, j: usize },
    #[error("character value at p must be nonzero")]
    ZeroValue,
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// k = (a_1, …, a_r; b_1, …, b_s), optionally with a scalar κ for weights
/// (a_1, …, a_r, 0; κ) on U(r+1, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightTuple {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub kappa_scalar: Option<i64>,
}

impl WeightTuple {
    pub fn new(a: Vec<i64>, b: Vec<i64>, kappa_scalar: Option<i64>) -> Result<Self, HeckeError> {
        let w = WeightTuple { a, b, kappa_scalar };
        w.validate()?;
        Ok(w)
    }

    pub fn from_a(a: Vec<i64>) -> Result<Self, HeckeError> {
        Self::new(a, Vec::new(), None)
    }

    pub fn r(&self) -> usize {
        self.a.len()
    }

    pub fn s(&self) -> usize {
        self.b.len()
    }

    /// a_1 ≥ … ≥ a_r, and a_r ≥ 0 when s = 0; with b present the chain
    /// a_r ≥ −b_1 + r + s ≥ … ≥ −b_s + r + s.
    pub fn validate(&self) -> Result<(), HeckeError> {
        if self.a.windows(2).any(|w| w[0] < w[1]) {
            return Err(HeckeError::Weight(format!("a = {:?} is not nonincreasing", self.a)));
        }
        let rs = (self.r() + self.s()) as i64;
        if self.b.is_empty() {
            if self.a.last().is_some_and(|&x| x < 0) {
                return Err(HeckeError::Weight(format!("a = {:?} has a negative entry", self.a)));
            }
        } else {
            let mut chain: Vec<i64> = self.a.clone();
            chain.extend(self.b.iter().map(|&b| -b + rs));
            if chain.windows(2).any(|w| w[0] < w[1]) {
                return Err(HeckeError::Weight(format!(
                    "a = {:?}, b = {:?} violate a_r >= -b_1 + r + s >= ... >= -b_s + r + s",
                    self.a, self.b
                )));
            }
        }
        Ok(())
    }

    /// Componentwise shift a_i ↦ a_i + m.
    pub fn shift_a(&self, m: i64) -> Result<Self, HeckeError> {
        Self::new(self.a.iter().map(|x| x + m).collect(), self.b.clone(), self.kappa_scalar)
    }
}

/// {κ_1 ≥ … ≥ κ_{r+s}}: b_j ↦ b_j + j − 1 − n/2 + 1/2 and
/// a_j ↦ −a_j + s + j − 1 − n/2 + 1/2.
pub fn kappa_set(w: &WeightTuple) -> Result<Vec<Rational>, HeckeError> {
    w.validate()?;
    let (r, s) = (w.r() as i64, w.s() as i64);
    let n = r + s;
    if n == 0 {
        return Err(HeckeError::Weight("r + s must be positive".into()));
    }
    let off = rat(1 - n, 2);
    let mut out: Vec<Rational> = Vec::with_capacity(n as usize);
    for (j, &b) in w.b.iter().enumerate() {
        out.push(int(b + j as i64) + &off);
    }
    for (j, &a) in w.a.iter().enumerate() {
        out.push(int(-a + s + j as i64) + &off);
    }
    out.sort_by(|x, y| y.cmp(x));
    Ok(out)
}

/// (unit, exponent) pairs: the i-th is (∏_{j≤i} χ_j(p)^{−1}, κ_1 + … + κ_i).
pub fn up_eigenvalues(chis: &[CycNumber], w: &WeightTuple) -> Result<Vec<(CycNumber, Rational)>, HeckeError> {
    let kap = kappa_set(w)?;
    if chis.len() != kap.len() {
        return Err(HeckeError::Count { expected: kap.len(), got: chis.len() });
    }
    let mut unit = CycNumber::one(1);
    let mut exp = int(0);
    let mut out = Vec::with_capacity(chis.len());
    for (c, k) in chis.iter().zip(&kap) {
        if c.is_zero() {
            return Err(HeckeError::ZeroValue);
        }
        unit = unit.mul(&c.inverse()?);
        exp += k;
        out.push((unit.clone(), exp.clone()));
    }
    Ok(out)
}

/// Distinct χ_i(p) are required for the stabilization to be unique.
pub fn check_distinct(chis: &[CycNumber]) -> Result<(), HeckeError> {
    for i in 0..chis.len() {
        for j in (i + 1)..chis.len() {
            if chis[i] == chis[j] {
                return Err(HeckeError::NotDistinct { i, j });
            }
        }
    }
    Ok(())
}

/// The r stabilized eigenvalues a_{p,1..r}, then
/// a_{p,r}·τ_1(p)^{−1}p^{−(r+κ)/2} and a_{p,r}·τ_1(p)^{−1}τ_2(p)p^{κ−r−1}.
/// Exponents are in base p.
pub fn klingen_eigenvalues(
    chis: &[CycNumber],
    pair: &SplitPCharPair,
    kappa: i64,
    w: &WeightTuple,
) -> Result<Vec<ScaledUnit>, HeckeError> {
    check_distinct(chis)?;
    pair.check_pullback_conductors()?;
    let p = pair.p();
    let r = w.r() as i64;
    if r == 0 || !w.b.is_empty() {
        return Err(HeckeError::Weight("Klingen eigenvalues need a weight (a_1, ..., a_r) with r >= 1".into()));
    }
    let mut out: Vec<ScaledUnit> = up_eigenvalues(chis, w)?.into_iter().map(|(u, e)| ScaledUnit::new(u, p, e)).collect();
    let last = out.last().expect("r >= 1").clone();
    let t1_inv = pair.tau1.at_p().inverse()?;
    let e1 = last.mul(&t1_inv)?.shift(&rat(-(r + kappa), 2));
    let e2 = last.mul(&t1_inv)?.mul(pair.tau2.at_p())?.shift(&int(kappa - r - 1));
    out.push(e1);
    out.push(e2);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{DirichletChar, LocalChar};
    use crate::padic::PadicEmbedding;
    use proptest::prelude::*;

    fn pair(kappa: i64) -> SplitPCharPair {
        let emb = PadicEmbedding::new(5, 4, 4, 0).unwrap();
        let w = LocalChar::with_root(5, DirichletChar::teichmuller_power(&emb, 1), CycNumber::zeta(4, 1)).unwrap();
        let w2 = LocalChar::with_root(5, DirichletChar::teichmuller_power(&emb, 1), CycNumber::from_int(-1)).unwrap();
        SplitPCharPair::new(w, w2, kappa).unwrap()
    }

    #[test]
    fn kappa_set_examples() {
        let w = WeightTuple::from_a(vec![0, 0]).unwrap();
        assert_eq!(kappa_set(&w).unwrap(), vec![rat(1, 2), rat(-1, 2)]);
        let w = WeightTuple::new(vec![0], vec![2], None).unwrap();
        assert_eq!(kappa_set(&w).unwrap(), vec![rat(3, 2), rat(1, 2)]);
        let w = WeightTuple::new(vec![3, 1], vec![4, 5], None).unwrap();
        let w1 = WeightTuple::new(vec![4, 2], vec![4, 5], None).unwrap();
        let (k, k1) = (kappa_set(&w).unwrap(), kappa_set(&w1).unwrap());
        // b-derived entries are 4 − 3/2 = 5/2 and 5 + 1 − 3/2 = 9/2
        for x in [rat(5, 2), rat(9, 2)] {
            assert!(k.contains(&x) && k1.contains(&x));
        }
        // a-derived entries move down by one
        assert!(k.contains(&rat(-5, 2)) && k.contains(&rat(1, 2)));
        assert!(k1.contains(&rat(-7, 2)) && k1.contains(&rat(-1, 2)));
    }

    #[test]
    fn malformed_weights() {
        assert!(WeightTuple::from_a(vec![0, 1]).is_err());
        assert!(WeightTuple::from_a(vec![-1]).is_err());
        assert!(WeightTuple::new(vec![0], vec![1], None).is_err());
        assert!(kappa_set(&WeightTuple { a: vec![], b: vec![], kappa_scalar: None }).is_err());
    }

    #[test]
    fn up_eigenvalue_examples() {
        let w = WeightTuple::from_a(vec![0, 0]).unwrap();
        let e = up_eigenvalues(&[CycNumber::one(1), CycNumber::one(1)], &w).unwrap();
        assert_eq!(e[0].1, rat(1, 2));
        assert_eq!(e[1].1, int(0));
        assert!(e[0].0.is_one() && e[1].0.is_one());
        let w1 = WeightTuple::from_a(vec![2]).unwrap();
        let z = CycNumber::zeta(3, 1);
        let e1 = up_eigenvalues(&[z.clone()], &w1).unwrap();
        assert_eq!(e1.len(), 1);
        assert_eq!(e1[0].0, z.inverse().unwrap());
        assert_eq!(e1[0].1, kappa_set(&w1).unwrap()[0]);
        assert!(up_eigenvalues(&[z], &w).is_err());
    }

    #[test]
    fn permuting_characters_changes_the_stabilization() {
        let w = WeightTuple::from_a(vec![1, 0]).unwrap();
        let (a, b) = (CycNumber::zeta(3, 1), CycNumber::from_int(-1));
        let e = up_eigenvalues(&[a.clone(), b.clone()], &w).unwrap();
        let f = up_eigenvalues(&[b.clone(), a.clone()], &w).unwrap();
        assert_eq!(e[0].0, a.inverse().unwrap());
        assert_eq!(f[0].0, b.inverse().unwrap());
        assert_eq!(e[1], f[1]);
    }

    #[test]
    fn klingen_eigenvalue_examples() {
        let pr = pair(6);
        let w = WeightTuple::from_a(vec![0]).unwrap();
        let e = klingen_eigenvalues(&[CycNumber::one(1)], &pr, 6, &w).unwrap();
        assert_eq!(e.len(), 3);
        let k1 = kappa_set(&w).unwrap()[0].clone();
        assert_eq!(e[1].exp, &k1 - rat(7, 2));
        assert_eq!(e[2].exp, &k1 + int(4));
        for x in &e {
            assert!(!x.is_zero());
        }
        let ratio = e[2].div(&e[1]).unwrap();
        assert_eq!(ratio.unit, pr.tau2.at_p().unit);
        assert_eq!(ratio.exp, int(6 - 2) + rat(7, 2));
        let w2 = WeightTuple::from_a(vec![1, 0]).unwrap();
        let one = CycNumber::one(1);
        assert!(matches!(
            klingen_eigenvalues(&[one.clone(), one], &pr, 6, &w2),
            Err(HeckeError::NotDistinct { i: 0, j: 1 })
        ));
    }

    fn weight_strategy() -> impl Strategy<Value = WeightTuple> {
        (1usize..=4, 0usize..=3).prop_flat_map(|(r, s)| {
            let s = s.min(4 - r);
            (proptest::collection::vec(0i64..8, r), proptest::collection::vec(0i64..8, s)).prop_map(move |(mut a, b)| {
                a.sort_by(|x, y| y.cmp(x));
                let rs = (r + s) as i64;
                // b nondecreasing with b_1 >= r + s - a_r satisfies the chain
                let mut bs: Vec<i64> = b.iter().scan(0i64, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                }).collect();
                let base = -a[r - 1] + rs;
                for v in bs.iter_mut() {
                    *v += base;
                }
                WeightTuple::new(a, bs, None).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn exponents_telescope(w in weight_strategy()) {
            let k = kappa_set(&w).unwrap();
            prop_assert_eq!(k.len(), w.r() + w.s());
            prop_assert!(k.windows(2).all(|x| x[0] >= x[1]));
            let chis: Vec<CycNumber> = (0..k.len()).map(|i| CycNumber::zeta(7, i as i64)).collect();
            let e = up_eigenvalues(&chis, &w).unwrap();
            prop_assert_eq!(&e[0].1, &k[0]);
            for i in 1..e.len() {
                prop_assert_eq!(&e[i].1 - &e[i - 1].1, k[i].clone());
                prop_assert_eq!(e[i].0.mul(&chis[i]), e[i - 1].0.clone());
            }
        }
    }
}
