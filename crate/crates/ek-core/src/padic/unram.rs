use std::sync::Arc;

use num_bigint::BigInt;

use super::elem::PadicElem;
use super::PadicError;
use crate::exact_arith::nt::factor;

/// Polynomials over F_p, low degree first, no trailing zeros.
type Fp = Vec<u64>;

fn trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_mulmod(a: &Fp, b: &Fp, g: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            c[i + j] = (c[i + j] + x * y) % p;
        }
    }
    fp_rem(c, g, p)
}

fn fp_rem(mut a: Fp, g: &Fp, p: u64) -> Fp {
    let dg = g.len() - 1;
    let lead_inv = crate::exact_arith::nt::inv_mod(g[dg] as i64, p).expect("nonzero lead");
    a = trim(a);
    while a.len() > dg {
        let k = a.len() - 1;
        let c = a[k] * lead_inv % p;
        for (j, &gj) in g.iter().enumerate() {
            let idx = k - dg + j;
            a[idx] = (a[idx] + p * p - c * gj % p) % p;
        }
        a = trim(a);
    }
    a
}

fn fp_powmod(a: &Fp, mut e: u128, g: &Fp, p: u64) -> Fp {
    let mut acc: Fp = vec![1];
    let mut b = fp_rem(a.clone(), g, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(&acc, &b, g, p);
        }
        b = fp_mulmod(&b, &b, g, p);
        e >>= 1;
    }
    fp_rem(acc, g, p)
}

fn fp_gcd(a: Fp, b: Fp, p: u64) -> Fp {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let r = fp_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut c = vec![0u64; n];
    for (i, x) in c.iter_mut().enumerate() {
        let u = a.get(i).copied().unwrap_or(0);
        let v = b.get(i).copied().unwrap_or(0);
        *x = (u + p - v) % p;
    }
    trim(c)
}

/// Rabin's irreducibility test for monic g of degree f.
fn is_irreducible(g: &Fp, p: u64) -> bool {
    let f = g.len() - 1;
    let x: Fp = vec![0, 1];
    let q = p as u128;
    let frob = |k: usize| fp_powmod(&x, q.pow(k as u32), g, p);
    if !fp_rem(fp_sub(&frob(f), &x, p), g, p).is_empty() {
        return false;
    }
    for (r, _) in factor(f as u64) {
        let h = fp_sub(&frob(f / r as usize), &x, p);
        let d = fp_gcd(g.clone(), h, p);
        if d.len() != 1 {
            return false;
        }
    }
    true
}

/// First monic irreducible polynomial of degree f in lexicographic order.
fn find_irreducible(p: u64, f: usize) -> Fp {
    if f == 1 {
        return vec![0, 1];
    }
    let total = (p as u128).pow(f as u32);
    for idx in 0..total {
        let mut g = vec![0u64; f + 1];
        let mut t = idx;
        for c in g.iter_mut().take(f) {
            *c = (t % p as u128) as u64;
            t /= p as u128;
        }
        g[f] = 1;
        if g[0] != 0 && is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Z_p[t]/(G) with G monic, irreducible mod p: the ring of integers of the
/// unramified extension of degree f.
#[derive(Debug, PartialEq, Eq)]
pub struct UnramCtx {
    pub p: u64,
    pub f: usize,
    pub modulus: Vec<u64>,
}

impl UnramCtx {
    pub fn new(p: u64, f: usize) -> Arc<Self> {
        Arc::new(UnramCtx { p, f, modulus: find_irreducible(p, f) })
    }

    /// An element of F_q^× of exact order m, as a residue polynomial.
    fn element_of_order(&self, m: u64) -> Result<Fp, PadicError> {
        let q = (self.p as u128).pow(self.f as u32);
        if (q - 1) % m as u128 != 0 {
            return Err(PadicError::UnsupportedEmbedding(format!(
                "F_{q} has no element of order {m}"
            )));
        }
        let cof = (q - 1) / m as u128;
        let primes: Vec<u64> = factor(m).into_iter().map(|(r, _)| r).collect();
        for idx in 1..q {
            let mut h = vec![0u64; self.f];
            let mut t = idx;
            for c in h.iter_mut() {
                *c = (t % self.p as u128) as u64;
                t /= self.p as u128;
            }
            let z = fp_powmod(&trim(h), cof, &self.modulus, self.p);
            let ok = primes.iter().all(|&r| {
                fp_powmod(&z, (m / r) as u128, &self.modulus, self.p) != vec![1]
            });
            if ok {
                return Ok(z);
            }
        }
        unreachable!("F_q^× is cyclic")
    }

    /// Teichmüller lift of an element of order m to precision prec.
    pub fn root_of_unity(self: &Arc<Self>, m: u64, prec: i64) -> Result<QqElem, PadicError> {
        let z = self.element_of_order(m)?;
        let mut x = QqElem::from_residues(self, &z, prec);
        let q = (self.p as u128).pow(self.f as u32);
        for _ in 0..prec {
            x = x.pow(q);
        }
        Ok(x)
    }
}

/// Element Σ c_i t^i of Z_q ⊗ Q, i < f, each coordinate a PadicElem.
#[derive(Clone, Debug)]
pub struct QqElem {
    ctx: Arc<UnramCtx>,
    coords: Vec<PadicElem>,
}

impl PartialEq for QqElem {
    fn eq(&self, o: &Self) -> bool {
        self.ctx == o.ctx && self.coords == o.coords
    }
}

impl QqElem {
    pub fn from_coords(ctx: &Arc<UnramCtx>, coords: Vec<PadicElem>) -> Self {
        assert_eq!(coords.len(), ctx.f);
        QqElem { ctx: ctx.clone(), coords }
    }

    pub fn from_padic(ctx: &Arc<UnramCtx>, x: PadicElem) -> Self {
        let prec = x.precision();
        let mut coords = vec![PadicElem::zero(ctx.p, prec); ctx.f];
        coords[0] = x;
        QqElem { ctx: ctx.clone(), coords }
    }

    fn from_residues(ctx: &Arc<UnramCtx>, r: &Fp, prec: i64) -> Self {
        let coords = (0..ctx.f)
            .map(|i| PadicElem::from_int(r.get(i).copied().unwrap_or(0) as i64, ctx.p, prec))
            .collect();
        QqElem { ctx: ctx.clone(), coords }
    }

    pub fn one(ctx: &Arc<UnramCtx>, prec: i64) -> Self {
        Self::from_padic(ctx, PadicElem::from_int(1, ctx.p, prec))
    }

    pub fn zero(ctx: &Arc<UnramCtx>, prec: i64) -> Self {
        Self::from_padic(ctx, PadicElem::zero(ctx.p, prec))
    }

    pub fn ctx(&self) -> &Arc<UnramCtx> {
        &self.ctx
    }

    pub fn coords(&self) -> &[PadicElem] {
        &self.coords
    }

    pub fn precision(&self) -> i64 {
        self.coords.iter().map(|c| c.precision()).min().unwrap_or(i64::MAX)
    }

    /// Minimum coordinate valuation; None if zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        self.coords.iter().filter_map(|c| c.valuation()).min()
    }

    pub fn with_precision(&self, k: i64) -> Self {
        QqElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().map(|c| c.with_precision(k)).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        QqElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        QqElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &PadicElem) -> Self {
        QqElem { ctx: self.ctx.clone(), coords: self.coords.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        QqElem { ctx: self.ctx.clone(), coords: self.coords.iter().map(|c| c.mul_int(n)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let f = self.ctx.f;
        let p = self.ctx.p;
        let prec = self.precision().min(o.precision());
        let big = prec + 64;
        let mut c = vec![PadicElem::zero(p, big); 2 * f - 1];
        for (i, x) in self.coords.iter().enumerate() {
            for (j, y) in o.coords.iter().enumerate() {
                c[i + j] = c[i + j].add(&x.mul(y));
            }
        }
        let g = &self.ctx.modulus;
        for k in (f..(2 * f - 1)).rev() {
            let top = c[k].clone();
            for (j, &gj) in g.iter().enumerate().take(f) {
                if gj != 0 {
                    let t = top.mul_int(&BigInt::from(gj));
                    c[k - f + j] = c[k - f + j].sub(&t);
                }
            }
        }
        c.truncate(f);
        QqElem { ctx: self.ctx.clone(), coords: c }
    }

    pub fn pow(&self, mut e: u128) -> Self {
        let mut acc = Self::one(&self.ctx, self.precision());
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// The coordinate in Q_p when all higher coordinates vanish to precision.
    pub fn to_qp(&self) -> Option<PadicElem> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "f": self.ctx.f,
            "modulus": self.ctx.modulus,
            "coords": self.coords.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

/// val(a − b) ≥ k in Z_q, provided both sides are known to precision k.
pub fn congruent_mod_q(a: &QqElem, b: &QqElem, k: i64) -> Result<bool, PadicError> {
    let have = a.precision().min(b.precision());
    if have < k {
        return Err(PadicError::InsufficientPrecision { need: k, have });
    }
    Ok(a.sub(b).valuation().map(|v| v >= k).unwrap_or(true))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_irreducibles() {
        for (p, f) in [(5u64, 2usize), (5, 6), (7, 3), (3, 4), (2, 3)] {
            let g = find_irreducible(p, f);
            assert_eq!(g.len(), f + 1);
            // no roots in F_p
            for a in 0..p {
                let v = g.iter().rev().fold(0u64, |acc, &c| (acc * a + c) % p);
                assert_ne!(v, 0, "p={p} f={f} root {a}");
            }
        }
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        let ctx = UnramCtx::new(5, 6);
        let z = ctx.root_of_unity(28, 8).unwrap();
        let one = QqElem::one(&ctx, 8);
        assert_eq!(z.pow(28), one);
        assert_ne!(z.pow(14), one);
        assert_ne!(z.pow(4), one);
        let ctx1 = UnramCtx::new(7, 1);
        let w = ctx1.root_of_unity(6, 5).unwrap();
        assert_eq!(w.pow(6), QqElem::one(&ctx1, 5));
        assert!(ctx1.root_of_unity(5, 5).is_err());
    }

    #[test]
    fn congruence_in_extension() {
        let ctx = UnramCtx::new(5, 2);
        let z = ctx.root_of_unity(3, 6).unwrap();
        let z5 = z.pow(5);
        // Frobenius sends ζ_3 to ζ_3^2, a different residue
        assert!(!congruent_mod_q(&z, &z5, 1).unwrap());
        assert!(congruent_mod_q(&z5, &z.pow(2), 6).unwrap());
    }
}
