//! Action of the differential operators on q-expansion coefficients through
//! products of powers of minors of β.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exact_arith::hermitian::det_quad;
use crate::exact_arith::{CycNumber, HermitianMatrix, QuadFieldElem};
use crate::hecke::WeightTuple;
use crate::siegel_fourier::Variant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QexpError {
    #[error("beta has size {got}, expected {expected}")]
    Size { got: usize, expected: usize },
    #[error("weight {0:?} must be nonincreasing with nonnegative entries")]
    Weight(Vec<i64>),
    #[error("discriminant mismatch: {a} vs {b}")]
    Disc { a: u64, b: u64 },
}

fn check_weight(a: &[i64]) -> Result<(), QexpError> {
    if a.windows(2).any(|w| w[0] < w[1]) || a.last().is_some_and(|&x| x < 0) {
        return Err(QexpError::Weight(a.to_vec()));
    }
    Ok(())
}

/// a_k − a_{k+1} with a_{r+1} = 0.
fn exponents(a: &[i64]) -> impl Iterator<Item = (usize, u64)> + '_ {
    (0..a.len()).map(move |k| {
        let next = a.get(k + 1).copied().unwrap_or(0);
        (k + 1, (a[k] - next) as u64)
    })
}

fn minor(beta: &HermitianMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QuadFieldElem {
    let m: Vec<Vec<QuadFieldElem>> = rows.map(|i| cols.clone().map(|j| beta.get(i, j).clone()).collect()).collect();
    det_quad(&m)
}

/// ∏_k det(β_{i,j})_{2≤i≤k+1, 1≤j≤k}^{a_k − a_{k+1}} for β of size r+1.
pub fn multiplier_klingen(beta: &HermitianMatrix, a: &[i64]) -> Result<QuadFieldElem, QexpError> {
    check_weight(a)?;
    let r = a.len();
    if beta.n() != r + 1 {
        return Err(QexpError::Size { got: beta.n(), expected: r + 1 });
    }
    let mut acc = QuadFieldElem::one(beta.disc());
    for (k, e) in exponents(a) {
        if e > 0 {
            acc = acc.mul(&minor(beta, 1..k + 1, 0..k).pow(e));
        }
    }
    Ok(acc)
}

/// ∏_k (k-th leading principal minor)^{a_k − a_{k+1}} for β of size r.
pub fn multiplier_lfun(beta: &HermitianMatrix, a: &[i64]) -> Result<QuadFieldElem, QexpError> {
    check_weight(a)?;
    let r = a.len();
    if beta.n() != r {
        return Err(QexpError::Size { got: beta.n(), expected: r });
    }
    let mut acc = QuadFieldElem::one(beta.disc());
    for (k, e) in exponents(a) {
        if e > 0 {
            acc = acc.mul(&minor(beta, 0..k, 0..k).pow(e));
        }
    }
    Ok(acc)
}

pub fn multiplier(beta: &HermitianMatrix, variant: Variant, a: &[i64]) -> Result<QuadFieldElem, QexpError> {
    match variant {
        Variant::Klingen => multiplier_klingen(beta, a),
        Variant::Lfun => multiplier_lfun(beta, a),
    }
}

/// Finite q-expansion Σ_β c(β) q^β, keyed by the canonical β encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub n: usize,
    pub disc: u64,
    pub weight_tag: WeightTuple,
    entries: BTreeMap<Vec<String>, (HermitianMatrix, CycNumber)>,
}

impl QExpansion {
    pub fn new(n: usize, disc: u64, weight_tag: WeightTuple) -> Self {
        QExpansion { n, disc, weight_tag, entries: BTreeMap::new() }
    }

    pub fn insert(&mut self, beta: HermitianMatrix, c: CycNumber) -> Result<(), QexpError> {
        if beta.n() != self.n {
            return Err(QexpError::Size { got: beta.n(), expected: self.n });
        }
        if beta.disc() != self.disc {
            return Err(QexpError::Disc { a: beta.disc(), b: self.disc });
        }
        if c.is_zero() {
            self.entries.remove(&beta.encode());
        } else {
            self.entries.insert(beta.encode(), (beta, c));
        }
        Ok(())
    }

    pub fn get(&self, beta: &HermitianMatrix) -> CycNumber {
        self.entries.get(&beta.encode()).map(|(_, c)| c.clone()).unwrap_or_else(|| CycNumber::zero(1))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HermitianMatrix, &CycNumber)> {
        self.entries.values().map(|(b, c)| (b, c))
    }

    pub fn to_json(&self, dual_scale: u64) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .iter()
            .map(|(b, c)| serde_json::json!({"beta": b.to_json(dual_scale), "coeff": c.to_json()}))
            .collect();
        serde_json::json!({"n": self.n, "disc": self.disc, "weight": self.weight_tag.a, "entries": list})
    }
}

/// Coefficientwise multiplication by the multiplier of the given weight.
pub fn apply_to_expansion(e: &QExpansion, variant: Variant, a: &[i64]) -> Result<QExpansion, QexpError> {
    let expected = variant.size(a.len());
    if e.n != expected {
        return Err(QexpError::Size { got: e.n, expected });
    }
    let mut tag = e.weight_tag.clone();
    tag.a = if tag.a.len() == a.len() { tag.a.iter().zip(a).map(|(x, y)| x + y).collect() } else { a.to_vec() };
    let mut out = QExpansion::new(e.n, e.disc, tag);
    for (beta, c) in e.iter() {
        let m = multiplier(beta, variant, a)?;
        out.insert(beta.clone(), c.mul(&m.to_cyclotomic()))?;
    }
    Ok(out)
}
