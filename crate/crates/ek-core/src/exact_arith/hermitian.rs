use std::fmt;

use num_traits::{Signed, Zero};

use super::nt::is_squarefree;
use super::quad::QuadFieldElem;
use super::rational::{int, rational_to_string, Rational};
use super::ArithError;

/// Hermitian n×n matrix over K = Q(√−D), row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HermitianMatrix {
    n: usize,
    disc: u64,
    entries: Vec<QuadFieldElem>,
}

impl HermitianMatrix {
    pub fn new(n: usize, disc: u64, entries: Vec<QuadFieldElem>) -> Result<Self, ArithError> {
        if entries.len() != n * n {
            return Err(ArithError::Shape { expected: n, got: entries.len() });
        }
        if entries.iter().any(|e| e.disc != disc) {
            return Err(ArithError::DiscMismatch);
        }
        for i in 0..n {
            for j in i..n {
                if entries[j * n + i] != entries[i * n + j].conj() {
                    return Err(ArithError::NotHermitian { row: i, col: j });
                }
            }
        }
        Ok(HermitianMatrix { n, disc, entries })
    }

    /// Diagonal from rationals and the strict upper triangle row by row.
    pub fn from_upper(
        disc: u64,
        diag: &[Rational],
        upper: &[QuadFieldElem],
    ) -> Result<Self, ArithError> {
        let n = diag.len();
        if upper.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(ArithError::Shape { expected: n, got: upper.len() });
        }
        let mut e = vec![QuadFieldElem::zero(disc); n * n];
        let mut k = 0;
        for i in 0..n {
            e[i * n + i] = QuadFieldElem::from_rational(diag[i].clone(), disc);
            for j in (i + 1)..n {
                e[i * n + j] = upper[k].clone();
                e[j * n + i] = upper[k].conj();
                k += 1;
            }
        }
        Self::new(n, disc, e)
    }

    pub fn identity(n: usize, disc: u64) -> Self {
        Self::diagonal(disc, &vec![int(1); n])
    }

    pub fn zero(n: usize, disc: u64) -> Self {
        Self::diagonal(disc, &vec![int(0); n])
    }

    pub fn diagonal(disc: u64, diag: &[Rational]) -> Self {
        Self::from_upper(disc, diag, &vec![QuadFieldElem::zero(disc); diag.len() * diag.len().saturating_sub(1) / 2])
            .expect("diagonal matrix is Hermitian")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn disc(&self) -> u64 {
        self.disc
    }

    /// Entry (i, j), zero-based.
    pub fn get(&self, i: usize, j: usize) -> &QuadFieldElem {
        &self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<QuadFieldElem>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn diag(&self, i: usize) -> Rational {
        self.get(i, i).a.clone()
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.diag(i)).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(self.get(j, i).conj());
            }
        }
        HermitianMatrix { n, disc: self.disc, entries: e }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        HermitianMatrix {
            n: self.n,
            disc: self.disc,
            entries: self.entries.iter().map(|e| e.scale(q)).collect(),
        }
    }

    pub fn det(&self) -> Rational {
        let d = det_quad(&self.rows());
        debug_assert!(d.is_rational());
        d.a
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Principal submatrix on the given index set.
    pub fn principal(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut e = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                e.push(self.get(i, j).clone());
            }
        }
        HermitianMatrix { n: k, disc: self.disc, entries: e }
    }

    /// All principal minors are ≥ 0.
    pub fn is_positive_semidefinite(&self) -> bool {
        let n = self.n;
        (1u32..(1 << n)).all(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            !self.principal(&idx).det().is_negative()
        })
    }

    /// Canonical text encoding of the upper triangle, row by row.
    pub fn encode(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i..self.n {
                let e = self.get(i, j);
                if i == j {
                    out.push(rational_to_string(&e.a));
                } else {
                    out.push(e.to_string_canonical());
                }
            }
        }
        out
    }

    pub fn to_json(&self, dual_scale: u64) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "D": self.disc,
            "dual_scale": dual_scale,
            "upper": self.encode(),
        })
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

/// Determinant of a square matrix over K by elimination.
pub fn det_quad(rows: &[Vec<QuadFieldElem>]) -> QuadFieldElem {
    let n = rows.len();
    if n == 0 {
        return QuadFieldElem::one(1);
    }
    let disc = rows[0][0].disc;
    let mut m = rows.to_vec();
    let mut det = QuadFieldElem::one(disc);
    for c in 0..n {
        let Some(pr) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return QuadFieldElem::zero(disc);
        };
        if pr != c {
            m.swap(pr, c);
            det = det.neg();
        }
        let piv = m[c][c].clone();
        det = det.mul(&piv);
        let inv = piv.inverse().expect("nonzero pivot");
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c].mul(&inv);
            for k in c..n {
                let t = f.mul(&m[c][k]);
                m[r][k] = m[r][k].sub(&t);
            }
        }
    }
    det
}

/// det of the upper-left k×k block for k = 1..n.
pub fn leading_minors(m: &HermitianMatrix) -> Vec<Rational> {
    (1..=m.n)
        .map(|k| m.principal(&(0..k).collect::<Vec<_>>()).det())
        .collect()
}

pub fn is_positive_definite(m: &HermitianMatrix) -> bool {
    leading_minors(m).iter().all(|d| d.is_positive())
}

/// Every positive-semidefinite Hermitian matrix with nonnegative integer
/// diagonal of total ≤ trace_bound and off-diagonal entries in
/// (1/dual_scale)·O_K, in a fixed order.
pub fn enumerate_hermitian(
    n: usize,
    disc: u64,
    trace_bound: u64,
    dual_scale: u64,
    cap: usize,
) -> Result<Vec<HermitianMatrix>, ArithError> {
    if !is_squarefree(disc) {
        return Err(ArithError::BadDiscriminant(disc));
    }
    let mut out = Vec::new();
    let mut diag = vec![0u64; n];
    enumerate_diagonals(n, trace_bound, 0, &mut diag, &mut |d| {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let choices: Vec<Vec<QuadFieldElem>> = pairs
            .iter()
            .map(|&(i, j)| off_diagonal_candidates(disc, dual_scale, d[i] * d[j]))
            .collect();
        let diag_q: Vec<Rational> = d.iter().map(|&x| int(x as i64)).collect();
        let mut pick = vec![0usize; pairs.len()];
        loop {
            let upper: Vec<QuadFieldElem> =
                pick.iter().zip(&choices).map(|(&k, c)| c[k].clone()).collect();
            let m = HermitianMatrix::from_upper(disc, &diag_q, &upper).expect("well-formed");
            if m.is_positive_semidefinite() {
                if out.len() >= cap {
                    return Err(ArithError::ResourceBound { cap });
                }
                out.push(m);
            }
            // odometer
            let mut pos = 0;
            loop {
                if pos == pick.len() {
                    return Ok(());
                }
                pick[pos] += 1;
                if pick[pos] < choices[pos].len() {
                    break;
                }
                pick[pos] = 0;
                pos += 1;
            }
        }
    })?;
    Ok(out)
}

fn enumerate_diagonals(
    n: usize,
    remaining: u64,
    i: usize,
    diag: &mut Vec<u64>,
    f: &mut dyn FnMut(&[u64]) -> Result<(), ArithError>,
) -> Result<(), ArithError> {
    if i == n {
        return f(diag);
    }
    for v in 0..=remaining {
        diag[i] = v;
        enumerate_diagonals(n, remaining - v, i + 1, diag, f)?;
    }
    diag[i] = 0;
    Ok(())
}

/// Elements (x + yω)/s with norm ≤ bound, ordered by (y, x).
fn off_diagonal_candidates(disc: u64, s: u64, bound: u64) -> Vec<QuadFieldElem> {
    let scaled = (bound as i128) * (s as i128) * (s as i128);
    let ymax = ((4 * scaled) as f64 / disc as f64).sqrt() as i64 + 1;
    let xmax = (scaled as f64).sqrt() as i64 + ymax + 1;
    let inv_s = Rational::new(1.into(), (s as i64).into());
    let mut out = Vec::new();
    for y in -ymax..=ymax {
        for x in -xmax..=xmax {
            let e = QuadFieldElem::from_basis(x, y, disc);
            let nrm = e.norm();
            if nrm <= Rational::from_integer(scaled.into()) {
                out.push(e.scale(&inv_s));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rational::rat;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> QuadFieldElem {
        QuadFieldElem::new(int(a), int(b), 1)
    }

    #[test]
    fn minors_of_example() {
        let m = HermitianMatrix::from_upper(1, &[int(2), int(3)], &[q(1, 1)]).unwrap();
        assert_eq!(leading_minors(&m), vec![int(2), int(4)]);
        assert!(is_positive_definite(&m));
        assert_eq!(leading_minors(&HermitianMatrix::identity(2, 1)), vec![int(1), int(1)]);
        assert!(!is_positive_definite(&HermitianMatrix::diagonal(1, &[int(1), int(-1)])));
        let z = HermitianMatrix::from_upper(1, &[int(0), int(3)], &[q(0, 0)]).unwrap();
        assert_eq!(leading_minors(&z)[0], int(0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let e = vec![q(1, 0), q(1, 1), q(1, 1), q(2, 0)];
        assert!(matches!(HermitianMatrix::new(2, 1, e), Err(ArithError::NotHermitian { .. })));
    }

    #[test]
    fn small_enumerations() {
        let one = enumerate_hermitian(1, 1, 2, 1, 100).unwrap();
        assert_eq!(one.len(), 3);
        let two = enumerate_hermitian(2, 1, 1, 1, 100).unwrap();
        assert_eq!(two.len(), 3);
        let t2 = enumerate_hermitian(2, 1, 2, 1, 1000).unwrap();
        let ones: Vec<_> = t2
            .iter()
            .filter(|m| m.diag(0) == int(1) && m.diag(1) == int(1))
            .map(|m| m.get(0, 1).clone())
            .collect();
        let mut want = vec![q(0, 0), q(1, 0), q(-1, 0), q(0, 1), q(0, -1)];
        let key = |e: &QuadFieldElem| (e.a.clone(), e.b.clone());
        want.sort_by_key(key);
        let mut got = ones.clone();
        got.sort_by_key(key);
        assert_eq!(got, want);
        assert!(matches!(
            enumerate_hermitian(2, 1, 3, 1, 5),
            Err(ArithError::ResourceBound { cap: 5 })
        ));
    }

    /// Exhaustive box filter used as the independent oracle.
    fn brute(disc: u64, t: u64, s: u64) -> Vec<HermitianMatrix> {
        let mut out = Vec::new();
        let r = (2 * t * s) as i64 + 2;
        for d0 in 0..=t {
            for d1 in 0..=(t - d0) {
                for x in -r..=r {
                    for y in -r..=r {
                        let b = QuadFieldElem::from_basis(x, y, disc).scale(&rat(1, s as i64));
                        let m = HermitianMatrix::from_upper(
                            disc,
                            &[int(d0 as i64), int(d1 as i64)],
                            &[b],
                        )
                        .unwrap();
                        let ok = m.diag(0) >= int(0)
                            && m.diag(1) >= int(0)
                            && m.det() >= int(0);
                        if ok {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_box_filter() {
        for disc in [1u64, 2, 3, 7] {
            for s in [1u64, 2] {
                for t in 0..=3 {
                    let mut a = enumerate_hermitian(2, disc, t, s, 100_000).unwrap();
                    let mut b = brute(disc, t, s);
                    let key = |m: &HermitianMatrix| m.encode();
                    a.sort_by_key(key);
                    b.sort_by_key(key);
                    assert_eq!(a.len(), b.len(), "D={disc} s={s} t={t}");
                    assert_eq!(a, b);
                }
            }
        }
    }

    fn arb_herm(n: usize, disc: u64) -> impl Strategy<Value = HermitianMatrix> {
        let m = n * (n - 1) / 2;
        (
            proptest::collection::vec(-5i64..6, n),
            proptest::collection::vec((-5i64..6, -5i64..6, 1i64..4), m),
        )
            .prop_map(move |(d, u)| {
                let diag: Vec<Rational> = d.into_iter().map(int).collect();
                let up: Vec<QuadFieldElem> = u
                    .into_iter()
                    .map(|(a, b, c)| QuadFieldElem::new(rat(a, c), rat(b, c), disc))
                    .collect();
                HermitianMatrix::from_upper(disc, &diag, &up).unwrap()
            })
    }

    proptest! {
        #[test]
        fn det_is_last_minor(m in arb_herm(3, 5)) {
            let lm = leading_minors(&m);
            prop_assert_eq!(lm.last().unwrap().clone(), m.det());
            prop_assert!(det_quad(&m.rows()).is_rational());
            prop_assert_eq!(m.conj_transpose(), m.clone());
        }

        #[test]
        fn definite_implies_semidefinite(m in arb_herm(3, 3)) {
            if is_positive_definite(&m) {
                prop_assert!(m.is_positive_semidefinite());
            }
        }
    }
}
