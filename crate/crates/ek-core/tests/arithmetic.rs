use ek_core::exact_arith::rational::{int, rat};
use ek_core::exact_arith::{enumerate_hermitian, CycNumber, HermitianMatrix, QuadFieldElem};
use ek_core::padic::{PadicElem, PadicEmbedding};
use proptest::prelude::*;

fn cyc(level: u64, coeffs: &[i64]) -> CycNumber {
    let q: Vec<_> = coeffs.iter().map(|&c| int(c)).collect();
    CycNumber::from_power_coeffs(level, &q)
}

/// Count of 2×2 PSD Hermitian matrices with diagonal sum ≤ t and entries in
/// O_K for D = 1 or 2, where O_K = Z[√−D].
fn brute_count_2x2(disc: i64, t: i64) -> usize {
    let mut n = 0;
    for d1 in 0..=t {
        for d2 in 0..=(t - d1) {
            let bound = d1 * d2;
            for a in -bound..=bound {
                for b in -bound..=bound {
                    if a * a + disc * b * b <= bound {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

#[test]
fn enumeration_matches_brute_force() {
    for disc in [1u64, 2] {
        for t in 0..=4 {
            let got = enumerate_hermitian(2, disc, t, 1, 1_000_000).unwrap().len();
            assert_eq!(got, brute_count_2x2(disc as i64, t as i64), "D={disc} t={t}");
        }
    }
    assert!(enumerate_hermitian(2, 1, 4, 1, 10).is_err());
    assert!(enumerate_hermitian(2, 4, 2, 1, 100).is_err());
}

#[test]
fn hermitian_determinants() {
    let x = QuadFieldElem::new(int(1), int(1), 1);
    let m = HermitianMatrix::from_upper(1, &[int(3), int(2)], &[x]).unwrap();
    // 3·2 − |1 + i|² = 4
    assert_eq!(m.det(), int(4));
    assert_eq!(HermitianMatrix::identity(3, 7).det(), int(1));
}

#[test]
fn rationals_embed_with_their_valuation() {
    let emb = PadicEmbedding::new(5, 4, 10, 0).unwrap();
    for (n, d, v) in [(25i64, 3i64, 2i64), (1, 125, -3), (-7, 2, 0)] {
        let q = emb.embed_qp(&CycNumber::from_rational(&rat(n, d))).unwrap();
        assert_eq!(q.valuation(), Some(v));
        assert_eq!(q, PadicElem::from_rational(&rat(n, d), 5, 10));
    }
}

proptest! {
    #[test]
    fn cyclotomic_field_laws(
        a in proptest::collection::vec(-5i64..6, 12),
        b in proptest::collection::vec(-5i64..6, 12),
        c in proptest::collection::vec(-5i64..6, 12),
    ) {
        let (x, y, z) = (cyc(12, &a), cyc(12, &b), cyc(12, &c));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inverse().unwrap()).is_one());
        }
        // complex conjugation is multiplicative
        prop_assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
    }

    #[test]
    fn levels_lift_transparently(a in proptest::collection::vec(-5i64..6, 4), k in 0i64..3) {
        let x = cyc(4, &a);
        let z3 = CycNumber::zeta(3, k);
        let prod = x.mul(&z3);
        prop_assert_eq!(prod.div(&z3).unwrap(), x);
    }

    #[test]
    fn embedding_is_a_ring_map(
        a in proptest::collection::vec(-9i64..10, 12),
        b in proptest::collection::vec(-9i64..10, 12),
    ) {
        let emb = PadicEmbedding::new(5, 12, 12, 0).unwrap();
        let (x, y) = (cyc(12, &a), cyc(12, &b));
        let (ex, ey) = (emb.embed(&x).unwrap(), emb.embed(&y).unwrap());
        let prec = 10;
        let close = |u: &ek_core::padic::QqElem, v: &ek_core::padic::QqElem| {
            u.sub(v).valuation().is_none_or(|w| w >= prec)
        };
        prop_assert!(close(&emb.embed(&x.mul(&y)).unwrap(), &ex.mul(&ey)));
        prop_assert!(close(&emb.embed(&x.add(&y)).unwrap(), &ex.add(&ey)));
    }
}
