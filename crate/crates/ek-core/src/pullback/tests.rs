use super::*;
use crate::characters::{gauss_sum, DirichletChar, LocalChar};
use crate::interpolation::{ArithmeticPoint, CharFamilySpec};
use crate::padic::PadicEmbedding;
use std::sync::Arc;

fn q(x: i64) -> CycNumber {
    CycNumber::from_int(x)
}

fn omega_pair(emb: &PadicEmbedding, a: i64, b: i64, r1: CycNumber, r2: CycNumber, kappa: i64) -> SplitPCharPair {
    let t1 = LocalChar::with_root(5, DirichletChar::teichmuller_power(emb, a), r1).unwrap();
    let t2 = LocalChar::with_root(5, DirichletChar::teichmuller_power(emb, b), r2).unwrap();
    SplitPCharPair::new(t1, t2, kappa).unwrap()
}

#[test]
fn unramified_ratio_example() {
    let one = CycNumber::one(1);
    let v = klingen_ratio_unramified(&SatakeParams::trivial(1), (&one, &one), 2, 7, &int(1), Variant::Klingen).unwrap();
    // (1 − 2^{−2})^{−2} (1 − 2^{−4})
    assert_eq!(v.exact().unwrap().as_rational().unwrap(), rat(5, 3));
}

#[test]
fn unramified_ratio_against_rational_oracle() {
    let alphas = [rat(2, 3), rat(-5, 7)];
    let (tv, tvb) = (rat(3, 1), rat(-1, 2));
    let params = SatakeParams::new(alphas.iter().map(CycNumber::from_rational).collect()).unwrap();
    for (variant, shift, m) in [(Variant::Klingen, int(1), 3i64), (Variant::Lfun, rat(1, 2), 2)] {
        for s in [int(0), int(2), rat(3, 2), rat(-1, 2)] {
            let sigma = &s + &shift;
            let got = klingen_ratio_unramified(
                &params,
                (&CycNumber::from_rational(&tv), &CycNumber::from_rational(&tvb)),
                11,
                7,
                &s,
                variant,
            )
            .unwrap();
            if !sigma.is_integer() || !(&s * int(2)).is_integer() {
                assert!(got.exact().is_none());
                continue;
            }
            let qp = |e: &Rational| prime_pow(11, e.to_integer().try_into().unwrap());
            let mut expect = int(1);
            for a in &alphas {
                expect /= int(1) - &tv * a * qp(&-sigma.clone());
                expect /= int(1) - &tvb / a * qp(&-sigma.clone());
            }
            for i in 0..2 {
                expect *= int(1) - &tv * &tvb * qp(&-(&s * int(2) + int(m - i)));
            }
            assert_eq!(got.exact().unwrap().as_rational().unwrap(), expect, "{variant:?} s={s}");
        }
    }
}

#[test]
fn unramified_ratio_errors_and_symmetry() {
    let one = CycNumber::one(1);
    let four = SatakeParams::new(vec![q(4)]).unwrap();
    assert!(matches!(
        klingen_ratio_unramified(&four, (&one, &one), 2, 7, &int(1), Variant::Klingen),
        Err(PullbackError::NumeratorPole { q: 2 })
    ));
    assert!(matches!(
        klingen_ratio_unramified(&SatakeParams::trivial(1), (&q(16), &one), 2, 7, &int(1), Variant::Klingen),
        Err(PullbackError::DenominatorPole { q: 2 })
    ));
    assert!(matches!(
        klingen_ratio_unramified(&SatakeParams::trivial(1), (&one, &one), 3, 7, &int(1), Variant::Klingen),
        Err(PullbackError::NotSplit { q: 3 })
    ));
    let z = CycNumber::zeta(3, 1);
    let a = SatakeParams::new(vec![z.clone(), q(3), CycNumber::zeta(4, 1)]).unwrap();
    let b = SatakeParams::new(vec![CycNumber::zeta(4, 1), z, q(3)]).unwrap();
    let t = (CycNumber::zeta(5, 2), CycNumber::from_int(-1));
    let va = klingen_ratio_unramified(&a, (&t.0, &t.1), 11, 7, &int(2), Variant::Klingen).unwrap();
    let vb = klingen_ratio_unramified(&b, (&t.0, &t.1), 11, 7, &int(2), Variant::Klingen).unwrap();
    assert_eq!(va, vb);
    assert!(a.pairwise_distinct());
    assert!(!SatakeParams::trivial(2).pairwise_distinct());
}

#[test]
fn aux_scalar_examples() {
    let t = CycNumber::zeta(3, 1);
    let v = aux_ell_scalar(1, 7, &t, &rat(5, 2), 1, &rat(3, 4), Variant::Klingen).unwrap();
    assert_eq!(v.materialize().unwrap().as_rational().unwrap(), rat(3, 4));
    let w = aux_ell_scalar(49, 7, &t, &int(0), 1, &int(1), Variant::Klingen).unwrap();
    assert_eq!(w.exp, int(4));
    assert_eq!(w.unit, t.pow(2).unwrap());
    let l = aux_ell_scalar(49, 7, &t, &int(0), 1, &int(1), Variant::Lfun).unwrap();
    // the two variants differ by ℓ^{2·ord·(1/2)}
    assert_eq!(&w.exp - &l.exp, int(2));
    let u = aux_ell_scalar(7 * 3, 7, &t, &int(1), 2, &int(1), Variant::Lfun).unwrap();
    assert_eq!(u.exp, int(4));
}

#[test]
fn p_constants() {
    let emb = PadicEmbedding::new(5, 20, 6, 0).unwrap();
    let pair = omega_pair(&emb, 1, 1, CycNumber::one(1), CycNumber::one(1), 4);
    let params = SatakeParams::trivial(1);
    let k = p_constant_klingen(&params, &pair, 4, 1).unwrap();
    assert_eq!(k.exp, int(4));
    // 𝔤(ω^{−1}) · 𝔤(ω^{−2})^{−1}
    let g1 = gauss_sum(&DirichletChar::teichmuller_power(&emb, -1)).unwrap();
    let g2 = gauss_sum(&DirichletChar::teichmuller_power(&emb, -2)).unwrap();
    assert_eq!(k.unit, g1.div(&g2).unwrap());
    let l = p_constant_lfun(&params, &pair, 4, 1).unwrap();
    assert_eq!(l.exp, int(1));
    assert!(p_constant_klingen(&SatakeParams { r: 0, alphas: vec![] }, &pair, 4, 0).is_err());
    let bad = omega_pair(&emb, 1, 3, CycNumber::one(1), CycNumber::one(1), 4);
    assert!(p_constant_lfun(&params, &bad, 4, 1).is_err());
}

#[test]
fn unramified_twist_invariance() {
    let emb = PadicEmbedding::new(5, 60, 6, 0).unwrap();
    let pair = omega_pair(&emb, 1, 2, CycNumber::zeta(3, 1), CycNumber::zeta(4, 1), 6);
    let chis = vec![CycNumber::zeta(3, 2), CycNumber::from_int(-1)];
    let eta = CycNumber::zeta(4, 1);
    let twisted: Vec<CycNumber> = chis.iter().map(|c| c.mul(&eta)).collect();
    let a = p_constant_klingen(&SatakeParams::new(chis).unwrap(), &pair, 6, 2).unwrap();
    let b = p_constant_klingen(&SatakeParams::new(twisted).unwrap(), &pair, 6, 2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn quotient_identity_over_a_grid() {
    let emb = PadicEmbedding::new(5, 60, 6, 0).unwrap();
    let roots = [CycNumber::one(1), CycNumber::zeta(3, 1), CycNumber::from_int(-1)];
    for (a, b) in [(1i64, 1i64), (1, 2), (2, 1), (3, 3), (2, 3)] {
        for (ri, r1) in roots.iter().enumerate() {
            let r2 = &roots[(ri + 1) % roots.len()];
            for r in 1..=3usize {
                for kappa in (r as i64 + 2)..=(r as i64 + 8) {
                    let pair = omega_pair(&emb, a, b, r1.clone(), r2.clone(), kappa);
                    if pair.check_pullback_conductors().is_err() {
                        continue;
                    }
                    let chis: Vec<CycNumber> = (0..r).map(|i| CycNumber::zeta(12, i as i64 + 1)).collect();
                    let params = SatakeParams::new(chis).unwrap();
                    let k = p_constant_klingen(&params, &pair, kappa, r).unwrap();
                    let l = p_constant_lfun(&params, &pair, kappa, r).unwrap();
                    let ratio = k.div(&l).unwrap();
                    // τ′(p)^{−1} = (r1 r2)^{−1}; τ̄′ = ω^{−(a+b)}
                    let tp_bar = DirichletChar::teichmuller_power(&emb, -(a + b));
                    let g = gauss_sum(&tp_bar).unwrap();
                    let unit = r1.mul(r2).inverse().unwrap().div(&g).unwrap();
                    assert_eq!(ratio.unit, unit);
                    assert_eq!(ratio.exp, int(kappa - r as i64));
                    // slopes r/2 and r/2 + 1 in κ
                    let l1 = p_constant_lfun(&params, &pair, kappa + 1, r).unwrap();
                    let k1 = p_constant_klingen(&params, &pair, kappa + 1, r).unwrap();
                    assert_eq!(&l1.exp - &l.exp, rat(r as i64, 2));
                    assert_eq!(&k1.exp - &k.exp, rat(r as i64 + 2, 2));
                }
            }
        }
    }
}

#[test]
fn interpolation_factor_delegates() {
    let emb = Arc::new(PadicEmbedding::new(5, 20, 6, 0).unwrap());
    let tau0 = omega_pair(&emb, 2, 1, CycNumber::one(1), CycNumber::one(1), 0);
    let fam = CharFamilySpec::from_tau0(tau0, 1, vec![0], emb.clone()).unwrap();
    let params = SatakeParams::trivial(1);
    let pt = ArithmeticPoint::pb(6, 0);
    let spec = crate::interpolation::specialize(&pt, &fam).unwrap();
    let f = interpolation_p_factor(&pt, &fam, &params).unwrap();
    assert_eq!(f, p_constant_lfun(&params, &spec.pair, 6, 1).unwrap());
    let f8 = interpolation_p_factor(&ArithmeticPoint::pb(10, 0), &fam, &params).unwrap();
    assert_eq!(&f8.exp - &f.exp, int(2));
}
