use super::*;
use crate::bernoulli_kl::gen_bernoulli;
use crate::exact_arith::enumerate_hermitian;
use crate::siegel_fourier::ChangeOfBasis;

fn family() -> CharFamilySpec {
    let emb = Arc::new(PadicEmbedding::new(5, 140, 8, 0).unwrap());
    let t1 = LocalChar::with_root(5, DirichletChar::teichmuller_power(&emb, 2), CycNumber::one(1)).unwrap();
    let t2 = LocalChar::with_root(5, DirichletChar::teichmuller_power(&emb, 1), CycNumber::one(1)).unwrap();
    CharFamilySpec::from_tau0(SplitPCharPair::new(t1, t2, 0).unwrap(), 1, vec![1], emb).unwrap()
}

fn template() -> DatumTemplate {
    DatumTemplate {
        variant: Variant::Klingen,
        disc: 1,
        sigma: BTreeSet::new(),
        aux: AuxData { ell: 7, y_norm: 7, vol_y: int(1), change: ChangeOfBasis::identity() },
    }
}

fn x_point(kappa: i64, m: u64, z2: PRoot) -> ArithmeticPoint {
    ArithmeticPoint { kappa, m, zeta1: PRoot::one(), zeta2: z2, kind: PointKind::X }
}

#[test]
fn roots_of_unity() {
    let z = PRoot::new(5, 2, 10);
    assert_eq!(z, PRoot { j: 1, a: 2 });
    assert!(PRoot::new(5, 1, 5).is_one());
    assert_eq!(z.to_cyc(5), CycNumber::zeta(5, 2));
    assert_eq!(z.pow(5, 3), PRoot { j: 1, a: 1 });
}

#[test]
fn wild_character_values() {
    let z = PRoot::new(5, 1, 1);
    let eta = wild_char(5, z).unwrap();
    assert_eq!(eta.conductor(), 25);
    assert_eq!(eta.value(6), CycNumber::zeta(5, 1));
    // trivial on the Teichmüller lifts μ_4 ⊂ (Z/25)^×
    for a in [1i64, 7, 18, 24] {
        assert!(eta.value(a).is_one(), "{a}");
    }
    assert_eq!(wild_char(5, PRoot::one()).unwrap().conductor(), 1);
}

#[test]
fn specialization_examples() {
    let fam = family();
    let s = specialize(&ArithmeticPoint::pb(6, 0), &fam).unwrap();
    assert!(s.psi_zeta.is_one() && s.psi_ratio.is_one());
    assert_eq!(s.pair.tau1, fam.tau0.tau1);
    // τ_2 = ω · ω^{−6} = ω^3
    assert_eq!(s.pair.tau2.unit_char(), &DirichletChar::teichmuller_power(&fam.emb, 3));
    assert_eq!(s.weight, vec![1]);
    assert_eq!(s.xi_pair.tau1, s.pair.tau2.conj());
    assert_eq!(specialize(&ArithmeticPoint::pb(6, 0), &fam).unwrap(), s);

    let z1 = ArithmeticPoint { kappa: 6, m: 0, zeta1: PRoot::new(5, 1, 1), zeta2: PRoot::one(), kind: PointKind::X };
    let s1 = specialize(&z1, &fam).unwrap();
    let eta = s1.pair.tau2.unit_char().mul(&s.pair.tau2.unit_char().conj()).primitive();
    assert_eq!(eta, wild_char(5, PRoot::new(5, 1, 1)).unwrap());
    assert_eq!(s1.pair.tau2.conductor_exponent(), 2);
    let bad = ArithmeticPoint { kind: PointKind::Xpb, ..z1.clone() };
    assert!(specialize(&bad, &fam).is_err());
    // κ = 5: τ_2 = ω^{−4} is trivial
    assert!(matches!(specialize(&ArithmeticPoint::pb(5, 0), &fam), Err(InterpError::Conductor(_))));
    assert!(specialize(&ArithmeticPoint::pb(2, 0), &fam).is_err());
    let z2 = specialize(&x_point(6, 0, PRoot::new(5, 1, 2)), &fam).unwrap();
    assert_eq!(z2.psi_ratio, PRoot::new(5, 1, 4));
}

#[test]
fn specialization_is_injective() {
    let fam = family();
    let mut seen: Vec<Specialization> = Vec::new();
    for kappa in 3..10 {
        for m in 0..3u64 {
            for j1 in 0..2u32 {
                for a2 in 0..3u64 {
                    let pt = ArithmeticPoint {
                        kappa,
                        m,
                        zeta1: PRoot::new(5, j1, 1),
                        zeta2: PRoot::new(5, 1, a2),
                        kind: PointKind::X,
                    };
                    let s = specialize(&pt, &fam).unwrap();
                    assert!(!seen.contains(&s), "{}", pt.label());
                    seen.push(s);
                }
            }
        }
    }
}

#[test]
fn xi_and_tau_are_linked() {
    let fam = family();
    assert_eq!(fam.xi0.tau1, fam.tau0.tau2.conj());
    let again = CharFamilySpec::from_xi0(fam.xi0.clone(), 1, vec![1], fam.emb.clone()).unwrap();
    assert_eq!(again.tau0, fam.tau0);
    assert!(CharFamilySpec::from_tau0(fam.tau0.clone(), 2, vec![1], fam.emb.clone()).is_err());
}

fn betas(bound: u64) -> Vec<HermitianMatrix> {
    enumerate_hermitian(2, 1, bound, 1, 100000).unwrap()
}

#[test]
fn family_congruences_mod_p() {
    let fam = family();
    let pts = vec![
        x_point(6, 0, PRoot::one()),
        x_point(6, 0, PRoot::new(5, 1, 1)),
        x_point(6, 4, PRoot::one()),
        x_point(6, 4, PRoot::new(5, 1, 1)),
    ];
    let bs = betas(3);
    let table = coefficient_family(&fam, &pts, &bs, &template(), Some(&SatakeParams::trivial(1)));
    let mut supported = 0;
    for row in &table.cells {
        for c in row {
            if c.is_ok() {
                supported += 1;
            }
        }
    }
    assert!(supported > 4 * 3, "{supported}");
    let pairs: Vec<(usize, usize, i64)> = (0..4).flat_map(|a| ((a + 1)..4).map(move |b| (a, b, 1))).collect();
    let rep = check_congruences(&table, &pairs).unwrap();
    assert!(rep.all_pass(), "{}", rep.to_json(&table, 1));
    // ζ_2 does not enter the coefficients
    for j in 0..bs.len() {
        if let (Ok(x), Ok(y)) = (&table.cells[0][j], &table.cells[1][j]) {
            assert_eq!(x.value, y.value);
        }
    }
    // m = 4 raises the weight to 5: the cell is c·β_21^5
    for j in 0..bs.len() {
        if let (Ok(x), Ok(y)) = (&table.cells[0][j], &table.cells[2][j]) {
            if !x.placeholder {
                let b21 = bs[j].get(1, 0).to_cyclotomic();
                assert_eq!(y.value.mul(&b21), x.value.mul(&b21.pow(5).unwrap()));
            }
        }
    }
}

#[test]
fn identical_points_agree_to_full_precision() {
    let fam = family();
    let pts = vec![x_point(6, 0, PRoot::one()), x_point(6, 0, PRoot::one())];
    let table = coefficient_family(&fam, &pts, &betas(2), &template(), None);
    for k in 1..=8 {
        let rep = check_congruences(&table, &[(0, 1, k)]).unwrap();
        assert!(rep.all_pass());
        assert!(rep.entries.iter().all(|e| e.diff_valuation.is_none()));
    }
    let rep = check_congruences(&table, &[(0, 1, 1), (1, 0, 1)]).unwrap();
    assert_eq!(rep.entries.len(), 2 * table.betas.len());
}

#[test]
fn weight_direction_polarity_on_constant_terms() {
    let fam = family();
    let zero = vec![HermitianMatrix::zero(2, 1)];
    let pts = vec![ArithmeticPoint::pb(6, 0), ArithmeticPoint::pb(10, 0), ArithmeticPoint::pb(8, 0)];
    let table = coefficient_family(&fam, &pts, &zero, &template(), None);
    for row in &table.cells {
        assert!(row[0].as_ref().unwrap().placeholder);
    }
    // oracle: k = κ − 1 ∈ {5, 9, 7} with χ_0 = ω^2 fixed
    let chi0 = kl_character(&fam);
    assert_eq!(chi0, DirichletChar::teichmuller_power(&fam.emb, 2));
    // (−B_{k,ψ}/k)(1 − ψ(7)7^{k−1}); ψ(5) = 0
    let val = |psi: &DirichletChar, k: usize| {
        let b = gen_bernoulli(psi, k).unwrap().scale(&rat(-1, k as i64));
        let e7 = CycNumber::one(1).sub(&psi.value(7).scale(&crate::exact_arith::rational::prime_pow(7, k as i64 - 1)));
        fam.emb.embed(&b.mul(&e7)).unwrap()
    };
    let on_branch = |k: usize| val(&crate::bernoulli_kl::kl_twist(&chi0, k, &fam.emb), k);
    let cong = |x: &QqElem, y: &QqElem| {
        let c = x.valuation().unwrap().min(y.valuation().unwrap());
        x.sub(y).valuation().map(|v| v - c >= 1).unwrap_or(true)
    };
    let (v5, v7, v9) = (on_branch(5), on_branch(7), on_branch(9));
    // along the family the twist ψ = χ_0ω^{−k} moves with k, so every
    // κ-difference is congruent
    assert!(cong(&v5, &v9) && cong(&v5, &v7));
    for (b, expect) in [(1, &v9), (2, &v7)] {
        let rep = check_congruences(&table, &[(0, b, 1)]).unwrap();
        assert!(rep.all_pass());
        let cell = table.cells[b][0].as_ref().unwrap();
        assert_eq!(&cell.embedded, expect);
    }
    // for a fixed twist ψ = ω the congruence needs k ≡ k′ mod p − 1
    let psi = DirichletChar::teichmuller_power(&fam.emb, 1);
    let w5 = val(&psi, 5);
    assert!(cong(&w5, &val(&psi, 9)));
    assert!(!cong(&w5, &val(&psi, 7)));
}

#[test]
fn rejected_points_do_not_stop_the_family() {
    let fam = family();
    let pts = vec![ArithmeticPoint::pb(6, 0), ArithmeticPoint::pb(5, 0)];
    let bs = betas(2);
    let table = coefficient_family(&fam, &pts, &bs, &template(), None);
    assert!(table.specializations[1].is_err());
    assert!(table.cells[1].iter().all(|c| c.is_err()));
    assert!(table.cells[0].iter().any(|c| c.is_ok()));
    let rep = check_congruences(&table, &[(0, 1, 1)]).unwrap();
    assert!(rep.entries.iter().all(|e| matches!(e.status, CongruenceStatus::Skipped(_))));
}

#[test]
fn divisibility_report() {
    let fam = family();
    let rep = constant_term_divisibility(&ArithmeticPoint::pb(6, 0), &fam, &SatakeParams::trivial(1), &template()).unwrap();
    assert_eq!(rep.status, DivisibilityStatus::OutsideProvenRange);
    assert!(rep.passed);
    let b = rep.bound.clone().unwrap();
    assert_eq!(b, rep.kl_valuation.clone().unwrap() + rep.p_factor_valuation.clone().unwrap());
    assert!(!rep.symbolic.is_empty());
}
