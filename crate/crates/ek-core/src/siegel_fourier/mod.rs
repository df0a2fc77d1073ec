//! Local Fourier coefficients of the Siegel sections on U(n,n) and the
//! assembly of normalized global q-expansion coefficients.
//!
//! Every local value is an exact `unit · base^exponent`; the global value is
//! materialized only when all exponents are integral.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::characters::{chi_k, euler_factor_at, gauss_sum, CharError, EulerValue, LocalChar, SplitPCharPair};
use crate::exact_arith::hermitian::det_quad;
use crate::exact_arith::nt::{factor, inv_mod, is_prime, lcm, split_p_part};
use crate::exact_arith::rational::{factorial, int, is_integer, is_p_integral, prime_pow, rat, rational_to_string, val_rational};
use crate::exact_arith::{ArithError, CycNumber, HermitianMatrix, QuadFieldElem, Rational, ScaledUnit};
use crate::padic::{PadicElem, PadicEmbedding, PadicError, QqElem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SiegelError {
    #[error("invalid Siegel datum: {0}")]
    Datum(String),
    #[error("beta is not {q}-primitive and {q} is outside Sigma; the Shimura polynomial for non-primitive beta is not implemented")]
    NonPrimitive { q: u64 },
    #[error("det beta = 0 is outside the local formula")]
    Singular,
    #[error("beta has size {got}, expected {n}")]
    Size { got: usize, n: usize },
    #[error("beta is not positive semidefinite")]
    NotSemidefinite,
    #[error("{0} ramifies in K")]
    RamifiedAux(u64),
    #[error("weight kappa = {kappa} is smaller than n = {n}")]
    WeightTooSmall { kappa: i64, n: usize },
    #[error("integer too large for this computation: {0}")]
    Overflow(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// n = r+1 (Klingen pullback) or n = r (L-function pullback).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Klingen,
    Lfun,
}

impl Variant {
    pub fn size(self, r: usize) -> usize {
        match self {
            Variant::Klingen => r + 1,
            Variant::Lfun => r,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Klingen => "klingen",
            Variant::Lfun => "lfun",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "klingen" => Some(Variant::Klingen),
            "lfun" => Some(Variant::Lfun),
            _ => None,
        }
    }
}

/// diag(A, ᵗĀ^{−1}) at the auxiliary prime, recorded by ord_ℓ(det A·det Ā)
/// and the value τ(det A).
#[derive(Clone, Debug, PartialEq)]
pub struct ChangeOfBasis {
    pub ord_norm: i64,
    pub tau_det_a: CycNumber,
}

impl ChangeOfBasis {
    pub fn identity() -> Self {
        ChangeOfBasis { ord_norm: 0, tau_det_a: CycNumber::one(1) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxData {
    pub ell: u64,
    /// yȳ, a power of ℓ times an ℓ-unit.
    pub y_norm: u64,
    pub vol_y: Rational,
    pub change: ChangeOfBasis,
}

#[derive(Clone, Debug)]
pub struct SiegelDatum {
    pub variant: Variant,
    pub r: usize,
    pub kappa: i64,
    pub disc: u64,
    pub tau_pair: SplitPCharPair,
    pub sigma: BTreeSet<u64>,
    pub aux: AuxData,
    pub emb: Arc<PadicEmbedding>,
}

impl SiegelDatum {
    pub fn new(
        variant: Variant,
        r: usize,
        kappa: i64,
        disc: u64,
        tau_pair: SplitPCharPair,
        sigma: BTreeSet<u64>,
        aux: AuxData,
        emb: Arc<PadicEmbedding>,
    ) -> Result<Self, SiegelError> {
        let mut sigma = sigma;
        sigma.insert(tau_pair.p());
        let d = SiegelDatum { variant, r, kappa, disc, tau_pair, sigma, aux, emb };
        d.validate()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.variant.size(self.r)
    }

    pub fn p(&self) -> u64 {
        self.tau_pair.p()
    }

    /// z_κ = (κ − n)/2.
    pub fn s_point(&self) -> Rational {
        rat(self.kappa - self.n() as i64, 2)
    }

    /// τ′ = τ|_{Q_p^×} as a character of Q_p^×.
    pub fn tau_prime(&self) -> LocalChar {
        self.tau_pair.tau_prime()
    }

    /// Smallest level whose prime-to-p part the embedding must cover.
    pub fn required_level(disc: u64, pair: &SplitPCharPair, aux: &AuxData) -> u64 {
        let d = QuadFieldElem::cyclotomic_level(disc);
        let (_, ell_part) = split_p_part(aux.y_norm, aux.ell);
        let ell_pow = aux.y_norm / ell_part;
        let mut n = lcm(d, pair.p());
        for t in [&pair.tau1, &pair.tau2] {
            n = lcm(n, t.unit_char().order());
            n = lcm(n, t.at_p().unit.level());
        }
        n = lcm(n, ell_pow.max(1));
        lcm(n, aux.change.tau_det_a.level())
    }

    pub fn validate(&self) -> Result<(), SiegelError> {
        let p = self.p();
        if p < 3 || !is_prime(p) {
            return Err(SiegelError::Datum(format!("p = {p} must be an odd prime")));
        }
        if self.emb.p() != p {
            return Err(SiegelError::Datum(format!("embedding is {}-adic, expected {p}", self.emb.p())));
        }
        if self.r == 0 {
            return Err(SiegelError::Datum("r must be positive".into()));
        }
        if self.kappa < self.n() as i64 {
            return Err(SiegelError::WeightTooSmall { kappa: self.kappa, n: self.n() });
        }
        if chi_k(self.disc, p) != 1 {
            return Err(SiegelError::Datum(format!("p = {p} does not split in Q(sqrt(-{}))", self.disc)));
        }
        let ell = self.aux.ell;
        if ell == p || !is_prime(ell) {
            return Err(SiegelError::Datum(format!("aux prime ell = {ell} must be a prime different from p")));
        }
        if chi_k(self.disc, ell) == 0 {
            return Err(SiegelError::RamifiedAux(ell));
        }
        if self.aux.y_norm == 0 {
            return Err(SiegelError::Datum("y_norm must be positive".into()));
        }
        self.tau_pair.check_siegel_conductor()?;
        let need = Self::required_level(self.disc, &self.tau_pair, &self.aux);
        let (_, tame) = split_p_part(need, p);
        if self.emb.tame_level() % tame != 0 {
            return Err(SiegelError::Datum(format!(
                "embedding tame level {} does not cover the required level {need}",
                self.emb.tame_level()
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Unramified(u64),
    Aux(u64),
    Sigma(u64),
    /// Euler factors of Σ-places left over when the prefactor is a full L-value.
    LFactor(u64),
    P(u64),
    Archimedean,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Unramified(q) => write!(f, "unramified:{q}"),
            Place::Aux(q) => write!(f, "aux:{q}"),
            Place::Sigma(q) => write!(f, "sigma:{q}"),
            Place::LFactor(q) => write!(f, "lfactor:{q}"),
            Place::P(q) => write!(f, "p:{q}"),
            Place::Archimedean => write!(f, "infinity"),
        }
    }
}

/// A local value unit · base^exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalCoeff {
    pub place: Place,
    pub value_unit: CycNumber,
    pub base: u64,
    pub p_exponent: Rational,
    pub note: Option<String>,
}

impl LocalCoeff {
    fn from_scaled(place: Place, v: ScaledUnit) -> Self {
        LocalCoeff { place, value_unit: v.unit, base: v.base, p_exponent: v.exp, note: None }
    }

    fn zero(place: Place, base: u64) -> Self {
        Self::from_scaled(place, ScaledUnit::zero(base))
    }

    pub fn is_zero(&self) -> bool {
        self.value_unit.is_zero()
    }

    pub fn scaled(&self) -> ScaledUnit {
        ScaledUnit::new(self.value_unit.clone(), self.base, self.p_exponent.clone())
    }

    pub fn materialize(&self) -> Option<CycNumber> {
        self.scaled().materialize()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "place": self.place.to_string(),
            "unit": self.value_unit.to_json(),
            "base": self.base,
            "exponent": rational_to_string(&self.p_exponent),
            "note": self.note,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReportStatus {
    Supported,
    /// β singular: the local formulas do not apply and a flagged placeholder
    /// is reported instead.
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct CoefficientReport {
    pub beta: HermitianMatrix,
    pub variant: Variant,
    pub status: ReportStatus,
    pub locals: Vec<LocalCoeff>,
    /// Product of the units of all locals.
    pub unit: CycNumber,
    /// Product of the prime powers of all locals that could not be folded
    /// into `unit` (non-integral exponents).
    pub powers: BTreeMap<u64, Rational>,
    pub normalized_value: Option<CycNumber>,
    pub symbolic: Vec<String>,
    pub embedding_choice: usize,
    pub embedded: Option<QqElem>,
    pub embed_error: Option<String>,
}

impl CoefficientReport {
    fn degenerate(beta: &HermitianMatrix, datum: &SiegelDatum, why: &str) -> Self {
        CoefficientReport {
            beta: beta.clone(),
            variant: datum.variant,
            status: ReportStatus::Degenerate,
            locals: Vec::new(),
            unit: CycNumber::zero(1),
            powers: BTreeMap::new(),
            normalized_value: None,
            symbolic: vec![why.to_string()],
            embedding_choice: datum.emb.choice(),
            embedded: None,
            embed_error: None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.status == ReportStatus::Degenerate
    }

    pub fn to_json(&self, dual_scale: u64) -> serde_json::Value {
        let powers: serde_json::Map<String, serde_json::Value> = self
            .powers
            .iter()
            .map(|(b, e)| (b.to_string(), serde_json::Value::String(rational_to_string(e))))
            .collect();
        serde_json::json!({
            "beta": self.beta.to_json(dual_scale),
            "variant": self.variant.as_str(),
            "status": match self.status { ReportStatus::Supported => "supported", ReportStatus::Degenerate => "degenerate" },
            "locals": self.locals.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "unit": self.unit.to_json(),
            "powers": powers,
            "normalized": self.normalized_value.as_ref().map(|v| v.to_json()),
            "symbolic": self.symbolic,
            "embedding_choice": self.embedding_choice,
            "embedded": self.embedded.as_ref().map(|e| e.to_json()),
            "embed_error": self.embed_error,
        })
    }
}

fn check_size(beta: &HermitianMatrix, n: usize) -> Result<(), SiegelError> {
    if beta.n() != n {
        return Err(SiegelError::Size { got: beta.n(), n });
    }
    Ok(())
}

fn small_u64(x: &BigInt) -> Result<u64, SiegelError> {
    x.abs().to_u64().ok_or_else(|| SiegelError::Overflow(x.to_string()))
}

/// β ∈ S_n(O_q) with det β a q-unit.
pub fn is_primitive_at(beta: &HermitianMatrix, q: u64) -> bool {
    is_integral_at(beta, q) && {
        let d = beta.det();
        !d.is_zero() && val_rational(&d, q) == 0
    }
}

/// Entries in O_K ⊗ Z_(q).
pub fn is_integral_at(beta: &HermitianMatrix, q: u64) -> bool {
    let n = beta.n();
    (0..n).all(|i| (i..n).all(|j| beta.get(i, j).is_integral_at(q)))
}

/// Membership in the dual of S_n(Z_q) under (g, h) ↦ tr(gh): integral
/// diagonal and Tr(β_ij·x) ∈ Z_q for x in an O_K-basis.
pub fn in_dual_lattice(beta: &HermitianMatrix, q: u64) -> bool {
    let n = beta.n();
    let disc = beta.disc();
    let basis = [QuadFieldElem::one(disc), QuadFieldElem::omega(disc)];
    for i in 0..n {
        if !is_p_integral(&beta.diag(i), q) {
            return false;
        }
        for j in (i + 1)..n {
            let b = beta.get(i, j);
            if !basis.iter().all(|w| is_p_integral(&b.mul(w).trace(), q)) {
                return false;
            }
        }
    }
    true
}

/// τ̄′(q) for a prime q ≠ p, read through the Dirichlet character of τ′.
fn tau_prime_bar_at(datum: &SiegelDatum, q: u64) -> CycNumber {
    datum.tau_prime().unit_char().primitive().conj().value(q as i64)
}

/// ∏_{i=0}^{n−1} L_q(2s + n − i, τ̄′χ_K^i)^{−1} at s = z_κ for a q-primitive β.
pub fn coeff_unramified(beta: &HermitianMatrix, q: u64, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let n = datum.n();
    check_size(beta, n)?;
    if datum.sigma.contains(&q) || q == datum.aux.ell || !is_prime(q) {
        return Err(SiegelError::Datum(format!("{q} is not an unramified place of the datum")));
    }
    if !is_primitive_at(beta, q) {
        return Err(SiegelError::NonPrimitive { q });
    }
    let tb = tau_prime_bar_at(datum, q);
    let chi = chi_k(datum.disc, q) as i64;
    let two_s = &datum.s_point() * int(2);
    let mut acc = CycNumber::one(1);
    for i in 0..n {
        let unit = tb.scale(&int(chi.pow(i as u32)));
        let arg = &two_s + int((n - i) as i64);
        match euler_factor_at(&unit, q, &arg)? {
            EulerValue::Exact(l) => acc = acc.div(&l)?,
            EulerValue::Symbolic { .. } => unreachable!("2s + n − i is an integer"),
        }
    }
    Ok(LocalCoeff::from_scaled(Place::Unramified(q), ScaledUnit::from_unit(acc, q)))
}

/// ℓ-adic fractional part of c as a root of unity ζ_{ℓ^k}^a.
fn e_ell(c: &Rational, ell: u64) -> Result<CycNumber, SiegelError> {
    let den = small_u64(c.denom())?;
    let (k, unit) = split_p_part(den, ell);
    if k == 0 {
        return Ok(CycNumber::one(1));
    }
    let m = den / unit;
    let num = (c.numer() % BigInt::from(m * unit)).to_i64().expect("bounded");
    let inv = inv_mod(unit as i64, m).expect("unit");
    let a = ((num as i128).rem_euclid(m as i128) * inv as i128).rem_euclid(m as i128) as i64;
    Ok(CycNumber::zeta(m, a))
}

/// Auxiliary-ℓ coefficient τ(det A)|det AĀ|_ℓ^{−s+n/2} e_ℓ(trace part / yȳ),
/// zero off the dual lattice. D_ℓ = 1 since ℓ is unramified.
pub fn coeff_aux_ell(beta: &HermitianMatrix, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let n = datum.n();
    check_size(beta, n)?;
    let ell = datum.aux.ell;
    if chi_k(datum.disc, ell) == 0 {
        return Err(SiegelError::RamifiedAux(ell));
    }
    if !in_dual_lattice(beta, ell) {
        return Ok(LocalCoeff::zero(Place::Aux(ell), ell));
    }
    let start = match datum.variant {
        Variant::Klingen => 1,
        Variant::Lfun => 0,
    };
    let tr: Rational = (start..n).map(|i| beta.diag(i)).fold(Rational::zero(), |a, b| a + b);
    let e = e_ell(&(tr / int(datum.aux.y_norm as i64)), ell)?;
    let ch = &datum.aux.change;
    let exp = int(ch.ord_norm) * (datum.s_point() - rat(n as i64, 2));
    let unit = ch.tau_det_a.mul(&e);
    Ok(LocalCoeff::from_scaled(Place::Aux(ell), ScaledUnit::new(unit, ell, exp)))
}

/// Coefficient at q ∈ Σ∖{p, ℓ}: the ℓ-type section with y = 1 and A = 1,
/// i.e. D_q^{−n(n−1)/4} on the dual lattice.
pub fn coeff_sigma_place(beta: &HermitianMatrix, q: u64, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let n = datum.n();
    check_size(beta, n)?;
    if !in_dual_lattice(beta, q) {
        return Ok(LocalCoeff::zero(Place::Sigma(q), q));
    }
    let d = QuadFieldElem::field_discriminant(datum.disc).unsigned_abs();
    let (v, _) = split_p_part(d, q);
    let exp = -int(v as i64) * rat((n * (n - 1)) as i64, 4);
    Ok(LocalCoeff::from_scaled(Place::Sigma(q), ScaledUnit::power_of_base(q, exp)))
}

/// c_n(χ, s) = χ(p^n) p^{2ns − n(n+1)/2}.
pub fn c_n(chi: &LocalChar, s: &Rational, n: usize) -> Result<ScaledUnit, SiegelError> {
    let n_i = n as i64;
    let e = int(2 * n_i) * s - rat(n_i * (n_i + 1), 2);
    Ok(chi.at_p().pow(n_i)?.shift(&e))
}

/// ι(x) for x ∈ K.
pub fn iota(emb: &PadicEmbedding, x: &QuadFieldElem) -> Result<PadicElem, PadicError> {
    emb.embed_qp(&x.to_cyclotomic())
}

/// The r×r matrix Φ is evaluated on: rows 2..r+1, columns 1..r of β for
/// n = r+1, and β itself for n = r.
pub fn phi_block(beta: &HermitianMatrix, variant: Variant) -> Vec<Vec<QuadFieldElem>> {
    let n = beta.n();
    match variant {
        Variant::Klingen => (1..n).map(|i| (0..n - 1).map(|j| beta.get(i, j).clone()).collect()).collect(),
        Variant::Lfun => beta.rows(),
    }
}

/// Φ_ξ(ι(x)): ξ(det) if every leading minor is a p-adic unit, else 0.
pub fn phi_xi(x: &[Vec<QuadFieldElem>], xi: &LocalChar, emb: &PadicEmbedding) -> Result<CycNumber, SiegelError> {
    let r = x.len();
    let mut last = None;
    for k in 1..=r {
        let minor: Vec<Vec<QuadFieldElem>> = x[..k].iter().map(|row| row[..k].to_vec()).collect();
        let d = iota(emb, &det_quad(&minor))?;
        if d.valuation() != Some(0) {
            return Ok(CycNumber::zero(1));
        }
        last = Some(d);
    }
    let d = last.expect("r ≥ 1");
    let m = xi.unit_char().modulus();
    let res = d.residue().expect("unit") % BigInt::from(m);
    Ok(xi.on_unit(res.to_i64().expect("small residue")))
}

/// p-adic coefficient
/// τ̄′(det β)|det β|_p^{2s} 𝔤(τ′)^n c_n(τ̄′, −s) Φ_{τ_2}(x) at s = z_κ.
pub fn coeff_p(beta: &HermitianMatrix, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let n = datum.n();
    check_size(beta, n)?;
    let p = datum.p();
    let det = beta.det();
    if det.is_zero() {
        return Err(SiegelError::Singular);
    }
    if !is_integral_at(beta, p) {
        return Ok(LocalCoeff::zero(Place::P(p), p));
    }
    let phi = phi_xi(&phi_block(beta, datum.variant), &datum.tau_pair.tau2, &datum.emb)?;
    if phi.is_zero() {
        return Ok(LocalCoeff::zero(Place::P(p), p));
    }
    let tp = datum.tau_prime();
    let tpb = tp.conj();
    let s = datum.s_point();
    let v = val_rational(&det, p);
    let g = gauss_sum(&tp.unit_char().primitive())?.pow(n as i64)?;
    let val = tpb
        .eval_rational(&det)?
        .shift(&(-int(2 * v) * &s))
        .mul_unit(&g)
        .mul(&c_n(&tpb, &(-s), n)?)?
        .mul_unit(&phi);
    Ok(LocalCoeff::from_scaled(Place::P(p), val))
}

/// Algebraic archimedean coefficient after the normalization prefactor:
/// (−2)^{−n} det(β)^{κ−n}/(κ−1)! for n = r+1 and (−2)^{−n} det(β)^{κ−n}
/// for n = r, where the leftover (2/π)^{−r} is reported symbolically.
pub fn coeff_arch_normalized(beta: &HermitianMatrix, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let n = datum.n();
    check_size(beta, n)?;
    if datum.kappa < n as i64 {
        return Err(SiegelError::WeightTooSmall { kappa: datum.kappa, n });
    }
    let det = beta.det();
    if !det.is_positive() {
        return Ok(LocalCoeff::zero(Place::Archimedean, 1));
    }
    let mut v = crate::exact_arith::rational::rat_pow(&int(-2), -(n as i64))
        * crate::exact_arith::rational::rat_pow(&det, datum.kappa - n as i64);
    let mut note = None;
    match datum.variant {
        Variant::Klingen => v /= Rational::from_integer(factorial((datum.kappa - 1) as u64)),
        Variant::Lfun => note = Some(format!("times (2/pi)^(-{})", datum.r)),
    }
    let mut lc = LocalCoeff::from_scaled(Place::Archimedean, ScaledUnit::from_unit(CycNumber::from_rational(&v), 1));
    lc.note = note;
    Ok(lc)
}

/// Σ-place Euler factors ∏_i L_q(κ − i, τ̄′χ_K^i) that the n = r prefactor
/// (a full L-value) leaves after cancelling the unramified places.
fn leftover_l_factor(q: u64, datum: &SiegelDatum) -> Result<LocalCoeff, SiegelError> {
    let tb = tau_prime_bar_at(datum, q);
    let chi = chi_k(datum.disc, q) as i64;
    let mut acc = CycNumber::one(1);
    for i in 0..datum.n() {
        let c = if i == 0 { 1 } else { chi.pow(i as u32) };
        let unit = tb.scale(&int(c));
        match euler_factor_at(&unit, q, &int(datum.kappa - i as i64))? {
            EulerValue::Exact(l) => acc = acc.mul(&l),
            EulerValue::Symbolic { .. } => unreachable!("integral argument"),
        }
    }
    Ok(LocalCoeff::from_scaled(Place::LFactor(q), ScaledUnit::from_unit(acc, q)))
}

fn primes_of(x: &Rational) -> Result<BTreeSet<u64>, SiegelError> {
    let mut out = BTreeSet::new();
    for part in [x.numer(), x.denom()] {
        if part.is_zero() || part.abs().is_one() {
            continue;
        }
        out.extend(factor(small_u64(part)?).into_iter().map(|(q, _)| q));
    }
    Ok(out)
}

/// Primes at which β could fail to be primitive.
fn bad_primes(beta: &HermitianMatrix) -> Result<BTreeSet<u64>, SiegelError> {
    let mut out = primes_of(&beta.det())?;
    let n = beta.n();
    for i in 0..n {
        for j in i..n {
            let e = beta.get(i, j);
            out.extend(primes_of(&e.trace())?);
            out.extend(primes_of(&e.norm())?);
        }
    }
    // traces and norms can be non-integral only at their denominators; the
    // numerators are harmless, so keep just the primes where β misbehaves
    Ok(out.into_iter().filter(|&q| !is_primitive_at(beta, q)).collect())
}

/// Product of local values: an exact unit times prime powers.
pub fn combine_locals(locals: &[LocalCoeff]) -> (CycNumber, BTreeMap<u64, Rational>) {
    let mut unit = CycNumber::one(1);
    let mut powers: BTreeMap<u64, Rational> = BTreeMap::new();
    for l in locals {
        if l.is_zero() {
            return (CycNumber::zero(1), BTreeMap::new());
        }
        unit = unit.mul(&l.value_unit);
        if l.base > 1 && !l.p_exponent.is_zero() {
            *powers.entry(l.base).or_insert_with(Rational::zero) += &l.p_exponent;
        }
    }
    powers.retain(|_, e| !e.is_zero());
    let mut keep = BTreeMap::new();
    for (b, e) in powers {
        if is_integer(&e) {
            let k = e.to_integer().to_i64().expect("small exponent");
            unit = unit.scale(&prime_pow(b, k));
        } else {
            keep.insert(b, e);
        }
    }
    (unit, keep)
}

/// Normalized global coefficient at β: the Euler product of the local
/// coefficients with the unramified places cancelled against the
/// normalization prefactor.
pub fn assemble_global(beta: &HermitianMatrix, datum: &SiegelDatum) -> Result<CoefficientReport, SiegelError> {
    datum.validate()?;
    let n = datum.n();
    check_size(beta, n)?;
    if !beta.is_positive_semidefinite() {
        return Err(SiegelError::NotSemidefinite);
    }
    if beta.det().is_zero() {
        let why = if beta.is_zero() { "constant term" } else { "singular beta" };
        return Ok(CoefficientReport::degenerate(beta, datum, why));
    }
    let p = datum.p();
    let ell = datum.aux.ell;
    for q in bad_primes(beta)? {
        if q != p && q != ell && !datum.sigma.contains(&q) {
            return Err(SiegelError::NonPrimitive { q });
        }
    }
    let mut locals = vec![coeff_p(beta, datum)?, coeff_aux_ell(beta, datum)?];
    for &q in datum.sigma.iter().filter(|&&q| q != p && q != ell) {
        locals.push(coeff_sigma_place(beta, q, datum)?);
    }
    if datum.variant == Variant::Lfun {
        let mut qs: BTreeSet<u64> = datum.sigma.iter().copied().filter(|&q| q != p).collect();
        qs.insert(ell);
        for q in qs {
            locals.push(leftover_l_factor(q, datum)?);
        }
    }
    locals.push(coeff_arch_normalized(beta, datum)?);

    let (unit, powers) = combine_locals(&locals);
    let mut symbolic: Vec<String> = powers
        .iter()
        .map(|(b, e)| format!("{b}^({})", rational_to_string(e)))
        .collect();
    symbolic.extend(locals.iter().filter_map(|l| l.note.clone()));
    let normalized_value = if powers.is_empty() { Some(unit.clone()) } else { None };
    let (embedded, embed_error) = match &normalized_value {
        Some(v) => match datum.emb.embed(v) {
            Ok(e) => (Some(e), None),
            Err(e) => (None, Some(e.to_string())),
        },
        None => (None, Some("value is not materialized".into())),
    };
    Ok(CoefficientReport {
        beta: beta.clone(),
        variant: datum.variant,
        status: ReportStatus::Supported,
        locals,
        unit,
        powers,
        normalized_value,
        symbolic,
        embedding_choice: datum.emb.choice(),
        embedded,
        embed_error,
    })
}
