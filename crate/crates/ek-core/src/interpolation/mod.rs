//! Arithmetic points, specialization of the character families, coefficient
//! families over several points and the congruences between them.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::bernoulli_kl::{kl_value_exact, KlError};
use crate::characters::{gauss_sum, CharError, DirichletChar, LocalChar, SplitPCharPair};
use crate::exact_arith::nt::pow_mod;
use crate::exact_arith::rational::{int, rat, rational_to_string, Rational};
use crate::exact_arith::{ArithError, CycNumber, HermitianMatrix, QuadFieldElem};
use crate::padic::{PadicEmbedding, PadicError, QqElem};
use crate::pullback::{p_constant_lfun, PullbackError, SatakeParams};
use crate::qexp_diff::{multiplier, QexpError};
use crate::siegel_fourier::{assemble_global, AuxData, CoefficientReport, SiegelDatum, SiegelError, Variant};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("invalid point: {0}")]
    Point(String),
    #[error("conductor violation: {0}")]
    Conductor(String),
    #[error("invalid family: {0}")]
    Family(String),
    #[error("insufficient precision at {cell}: need {need}, have {have}")]
    Precision { cell: String, need: i64, have: i64 },
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Kl(#[from] KlError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Qexp(#[from] QexpError),
    #[error(transparent)]
    Pullback(#[from] PullbackError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// ζ_{p^j}^a.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PRoot {
    pub j: u32,
    pub a: u64,
}

impl PRoot {
    pub fn one() -> Self {
        PRoot { j: 0, a: 0 }
    }

    /// Reduced so that j is the exact order exponent.
    pub fn new(p: u64, j: u32, a: u64) -> Self {
        let (mut j, mut a) = (j, a % p.pow(j));
        while j > 0 && a % p == 0 {
            a /= p;
            j -= 1;
        }
        if j == 0 {
            a = 0;
        }
        PRoot { j, a }
    }

    pub fn is_one(&self) -> bool {
        self.j == 0
    }

    pub fn to_cyc(&self, p: u64) -> CycNumber {
        if self.j == 0 {
            CycNumber::one(1)
        } else {
            CycNumber::zeta(p.pow(self.j), self.a as i64)
        }
    }

    pub fn pow(&self, p: u64, e: u64) -> Self {
        let m = p.pow(self.j);
        Self::new(p, self.j, (self.a as u128 * e as u128 % m.max(1) as u128) as u64)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"order_exp": self.j, "exponent": self.a})
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    /// Points used for the Siegel measure, with roots of unity ζ_1, ζ_2.
    X,
    /// Pullback points: ζ_1 = ζ_2 = 1 and τ_1, τ_2, τ_1τ_2 of conductor p.
    Xpb,
}

impl PointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PointKind::X => "X",
            PointKind::Xpb => "Xpb",
        }
    }
}

/// φ: τ((1, 1+p)) ↦ (1+p)^κ ζ_1 τ_0((1, 1+p)), τ((1+p, 1)) ↦ τ_0((1+p, 1)),
/// ψ_K(γ^−) ↦ (1+p)^{m/2} ζ_2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArithmeticPoint {
    pub kappa: i64,
    pub m: u64,
    pub zeta1: PRoot,
    pub zeta2: PRoot,
    pub kind: PointKind,
}

impl ArithmeticPoint {
    pub fn pb(kappa: i64, m: u64) -> Self {
        ArithmeticPoint { kappa, m, zeta1: PRoot::one(), zeta2: PRoot::one(), kind: PointKind::Xpb }
    }

    pub fn validate(&self, r: usize) -> Result<(), InterpError> {
        if self.kappa <= r as i64 + 1 {
            return Err(InterpError::Point(format!("kappa = {} must exceed r + 1 = {}", self.kappa, r + 1)));
        }
        if self.kind == PointKind::Xpb && !(self.zeta1.is_one() && self.zeta2.is_one()) {
            return Err(InterpError::Point("pullback points carry no roots of unity".into()));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!(
            "{}(kappa={}, m={}, zeta1={}/{}, zeta2={}/{})",
            self.kind.as_str(),
            self.kappa,
            self.m,
            self.zeta1.a,
            self.zeta1.j,
            self.zeta2.a,
            self.zeta2.j
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.as_str(),
            "kappa": self.kappa,
            "m": self.m,
            "zeta1": self.zeta1.to_json(),
            "zeta2": self.zeta2.to_json(),
        })
    }
}

/// The finite-order p-components of τ_0 and ξ_0|·|^{(r−1)/2}, linked by
/// τ_0 = (ξ_0|·|^{(r−1)/2})‾^c, together with the weight a of the cusp form.
#[derive(Clone, Debug)]
pub struct CharFamilySpec {
    pub p: u64,
    pub r: usize,
    pub a: Vec<i64>,
    pub tau0: SplitPCharPair,
    pub xi0: SplitPCharPair,
    pub emb: Arc<PadicEmbedding>,
}

impl CharFamilySpec {
    pub fn from_tau0(tau0: SplitPCharPair, r: usize, a: Vec<i64>, emb: Arc<PadicEmbedding>) -> Result<Self, InterpError> {
        let xi0 = tau0.conj().conj_c();
        Self::build(tau0, xi0, r, a, emb)
    }

    pub fn from_xi0(xi0: SplitPCharPair, r: usize, a: Vec<i64>, emb: Arc<PadicEmbedding>) -> Result<Self, InterpError> {
        let tau0 = xi0.conj().conj_c();
        Self::build(tau0, xi0, r, a, emb)
    }

    fn build(tau0: SplitPCharPair, xi0: SplitPCharPair, r: usize, a: Vec<i64>, emb: Arc<PadicEmbedding>) -> Result<Self, InterpError> {
        let p = tau0.p();
        if emb.p() != p {
            return Err(InterpError::Family(format!("embedding is {}-adic, characters are {p}-adic", emb.p())));
        }
        if r == 0 || a.len() != r {
            return Err(InterpError::Family(format!("weight {a:?} must have r = {r} >= 1 entries")));
        }
        if a.windows(2).any(|w| w[0] < w[1]) || a.last().is_some_and(|&x| x < 0) {
            return Err(InterpError::Family(format!("weight {a:?} must be nonincreasing and nonnegative")));
        }
        for t in [&tau0.tau1, &tau0.tau2] {
            if !t.at_p().exp.eq(&int(0)) {
                return Err(InterpError::Family("tau0 must be of finite order".into()));
            }
        }
        let fam = CharFamilySpec { p, r, a, tau0, xi0, emb };
        if fam.xi0 != fam.tau0.conj().conj_c() {
            return Err(InterpError::Family("tau0 and xi0 are not linked by conjugation and c".into()));
        }
        Ok(fam)
    }

    /// τ′_0 = τ_{0,1}τ_{0,2} on Z_p^×.
    pub fn tau0_prime(&self) -> DirichletChar {
        self.tau0.tau1.unit_char().mul(self.tau0.tau2.unit_char()).primitive()
    }
}

/// The character of Z_p^× trivial on μ_{p−1} with 1+p ↦ ζ_{p^j}^a.
pub fn wild_char(p: u64, z: PRoot) -> Result<DirichletChar, InterpError> {
    if z.is_one() {
        return Ok(DirichletChar::trivial(1));
    }
    let m = p.pow(z.j + 1);
    let order = p.pow(z.j);
    let g = crate::exact_arith::nt::primitive_root(p);
    let t = pow_mod(g, order, m);
    Ok(DirichletChar::from_generators(m, order, &[(t, 0), (1 + p, z.a as u32)])?.primitive())
}

/// Finite specialization data at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Specialization {
    /// τ_φ = (τ_1, τ_2) at p with τ_1 = τ_{0,1} and τ_2 = τ_{0,2}ω^{−κ}η_{ζ_1}.
    pub pair: SplitPCharPair,
    pub kappa: i64,
    pub weight: Vec<i64>,
    /// Infinity type exponents of ψ_φ: z ↦ z^{m/2} z̄^{−m/2}.
    pub psi_infinity: (Rational, Rational),
    /// ψ_φ(γ^−) finite part and ψ_φψ_φ^{−c}(γ^−) = ζ_2².
    pub psi_zeta: PRoot,
    pub psi_ratio: PRoot,
    /// ξ_φ = |·|^{(κ−r+1)/2} τ̄_φ^c ψ_φψ_φ^{−c}: p-components of τ̄^c and the
    /// norm exponent.
    pub xi_pair: SplitPCharPair,
    pub xi_norm_exponent: Rational,
}

impl Specialization {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "tau": self.pair.to_json(),
            "kappa": self.kappa,
            "weight": self.weight,
            "psi_infinity": [rational_to_string(&self.psi_infinity.0), rational_to_string(&self.psi_infinity.1)],
            "psi_zeta2": self.psi_zeta.to_json(),
            "psi_ratio": self.psi_ratio.to_json(),
            "xi": self.xi_pair.to_json(),
            "xi_norm_exponent": rational_to_string(&self.xi_norm_exponent),
        })
    }
}

pub fn specialize(point: &ArithmeticPoint, fam: &CharFamilySpec) -> Result<Specialization, InterpError> {
    point.validate(fam.r)?;
    let p = fam.p;
    let w = DirichletChar::teichmuller_power(&fam.emb, -point.kappa);
    let eta = wild_char(p, point.zeta1)?;
    let u2 = fam.tau0.tau2.unit_char().mul(&w).mul(&eta).primitive();
    let tau2 = LocalChar::new(p, u2, fam.tau0.tau2.at_p().clone())?;
    let pair = SplitPCharPair::new(fam.tau0.tau1.clone(), tau2, point.kappa)?;
    if point.kind == PointKind::Xpb {
        pair.check_pullback_conductors().map_err(|e| InterpError::Conductor(e.to_string()))?;
    }
    let half_m = rat(point.m as i64, 2);
    let xi_pair = pair.conj_c().conj();
    Ok(Specialization {
        kappa: point.kappa,
        weight: fam.a.iter().map(|x| x + point.m as i64).collect(),
        psi_infinity: (half_m.clone(), -half_m),
        psi_zeta: point.zeta2,
        psi_ratio: point.zeta2.pow(p, 2),
        xi_norm_exponent: rat(point.kappa - fam.r as i64 + 1, 2),
        xi_pair,
        pair,
    })
}

/// Everything of a Siegel datum that does not depend on the point.
#[derive(Clone, Debug)]
pub struct DatumTemplate {
    pub variant: Variant,
    pub disc: u64,
    pub sigma: BTreeSet<u64>,
    pub aux: AuxData,
}

impl DatumTemplate {
    pub fn at(&self, spec: &Specialization, fam: &CharFamilySpec) -> Result<SiegelDatum, InterpError> {
        Ok(SiegelDatum::new(
            self.variant,
            fam.r,
            spec.kappa,
            self.disc,
            spec.pair.clone(),
            self.sigma.clone(),
            self.aux.clone(),
            fam.emb.clone(),
        )?)
    }
}

/// The Dirichlet character whose Kubota-Leopoldt value at k = κ − r gives
/// L(τ̄′_φ, κ − r)-type constant terms: χ_0 = τ′_0 ω^{−r}, so that
/// χ_0 ω^{−(κ−r)} = τ′_φ on units.
pub fn kl_character(fam: &CharFamilySpec) -> DirichletChar {
    fam.tau0_prime().mul(&DirichletChar::teichmuller_power(&fam.emb, -(fam.r as i64))).primitive()
}

#[derive(Clone, Debug)]
pub struct CellValue {
    pub report: CoefficientReport,
    pub multiplier: QuadFieldElem,
    /// Normalized coefficient times the weight multiplier.
    pub value: CycNumber,
    pub embedded: QqElem,
    /// β = 0: the constant-term placeholder.
    pub placeholder: bool,
    pub note: Option<String>,
}

impl CellValue {
    pub fn valuation(&self) -> Option<i64> {
        self.embedded.valuation()
    }

    pub fn to_json(&self, dual_scale: u64) -> serde_json::Value {
        serde_json::json!({
            "report": self.report.to_json(dual_scale),
            "multiplier": self.multiplier.to_string_canonical(),
            "value": self.value.to_json(),
            "embedded": self.embedded.to_json(),
            "valuation": self.valuation(),
            "placeholder": self.placeholder,
            "note": self.note,
        })
    }
}

pub type CellResult = Result<CellValue, String>;

#[derive(Clone, Debug)]
pub struct FamilyTable {
    pub p: u64,
    pub embedding_choice: usize,
    pub precision: i64,
    pub points: Vec<ArithmeticPoint>,
    pub specializations: Vec<Result<Specialization, String>>,
    pub betas: Vec<HermitianMatrix>,
    /// cells[i][j] for point i and β_j.
    pub cells: Vec<Vec<CellResult>>,
}

impl FamilyTable {
    pub fn to_json(&self, dual_scale: u64) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .points
            .iter()
            .zip(&self.specializations)
            .zip(&self.cells)
            .map(|((pt, sp), row)| {
                let cells: Vec<serde_json::Value> = row
                    .iter()
                    .map(|c| match c {
                        Ok(v) => v.to_json(dual_scale),
                        Err(e) => serde_json::json!({"error": e}),
                    })
                    .collect();
                let spec = match sp {
                    Ok(s) => s.to_json(),
                    Err(e) => serde_json::json!({"error": e}),
                };
                serde_json::json!({"point": pt.to_json(), "specialization": spec, "cells": cells})
            })
            .collect();
        serde_json::json!({
            "p": self.p,
            "embedding_choice": self.embedding_choice,
            "precision": self.precision,
            "betas": self.betas.iter().map(|b| b.to_json(dual_scale)).collect::<Vec<_>>(),
            "rows": rows,
        })
    }
}

fn constant_placeholder(
    datum: &SiegelDatum,
    fam: &CharFamilySpec,
    satake: Option<&SatakeParams>,
) -> Result<(CycNumber, Option<String>), InterpError> {
    let k = datum.kappa - fam.r as i64;
    let mut sigma = datum.sigma.clone();
    sigma.insert(datum.aux.ell);
    let kl = kl_value_exact(&kl_character(fam), k as usize, &sigma, &fam.emb)?;
    let Some(params) = satake else {
        return Ok((kl, Some("constant-term placeholder: Kubota-Leopoldt factor only".into())));
    };
    // only the unit of the p-constant enters: its Gauss-sum part 𝔤(τ_1^{−1})^r
    // is divided out as 𝔤(τ′)^n is for the nondegenerate cells, and its power
    // p^{rκ/2} is not p-adically continuous in κ
    let g = datum.tau_pair.tau1.inverse()?.gauss_sum()?.pow(fam.r as i64)?;
    match p_constant_lfun(params, &datum.tau_pair, datum.kappa, fam.r) {
        Ok(c) => Ok((
            kl.mul(&c.unit.div(&g)?),
            Some(format!(
                "constant-term placeholder: Kubota-Leopoldt factor times the unit of the L-function p-constant (p^{} and its Gauss sum removed)",
                rational_to_string(&c.exp)
            )),
        )),
        Err(e) => Ok((kl, Some(format!("constant-term placeholder: p-constant unavailable ({e})")))),
    }
}

/// 𝔤(τ′_φ)^n: the β-independent factor of the p-adic coefficient. It lies
/// in the ramified part of Q(ζ) and is divided out before embedding.
pub fn gauss_normalizer(datum: &SiegelDatum) -> Result<CycNumber, InterpError> {
    let g = gauss_sum(&datum.tau_prime().unit_char().primitive())?;
    Ok(g.pow(datum.n() as i64)?)
}

fn compute_cell(
    datum: &SiegelDatum,
    fam: &CharFamilySpec,
    spec: &Specialization,
    beta: &HermitianMatrix,
    satake: Option<&SatakeParams>,
) -> Result<CellValue, InterpError> {
    let report = assemble_global(beta, datum)?;
    if report.is_degenerate() {
        let (value, note) = constant_placeholder(datum, fam, satake)?;
        let embedded = fam.emb.embed(&value)?;
        return Ok(CellValue { report, multiplier: QuadFieldElem::one(beta.disc()), value, embedded, placeholder: true, note });
    }
    let mult = multiplier(beta, datum.variant, &spec.weight)?;
    let base = report.normalized_value.clone().expect("supported reports carry a value");
    let value = base.mul(&mult.to_cyclotomic()).div(&gauss_normalizer(datum)?)?;
    let embedded = fam.emb.embed(&value)?;
    let note = Some(format!("divided by g(tau')^{}", datum.n()));
    Ok(CellValue { report, multiplier: mult, value, embedded, placeholder: false, note })
}

/// Family table: for each point and β, the assembled coefficient at the
/// specialized datum times the multiplier of weight (a_i + m_φ). Cells are
/// computed in parallel; errors are recorded per cell.
pub fn coefficient_family(
    fam: &CharFamilySpec,
    points: &[ArithmeticPoint],
    betas: &[HermitianMatrix],
    template: &DatumTemplate,
    satake: Option<&SatakeParams>,
) -> FamilyTable {
    let prepared: Vec<Result<(Specialization, SiegelDatum), InterpError>> = points
        .iter()
        .map(|pt| {
            let spec = specialize(pt, fam)?;
            let datum = template.at(&spec, fam)?;
            Ok((spec, datum))
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|i| (0..betas.len()).map(move |j| (i, j))).collect();
    let flat: Vec<CellResult> = jobs
        .par_iter()
        .map(|&(i, j)| match &prepared[i] {
            Ok((spec, datum)) => compute_cell(datum, fam, spec, &betas[j], satake).map_err(|e| e.to_string()),
            Err(e) => Err(format!("point rejected: {e}")),
        })
        .collect();
    let mut it = flat.into_iter();
    let cells: Vec<Vec<CellResult>> = (0..points.len()).map(|_| it.by_ref().take(betas.len()).collect()).collect();
    FamilyTable {
        p: fam.p,
        embedding_choice: fam.emb.choice(),
        precision: fam.emb.precision(),
        points: points.to_vec(),
        specializations: prepared.iter().map(|r| r.as_ref().map(|(s, _)| s.clone()).map_err(|e| e.to_string())).collect(),
        betas: betas.to_vec(),
        cells,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceStatus {
    Pass,
    Fail,
    /// One of the cells could not be computed.
    Skipped(String),
}

#[derive(Clone, Debug)]
pub struct CongruenceEntry {
    pub a: usize,
    pub b: usize,
    pub k: i64,
    pub beta: usize,
    /// min valuation over the β column.
    pub content: Option<i64>,
    pub diff_valuation: Option<i64>,
    pub status: CongruenceStatus,
}

#[derive(Clone, Debug, Default)]
pub struct CongruenceReport {
    pub entries: Vec<CongruenceEntry>,
}

impl CongruenceReport {
    pub fn failures(&self) -> impl Iterator<Item = &CongruenceEntry> {
        self.entries.iter().filter(|e| e.status == CongruenceStatus::Fail)
    }

    pub fn passes(&self) -> usize {
        self.entries.iter().filter(|e| e.status == CongruenceStatus::Pass).count()
    }

    pub fn skipped(&self) -> usize {
        self.entries.iter().filter(|e| matches!(e.status, CongruenceStatus::Skipped(_))).count()
    }

    /// No failure among the computable cells, and at least one of them.
    pub fn all_pass(&self) -> bool {
        self.failures().next().is_none() && self.passes() > 0
    }

    pub fn to_json(&self, table: &FamilyTable, dual_scale: u64) -> serde_json::Value {
        let list: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let (status, reason) = match &e.status {
                    CongruenceStatus::Pass => ("PASS", None),
                    CongruenceStatus::Fail => ("FAIL", None),
                    CongruenceStatus::Skipped(r) => ("SKIPPED", Some(r.clone())),
                };
                let mut v = serde_json::json!({
                    "a": e.a,
                    "b": e.b,
                    "k": e.k,
                    "beta": table.betas[e.beta].to_json(dual_scale),
                    "content": e.content,
                    "diff_valuation": e.diff_valuation,
                    "status": status,
                    "reason": reason,
                });
                if e.status == CongruenceStatus::Fail {
                    let locals = |i: usize| match &table.cells[i][e.beta] {
                        Ok(c) => c.report.to_json(dual_scale),
                        Err(err) => serde_json::json!({"error": err}),
                    };
                    v["breakdown"] = serde_json::json!([locals(e.a), locals(e.b)]);
                }
                v
            })
            .collect();
        let fails = self.failures().count();
        serde_json::json!({"entries": list, "failures": fails, "passes": self.passes(), "skipped": self.skipped(), "all_pass": self.all_pass()})
    }
}

/// For each pair (a, b, k) and each β: v(c_a − c_b) − c ≥ k, where c is the
/// minimum valuation over the β column (the content of the family at β).
pub fn check_congruences(table: &FamilyTable, pairs: &[(usize, usize, i64)]) -> Result<CongruenceReport, InterpError> {
    let mut report = CongruenceReport::default();
    for (j, beta) in table.betas.iter().enumerate() {
        let content: Option<i64> =
            table.cells.iter().filter_map(|row| row[j].as_ref().ok()).filter_map(|c| c.valuation()).min();
        for &(a, b, k) in pairs {
            if a >= table.points.len() || b >= table.points.len() {
                return Err(InterpError::Point(format!("pair ({a}, {b}) is out of range")));
            }
            let (ca, cb) = (&table.cells[a][j], &table.cells[b][j]);
            let entry = |diff: Option<i64>, status| CongruenceEntry { a, b, k, beta: j, content, diff_valuation: diff, status };
            let (x, y) = match (ca, cb) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    report.entries.push(entry(None, CongruenceStatus::Skipped(e.clone())));
                    continue;
                }
            };
            let c = content.unwrap_or(0);
            let have = x.embedded.precision().min(y.embedded.precision());
            if have < c + k {
                return Err(InterpError::Precision { cell: format!("point {a} vs {b} at beta {beta}"), need: c + k, have });
            }
            let diff = x.embedded.sub(&y.embedded).valuation();
            let ok = diff.map(|v| v - c >= k).unwrap_or(true);
            report.entries.push(entry(diff, if ok { CongruenceStatus::Pass } else { CongruenceStatus::Fail }));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisibilityStatus {
    /// The computable part meets the bound; symbolic factors are not checked.
    Conditional,
    Fail,
    /// r ≠ 2: the divisibility is only proven for r = 2.
    OutsideProvenRange,
}

#[derive(Clone, Debug)]
pub struct DivisibilityReport {
    pub kl_valuation: Option<Rational>,
    pub p_factor_valuation: Option<Rational>,
    pub bound: Option<Rational>,
    pub cell_valuation: Option<Rational>,
    pub passed: bool,
    pub status: DivisibilityStatus,
    pub symbolic: Vec<String>,
}

impl DivisibilityReport {
    pub fn to_json(&self) -> serde_json::Value {
        let s = |x: &Option<Rational>| x.as_ref().map(rational_to_string);
        serde_json::json!({
            "kl_valuation": s(&self.kl_valuation),
            "p_factor_valuation": s(&self.p_factor_valuation),
            "bound": s(&self.bound),
            "cell_valuation": s(&self.cell_valuation),
            "passed": self.passed,
            "status": match self.status {
                DivisibilityStatus::Conditional => "conditional",
                DivisibilityStatus::Fail => "fail",
                DivisibilityStatus::OutsideProvenRange => "outside the proven range (r = 2 only)",
            },
            "symbolic": self.symbolic,
        })
    }
}

/// Predicted lower bound val(KL factor) + val(p-factor) for the constant
/// term, compared with the valuation of the constant-term placeholder.
pub fn constant_term_divisibility(
    point: &ArithmeticPoint,
    fam: &CharFamilySpec,
    satake: &SatakeParams,
    template: &DatumTemplate,
) -> Result<DivisibilityReport, InterpError> {
    let spec = specialize(point, fam)?;
    let datum = template.at(&spec, fam)?;
    let k = point.kappa - fam.r as i64;
    let mut sigma = datum.sigma.clone();
    sigma.insert(datum.aux.ell);
    let kl = kl_value_exact(&kl_character(fam), k as usize, &sigma, &fam.emb)?;
    let kl_val = fam.emb.valuation(&kl)?;
    let g = datum.tau_pair.tau1.inverse()?.gauss_sum()?.pow(fam.r as i64)?;
    let pf = p_constant_lfun(satake, &spec.pair, point.kappa, fam.r)?.mul_unit(&g.inverse()?);
    let pf_val = fam.emb.valuation(&pf.unit)?.map(|v| v + &pf.exp);
    let bound = match (&kl_val, &pf_val) {
        (Some(a), Some(b)) => Some(a + b),
        _ => None,
    };
    // the full constant, p-power included, unlike the family placeholder
    let cell_val = fam.emb.valuation(&kl.mul(&pf.unit))?.map(|v| v + &pf.exp);
    let passed = match (&cell_val, &bound) {
        (None, _) => true,
        (Some(c), Some(b)) => c >= b,
        (Some(_), None) => true,
    };
    let status = if fam.r != 2 {
        DivisibilityStatus::OutsideProvenRange
    } else if passed {
        DivisibilityStatus::Conditional
    } else {
        DivisibilityStatus::Fail
    };
    Ok(DivisibilityReport {
        kl_valuation: kl_val,
        p_factor_valuation: pf_val,
        bound,
        cell_valuation: cell_val,
        passed,
        status,
        symbolic: vec![
            "C_{phi,p}".into(),
            "c'_phi".into(),
            "L^Sigma(pi~, xi_phi, 0) / Omega_K".into(),
            "second p-adic L-function L_{phi,xi_0}".into(),
            "g(tau_1^-1)^r, divided out of the p-factor".into(),
        ],
    })
}

#[cfg(test)]
mod tests;
