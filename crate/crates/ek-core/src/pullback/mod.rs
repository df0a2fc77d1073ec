//! Closed-form constants attached to the pullback sections: the unramified
//! ratio, the auxiliary ℓ scalar and the p-adic Klingen and L-function
//! constants.

use thiserror::Error;

use crate::characters::{chi_k, CharError, SplitPCharPair};
use crate::exact_arith::nt::{is_prime, split_p_part};
use crate::exact_arith::rational::{int, is_integer, prime_pow, rat, Rational};
use crate::exact_arith::{ArithError, CycNumber, ScaledUnit};
use crate::interpolation::{specialize, ArithmeticPoint, CharFamilySpec, InterpError};
use crate::siegel_fourier::Variant;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PullbackError {
    #[error("numerator L-factor has a pole at q = {q}")]
    NumeratorPole { q: u64 },
    #[error("denominator L-factor has a pole at q = {q}")]
    DenominatorPole { q: u64 },
    #[error("q = {q} is not split in K")]
    NotSplit { q: u64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Satake parameters α_1..α_r of π at a split place, or the values χ_i(p)
/// at v = p.
#[derive(Clone, Debug, PartialEq)]
pub struct SatakeParams {
    pub r: usize,
    pub alphas: Vec<CycNumber>,
}

impl SatakeParams {
    pub fn new(alphas: Vec<CycNumber>) -> Result<Self, PullbackError> {
        if alphas.is_empty() {
            return Err(PullbackError::Input("at least one Satake parameter is required".into()));
        }
        if alphas.iter().any(|a| a.is_zero()) {
            return Err(PullbackError::Input("Satake parameters must be nonzero".into()));
        }
        Ok(SatakeParams { r: alphas.len(), alphas })
    }

    pub fn trivial(r: usize) -> Self {
        SatakeParams { r, alphas: vec![CycNumber::one(1); r] }
    }

    pub fn pairwise_distinct(&self) -> bool {
        (0..self.r).all(|i| ((i + 1)..self.r).all(|j| self.alphas[i] != self.alphas[j]))
    }

    fn check_rank(&self, r: usize) -> Result<(), PullbackError> {
        if r == 0 {
            return Err(PullbackError::Input("r must be positive".into()));
        }
        if self.r != r {
            return Err(PullbackError::Input(format!("expected {r} Satake parameters, got {}", self.r)));
        }
        Ok(())
    }
}

/// Exact value, or a symbolic one when a q-power has non-integral exponent.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioValue {
    Exact(CycNumber),
    Symbolic(String),
}

impl RatioValue {
    pub fn exact(&self) -> Option<&CycNumber> {
        match self {
            RatioValue::Exact(x) => Some(x),
            RatioValue::Symbolic(_) => None,
        }
    }
}

fn q_power(q: u64, e: &Rational) -> Option<Rational> {
    if !is_integer(e) {
        return None;
    }
    let k: i64 = e.to_integer().try_into().ok()?;
    Some(prime_pow(q, k))
}

/// L(π̃, τ̄^c, s + shift) / ∏_{i<r} L(2s + m − i, τ̄′χ_K^i) at a split prime q,
/// where (t_v, t_v̄) = (τ̄(ϖ_v), τ̄(ϖ_v̄)), shift = 1 and m = r + 1 for the
/// Klingen variant, shift = 1/2 and m = r for the L-function variant.
pub fn klingen_ratio_unramified(
    params: &SatakeParams,
    tau_data: (&CycNumber, &CycNumber),
    q: u64,
    disc: u64,
    s: &Rational,
    variant: Variant,
) -> Result<RatioValue, PullbackError> {
    let r = params.r;
    params.check_rank(r)?;
    if !is_prime(q) {
        return Err(PullbackError::Input(format!("{q} is not prime")));
    }
    if chi_k(disc, q) != 1 {
        return Err(PullbackError::NotSplit { q });
    }
    let (tv, tvb) = tau_data;
    let (shift, m) = match variant {
        Variant::Klingen => (int(1), r as i64 + 1),
        Variant::Lfun => (rat(1, 2), r as i64),
    };
    let sigma = s + shift;
    let den_exps: Vec<Rational> = (0..r as i64).map(|i| s * int(2) + int(m - i)).collect();
    let (Some(qs), Some(den_q)) = (
        q_power(q, &-sigma.clone()),
        den_exps.iter().map(|e| q_power(q, &-e.clone())).collect::<Option<Vec<_>>>(),
    ) else {
        return Ok(RatioValue::Symbolic(format!(
            "L_{q}(pi~, tau-bar^c, {sigma}) / prod L_{q}(2s+{m}-i, tau-bar' chi_K^i) at s = {s}"
        )));
    };
    let one = CycNumber::one(1);
    let mut num_inv = CycNumber::one(1);
    for a in &params.alphas {
        let a_inv = a.inverse()?;
        for x in [tv.mul(a), tvb.mul(&a_inv)] {
            let f = one.sub(&x.scale(&qs));
            if f.is_zero() {
                return Err(PullbackError::NumeratorPole { q });
            }
            num_inv = num_inv.mul(&f);
        }
    }
    // χ_K(q) = 1 at a split prime, so every denominator factor uses τ̄′(q)
    let tp = tv.mul(tvb);
    let mut den_inv = CycNumber::one(1);
    for e in &den_q {
        let f = one.sub(&tp.scale(e));
        if f.is_zero() {
            return Err(PullbackError::DenominatorPole { q });
        }
        den_inv = den_inv.mul(&f);
    }
    Ok(RatioValue::Exact(den_inv.div(&num_inv)?))
}

/// τ(yȳ)·|(yȳ)²|_ℓ^{−s−c}·Vol(𝔜) with c = (r+1)/2 (Klingen) or r/2
/// (L-function variant); τ is unramified at ℓ, so τ(yȳ) = τ(ℓ)^{ord_ℓ(yȳ)}.
pub fn aux_ell_scalar(
    y_norm: u64,
    ell: u64,
    tau_ell: &CycNumber,
    s: &Rational,
    r: usize,
    vol_y: &Rational,
    variant: Variant,
) -> Result<ScaledUnit, PullbackError> {
    if !is_prime(ell) {
        return Err(PullbackError::Input(format!("ell = {ell} is not prime")));
    }
    if y_norm == 0 {
        return Err(PullbackError::Input("y_norm must be positive".into()));
    }
    let (ord, _) = split_p_part(y_norm, ell);
    let c = match variant {
        Variant::Klingen => rat(r as i64 + 1, 2),
        Variant::Lfun => rat(r as i64, 2),
    };
    let exp = int(2 * ord as i64) * (s + c);
    let unit = tau_ell.pow(ord as i64)?.scale(vol_y);
    Ok(ScaledUnit::new(unit, ell, exp))
}

/// p^{κr/2 − r(r+1)/2}·𝔤(τ_1^{−1})^r·∏(χ_iτ_1)(p)·∏(χ_i^{−1}τ_2)(p)·τ̄^c((p^r, 1)).
pub fn p_constant_lfun(params: &SatakeParams, pair: &SplitPCharPair, kappa: i64, r: usize) -> Result<ScaledUnit, PullbackError> {
    params.check_rank(r)?;
    pair.check_pullback_conductors()?;
    let p = pair.p();
    let ri = r as i64;
    let g1 = pair.tau1.inverse()?.gauss_sum()?;
    let mut acc = ScaledUnit::new(g1.pow(ri)?, p, rat(kappa * ri, 2) - int(ri * (ri + 1) / 2));
    let t1 = pair.tau1.at_p();
    let t2 = pair.tau2.at_p();
    for chi in &params.alphas {
        acc = acc.mul(&t1.mul_unit(chi))?;
        acc = acc.mul(&t2.mul_unit(&chi.inverse()?))?;
    }
    Ok(acc.mul(&tau_bar_c_at(pair, r)?)?)
}

/// τ̄^c((p^r, 1)) = τ̄_2(p)^r: the conjugate-swapped character reads its
/// first slot through τ_2.
pub fn tau_bar_c_at(pair: &SplitPCharPair, r: usize) -> Result<ScaledUnit, PullbackError> {
    Ok(pair.conj_c().conj().tau1.at_p().pow(r as i64)?)
}

/// τ′(p^{−1})·p^{κ−r}·𝔤(τ̄′)^{−1}.
pub fn kl_normalization_factor(pair: &SplitPCharPair, kappa: i64, r: usize) -> Result<ScaledUnit, PullbackError> {
    let tp = pair.tau_prime();
    let g = tp.conj().gauss_sum()?;
    Ok(tp.at_p().inverse()?.shift(&int(kappa - r as i64)).mul_unit(&g.inverse()?))
}

/// The L-function constant times τ′(p^{−1})p^{κ−r}𝔤(τ̄′)^{−1}.
pub fn p_constant_klingen(params: &SatakeParams, pair: &SplitPCharPair, kappa: i64, r: usize) -> Result<ScaledUnit, PullbackError> {
    let base = p_constant_lfun(params, pair, kappa, r)?;
    Ok(base.mul(&kl_normalization_factor(pair, kappa, r)?)?)
}

/// The explicitly computable p-factor of the interpolation formula at a
/// point: the L-function constant at the specialized characters.
pub fn interpolation_p_factor(
    point: &ArithmeticPoint,
    fam: &CharFamilySpec,
    params: &SatakeParams,
) -> Result<ScaledUnit, InterpError> {
    let spec = specialize(point, fam)?;
    Ok(p_constant_lfun(params, &spec.pair, point.kappa, fam.r)?)
}

#[cfg(test)]
mod tests;
