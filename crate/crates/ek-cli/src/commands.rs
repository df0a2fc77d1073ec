//! The subcommands. Each returns the `result` part of the JSON envelope.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use ek_core::bernoulli_kl::{kl_specialization_q, kl_value_exact, l_at_nonpositive};
use ek_core::characters::{gauss_sum, DirichletChar};
use ek_core::exact_arith::rational::{int, rat, rational_to_string};
use ek_core::exact_arith::{enumerate_hermitian, CycNumber, HermitianMatrix, QuadFieldElem, Rational};
use ek_core::hecke::{kappa_set, klingen_eigenvalues, up_eigenvalues, WeightTuple};
use ek_core::interpolation::{check_congruences, coefficient_family, constant_term_divisibility, DatumTemplate};
use ek_core::padic::PadicEmbedding;
use ek_core::pullback::{
    aux_ell_scalar, kl_normalization_factor, klingen_ratio_unramified, p_constant_klingen, p_constant_lfun, RatioValue,
    SatakeParams,
};
use ek_core::qexp_diff::multiplier;
use ek_core::siegel_fourier::{assemble_global, SiegelDatum, Variant};

use crate::config::{bad, root, ConfigError, KlBranch, PointsFile, Setup};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(String),
    #[error("cannot write {path}: {msg}")]
    Write { path: String, msg: String },
}

impl CliError {
    /// 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

/// β of size n with trace_min ≤ trace ≤ trace_bound, in enumeration order.
pub fn select_betas(setup: &Setup, n: usize) -> Result<Vec<HermitianMatrix>, CliError> {
    let c = &setup.config;
    if c.trace_min > c.trace_bound {
        return Ok(Vec::new());
    }
    let all = enumerate_hermitian(n, c.disc, c.trace_bound, c.dual_scale, c.max_betas).map_err(compute)?;
    let lo = int(c.trace_min as i64);
    Ok(all.into_iter().filter(|b| b.trace() >= lo).collect())
}

fn datum(setup: &Setup, kappa: i64) -> Result<SiegelDatum, CliError> {
    let pair = setup.pair(kappa)?;
    SiegelDatum::new(
        setup.variant,
        setup.config.r,
        kappa,
        setup.config.disc,
        pair,
        setup.sigma.clone(),
        setup.aux.clone(),
        setup.emb.clone(),
    )
    .map_err(|e| bad("tau1", e.to_string()).into())
}

/// One CoefficientReport per (κ, β); unsupported β become error records.
pub fn cmd_coeff(setup: &Setup) -> Result<Value, CliError> {
    let dual = setup.config.dual_scale;
    let betas = select_betas(setup, setup.n())?;
    let mut blocks = Vec::new();
    for &kappa in &setup.config.kappa {
        let d = datum(setup, kappa)?;
        let reports: Vec<Value> = betas
            .par_iter()
            .map(|b| match assemble_global(b, &d) {
                Ok(rep) => rep.to_json(dual),
                Err(e) => json!({"beta": b.to_json(dual), "error": e.to_string()}),
            })
            .collect();
        blocks.push(json!({"kappa": kappa, "n": d.n(), "reports": reports}));
    }
    Ok(json!({"variant": setup.variant.as_str(), "beta_count": betas.len(), "by_kappa": blocks}))
}

fn template(setup: &Setup) -> DatumTemplate {
    DatumTemplate { variant: setup.variant, disc: setup.config.disc, sigma: setup.sigma.clone(), aux: setup.aux.clone() }
}

/// Family table over the points file, its congruence report and, with
/// Satake parameters, the constant-term divisibility reports.
pub fn cmd_family(setup: &Setup, points: &PointsFile) -> Result<Value, CliError> {
    let tau0 = setup.pair(0)?;
    let fam = ek_core::interpolation::CharFamilySpec::from_tau0(tau0, setup.config.r, setup.config.a.clone(), setup.emb.clone())
        .map_err(|e| bad("tau1", e.to_string()))?;
    let pts = points.points(setup.config.p)?;
    let pairs = points.pairs()?;
    let betas = select_betas(setup, setup.n())?;
    let tpl = template(setup);
    let table = coefficient_family(&fam, &pts, &betas, &tpl, setup.satake.as_ref());
    let report = check_congruences(&table, &pairs).map_err(compute)?;
    let dual = setup.config.dual_scale;
    let divisibility: Value = match &setup.satake {
        None => Value::Null,
        Some(s) => pts
            .iter()
            .map(|pt| match constant_term_divisibility(pt, &fam, s, &tpl) {
                Ok(r) => json!({"point": pt.label(), "report": r.to_json()}),
                Err(e) => json!({"point": pt.label(), "error": e.to_string()}),
            })
            .collect(),
    };
    let p = setup.config.p;
    Ok(json!({
        "gamma_generators": {"plus": [1 + p, 1], "minus": [1, 1 + p]},
        "table": table.to_json(dual),
        "congruences": report.to_json(&table, dual),
        "divisibility": divisibility,
    }))
}

/// Kubota-Leopoldt values at 1 − k and the matrix of difference valuations.
pub fn cmd_kl(setup: &Setup) -> Result<Value, CliError> {
    let spec = setup.config.kl.as_ref().ok_or_else(|| bad("kl", "the kl command needs a [kl] section"))?;
    let chi = setup.kl_char.as_ref().expect("validated with [kl]");
    let ks: Vec<usize> = (spec.k_min..=spec.k_max).collect();
    let vals: Vec<_> = ks
        .par_iter()
        .map(|&k| {
            let branch = match spec.branch {
                KlBranch::Kummer => chi.mul(&DirichletChar::teichmuller_power(&setup.emb, k as i64)),
                KlBranch::Fixed => chi.clone(),
            };
            let exact = kl_value_exact(&branch, k, &setup.sigma, &setup.emb);
            let padic = kl_specialization_q(&branch, k, &setup.sigma, &setup.emb);
            (k, exact, padic)
        })
        .collect();
    let list: Vec<Value> = vals
        .iter()
        .map(|(k, exact, padic)| match (exact, padic) {
            (Ok(e), Ok(q)) => json!({"k": k, "value": e.to_json(), "padic": q.to_json(), "valuation": q.valuation()}),
            (Err(e), _) | (_, Err(e)) => json!({"k": k, "error": e.to_string()}),
        })
        .collect();
    let mut cong = Vec::new();
    let mut diffs = Vec::new();
    for (_, _, a) in &vals {
        let mut row = Vec::new();
        let mut drow = Vec::new();
        for (_, _, b) in &vals {
            match (a, b) {
                (Ok(x), Ok(y)) => {
                    let v = x.sub(y).valuation();
                    let have = x.precision().min(y.precision());
                    row.push(json!(v.map(|v| v >= 1).unwrap_or(true)));
                    drow.push(json!(v.unwrap_or(have)));
                }
                _ => {
                    row.push(Value::Null);
                    drow.push(Value::Null);
                }
            }
        }
        cong.push(Value::Array(row));
        diffs.push(Value::Array(drow));
    }
    Ok(json!({
        "character": chi.to_json(),
        "branch": spec.branch,
        "k": ks,
        "values": list,
        "congruent_mod_p": cong,
        "difference_valuation": diffs,
    }))
}

fn chis_for_hecke(setup: &Setup, count: usize) -> Result<Vec<CycNumber>, CliError> {
    let given = setup.config.hecke.as_ref().and_then(|h| h.chis.clone());
    let chis = match given {
        Some(list) => list.iter().map(|r| root(r, "hecke.chis")).collect::<Result<Vec<_>, _>>()?,
        None => setup.satake.as_ref().map(|s| s.alphas.clone()).unwrap_or_default(),
    };
    if chis.len() != count {
        return Err(bad("hecke.chis", format!("expected {count} values chi_i(p), got {}", chis.len())).into());
    }
    Ok(chis)
}

/// κ-set, U_p eigenvalues with their telescoping check, and the Klingen
/// eigenvalues for every κ.
pub fn cmd_hecke(setup: &Setup) -> Result<Value, CliError> {
    let h = setup.config.hecke.clone().unwrap_or(crate::config::HeckeSpec { b: Vec::new(), chis: None, kappa_scalar: None });
    let w = WeightTuple::new(setup.config.a.clone(), h.b.clone(), h.kappa_scalar).map_err(|e| bad("hecke", e.to_string()))?;
    let kap = kappa_set(&w).map_err(|e| bad("hecke", e.to_string()))?;
    let chis = chis_for_hecke(setup, kap.len())?;
    let ups = up_eigenvalues(&chis, &w).map_err(compute)?;
    let mut prev = int(0);
    let mut telescopes = true;
    for ((_, e), k) in ups.iter().zip(&kap) {
        telescopes &= &(e - &prev) == k;
        prev = e.clone();
    }
    let mut klingen = Vec::new();
    for &kappa in &setup.config.kappa {
        let pair = setup.pair(kappa)?;
        let v = match klingen_eigenvalues(&chis, &pair, kappa, &w) {
            Ok(vs) => json!(vs.iter().map(|x| x.to_json()).collect::<Vec<_>>()),
            Err(e) => json!({"error": e.to_string()}),
        };
        klingen.push(json!({"kappa": kappa, "eigenvalues": v}));
    }
    Ok(json!({
        "weight": {"a": w.a, "b": w.b, "kappa_scalar": w.kappa_scalar},
        "kappa_set": kap.iter().map(rational_to_string).collect::<Vec<_>>(),
        "up_eigenvalues": ups.iter().map(|(u, e)| json!({"unit": u.to_json(), "p_exponent": rational_to_string(e)})).collect::<Vec<_>>(),
        "telescopes": telescopes,
        "klingen": klingen,
    }))
}

fn ratio_json(v: &RatioValue) -> Value {
    match v {
        RatioValue::Exact(x) => json!({"exact": x.to_json()}),
        RatioValue::Symbolic(s) => json!({"symbolic": s}),
    }
}

/// p-adic constants and their quotient for every κ; with a [pullback]
/// section also the unramified ratios and the auxiliary ℓ scalar.
pub fn cmd_pullback(setup: &Setup) -> Result<Value, CliError> {
    let r = setup.config.r;
    let params = setup.satake.clone().unwrap_or_else(|| SatakeParams::trivial(r));
    let mut by_kappa = Vec::new();
    for &kappa in &setup.config.kappa {
        let pair = setup.pair(kappa)?;
        let entry = (|| -> Result<Value, String> {
            let l = p_constant_lfun(&params, &pair, kappa, r).map_err(|e| e.to_string())?;
            let k = p_constant_klingen(&params, &pair, kappa, r).map_err(|e| e.to_string())?;
            let f = kl_normalization_factor(&pair, kappa, r).map_err(|e| e.to_string())?;
            let q = k.div(&l).map_err(|e| e.to_string())?;
            let ok = q.normalize() == f.normalize();
            Ok(json!({
                "lfun": l.to_json(),
                "klingen": k.to_json(),
                "quotient": q.to_json(),
                "expected_quotient": f.to_json(),
                "quotient_matches": ok,
            }))
        })();
        by_kappa.push(match entry {
            Ok(v) => json!({"kappa": kappa, "constants": v}),
            Err(e) => json!({"kappa": kappa, "error": e}),
        });
    }
    let mut out = json!({"satake": params.alphas.iter().map(|a| a.to_json()).collect::<Vec<_>>(), "by_kappa": by_kappa});
    if let (Some(pb), Some(s)) = (&setup.config.pullback, &setup.s_pullback) {
        let tv = root(&pb.t_v, "pullback.t_v")?;
        let tvb = root(&pb.t_vbar, "pullback.t_vbar")?;
        let ratios: Vec<Value> = pb
            .primes
            .iter()
            .map(|&q| match klingen_ratio_unramified(&params, (&tv, &tvb), q, setup.config.disc, s, setup.variant) {
                Ok(v) => json!({"q": q, "ratio": ratio_json(&v)}),
                Err(e) => json!({"q": q, "error": e.to_string()}),
            })
            .collect();
        let tau_ell = root(&pb.tau_ell, "pullback.tau_ell")?;
        let aux = match aux_ell_scalar(setup.aux.y_norm, setup.aux.ell, &tau_ell, s, r, &setup.aux.vol_y, setup.variant) {
            Ok(v) => v.to_json(),
            Err(e) => json!({"error": e.to_string()}),
        };
        out["s"] = json!(rational_to_string(s));
        out["unramified"] = json!(ratios);
        out["aux_ell"] = aux;
    }
    Ok(out)
}

pub fn cmd_enumerate(setup: &Setup) -> Result<Value, CliError> {
    let n = setup.n();
    let betas = select_betas(setup, n)?;
    let dual = setup.config.dual_scale;
    Ok(json!({
        "n": n,
        "D": setup.config.disc,
        "trace_min": setup.config.trace_min,
        "trace_bound": setup.config.trace_bound,
        "count": betas.len(),
        "betas": betas.iter().map(|b| b.to_json(dual)).collect::<Vec<_>>(),
    }))
}

/// B_0, …, B_n with B_1 = +1/2 by the Akiyama-Tanigawa transform, kept
/// apart from the library's recurrence.
pub fn akiyama_tanigawa(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a.push(rat(1, m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = int(j as i64) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

fn check(name: &str, cases: usize, failures: Vec<String>) -> Value {
    json!({"check": name, "cases": cases, "failures": failures.len(), "status": if failures.is_empty() { "PASS" } else { "FAIL" }, "first_failures": failures.into_iter().take(5).collect::<Vec<_>>()})
}

fn random_beta(rng: &mut StdRng, n: usize, disc: u64) -> HermitianMatrix {
    let diag: Vec<_> = (0..n).map(|_| int(rng.gen_range(-5..6))).collect();
    let upper: Vec<QuadFieldElem> =
        (0..n * (n - 1) / 2).map(|_| QuadFieldElem::new(int(rng.gen_range(-4..5)), int(rng.gen_range(-4..5)), disc)).collect();
    HermitianMatrix::from_upper(disc, &diag, &upper).expect("well-formed")
}

fn random_weight(rng: &mut StdRng, r: usize) -> Vec<i64> {
    let mut a: Vec<i64> = (0..r).map(|_| rng.gen_range(0..4)).collect();
    a.sort_by(|x, y| y.cmp(x));
    a
}

/// Randomized invariant checks driven by the seed; independent of any
/// config.
pub fn cmd_selftest(seed: u64, prec: i64) -> Result<Value, CliError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut fails = Vec::new();
    let mut cases = 0;
    for p in [3u64, 5, 7] {
        let emb = PadicEmbedding::new(p, p - 1, prec, 0).map_err(compute)?;
        for k in 0..(p as i64 - 1) {
            let chi = DirichletChar::teichmuller_power(&emb, k);
            if chi.is_trivial() {
                continue;
            }
            cases += 1;
            let g = gauss_sum(&chi).map_err(compute)?;
            let gb = gauss_sum(&chi.conj()).map_err(compute)?;
            let expect = CycNumber::from_int(chi.parity() * p as i64);
            if g.mul(&gb) != expect {
                fails.push(format!("p={p} omega^{k}"));
            }
        }
    }
    checks.push(check("gauss_sum_norm", cases, fails));

    let mut fails = Vec::new();
    let plus = akiyama_tanigawa(20);
    for (k, b) in plus.iter().enumerate().skip(1) {
        let v = l_at_nonpositive(&DirichletChar::trivial(1), k).map_err(compute)?;
        if v.as_rational().as_ref() != Some(&(-b.clone() / int(k as i64))) {
            fails.push(format!("k={k}"));
        }
    }
    checks.push(check("bernoulli_values", 20, fails));

    let mut fails = Vec::new();
    let trials = 100;
    for t in 0..trials {
        let r = rng.gen_range(1..=3usize);
        let variant = if rng.gen_bool(0.5) { Variant::Klingen } else { Variant::Lfun };
        let disc = [1u64, 2, 3, 7][rng.gen_range(0..4)];
        let beta = random_beta(&mut rng, variant.size(r), disc);
        let (a, b) = (random_weight(&mut rng, r), random_weight(&mut rng, r));
        let sum: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = multiplier(&beta, variant, &a).and_then(|x| multiplier(&beta, variant, &b).map(|y| x.mul(&y)));
        let rhs = multiplier(&beta, variant, &sum);
        if lhs.ok() != rhs.ok() {
            fails.push(format!("trial {t}"));
        }
    }
    checks.push(check("multiplier_additivity", trials, fails));

    let mut fails = Vec::new();
    for t in 0..trials {
        let r = rng.gen_range(0..=3usize);
        let s = rng.gen_range(0..=(4 - r));
        if r + s == 0 {
            continue;
        }
        let a = random_weight(&mut rng, r);
        let b: Vec<i64> = {
            let mut b: Vec<i64> = (0..s).map(|_| rng.gen_range(0..4)).collect();
            b.sort();
            b
        };
        let Ok(w) = WeightTuple::new(a, b, None) else { continue };
        let Ok(kap) = kappa_set(&w) else { continue };
        let chis: Vec<CycNumber> = (0..kap.len()).map(|i| CycNumber::zeta(12, i as i64 + 1)).collect();
        let ups = up_eigenvalues(&chis, &w).map_err(compute)?;
        let mut prev = int(0);
        for ((_, e), k) in ups.iter().zip(&kap) {
            if &(e - &prev) != k {
                fails.push(format!("trial {t}"));
            }
            prev = e.clone();
        }
    }
    checks.push(check("hecke_telescoping", trials, fails));

    let mut fails = Vec::new();
    let p = 5u64;
    let emb = PadicEmbedding::new(p, p - 1, prec, 0).map_err(compute)?;
    let sigma = std::collections::BTreeSet::new();
    let mut cases = 0;
    for _ in 0..20 {
        let k1 = rng.gen_range(2..=16usize);
        let k2 = k1 + 4 * rng.gen_range(1..=3usize);
        if k1 % 4 == 0 {
            continue;
        }
        let chi = DirichletChar::teichmuller_power(&emb, k1 as i64);
        cases += 1;
        let a = kl_specialization_q(&chi, k1, &sigma, &emb).map_err(compute)?;
        let b = kl_specialization_q(&chi, k2, &sigma, &emb).map_err(compute)?;
        if a.sub(&b).valuation().is_some_and(|v| v < 1) {
            fails.push(format!("k={k1},{k2}"));
        }
    }
    checks.push(check("kummer_mod_p", cases, fails));

    let all = checks.iter().all(|c| c["status"] == "PASS");
    Ok(json!({"seed": seed, "checks": checks, "all_pass": all}))
}
