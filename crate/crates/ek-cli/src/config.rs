//! Run configuration: TOML parsing, validation and the canonical hash.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use ek_core::characters::{chi_k, DirichletChar, LocalChar, SplitPCharPair};
use ek_core::exact_arith::nt::{is_prime, is_squarefree, lcm, split_p_part};
use ek_core::exact_arith::rational::parse_rational;
use ek_core::exact_arith::{CycNumber, QuadFieldElem, Rational};
use ek_core::interpolation::{wild_char, ArithmeticPoint, PRoot, PointKind};
use ek_core::padic::{PadicEmbedding, PadicError};
use ek_core::pullback::SatakeParams;
use ek_core::siegel_fourier::{AuxData, ChangeOfBasis, Variant};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {msg}")]
    Field { field: String, msg: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("cannot parse {path}: {msg}")]
    Parse { path: String, msg: String },
}

pub fn bad(field: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Field { field: field.into(), msg: msg.into() }
}

/// ζ_N^k, written [N, k].
pub type RootSpec = [i64; 2];

fn default_root() -> RootSpec {
    [1, 0]
}

fn default_one() -> String {
    "1".into()
}

fn default_variant() -> String {
    "klingen".into()
}

fn default_trace() -> u64 {
    2
}

fn default_dual() -> u64 {
    1
}

fn default_prec() -> i64 {
    8
}

fn default_max_betas() -> usize {
    100_000
}

fn default_kronecker() -> i64 {
    1
}

fn default_k() -> i64 {
    1
}

/// A character of Q_p^×: ω^omega · η on units (η the wild character of a
/// p-power root of unity [j, a] = ζ_{p^j}^a) and τ(p) = at_p.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CharSpec {
    pub omega: i64,
    #[serde(default)]
    pub wild: Option<[u64; 2]>,
    #[serde(default = "default_root")]
    pub at_p: RootSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SatakeSpec {
    pub alphas: Vec<RootSpec>,
}

/// χ = ω^omega · (kronecker / ·), values at 1 − k for k_min ≤ k ≤ k_max.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KlSpec {
    #[serde(default)]
    pub omega: i64,
    #[serde(default = "default_kronecker")]
    pub kronecker: i64,
    pub k_min: usize,
    pub k_max: usize,
    #[serde(default)]
    pub branch: KlBranch,
}

/// How the [kl] character moves with k. `kummer` evaluates the branch
/// χω^k at 1 − k, so the Euler factor and Bernoulli number are those of χ
/// itself; `fixed` keeps the branch χ for every k.
#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KlBranch {
    #[default]
    Kummer,
    Fixed,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HeckeSpec {
    #[serde(default)]
    pub b: Vec<i64>,
    /// χ_i(p) for i = 1..r+s; defaults to the Satake parameters.
    #[serde(default)]
    pub chis: Option<Vec<RootSpec>>,
    #[serde(default)]
    pub kappa_scalar: Option<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PullbackSpec {
    #[serde(default)]
    pub primes: Vec<u64>,
    #[serde(default = "default_one")]
    pub s: String,
    #[serde(default = "default_root")]
    pub t_v: RootSpec,
    #[serde(default = "default_root")]
    pub t_vbar: RootSpec,
    #[serde(default = "default_root")]
    pub tau_ell: RootSpec,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "D")]
    pub disc: u64,
    pub p: u64,
    pub r: usize,
    pub ell: u64,
    #[serde(default)]
    pub y_norm: Option<u64>,
    #[serde(default = "default_one")]
    pub vol_y: String,
    #[serde(default = "default_variant")]
    pub variant: String,
    pub a: Vec<i64>,
    pub kappa: Vec<i64>,
    #[serde(default = "default_trace")]
    pub trace_bound: u64,
    #[serde(default)]
    pub trace_min: u64,
    #[serde(default = "default_dual")]
    pub dual_scale: u64,
    #[serde(default = "default_prec")]
    pub prec: i64,
    #[serde(default)]
    pub embedding_choice: usize,
    #[serde(default, rename = "Sigma")]
    pub sigma: Vec<u64>,
    #[serde(default = "default_max_betas")]
    pub max_betas: usize,
    #[serde(default)]
    pub output: Option<String>,
    pub tau1: CharSpec,
    pub tau2: CharSpec,
    #[serde(default)]
    pub satake: Option<SatakeSpec>,
    #[serde(default)]
    pub kl: Option<KlSpec>,
    #[serde(default)]
    pub hecke: Option<HeckeSpec>,
    #[serde(default)]
    pub pullback: Option<PullbackSpec>,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.into(), msg: e.message().to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&read(path)?, &path.display().to_string())
    }

    /// Canonical JSON (sorted keys) of everything that affects results.
    pub fn canonical(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.output = None;
        serde_json::to_value(&c).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        hash_value(&self.canonical())
    }
}

pub fn hash_value(v: &serde_json::Value) -> String {
    hex::encode(Sha256::digest(v.to_string().as_bytes()))
}

pub fn root(spec: &RootSpec, field: &str) -> Result<CycNumber, ConfigError> {
    if spec[0] < 1 {
        return Err(bad(field, format!("root of unity [N, k] needs N >= 1, got N = {}", spec[0])));
    }
    Ok(CycNumber::zeta(spec[0] as u64, spec[1]))
}

fn root_level(spec: &RootSpec) -> u64 {
    spec[0].max(1) as u64
}

/// The validated configuration with the embedding and characters built.
#[derive(Clone, Debug)]
pub struct Setup {
    pub config: RunConfig,
    pub variant: Variant,
    pub sigma: BTreeSet<u64>,
    pub aux: AuxData,
    pub emb: Arc<PadicEmbedding>,
    pub tau1: LocalChar,
    pub tau2: LocalChar,
    pub satake: Option<SatakeParams>,
    pub kl_char: Option<DirichletChar>,
    pub s_pullback: Option<Rational>,
}

impl Setup {
    pub fn new(config: RunConfig) -> Result<Self, ConfigError> {
        let c = &config;
        let p = c.p;
        if p < 3 || !is_prime(p) {
            return Err(bad("p", format!("must be an odd prime, got {p}")));
        }
        if c.disc == 0 || !is_squarefree(c.disc) {
            return Err(bad("D", format!("must be a positive squarefree integer, got {}", c.disc)));
        }
        if chi_k(c.disc, p) != 1 {
            return Err(bad("p", format!("{p} does not split in Q(sqrt(-{}))", c.disc)));
        }
        if c.r == 0 {
            return Err(bad("r", "must be positive"));
        }
        let sigma: BTreeSet<u64> = c.sigma.iter().copied().collect();
        if let Some(q) = sigma.iter().find(|&&q| !is_prime(q)) {
            return Err(bad("Sigma", format!("{q} is not a prime")));
        }
        let ell = c.ell;
        if !is_prime(ell) || ell == p {
            return Err(bad("ell", format!("must be a prime different from p, got {ell}")));
        }
        if chi_k(c.disc, ell) == 0 {
            return Err(bad("ell", format!("{ell} ramifies in Q(sqrt(-{}))", c.disc)));
        }
        if sigma.contains(&ell) {
            return Err(bad("ell", format!("{ell} must not be in Sigma")));
        }
        if c.a.len() != c.r {
            return Err(bad("a", format!("expected {} entries, got {}", c.r, c.a.len())));
        }
        if c.a.windows(2).any(|w| w[0] < w[1]) || c.a.iter().any(|&x| x < 0) {
            return Err(bad("a", "must be nonincreasing with nonnegative entries"));
        }
        if let Some(k) = c.kappa.iter().find(|&&k| k <= c.r as i64 + 1) {
            return Err(bad("kappa", format!("every kappa must exceed r + 1 = {}, got {k}", c.r + 1)));
        }
        let variant = Variant::parse(&c.variant).ok_or_else(|| bad("variant", format!("expected klingen or lfun, got {:?}", c.variant)))?;
        if c.prec < 1 {
            return Err(bad("prec", "must be positive"));
        }
        if c.dual_scale == 0 {
            return Err(bad("dual_scale", "must be positive"));
        }
        let y_norm = c.y_norm.unwrap_or(ell);
        if y_norm == 0 {
            return Err(bad("y_norm", "must be positive"));
        }
        let vol_y = parse_rational(&c.vol_y).filter(|v| *v != Rational::from_integer(0.into()));
        let vol_y = vol_y.ok_or_else(|| bad("vol_y", format!("expected a nonzero rational, got {:?}", c.vol_y)))?;
        for (name, t) in [("tau1", &c.tau1), ("tau2", &c.tau2)] {
            root(&t.at_p, &format!("{name}.at_p"))?;
            if let Some([j, _]) = t.wild {
                if j > 4 {
                    return Err(bad(&format!("{name}.wild"), "p-power order at most p^4 is supported"));
                }
            }
        }

        let (_, ell_unit) = split_p_part(y_norm, ell);
        let mut level = lcm(QuadFieldElem::cyclotomic_level(c.disc), p - 1);
        level = lcm(level, y_norm / ell_unit);
        for r in [&c.tau1.at_p, &c.tau2.at_p] {
            level = lcm(level, root_level(r));
        }
        if let Some(s) = &c.satake {
            for (i, a) in s.alphas.iter().enumerate() {
                root(a, &format!("satake.alphas[{i}]"))?;
                level = lcm(level, root_level(a));
            }
        }
        if let Some(k) = &c.kl {
            if k.kronecker == 0 {
                return Err(bad("kl.kronecker", "must be a nonzero discriminant"));
            }
            level = lcm(level, k.kronecker.unsigned_abs());
        }
        if let Some(pb) = &c.pullback {
            for (name, r) in [("t_v", &pb.t_v), ("t_vbar", &pb.t_vbar), ("tau_ell", &pb.tau_ell)] {
                root(r, &format!("pullback.{name}"))?;
                level = lcm(level, root_level(r));
            }
        }
        let emb = PadicEmbedding::new(p, level, c.prec, c.embedding_choice).map_err(|e| match e {
            PadicError::BadChoice { .. } => bad("embedding_choice", e.to_string()),
            other => bad("prec", other.to_string()),
        })?;
        let emb = Arc::new(emb);
        let local = |t: &CharSpec, name: &str| -> Result<LocalChar, ConfigError> {
            let mut unit = DirichletChar::teichmuller_power(&emb, t.omega);
            if let Some([j, a]) = t.wild {
                let eta = wild_char(p, PRoot::new(p, j as u32, a)).map_err(|e| bad(&format!("{name}.wild"), e.to_string()))?;
                unit = unit.mul(&eta).primitive();
            }
            LocalChar::with_root(p, unit, root(&t.at_p, &format!("{name}.at_p"))?).map_err(|e| bad(name, e.to_string()))
        };
        let tau1 = local(&c.tau1, "tau1")?;
        let tau2 = local(&c.tau2, "tau2")?;

        let satake = match &c.satake {
            None => None,
            Some(s) => {
                if s.alphas.len() != c.r {
                    return Err(bad("satake.alphas", format!("expected {} entries, got {}", c.r, s.alphas.len())));
                }
                let alphas = s.alphas.iter().map(|a| root(a, "satake.alphas")).collect::<Result<Vec<_>, _>>()?;
                Some(SatakeParams::new(alphas).map_err(|e| bad("satake.alphas", e.to_string()))?)
            }
        };
        let kl_char = match &c.kl {
            None => None,
            Some(k) => {
                if k.k_min == 0 || k.k_min > k.k_max {
                    return Err(bad("kl.k_min", format!("need 1 <= k_min <= k_max, got {}..{}", k.k_min, k.k_max)));
                }
                let chi = DirichletChar::teichmuller_power(&emb, k.omega).mul(&DirichletChar::kronecker_char(k.kronecker));
                Some(chi.primitive())
            }
        };
        let s_pullback = match &c.pullback {
            None => None,
            Some(pb) => {
                if let Some(q) = pb.primes.iter().find(|&&q| !is_prime(q)) {
                    return Err(bad("pullback.primes", format!("{q} is not a prime")));
                }
                Some(parse_rational(&pb.s).ok_or_else(|| bad("pullback.s", format!("expected a rational, got {:?}", pb.s)))?)
            }
        };
        let aux = AuxData { ell, y_norm, vol_y, change: ChangeOfBasis::identity() };
        Ok(Setup { variant, sigma, aux, emb, tau1, tau2, satake, kl_char, s_pullback, config })
    }

    pub fn pair(&self, kappa: i64) -> Result<SplitPCharPair, ConfigError> {
        SplitPCharPair::new(self.tau1.clone(), self.tau2.clone(), kappa).map_err(|e| bad("tau1", e.to_string()))
    }

    /// Size of the Siegel variable β.
    pub fn n(&self) -> usize {
        self.variant.size(self.config.r)
    }
}

fn default_kind() -> String {
    "X".into()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub kappa: i64,
    #[serde(default)]
    pub m: u64,
    /// ζ_{p^j}^a as [j, a].
    #[serde(default)]
    pub zeta1: [u64; 2],
    #[serde(default)]
    pub zeta2: [u64; 2],
    #[serde(default = "default_kind")]
    pub kind: String,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub a: usize,
    pub b: usize,
    #[serde(default = "default_k")]
    pub k: i64,
}

/// Arithmetic points for `family`, with optional congruence pairs (all
/// pairs at k = 1 when none are given).
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    #[serde(default)]
    pub point: Vec<PointSpec>,
    #[serde(default)]
    pub pair: Vec<PairSpec>,
}

impl PointsFile {
    pub fn from_toml(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: origin.into(), msg: e.message().to_string() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_toml(&read(path)?, &path.display().to_string())
    }

    pub fn points(&self, p: u64) -> Result<Vec<ArithmeticPoint>, ConfigError> {
        self.point
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let kind = match s.kind.as_str() {
                    "X" | "x" => PointKind::X,
                    "Xpb" | "xpb" => PointKind::Xpb,
                    other => return Err(bad(&format!("point[{i}].kind"), format!("expected X or Xpb, got {other:?}"))),
                };
                Ok(ArithmeticPoint {
                    kappa: s.kappa,
                    m: s.m,
                    zeta1: PRoot::new(p, s.zeta1[0] as u32, s.zeta1[1]),
                    zeta2: PRoot::new(p, s.zeta2[0] as u32, s.zeta2[1]),
                    kind,
                })
            })
            .collect()
    }

    pub fn pairs(&self) -> Result<Vec<(usize, usize, i64)>, ConfigError> {
        let n = self.point.len();
        if self.pair.is_empty() {
            return Ok((0..n).flat_map(|a| ((a + 1)..n).map(move |b| (a, b, 1))).collect());
        }
        self.pair
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if s.a >= n || s.b >= n {
                    return Err(bad(&format!("pair[{i}]"), format!("point index out of range (have {n} points)")));
                }
                if s.k < 1 {
                    return Err(bad(&format!("pair[{i}].k"), "must be positive"));
                }
                Ok((s.a, s.b, s.k))
            })
            .collect()
    }
}
