//! Exact and p-adic computations for Siegel Eisenstein series on unitary
//! groups, their pullbacks, and the Kubota-Leopoldt values they interpolate.

pub mod exact_arith;
pub mod bernoulli_kl;
pub mod characters;
pub mod padic;
pub mod siegel_fourier;
pub mod hecke;
pub mod qexp_diff;
pub mod pullback;
pub mod interpolation;
