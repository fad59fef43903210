//! Quantitative studies built on the kernels: exponential decay of `K_Π`
//! along the period direction, boundary behaviour of the lifted map's
//! derivative, weights depending on the real part only, and a weighted Schur
//! test for the boundedness of the Bergman projection.

mod decay;
mod phiprime;
mod schur;
mod weight;

pub use decay::{decay_profile, write_decay_csv, DecayFit};
pub use phiprime::{phi_prime_bounds, CollarLevel, PhiPrimeReport, COLLAR_LEVELS};
pub use schur::{schur_bound, schur_probes, SchurReport};
pub use weight::{weight_check, WeightProfile, WeightReport, WeightSpec};

use thiserror::Error;

use crate::kernels::KernelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("NotAWeight: no constant below {cap:.1e} at x = {x}, n = {n}")]
    NotAWeight { x: f64, n: i64, cap: f64 },
    #[error("UnderflowBeyondN: kernel peaks underflow from n = {n}; too few points left to fit")]
    UnderflowBeyondN { n: i64 },
    #[error("NotSummable: per-period contributions do not decrease ({outer:.3e} at the window edge vs {inner:.3e} halfway)")]
    NotSummable { outer: f64, inner: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0}")]
    Kernel(#[from] KernelError),
}
