//! The Floquet transform of functions on the periodic domain,
//!
//! ```text
//! (F f)(z, η) = (2π)^{−1/2} Σ_m e^{−iηm} f(z + m),           z ∈ ϖ, η ∈ [−π, π],
//! (F⁻¹ g)(z) = (2π)^{−1/2} ∫_{−π}^{π} e^{i[Re z]η} g(z − [Re z], η) dη,
//! ```
//!
//! its Gaussian mollifier `e^{−εz²}`, and numerical checks of the isometry,
//! the round trip and the quasiperiodic boundary condition
//! `g(1 + iy, η) = e^{iη} g(iy, η)`.
//!
//! Sums over periods are truncated at `|m| ≤ M`, either sharply or with a
//! smooth taper that equals one for `|m| ≤ M/2`. On a uniform grid of `N`
//! quasimomenta the transform is a length-`N` DFT of the period samples
//! folded modulo `N`, computed with an FFT.

mod demo;
mod field;
mod transform;

pub use demo::{divergence_demo, DivergenceRow, DivergenceTable};
pub use field::{FieldGrid, FloquetField, FIELD_CSV_COLUMNS};
pub use transform::{
    check_quasiperiodicity, choose_truncation, floquet_forward, floquet_inverse, floquet_inverse_refined,
    floquet_value, isometry_check, transform_inner_product, FloquetTransform, ForwardOptions, IsometryReport,
    MollifierEps, QuasimomentumFunction, QuasiperiodicityReport, SampledFunction, Truncation,
    DEFAULT_MOLLIFIER_EPS,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FloquetError {
    #[error("truncation must be at least 1, got {0}")]
    InvalidTruncation(usize),
    #[error("mollifier ε = {0} outside (0, 1]")]
    InvalidMollifier(f64),
    #[error("TruncationWarning: outermost shell carries {shell:.3e} of the running norm (tolerance {tol:.3e})")]
    TruncationWarning { shell: f64, tol: f64 },
    #[error("GridTooCoarse: quadrature self-estimate {estimate:.3e} above tolerance {tol:.3e}")]
    GridTooCoarse { estimate: f64, tol: f64 },
    #[error("non-finite field value at point {point}, quasimomentum index {eta}")]
    NonFinite { point: usize, eta: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field has no data at {0}")]
    PointNotOnGrid(String),
}
