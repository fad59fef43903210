//! Bergman kernels: the elementary half-plane and strip kernels, the
//! conformal transformation rule, the closed sech² kernel of the periodic
//! domain, the orthonormal annulus basis and the quasimomentum cell kernels
//! `K_η`, and the Floquet assembly of `K_Π` from them.
//!
//! With `L = log ρ`, `Δ = φ(z) − conj φ(w)` (lifted map) and
//! `K̃(z,w) = 4π² e^{i2π(z−w̄)} φ′(E z) conj φ′(E w)`:
//!
//! ```text
//! K_Π(z,w) = K̃(z,w) e^{−i2πΔ} (π / 16L²) sech²(π²Δ / 2L)
//! K_η(z,w) = K̃(z,w) Σ_n c(2n + η/π) e^{i(2π(n−1)+η)Δ},   c(x) = x / (2π(ρ^x − ρ^{−x}))
//! K_Π(z,w) = (2π)⁻¹ ∫_{−π}^{π} e^{iη(p−q)} K_η(z−p, w−q) dη,   p = [Re z], q = [Re w]
//! K_Π(z,w) = K̃(z,w) e^{−i2πΔ} π⁻¹ ∫_ℝ s e^{i2πsΔ} / (ρ^{2s} − ρ^{−2s}) ds
//! ```
//!
//! The last three are evaluated independently and checked against each other.

mod context;
mod elementary;
mod export;
mod gram;
mod periodic;
mod project;

pub use context::{EtaRule, KernelContext, KernelMethod, SeriesControl};
pub use elementary::{
    halfplane_kernel, norm_const, pullback_kernel, pullback_kernel_weighted, sech_fourier_identity, sech_fourier_rhs,
    strip_kernel_sigma,
};
pub use export::{kernel_grid, write_kernel_csv, KernelRow, KERNEL_CSV_COLUMNS};
pub use gram::{gram_matrix, identity_residual};
pub use periodic::{
    assemble_periodic_from_eta, basis_fn, basis_pullback, cell_kernel_eta, cell_kernel_eta_points,
    cell_series, eval_kernel, eval_kernel_points, periodic_kernel_closed, periodic_kernel_closed_points,
    periodic_kernel_t_integral, SeriesReport,
};
pub use project::{project, project_cell_eta, ProjectionOptions, ProjectionReport};

use thiserror::Error;

use crate::cellgeom::CellError;
use crate::confmap::MapError;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("OutOfDomain: {0}")]
    OutOfDomain(String),
    #[error("DerivativeUnavailable: {0}")]
    DerivativeUnavailable(String),
    #[error("MapEvaluationFailure: {0}")]
    MapEvaluationFailure(#[from] MapError),
    #[error("SeriesNotConverged: window [{n_lo}, {n_hi}] exhausted (tail ratio {ratio:.3e})")]
    SeriesNotConverged { n_lo: i64, n_hi: i64, ratio: f64 },
    #[error("QuadratureFailure: {0}")]
    QuadratureFailure(String),
    #[error("BranchViolation: {0}")]
    BranchViolation(String),
    #[error("TailNotNegligible: outermost periods contribute {tail:.3e} of {total:.3e}")]
    TailNotNegligible { tail: f64, total: f64 },
    #[error("invalid modulus ρ = {0}, need ρ > 1")]
    InvalidModulus(f64),
    #[error("{0}")]
    Cell(#[from] CellError),
}

impl From<NumericsError> for KernelError {
    fn from(e: NumericsError) -> Self {
        KernelError::QuadratureFailure(e.to_string())
    }
}
