//! Conformal maps of the exponential image `D = E(ϖ)` onto the annulus
//! `A = {1/ρ < |z| < ρ}`, the lifted map of the periodic domain onto a strip,
//! and the weight functions that transport inner products between them.
//!
//! Straight channels use a closed-form map. Polygonal cells use an annulus
//! Schwarz–Christoffel integral: with the annulus rescaled to `{q < |ζ| < 1}`,
//! `q = ρ⁻²`, the function
//!
//! ```text
//! f(ζ) = base + A ∫₁^ζ Π_k P(ζ/a_k)^{β_k} Π_k P(b_k/ζ)^{β_k} dζ/ζ,
//! P(u) = (1 − u) Π_{j≥1} (1 − q^{2j} u)(1 − q^{2j}/u),
//! ```
//!
//! maps the annulus onto one period of the channel (the `dζ/ζ` factor
//! unwraps the annulus), so `φ = ρ · f⁻¹ ∘ E⁻¹` up to rotation.

mod annulus;
mod archive;
mod lifted;
mod sc;
mod weights;

pub use annulus::{builtin_strip_map, AnnulusMap, CellImage, MapKind, Provenance};
pub use archive::MapArchive;
pub use lifted::{lift, LiftedMap, LiftedPoint, SECTOR_DELTA};
pub use sc::{
    k_trunc_for, sc_channel_map, sc_product_p, solve_sc_parameters, solve_sc_parameters_with, ScMap, ScParams,
    ScSolveReport,
};
pub use weights::{weight_evaluators, WeightEvaluators};

use thiserror::Error;

use crate::cellgeom::CellError;
use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("NonConvergentRatio: product ratio q = {0} must lie in (0, 1)")]
    NonConvergentRatio(f64),
    #[error("PathThroughPrevertex: {0}")]
    PathThroughPrevertex(String),
    #[error("QuadratureFailure: {0}")]
    QuadratureFailure(String),
    #[error("NoConvergence: best vertex residual {residual:.3e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("DegenerateInitialization: {0}")]
    DegenerateInitialization(String),
    #[error("SectorAssumptionFailed: margin {margin:.3e} after rotation")]
    SectorAssumptionFailed { margin: f64 },
    #[error("inversion failed at z = {0}")]
    InversionFailed(String),
    #[error("point outside the map domain: {0}")]
    OutOfDomain(String),
    #[error("{0}")]
    Cell(#[from] CellError),
    #[error("map archive error: {0}")]
    Archive(String),
}

impl From<NumericsError> for MapError {
    fn from(e: NumericsError) -> Self {
        MapError::QuadratureFailure(e.to_string())
    }
}
