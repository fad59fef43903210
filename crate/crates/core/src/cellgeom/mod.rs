//! Period cell geometry: the polygonal cell `ϖ`, its quadrature-ready region,
//! the exponential map `E(z) = e^{i2πz}` and its branch-aware inverse, and the
//! sector assumption on the image of the positive real axis.

mod branch;
mod region;
mod sector;
mod spec;

pub use branch::{exp_map, log_branch, BranchTag, HalfCell};
pub use region::{build_cell, CellElement, CellRegion};
pub use sector::{check_sector_assumption, SectorReport};
pub use spec::PeriodicCellSpec;

use thiserror::Error;

/// Absolute tolerance for geometric identity checks.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CellError {
    #[error("InvalidCell: {0}")]
    InvalidCell(String),
    #[error("BranchViolation: {0}")]
    BranchViolation(String),
    #[error("InvalidDelta: δ = {0} must lie in (0, 1)")]
    InvalidDelta(f64),
    #[error("cell spec parse error: {0}")]
    Parse(String),
    #[error("cell spec I/O error: {0}")]
    Io(String),
}
