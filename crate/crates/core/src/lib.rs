//! Bergman kernels and Bergman projections on planar domains that are
//! periodic in one direction.
//!
//! A periodic domain `Π` is the union of the integer translates of a bounded
//! cell `ϖ ⊂ (0,1) × (-M, M)`. The exponential `E(z) = e^{i2πz}` folds the cell
//! onto a doubly connected region `D`, which is mapped conformally onto an
//! annulus `{1/ρ < |z| < ρ}`. From that map the crate builds
//!
//! * the lifted map of `Π` onto a horizontal strip ([`confmap::LiftedMap`]),
//! * the closed sech² kernel of `Π` ([`kernels::periodic_kernel_closed`]),
//! * the quasimomentum cell kernels `K_η` and their Floquet assembly
//!   ([`kernels::cell_kernel_eta`], [`kernels::assemble_periodic_from_eta`]),
//! * the Floquet transform and its inverse ([`floquet`]),
//! * decay and weighted Schur-test studies ([`analysis`]).
//!
//! Polygonal cells are mapped with an annulus Schwarz–Christoffel solver
//! ([`confmap::solve_sc_parameters`]); straight channels use a built-in map.
//!
//! The closed-form layer (special functions, elementary kernels, Gauss nodes,
//! the exponential map and its branch-aware inverse) is generic over the
//! floating point type through [`Real`]. Map solving and everything built on
//! it runs in `f64`.

pub mod analysis;
pub mod cellgeom;
pub mod confmap;
pub mod floquet;
pub mod kernels;
pub mod numerics;
mod scalar;

pub use num_complex::Complex;
pub use scalar::Real;

/// Double precision complex number, the working type of the map solvers.
pub type C64 = Complex<f64>;
/// Single precision complex number for the generic closed-form layer.
pub type C32 = Complex<f32>;

pub use cellgeom::{BranchTag, CellError, CellRegion, HalfCell, PeriodicCellSpec};
pub use confmap::{AnnulusMap, LiftedMap, LiftedPoint, MapError, ScParams, WeightEvaluators};
pub use kernels::{KernelContext, KernelError, KernelMethod, SeriesControl};

