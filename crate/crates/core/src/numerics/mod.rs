//! Shared numerical substrate: Gauss rules, adaptive interval and line
//! quadrature, cell quadrature, periodic trapezoid sums, a Levenberg–Marquardt
//! least-squares solver and complex special-function helpers.

mod adaptive;
mod gauss;
mod nlls;
mod rules;
pub mod special;

pub use adaptive::{
    integrate_interval, integrate_line_adaptive, AdaptiveOptions, CutoffPolicy, Estimate,
};
pub use gauss::{gauss_jacobi, gauss_legendre, GaussRule};
pub use nlls::{nlls_solve, NllsError, NllsReport, SolverBudget, StopReason};
pub use rules::{integrate_cell, periodic_trapezoid, CellQuadrature, QuadratureKind, QuadratureRule};

use thiserror::Error;

/// Failures of the quadrature layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("integrand shows no decay within {panels} panels")]
    NoDecayDetected { panels: usize },
    #[error("error estimate {estimate:.3e} above tolerance {tol:.3e}")]
    EstimateAboveTolerance { estimate: f64, tol: f64 },
    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),
}

/// Sums a slice with pairwise (cascade) summation so reductions are
/// reproducible and accurate regardless of how the terms were produced.
pub fn pairwise_sum<T>(terms: &[T]) -> T
where
    T: Copy + std::ops::Add<Output = T> + num_traits::Zero,
{
    match terms.len() {
        0 => T::zero(),
        1 => terms[0],
        n if n <= 8 => terms.iter().fold(T::zero(), |acc, &t| acc + t),
        n => {
            let (lo, hi) = terms.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
