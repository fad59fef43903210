use num_complex::Complex;
use rayon::prelude::*;

use super::periodic::{cell_kernel_eta_points, eval_kernel_points};
use super::{KernelContext, KernelError, KernelMethod};
use crate::confmap::LiftedPoint;
use crate::floquet::SampledFunction;
use crate::numerics::pairwise_sum;

type C64 = Complex<f64>;

/// Window and tail policy of [`project`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions {
    /// Periods `|m| ≤ m_trunc` around the period of `z` are integrated.
    pub m_trunc: usize,
    /// The two outermost periods may contribute at most this fraction of the
    /// result.
    pub tail_tol: f64,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        Self { m_trunc: 16, tail_tol: 1e-10 }
    }
}

/// Projection value with its tail diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    pub value: C64,
    /// Magnitude of the contribution of the two outermost periods.
    pub tail: f64,
    pub periods: usize,
}

/// Bergman projection `(P f)(z) = ∫_Π K_Π(z, w) f(w) dA(w)` by cell-wise
/// quadrature over the periods `|m − [Re z]| ≤ M`. Fails with
/// `TailNotNegligible` when the outermost periods still matter.
pub fn project(
    ctx: &KernelContext,
    f: &SampledFunction,
    method: KernelMethod,
    z: C64,
    opts: &ProjectionOptions,
) -> Result<ProjectionReport, KernelError> {
    let grid = ctx.cell_grid()?;
    let pz = ctx.point(z)?;
    let centre = z.re.floor() as i64;
    let big = opts.m_trunc as i64;
    let per_period: Result<Vec<(i64, C64)>, KernelError> = (centre - big..=centre + big)
        .into_par_iter()
        .map(|m| {
            let mf = m as f64;
            let mut terms = Vec::with_capacity(grid.points.len());
            for (p, &q) in grid.points.iter().zip(&grid.quad.weights) {
                let pw = p.translated(mf);
                let fw = f.eval(pw.z);
                if fw == C64::new(0.0, 0.0) {
                    continue;
                }
                terms.push(eval_kernel_points(ctx, method, &pz, &pw)? * fw * q);
            }
            Ok((m, pairwise_sum(&terms)))
        })
        .collect();
    let per_period = per_period?;
    let values: Vec<C64> = per_period.iter().map(|p| p.1).collect();
    let value = pairwise_sum(&values);
    let tail = per_period
        .iter()
        .filter(|(m, _)| (m - centre).abs() == big)
        .map(|p| p.1.norm())
        .sum::<f64>();
    if tail > opts.tail_tol * value.norm() && tail > 0.0 {
        return Err(KernelError::TailNotNegligible { tail, total: value.norm() });
    }
    Ok(ProjectionReport { value, tail, periods: per_period.len() })
}

/// Cell projection `(P_η f)(z) = ∫_ϖ K_η(z, w) f(w) dA(w)` for `z` in the cell;
/// `f` receives the lifted data of each quadrature node.
pub fn project_cell_eta<F>(ctx: &KernelContext, eta: f64, f: F, z: C64) -> Result<C64, KernelError>
where
    F: Fn(&LiftedPoint) -> Result<C64, KernelError> + Sync,
{
    let grid = ctx.cell_grid()?;
    let pz = ctx.point(z)?;
    let terms: Result<Vec<C64>, KernelError> = grid
        .points
        .par_iter()
        .zip(&grid.quad.weights)
        .map(|(pw, &q)| Ok(cell_kernel_eta_points(ctx, &pz, pw, eta)? * f(pw)? * q))
        .collect();
    Ok(pairwise_sum(&terms?))
}
