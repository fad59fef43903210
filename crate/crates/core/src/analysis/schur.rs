use num_complex::Complex;
use rayon::prelude::*;

use super::{AnalysisError, WeightSpec};
use crate::kernels::{eval_kernel_points, KernelContext, KernelMethod};
use crate::numerics::pairwise_sum;

type C64 = Complex<f64>;

/// Weighted Schur row integrals of `|K_Π|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurReport {
    /// `sup_z ∫ |K_Π(z,w)| W(Re z)/W(Re w) dA(w)` over `|m − [Re z]| ≤ window`.
    pub sup_row: f64,
    /// The same with the window doubled.
    pub sup_row_doubled: f64,
    /// `(sup_row_doubled − sup_row)/sup_row`.
    pub stability: f64,
    pub worst_probe: C64,
    pub window: usize,
    /// Largest per-period contribution (over probes) by distance `|m|`.
    pub per_period: Vec<f64>,
}

/// Twenty probes spanning one period: ten abscissae `x = 0.05, 0.15, …, 0.95`,
/// each at one tenth of the vertical extent of the cell from its top and its
/// bottom.
pub fn schur_probes(ctx: &KernelContext) -> Vec<C64> {
    let region = ctx.region();
    let m = region.spec().height_bound;
    let mut out = Vec::with_capacity(20);
    for k in 0..10 {
        let x = 0.05 + 0.1 * k as f64;
        let steps = 2000;
        let inside: Vec<f64> = (0..=steps)
            .map(|j| -m + 2.0 * m * j as f64 / steps as f64)
            .filter(|&y| region.contains(C64::new(x, y)))
            .collect();
        if let (Some(&lo), Some(&hi)) = (inside.first(), inside.last()) {
            let h = hi - lo;
            out.push(C64::new(x, hi - 0.1 * h));
            out.push(C64::new(x, lo + 0.1 * h));
        }
    }
    out
}

/// Schur test for the projection on `L²` with weight `W(Re z)`: the
/// numerical supremum over `probes` of the weighted row integral, and its
/// relative change when the window of periods is doubled. Fails with
/// `NotSummable` when the outermost periods contribute no less than the
/// periods halfway out.
pub fn schur_bound(
    ctx: &KernelContext,
    weight: &WeightSpec,
    window: usize,
    probes: &[C64],
    method: KernelMethod,
) -> Result<SchurReport, AnalysisError> {
    if window < 2 || probes.is_empty() {
        return Err(AnalysisError::InvalidParameter("need window ≥ 2 and probes".into()));
    }
    let quad = ctx.cell_quadrature()?;
    let nodes = ctx.points(&quad.points)?;
    let big = 2 * window as i64;
    let rows: Result<Vec<Vec<f64>>, AnalysisError> = probes
        .par_iter()
        .map(|&z| {
            let pz = ctx.point(z)?;
            let centre = z.re.floor() as i64;
            let lwz = weight.log_w(z.re);
            (-big..=big)
                .map(|d| {
                    let m = (centre + d) as f64;
                    let terms: Result<Vec<f64>, AnalysisError> = nodes
                        .iter()
                        .zip(&quad.weights)
                        .map(|(p, &q)| {
                            let pw = p.translated(m);
                            let k = eval_kernel_points(ctx, method, &pz, &pw)?;
                            Ok(k.norm() * (lwz - weight.log_w(pw.z.re)).exp() * q)
                        })
                        .collect();
                    Ok(pairwise_sum(&terms?))
                })
                .collect()
        })
        .collect();
    let rows = rows?;
    let w = window as i64;
    let partial = |row: &[f64], lim: i64| -> f64 {
        let terms: Vec<f64> = (-big..=big).zip(row).filter(|(d, _)| d.abs() <= lim).map(|(_, &v)| v).collect();
        pairwise_sum(&terms)
    };
    let mut sup = (0.0f64, 0.0f64, probes[0]);
    for (row, &z) in rows.iter().zip(probes) {
        let (a, b) = (partial(row, w), partial(row, big));
        if a > sup.0 {
            sup = (a, b, z);
        }
    }
    let per_period: Vec<f64> = (0..=big)
        .map(|d| {
            rows.iter()
                .map(|row| row[(big + d) as usize].max(row[(big - d) as usize]))
                .fold(0.0, f64::max)
        })
        .collect();
    let (outer, inner) = (per_period[big as usize], per_period[w as usize]);
    if !(outer < inner) && inner > 0.0 {
        return Err(AnalysisError::NotSummable { outer, inner });
    }
    Ok(SchurReport {
        sup_row: sup.0,
        sup_row_doubled: sup.1,
        stability: (sup.1 - sup.0) / sup.0,
        worst_probe: sup.2,
        window,
        per_period,
    })
}
