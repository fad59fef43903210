use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;

use super::periodic::basis_fn;
use super::{KernelContext, KernelError};
use crate::numerics::gauss_legendre;

type C64 = Complex<f64>;

/// Gram matrix `⟨f_n, f_m⟩` of the annulus basis in the `V`-weighted space,
/// by Gauss rules of 96 nodes in `log r` and 48 in `θ`, with `θ` running over
/// one turn starting at the basis cut so the power stays on one branch.
pub fn gram_matrix(ctx: &KernelContext, eta: f64, ns: &[i64]) -> Result<Vec<Vec<C64>>, KernelError> {
    let l = ctx.log_rho();
    let (s, ws) = gauss_legendre::<f64>(96);
    let (t, wt) = gauss_legendre::<f64>(48);
    let cut = ctx.basis_cut();
    let mut nodes = Vec::with_capacity(s.len() * t.len());
    for (&u, &wu) in s.iter().zip(&ws) {
        let r = (u * l).exp();
        for (&v, &wv) in t.iter().zip(&wt) {
            let zeta = C64::from_polar(r, cut + PI * (v + 1.0));
            // dA = r² d(log r) dθ
            nodes.push((zeta, wu * l * wv * PI * r * r * ctx.weights().big_v(zeta)?));
        }
    }
    let vals: Result<Vec<Vec<C64>>, KernelError> = ns
        .par_iter()
        .map(|&n| nodes.iter().map(|&(z, _)| basis_fn(ctx, n, eta, z)).collect())
        .collect();
    let vals = vals?;
    Ok(vals
        .iter()
        .map(|a| {
            vals.iter()
                .map(|b| a.iter().zip(b).zip(&nodes).map(|((x, y), &(_, w))| x * y.conj() * w).sum())
                .collect()
        })
        .collect())
}

/// `max |G − I|` of a Gram matrix.
pub fn identity_residual(g: &[Vec<C64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}
