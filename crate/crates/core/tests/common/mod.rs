#![allow(dead_code)]

use periodic_bergman::kernels::gram_matrix;
use periodic_bergman::{KernelContext, PeriodicCellSpec, C64};

/// Mirror-symmetric zigzag cell: one reflex and one right-angle vertex per
/// polyline, area 3/2.
pub fn zigzag() -> PeriodicCellSpec {
    PeriodicCellSpec {
        lower: vec![C64::new(1.0, -0.5), C64::new(0.5, -1.0), C64::new(0.0, -0.5)],
        upper: vec![C64::new(1.0, 0.5), C64::new(0.5, 1.0), C64::new(0.0, 0.5)],
        beta_lower: vec![0.5, -0.5],
        beta_upper: vec![0.5, -0.5],
        junction: (-0.5, 0.5),
        height_bound: 1.0,
    }
}

/// Shallow zigzag whose angles stay close to π (all |β| = 0.1).
pub fn gentle_zigzag() -> PeriodicCellSpec {
    let t = (0.1 * std::f64::consts::PI / 2.0).tan() * 0.5;
    PeriodicCellSpec {
        lower: vec![C64::new(1.0, -0.5), C64::new(0.5, -0.5 - t), C64::new(0.0, -0.5)],
        upper: vec![C64::new(1.0, 0.5), C64::new(0.5, 0.5 + t), C64::new(0.0, 0.5)],
        beta_lower: vec![0.1, -0.1],
        beta_upper: vec![0.1, -0.1],
        junction: (-0.5, 0.5),
        height_bound: 1.0,
    }
}

/// Gram matrix of the annulus basis.
pub fn gram(ctx: &KernelContext, eta: f64, ns: &[i64]) -> Vec<Vec<C64>> {
    gram_matrix(ctx, eta, ns).unwrap()
}

/// `max |G − I|` of a Gram matrix.
pub fn identity_residual(g: &[Vec<C64>]) -> f64 {
    periodic_bergman::kernels::identity_residual(g)
}
