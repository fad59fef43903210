use num_complex::Complex;
use rayon::prelude::*;

use crate::confmap::MapKind;
use crate::kernels::KernelContext;

type C64 = Complex<f64>;

/// Distances of the collar probes from `∂D`, shrinking by halves.
pub const COLLAR_LEVELS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Fitted blow-up exponent above which a monotone increase is flagged.
const BLOWUP_EXPONENT: f64 = 0.15;

/// Extrema of `|φ′|` over probes at one distance from the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarLevel {
    pub distance: f64,
    pub inf: f64,
    pub sup: f64,
    pub probes: usize,
}

/// Sampled bounds of `|φ′|` near `∂D` and their trend as the collar shrinks.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPrimeReport {
    pub inf: f64,
    pub sup: f64,
    pub levels: Vec<CollarLevel>,
    /// Exponent `p` of a fit `sup ≈ C d^{−p}` over the collar levels.
    pub blowup_exponent: f64,
    /// `sup` increases monotonically as the collar shrinks, with `p` above
    /// a noise threshold: `|φ′|` is unbounded near some boundary point.
    pub blows_up: bool,
    /// Same for `1/inf`: `|φ′|` tends to zero somewhere on the boundary.
    pub vanishes: bool,
}

/// Probes at distance `d` inside the domain: points offset along the inward
/// normal of every boundary edge, and along the interior bisector of every
/// vertex, over the period cell and its two neighbours.
fn collar_probes(ctx: &KernelContext, d: f64) -> Vec<C64> {
    let region = ctx.region();
    let spec = region.spec();
    let inside = |z: C64| region.contains(z - z.re.floor());
    let inward = |base: C64, dir: C64| {
        let step = 1e-3;
        if inside(base + dir * step) {
            Some(dir)
        } else if inside(base - dir * step) {
            Some(-dir)
        } else {
            None
        }
    };
    let mut out = Vec::new();
    for line in [&spec.lower, &spec.upper] {
        let pts: Vec<C64> = (-1..=1).flat_map(|m| line.iter().map(move |&p| p + m as f64)).collect();
        let mut verts: Vec<C64> = Vec::with_capacity(pts.len());
        for p in pts {
            if verts.last().is_none_or(|&q: &C64| (q - p).norm() > 1e-12) {
                verts.push(p);
            }
        }
        verts.sort_by(|a, b| a.re.total_cmp(&b.re));
        verts.dedup_by(|a, b| (*a - *b).norm() < 1e-12);
        for w in verts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let t = (q - p) / (q - p).norm();
            for k in 0..16 {
                let base = p + (q - p) * ((k as f64 + 0.5) / 16.0);
                if let Some(n) = inward(base, C64::i() * t) {
                    out.push(base + n * d);
                }
            }
        }
        for w in verts.windows(3) {
            let (a, v, b) = (w[0], w[1], w[2]);
            let u1 = (a - v) / (a - v).norm();
            let u2 = (b - v) / (b - v).norm();
            let s = u1 + u2;
            let dir = if s.norm() < 1e-9 { C64::i() * u2 } else { s / s.norm() };
            if let Some(n) = inward(v, dir) {
                out.push(v + n * d);
            }
        }
    }
    out.retain(|z| (-0.5..1.5).contains(&z.re) && inside(*z));
    out
}

/// Samples `|φ′|` on shrinking collars toward `∂D` and fits the trend of the
/// supremum. Probes where the map cannot be evaluated are skipped. The strip
/// map has `φ′ ≡ 1` and returns `(1, 1)` without sampling.
pub fn phi_prime_bounds(ctx: &KernelContext) -> PhiPrimeReport {
    if matches!(ctx.annulus_map().kind(), MapKind::Strip { .. }) {
        let levels = COLLAR_LEVELS
            .iter()
            .map(|&distance| CollarLevel { distance, inf: 1.0, sup: 1.0, probes: 0 })
            .collect();
        return PhiPrimeReport { inf: 1.0, sup: 1.0, levels, blowup_exponent: 0.0, blows_up: false, vanishes: false };
    }
    let levels: Vec<CollarLevel> = COLLAR_LEVELS
        .iter()
        .map(|&distance| {
            let probes = collar_probes(ctx, distance);
            let mags: Vec<f64> =
                probes.par_iter().filter_map(|&z| ctx.point(z).ok()).map(|p| p.derivative.norm()).collect();
            CollarLevel {
                distance,
                inf: mags.iter().copied().fold(f64::INFINITY, f64::min),
                sup: mags.iter().copied().fold(0.0, f64::max),
                probes: mags.len(),
            }
        })
        .collect();
    let slope = |f: &dyn Fn(&CollarLevel) -> f64| {
        let pts: Vec<(f64, f64)> = levels.iter().map(|l| (l.distance.ln(), f(l).ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let blowup_exponent = -slope(&|l| l.sup);
    let inf_exponent = slope(&|l| l.inf);
    let sup_monotone = levels.windows(2).all(|w| w[1].sup > w[0].sup);
    let inf_monotone = levels.windows(2).all(|w| w[1].inf < w[0].inf);
    PhiPrimeReport {
        inf: levels.iter().map(|l| l.inf).fold(f64::INFINITY, f64::min),
        sup: levels.iter().map(|l| l.sup).fold(0.0, f64::max),
        blows_up: sup_monotone && blowup_exponent > BLOWUP_EXPONENT,
        vanishes: inf_monotone && inf_exponent > BLOWUP_EXPONENT,
        blowup_exponent,
        levels,
    }
}
