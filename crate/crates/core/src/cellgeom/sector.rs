use std::f64::consts::PI;

use super::CellError;
use crate::confmap::AnnulusMap;

/// Number of samples of `Γ` used by the sector check.
const GAMMA_SAMPLES: usize = 64;

/// Outcome of [`check_sector_assumption`].
#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    /// Whether every sampled argument lies in `(δ, π − δ)`.
    pub holds: bool,
    /// `min over samples of min(arg − δ, π − δ − arg)`; positive iff `holds`.
    pub margin: f64,
    pub min_arg: f64,
    pub max_arg: f64,
    /// Rotation of the annulus that moves the circular mean of `Γ` to `π/2`.
    pub suggested_rotation: f64,
    pub samples: usize,
}

/// Samples `Γ = φ(D ∩ ℝ⁺)` and checks that it lies in the sector
/// `δ < arg z < π − δ`.
pub fn check_sector_assumption(map: &AnnulusMap, delta: f64) -> Result<SectorReport, CellError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CellError::InvalidDelta(delta));
    }
    let gamma = map
        .gamma_samples(GAMMA_SAMPLES)
        .map_err(|e| CellError::BranchViolation(format!("cannot sample Γ: {e}")))?;
    let args: Vec<f64> = gamma.iter().map(|z| z.im.atan2(z.re)).collect();
    let margin = args.iter().map(|&a| (a - delta).min(PI - delta - a)).fold(f64::INFINITY, f64::min);
    let (sx, sy) = gamma.iter().fold((0.0, 0.0), |(x, y), z| {
        let u = z / z.norm();
        (x + u.re, y + u.im)
    });
    let mean = sy.atan2(sx);
    let mut rot = PI / 2.0 - mean;
    if rot > PI {
        rot -= 2.0 * PI;
    } else if rot <= -PI {
        rot += 2.0 * PI;
    }
    Ok(SectorReport {
        holds: margin > 0.0,
        margin,
        min_arg: args.iter().cloned().fold(f64::INFINITY, f64::min),
        max_arg: args.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        suggested_rotation: rot,
        samples: args.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confmap::builtin_strip_map;

    #[test]
    fn straight_channel_needs_rotation() {
        let m = builtin_strip_map(0.5);
        let r = check_sector_assumption(&m, 0.2).unwrap();
        assert!(!r.holds);
        assert!((r.suggested_rotation - PI / 2.0).abs() < 1e-12);
        let r = check_sector_assumption(&m.rotated(r.suggested_rotation), 0.2).unwrap();
        assert!(r.holds);
        assert!((r.margin - (PI / 2.0 - 0.2)).abs() < 1e-12);
    }

    #[test]
    fn delta_out_of_range() {
        let m = builtin_strip_map(0.5);
        assert_eq!(check_sector_assumption(&m, 1.5), Err(CellError::InvalidDelta(1.5)));
    }
}
