use std::f64::consts::TAU;

use num_complex::Complex;

use super::{AnnulusMap, MapError};
use crate::cellgeom::{check_sector_assumption, exp_map, log_branch, BranchTag};

type C64 = Complex<f64>;

/// Sector half-margin `δ` required of `Γ` after auto-rotation.
pub const SECTOR_DELTA: f64 = 0.1;

/// Lifted map and its ingredients at one point of `Π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedPoint {
    pub z: C64,
    /// `φ(z)` on the strip.
    pub value: C64,
    /// `φ′(z)`.
    pub derivative: C64,
    /// `φ(E(z))` on the annulus.
    pub annulus: C64,
    /// `φ′(E(z))`.
    pub annulus_derivative: C64,
}

impl LiftedPoint {
    /// The same data at `z + m` for an integer `m`: `φ(z + m) = φ(z) + m`,
    /// while `E`, `φ(E)` and the derivatives are 1-periodic.
    pub fn translated(&self, m: f64) -> Self {
        Self { z: self.z + m, value: self.value + m, ..*self }
    }
}

/// Conformal map `φ(z) = (i2π)⁻¹ log φ(E(z)) + [Re z]` of the periodic domain
/// onto the strip `|Im z| < log ρ/(2π)`.
#[derive(Debug, Clone)]
pub struct LiftedMap {
    map: AnnulusMap,
}

/// Rotates the annulus so that `Γ` is centred on the positive imaginary axis,
/// checks the sector assumption and returns the lifted map.
pub fn lift(map: &AnnulusMap) -> Result<LiftedMap, MapError> {
    let before = check_sector_assumption(map, SECTOR_DELTA)?;
    let rotated = map.rotated(before.suggested_rotation);
    let after = check_sector_assumption(&rotated, SECTOR_DELTA)?;
    if !after.holds {
        return Err(MapError::SectorAssumptionFailed { margin: after.margin });
    }
    Ok(LiftedMap { map: rotated })
}

impl LiftedMap {
    /// Wraps a map whose rotation is already fixed (e.g. loaded from an
    /// archive), checking the sector assumption without rotating.
    pub fn from_rotated(map: AnnulusMap) -> Result<Self, MapError> {
        let r = check_sector_assumption(&map, SECTOR_DELTA)?;
        if !r.holds {
            return Err(MapError::SectorAssumptionFailed { margin: r.margin });
        }
        Ok(Self { map })
    }

    pub fn annulus_map(&self) -> &AnnulusMap {
        &self.map
    }

    pub fn rho(&self) -> f64 {
        self.map.rho()
    }

    pub fn log_rho(&self) -> f64 {
        self.map.log_rho()
    }

    /// Half-width `log ρ/(2π)` of the image strip.
    pub fn strip_half_width(&self) -> f64 {
        self.map.log_rho() / TAU
    }

    fn eval_in_cell(&self, z: C64, m: f64, tag: BranchTag) -> Result<LiftedPoint, MapError> {
        let z0 = z - m;
        let img = self.map.cell_image(z0)?;
        let value = log_branch(img.annulus, tag)? + m;
        let derivative = img.derivative * exp_map(z) / img.annulus;
        Ok(LiftedPoint { z, value, derivative, annulus: img.annulus, annulus_derivative: img.derivative })
    }

    /// `φ(z)` and related values at `z ∈ Π`.
    pub fn eval(&self, z: C64) -> Result<LiftedPoint, MapError> {
        let m = z.re.floor();
        self.eval_in_cell(z, m, BranchTag::for_cell_point(z.re - m))
    }

    /// Limit of `φ` at a junction point (integer real part) from the cell on
    /// its left.
    pub fn limit_from_left(&self, z: C64) -> Result<LiftedPoint, MapError> {
        let m = z.re.round() - 1.0;
        self.eval_in_cell(z, m, BranchTag::right())
    }

    /// Limit of `φ` at a junction point from the cell on its right.
    pub fn limit_from_right(&self, z: C64) -> Result<LiftedPoint, MapError> {
        let m = z.re.round();
        self.eval_in_cell(z, m, BranchTag::left())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confmap::builtin_strip_map;

    #[test]
    fn strip_lift_is_translation() {
        let l = lift(&builtin_strip_map(0.5)).unwrap();
        for &(x, y) in &[(0.25, 0.1), (3.7, -0.3), (-1.2, 0.45)] {
            let z = C64::new(x, y);
            let p = l.eval(z).unwrap();
            // rotation by π/2 shifts φ by 1/4
            assert!((p.value - (z + 0.25)).norm() < 1e-12, "{z}: {}", p.value);
            assert!((p.derivative - 1.0).norm() < 1e-12);
        }
        let a = l.eval(C64::new(0.25 + 3.0, 0.0)).unwrap().value;
        let b = l.eval(C64::new(0.25, 0.0)).unwrap().value;
        assert_eq!(a - b, C64::new(3.0, 0.0));
    }
}
