use num_complex::Complex;

use super::CellError;
use crate::numerics::special::{arg_in_window, exp_i2pi};
use crate::Real;

/// Which half of the period cell a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HalfCell {
    /// `0 ≤ Re z − [Re z] < 1/2`.
    Left,
    /// `1/2 ≤ Re z − [Re z] < 1` (and the right edge `Re z = 1` of a cell).
    Right,
}

/// Argument window for the logarithm on the annulus.
///
/// The left half-cell uses `arg ∈ [0, 2π)`, the right half-cell
/// `arg ∈ [π, 3π)`. Both windows contain the image curve `Γ` (in the upper
/// half-plane after rotation), and across `Γ` the two determinations differ
/// by exactly `2π`, so the lifted map gains exactly `1` per period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchTag {
    pub half: HalfCell,
    /// Lower end of the half-open window `[lo, lo + 2π)`.
    pub window_lo: f64,
}

impl BranchTag {
    pub fn left() -> Self {
        Self { half: HalfCell::Left, window_lo: 0.0 }
    }

    pub fn right() -> Self {
        Self { half: HalfCell::Right, window_lo: std::f64::consts::PI }
    }

    /// Tag for a point with real part `x` of the reduced cell coordinate.
    pub fn for_cell_point(x: f64) -> Self {
        if x - x.floor() < 0.5 {
            Self::left()
        } else {
            Self::right()
        }
    }

    pub fn for_half(half: HalfCell) -> Self {
        match half {
            HalfCell::Left => Self::left(),
            HalfCell::Right => Self::right(),
        }
    }

    /// `(lo, hi)` with the window `[lo, hi)`.
    pub fn window(&self) -> (f64, f64) {
        (self.window_lo, self.window_lo + std::f64::consts::TAU)
    }
}

/// `E(z) = e^{i2πz}`.
pub fn exp_map<T: Real>(z: Complex<T>) -> Complex<T> {
    exp_i2pi(z)
}

/// `(i2π)⁻¹ log w` with `Im log w` in the tag's window.
///
/// `log_branch(exp_map(z), BranchTag::for_cell_point(Re z)) = z` on the open
/// cell; at `w = 1` the left and right determinations differ by exactly `1`.
pub fn log_branch<T: Real>(w: Complex<T>, tag: BranchTag) -> Result<Complex<T>, CellError> {
    if !(w.re.is_finite() && w.im.is_finite()) || w.norm() == T::zero() {
        return Err(CellError::BranchViolation(format!("logarithm undefined at {w:?}")));
    }
    let arg = arg_in_window(w, T::lit(tag.window_lo));
    let log = Complex::new(w.norm().ln(), arg);
    Ok(log / Complex::new(T::zero(), T::TAU()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_examples() {
        assert_eq!(exp_map(Complex::new(0.0, 0.0)), Complex::new(1.0, 0.0));
        let v = exp_map(Complex::new(0.0, 0.5));
        assert!((v.re - (-std::f64::consts::PI).exp()).abs() < 1e-16 && v.im.abs() < 1e-16);
    }

    #[test]
    fn one_sided_limits_at_unity() {
        let one = Complex::new(1.0, 0.0);
        let l = log_branch(one, BranchTag::left()).unwrap();
        let r = log_branch(one, BranchTag::right()).unwrap();
        assert_eq!(l, Complex::new(0.0, 0.0));
        assert!((r - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_of_exp_interior_example() {
        let w = Complex::new((-std::f64::consts::PI).exp(), 0.0);
        let z = log_branch(w, BranchTag::left()).unwrap();
        assert!((z - Complex::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn zero_is_a_branch_violation() {
        assert!(log_branch(Complex::new(0.0, 0.0), BranchTag::left()).is_err());
        assert!(log_branch(Complex::new(f64::NAN, 0.0), BranchTag::left()).is_err());
    }

    #[test]
    fn windows_differ_by_two_pi() {
        let (l0, l1) = BranchTag::left().window();
        let (r0, r1) = BranchTag::right().window();
        assert_eq!(r1 - r0, l1 - l0);
        assert!(((r0 - l0) - std::f64::consts::PI).abs() < 1e-15);
    }
}
