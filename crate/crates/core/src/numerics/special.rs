//! Complex special-function helpers shared by the kernel formulas.
//!
//! Everything here is generic over [`Real`] and written to stay finite for
//! large arguments (sech of a large number underflows to zero instead of
//! overflowing through `cosh`).

use num_complex::Complex;

use crate::Real;

/// Hyperbolic secant, evaluated through `e^{-|z|}` so that it never overflows.
pub fn sech<T: Real>(z: Complex<T>) -> Complex<T> {
    let z = if z.re < T::zero() { -z } else { z };
    let e = (-z).exp();
    let one = Complex::new(T::one(), T::zero());
    e * T::lit(2.0) / (one + e * e)
}

/// Square of [`sech`].
pub fn sech2<T: Real>(z: Complex<T>) -> Complex<T> {
    let s = sech(z);
    s * s
}

/// `t / (e^{at} − e^{−at})`, an even function of `t` with value `1/(2a)` at
/// the origin. Computed without cancellation for small `|at|` and without
/// overflow for large `|at|`.
pub fn t_over_sinh_pair<T: Real>(t: T, a: T) -> T {
    let x = (a * t).abs();
    if x == T::zero() {
        return T::one() / (a + a);
    }
    t.abs() * (-x).exp() / -(-(x + x)).exp_m1()
}

/// Representative of `arg z` in the window `[lo, lo + 2π)`.
pub fn arg_in_window<T: Real>(z: Complex<T>, lo: T) -> T {
    let tau = T::TAU();
    let a = z.im.atan2(z.re);
    let k = a - lo;
    let r = k - tau * (k / tau).floor();
    // guard against rounding pushing the result onto the excluded endpoint
    if r >= tau {
        lo
    } else {
        lo + r
    }
}

/// Logarithm with imaginary part in `[lo, lo + 2π)`.
pub fn log_in_window<T: Real>(z: Complex<T>, lo: T) -> Complex<T> {
    Complex::new(z.norm().ln(), arg_in_window(z, lo))
}

/// Real power `z^α` on the branch whose argument lies in `[lo, lo + 2π)`.
pub fn pow_in_window<T: Real>(z: Complex<T>, alpha: T, lo: T) -> Complex<T> {
    (log_in_window(z, lo) * alpha).exp()
}

/// `e^{i2πz}`.
pub fn exp_i2pi<T: Real>(z: Complex<T>) -> Complex<T> {
    (Complex::new(T::zero(), T::TAU()) * z).exp()
}
