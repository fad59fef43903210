use num_complex::Complex;

use super::KernelError;
use crate::numerics::special::{sech2, t_over_sinh_pair};
use crate::numerics::{integrate_line_adaptive, CutoffPolicy};
use crate::Real;

type C64 = Complex<f64>;

/// Bergman kernel of the upper half-plane, `−1/(π(z − w̄)²)`.
pub fn halfplane_kernel<T: Real>(z: Complex<T>, w: Complex<T>) -> Result<Complex<T>, KernelError> {
    if !(z.im > T::zero() && w.im > T::zero()) {
        return Err(KernelError::OutOfDomain(format!("half-plane kernel needs Im z, Im w > 0, got {z}, {w}")));
    }
    let d = z - w.conj();
    Ok(-Complex::new(T::one(), T::zero()) / (d * d * T::PI()))
}

/// Bergman kernel of the strip `Σ = ℝ × (−π, π)`, `(16π)⁻¹ sech²((z − w̄)/4)`.
pub fn strip_kernel_sigma<T: Real>(z: Complex<T>, w: Complex<T>) -> Result<Complex<T>, KernelError> {
    let pi = T::PI();
    if !(z.im.abs() < pi && w.im.abs() < pi) {
        return Err(KernelError::OutOfDomain(format!("strip kernel needs |Im z|, |Im w| < π, got {z}, {w}")));
    }
    let s = sech2((z - w.conj()) / T::lit(4.0));
    Ok(s / (T::lit(16.0) * pi))
}

/// Transport of a kernel through a conformal map,
/// `K(φ(z), φ(w)) φ′(z) conj φ′(w)`. The map closure returns `φ` and `φ′`,
/// or `None` for the derivative when it is not available at that point.
pub fn pullback_kernel<T, K, F>(kernel: K, map: F, z: Complex<T>, w: Complex<T>) -> Result<Complex<T>, KernelError>
where
    T: Real,
    K: Fn(Complex<T>, Complex<T>) -> Result<Complex<T>, KernelError>,
    F: Fn(Complex<T>) -> (Complex<T>, Option<Complex<T>>),
{
    let (fz, dz) = map(z);
    let (fw, dw) = map(w);
    let dz = dz.ok_or_else(|| KernelError::DerivativeUnavailable(format!("{z}")))?;
    let dw = dw.ok_or_else(|| KernelError::DerivativeUnavailable(format!("{w}")))?;
    Ok(kernel(fz, fw)? * dz * dw.conj())
}

/// Weighted transport `K_X(φ(z), φ(w)) |φ′(w)|²`: the kernel, with respect to
/// area measure in the `w` variable, of the operator `f ↦ (P_X (f ∘ φ⁻¹)) ∘ φ`.
pub fn pullback_kernel_weighted<T, K, F>(
    kernel: K,
    map: F,
    z: Complex<T>,
    w: Complex<T>,
) -> Result<Complex<T>, KernelError>
where
    T: Real,
    K: Fn(Complex<T>, Complex<T>) -> Result<Complex<T>, KernelError>,
    F: Fn(Complex<T>) -> (Complex<T>, Option<Complex<T>>),
{
    let (fz, _) = map(z);
    let (fw, dw) = map(w);
    let dw = dw.ok_or_else(|| KernelError::DerivativeUnavailable(format!("{w}")))?;
    Ok(kernel(fz, fw)? * dw.norm_sqr())
}

/// Normalisation constant `C_{n,η} = [2π(ρ^x − ρ^{−x})/x]^{−1/2}` with
/// `x = 2(n+1) + η/π`. At the degenerate exponent `x = 0` the analytic limit
/// `C⁻² = 4π log ρ` is returned.
pub fn norm_const<T: Real>(n: i64, eta: T, rho: T) -> Result<T, KernelError> {
    if !(rho > T::one()) {
        return Err(KernelError::InvalidModulus(rho.to_f64().unwrap_or(f64::NAN)));
    }
    let x = T::lit(2.0 * (n as f64 + 1.0)) + eta / T::PI();
    Ok((t_over_sinh_pair(x, rho.ln()) / T::TAU()).sqrt())
}

/// Right-hand side `(π²/4a²) sech²(πs/2a)` of the cosine transform identity.
pub fn sech_fourier_rhs<T: Real>(s: T, a: T) -> T {
    let pi = T::PI();
    let arg = Complex::new(pi * s / (a + a), T::zero());
    pi * pi / (T::lit(4.0) * a * a) * sech2(arg).re
}

/// Both sides of `∫_ℝ t e^{−ist}/(e^{at} − e^{−at}) dt = (π²/4a²) sech²(πs/2a)`.
/// The left side is computed by adaptive line quadrature of its even part
/// `t cos(st)/(e^{at} − e^{−at})`.
pub fn sech_fourier_identity(s: f64, a: f64) -> Result<(f64, f64), KernelError> {
    if !(a > 0.0) {
        return Err(KernelError::OutOfDomain(format!("identity needs a > 0, got {a}")));
    }
    let policy = CutoffPolicy { panel: 2.0 / a, ..CutoffPolicy::default() };
    let lhs = integrate_line_adaptive(|t| C64::new(t_over_sinh_pair(t, a) * (s * t).cos(), 0.0), policy)?;
    Ok((lhs.re, sech_fourier_rhs(s, a)))
}
