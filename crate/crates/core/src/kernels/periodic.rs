use std::f64::consts::{PI, TAU};

use num_complex::Complex;

use super::{norm_const, KernelContext, KernelError, KernelMethod, SeriesControl};
use crate::confmap::LiftedPoint;
use crate::numerics::special::{exp_i2pi, pow_in_window, sech2, t_over_sinh_pair};
use crate::numerics::{integrate_line_adaptive, CutoffPolicy};

type C64 = Complex<f64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `φ′(E z) conj φ′(E w)` times `e^{i2π(z − w̄ − Δ)}`, the prefactor `K̃_Π`.
fn prefactor_pi(pz: &LiftedPoint, pw: &LiftedPoint, delta: C64) -> C64 {
    exp_i2pi(pz.z - pw.z.conj() - delta) * pz.annulus_derivative * pw.annulus_derivative.conj()
}

/// `K̃(z,w) = 4π² e^{i2π(z − w̄)} φ′(E z) conj φ′(E w)`.
fn prefactor_cell(pz: &LiftedPoint, pw: &LiftedPoint) -> C64 {
    exp_i2pi(pz.z - pw.z.conj()) * pz.annulus_derivative * pw.annulus_derivative.conj() * (4.0 * PI * PI)
}

fn delta(pz: &LiftedPoint, pw: &LiftedPoint) -> C64 {
    pz.value - pw.value.conj()
}

/// Closed-form `K_Π` from precomputed lifted points.
pub fn periodic_kernel_closed_points(ctx: &KernelContext, pz: &LiftedPoint, pw: &LiftedPoint) -> C64 {
    let l = ctx.log_rho();
    let d = delta(pz, pw);
    prefactor_pi(pz, pw, d) * (PI.powi(3) / (4.0 * l * l)) * sech2(d * (PI * PI / (2.0 * l)))
}

/// Closed-form periodic kernel
/// `K̃_Π(z,w) · π³/(4 log²ρ) · sech²(π²(φ(z) − conj φ(w))/(2 log ρ))`.
pub fn periodic_kernel_closed(ctx: &KernelContext, z: C64, w: C64) -> Result<C64, KernelError> {
    Ok(periodic_kernel_closed_points(ctx, &ctx.point(z)?, &ctx.point(w)?))
}

/// Summary of one cell-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesReport {
    pub value: C64,
    /// Lowest and highest index summed.
    pub n_lo: i64,
    pub n_hi: i64,
}

/// `ln c(x)` with `c(x) = x/(2π(e^{Lx} − e^{−Lx}))`, stable for all `x`.
fn ln_coeff(x: f64, l: f64) -> f64 {
    let ax = x.abs();
    if ax == 0.0 {
        return -(4.0 * PI * l).ln();
    }
    ax.ln() - ax * l - TAU.ln() - (-(-2.0 * ax * l).exp_m1()).ln()
}

/// `Σ_n c(2n + η/π) e^{i(2π(n−1)+η)Δ}` with `c` built from `log ρ = l`.
pub fn cell_series(d: C64, eta: f64, l: f64, control: &SeriesControl) -> Result<SeriesReport, KernelError> {
    let ratio_right = (-2.0 * l - TAU * d.im).exp();
    let ratio_left = (-2.0 * l + TAU * d.im).exp();
    let worst = ratio_right.max(ratio_left);
    if !(worst < 1.0) {
        return Err(KernelError::SeriesNotConverged { n_lo: 0, n_hi: 0, ratio: worst });
    }
    let term = |n: i64| {
        let x = 2.0 * n as f64 + eta / PI;
        (C64::new(ln_coeff(x, l), 0.0) + I * (TAU * (n as f64 - 1.0) + eta) * d).exp()
    };
    let mut sum = term(0);
    let mut biggest = sum.norm();
    let mut quiet = [0usize; 2];
    let mut next = [1i64, -1];
    let mut done = [false; 2];
    while !(done[0] && done[1]) {
        for side in 0..2 {
            if done[side] {
                continue;
            }
            let n = next[side];
            if n > control.n_max || n < control.n_min {
                return Err(KernelError::SeriesNotConverged {
                    n_lo: next[1] + 1,
                    n_hi: next[0] - 1,
                    ratio: if side == 0 { ratio_right } else { ratio_left },
                });
            }
            let t = term(n);
            sum += t;
            biggest = biggest.max(t.norm());
            if t.norm() <= control.tol * sum.norm().max(biggest) {
                quiet[side] += 1;
                if quiet[side] >= control.stop_count {
                    done[side] = true;
                }
            } else {
                quiet[side] = 0;
            }
            next[side] += if side == 0 { 1 } else { -1 };
        }
    }
    Ok(SeriesReport { value: sum, n_lo: next[1] + 1, n_hi: next[0] - 1 })
}

/// Cell kernel `K_η(z,w)` from lifted points of the reduced cell.
pub fn cell_kernel_eta_points(
    ctx: &KernelContext,
    pz: &LiftedPoint,
    pw: &LiftedPoint,
    eta: f64,
) -> Result<C64, KernelError> {
    let s = cell_series(delta(pz, pw), eta, ctx.series_log_rho(), &ctx.series)?;
    Ok(prefactor_cell(pz, pw) * s.value)
}

fn check_cell_point(z: C64) -> Result<(), KernelError> {
    if !(0.0..=1.0).contains(&z.re) {
        return Err(KernelError::OutOfDomain(format!("{z} is not in the period cell 0 ≤ Re z ≤ 1")));
    }
    Ok(())
}

/// Quasimomentum cell kernel
/// `K_η(z,w) = K̃(z,w) Σ_n c(2n + η/π) e^{i(2π(n−1)+η)(φ(z) − conj φ(w))}` for
/// `z, w` in the period cell.
pub fn cell_kernel_eta(ctx: &KernelContext, z: C64, w: C64, eta: f64) -> Result<C64, KernelError> {
    check_cell_point(z)?;
    check_cell_point(w)?;
    cell_kernel_eta_points(ctx, &ctx.point(z)?, &ctx.point(w)?, eta)
}

/// `(2π)⁻¹ ∫_{−π}^{π} e^{iη(p−q)} K_η(z − p, w − q) dη` from lifted points of
/// `z, w ∈ Π`, by nested periodic trapezoid sums.
fn assemble_points(ctx: &KernelContext, pz: &LiftedPoint, pw: &LiftedPoint) -> Result<C64, KernelError> {
    let (p, q) = (pz.z.re.floor(), pw.z.re.floor());
    let shift = p - q;
    // the prefactor is 1-periodic in both arguments; only Δ feels the shift
    let d = delta(pz, pw) - shift;
    let l = ctx.series_log_rho();
    let rule = ctx.eta_rule;
    let integrand = |eta: f64| -> Result<C64, KernelError> {
        let s = cell_series(d, eta, l, &ctx.series)?;
        Ok(C64::from_polar(1.0, eta * shift) * s.value)
    };
    let mut n = rule.initial.max(2);
    let mut sum = C64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for j in 0..n {
        let f = integrand(-PI + TAU * j as f64 / n as f64)?;
        sum += f;
        abs_sum += f.norm();
    }
    let mut value = sum / n as f64;
    loop {
        if 2 * n > rule.max {
            return Err(KernelError::QuadratureFailure(format!(
                "quasimomentum integral not converged with {n} nodes"
            )));
        }
        for j in 0..n {
            let f = integrand(-PI + TAU * (2 * j + 1) as f64 / (2 * n) as f64)?;
            sum += f;
            abs_sum += f.norm();
        }
        n *= 2;
        let refined = sum / n as f64;
        let floor = 1e3 * f64::EPSILON * abs_sum / n as f64;
        let change = (refined - value).norm();
        value = refined;
        if change <= rule.tol * value.norm() || change <= floor {
            break;
        }
    }
    Ok(prefactor_cell(pz, pw) * value)
}

/// Assembles `K_Π(z,w)` from the quasimomentum cell kernels:
/// `(2π)⁻¹ ∫_{−π}^{π} e^{iη([Re z] − [Re w])} K_η(z − [Re z], w − [Re w], η) dη`.
pub fn assemble_periodic_from_eta(ctx: &KernelContext, z: C64, w: C64) -> Result<C64, KernelError> {
    assemble_points(ctx, &ctx.point(z)?, &ctx.point(w)?)
}

fn t_integral_points(ctx: &KernelContext, pz: &LiftedPoint, pw: &LiftedPoint) -> Result<C64, KernelError> {
    let l = ctx.log_rho();
    let d = delta(pz, pw);
    let rate = 2.0 * l - TAU * d.im.abs();
    if !(rate > 0.0) {
        return Err(KernelError::OutOfDomain(format!("Δ = {d} outside the convergence strip")));
    }
    let policy = CutoffPolicy { panel: (4.0 / rate).clamp(0.05, 4.0), ..ctx.line_policy };
    let integral =
        integrate_line_adaptive(|s| (I * (TAU * s) * d).exp() * t_over_sinh_pair(s, 2.0 * l), policy)?;
    Ok(prefactor_pi(pz, pw, d) * (4.0 * PI) * integral)
}

/// `K_Π(z,w) = K̃(z,w) e^{−i2πΔ} π⁻¹ ∫_ℝ s e^{i2πsΔ}/(ρ^{2s} − ρ^{−2s}) ds`,
/// the real-line form obtained by fusing the series index and the
/// quasimomentum into one variable.
pub fn periodic_kernel_t_integral(ctx: &KernelContext, z: C64, w: C64) -> Result<C64, KernelError> {
    t_integral_points(ctx, &ctx.point(z)?, &ctx.point(w)?)
}

/// `K_Π(z,w)` by the chosen method, from lifted points.
pub fn eval_kernel_points(
    ctx: &KernelContext,
    method: KernelMethod,
    pz: &LiftedPoint,
    pw: &LiftedPoint,
) -> Result<C64, KernelError> {
    match method {
        KernelMethod::Closed => Ok(periodic_kernel_closed_points(ctx, pz, pw)),
        KernelMethod::EtaAssembly => assemble_points(ctx, pz, pw),
        KernelMethod::TIntegral => t_integral_points(ctx, pz, pw),
    }
}

/// `K_Π(z,w)` by the chosen method.
pub fn eval_kernel(ctx: &KernelContext, method: KernelMethod, z: C64, w: C64) -> Result<C64, KernelError> {
    eval_kernel_points(ctx, method, &ctx.point(z)?, &ctx.point(w)?)
}

/// Orthonormal basis function `f_{n,η}(ζ) = C_{n,η} ζ^{n+η/2π} / v(ζ)` of the
/// `V`-weighted Bergman space of the annulus. The power is taken on the branch
/// cut along the ray through `Γ`.
pub fn basis_fn(ctx: &KernelContext, n: i64, eta: f64, zeta: C64) -> Result<C64, KernelError> {
    let cut = ctx.basis_cut();
    let arg = zeta.arg();
    let off = (arg - cut).rem_euclid(TAU);
    if off.min(TAU - off) < 1e-15 {
        return Err(KernelError::BranchViolation(format!("{zeta} lies on the basis cut arg = {cut}")));
    }
    let c = norm_const(n, eta, ctx.rho())?;
    let v = ctx.weights().v(zeta)?;
    Ok(pow_in_window(zeta, n as f64 + eta / TAU, cut) * c / v)
}

/// The basis function pulled back to the period cell,
/// `e_{n,η}(w) = 2π C_{n,η} e^{i2πw} φ′(E w) e^{i(2πn+η)φ(w)}`.
pub fn basis_pullback(ctx: &KernelContext, n: i64, eta: f64, pw: &LiftedPoint) -> Result<C64, KernelError> {
    let c = norm_const(n, eta, ctx.rho())?;
    Ok(exp_i2pi(pw.z) * pw.annulus_derivative * (I * (TAU * n as f64 + eta) * pw.value).exp() * (TAU * c))
}
