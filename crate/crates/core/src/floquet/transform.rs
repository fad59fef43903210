use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::field::{eta_node, FieldGrid, FloquetField};
use super::FloquetError;
use crate::numerics::CellQuadrature;

type C64 = Complex<f64>;

/// Mollifier parameter used when the dense-subspace regime is requested.
pub const DEFAULT_MOLLIFIER_EPS: f64 = 1e-3;

fn inv_sqrt_2pi() -> f64 {
    1.0 / TAU.sqrt()
}

/// Gaussian mollifier `φ_ε(z) = e^{−εz²}`, `ε ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierEps(f64);

impl MollifierEps {
    pub fn new(eps: f64) -> Result<Self, FloquetError> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(FloquetError::InvalidMollifier(eps));
        }
        Ok(Self(eps))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn apply(&self, z: C64) -> C64 {
        (-z * z * self.0).exp()
    }
}

/// How the sum over periods is cut off at `|m| ≤ M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Weight one for every `|m| ≤ M`.
    Sharp,
    /// Weight one for `|m| ≤ M/2`, decaying to zero at `|m| = M + 1` along a
    /// C^∞ step. Partial sums of slowly decaying functions then converge
    /// super-algebraically in `M` away from `η = 0`.
    Smooth,
}

impl Truncation {
    pub fn weight(&self, m: i64, big_m: usize) -> f64 {
        let m = m.unsigned_abs() as f64;
        let big = big_m as f64;
        if m > big {
            return 0.0;
        }
        match self {
            Truncation::Sharp => 1.0,
            Truncation::Smooth => {
                let t = m / (big + 1.0);
                if t <= 0.5 {
                    return 1.0;
                }
                let s = 2.0 * t - 1.0;
                let g = |x: f64| if x <= 0.0 { 0.0 } else { (-1.0 / x).exp() };
                g(1.0 - s) / (g(1.0 - s) + g(s))
            }
        }
    }
}

/// Truncation and mollification policy of the forward transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions {
    pub m_trunc: usize,
    pub mollifier: Option<MollifierEps>,
    pub truncation: Truncation,
    /// When set, the forward transform fails with `TruncationWarning` if the
    /// outermost shell `|m| = M` carries more than this fraction of the
    /// running norm.
    pub shell_tol: Option<f64>,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self { m_trunc: 64, mollifier: None, truncation: Truncation::Smooth, shell_tol: None }
    }
}

/// A function on the periodic domain given by an evaluator, optionally
/// known to vanish outside the periods `lo ≤ m ≤ hi`.
#[derive(Clone)]
pub struct SampledFunction {
    eval: Arc<dyn Fn(C64) -> C64 + Send + Sync>,
    support: Option<(i64, i64)>,
    pub label: String,
}

impl fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledFunction").field("label", &self.label).field("support", &self.support).finish()
    }
}

impl SampledFunction {
    pub fn new<F: Fn(C64) -> C64 + Send + Sync + 'static>(label: &str, f: F) -> Self {
        Self { eval: Arc::new(f), support: None, label: label.to_string() }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| C64::new(0.0, 0.0))
    }

    /// Restricts the function to the periods `lo ≤ m ≤ hi` (by cell index
    /// `[Re z]`).
    pub fn with_support(mut self, lo: i64, hi: i64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        self.support
    }

    fn in_support(&self, period: i64) -> bool {
        self.support.is_none_or(|(lo, hi)| (lo..=hi).contains(&period))
    }

    pub fn eval(&self, z: C64) -> C64 {
        if self.in_support(z.re.floor() as i64) {
            (self.eval)(z)
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// `z ↦ f(z − k)`.
    pub fn shifted(&self, k: i64) -> Self {
        let inner = self.eval.clone();
        let kf = k as f64;
        Self {
            eval: Arc::new(move |z| inner(z - kf)),
            support: self.support.map(|(lo, hi)| (lo + k, hi + k)),
            label: format!("{}(· − {k})", self.label),
        }
    }

    /// `a f + b g`.
    pub fn combine(a: C64, f: &Self, b: C64, g: &Self) -> Self {
        let (f, g) = (f.clone(), g.clone());
        let label = format!("{a}·{} + {b}·{}", f.label, g.label);
        Self::new(&label, move |z| f.eval(z) * a + g.eval(z) * b)
    }
}

/// Weighted, mollified period samples `a_m = w_m (φ_ε f)(z + m)`, `|m| ≤ M`,
/// indexed by `m + M`.
fn period_samples(f: &SampledFunction, z: C64, opts: &ForwardOptions) -> Vec<C64> {
    let big = opts.m_trunc as i64;
    (-big..=big)
        .map(|m| {
            let w = opts.truncation.weight(m, opts.m_trunc);
            if w == 0.0 {
                return C64::new(0.0, 0.0);
            }
            let zm = z + m as f64;
            let v = f.eval(zm);
            if v == C64::new(0.0, 0.0) {
                return v;
            }
            let v = match opts.mollifier {
                Some(e) => v * e.apply(zm),
                None => v,
            };
            v * w
        })
        .collect()
}

/// `(shell², total²)` of a sample vector: outermost pair and all terms.
fn shell_parts(a: &[C64]) -> (f64, f64) {
    let total: f64 = a.iter().map(|v| v.norm_sqr()).sum();
    let shell = a[0].norm_sqr() + a[a.len() - 1].norm_sqr();
    (shell, total)
}

fn check_opts(opts: &ForwardOptions) -> Result<(), FloquetError> {
    if opts.m_trunc < 1 {
        return Err(FloquetError::InvalidTruncation(opts.m_trunc));
    }
    Ok(())
}

fn check_shell(shell: f64, total: f64, opts: &ForwardOptions) -> Result<(), FloquetError> {
    if let Some(tol) = opts.shell_tol {
        let ratio = if total > 0.0 { (shell / total).sqrt() } else { 0.0 };
        if ratio > tol {
            return Err(FloquetError::TruncationWarning { shell: ratio, tol });
        }
    }
    Ok(())
}

/// `(F f)(z, η) = (2π)^{−1/2} Σ_{|m|≤M} e^{−iηm} w_m (φ_ε f)(z + m)` at one
/// point, by direct summation.
pub fn floquet_value(f: &SampledFunction, z: C64, eta: f64, opts: &ForwardOptions) -> Result<C64, FloquetError> {
    check_opts(opts)?;
    let a = period_samples(f, z, opts);
    let (shell, total) = shell_parts(&a);
    check_shell(shell, total, opts)?;
    let big = opts.m_trunc as i64;
    let terms: Vec<C64> =
        a.iter().enumerate().map(|(k, &v)| v * C64::from_polar(1.0, -eta * (k as i64 - big) as f64)).collect();
    Ok(crate::numerics::pairwise_sum(&terms) * inv_sqrt_2pi())
}

/// Values `g_j = (F f)(z, η_j)` on the uniform grid of `n` quasimomenta from
/// the period samples: fold `(−1)^m a_m` modulo `n`, then one forward FFT.
fn transform_column(a: &[C64], big: i64, fft: &dyn rustfft::Fft<f64>) -> Vec<C64> {
    let n = fft.len();
    let mut b = vec![C64::new(0.0, 0.0); n];
    for (k, &v) in a.iter().enumerate() {
        let m = k as i64 - big;
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        b[m.rem_euclid(n as i64) as usize] += v * sign;
    }
    fft.process(&mut b);
    let s = inv_sqrt_2pi();
    b.iter_mut().for_each(|v| *v *= s);
    b
}

/// Forward transform sampled on cell points × `n_eta` uniform quasimomenta.
pub fn floquet_forward(
    f: &SampledFunction,
    grid: FieldGrid,
    n_eta: usize,
    opts: &ForwardOptions,
) -> Result<FloquetField, FloquetError> {
    check_opts(opts)?;
    if n_eta == 0 {
        return Err(FloquetError::InvalidGrid("no quasimomentum nodes".into()));
    }
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_eta);
    let big = opts.m_trunc as i64;
    let cols: Vec<(Vec<C64>, f64, f64)> = grid
        .points()
        .par_iter()
        .map(|&z| {
            let a = period_samples(f, z, opts);
            let (shell, total) = shell_parts(&a);
            (transform_column(&a, big, fft.as_ref()), shell, total)
        })
        .collect();
    let shell: f64 = cols.iter().map(|c| c.1).sum();
    let total: f64 = cols.iter().map(|c| c.2).sum();
    check_shell(shell, total, opts)?;
    FloquetField::new(grid, n_eta, cols.into_iter().flat_map(|c| c.0).collect())
}

/// Smallest `M = m_trunc · 2^k` (up to `max`) whose outermost shell carries
/// less than `tol` of the running norm over the given points.
pub fn choose_truncation(
    f: &SampledFunction,
    points: &[C64],
    opts: &ForwardOptions,
    tol: f64,
    max: usize,
) -> Result<usize, FloquetError> {
    check_opts(opts)?;
    let mut o = *opts;
    loop {
        let (shell, total) = points
            .iter()
            .map(|&z| shell_parts(&period_samples(f, z, &o)))
            .fold((0.0, 0.0), |acc, (s, t)| (acc.0 + s, acc.1 + t));
        let ratio = if total > 0.0 { (shell / total).sqrt() } else { 0.0 };
        if ratio < tol {
            return Ok(o.m_trunc);
        }
        if 2 * o.m_trunc > max {
            return Err(FloquetError::TruncationWarning { shell: ratio, tol });
        }
        o.m_trunc *= 2;
    }
}

/// `(F⁻¹ g)(z) = (2π)^{−1/2} ∫_{−π}^{π} e^{i[Re z]η} g(z − [Re z], η) dη` by
/// the periodic trapezoid rule on the field's grid. The error is estimated by
/// comparison with the rule on every second node; estimates above `tol`
/// (relative to the larger of the result and the column magnitude) fail with
/// `GridTooCoarse`.
pub fn floquet_inverse(g: &FloquetField, z: C64, tol: f64) -> Result<C64, FloquetError> {
    let p = z.re.floor();
    let col = g.column_at(z - p)?;
    let n = col.len();
    let phase = |j: usize| C64::from_polar(1.0, p * eta_node(j, n));
    let terms: Vec<C64> = col.iter().enumerate().map(|(j, &v)| v * phase(j)).collect();
    let full = crate::numerics::pairwise_sum(&terms) * (TAU / n as f64) * inv_sqrt_2pi();
    if n >= 2 && n % 2 == 0 {
        let even: Vec<C64> = terms.iter().step_by(2).copied().collect();
        let half = crate::numerics::pairwise_sum(&even) * (2.0 * TAU / n as f64) * inv_sqrt_2pi();
        let scale = col.iter().map(|v| v.norm()).fold(full.norm(), f64::max);
        let estimate = (full - half).norm();
        if estimate > tol * scale {
            return Err(FloquetError::GridTooCoarse { estimate, tol: tol * scale });
        }
    }
    Ok(full)
}

/// Round trip `F⁻¹(F f)` at the given points, doubling the quasimomentum grid
/// from 256 nodes until every inverse passes its self-estimate. Returns the
/// values and the grid size used.
pub fn floquet_inverse_refined(
    f: &SampledFunction,
    zs: &[C64],
    opts: &ForwardOptions,
    tol: f64,
    max_eta: usize,
) -> Result<(Vec<C64>, usize), FloquetError> {
    let reduced: Vec<C64> = zs.iter().map(|z| z - z.re.floor()).collect();
    let mut n = 256;
    loop {
        let field = floquet_forward(f, FieldGrid::Scattered(reduced.clone()), n, opts)?;
        let vals: Result<Vec<C64>, FloquetError> = zs.iter().map(|&z| floquet_inverse(&field, z, tol)).collect();
        match vals {
            Ok(v) => return Ok((v, n)),
            Err(FloquetError::GridTooCoarse { .. }) if 2 * n <= max_eta => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// A function of `(z, η)` that can be probed for the quasiperiodic boundary
/// condition.
pub trait QuasimomentumFunction {
    fn value(&self, z: C64, eta: f64) -> Result<C64, FloquetError>;
}

impl<F: Fn(C64, f64) -> C64> QuasimomentumFunction for F {
    fn value(&self, z: C64, eta: f64) -> Result<C64, FloquetError> {
        Ok(self(z, eta))
    }
}

impl QuasimomentumFunction for FloquetField {
    fn value(&self, z: C64, eta: f64) -> Result<C64, FloquetError> {
        let j = self.eta_index(eta).ok_or_else(|| FloquetError::PointNotOnGrid(format!("η = {eta}")))?;
        Ok(self.column_at(z)?[j])
    }
}

/// Forward transform evaluated on demand at arbitrary `(z, η)`.
#[derive(Debug, Clone)]
pub struct FloquetTransform {
    pub f: SampledFunction,
    pub opts: ForwardOptions,
}

impl QuasimomentumFunction for FloquetTransform {
    fn value(&self, z: C64, eta: f64) -> Result<C64, FloquetError> {
        floquet_value(&self.f, z, eta, &self.opts)
    }
}

/// Outcome of the quasiperiodicity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiperiodicityReport {
    /// `max |g(1 + iy, η) − e^{iη} g(iy, η)|` over the samples.
    pub max_residual: f64,
    pub worst_eta: f64,
    pub worst_y: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `g(1 + iy, η)` with `e^{iη} g(iy, η)` for `n_y` heights inside the
/// junction interval `(a, b)` and the given quasimomenta.
pub fn check_quasiperiodicity<Q: QuasimomentumFunction + ?Sized>(
    g: &Q,
    junction: (f64, f64),
    etas: &[f64],
    n_y: usize,
    tol: f64,
) -> Result<QuasiperiodicityReport, FloquetError> {
    let (a, b) = junction;
    let mut report = QuasiperiodicityReport { max_residual: 0.0, worst_eta: 0.0, worst_y: a, tol, pass: true };
    for k in 0..n_y.max(1) {
        let y = a + (b - a) * (k as f64 + 0.5) / n_y.max(1) as f64;
        for &eta in etas {
            let right = g.value(C64::new(1.0, y), eta)?;
            let left = g.value(C64::new(0.0, y), eta)?;
            let r = (right - left * C64::from_polar(1.0, eta)).norm();
            if !(r <= report.max_residual) {
                report.max_residual = r;
                report.worst_eta = eta;
                report.worst_y = y;
            }
        }
    }
    report.pass = report.max_residual < tol;
    Ok(report)
}

/// Both sides of the isometry for one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryReport {
    /// `Σ_{|m|≤M} w_m² ‖φ_ε f‖²_{ϖ_m}`.
    pub norm_pi_sq: f64,
    /// `∫_{−π}^{π} ‖(F f)(·, η)‖²_{L²(ϖ)} dη`.
    pub norm_transform_sq: f64,
    pub relative_gap: f64,
    pub m_trunc: usize,
    pub n_eta: usize,
}

/// `(⟨f, g⟩_Π, ⟨F f, F g⟩)` with matched truncation: the period sum uses the
/// same weights as the transform, and the quasimomentum grid has at least
/// `2M + 1` nodes so that the trapezoid rule is exact on the truncated sums.
pub fn transform_inner_product(
    f: &SampledFunction,
    g: &SampledFunction,
    quad: &CellQuadrature,
    opts: &ForwardOptions,
) -> Result<(C64, C64, usize), FloquetError> {
    check_opts(opts)?;
    let n_eta = (2 * opts.m_trunc + 1).next_power_of_two().max(256);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n_eta);
    let big = opts.m_trunc as i64;
    let parts: Vec<(C64, C64)> = quad
        .points
        .par_iter()
        .zip(&quad.weights)
        .map(|(&z, &q)| {
            let a = period_samples(f, z, opts);
            let b = period_samples(g, z, opts);
            let direct: C64 = a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum();
            let ca = transform_column(&a, big, fft.as_ref());
            let cb = transform_column(&b, big, fft.as_ref());
            let fibre: C64 = ca.iter().zip(&cb).map(|(x, y)| x * y.conj()).sum();
            (direct * q, fibre * (q * TAU / n_eta as f64))
        })
        .collect();
    let pi: Vec<C64> = parts.iter().map(|p| p.0).collect();
    let tr: Vec<C64> = parts.iter().map(|p| p.1).collect();
    Ok((crate::numerics::pairwise_sum(&pi), crate::numerics::pairwise_sum(&tr), n_eta))
}

/// `‖f‖²_Π` against `‖F f‖²` on the truncation window.
pub fn isometry_check(
    f: &SampledFunction,
    quad: &CellQuadrature,
    opts: &ForwardOptions,
) -> Result<IsometryReport, FloquetError> {
    let (a, b, n_eta) = transform_inner_product(f, f, quad, opts)?;
    let gap = if a.re > 0.0 { (b.re - a.re).abs() / a.re } else { (b.re - a.re).abs() };
    Ok(IsometryReport { norm_pi_sq: a.re, norm_transform_sq: b.re, relative_gap: gap, m_trunc: opts.m_trunc, n_eta })
}
