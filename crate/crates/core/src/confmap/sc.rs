use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex;

use super::MapError;
use crate::cellgeom::PeriodicCellSpec;
use crate::numerics::{gauss_jacobi, integrate_interval, nlls_solve, AdaptiveOptions, NllsError, SolverBudget};

type C64 = Complex<f64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };
/// Gauss–Jacobi nodes per singular end panel.
const JACOBI_NODES: usize = 32;
/// Smallest number of Fourier modes used on the middle circle.
const MIN_FOURIER: usize = 256;
const MAX_FOURIER: usize = 8192;

fn quad_opts() -> AdaptiveOptions {
    AdaptiveOptions { abs_tol: 1e-15, rel_tol: 1e-14, max_depth: 50 }
}

/// Number of product factors needed for `q^{2K} < 1e−17`.
pub fn k_trunc_for(q: f64) -> usize {
    ((17.0 * std::f64::consts::LN_10) / (2.0 * (1.0 / q).ln())).ceil().max(1.0) as usize
}

/// Truncated product `P(ζ) = (1 − ζ) Π_{k=1}^{K} (1 − q^{2k} ζ)(1 − q^{2k}/ζ)`.
pub fn sc_product_p(zeta: C64, q: f64, k_trunc: usize) -> Result<C64, MapError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(MapError::NonConvergentRatio(q));
    }
    if zeta.norm() == 0.0 {
        return Err(MapError::OutOfDomain("P is singular at ζ = 0".into()));
    }
    let one = C64::new(1.0, 0.0);
    let q2 = q * q;
    let mut qk = q2;
    let mut p = one - zeta;
    for _ in 0..k_trunc {
        p *= (one - zeta * qk) * (one - qk / zeta);
        qk *= q2;
    }
    Ok(p)
}

/// Parameters of a solved annulus Schwarz–Christoffel map.
///
/// Prevertices of the lower polyline sit on the outer circle `|ζ| = 1` at
/// `outer_angles` (the first is `0`, the image of the junction corner `ia`);
/// prevertices of the upper polyline sit on `|ζ| = q` at `inner_angles`
/// (the first is the preimage of `ib`). Both lists follow the vertices from
/// left to right within one period.
#[derive(Debug, Clone, PartialEq)]
pub struct ScParams {
    pub outer_angles: Vec<f64>,
    pub inner_angles: Vec<f64>,
    pub beta_outer: Vec<f64>,
    pub beta_inner: Vec<f64>,
    pub rho: f64,
    /// Product ratio `q = ρ⁻²`.
    pub q: f64,
    /// Scale constant `A`, fixed by the period condition.
    pub scale: C64,
    /// Image `ia` of the base prevertex `ζ = 1`.
    pub base: C64,
    pub k_trunc: usize,
    pub junction: (f64, f64),
    /// Largest vertex-position residual reported by the solve.
    pub vertex_residual: f64,
}

impl ScParams {
    /// Parameters with all prevertex data given; `scale` is recomputed by
    /// [`ScMap::new`].
    pub fn new(
        outer_angles: Vec<f64>,
        inner_angles: Vec<f64>,
        beta_outer: Vec<f64>,
        beta_inner: Vec<f64>,
        q: f64,
        junction: (f64, f64),
    ) -> Self {
        Self {
            outer_angles,
            inner_angles,
            beta_outer,
            beta_inner,
            rho: q.powf(-0.5),
            q,
            scale: C64::new(0.0, 0.0),
            base: C64::new(0.0, junction.0),
            k_trunc: k_trunc_for(q),
            junction,
            vertex_residual: f64::NAN,
        }
    }
}

/// Evaluator of the annulus Schwarz–Christoffel map `f: {q < |ζ| < 1} → ϖ`.
#[derive(Debug, Clone)]
pub struct ScMap {
    params: ScParams,
    outer: Vec<C64>,
    inner: Vec<C64>,
    /// Fourier coefficients of the integrand on `|ζ| = √q`, index `n + half`.
    coeffs: Vec<C64>,
    half: usize,
    /// Largest `|n|` with a non-negligible coefficient.
    active: usize,
    /// `∫_1^{√q} g dζ/ζ` along the positive real axis.
    r0: C64,
    outer_images: Vec<C64>,
    inner_images: Vec<C64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Circle {
    Outer,
    Inner,
}

impl ScMap {
    pub fn new(mut params: ScParams) -> Result<Self, MapError> {
        let q = params.q;
        if !(q > 0.0 && q < 1.0) {
            return Err(MapError::NonConvergentRatio(q));
        }
        if params.outer_angles.is_empty() || params.inner_angles.is_empty() {
            return Err(MapError::DegenerateInitialization("each circle needs a prevertex".into()));
        }
        if params.outer_angles.len() != params.beta_outer.len() || params.inner_angles.len() != params.beta_inner.len()
        {
            return Err(MapError::DegenerateInitialization("prevertex/exponent count mismatch".into()));
        }
        if params.outer_angles[0] != 0.0 {
            return Err(MapError::DegenerateInitialization("first outer prevertex must be at angle 0".into()));
        }
        let ordered = |a: &[f64]| a.windows(2).all(|w| w[1] > w[0]) && a[a.len() - 1] < a[0] + TAU;
        if !ordered(&params.outer_angles) || !ordered(&params.inner_angles) {
            return Err(MapError::DegenerateInitialization("prevertices must be strictly ordered".into()));
        }
        params.rho = q.powf(-0.5);
        params.k_trunc = k_trunc_for(q);
        let outer = params.outer_angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        let inner = params.inner_angles.iter().map(|&t| C64::from_polar(q, t)).collect();
        let mut map = Self {
            params,
            outer,
            inner,
            coeffs: Vec::new(),
            half: 0,
            active: 0,
            r0: C64::new(0.0, 0.0),
            outer_images: Vec::new(),
            inner_images: Vec::new(),
        };
        map.fourier()?;
        let c0 = map.coeffs[map.half];
        if !(c0.norm() > 0.0 && c0.norm().is_finite()) {
            return Err(MapError::DegenerateInitialization("vanishing mean of the integrand".into()));
        }
        map.params.scale = C64::new(1.0, 0.0) / (I * TAU * c0);
        map.prevertex_images()?;
        Ok(map)
    }

    pub fn params(&self) -> &ScParams {
        &self.params
    }

    pub fn q(&self) -> f64 {
        self.params.q
    }

    pub fn rho(&self) -> f64 {
        self.params.rho
    }

    /// Images of the outer prevertices (lower polyline vertices).
    pub fn outer_images(&self) -> &[C64] {
        &self.outer_images
    }

    /// Images of the inner prevertices (upper polyline vertices, up to an
    /// integer translation).
    pub fn inner_images(&self) -> &[C64] {
        &self.inner_images
    }

    fn ln_factor(&self, u: C64, skip_main: bool) -> C64 {
        let one = C64::new(1.0, 0.0);
        let q2 = self.params.q * self.params.q;
        let mut qk = q2;
        let mut s = if skip_main { C64::new(0.0, 0.0) } else { (one - u).ln() };
        for _ in 0..self.params.k_trunc {
            s += (one - u * qk).ln() + (one - qk / u).ln();
            qk *= q2;
        }
        s
    }

    fn ln_g(&self, zeta: C64, skip: Option<(Circle, usize)>) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (k, (&a, &beta)) in self.outer.iter().zip(&self.params.beta_outer).enumerate() {
            if beta != 0.0 {
                s += self.ln_factor(zeta / a, skip == Some((Circle::Outer, k))) * beta;
            }
        }
        for (k, (&b, &beta)) in self.inner.iter().zip(&self.params.beta_inner).enumerate() {
            if beta != 0.0 {
                s += self.ln_factor(b / zeta, skip == Some((Circle::Inner, k))) * beta;
            }
        }
        s
    }

    /// The product integrand `g(ζ) = Π P(ζ/a_k)^{β_k} Π P(b_k/ζ)^{β_k}`.
    pub fn integrand(&self, zeta: C64) -> C64 {
        self.ln_g(zeta, None).exp()
    }

    fn fourier(&mut self) -> Result<(), MapError> {
        let r = self.params.q.sqrt();
        let mut n = MIN_FOURIER;
        loop {
            let samples: Vec<C64> = (0..n).map(|j| self.integrand(C64::from_polar(r, TAU * j as f64 / n as f64))).collect();
            let half = n / 2;
            let mut coeffs = vec![C64::new(0.0, 0.0); n];
            for (idx, c) in coeffs.iter_mut().enumerate() {
                let m = idx as i64 - half as i64;
                let w = C64::from_polar(1.0, -TAU * m as f64 / n as f64);
                let mut acc = C64::new(0.0, 0.0);
                let mut e = C64::new(1.0, 0.0);
                for s in &samples {
                    acc += s * e;
                    e *= w;
                }
                *c = acc / n as f64;
            }
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let edge = coeffs[0].norm().max(coeffs[1].norm()).max(coeffs[n - 1].norm());
            if edge <= 1e-17 * scale || n >= MAX_FOURIER {
                if edge > 1e-13 * scale {
                    return Err(MapError::QuadratureFailure(format!(
                        "Fourier series on the middle circle unresolved with {n} modes"
                    )));
                }
                let mut active = 0;
                for m in 1..half {
                    if coeffs[half + m].norm() > 1e-18 * scale || coeffs[half - m].norm() > 1e-18 * scale {
                        active = m;
                    }
                }
                self.coeffs = coeffs;
                self.half = half;
                self.active = active;
                return Ok(());
            }
            n *= 2;
        }
    }

    /// `∫_0^θ g(√q e^{it}) dt` from the Fourier series.
    fn arc(&self, theta: f64) -> C64 {
        let h = self.half;
        let mut s = self.coeffs[h] * theta;
        let step = C64::from_polar(1.0, theta);
        let mut e = step;
        for m in 1..=self.active {
            let mf = m as f64;
            let ep = e - 1.0;
            let em = e.conj() - 1.0;
            s += self.coeffs[h + m] * ep / (I * mf) - self.coeffs[h - m] * em / (I * mf);
            e *= step;
        }
        s
    }

    /// Main factor `(1 − e^{iδ})^β / d^β` for `δ = d` (`sigma = 1`) or
    /// `δ = 2π − d` (`sigma = −1`).
    fn regular_main(d: f64, beta: f64, sigma: f64) -> C64 {
        let mag = if d == 0.0 { 1.0 } else { (2.0 * (0.5 * d).sin() / d).powf(beta) };
        C64::from_polar(mag, beta * sigma * (d - PI) / 2.0)
    }

    /// `∫` over a boundary arc of radius `r` from `t0` to `t1`, singular at
    /// both ends with the given prevertex exponents; returns `∫ g dζ/ζ`.
    fn boundary_arc(
        &self,
        circle: Circle,
        t0: f64,
        t1: f64,
        start: (usize, f64),
        end: (usize, f64),
    ) -> Result<C64, MapError> {
        let r = match circle {
            Circle::Outer => 1.0,
            Circle::Inner => self.params.q,
        };
        let (sig_start, sig_end) = match circle {
            Circle::Outer => (1.0, -1.0),
            Circle::Inner => (-1.0, 1.0),
        };
        let len = t1 - t0;
        // keep singular panels short relative to the distance to the other circle
        let gap = (1.0 - self.params.q) / r;
        let ell = (0.5 * len).min(0.5 * gap);
        let half = 0.5 * ell;
        let mut total = C64::new(0.0, 0.0);
        // start panel, weight (1 + t)^β
        let (k0, b0) = start;
        let (x, w) = gauss_jacobi(JACOBI_NODES, 0.0, b0)?;
        for (t, wt) in x.iter().zip(&w) {
            let d = half * (1.0 + t);
            let theta = t0 + d;
            let zeta = C64::from_polar(r, theta);
            let v = Self::regular_main(d, b0, sig_start) * self.ln_g(zeta, Some((circle, k0))).exp();
            total += v * (wt * half.powf(b0) * half);
        }
        // end panel, weight (1 − t)^β
        let (k1, b1) = end;
        let (x, w) = gauss_jacobi(JACOBI_NODES, b1, 0.0)?;
        for (t, wt) in x.iter().zip(&w) {
            let d = half * (1.0 - t);
            let theta = t1 - d;
            let zeta = C64::from_polar(r, theta);
            let v = Self::regular_main(d, b1, sig_end) * self.ln_g(zeta, Some((circle, k1))).exp();
            total += v * (wt * half.powf(b1) * half);
        }
        if len > 2.0 * ell {
            let mid = integrate_interval(|t| self.integrand(C64::from_polar(r, t)), t0 + ell, t1 - ell, quad_opts())?;
            total += mid.value;
        }
        Ok(total * I)
    }

    /// `∫` along a ray `ζ = s e^{iθ}` from `s_from` to `s_to` of `g ds/s`,
    /// with the prevertex singularity at `s_sing ∈ {s_from, s_to}` handled by
    /// a Gauss–Jacobi panel.
    fn singular_ray(
        &self,
        theta: f64,
        s_regular: f64,
        s_sing: f64,
        prevertex: (Circle, usize, f64),
    ) -> Result<C64, MapError> {
        let (circle, k, beta) = prevertex;
        let dir = C64::from_polar(1.0, theta);
        let len = (s_sing - s_regular).abs();
        let ell = 0.5 * len;
        let half = 0.5 * ell;
        let sign = if s_sing > s_regular { 1.0 } else { -1.0 };
        // singular panel: s = s_sing − sign·d, d ∈ (0, ell)
        let (x, w) = gauss_jacobi(JACOBI_NODES, 0.0, beta)?;
        let mut sing = C64::new(0.0, 0.0);
        for (t, wt) in x.iter().zip(&w) {
            let d = half * (1.0 + t);
            let s = s_sing - sign * d;
            let zeta = dir * s;
            // main factor (1 − u)^β with u = ζ/a (outer, u = s) or b/ζ (inner, u = q/s)
            let main_over_d = match circle {
                Circle::Outer => 1.0,
                Circle::Inner => s.powf(-beta),
            };
            let v = self.ln_g(zeta, Some((circle, k))).exp() * main_over_d / s;
            sing += v * (wt * half.powf(beta) * half);
        }
        // regular part from s_regular to the start of the singular panel
        let s_mid = s_sing - sign * ell;
        let reg = integrate_interval(|s| self.integrand(dir * s) / s, s_regular, s_mid, quad_opts())?;
        // orientation: from s_regular towards s_sing
        Ok(reg.value + sing * sign)
    }

    fn prevertex_images(&mut self) -> Result<(), MapError> {
        let p = self.params.clone();
        let sq = p.q.sqrt();
        // R0 = ∫_1^{√q}: integral from √q to 1 reversed
        let towards_one = self.singular_ray(0.0, sq, 1.0, (Circle::Outer, 0, p.beta_outer[0]))?;
        self.r0 = -towards_one;
        let a = p.scale;
        let n1 = p.outer_angles.len();
        let mut images = vec![p.base];
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n1 {
            let t0 = p.outer_angles[k];
            let t1 = if k + 1 == n1 { TAU } else { p.outer_angles[k + 1] };
            let kn = (k + 1) % n1;
            acc += self.boundary_arc(Circle::Outer, t0, t1, (k, p.beta_outer[k]), (kn, p.beta_outer[kn]))?;
            if k + 1 < n1 {
                images.push(p.base + a * acc);
            }
        }
        let period = a * acc;
        if (period - 1.0).norm() > 1e-9 {
            return Err(MapError::QuadratureFailure(format!("outer circle period {period} differs from 1")));
        }
        self.outer_images = images;

        let n0 = p.inner_angles.len();
        let th0 = p.inner_angles[0];
        let down = self.singular_ray(th0, sq, p.q, (Circle::Inner, 0, p.beta_inner[0]))?;
        let first = p.base + a * (self.r0 + I * self.arc(th0) + down);
        let mut images = vec![first];
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n0.saturating_sub(1) {
            let t0 = p.inner_angles[k];
            let t1 = p.inner_angles[k + 1];
            acc += self.boundary_arc(Circle::Inner, t0, t1, (k, p.beta_inner[k]), (k + 1, p.beta_inner[k + 1]))?;
            images.push(first + a * acc);
        }
        self.inner_images = images;
        Ok(())
    }

    /// `f(e^s)` for `q < |e^s| < 1`; `Im s` may lie outside `[0, 2π)`, in which
    /// case the image is translated by the corresponding number of periods.
    pub fn eval_log(&self, s: C64) -> Result<C64, MapError> {
        let p = &self.params;
        let lq = p.q.ln();
        if !(s.re > lq && s.re < 0.0) {
            return Err(MapError::OutOfDomain(format!("|ζ| = {} outside (q, 1)", s.re.exp())));
        }
        let theta = s.im;
        let rad = integrate_interval(|u| self.integrand(C64::new(u, theta).exp()), 0.5 * lq, s.re, quad_opts())?;
        Ok(p.base + p.scale * (self.r0 + I * self.arc(theta) + rad.value))
    }

    /// `f(ζ)` with `arg ζ ∈ [0, 2π)`.
    pub fn eval(&self, zeta: C64) -> Result<C64, MapError> {
        let mut theta = zeta.arg();
        if theta < 0.0 {
            theta += TAU;
        }
        self.eval_log(C64::new(zeta.norm().ln(), theta))
    }

    /// `d f(e^s)/ds = A g(e^s)`.
    pub fn derivative_log(&self, s: C64) -> C64 {
        self.params.scale * self.integrand(s.exp())
    }

    /// Solves `f(e^s) = z` for `s` (the log-preimage), `Im s` near `2π Re(z − base)`.
    pub fn invert_log(&self, z: C64) -> Result<C64, MapError> {
        let lq = self.params.q.ln();
        let s0 = I * TAU * (z - self.params.base);
        let margin = 1e-3 * lq.abs();
        let s0 = C64::new(s0.re.clamp(lq + margin, -margin), s0.im);
        if let Ok(s) = self.newton(z, s0) {
            return Ok(s);
        }
        // continuation from the image of the middle-circle point on the real axis
        let start_s = C64::new(0.5 * lq, 0.0);
        let start_z = self.params.base + self.params.scale * self.r0;
        let mut s = start_s;
        let mut t: f64 = 0.0;
        let mut dt: f64 = 1.0 / 16.0;
        while t < 1.0 {
            let t_next = (t + dt).min(1.0);
            let target = start_z + (z - start_z) * t_next;
            match self.newton(target, s) {
                Ok(s_new) => {
                    s = s_new;
                    t = t_next;
                    dt = (dt * 1.5).min(0.25);
                }
                Err(_) => {
                    dt *= 0.5;
                    if dt < 1e-6 {
                        return Err(MapError::InversionFailed(format!("{z}")));
                    }
                }
            }
        }
        Ok(s)
    }

    fn newton(&self, z: C64, mut s: C64) -> Result<C64, MapError> {
        let lq = self.params.q.ln();
        let mut f = self.eval_log(s)? - z;
        for _ in 0..60 {
            if f.norm() < 1e-14 * (1.0 + z.norm()) {
                return Ok(s);
            }
            let step = -f / self.derivative_log(s);
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = s + step * lambda;
                if trial.re > lq && trial.re < 0.0 {
                    if let Ok(ft) = self.eval_log(trial) {
                        let ft = ft - z;
                        if ft.norm() < f.norm() {
                            s = trial;
                            f = ft;
                            accepted = true;
                            break;
                        }
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                if f.norm() < 1e-12 * (1.0 + z.norm()) {
                    return Ok(s);
                }
                return Err(MapError::InversionFailed(format!("{z}")));
            }
        }
        if f.norm() < 1e-12 * (1.0 + z.norm()) {
            Ok(s)
        } else {
            Err(MapError::InversionFailed(format!("{z}")))
        }
    }
}

/// Image of an annulus point `z ∈ {1/ρ < |z| < ρ}` in the period cell:
/// `f(z/ρ)` with the path from the base point `1` running along the positive
/// real axis and then counter-clockwise to `arg z ∈ [0, 2π)`.
pub fn sc_channel_map(z: C64, map: &ScMap) -> Result<C64, MapError> {
    let rho = map.rho();
    let r = z.norm();
    if !(r > 1.0 / rho && r < rho) {
        return Err(MapError::OutOfDomain(format!("|z| = {r} outside (1/ρ, ρ)")));
    }
    let zeta = z / rho;
    let hits = |centers: &[C64]| centers.iter().any(|c| (zeta - c).norm() < 1e-14);
    if hits(&map.outer) || hits(&map.inner) {
        return Err(MapError::PathThroughPrevertex(format!("{z}")));
    }
    map.eval(zeta)
}

/// Diagnostics of a parameter solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ScSolveReport {
    pub iterations: usize,
    pub residual_trace: Vec<f64>,
    /// Largest vertex-position error.
    pub vertex_residual: f64,
}

fn arc_fractions(verts: &[C64], shift: C64) -> Vec<f64> {
    let n = verts.len();
    let mut lens = Vec::with_capacity(n);
    for k in 0..n {
        let next = if k + 1 == n { verts[0] + shift } else { verts[k + 1] };
        lens.push((next - verts[k]).norm());
    }
    let total: f64 = lens.iter().sum();
    lens.iter().map(|l| l / total).collect()
}

fn softmax_angles(start: f64, logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = e.iter().sum();
    let mut out = Vec::with_capacity(logits.len());
    let mut acc = start;
    for x in e {
        out.push(acc);
        acc += TAU * x / s;
    }
    out
}

/// Solves the parameter problem with the default budget.
pub fn solve_sc_parameters(spec: &PeriodicCellSpec, init: Option<&ScParams>) -> Result<ScParams, MapError> {
    solve_sc_parameters_with(spec, init, &SolverBudget { max_iterations: 100, residual_tol: 1e-13, ..Default::default() })
        .map(|(p, _)| p)
}

/// Solves for prevertices and modulus so that the map reproduces the cell's
/// vertices: damped least squares on vertex positions, prevertex gaps
/// parametrised by softmax increments, `q = exp(−e^σ)`.
pub fn solve_sc_parameters_with(
    spec: &PeriodicCellSpec,
    init: Option<&ScParams>,
    budget: &SolverBudget,
) -> Result<(ScParams, ScSolveReport), MapError> {
    spec.validate()?;
    let (lower, beta_outer) = spec.lower_periodic_left_to_right();
    let (upper_rl, _) = spec.upper_periodic_right_to_left();
    let m = upper_rl.len();
    // upper vertices left to right, starting at ib
    let upper: Vec<C64> = (0..m).map(|k| if k == 0 { upper_rl[0] - 1.0 } else { upper_rl[m - k] }).collect();
    let beta_inner: Vec<f64> = (0..m).map(|k| spec.beta_upper[(m - k) % m]).collect();
    let n1 = lower.len();
    let n0 = upper.len();
    let area = spec.shoelace_area();
    if area <= 0.0 {
        return Err(MapError::DegenerateInitialization("cell has no area".into()));
    }

    let (outer_logits, inner_start, inner_logits, q0) = match init {
        Some(p) => {
            if p.outer_angles.len() != n1 || p.inner_angles.len() != n0 {
                return Err(MapError::DegenerateInitialization("initial parameters do not match the cell".into()));
            }
            let gaps = |a: &[f64], start: f64| {
                let n = a.len();
                (0..n).map(|k| (if k + 1 == n { start + TAU } else { a[k + 1] }) - a[k]).collect::<Vec<_>>()
            };
            let go = gaps(&p.outer_angles, 0.0);
            let gi = gaps(&p.inner_angles, p.inner_angles[0]);
            (go.iter().map(|g| g.ln()).collect::<Vec<_>>(), p.inner_angles[0], gi.iter().map(|g| g.ln()).collect::<Vec<_>>(), p.q)
        }
        None => {
            let fo = arc_fractions(&lower, C64::new(1.0, 0.0));
            let fi = arc_fractions(&upper, C64::new(1.0, 0.0));
            if fo.iter().chain(&fi).any(|f| !(*f > 0.0)) {
                return Err(MapError::DegenerateInitialization("coincident vertices".into()));
            }
            (fo.iter().map(|f| f.ln()).collect(), 0.0, fi.iter().map(|f| f.ln()).collect(), (-TAU * area).exp())
        }
    };
    if !(q0 > 0.0 && q0 < 1.0) {
        return Err(MapError::DegenerateInitialization(format!("initial ratio {q0}")));
    }

    // x = [outer logits 1.., inner start, inner logits 1.., σ]
    let mut x0 = Vec::new();
    x0.extend(outer_logits[1..].iter().map(|l| l - outer_logits[0]));
    x0.push(inner_start);
    x0.extend(inner_logits[1..].iter().map(|l| l - inner_logits[0]));
    x0.push((-q0.ln()).ln());

    let unpack = |x: &DVector<f64>| -> ScParams {
        let mut ol = vec![0.0];
        ol.extend((0..n1 - 1).map(|k| x[k]));
        let start = x[n1 - 1];
        let mut il = vec![0.0];
        il.extend((0..n0 - 1).map(|k| x[n1 + k]));
        let q = (-x[n1 + n0 - 1].exp()).exp();
        ScParams::new(
            softmax_angles(0.0, &ol),
            softmax_angles(start, &il),
            beta_outer.clone(),
            beta_inner.clone(),
            q,
            spec.junction,
        )
    };
    let residuals = |map: &ScMap| -> DVector<f64> {
        let mut r = Vec::with_capacity(2 * (n1 + n0));
        for k in 1..n1 {
            let d = map.outer_images()[k] - lower[k];
            r.push(d.re);
            r.push(d.im);
        }
        let d0 = map.inner_images()[0] - upper[0];
        let d0 = d0 - d0.re.round();
        r.push(d0.re);
        r.push(d0.im);
        for k in 1..n0 {
            let d = (map.inner_images()[k] - map.inner_images()[0]) - (upper[k] - upper[0]);
            r.push(d.re);
            r.push(d.im);
        }
        DVector::from_vec(r)
    };
    let objective = |x: &DVector<f64>| -> Option<DVector<f64>> {
        let p = unpack(x);
        if !(p.q > 1e-300 && p.q < 1.0 - 1e-12) {
            return None;
        }
        let map = ScMap::new(p).ok()?;
        let r = residuals(&map);
        r.iter().all(|v| v.is_finite()).then_some(r)
    };

    let (x, iterations, trace) = match nlls_solve(objective, DVector::from_vec(x0), budget) {
        Ok(rep) => (rep.x, rep.iterations, rep.trace),
        Err(NllsError::NoConvergence(rep)) => (rep.x, rep.iterations, rep.trace),
        Err(NllsError::InfeasibleStart) => {
            return Err(MapError::DegenerateInitialization("map cannot be evaluated at the initial guess".into()))
        }
        Err(e) => return Err(MapError::DegenerateInitialization(e.to_string())),
    };
    let map = ScMap::new(unpack(&x))?;
    let r = residuals(&map);
    let worst = r.amax();
    if !(worst < 1e-8) {
        return Err(MapError::NoConvergence { residual: worst, iterations });
    }
    let mut params = map.params().clone();
    // normalise the inner start angle into [0, 2π)
    let shift = ((params.inner_angles[0] + 1e-9) / TAU).floor() * TAU;
    if shift != 0.0 {
        for t in params.inner_angles.iter_mut() {
            *t -= shift;
        }
        params = ScMap::new(params)?.params().clone();
    }
    params.vertex_residual = worst;
    Ok((params, ScSolveReport { iterations, residual_trace: trace, vertex_residual: worst }))
}
