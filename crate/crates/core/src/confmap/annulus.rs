use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex;

use super::sc::ScMap;
use super::{MapError, ScParams};
use crate::cellgeom::{exp_map, PeriodicCellSpec};

type C64 = Complex<f64>;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// How the map was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Builtin,
    ScSolved,
}

/// Underlying construction of an [`AnnulusMap`].
#[derive(Debug, Clone)]
pub enum MapKind {
    /// Straight channel `(0,1) × (a, b)`: `φ(w) = e^{π(a+b)} w`.
    Strip { a: f64, b: f64 },
    /// Solved Schwarz–Christoffel map of a polygonal cell.
    Schwarz(Arc<ScMap>),
}

/// Values of `φ` and `φ′` at `E(z)` for a cell point `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellImage {
    /// `φ(E(z))`.
    pub annulus: C64,
    /// `φ′(E(z))`.
    pub derivative: C64,
}

/// Conformal map `φ: D → A = {1/ρ < |z| < ρ}` of the exponential image of a
/// period cell, together with its inverse `ψ`, composed with a rotation
/// `e^{iω}` of the annulus.
#[derive(Debug, Clone)]
pub struct AnnulusMap {
    kind: MapKind,
    rho: f64,
    rotation: f64,
    junction: (f64, f64),
}

/// Built-in map for the straight cell `(0,1) × (−h, h)`: the image `D` is
/// already the annulus with `ρ = e^{2πh}` and `φ` is the identity.
pub fn builtin_strip_map(h: f64) -> AnnulusMap {
    AnnulusMap::strip(-h, h).expect("h > 0")
}

impl AnnulusMap {
    /// Built-in map for the straight cell `(0,1) × (a, b)`.
    pub fn strip(a: f64, b: f64) -> Result<Self, MapError> {
        if !(b > a) {
            return Err(MapError::DegenerateInitialization(format!("strip needs b > a, got ({a}, {b})")));
        }
        Ok(Self { kind: MapKind::Strip { a, b }, rho: (PI * (b - a)).exp(), rotation: 0.0, junction: (a, b) })
    }

    /// Map of a solved Schwarz–Christoffel parameter set.
    pub fn from_sc(params: ScParams) -> Result<Self, MapError> {
        let map = ScMap::new(params)?;
        let rho = map.rho();
        let junction = map.params().junction;
        Ok(Self { kind: MapKind::Schwarz(Arc::new(map)), rho, rotation: 0.0, junction })
    }

    /// Solves the parameter problem for a polygonal cell. Cells whose
    /// polylines are both straight use the built-in map.
    pub fn for_cell(spec: &PeriodicCellSpec) -> Result<Self, MapError> {
        spec.validate()?;
        if spec.beta_lower.iter().chain(&spec.beta_upper).all(|&b| b == 0.0) {
            return Self::strip(spec.junction.0, spec.junction.1);
        }
        Self::from_sc(super::solve_sc_parameters(spec, None)?)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn log_rho(&self) -> f64 {
        self.rho.ln()
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn junction(&self) -> (f64, f64) {
        self.junction
    }

    pub fn provenance(&self) -> Provenance {
        match self.kind {
            MapKind::Strip { .. } => Provenance::Builtin,
            MapKind::Schwarz(_) => Provenance::ScSolved,
        }
    }

    pub fn sc_map(&self) -> Option<&ScMap> {
        match &self.kind {
            MapKind::Schwarz(m) => Some(m),
            MapKind::Strip { .. } => None,
        }
    }

    /// The same map followed by the rotation `z ↦ e^{iω} z` of the annulus.
    pub fn rotated(&self, omega: f64) -> Self {
        let mut r = self.clone();
        r.rotation = (self.rotation + omega).rem_euclid(TAU);
        r
    }

    /// Same map with a prescribed total rotation (used by archives).
    pub fn with_rotation(&self, omega: f64) -> Self {
        let mut r = self.clone();
        r.rotation = omega;
        r
    }

    fn spin(&self) -> C64 {
        C64::from_polar(1.0, self.rotation)
    }

    /// `φ(E(z))` and `φ′(E(z))` for `z` in the closed cell `0 ≤ Re z ≤ 1`.
    pub fn cell_image(&self, z: C64) -> Result<CellImage, MapError> {
        match &self.kind {
            MapKind::Strip { a, b } => {
                let s = self.spin() * (PI * (a + b)).exp();
                Ok(CellImage { annulus: s * exp_map(z), derivative: s })
            }
            MapKind::Schwarz(m) => {
                let s = m.invert_log(z)?;
                let zeta = s.exp();
                let annulus = self.spin() * self.rho * zeta;
                // ψ(ζ_A) = E(f(ζ)) with ζ = e^{−iω} ζ_A / ρ, so
                // φ′(E z) = 1/ψ′ = e^{iω} ρ ζ / (i2π E(z) A g(ζ))
                let derivative = annulus / (I * TAU * exp_map(z) * m.derivative_log(s));
                Ok(CellImage { annulus, derivative })
            }
        }
    }

    /// Reduces `w ∈ D` to its cell preimage `z` with `E(z) = w`, `Re z ∈ [0, 1)`.
    fn cell_point(w: C64) -> Result<C64, MapError> {
        if w.norm() == 0.0 || !w.norm().is_finite() {
            return Err(MapError::OutOfDomain(format!("{w}")));
        }
        let z = w.ln() / (I * TAU);
        Ok(C64::new(z.re - z.re.floor(), z.im))
    }

    /// `φ(w)` for `w ∈ D`.
    pub fn forward(&self, w: C64) -> Result<C64, MapError> {
        Ok(self.cell_image(Self::cell_point(w)?)?.annulus)
    }

    /// `φ′(w)` for `w ∈ D`.
    pub fn forward_derivative(&self, w: C64) -> Result<C64, MapError> {
        Ok(self.cell_image(Self::cell_point(w)?)?.derivative)
    }

    fn check_annulus(&self, zeta: C64) -> Result<(), MapError> {
        let r = zeta.norm();
        if !(r > 1.0 / self.rho && r < self.rho) {
            return Err(MapError::OutOfDomain(format!("|z| = {r} outside (1/ρ, ρ) with ρ = {}", self.rho)));
        }
        Ok(())
    }

    /// `ψ(ζ) = φ⁻¹(ζ)` for `ζ ∈ A`.
    pub fn inverse(&self, zeta: C64) -> Result<C64, MapError> {
        self.check_annulus(zeta)?;
        let u = zeta / self.spin();
        match &self.kind {
            MapKind::Strip { a, b } => Ok(u * (-PI * (a + b)).exp()),
            MapKind::Schwarz(m) => Ok(exp_map(m.eval(u / self.rho)?)),
        }
    }

    /// `ψ′(ζ)` for `ζ ∈ A`.
    pub fn inverse_derivative(&self, zeta: C64) -> Result<C64, MapError> {
        self.check_annulus(zeta)?;
        let u = zeta / self.spin();
        match &self.kind {
            MapKind::Strip { a, b } => Ok((-PI * (a + b)).exp() / self.spin()),
            MapKind::Schwarz(m) => {
                let x = u / self.rho;
                let f = m.eval(x)?;
                let s = C64::new(x.norm().ln(), x.arg());
                Ok(I * TAU * exp_map(f) * m.derivative_log(s) / x / (self.rho * self.spin()))
            }
        }
    }

    /// `v(ζ) = ψ′(ζ)/(2π ψ(ζ))` for `ζ ∈ A`.
    pub fn v(&self, zeta: C64) -> Result<C64, MapError> {
        self.check_annulus(zeta)?;
        match &self.kind {
            MapKind::Strip { .. } => Ok(C64::new(1.0, 0.0) / (TAU * zeta)),
            MapKind::Schwarz(m) => {
                let x = zeta / self.spin() / self.rho;
                let s = C64::new(x.norm().ln(), x.arg());
                Ok(I * m.derivative_log(s) / zeta)
            }
        }
    }

    /// Samples of the image curve `Γ = φ(D ∩ ℝ⁺)`, the image of the left
    /// junction segment `{iy : a < y < b}`.
    pub fn gamma_samples(&self, n: usize) -> Result<Vec<C64>, MapError> {
        let (a, b) = self.junction;
        (0..n)
            .map(|k| {
                let t = (k as f64 + 0.5) / n as f64;
                self.cell_image(C64::new(0.0, a + t * (b - a))).map(|c| c.annulus)
            })
            .collect()
    }
}
