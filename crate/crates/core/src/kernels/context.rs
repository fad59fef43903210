use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_complex::Complex;
use rayon::prelude::*;

use super::KernelError;
use crate::cellgeom::{build_cell, CellRegion, PeriodicCellSpec};
use crate::confmap::{lift, AnnulusMap, LiftedMap, LiftedPoint, WeightEvaluators};
use crate::numerics::{CellQuadrature, CutoffPolicy, QuadratureRule};

type C64 = Complex<f64>;

/// Truncation policy for the cell kernel series.
///
/// The window starts at the dominant index `n = 0` and grows one index at a
/// time on each side; a side stops after `stop_count` consecutive terms below
/// `tol` relative to the running sum. Reaching `n_min`/`n_max` first is an
/// error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub tol: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub stop_count: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self { tol: 1e-12, n_min: -400, n_max: 400, stop_count: 5 }
    }
}

/// Periodic trapezoid policy for the quasimomentum integral: start with
/// `initial` nodes and double until successive values agree to `tol`
/// (relative), giving up beyond `max` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaRule {
    pub initial: usize,
    pub max: usize,
    pub tol: f64,
}

impl Default for EtaRule {
    fn default() -> Self {
        Self { initial: 64, max: 4096, tol: 1e-10 }
    }
}

/// Evaluation path for the periodic kernel `K_Π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMethod {
    /// Closed sech² formula.
    Closed,
    /// Quasimomentum integral of the cell kernels `K_η`.
    EtaAssembly,
    /// Real-line integral over the fused variable `t = n + η/2π`.
    TIntegral,
}

impl KernelMethod {
    pub const ALL: [KernelMethod; 3] = [KernelMethod::Closed, KernelMethod::EtaAssembly, KernelMethod::TIntegral];

    pub fn as_str(&self) -> &'static str {
        match self {
            KernelMethod::Closed => "closed",
            KernelMethod::EtaAssembly => "eta_assembly",
            KernelMethod::TIntegral => "t_integral",
        }
    }
}

impl fmt::Display for KernelMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed" => Ok(KernelMethod::Closed),
            "eta_assembly" => Ok(KernelMethod::EtaAssembly),
            "t_integral" => Ok(KernelMethod::TIntegral),
            other => Err(format!("unknown kernel method '{other}' (closed | eta_assembly | t_integral)")),
        }
    }
}

/// Lifted points of the cell quadrature nodes, computed once per context.
#[derive(Debug)]
pub(crate) struct CellGrid {
    pub quad: CellQuadrature,
    pub points: Vec<LiftedPoint>,
}

/// Everything needed to evaluate kernels of one periodic domain: the cell,
/// its solved and sector-checked lifted map, weights and evaluation policies.
#[derive(Debug, Clone)]
pub struct KernelContext {
    region: CellRegion,
    lifted: LiftedMap,
    weights: WeightEvaluators,
    pub series: SeriesControl,
    pub eta_rule: EtaRule,
    pub line_policy: CutoffPolicy,
    pub area_rule: QuadratureRule,
    series_log_rho: Option<f64>,
    grid: OnceLock<Arc<CellGrid>>,
}

impl KernelContext {
    /// Lifts `map` (rotating the annulus so that the sector assumption holds)
    /// and pairs it with the cell region.
    pub fn new(region: CellRegion, map: &AnnulusMap) -> Result<Self, KernelError> {
        Ok(Self::from_lifted(region, lift(map)?))
    }

    pub fn from_lifted(region: CellRegion, lifted: LiftedMap) -> Self {
        let weights = crate::confmap::weight_evaluators(lifted.annulus_map());
        Self {
            region,
            lifted,
            weights,
            series: SeriesControl::default(),
            eta_rule: EtaRule::default(),
            line_policy: CutoffPolicy::default(),
            area_rule: QuadratureRule::default_area(),
            series_log_rho: None,
            grid: OnceLock::new(),
        }
    }

    /// Straight channel `(0,1) × (−h, h)` with the built-in map.
    pub fn strip(h: f64) -> Result<Self, KernelError> {
        let region = build_cell(PeriodicCellSpec::rectangle(-h, h))?;
        Self::new(region, &crate::confmap::builtin_strip_map(h))
    }

    /// Builds the region, solves the map and lifts it.
    pub fn for_cell(spec: &PeriodicCellSpec) -> Result<Self, KernelError> {
        let region = build_cell(spec.clone())?;
        Self::new(region, &AnnulusMap::for_cell(spec)?)
    }

    /// Evaluates the `c(x)` coefficients of the cell series with a different
    /// modulus than the map's. Only the series (and hence the quasimomentum
    /// assembly) is affected; used to check that consistency tests are
    /// sensitive to a mis-set modulus.
    pub fn with_series_modulus(mut self, rho: f64) -> Self {
        self.series_log_rho = Some(rho.ln());
        self
    }

    pub fn region(&self) -> &CellRegion {
        &self.region
    }

    pub fn lifted(&self) -> &LiftedMap {
        &self.lifted
    }

    pub fn annulus_map(&self) -> &AnnulusMap {
        self.lifted.annulus_map()
    }

    pub fn weights(&self) -> &WeightEvaluators {
        &self.weights
    }

    pub fn rho(&self) -> f64 {
        self.lifted.rho()
    }

    pub fn log_rho(&self) -> f64 {
        self.lifted.log_rho()
    }

    /// `log ρ` used by the cell series.
    pub fn series_log_rho(&self) -> f64 {
        self.series_log_rho.unwrap_or_else(|| self.lifted.log_rho())
    }

    /// Argument of the ray on which the annulus basis is cut (the direction
    /// of `Γ` after the sector rotation).
    pub fn basis_cut(&self) -> f64 {
        std::f64::consts::FRAC_PI_2
    }

    /// Lifted map data at `z ∈ Π`.
    pub fn point(&self, z: C64) -> Result<LiftedPoint, KernelError> {
        Ok(self.lifted.eval(z)?)
    }

    /// Lifted map data at many points, evaluated in parallel.
    pub fn points(&self, zs: &[C64]) -> Result<Vec<LiftedPoint>, KernelError> {
        zs.par_iter().map(|&z| self.point(z)).collect()
    }

    /// Cell quadrature with the context's area rule.
    pub fn cell_quadrature(&self) -> Result<CellQuadrature, KernelError> {
        Ok(self.region.quadrature(&self.area_rule)?)
    }

    pub(crate) fn cell_grid(&self) -> Result<Arc<CellGrid>, KernelError> {
        if let Some(g) = self.grid.get() {
            return Ok(g.clone());
        }
        let quad = self.cell_quadrature()?;
        let points = self.points(&quad.points)?;
        let g = Arc::new(CellGrid { quad, points });
        Ok(self.grid.get_or_init(|| g).clone())
    }
}
