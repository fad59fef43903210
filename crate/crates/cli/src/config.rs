use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use periodic_bergman::cellgeom::build_cell;
use periodic_bergman::confmap::MapArchive;
use periodic_bergman::{AnnulusMap, CellError, KernelContext, KernelMethod, PeriodicCellSpec, C64};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Flags shared by every command.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Cell specification (TOML). Without it the built-in straight channel is used.
    #[arg(long)]
    pub cell: Option<PathBuf>,
    /// Map archive written by `map-solve`; skips solving the map.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Half height h of the built-in straight channel (0,1) × (−h, h).
    #[arg(long, default_value_t = 0.5)]
    pub strip: f64,
    /// Evaluation grid `NXxNY` (or `N` for N × N) over the cell.
    #[arg(long)]
    pub grid: Option<String>,
    /// Tolerance of the command's pass/fail decision.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Seed for probe sampling; recorded in every output header.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Kernel method(s): closed, eta_assembly, t_integral, or all.
    #[arg(long)]
    pub method: Option<String>,
    /// Multiplies the modulus used by the cell-kernel series (sensitivity
    /// studies; 1 leaves the map untouched).
    #[arg(long, default_value_t = 1.0)]
    pub rho_scale: f64,
}

impl Common {
    /// The tolerance, or `default` when not given. Negative or non-finite
    /// values are input errors; zero is accepted only where `allow_zero`.
    pub fn tol_or(&self, default: f64, allow_zero: bool) -> Result<f64, CliError> {
        let t = self.tol.unwrap_or(default);
        if !t.is_finite() || t < 0.0 || (t == 0.0 && !allow_zero) {
            return Err(CliError::Input(format!("tolerance must be positive, got {t}")));
        }
        Ok(t)
    }

    pub fn methods(&self, default: &[KernelMethod]) -> Result<Vec<KernelMethod>, CliError> {
        match self.method.as_deref() {
            None => Ok(default.to_vec()),
            Some("all") => Ok(KernelMethod::ALL.to_vec()),
            Some(list) => list.split(',').map(|m| m.trim().parse().map_err(CliError::Input)).collect(),
        }
    }
}

/// Reads a text input file; a missing or unreadable input is an input error.
pub fn read_input(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {what} {}: {e}", path.display())))
}

fn cell_error(e: CellError) -> CliError {
    let msg = e.to_string();
    if msg.starts_with("InvalidCell") {
        CliError::Input(msg)
    } else {
        CliError::Input(format!("InvalidCell: {msg}"))
    }
}

/// Parses and validates the cell given by `--cell`.
pub fn load_cell(path: &Path) -> Result<(PeriodicCellSpec, String), CliError> {
    let text = read_input(path, "cell spec")?;
    let spec = PeriodicCellSpec::from_toml_str(&text).map_err(cell_error)?;
    spec.validate().map_err(cell_error)?;
    Ok((spec, text))
}

/// The kernel context selected by the flags, with a description of the
/// geometry inputs for the configuration hash.
pub struct Geometry {
    pub ctx: KernelContext,
    pub identity: Value,
}

pub fn load_geometry(c: &Common) -> Result<Geometry, CliError> {
    if !(c.rho_scale.is_finite() && c.rho_scale > 0.0) {
        return Err(CliError::Input(format!("--rho-scale must be positive, got {}", c.rho_scale)));
    }
    let archive = match &c.map {
        Some(p) => {
            let text = read_input(p, "map archive")?;
            let arch = MapArchive::from_toml_str(&text).map_err(CliError::input)?;
            Some((arch, text))
        }
        None => None,
    };
    let (spec, cell_text) = match &c.cell {
        Some(p) => {
            let (spec, text) = load_cell(p)?;
            (spec, Some(text))
        }
        None => match &archive {
            Some((arch, _)) if arch.kind == "strip" => {
                (PeriodicCellSpec::rectangle(arch.junction[0], arch.junction[1]), None)
            }
            Some(_) => return Err(CliError::Input("a Schwarz–Christoffel map archive needs --cell".into())),
            None => {
                if !(c.strip.is_finite() && c.strip > 0.0) {
                    return Err(CliError::Input(format!("--strip must be positive, got {}", c.strip)));
                }
                (PeriodicCellSpec::rectangle(-c.strip, c.strip), None)
            }
        },
    };
    let map = match &archive {
        Some((arch, _)) => arch.to_map().map_err(CliError::input)?,
        None => AnnulusMap::for_cell(&spec).map_err(CliError::failed)?,
    };
    let region = build_cell(spec).map_err(cell_error)?;
    let mut ctx = KernelContext::new(region, &map).map_err(CliError::failed)?;
    if c.rho_scale != 1.0 {
        let rho = ctx.rho() * c.rho_scale;
        if !(rho > 1.0) {
            return Err(CliError::Input(format!("scaled modulus {rho} must exceed 1")));
        }
        ctx = ctx.with_series_modulus(rho);
    }
    let identity = json!({
        "cell": cell_text,
        "map": archive.map(|a| a.1),
        "strip": if c.cell.is_none() && c.map.is_none() { Some(c.strip) } else { None },
        "rho_scale": c.rho_scale,
    });
    Ok(Geometry { ctx, identity })
}

/// Everything that determines the content of a command's outputs. Its hash
/// goes into every output header; the output directory is not part of it.
#[derive(Debug, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub geometry: Value,
    pub grid: Option<String>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub method: Option<String>,
    pub params: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    pub fn new(command: &'static str, common: &Common, geometry: Value, tol: Option<f64>) -> Self {
        Self {
            command,
            geometry,
            grid: common.grid.clone(),
            tol,
            seed: common.seed,
            method: common.method.clone(),
            params: BTreeMap::new(),
        }
    }

    pub fn param<V: Serialize>(mut self, key: &'static str, value: V) -> Self {
        self.params.insert(key, serde_json::to_value(value).expect("parameters serialise"));
        self
    }

    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("configuration serialises");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    pub fn header(&self) -> String {
        format!("# pbergman {} config_hash={} seed={}\n", env!("CARGO_PKG_VERSION"), self.hash(), self.seed)
    }
}

/// Output directory; every file written through it starts with the header.
pub struct Output {
    dir: PathBuf,
    header: String,
}

impl Output {
    pub fn prepare(dir: &Path, config: &RunConfig) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), header: config.header() })
    }

    pub fn write(&self, name: &str, body: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let mut bytes = self.header.clone().into_bytes();
        bytes.extend_from_slice(body);
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// `NXxNY` or `N`.
pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Input(format!("grid '{text}' is not of the form NXxNY"));
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    let nums: Result<Vec<usize>, _> = parts.iter().map(|p| p.trim().parse::<usize>()).collect();
    match nums.map_err(|_| bad())?.as_slice() {
        [n] => Ok((*n, *n)),
        [nx, ny] => Ok((*nx, *ny)),
        _ => Err(bad()),
    }
}

/// `x,y` as a complex number.
pub fn parse_point(text: &str) -> Result<C64, CliError> {
    let bad = || CliError::Input(format!("point '{text}' is not of the form x,y"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let x: f64 = a.trim().parse().map_err(|_| bad())?;
    let y: f64 = b.trim().parse().map_err(|_| bad())?;
    Ok(C64::new(x, y))
}

/// Midpoints of an `nx × ny` lattice over `(0,1) × (−M, M)` that lie inside
/// the cell. An empty result is an input error.
pub fn cell_points(ctx: &KernelContext, grid: &str) -> Result<Vec<C64>, CliError> {
    let (nx, ny) = parse_grid(grid)?;
    let m = ctx.region().spec().height_bound;
    let mut out = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let z = C64::new((i as f64 + 0.5) / nx as f64, -m + 2.0 * m * (j as f64 + 0.5) / ny as f64);
            if ctx.region().contains(z) {
                out.push(z);
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Input(format!("grid '{grid}' has no points inside the cell")));
    }
    Ok(out)
}
