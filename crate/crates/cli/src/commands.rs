use clap::Args;
use periodic_bergman::analysis::{decay_profile, schur_bound, schur_probes, weight_check, write_decay_csv, WeightSpec};
use periodic_bergman::confmap::{solve_sc_parameters_with, MapArchive};
use periodic_bergman::floquet::{floquet_forward, FieldGrid, ForwardOptions, SampledFunction};
use periodic_bergman::kernels::{kernel_grid, KERNEL_CSV_COLUMNS};
use periodic_bergman::numerics::SolverBudget;
use periodic_bergman::{AnnulusMap, KernelMethod, C64};
use serde_json::json;

use crate::config::{cell_points, load_cell, load_geometry, parse_point, Common, Output, RunConfig};
use crate::error::CliError;

fn sci(x: f64) -> String {
    format!("{x:.17e}")
}

fn csv_bytes<F>(fill: F) -> Result<Vec<u8>, CliError>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        fill(&mut w).map_err(|e| CliError::Io(e.to_string()))?;
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(buf)
}

#[derive(Args, Debug)]
pub struct MapSolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Iteration budget of the parameter solver.
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

/// Solves the map of `--cell`, writes `map.toml` and `map_residual.csv`;
/// succeeds iff the vertex residual is below the tolerance.
pub fn map_solve(args: &MapSolveArgs) -> Result<(), CliError> {
    let c = &args.common;
    let tol = c.tol_or(1e-8, false)?;
    let path = c.cell.as_ref().ok_or_else(|| CliError::Input("map-solve needs --cell".into()))?;
    let (spec, text) = load_cell(path)?;
    let config = RunConfig::new("map-solve", c, json!({ "cell": text }), Some(tol)).param("max_iter", args.max_iter);
    let straight = spec.beta_lower.iter().chain(&spec.beta_upper).all(|&b| b == 0.0);
    let (map, trace, residual) = if straight {
        (AnnulusMap::strip(spec.junction.0, spec.junction.1).map_err(CliError::failed)?, vec![], 0.0)
    } else {
        let budget = SolverBudget { max_iterations: args.max_iter, residual_tol: 1e-13, ..Default::default() };
        let (params, report) = solve_sc_parameters_with(&spec, None, &budget).map_err(CliError::failed)?;
        (AnnulusMap::from_sc(params).map_err(CliError::failed)?, report.residual_trace, report.vertex_residual)
    };
    let out = Output::prepare(&c.out, &config)?;
    let archive = MapArchive::from_map(&map);
    let p = out.write("map.toml", archive.to_toml_string().as_bytes())?;
    let body = csv_bytes(|w| {
        w.write_record(["iteration", "residual"])?;
        for (k, r) in trace.iter().enumerate() {
            w.write_record(&[k.to_string(), sci(*r)])?;
        }
        Ok(())
    })?;
    out.write("map_residual.csv", &body)?;
    println!("map written to {}", p.display());
    println!("rho = {:.15}  vertex_residual = {residual:.3e}  tol = {tol:.1e}", map.rho());
    if residual < tol {
        Ok(())
    } else {
        Err(CliError::Failed(format!("vertex residual {residual:.3e} not below tolerance {tol:.1e}")))
    }
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    /// Single-point mode: evaluate K(z, w) at z = x,y.
    #[arg(long)]
    pub point: Option<String>,
    /// Second argument in single-point mode (defaults to the first).
    #[arg(long)]
    pub w: Option<String>,
    /// Pairs (z, w + d) for d = 0 … periods − 1 in grid mode.
    #[arg(long, default_value_t = 3)]
    pub periods: usize,
}

/// Kernel values on a grid of pairs for each method, with the relative
/// deviation from the first method per row and a closing summary row.
pub fn kernel(args: &KernelArgs) -> Result<(), CliError> {
    let c = &args.common;
    let tol = c.tol_or(1e-5, false)?;
    let methods = c.methods(&KernelMethod::ALL)?;
    if methods.is_empty() {
        return Err(CliError::Input("no kernel method selected".into()));
    }
    let geo = load_geometry(c)?;
    let pairs: Vec<(C64, C64)> = match &args.point {
        Some(p) => {
            let z = parse_point(p)?;
            let w = args.w.as_deref().map(parse_point).transpose()?.unwrap_or(z);
            vec![(z, w)]
        }
        None => {
            if args.periods == 0 {
                return Err(CliError::Input("--periods must be at least 1".into()));
            }
            let pts = cell_points(&geo.ctx, c.grid.as_deref().unwrap_or("4x3"))?;
            let mut pairs = Vec::new();
            for &z in &pts {
                for d in 0..args.periods {
                    for &w in &pts {
                        pairs.push((z, w + d as f64));
                    }
                }
            }
            pairs
        }
    };
    let config = RunConfig::new("kernel", c, geo.identity, Some(tol))
        .param("point", &args.point)
        .param("w", &args.w)
        .param("periods", args.periods);
    let out = Output::prepare(&c.out, &config)?;
    let rows = kernel_grid(&geo.ctx, &pairs, &methods).map_err(CliError::failed)?;
    let mut worst = 0.0f64;
    let body = csv_bytes(|w| {
        let mut head: Vec<&str> = KERNEL_CSV_COLUMNS.to_vec();
        head.push("deviation");
        w.write_record(&head)?;
        for chunk in rows.chunks(methods.len()) {
            let reference = chunk[0].k;
            for r in chunk {
                let dev = (r.k - reference).norm() / reference.norm();
                worst = worst.max(dev);
                w.write_record(&[
                    sci(r.z.re),
                    sci(r.z.im),
                    sci(r.w.re),
                    sci(r.w.im),
                    sci(r.k.re),
                    sci(r.k.im),
                    r.method.to_string(),
                    sci(dev),
                ])?;
            }
        }
        w.write_record(["", "", "", "", "", "", "summary", &sci(worst)])?;
        Ok(())
    })?;
    let p = out.write("kernel.csv", &body)?;
    if let [r] = rows.as_slice() {
        println!("K({}, {}) = {:.10} {:+.10}i  [{}]", r.z, r.w, r.k.re, r.k.im, r.method);
    }
    println!("{} rows written to {}; max cross-method deviation {worst:.3e}", rows.len(), p.display());
    if worst < tol || methods.len() == 1 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("cross-method deviation {worst:.3e} not below {tol:.1e}")))
    }
}

#[derive(Args, Debug)]
pub struct FloquetArgs {
    #[command(flatten)]
    pub common: Common,
    /// Test function: gaussian = exp(−(z−0.3)²/4) or cauchy2 = (z − 2i)⁻².
    #[arg(long, default_value = "gaussian")]
    pub function: String,
    /// Number of uniform quasimomentum nodes.
    #[arg(long, default_value_t = 16)]
    pub eta_nodes: usize,
    /// Period truncation M of the forward transform.
    #[arg(long, default_value_t = 64)]
    pub m_trunc: usize,
}

pub fn test_function(name: &str) -> Result<SampledFunction, CliError> {
    match name {
        "gaussian" => Ok(SampledFunction::new("exp(-(z-0.3)^2/4)", |z| {
            let d = z - 0.3;
            (-d * d / 4.0).exp()
        })),
        "cauchy2" => Ok(SampledFunction::new("1/(z-2i)^2", |z| {
            let d = z - C64::new(0.0, 2.0);
            1.0 / (d * d)
        })),
        other => Err(CliError::Input(format!("unknown test function '{other}' (gaussian | cauchy2)"))),
    }
}

/// Forward Floquet transform of a test function on the cell grid.
pub fn floquet(args: &FloquetArgs) -> Result<(), CliError> {
    let c = &args.common;
    let f = test_function(&args.function)?;
    let shell_tol = c.tol.map(|_| c.tol_or(0.0, false)).transpose()?;
    let geo = load_geometry(c)?;
    let pts = cell_points(&geo.ctx, c.grid.as_deref().unwrap_or("4x3"))?;
    let config = RunConfig::new("floquet", c, geo.identity, shell_tol)
        .param("function", &args.function)
        .param("eta_nodes", args.eta_nodes)
        .param("m_trunc", args.m_trunc);
    let out = Output::prepare(&c.out, &config)?;
    let opts = ForwardOptions { m_trunc: args.m_trunc, shell_tol, ..Default::default() };
    let field = floquet_forward(&f, FieldGrid::Scattered(pts), args.eta_nodes, &opts).map_err(CliError::failed)?;
    let mut buf = Vec::new();
    field.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    let p = out.write("floquet.csv", &buf)?;
    println!("{} points × {} quasimomenta written to {}", field.n_points(), field.n_eta(), p.display());
    Ok(())
}

#[derive(Args, Debug)]
pub struct DecayArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 2)]
    pub n_min: i64,
    #[arg(long, default_value_t = 8)]
    pub n_max: i64,
}

/// Fits the exponential decay of the kernel along the channel and compares
/// the rate with π²/log ρ.
pub fn decay(args: &DecayArgs) -> Result<(), CliError> {
    let c = &args.common;
    let tol = c.tol_or(0.05, false)?;
    let method = match c.methods(&[KernelMethod::Closed])?.as_slice() {
        [m] => *m,
        _ => return Err(CliError::Input("decay takes a single --method".into())),
    };
    let geo = load_geometry(c)?;
    let probes = cell_points(&geo.ctx, c.grid.as_deref().unwrap_or("5x1"))?;
    let w0 = probes[probes.len() / 2];
    let config =
        RunConfig::new("decay", c, geo.identity, Some(tol)).param("n_min", args.n_min).param("n_max", args.n_max);
    let out = Output::prepare(&c.out, &config)?;
    let fit = decay_profile(&geo.ctx, &probes, w0, (args.n_min, args.n_max), method).map_err(CliError::failed)?;
    let mut buf = Vec::new();
    write_decay_csv(&mut buf, &fit).map_err(|e| CliError::Io(e.to_string()))?;
    let p = out.write("decay.csv", &buf)?;
    let gap = (fit.rate - fit.rate_full).abs() / fit.rate_full;
    println!("decay table written to {}", p.display());
    println!(
        "rate = {:.6}  pi^2/log(rho) = {:.6}  pi^2/(2 log rho) = {:.6}  factor_two_gap = {}  c2/c1 = {:.3}",
        fit.rate,
        fit.rate_full,
        fit.rate_half,
        fit.factor_two_gap(),
        fit.c2 / fit.c1
    );
    if gap < tol {
        Ok(())
    } else {
        Err(CliError::Failed(format!("decay rate deviates from pi^2/log(rho) by {gap:.3e}")))
    }
}

#[derive(Args, Debug)]
pub struct SchurArgs {
    #[command(flatten)]
    pub common: Common,
    /// Weight W(x): `const` or `stretched:c,b` for e^{c|x|^b}.
    #[arg(long, default_value = "const")]
    pub weight: String,
    /// Periods |d| ≤ window form the row integral; the check doubles it.
    #[arg(long, default_value_t = 16)]
    pub window: usize,
}

/// The weight with the `(a, b)` of its admissibility check.
pub fn parse_weight(text: &str) -> Result<(WeightSpec, f64, f64), CliError> {
    if text == "const" {
        return Ok((WeightSpec::constant(), 1.0, 0.5));
    }
    let bad = || CliError::Input(format!("weight '{text}' is neither 'const' nor 'stretched:c,b'"));
    let params = text.strip_prefix("stretched:").ok_or_else(bad)?;
    let p = parse_point(params).map_err(|_| bad())?;
    let (cc, b) = (p.re, p.im);
    if !(cc > 0.0 && b > 0.0 && b < 1.0) {
        return Err(CliError::Input(format!("stretched weight needs c > 0 and 0 < b < 1, got c = {cc}, b = {b}")));
    }
    Ok((WeightSpec::stretched_exponential(cc, b), cc, b))
}

/// Weighted Schur row bound with its window-doubling stability.
pub fn schur(args: &SchurArgs) -> Result<(), CliError> {
    let c = &args.common;
    let tol = c.tol_or(0.01, false)?;
    let (weight, a, b) = parse_weight(&args.weight)?;
    let method = match c.methods(&[KernelMethod::Closed])?.as_slice() {
        [m] => *m,
        _ => return Err(CliError::Input("schur takes a single --method".into())),
    };
    let geo = load_geometry(c)?;
    let config = RunConfig::new("schur", c, geo.identity, Some(tol))
        .param("weight", &args.weight)
        .param("window", args.window);
    let out = Output::prepare(&c.out, &config)?;
    let check = weight_check(&weight, a, b, 64).map_err(CliError::failed)?;
    let probes = schur_probes(&geo.ctx);
    let r = schur_bound(&geo.ctx, &weight, args.window, &probes, method).map_err(CliError::failed)?;
    let body = csv_bytes(|w| {
        w.write_record(["distance", "max_row_contribution"])?;
        for (d, v) in r.per_period.iter().enumerate() {
            w.write_record(&[d.to_string(), sci(*v)])?;
        }
        Ok(())
    })?;
    let p = out.write("schur.csv", &body)?;
    println!("per-period contributions written to {}", p.display());
    println!(
        "weight {}: C = {:.4}  sup_row = {:.8}  sup_row(2x window) = {:.8}  change = {:.3e}  worst probe {}",
        weight.label(),
        check.c,
        r.sup_row,
        r.sup_row_doubled,
        r.stability,
        r.worst_probe
    );
    if r.stability.abs() < tol {
        Ok(())
    } else {
        Err(CliError::Failed(format!("row bound changes by {:.3e} under window doubling", r.stability)))
    }
}
