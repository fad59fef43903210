use std::f64::consts::{LN_2, PI, TAU};

use clap::Args;
use periodic_bergman::analysis::{decay_profile, schur_bound, schur_probes, WeightSpec};
use periodic_bergman::floquet::{
    check_quasiperiodicity, divergence_demo, floquet_inverse_refined, isometry_check, FloquetTransform,
    ForwardOptions, MollifierEps,
};
use periodic_bergman::kernels::{
    assemble_periodic_from_eta, basis_pullback, gram_matrix, identity_residual, periodic_kernel_closed,
    periodic_kernel_t_integral, project_cell_eta, sech_fourier_identity,
};
use periodic_bergman::numerics::{QuadratureKind, QuadratureRule};
use periodic_bergman::{KernelContext, KernelError, KernelMethod, LiftedPoint, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::test_function;
use crate::config::{cell_points, load_geometry, Common, Output, RunConfig};
use crate::error::CliError;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
}

/// One line of the verification report.
#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub check: &'static str,
    /// Measured deviation; `null` when the computation itself failed.
    pub value: Option<f64>,
    pub bound: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

type Measure<'a> = Box<dyn Fn() -> Result<f64, String> + 'a>;

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Worst relative disagreement of the η-assembly and the t-integral with the
/// closed form over two probes repeated in three consecutive periods.
fn consistency(ctx: &KernelContext) -> Result<f64, String> {
    let probes = schur_probes(ctx);
    let base = [probes[4], probes[13]];
    let pts: Vec<C64> = (0..3).flat_map(|m| base.iter().map(move |z| z + m as f64)).collect();
    let mut worst = 0.0f64;
    for &z in &pts {
        for &w in &pts {
            let c = periodic_kernel_closed(ctx, z, w).map_err(|e| e.to_string())?;
            let a = assemble_periodic_from_eta(ctx, z, w).map_err(|e| e.to_string())?;
            let t = periodic_kernel_t_integral(ctx, z, w).map_err(|e| e.to_string())?;
            worst = worst.max(rel(a, c)).max(rel(t, c));
        }
    }
    Ok(worst)
}

/// `max |P_η f − f| / max |f|` over the Schur probes for `f` in the span of
/// the pulled-back basis.
fn reproducing(ctx: &KernelContext) -> Result<f64, String> {
    let eta = 1.0;
    let coeffs: Vec<(i64, C64)> =
        (-3..=3).map(|n| (n, C64::new(1.0 / (1.0 + (n * n) as f64), 0.3 * n as f64))).collect();
    let span = |pw: &LiftedPoint| -> Result<C64, KernelError> {
        let mut s = C64::new(0.0, 0.0);
        for &(n, c) in &coeffs {
            s += c * basis_pullback(ctx, n, eta, pw)?;
        }
        Ok(s)
    };
    let (mut diff, mut size) = (0.0f64, 0.0f64);
    for z in schur_probes(ctx) {
        let p = project_cell_eta(ctx, eta, span, z).map_err(|e| e.to_string())?;
        let f = span(&ctx.point(z).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        diff = diff.max((p - f).norm());
        size = size.max(f.norm());
    }
    Ok(diff / size)
}

fn random_points(ctx: &KernelContext, seed: u64, count: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = ctx.region().spec().height_bound;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = C64::new(rng.random_range(0.0..1.0), rng.random_range(-m..m));
        if ctx.region().contains(z) {
            out.push(z + rng.random_range(-6i64..6) as f64);
        }
    }
    out
}

fn run_checks(ctx: &KernelContext, fine: &KernelContext, seed: u64, tol: Option<f64>) -> Vec<CheckLine> {
    let gaussian = || test_function("gaussian").expect("built-in test function");
    let checks: Vec<(&'static str, f64, Measure)> = vec![
        ("kernel_consistency", 1e-5, Box::new(|| consistency(ctx))),
        (
            "fourier_identity",
            1e-8,
            Box::new(|| {
                let mut worst = 0.0f64;
                for i in 0..5 {
                    for j in 0..5 {
                        let (l, r) = sech_fourier_identity(i as f64, 0.5 + 0.375 * j as f64)
                            .map_err(|e| e.to_string())?;
                        worst = worst.max((l - r).abs());
                    }
                }
                Ok(worst)
            }),
        ),
        (
            "gram",
            1e-8,
            Box::new(|| {
                let ns: Vec<i64> = (-8..=8).collect();
                let g = gram_matrix(ctx, 1.0, &ns).map_err(|e| e.to_string())?;
                Ok(identity_residual(&g))
            }),
        ),
        ("reproducing", 1e-6, Box::new(|| reproducing(fine))),
        (
            "isometry",
            5e-6,
            Box::new(|| {
                let quad = ctx.cell_quadrature().map_err(|e| e.to_string())?;
                let r = isometry_check(&gaussian(), &quad, &ForwardOptions::default()).map_err(|e| e.to_string())?;
                Ok(r.relative_gap)
            }),
        ),
        (
            "round_trip",
            1e-6,
            Box::new(|| {
                let f = gaussian();
                let zs = random_points(ctx, seed, 20);
                let opts = ForwardOptions { m_trunc: 32, ..Default::default() };
                let (vals, _) = floquet_inverse_refined(&f, &zs, &opts, 1e-9, 4096).map_err(|e| e.to_string())?;
                Ok(zs.iter().zip(&vals).map(|(&z, v)| (v - f.eval(z)).norm()).fold(0.0, f64::max))
            }),
        ),
        (
            "quasiperiodicity",
            1e-8,
            Box::new(|| {
                let eps = MollifierEps::new(1e-3).map_err(|e| e.to_string())?;
                let opts = ForwardOptions { m_trunc: 1024, mollifier: Some(eps), ..Default::default() };
                let g = FloquetTransform { f: gaussian(), opts };
                let etas: Vec<f64> = (0..9).map(|k| -PI + TAU * k as f64 / 8.0).collect();
                let r = check_quasiperiodicity(&g, ctx.region().spec().junction, &etas, 7, 1e-8)
                    .map_err(|e| e.to_string())?;
                Ok(r.max_residual)
            }),
        ),
        (
            "decay",
            0.05,
            Box::new(|| {
                let probes = cell_points(ctx, "5x1").map_err(|e| e.to_string())?;
                let w0 = probes[probes.len() / 2];
                let fit =
                    decay_profile(ctx, &probes, w0, (2, 8), KernelMethod::Closed).map_err(|e| e.to_string())?;
                Ok((fit.rate - fit.rate_full).abs() / fit.rate_full)
            }),
        ),
        (
            "schur",
            0.01,
            Box::new(|| {
                let r = schur_bound(ctx, &WeightSpec::constant(), 16, &schur_probes(ctx), KernelMethod::Closed)
                    .map_err(|e| e.to_string())?;
                Ok(r.stability.abs())
            }),
        ),
        (
            "divergence",
            1e-3,
            Box::new(|| {
                let t = divergence_demo(10_000);
                let r = t.row(10_000).ok_or("missing row M = 10^4")?;
                Ok((r.doubling_increment - LN_2).abs() / LN_2)
            }),
        ),
    ];
    checks
        .into_iter()
        .map(|(check, default, measure)| {
            let bound = tol.unwrap_or(default);
            match measure() {
                Ok(v) => CheckLine { check, value: Some(v), bound, pass: v < bound, error: None },
                Err(e) => CheckLine { check, value: None, bound, pass: false, error: Some(e) },
            }
        })
        .collect()
}

/// Runs the verification suite, writing `verify.jsonl` and echoing each line.
pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let c = &args.common;
    let tol = c.tol.map(|_| c.tol_or(0.0, true)).transpose()?;
    let geo = load_geometry(c)?;
    let mut fine = geo.ctx.clone();
    fine.area_rule = QuadratureRule::new(QuadratureKind::TensorGaussLegendre, 48).map_err(CliError::failed)?;
    let config = RunConfig::new("verify", c, geo.identity, tol);
    let out = Output::prepare(&c.out, &config)?;
    let lines = run_checks(&geo.ctx, &fine, c.seed, tol);
    let mut body = String::new();
    for l in &lines {
        let s = serde_json::to_string(l).expect("report lines serialise");
        println!("{s}");
        body.push_str(&s);
        body.push('\n');
    }
    out.write("verify.jsonl", body.as_bytes())?;
    let failed: Vec<&str> = lines.iter().filter(|l| !l.pass).map(|l| l.check).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(format!("failed checks: {}", failed.join(", "))))
    }
}
