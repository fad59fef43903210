//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured value, the bound and the runtime. Exits non-zero if any
//! criterion fails.

mod common;

use std::f64::consts::{LN_2, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use periodic_bergman::analysis::{decay_profile, schur_bound, schur_probes, weight_check, WeightSpec};
use periodic_bergman::cellgeom::build_cell;
use periodic_bergman::confmap::{builtin_strip_map, lift, solve_sc_parameters, solve_sc_parameters_with};
use periodic_bergman::floquet::{
    check_quasiperiodicity, divergence_demo, floquet_inverse_refined, isometry_check, FloquetTransform,
    ForwardOptions, MollifierEps, SampledFunction,
};
use periodic_bergman::kernels::{
    assemble_periodic_from_eta, basis_pullback, periodic_kernel_closed, periodic_kernel_t_integral,
    project_cell_eta, sech_fourier_identity, strip_kernel_sigma,
};
use periodic_bergman::numerics::{gauss_legendre, QuadratureKind, QuadratureRule, SolverBudget};
use periodic_bergman::{AnnulusMap, KernelContext, KernelError, KernelMethod, LiftedPoint, PeriodicCellSpec, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run<F: FnOnce() -> Result<Outcome, String>>(id: usize, name: &str, budget: Duration, f: F) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(o) => (o.pass && elapsed <= budget, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "criterion {id:>2} {:<28} {}  {detail}  [{:.2} s, budget {} s]",
        name,
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Worst relative disagreement of the η-assembly and the t-integral with the
/// closed form over pairs drawn from three consecutive periods.
fn triple_consistency(ctx: &KernelContext) -> Result<f64, KernelError> {
    let base = [C64::new(0.2, 0.15), C64::new(0.65, -0.3)];
    let probes: Vec<C64> = (0..3).flat_map(|m| base.iter().map(move |z| z + m as f64)).collect();
    let mut worst = 0.0f64;
    for &z in &probes {
        for &w in &probes {
            let c = periodic_kernel_closed(ctx, z, w)?;
            let a = assemble_periodic_from_eta(ctx, z, w)?;
            let t = periodic_kernel_t_integral(ctx, z, w)?;
            worst = worst.max(rel(a, c)).max(rel(t, c));
        }
    }
    Ok(worst)
}

fn criterion_1() -> Result<Outcome, String> {
    let k0 = strip_kernel_sigma(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).map_err(err)?;
    let anchor = (k0 - 1.0 / (16.0 * PI)).norm();
    let ctx = KernelContext::strip(PI).map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut point = || C64::new(rng.random_range(-5.0..5.0), rng.random_range(-3.1..3.1));
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (z, w) = (point(), point());
        let a = periodic_kernel_closed(&ctx, z, w).map_err(err)?;
        let b = strip_kernel_sigma(z, w).map_err(err)?;
        worst = worst.max(rel(a, b));
    }
    Ok(outcome(
        anchor < 1e-12 && worst < 1e-12,
        format!("|K_Σ(0,0) − 1/16π| = {anchor:.1e}; max rel |K_Π − K_Σ| over 100 pairs = {worst:.1e} (tol 1e-12)"),
    ))
}

fn criterion_2(zigzag: &KernelContext) -> Result<Outcome, String> {
    let strip = triple_consistency(&KernelContext::strip(0.5).map_err(err)?).map_err(err)?;
    let zig = triple_consistency(zigzag).map_err(err)?;
    Ok(outcome(
        strip < 1e-5 && zig < 1e-5,
        format!("max rel deviation: strip {strip:.1e}, zigzag {zig:.1e} (tol 1e-5)"),
    ))
}

fn criterion_3() -> Result<Outcome, String> {
    let cauchy_sq = SampledFunction::new("1/(z-2i)^2", |z| {
        let d = z - C64::new(0.0, 2.0);
        1.0 / (d * d)
    });
    let gaussian = SampledFunction::new("exp(-(z-0.3)^2/4)", |z| {
        let d = z - 0.3;
        (-d * d / 4.0).exp()
    });
    let quad = build_cell(PeriodicCellSpec::rectangle(-0.5, 0.5))
        .map_err(err)?
        .quadrature(&QuadratureRule::default_area())
        .map_err(err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let zs: Vec<C64> = (0..50).map(|_| C64::new(rng.random_range(-6.0..6.0), rng.random_range(-0.5..0.5))).collect();
    let mut parseval = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut quasi = 0.0f64;
    let etas: Vec<f64> = (0..9).map(|k| -PI + TAU * k as f64 / 8.0).collect();
    for f in [cauchy_sq, gaussian] {
        let opts = ForwardOptions { m_trunc: 64, ..Default::default() };
        let iso = isometry_check(&f, &quad, &opts).map_err(err)?;
        parseval = parseval.max((iso.norm_transform_sq / iso.norm_pi_sq - 1.0).abs());
        let (vals, _) = floquet_inverse_refined(&f, &zs, &opts, 1e-9, 4096).map_err(err)?;
        for (&z, v) in zs.iter().zip(&vals) {
            round_trip = round_trip.max((v - f.eval(z)).norm());
        }
        let mollified =
            ForwardOptions { m_trunc: 1024, mollifier: Some(MollifierEps::new(1e-3).map_err(err)?), ..opts };
        let g = FloquetTransform { f, opts: mollified };
        let q = check_quasiperiodicity(&g, (-0.5, 0.5), &etas, 7, 1e-8).map_err(err)?;
        quasi = quasi.max(q.max_residual);
    }
    Ok(outcome(
        parseval < 5e-6 && round_trip < 1e-6 && quasi < 1e-8,
        format!(
            "|ratio − 1| = {parseval:.1e} (5e-6); round trip {round_trip:.1e} (1e-6); quasiperiodicity {quasi:.1e} (1e-8)"
        ),
    ))
}

fn criterion_4() -> Result<Outcome, String> {
    let ctx = KernelContext::strip(0.5).map_err(err)?;
    let ns: Vec<i64> = (-8..=8).collect();
    let mut worst = 0.0f64;
    for eta in [0.0, 1.0, -1.0, PI - 0.1, -(PI - 0.1)] {
        worst = worst.max(common::identity_residual(&common::gram(&ctx, eta, &ns)));
    }
    Ok(outcome(worst < 1e-8, format!("ρ = e^π, |n| ≤ 8: max ‖G − I‖ = {worst:.1e} (tol 1e-8)")))
}

fn criterion_5() -> Result<Outcome, String> {
    const CORE: f64 = 0.4;
    let mut ctx = KernelContext::strip(0.5).map_err(err)?;
    ctx.area_rule = QuadratureRule::new(QuadratureKind::TensorGaussLegendre, 48).map_err(err)?;
    // L² norms over the core |Im z| ≤ 0.4 of the cell by a 16 × 16 Gauss grid;
    // closer to the walls the kernel peak is narrower than the cell rule resolves
    let (g, gw) = gauss_legendre::<f64>(16);
    let mut zs = Vec::new();
    let mut weights = Vec::new();
    for (a, wa) in g.iter().zip(&gw) {
        for (b, wb) in g.iter().zip(&gw) {
            zs.push(C64::new(0.5 + 0.5 * a, CORE * b));
            weights.push(0.5 * CORE * wa * wb);
        }
    }
    let eta = 1.0;
    let coeffs: Vec<(i64, C64)> =
        (-3..=3).map(|n| (n, C64::new(1.0 / (1.0 + (n * n) as f64), 0.3 * n as f64))).collect();
    let span = |pw: &LiftedPoint| -> Result<C64, KernelError> {
        let mut s = C64::new(0.0, 0.0);
        for &(n, c) in &coeffs {
            s += c * basis_pullback(&ctx, n, eta, pw)?;
        }
        Ok(s)
    };
    let witness = |pw: &LiftedPoint| -> Result<C64, KernelError> { Ok(C64::new(pw.z.re * pw.z.im, 0.0)) };
    let nodes = ctx.points(&zs).map_err(err)?;
    let norms = |f: &(dyn Fn(&LiftedPoint) -> Result<C64, KernelError> + Sync)| -> Result<(f64, f64, f64), String> {
        let (mut diff, mut pf, mut ff) = (0.0, 0.0, 0.0);
        for (p, &q) in nodes.iter().zip(&weights) {
            let v = project_cell_eta(&ctx, eta, |w| f(w), p.z).map_err(err)?;
            let fv = f(p).map_err(err)?;
            diff += (v - fv).norm_sqr() * q;
            pf += v.norm_sqr() * q;
            ff += fv.norm_sqr() * q;
        }
        Ok((diff.sqrt(), pf.sqrt(), ff.sqrt()))
    };
    let (d, _, f) = norms(&span)?;
    let (_, pw, w) = norms(&witness)?;
    let repro = d / f;
    let contraction = pw / w;
    Ok(outcome(
        repro < 1e-6 && contraction < 1.0,
        format!("core |Im z| ≤ {CORE}: ‖P_η f − f‖/‖f‖ = {repro:.1e} (1e-6); non-analytic witness ‖P_η g‖/‖g‖ = {contraction:.4} (< 1)"),
    ))
}

fn criterion_6() -> Result<Outcome, String> {
    let mut worst = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            let (s, a) = (i as f64, 0.5 + 0.375 * j as f64);
            let (l, r) = sech_fourier_identity(s, a).map_err(err)?;
            worst = worst.max((l - r).abs());
        }
    }
    Ok(outcome(worst < 1e-8, format!("max |lhs − rhs| on 5×5 grid = {worst:.1e} (tol 1e-8)")))
}

fn criterion_7() -> Result<Outcome, String> {
    let ctx = KernelContext::strip(0.5).map_err(err)?;
    let probes: Vec<C64> = (0..5).map(|k| C64::new(0.1 + 0.2 * k as f64, 0.0)).collect();
    let fit = decay_profile(&ctx, &probes, C64::new(0.0, 0.0), (2, 8), KernelMethod::Closed).map_err(err)?;
    let gap = (fit.rate - PI).abs() / PI;
    Ok(outcome(
        gap < 0.05,
        format!(
            "fitted rate {:.5} vs π (rel {gap:.1e}, tol 5e-2); π²/log ρ = {:.5}, stated π²/(2 log ρ) = {:.5}; factor-2 gap flagged: {}",
            fit.rate,
            fit.rate_full,
            fit.rate_half,
            fit.factor_two_gap()
        ),
    ))
}

fn criterion_8() -> Result<Outcome, String> {
    let ctx = KernelContext::strip(0.5).map_err(err)?;
    let probes = schur_probes(&ctx);
    let mut parts = Vec::new();
    let mut pass = true;
    for w in [WeightSpec::constant(), WeightSpec::stretched_exponential(1.0, 0.5)] {
        let c = weight_check(&w, 1.0, 0.5, 64).map_err(err)?;
        let r = schur_bound(&ctx, &w, 16, &probes, KernelMethod::Closed).map_err(err)?;
        pass &= r.sup_row.is_finite() && r.stability.abs() < 0.01;
        parts.push(format!("{}: C = {:.3}, sup row {:.6}, change 16→32 {:.1e}", w.label(), c.c, r.sup_row, r.stability));
    }
    Ok(outcome(pass, format!("{} (tol 1e-2)", parts.join("; "))))
}

fn criterion_9(zigzag_residual: f64, consistency: &Result<Outcome, String>) -> Result<Outcome, String> {
    let h = 0.5;
    let straight = PeriodicCellSpec {
        lower: vec![C64::new(1.0, -h), C64::new(0.5, -h), C64::new(0.0, -h)],
        upper: vec![C64::new(1.0, h), C64::new(0.5, h), C64::new(0.0, h)],
        beta_lower: vec![0.0, 0.0],
        beta_upper: vec![0.0, 0.0],
        junction: (-h, h),
        height_bound: h,
    };
    let params = solve_sc_parameters(&straight, None).map_err(err)?;
    let rho_err = (params.rho - (TAU * h).exp()).abs();
    let sc = lift(&AnnulusMap::from_sc(params).map_err(err)?).map_err(err)?;
    let builtin = lift(&builtin_strip_map(h)).map_err(err)?;
    let mut dev = 0.0f64;
    for i in 0..9 {
        for j in 0..7 {
            let z = C64::new(0.05 + 0.1125 * i as f64, -0.45 + 0.15 * j as f64);
            let (a, b) = (sc.eval(z).map_err(err)?, builtin.eval(z).map_err(err)?);
            dev = dev.max((a.value - b.value).norm());
        }
    }
    let c2 = matches!(consistency, Ok(o) if o.pass);
    Ok(outcome(
        rho_err < 1e-6 && dev < 1e-8 && zigzag_residual < 1e-8 && c2,
        format!(
            "straight channel |ρ − e^π| = {rho_err:.1e} (1e-6), map vs builtin {dev:.1e} (1e-8); zigzag vertex residual {zigzag_residual:.1e} (1e-8), criterion 2 {}",
            if c2 { "passed" } else { "failed" }
        ),
    ))
}

fn criterion_10() -> Result<Outcome, String> {
    let t = divergence_demo(10_000);
    let r = t.row(10_000).ok_or("missing row M = 10⁴")?;
    let growth = (r.doubling_increment - LN_2).abs() / LN_2;
    let w = t.z * PI;
    let limit = w.cos() / w.sin() * PI;
    let settled = (r.symmetric - limit).norm();
    Ok(outcome(
        growth < 1e-3 && r.symmetric_cauchy < 1e-3 && settled < 1e-3,
        format!(
            "M = 10⁴: S_M = {:.6}, S_M − ln M = {:.6}, S_2M − S_M = {:.6} vs ln 2 (rel {growth:.1e}, 1e-3); symmetric |T_2M − T_M| = {:.1e}, |T_M − π cot πz| = {settled:.1e}",
            r.one_sided.re, r.minus_log.re, r.doubling_increment, r.symmetric_cauchy
        ),
    ))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;
    all &= run(1, "strip anchor", secs(1), criterion_1);

    // the zigzag map is solved once and shared by criteria 2 and 9
    let solve_start = Instant::now();
    let solved = solve_sc_parameters_with(
        &common::zigzag(),
        None,
        &SolverBudget { max_iterations: 100, residual_tol: 1e-13, ..Default::default() },
    );
    let solve_time = solve_start.elapsed();
    let (zigzag, residual) = match solved {
        Ok((params, report)) => {
            let region = build_cell(common::zigzag()).expect("zigzag cell is valid");
            let ctx = AnnulusMap::from_sc(params).map_err(err).and_then(|m| KernelContext::new(region, &m).map_err(err));
            (ctx, report.vertex_residual)
        }
        Err(e) => (Err(err(e)), f64::INFINITY),
    };

    let mut c2: Result<Outcome, String> = Err("not run".into());
    all &= run(2, "triple kernel consistency", secs(180), || {
        c2 = match &zigzag {
            Ok(ctx) => criterion_2(ctx),
            Err(e) => Err(format!("zigzag map unavailable: {e}")),
        };
        match &c2 {
            Ok(o) => Ok(outcome(o.pass, o.detail.clone())),
            Err(e) => Err(e.clone()),
        }
    });
    all &= run(3, "Floquet unitarity", secs(60), criterion_3);
    all &= run(4, "basis orthonormality", secs(60), criterion_4);
    all &= run(5, "reproducing property", secs(120), criterion_5);
    all &= run(6, "Fourier identity", secs(10), criterion_6);
    all &= run(7, "decay rate", secs(30), criterion_7);
    all &= run(8, "Schur boundedness", secs(60), criterion_8);
    all &= run(9, "SC solver", secs(300), || {
        let mut o = criterion_9(residual, &c2)?;
        // the shared zigzag solve counts against this budget too
        o.pass &= solve_time <= secs(300);
        o.detail.push_str(&format!("; zigzag solve {:.1} s", solve_time.as_secs_f64()));
        Ok(o)
    });
    all &= run(10, "divergence demo", secs(10), criterion_10);

    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}
