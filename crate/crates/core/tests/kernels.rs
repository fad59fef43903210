mod common;

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use periodic_bergman::kernels::{
    assemble_periodic_from_eta, basis_fn, basis_pullback, cell_kernel_eta, cell_series, eval_kernel,
    halfplane_kernel, kernel_grid, norm_const, periodic_kernel_closed, periodic_kernel_t_integral, project,
    project_cell_eta, pullback_kernel, sech_fourier_identity, strip_kernel_sigma, write_kernel_csv,
    ProjectionOptions, KERNEL_CSV_COLUMNS,
};
use periodic_bergman::floquet::SampledFunction;
use periodic_bergman::{KernelContext, KernelError, KernelMethod, SeriesControl, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gentle() -> &'static KernelContext {
    static CTX: OnceLock<KernelContext> = OnceLock::new();
    CTX.get_or_init(|| KernelContext::for_cell(&common::gentle_zigzag()).unwrap())
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn gram_matrix_is_identity() {
    let ctx = KernelContext::strip(0.5).unwrap();
    assert!((ctx.rho() - PI.exp()).abs() < 1e-9);
    let ns: Vec<i64> = (-8..=8).collect();
    for eta in [0.0, 1.0, -1.0, PI - 0.1, -(PI - 0.1)] {
        let worst = common::identity_residual(&common::gram(&ctx, eta, &ns));
        assert!(worst < 1e-8, "η = {eta}: ‖G − I‖ = {worst:e}");
    }
}

#[test]
fn basis_rejects_points_on_the_cut() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let on_cut = C64::from_polar(1.5, ctx.basis_cut());
    assert!(matches!(basis_fn(&ctx, 0, 0.5, on_cut), Err(KernelError::BranchViolation(_))));
    assert!(basis_fn(&ctx, 0, 0.5, C64::from_polar(1.5, ctx.basis_cut() + 1e-6)).is_ok());
}

#[test]
fn pullback_equals_composed_basis() {
    // e_n = f_n ∘ φ ∘ E up to a unimodular factor e^{iηk} recording which
    // sheet of ζ^{η/2π} the lifted map lands on; the factor is common to all n
    let ctx = gentle();
    let eta = 1.0;
    for &z in &[C64::new(0.3, 0.1), C64::new(0.7, -0.2), C64::new(0.55, 0.3)] {
        let p = ctx.point(z).unwrap();
        let ratios: Vec<C64> = (-2..=2)
            .map(|n| basis_pullback(ctx, n, eta, &p).unwrap() / basis_fn(ctx, n, eta, p.annulus).unwrap())
            .collect();
        let k = ratios[0].arg() / eta;
        assert!((k - k.round()).abs() < 1e-10, "{z}: {ratios:?}");
        for r in &ratios {
            assert!((r.norm() - 1.0).abs() < 1e-10 && (r - ratios[0]).norm() < 1e-10, "{z}: {ratios:?}");
        }
    }
}

#[test]
fn reproducing_on_basis_span() {
    for ctx in [&KernelContext::strip(0.5).unwrap(), gentle()] {
        let eta = 1.0;
        let coeffs: Vec<(i64, C64)> =
            (-3..=3).map(|n| (n, C64::new(1.0 / (1.0 + n as f64 * n as f64), 0.3 * n as f64))).collect();
        let f = |pw: &periodic_bergman::LiftedPoint| -> Result<C64, KernelError> {
            let mut s = C64::new(0.0, 0.0);
            for &(n, c) in &coeffs {
                s += c * basis_pullback(ctx, n, eta, pw)?;
            }
            Ok(s)
        };
        for &z in &[C64::new(0.4, 0.1), C64::new(0.8, -0.3), C64::new(0.15, 0.0)] {
            let pf = project_cell_eta(ctx, eta, f, z).unwrap();
            let fz = f(&ctx.point(z).unwrap()).unwrap();
            assert!(rel(pf, fz) < 1e-6, "{z}: {pf} vs {fz}");
        }
    }
}

#[test]
fn triple_consistency_on_three_periods() {
    for ctx in [&KernelContext::strip(0.5).unwrap(), gentle()] {
        let zs = [C64::new(0.3, 0.1), C64::new(1.6, -0.2), C64::new(2.45, 0.25)];
        let ws = [C64::new(0.7, -0.1), C64::new(1.2, 0.3), C64::new(2.9, 0.0)];
        for &z in &zs {
            for &w in &ws {
                let c = periodic_kernel_closed(ctx, z, w).unwrap();
                let a = assemble_periodic_from_eta(ctx, z, w).unwrap();
                let t = periodic_kernel_t_integral(ctx, z, w).unwrap();
                assert!(rel(a, c) < 1e-5 && rel(t, c) < 1e-5, "{z} {w}: {c} {a} {t}");
            }
        }
    }
}

#[test]
fn kernel_is_hermitian_on_solved_cell() {
    let ctx = gentle();
    let (z, w) = (C64::new(0.35, 0.2), C64::new(1.8, -0.25));
    for m in KernelMethod::ALL {
        let a = eval_kernel(ctx, m, z, w).unwrap();
        let b = eval_kernel(ctx, m, w, z).unwrap();
        assert!(rel(a, b.conj()) < 1e-9, "{m}: {a} vs {b}");
    }
    let d = eval_kernel(ctx, KernelMethod::Closed, z, z).unwrap();
    assert!(d.re > 0.0 && d.im.abs() < 1e-12 * d.re);
}

#[test]
fn cell_kernel_is_hermitian_and_positive() {
    let ctx = gentle();
    let (z, w) = (C64::new(0.35, 0.2), C64::new(0.8, -0.25));
    for eta in [-3.0, 0.0, 1.0, 2.5] {
        let a = cell_kernel_eta(ctx, z, w, eta).unwrap();
        let b = cell_kernel_eta(ctx, w, z, eta).unwrap();
        assert!(rel(a, b.conj()) < 1e-10);
        assert!(cell_kernel_eta(ctx, z, z, eta).unwrap().re > 0.0);
    }
    assert!(matches!(cell_kernel_eta(ctx, C64::new(1.5, 0.0), w, 0.0), Err(KernelError::OutOfDomain(_))));
}

#[test]
fn series_divergence_is_reported() {
    // |Im Δ| beyond log ρ/π makes one side of the series grow
    let r = cell_series(C64::new(0.1, 2.0), 0.5, 1.0, &SeriesControl::default());
    assert!(matches!(r, Err(KernelError::SeriesNotConverged { .. })), "{r:?}");
}

#[test]
fn strip_half_width_pi_matches_sigma_kernel() {
    let ctx = KernelContext::strip(PI).unwrap();
    assert!((ctx.log_rho() - 2.0 * PI * PI).abs() < 1e-9);
    let k0 = strip_kernel_sigma(C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
    assert!((k0.re - 1.0 / (16.0 * PI)).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut point = || C64::new(rng.random_range(-5.0..5.0), rng.random_range(-3.0..3.0));
    for _ in 0..100 {
        let (z, w) = (point(), point());
        let a = periodic_kernel_closed(&ctx, z, w).unwrap();
        let b = strip_kernel_sigma(z, w).unwrap();
        assert!((a - b).norm() < 1e-12 * b.norm().max(1e-3), "{z} {w}: {a} vs {b}");
    }
}

#[test]
fn conformal_transport_and_scaling() {
    // z ↦ i e^{z/2} maps Σ onto the upper half-plane
    let map = |z: C64| {
        let v = C64::new(0.0, 1.0) * (z / 2.0).exp();
        (v, Some(v / 2.0))
    };
    for &(z, w) in &[(C64::new(0.3, 1.0), C64::new(-2.0, -2.5)), (C64::new(4.0, 0.0), C64::new(4.0, 0.0))] {
        let a = pullback_kernel(halfplane_kernel, map, z, w).unwrap();
        let b = strip_kernel_sigma(z, w).unwrap();
        assert!(rel(a, b) < 1e-12, "{a} vs {b}");
    }
    // K_{2Ω}(2z, 2w) = K_Ω(z, w)/4
    let small = KernelContext::strip(0.5).unwrap();
    let big = KernelContext::strip(1.0).unwrap();
    let (z, w) = (C64::new(0.3, 0.2), C64::new(1.4, -0.1));
    let a = periodic_kernel_closed(&big, 2.0 * z, 2.0 * w).unwrap();
    let b = periodic_kernel_closed(&small, z, w).unwrap();
    assert!(rel(a * 4.0, b) < 1e-12);
}

#[test]
fn fourier_identity_grid() {
    for i in 0..5 {
        for j in 0..5 {
            let (s, a) = (i as f64, 0.5 + 0.375 * j as f64);
            let (l, r) = sech_fourier_identity(s, a).unwrap();
            assert!((l - r).abs() < 1e-8, "s={s} a={a}: {l} vs {r}");
        }
    }
}

#[test]
fn projection_reproduces_kernel_sections() {
    // P_Π applied to K(·, w₀) returns it
    let ctx = KernelContext::strip(0.5).unwrap();
    let w0 = C64::new(0.5, 0.1);
    let section = {
        let ctx = ctx.clone();
        SampledFunction::new("K(., w0)", move |w| periodic_kernel_closed(&ctx, w, w0).unwrap())
    };
    let z = C64::new(0.2, -0.15);
    let r = project(&ctx, &section, KernelMethod::Closed, z, &ProjectionOptions::default()).unwrap();
    let exact = periodic_kernel_closed(&ctx, z, w0).unwrap();
    assert!(rel(r.value, exact) < 1e-8, "{} vs {exact}", r.value);
    assert!(r.tail < 1e-10 * exact.norm());
    let tight = ProjectionOptions { m_trunc: 1, tail_tol: 1e-12 };
    assert!(matches!(
        project(&ctx, &section, KernelMethod::Closed, z, &tight),
        Err(KernelError::TailNotNegligible { .. })
    ));
}

#[test]
fn kernel_csv_export() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let pairs = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)), (C64::new(0.5, 0.1), C64::new(1.5, -0.1))];
    let rows = kernel_grid(&ctx, &pairs, &KernelMethod::ALL).unwrap();
    assert_eq!(rows.len(), 6);
    let mut buf = Vec::new();
    write_kernel_csv(&mut buf, &rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), KERNEL_CSV_COLUMNS.join(","));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    let re_k: f64 = first[4].parse().unwrap();
    assert!((re_k - PI / 4.0).abs() < 1e-12);
    assert_eq!(first[6], "closed");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn strip_kernel_is_hermitian(x1 in -3.0f64..3.0, y1 in -0.45f64..0.45, x2 in -3.0f64..3.0, y2 in -0.45f64..0.45) {
        let ctx = KernelContext::strip(0.5).unwrap();
        let (z, w) = (C64::new(x1, y1), C64::new(x2, y2));
        let a = periodic_kernel_closed(&ctx, z, w).unwrap();
        let b = periodic_kernel_closed(&ctx, w, z).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1e-300));
        // periodicity: K(z+1, w+1) = K(z, w)
        let c = periodic_kernel_closed(&ctx, z + 1.0, w + 1.0).unwrap();
        prop_assert!((a - c).norm() <= 1e-11 * a.norm().max(1e-300));
    }

    #[test]
    fn strip_diagonal_dominates(x1 in 0.0f64..1.0, y1 in -0.45f64..0.45, x2 in -2.0f64..2.0, y2 in -0.45f64..0.45) {
        // |K(z,w)|² ≤ K(z,z) K(w,w)
        let ctx = KernelContext::strip(0.5).unwrap();
        let (z, w) = (C64::new(x1, y1), C64::new(x2, y2));
        let kzw = periodic_kernel_closed(&ctx, z, w).unwrap().norm_sqr();
        let kzz = periodic_kernel_closed(&ctx, z, z).unwrap().re;
        let kww = periodic_kernel_closed(&ctx, w, w).unwrap().re;
        prop_assert!(kzw <= kzz * kww * (1.0 + 1e-12));
    }

    #[test]
    fn norm_constant_matches_radial_integral(n in -6i64..6, eta in -3.1f64..3.1) {
        let rho = PI.exp();
        let c = norm_const(n, eta, rho).unwrap();
        let x = 2.0 * (n as f64 + 1.0) + eta / PI;
        let inv = if x.abs() < 1e-12 { 4.0 * PI * rho.ln() } else { TAU * (rho.powf(x) - rho.powf(-x)) / x };
        prop_assert!((c * c * inv - 1.0).abs() < 1e-12);
    }
}
