mod common;

use std::f64::consts::PI;

use periodic_bergman::analysis::{
    decay_profile, phi_prime_bounds, schur_bound, schur_probes, weight_check, write_decay_csv, AnalysisError,
    WeightSpec,
};
use periodic_bergman::{KernelContext, KernelMethod, C64};
use proptest::prelude::*;

fn probes_a() -> Vec<C64> {
    (0..5).map(|k| C64::new(0.1 + 0.2 * k as f64, 0.0)).collect()
}

fn probes_b() -> Vec<C64> {
    (0..5).map(|k| C64::new(0.15 + 0.2 * k as f64, 0.3)).collect()
}

#[test]
fn strip_decay_rate_is_pi_squared_over_log_rho() {
    let ctx = KernelContext::strip(0.5).unwrap();
    assert!((ctx.log_rho() - PI).abs() < 1e-12);
    let fit = decay_profile(&ctx, &probes_a(), C64::new(0.0, 0.0), (2, 8), KernelMethod::Closed).unwrap();
    assert!((fit.rate - PI).abs() < 0.05 * PI, "rate {}", fit.rate);
    assert!((fit.rate_full - PI).abs() < 1e-12 && (fit.rate_half - PI / 2.0).abs() < 1e-12);
    assert!(fit.factor_two_gap());
    assert!(fit.c2 / fit.c1 < 10.0);
    let other = decay_profile(&ctx, &probes_b(), C64::new(0.0, 0.0), (2, 8), KernelMethod::Closed).unwrap();
    assert!((other.rate - fit.rate).abs() < 0.02 * fit.rate, "{} vs {}", other.rate, fit.rate);

    let mut buf = Vec::new();
    write_decay_csv(&mut buf, &fit).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("n,peak,fit\n"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn decay_underflow_is_reported() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let r = decay_profile(&ctx, &probes_a(), C64::new(0.0, 0.0), (250, 260), KernelMethod::Closed);
    assert!(matches!(r, Err(AnalysisError::UnderflowBeyondN { .. })), "{r:?}");
}

#[test]
fn strip_phi_prime_is_one() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let r = phi_prime_bounds(&ctx);
    assert_eq!((r.inf, r.sup), (1.0, 1.0));
    assert!(!r.blows_up);
}

#[test]
fn strip_schur_rows_are_stable() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let probes = schur_probes(&ctx);
    assert_eq!(probes.len(), 20);
    for w in [WeightSpec::constant(), WeightSpec::stretched_exponential(1.0, 0.5)] {
        let r = schur_bound(&ctx, &w, 16, &probes, KernelMethod::Closed).unwrap();
        assert!(r.sup_row.is_finite() && r.sup_row > 0.0);
        assert!(r.stability >= 0.0 && r.stability < 0.01, "{}: {}", w.label(), r.stability);
        assert!(r.per_period.windows(2).skip(1).all(|p| p[1] <= p[0]));
    }
}

#[test]
fn schur_rejects_unbalanced_weight() {
    let ctx = KernelContext::strip(0.5).unwrap();
    let probes = schur_probes(&ctx);
    // W(Re z)/W(Re w) = e^{8(|Re w| − |Re z|)} outgrows the e^{−π|n|} decay of the kernel
    let w = WeightSpec::custom("exp(-8|x|)", |x| -8.0 * x.abs());
    let r = schur_bound(&ctx, &w, 4, &probes[..2], KernelMethod::Closed);
    assert!(matches!(r, Err(AnalysisError::NotSummable { .. })), "{r:?}");
}

#[test]
fn gentle_and_reentrant_phi_prime() {
    let gentle = KernelContext::for_cell(&common::gentle_zigzag()).unwrap();
    let r = phi_prime_bounds(&gentle);
    assert!(r.inf > 0.1 && r.sup < 10.0, "{r:?}");
    assert!(!r.blows_up, "{r:?}");

    let zig = KernelContext::for_cell(&common::zigzag()).unwrap();
    let r = phi_prime_bounds(&zig);
    assert!(r.blows_up, "{r:?}");
    assert!(r.levels.windows(2).all(|w| w[1].sup > w[0].sup));
    assert!(r.blowup_exponent > 0.2 && r.blowup_exponent < 0.45, "{}", r.blowup_exponent);
}

#[test]
fn weight_examples() {
    assert_eq!(weight_check(&WeightSpec::constant(), 1.0, 0.5, 50).unwrap().c, 1.0);
    let r = weight_check(&WeightSpec::stretched_exponential(1.0, 0.5), 1.0, 0.5, 50).unwrap();
    assert!(r.c <= 1.0 + 1e-12);
    assert!(matches!(
        weight_check(&WeightSpec::custom("exp(x^2)", |x| x * x), 1.0, 0.5, 50),
        Err(AnalysisError::NotAWeight { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stretched_exponentials_are_weights(c in 0.01f64..2.0, b in 0.05f64..0.95) {
        // |x+n|^b ≤ |x|^b + |n|^b, so a = c gives the constant 1
        let r = weight_check(&WeightSpec::stretched_exponential(c, b), c, b, 30).unwrap();
        prop_assert!(r.c <= 1.0 + 1e-12);
    }

    #[test]
    fn weight_constant_is_at_least_one(c in -2.0f64..2.0, a in 0.1f64..3.0, b in 0.1f64..0.9) {
        let spec = WeightSpec::custom("tilt", move |x| c * (x * 0.3).sin());
        if let Ok(r) = weight_check(&spec, a, b, 10) {
            prop_assert!(r.c >= 1.0);
        }
    }
}
