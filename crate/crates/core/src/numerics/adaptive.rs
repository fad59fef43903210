use std::sync::OnceLock;

use num_complex::Complex;

use super::{GaussRule, NumericsError};

type C64 = Complex<f64>;

/// Tolerances for [`integrate_interval`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth before the integral is declared a failure.
    pub max_depth: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-13, max_depth: 48 }
    }
}

/// Integral value with its order-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: C64,
    pub error: f64,
}

fn panel_rules() -> &'static (GaussRule, GaussRule) {
    static RULES: OnceLock<(GaussRule, GaussRule)> = OnceLock::new();
    RULES.get_or_init(|| (GaussRule::legendre(10), GaussRule::legendre(20)))
}

/// Adaptive `∫_a^b f(t) dt`: each panel is integrated with 10- and 20-point
/// Gauss–Legendre rules and bisected until the two agree to the panel's share
/// of the tolerance. Panels are processed left to right, so the result is
/// bitwise reproducible.
pub fn integrate_interval<F>(mut f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Result<Estimate, NumericsError>
where
    F: FnMut(f64) -> C64,
{
    if a == b {
        return Ok(Estimate { value: C64::new(0.0, 0.0), error: 0.0 });
    }
    let (low_rule, high_rule) = panel_rules();
    let total = (b - a).abs();
    let whole_high = high_rule.integrate(a, b, &mut f);
    let whole_low = low_rule.integrate(a, b, &mut f);
    let scale = whole_high.norm();
    let tol = opts.abs_tol.max(opts.rel_tol * scale);
    if (whole_high - whole_low).norm() <= tol {
        return Ok(Estimate { value: whole_high, error: (whole_high - whole_low).norm() });
    }
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    // stack of (left, right, depth); right half pushed first so the left is processed first
    let mut stack = vec![(a, 0.5 * (a + b), 1usize), (0.5 * (a + b), b, 1usize)];
    stack.reverse();
    while let Some((l, r, depth)) = stack.pop() {
        let high = high_rule.integrate(l, r, &mut f);
        let low = low_rule.integrate(l, r, &mut f);
        let diff = (high - low).norm();
        let local_tol = tol * (r - l).abs() / total;
        // the last clause accepts negligible panels at integrable endpoint
        // singularities, where the width-proportional share never suffices
        if diff <= local_tol || diff <= 8.0 * f64::EPSILON * high.norm() || diff <= 1e-4 * tol {
            value += high;
            error += diff;
            continue;
        }
        if depth >= opts.max_depth {
            return Err(NumericsError::QuadratureFailure(format!(
                "bisection depth {depth} reached on [{l}, {r}] with estimate {diff:.3e}"
            )));
        }
        let m = 0.5 * (l + r);
        stack.push((m, r, depth + 1));
        stack.push((l, m, depth + 1));
    }
    Ok(Estimate { value, error })
}

/// Tail handling for [`integrate_line_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPolicy {
    /// A side is truncated once the integrand magnitude on two consecutive
    /// panels stays below `cutoff` times the largest magnitude seen.
    pub cutoff: f64,
    /// Panel width used when marching outwards.
    pub panel: f64,
    /// Maximum number of panels per side.
    pub max_panels: usize,
    pub options: AdaptiveOptions,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self { cutoff: 1e-16, panel: 1.0, max_panels: 4000, options: AdaptiveOptions::default() }
    }
}

/// `∫_ℝ f(t) dt` for an exponentially decaying integrand: an adaptive centre
/// panel plus panels marching outwards on each side until the tail falls below
/// the cutoff.
pub fn integrate_line_adaptive<F>(mut f: F, policy: CutoffPolicy) -> Result<C64, NumericsError>
where
    F: FnMut(f64) -> C64,
{
    let p = policy.panel;
    let center = integrate_interval(&mut f, -p, p, policy.options)?;
    let mut scale = center.value.norm() / (2.0 * p);
    for t in [-p, 0.0, p] {
        scale = scale.max(f(t).norm());
    }
    let mut sides = [C64::new(0.0, 0.0); 2];
    for (side, sign) in [(0usize, 1.0f64), (1, -1.0)] {
        let mut quiet = 0;
        let mut k = 1usize;
        loop {
            if k > policy.max_panels {
                return Err(NumericsError::NoDecayDetected { panels: policy.max_panels });
            }
            let (l, r) = (sign * p * k as f64, sign * p * (k + 1) as f64);
            let (lo, hi) = if l < r { (l, r) } else { (r, l) };
            let panel = integrate_interval(&mut f, lo, hi, policy.options)?;
            sides[side] += panel.value;
            let edge = f(r).norm().max(panel.value.norm() / p);
            scale = scale.max(f(l).norm());
            if edge < policy.cutoff * scale {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            k += 1;
        }
    }
    Ok(center.value + sides[0] + sides[1])
}
