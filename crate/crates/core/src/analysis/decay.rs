use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex;

use super::AnalysisError;
use crate::kernels::{eval_kernel_points, KernelContext, KernelMethod};

type C64 = Complex<f64>;

/// Exponential envelope of `n ↦ max_{g ∈ G} |K_Π(g + n, w₀)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// `(n, peak)` pairs used in the fit.
    pub peaks: Vec<(i64, f64)>,
    /// Fitted rate `r` in `peak ≈ C e^{−r n}`.
    pub rate: f64,
    /// Intercept `log C` of the fit.
    pub log_prefactor: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    /// Rate `π²/(2 log ρ)` as stated for the kernel bound.
    pub rate_half: f64,
    /// Rate `π²/log ρ` implied by the sech² asymptotics.
    pub rate_full: f64,
    /// Envelope constants `C₁ ≤ peak_n e^{r n} ≤ C₂` over the fitted range.
    pub c1: f64,
    pub c2: f64,
    /// First `n` whose peak underflowed (excluded from the fit).
    pub underflow_from: Option<i64>,
}

impl DecayFit {
    /// True when the measured rate is closer to `π²/log ρ` than to
    /// `π²/(2 log ρ)`, i.e. the stated bound is off by a factor of two.
    pub fn factor_two_gap(&self) -> bool {
        (self.rate - self.rate_full).abs() < (self.rate - self.rate_half).abs()
    }
}

/// Fits the decay of `|K_Π(z, w₀)|` for `z − n` ranging over the probe set
/// `G ⊂ ϖ`, `n_lo ≤ n ≤ n_hi`.
pub fn decay_profile(
    ctx: &KernelContext,
    probes: &[C64],
    w0: C64,
    (n_lo, n_hi): (i64, i64),
    method: KernelMethod,
) -> Result<DecayFit, AnalysisError> {
    if probes.is_empty() || n_hi < n_lo + 1 {
        return Err(AnalysisError::InvalidParameter("need probes and at least two periods".into()));
    }
    let pw = ctx.point(w0).map_err(AnalysisError::from)?;
    let base = ctx.points(probes)?;
    let mut peaks = Vec::new();
    let mut underflow_from = None;
    for n in n_lo..=n_hi {
        let mut peak = 0.0f64;
        for p in &base {
            let k = eval_kernel_points(ctx, method, &p.translated(n as f64), &pw)?;
            peak = peak.max(k.norm());
        }
        if !(peak > 1e-300) {
            underflow_from = Some(n);
            break;
        }
        peaks.push((n, peak));
    }
    if peaks.len() < 3 {
        return Err(AnalysisError::UnderflowBeyondN { n: underflow_from.unwrap_or(n_hi) });
    }
    let m = peaks.len() as f64;
    let (sx, sy) = peaks.iter().fold((0.0, 0.0), |(a, b), &(n, p)| (a + n as f64, b + p.ln()));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = peaks.iter().fold((0.0, 0.0), |(a, b), &(n, p)| {
        let dx = n as f64 - mx;
        (a + dx * dx, b + dx * (p.ln() - my))
    });
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual =
        (peaks.iter().map(|&(n, p)| (p.ln() - intercept - slope * n as f64).powi(2)).sum::<f64>() / m).sqrt();
    let rate = -slope;
    let env: Vec<f64> = peaks.iter().map(|&(n, p)| p * (rate * n as f64).exp()).collect();
    let l = ctx.log_rho();
    Ok(DecayFit {
        rate,
        log_prefactor: intercept,
        residual,
        rate_half: PI * PI / (2.0 * l),
        rate_full: PI * PI / l,
        c1: env.iter().copied().fold(f64::INFINITY, f64::min),
        c2: env.iter().copied().fold(0.0, f64::max),
        peaks,
        underflow_from,
    })
}

/// Writes `n, peak, fit` rows.
pub fn write_decay_csv<W: Write>(out: W, fit: &DecayFit) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "peak", "fit"])?;
    for &(n, p) in &fit.peaks {
        let f = (fit.log_prefactor - fit.rate * n as f64).exp();
        w.write_record(&[n.to_string(), format!("{p:.17e}"), format!("{f:.17e}")])?;
    }
    w.flush()?;
    Ok(())
}
