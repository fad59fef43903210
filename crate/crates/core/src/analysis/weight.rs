use std::fmt;
use std::sync::Arc;

use super::AnalysisError;

/// Shape of a weight `W(x)` that depends on the real part only.
#[derive(Clone)]
pub enum WeightProfile {
    /// `W ≡ 1`.
    Constant,
    /// `W(x) = e^{c|x|^b}`.
    StretchedExponential { c: f64, b: f64 },
    /// Any positive function, given through `log W`.
    Custom { label: String, log_w: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

impl fmt::Debug for WeightProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightProfile::Constant => write!(f, "Constant"),
            WeightProfile::StretchedExponential { c, b } => write!(f, "StretchedExponential(c={c}, b={b})"),
            WeightProfile::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// A weight on the periodic domain depending only on `Re z`.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    pub profile: WeightProfile,
}

impl WeightSpec {
    pub fn constant() -> Self {
        Self { profile: WeightProfile::Constant }
    }

    pub fn stretched_exponential(c: f64, b: f64) -> Self {
        Self { profile: WeightProfile::StretchedExponential { c, b } }
    }

    /// Weight given by `log W`.
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(label: &str, log_w: F) -> Self {
        Self { profile: WeightProfile::Custom { label: label.to_string(), log_w: Arc::new(log_w) } }
    }

    pub fn log_w(&self, x: f64) -> f64 {
        match &self.profile {
            WeightProfile::Constant => 0.0,
            WeightProfile::StretchedExponential { c, b } => c * x.abs().powf(*b),
            WeightProfile::Custom { log_w, .. } => log_w(x),
        }
    }

    pub fn w(&self, x: f64) -> f64 {
        self.log_w(x).exp()
    }

    pub fn label(&self) -> String {
        format!("{:?}", self.profile)
    }
}

/// Smallest empirical constant in
/// `(1/C) W(x) e^{−a|n|^b} ≤ W(x+n) ≤ C W(x) e^{a|n|^b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightReport {
    pub c: f64,
    pub a: f64,
    pub b: f64,
    pub worst_x: f64,
    pub worst_n: i64,
    pub samples: usize,
}

/// Largest constant accepted before a profile is declared not to be a weight.
pub const WEIGHT_CAP: f64 = 1e6;

/// Samples `x ∈ [0, 1]` (101 points) and `|n| ≤ n_range` and returns the
/// smallest constant satisfying both bounds, or `NotAWeight` if it exceeds
/// [`WEIGHT_CAP`]. Computed in the logarithmic domain, so `W ≡ 1` gives
/// exactly `C = 1`.
pub fn weight_check(spec: &WeightSpec, a: f64, b: f64, n_range: i64) -> Result<WeightReport, AnalysisError> {
    if !(b > 0.0 && b < 1.0) || !(a > 0.0) || n_range < 1 {
        return Err(AnalysisError::InvalidParameter(format!("need a > 0, b ∈ (0,1), n_range ≥ 1; got {a}, {b}, {n_range}")));
    }
    let mut worst = (0.0f64, 0.0, 0i64);
    let mut samples = 0;
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        let lx = spec.log_w(x);
        for n in -n_range..=n_range {
            let growth = a * (n.unsigned_abs() as f64).powf(b);
            let d = spec.log_w(x + n as f64) - lx;
            let need = (d - growth).max(-d - growth);
            samples += 1;
            if need > worst.0 || !need.is_finite() {
                worst = (need, x, n);
            }
        }
    }
    let c = worst.0.exp();
    if !(c <= WEIGHT_CAP) {
        return Err(AnalysisError::NotAWeight { x: worst.1, n: worst.2, cap: WEIGHT_CAP });
    }
    Ok(WeightReport { c, a, b, worst_x: worst.1, worst_n: worst.2, samples })
}
