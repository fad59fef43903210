use std::f64::consts::PI;

use num_complex::Complex;

use super::{AnnulusMap, MapError};

type C64 = Complex<f64>;

/// Weight functions of the cell and annulus inner products:
/// `W(z) = 1/(4π²|z|²)` on `D`, `v = ψ′/(2πψ)` and `V = |v|²` on `A`.
#[derive(Debug, Clone)]
pub struct WeightEvaluators {
    map: AnnulusMap,
}

pub fn weight_evaluators(map: &AnnulusMap) -> WeightEvaluators {
    WeightEvaluators { map: map.clone() }
}

impl WeightEvaluators {
    /// `W(z) = 1/(4π²|z|²)`.
    pub fn w(&self, z: C64) -> f64 {
        1.0 / (4.0 * PI * PI * z.norm_sqr())
    }

    /// `v(z) = ψ′(z)/(2πψ(z))` on the annulus.
    pub fn v(&self, z: C64) -> Result<C64, MapError> {
        self.map.v(z)
    }

    /// `V(z) = |ψ′(z)|²/(4π²|ψ(z)|²)` on the annulus.
    pub fn big_v(&self, z: C64) -> Result<f64, MapError> {
        Ok(self.map.v(z)?.norm_sqr())
    }
}
