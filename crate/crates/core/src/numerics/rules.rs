use num_complex::Complex;

use super::{gauss_legendre, pairwise_sum, Estimate, NumericsError};
use crate::cellgeom::CellRegion;

type C64 = Complex<f64>;

/// Family of a [`QuadratureRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// `n × n` Gauss–Legendre on the unit square.
    TensorGaussLegendre,
    /// Gauss–Legendre collapsed onto the reference triangle (Duffy map).
    CollapsedTriangle,
    /// Equispaced rule on a period.
    PeriodicTrapezoid,
    /// Marker for adaptive line integration (no fixed nodes).
    AdaptiveLine,
}

/// Nodes and positive weights on a reference element, with the polynomial
/// (or trigonometric) exactness degree checked when the rule is built.
///
/// Reference elements: the unit square `[0,1]²`, the triangle
/// `{u, v ≥ 0, u + v ≤ 1}`, and the period `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub order: usize,
    /// Total degree integrated exactly (trigonometric degree for the
    /// periodic rule).
    pub degree: usize,
    pub nodes: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(kind: QuadratureKind, order: usize) -> Result<Self, NumericsError> {
        if order == 0 && kind != QuadratureKind::AdaptiveLine {
            return Err(NumericsError::InvalidRule("order must be positive".into()));
        }
        let rule = match kind {
            QuadratureKind::TensorGaussLegendre => {
                let (x, w) = gauss_legendre::<f64>(order);
                let mut nodes = Vec::with_capacity(order * order);
                let mut weights = Vec::with_capacity(order * order);
                for i in 0..order {
                    for j in 0..order {
                        nodes.push([0.5 * (1.0 + x[i]), 0.5 * (1.0 + x[j])]);
                        weights.push(0.25 * w[i] * w[j]);
                    }
                }
                Self { kind, order, degree: 2 * order - 1, nodes, weights }
            }
            QuadratureKind::CollapsedTriangle => {
                let (x, w) = gauss_legendre::<f64>(order);
                let mut nodes = Vec::with_capacity(order * order);
                let mut weights = Vec::with_capacity(order * order);
                for i in 0..order {
                    let s = 0.5 * (1.0 + x[i]);
                    for j in 0..order {
                        let t = 0.5 * (1.0 + x[j]);
                        nodes.push([s * (1.0 - t), s * t]);
                        weights.push(0.25 * w[i] * w[j] * s);
                    }
                }
                Self { kind, order, degree: 2 * order - 2, nodes, weights }
            }
            QuadratureKind::PeriodicTrapezoid => {
                let nodes = (0..order).map(|j| [j as f64 / order as f64, 0.0]).collect();
                Self { kind, order, degree: order - 1, nodes, weights: vec![1.0 / order as f64; order] }
            }
            QuadratureKind::AdaptiveLine => {
                Self { kind, order: 0, degree: 0, nodes: Vec::new(), weights: Vec::new() }
            }
        };
        rule.verify()?;
        Ok(rule)
    }

    /// Default area rule: 32 × 32 tensor Gauss–Legendre.
    pub fn default_area() -> Self {
        Self::new(QuadratureKind::TensorGaussLegendre, 32).expect("default rule is valid")
    }

    fn verify(&self) -> Result<(), NumericsError> {
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(NumericsError::InvalidRule("non-positive weight".into()));
        }
        let check = |got: f64, exact: f64, what: &str| {
            if (got - exact).abs() > 1e-12 * exact.abs().max(1.0) {
                Err(NumericsError::InvalidRule(format!("{what}: {got} vs exact {exact}")))
            } else {
                Ok(())
            }
        };
        match self.kind {
            QuadratureKind::TensorGaussLegendre => {
                if self.nodes.iter().any(|p| !(0.0..=1.0).contains(&p[0]) || !(0.0..=1.0).contains(&p[1])) {
                    return Err(NumericsError::InvalidRule("node outside the unit square".into()));
                }
                for total in 0..=self.degree {
                    for i in 0..=total {
                        let j = total - i;
                        let q = self.apply(|p| p[0].powi(i as i32) * p[1].powi(j as i32));
                        check(q, 1.0 / ((i + 1) * (j + 1)) as f64, "tensor monomial")?;
                    }
                }
            }
            QuadratureKind::CollapsedTriangle => {
                if self.nodes.iter().any(|p| p[0] < 0.0 || p[1] < 0.0 || p[0] + p[1] > 1.0 + 1e-15) {
                    return Err(NumericsError::InvalidRule("node outside the triangle".into()));
                }
                for total in 0..=self.degree {
                    for i in 0..=total {
                        let j = total - i;
                        let q = self.apply(|p| p[0].powi(i as i32) * p[1].powi(j as i32));
                        // ∫ u^i v^j = i! j! / (i + j + 2)!
                        let exact = (lnfact(i) + lnfact(j) - lnfact(i + j + 2)).exp();
                        check(q / exact, 1.0, "triangle monomial")?;
                    }
                }
            }
            QuadratureKind::PeriodicTrapezoid => {
                for k in 0..=self.degree as i64 {
                    let re = self.apply(|p| (std::f64::consts::TAU * k as f64 * p[0]).cos());
                    check(re, if k == 0 { 1.0 } else { 0.0 }, "trigonometric monomial")?;
                }
            }
            QuadratureKind::AdaptiveLine => {}
        }
        Ok(())
    }

    fn apply<F: Fn(&[f64; 2]) -> f64>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).collect();
        pairwise_sum(&terms)
    }
}

fn lnfact(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Physical nodes and weights of a rule applied to every element of a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellQuadrature {
    pub points: Vec<C64>,
    pub weights: Vec<f64>,
}

impl CellQuadrature {
    /// `Σ w_i f(z_i)` with pairwise summation.
    pub fn integrate<F: Fn(C64) -> C64>(&self, f: F) -> C64 {
        let terms: Vec<C64> = self.points.iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).collect();
        pairwise_sum(&terms)
    }

    /// Same rule shifted by a real translation.
    pub fn translated(&self, m: f64) -> Self {
        Self { points: self.points.iter().map(|z| z + m).collect(), weights: self.weights.clone() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `∫_ϖ f dA` with the given rule; the error estimate is the difference to
/// the rule of half the order. Fails when the estimate exceeds `tol`.
pub fn integrate_cell<F: Fn(C64) -> C64>(
    region: &CellRegion,
    f: F,
    rule: &QuadratureRule,
    tol: f64,
) -> Result<Estimate, NumericsError> {
    let fine = region.quadrature(rule)?.integrate(&f);
    let coarse_rule = QuadratureRule::new(rule.kind, (rule.order / 2).max(1))?;
    let coarse = region.quadrature(&coarse_rule)?.integrate(&f);
    let error = (fine - coarse).norm();
    if error > tol {
        return Err(NumericsError::EstimateAboveTolerance { estimate: error, tol });
    }
    Ok(Estimate { value: fine, error })
}

/// Periodic trapezoid rule for `∫_{−π}^{π} f(η) dη` on the grid
/// `η_j = −π + 2πj/n`.
pub fn periodic_trapezoid<F: FnMut(f64) -> C64>(mut f: F, n: usize) -> C64 {
    let h = std::f64::consts::TAU / n as f64;
    let terms: Vec<C64> = (0..n).map(|j| f(-std::f64::consts::PI + h * j as f64)).collect();
    pairwise_sum(&terms) * h
}
