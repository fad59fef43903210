use num_complex::Complex;

use super::spec::shoelace;
use super::{CellError, PeriodicCellSpec, GEOMETRY_TOL};
use crate::numerics::{CellQuadrature, NumericsError, QuadratureKind, QuadratureRule};

type C64 = Complex<f64>;

/// Quadrature element of a cell decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum CellElement {
    /// `{x0 ≤ x ≤ x1, l(x) ≤ y ≤ u(x)}` with `l`, `u` linear; `lower` and
    /// `upper` hold the heights at `x0` and `x1`.
    Trapezoid { x0: f64, x1: f64, lower: (f64, f64), upper: (f64, f64) },
    /// Counter-clockwise triangle.
    Triangle([C64; 3]),
}

impl CellElement {
    pub fn area(&self) -> f64 {
        match *self {
            CellElement::Trapezoid { x0, x1, lower, upper } => {
                0.5 * (x1 - x0) * ((upper.0 - lower.0) + (upper.1 - lower.1))
            }
            CellElement::Triangle(t) => shoelace(&t),
        }
    }
}

/// Quadrature-ready decomposition of a validated period cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRegion {
    spec: PeriodicCellSpec,
    polygon: Vec<C64>,
    elements: Vec<CellElement>,
}

/// Validates the spec and decomposes the cell: vertical trapezoid slabs when
/// both polylines are graphs over the real axis, ear-clipped triangles
/// otherwise.
pub fn build_cell(spec: PeriodicCellSpec) -> Result<CellRegion, CellError> {
    spec.validate()?;
    let polygon = spec.polygon();
    let monotone = |p: &[C64]| p.windows(2).all(|w| w[1].re < w[0].re - GEOMETRY_TOL);
    let elements = if monotone(&spec.lower) && monotone(&spec.upper) {
        slabs(&spec)?
    } else {
        ear_clip(&polygon)?
    };
    let region = CellRegion { spec, polygon, elements };
    let total: f64 = region.elements.iter().map(CellElement::area).sum();
    let area = region.shoelace_area();
    if (total - area).abs() > 1e-12 * area {
        return Err(CellError::InvalidCell(format!("decomposition area {total} differs from polygon area {area}")));
    }
    Ok(region)
}

fn interp(poly_right_to_left: &[C64], x: f64) -> f64 {
    let p: Vec<C64> = poly_right_to_left.iter().rev().cloned().collect();
    for w in p.windows(2) {
        if x >= w[0].re - GEOMETRY_TOL && x <= w[1].re + GEOMETRY_TOL {
            let t = ((x - w[0].re) / (w[1].re - w[0].re)).clamp(0.0, 1.0);
            return w[0].im + t * (w[1].im - w[0].im);
        }
    }
    p[p.len() - 1].im
}

fn slabs(spec: &PeriodicCellSpec) -> Result<Vec<CellElement>, CellError> {
    let mut xs: Vec<f64> = spec.lower.iter().chain(spec.upper.iter()).map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= GEOMETRY_TOL);
    let mut out = Vec::new();
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let lower = (interp(&spec.lower, x0), interp(&spec.lower, x1));
        let upper = (interp(&spec.upper, x0), interp(&spec.upper, x1));
        let el = CellElement::Trapezoid { x0, x1, lower, upper };
        if el.area() <= 0.0 || upper.0 < lower.0 || upper.1 < lower.1 {
            return Err(CellError::InvalidCell(format!("degenerate slab on [{x0}, {x1}]")));
        }
        out.push(el);
    }
    Ok(out)
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn ear_clip(polygon: &[C64]) -> Result<Vec<CellElement>, CellError> {
    // straight pass-through vertices do not change the region
    let mut pts: Vec<C64> = Vec::new();
    let n = polygon.len();
    for i in 0..n {
        let (p, c, q) = (polygon[(i + n - 1) % n], polygon[i], polygon[(i + 1) % n]);
        if cross(c - p, q - c).abs() > GEOMETRY_TOL * (c - p).norm() * (q - c).norm() {
            pts.push(c);
        }
    }
    let mut out = Vec::new();
    while pts.len() > 3 {
        let m = pts.len();
        let mut clipped = false;
        for i in 0..m {
            let (a, b, c) = (pts[(i + m - 1) % m], pts[i], pts[(i + 1) % m]);
            if cross(b - a, c - b) <= GEOMETRY_TOL {
                continue;
            }
            let inside = pts.iter().enumerate().any(|(j, &p)| {
                j != i && j != (i + m - 1) % m && j != (i + 1) % m && in_triangle(p, a, b, c)
            });
            if !inside {
                out.push(CellElement::Triangle([a, b, c]));
                pts.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            return Err(CellError::InvalidCell("triangulation failed (no ear found)".into()));
        }
    }
    out.push(CellElement::Triangle([pts[0], pts[1], pts[2]]));
    Ok(out)
}

fn in_triangle(p: C64, a: C64, b: C64, c: C64) -> bool {
    let d1 = cross(b - a, p - a);
    let d2 = cross(c - b, p - b);
    let d3 = cross(a - c, p - c);
    d1 >= -GEOMETRY_TOL && d2 >= -GEOMETRY_TOL && d3 >= -GEOMETRY_TOL
}

impl CellRegion {
    pub fn spec(&self) -> &PeriodicCellSpec {
        &self.spec
    }

    pub fn polygon(&self) -> &[C64] {
        &self.polygon
    }

    pub fn elements(&self) -> &[CellElement] {
        &self.elements
    }

    pub fn area(&self) -> f64 {
        self.elements.iter().map(CellElement::area).sum()
    }

    pub fn shoelace_area(&self) -> f64 {
        shoelace(&self.polygon)
    }

    /// Physical nodes and weights of `rule` on every element.
    pub fn quadrature(&self, rule: &QuadratureRule) -> Result<CellQuadrature, NumericsError> {
        if !matches!(rule.kind, QuadratureKind::TensorGaussLegendre | QuadratureKind::CollapsedTriangle) {
            return Err(NumericsError::InvalidRule(format!("{:?} is not an area rule", rule.kind)));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let push_triangle = |t: [C64; 3], points: &mut Vec<C64>, weights: &mut Vec<f64>| {
            let area2 = 2.0 * shoelace(&t);
            for (p, &w) in rule.nodes.iter().zip(&rule.weights) {
                let (u, v, jac) = match rule.kind {
                    QuadratureKind::CollapsedTriangle => (p[0], p[1], 1.0),
                    _ => (p[0] * (1.0 - p[1]), p[0] * p[1], p[0]),
                };
                points.push(t[0] + (t[1] - t[0]) * u + (t[2] - t[0]) * v);
                weights.push(w * jac * area2);
            }
        };
        for el in &self.elements {
            match *el {
                CellElement::Trapezoid { x0, x1, lower, upper } => {
                    if rule.kind == QuadratureKind::CollapsedTriangle {
                        let (p00, p10) = (C64::new(x0, lower.0), C64::new(x1, lower.1));
                        let (p11, p01) = (C64::new(x1, upper.1), C64::new(x0, upper.0));
                        for t in [[p00, p10, p11], [p00, p11, p01]] {
                            if shoelace(&t) > 0.0 {
                                push_triangle(t, &mut points, &mut weights);
                            }
                        }
                        continue;
                    }
                    for (p, &w) in rule.nodes.iter().zip(&rule.weights) {
                        let x = x0 + p[0] * (x1 - x0);
                        let lo = lower.0 + p[0] * (lower.1 - lower.0);
                        let hi = upper.0 + p[0] * (upper.1 - upper.0);
                        points.push(C64::new(x, lo + p[1] * (hi - lo)));
                        weights.push(w * (x1 - x0) * (hi - lo));
                    }
                }
                CellElement::Triangle(t) => push_triangle(t, &mut points, &mut weights),
            }
        }
        Ok(CellQuadrature { points, weights })
    }

    /// Points spaced along every boundary edge (edge start included, end
    /// excluded), for boundary residual checks.
    pub fn boundary_points(&self, per_edge: usize) -> Vec<C64> {
        let n = self.polygon.len();
        let mut out = Vec::with_capacity(n * per_edge);
        for i in 0..n {
            let (p, q) = (self.polygon[i], self.polygon[(i + 1) % n]);
            for k in 0..per_edge {
                out.push(p + (q - p) * (k as f64 / per_edge as f64));
            }
        }
        out
    }

    /// Point-in-polygon test for the closed cell (ray casting; boundary
    /// points may go either way).
    pub fn contains(&self, z: C64) -> bool {
        let p = &self.polygon;
        let n = p.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (p[i], p[j]);
            if (a.im > z.im) != (b.im > z.im) && z.re < (b.re - a.re) * (z.im - a.im) / (b.im - a.im) + a.re {
                inside = !inside;
            }
            j = i;
        }
        inside
    }
}
