use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{CellError, GEOMETRY_TOL};

type C64 = Complex<f64>;

/// Geometric description of one period cell `ϖ`.
///
/// The lower and upper boundary polylines are listed from right to left: the
/// first vertex has real part `1`, the last real part `0`, and the last vertex
/// is the first translated by `−1`. The first lower vertex is `1 + ia` and the
/// first upper vertex `1 + ib`, so the vertical junction segments
/// `{0, 1} × (a, b)` close the cell.
///
/// Each polyline with `n` listed vertices has `n − 1` distinct vertices per
/// period; `beta_*[k]` is the turning exponent of vertex `k`
/// (`k = 0..n−1`; the last listed vertex repeats vertex `0`). The interior
/// angle is `α = π(β + 1)`; straight pass-through vertices carry `β = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCellSpec {
    pub upper: Vec<C64>,
    pub lower: Vec<C64>,
    pub beta_upper: Vec<f64>,
    pub beta_lower: Vec<f64>,
    /// Heights `(a, b)` of the junction segments.
    pub junction: (f64, f64),
    /// Bound `M` with the cell inside `[0,1] × [−M, M]`.
    pub height_bound: f64,
}

/// On-disk form: complex numbers as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellSpecFile {
    upper_vertices: Vec<[f64; 2]>,
    lower_vertices: Vec<[f64; 2]>,
    beta_upper: Vec<f64>,
    beta_lower: Vec<f64>,
    junction: [f64; 2],
    height_bound: f64,
}

impl PeriodicCellSpec {
    /// Straight channel `(0,1) × (a, b)` with one dummy vertex per polyline.
    pub fn rectangle(a: f64, b: f64) -> Self {
        Self {
            upper: vec![C64::new(1.0, b), C64::new(0.0, b)],
            lower: vec![C64::new(1.0, a), C64::new(0.0, a)],
            beta_upper: vec![0.0],
            beta_lower: vec![0.0],
            junction: (a, b),
            height_bound: a.abs().max(b.abs()),
        }
    }

    /// Lower boundary vertices from left to right, periodic part only
    /// (`n − 1` vertices starting at real part `0`), with their exponents.
    pub fn lower_periodic_left_to_right(&self) -> (Vec<C64>, Vec<f64>) {
        let n = self.lower.len();
        let verts: Vec<C64> = (0..n - 1).map(|k| self.lower[n - 1 - k]).collect();
        let betas: Vec<f64> = (0..n - 1).map(|k| self.beta_lower[(n - 1 - k) % (n - 1)]).collect();
        (verts, betas)
    }

    /// Upper boundary vertices from right to left, periodic part only
    /// (`n − 1` vertices starting at real part `1`), with their exponents.
    pub fn upper_periodic_right_to_left(&self) -> (Vec<C64>, Vec<f64>) {
        let n = self.upper.len();
        (self.upper[..n - 1].to_vec(), self.beta_upper.clone())
    }

    /// Closed counter-clockwise boundary polygon of the cell (no repeated
    /// first vertex): lower polyline left to right, then upper right to left.
    pub fn polygon(&self) -> Vec<C64> {
        let mut p: Vec<C64> = self.lower.iter().rev().cloned().collect();
        p.extend(self.upper.iter().cloned());
        p
    }

    /// Shoelace area of [`Self::polygon`].
    pub fn shoelace_area(&self) -> f64 {
        shoelace(&self.polygon())
    }

    /// Checks every invariant of the data model.
    pub fn validate(&self) -> Result<(), CellError> {
        let bad = |m: String| Err(CellError::InvalidCell(m));
        let (a, b) = self.junction;
        if !(a.is_finite() && b.is_finite() && b > a) {
            return bad(format!("junction interval ({a}, {b}) must satisfy b > a"));
        }
        if !(self.height_bound.is_finite() && self.height_bound > 0.0) {
            return bad(format!("height bound {} must be positive", self.height_bound));
        }
        for (name, poly, beta) in [("upper", &self.upper, &self.beta_upper), ("lower", &self.lower, &self.beta_lower)] {
            if poly.len() < 2 {
                return bad(format!("{name} polyline needs at least two vertices"));
            }
            if beta.len() != poly.len() - 1 {
                return bad(format!(
                    "{name}: {} exponents for {} vertices (expected one per periodic vertex, {})",
                    beta.len(),
                    poly.len(),
                    poly.len() - 1
                ));
            }
            if poly.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) || beta.iter().any(|x| !x.is_finite()) {
                return bad(format!("{name}: non-finite data"));
            }
            let first = poly[0];
            let last = poly[poly.len() - 1];
            if (first.re - 1.0).abs() > GEOMETRY_TOL || last.re.abs() > GEOMETRY_TOL {
                return bad(format!("{name}: first vertex must have Re = 1 and last Re = 0"));
            }
            if (last - (first - 1.0)).norm() > GEOMETRY_TOL {
                return bad(format!("{name}: last vertex must be the first translated by −1"));
            }
            for z in poly.iter() {
                if z.re < -GEOMETRY_TOL
                    || z.re > 1.0 + GEOMETRY_TOL
                    || z.im.abs() > self.height_bound + GEOMETRY_TOL
                {
                    return bad(format!("{name}: vertex {z} outside [0,1] × [−M, M]"));
                }
            }
            let sum: f64 = beta.iter().sum();
            if sum.abs() > GEOMETRY_TOL {
                return bad(format!("{name}: exponents sum to {sum}, closure requires 0"));
            }
            if beta.iter().any(|&x| x <= -1.0 || x >= 1.0) {
                return bad(format!("{name}: interior angles must lie in (0, 2π)"));
            }
        }
        if (self.lower[0] - C64::new(1.0, a)).norm() > GEOMETRY_TOL
            || (self.upper[0] - C64::new(1.0, b)).norm() > GEOMETRY_TOL
        {
            return bad("junction mismatch: polylines must start at 1 + ia and 1 + ib".into());
        }
        // exponents must match the geometry of the polygon
        let (lv, lb) = self.lower_periodic_left_to_right();
        check_turning(&lv, &lb, "lower")?;
        let (uv, ub) = self.upper_periodic_right_to_left();
        check_turning(&uv, &ub, "upper")?;
        let poly = self.polygon();
        if shoelace(&poly) <= 0.0 {
            return bad("lower polyline must lie below the upper polyline".into());
        }
        check_simple(&poly)?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self, CellError> {
        let f: CellSpecFile = toml::from_str(text).map_err(|e| CellError::Parse(e.to_string()))?;
        let c = |v: &Vec<[f64; 2]>| v.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>();
        Ok(Self {
            upper: c(&f.upper_vertices),
            lower: c(&f.lower_vertices),
            beta_upper: f.beta_upper,
            beta_lower: f.beta_lower,
            junction: (f.junction[0], f.junction[1]),
            height_bound: f.height_bound,
        })
    }

    pub fn to_toml_string(&self) -> String {
        let c = |v: &Vec<C64>| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let f = CellSpecFile {
            upper_vertices: c(&self.upper),
            lower_vertices: c(&self.lower),
            beta_upper: self.beta_upper.clone(),
            beta_lower: self.beta_lower.clone(),
            junction: [self.junction.0, self.junction.1],
            height_bound: self.height_bound,
        };
        toml::to_string(&f).expect("cell spec serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CellError> {
        let text = std::fs::read_to_string(path).map_err(|e| CellError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), CellError> {
        std::fs::write(path, self.to_toml_string()).map_err(|e| CellError::Io(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn shoelace(p: &[C64]) -> f64 {
    let n = p.len();
    0.5 * (0..n).map(|i| {
        let (u, v) = (p[i], p[(i + 1) % n]);
        u.re * v.im - v.re * u.im
    })
    .sum::<f64>()
}

/// `verts` are the periodic vertices in traversal order (domain on the left);
/// the successor of the last is the first translated by `+1` (lower, left to
/// right) or `−1` (upper, right to left).
fn check_turning(verts: &[C64], betas: &[f64], name: &str) -> Result<(), CellError> {
    let n = verts.len();
    let shift = if name == "lower" { 1.0 } else { -1.0 };
    for k in 0..n {
        let prev = if k == 0 { verts[n - 1] - shift } else { verts[k - 1] };
        let next = if k + 1 == n { verts[0] + shift } else { verts[k + 1] };
        let d_in = verts[k] - prev;
        let d_out = next - verts[k];
        if d_in.norm() <= GEOMETRY_TOL || d_out.norm() <= GEOMETRY_TOL {
            return Err(CellError::InvalidCell(format!("{name}: repeated vertex at {}", verts[k])));
        }
        let turn = (d_out / d_in).arg();
        let beta = -turn / PI;
        if (beta - betas[k]).abs() > 1e-9 {
            return Err(CellError::InvalidCell(format!(
                "{name}: exponent {} at vertex {} does not match the polygon angle (β = {beta})",
                betas[k], verts[k]
            )));
        }
    }
    Ok(())
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// True when the closed segments intersect anywhere other than at a single
/// shared endpoint.
fn segments_conflict(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let same = |u: C64, v: C64| (u - v).norm() <= GEOMETRY_TOL;
    let shared = [(p1, q1), (p1, q2), (p2, q1), (p2, q2)].iter().position(|&(u, v)| same(u, v));
    if let Some(i) = shared {
        let (s, p_other, q_other) = match i {
            0 => (p1, p2, q2),
            1 => (p1, p2, q1),
            2 => (p2, p1, q2),
            _ => (p2, p1, q1),
        };
        let (u, v) = (p_other - s, q_other - s);
        // collinear segments leaving the shared point in the same direction overlap
        return cross(u, v).abs() <= GEOMETRY_TOL * u.norm() * v.norm() && (u.re * v.re + u.im * v.im) > 0.0;
    }
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: C64, b: C64, c: C64, d: f64| {
        d.abs() <= GEOMETRY_TOL
            && c.re >= a.re.min(b.re) - GEOMETRY_TOL
            && c.re <= a.re.max(b.re) + GEOMETRY_TOL
            && c.im >= a.im.min(b.im) - GEOMETRY_TOL
            && c.im <= a.im.max(b.im) + GEOMETRY_TOL
    };
    on(p1, p2, q1, d1) || on(p1, p2, q2, d2) || on(q1, q2, p1, d3) || on(q1, q2, p2, d4)
}

fn check_simple(poly: &[C64]) -> Result<(), CellError> {
    let n = poly.len();
    let edge = |i: usize| (poly[i], poly[(i + 1) % n]);
    for i in 0..n {
        for j in (i + 1)..n {
            let (p1, p2) = edge(i);
            let (q1, q2) = edge(j);
            if segments_conflict(p1, p2, q1, q2) {
                return Err(CellError::InvalidCell(format!("boundary self-intersection between edges {i} and {j}")));
            }
        }
    }
    // translates may only touch along the shared junction segment
    let is_right_junction = |i: usize| {
        let (p, q) = edge(i);
        (p.re - 1.0).abs() <= GEOMETRY_TOL && (q.re - 1.0).abs() <= GEOMETRY_TOL
    };
    let is_left_junction = |i: usize| {
        let (p, q) = edge(i);
        p.re.abs() <= GEOMETRY_TOL && q.re.abs() <= GEOMETRY_TOL
    };
    for i in 0..n {
        if is_right_junction(i) {
            continue;
        }
        for j in 0..n {
            if is_left_junction(j) {
                continue;
            }
            let (p1, p2) = edge(i);
            let (q1, q2) = edge(j);
            if segments_conflict(p1, p2, q1 + 1.0, q2 + 1.0) {
                return Err(CellError::InvalidCell(format!("cell overlaps its translate (edges {i} and {j})")));
            }
        }
    }
    Ok(())
}
