use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex;

use super::FloquetError;

type C64 = Complex<f64>;

/// Column order of the field CSV dump.
pub const FIELD_CSV_COLUMNS: [&str; 5] = ["re_z", "im_z", "eta", "re_g", "im_g"];

/// Cell points on which a field is sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldGrid {
    /// Arbitrary points; values are available only at these points.
    Scattered(Vec<C64>),
    /// Tensor grid `xs × ys` (x-major); values between nodes are obtained by
    /// barycentric Lagrange interpolation.
    Tensor { xs: Vec<f64>, ys: Vec<f64> },
}

impl FieldGrid {
    /// Tensor Gauss–Legendre grid on `[x0, x1] × [y0, y1]`.
    pub fn gauss_tensor(n: usize, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Self {
        let (t, _) = crate::numerics::gauss_legendre::<f64>(n);
        let map = |a: f64, b: f64| t.iter().map(|&u| a + 0.5 * (b - a) * (u + 1.0)).collect::<Vec<_>>();
        FieldGrid::Tensor { xs: map(x0, x1), ys: map(y0, y1) }
    }

    pub fn points(&self) -> Vec<C64> {
        match self {
            FieldGrid::Scattered(p) => p.clone(),
            FieldGrid::Tensor { xs, ys } => {
                xs.iter().flat_map(|&x| ys.iter().map(move |&y| C64::new(x, y))).collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            FieldGrid::Scattered(p) => p.len(),
            FieldGrid::Tensor { xs, ys } => xs.len() * ys.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Barycentric weights of Lagrange interpolation on `nodes`.
fn bary_weights(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|k| {
            let p: f64 = (0..nodes.len()).filter(|&j| j != k).map(|j| nodes[k] - nodes[j]).product();
            1.0 / p
        })
        .collect()
}

/// Coefficients `ℓ_k(x)` of the interpolant at `x`.
fn bary_coeffs(nodes: &[f64], weights: &[f64], x: f64) -> Vec<f64> {
    if let Some(k) = nodes.iter().position(|&t| t == x) {
        let mut c = vec![0.0; nodes.len()];
        c[k] = 1.0;
        return c;
    }
    let raw: Vec<f64> = nodes.iter().zip(weights).map(|(&t, &w)| w / (x - t)).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / s).collect()
}

/// Samples `g(z_i, η_j)` on cell points `z_i` and the uniform quasimomentum
/// grid `η_j = −π + 2πj/N`, stored point-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetField {
    grid: FieldGrid,
    n_eta: usize,
    values: Vec<C64>,
}

impl FloquetField {
    /// Wraps point-major values, rejecting shape mismatches and non-finite
    /// entries.
    pub fn new(grid: FieldGrid, n_eta: usize, values: Vec<C64>) -> Result<Self, FloquetError> {
        if n_eta == 0 || grid.is_empty() {
            return Err(FloquetError::InvalidGrid("empty point set or quasimomentum grid".into()));
        }
        if values.len() != grid.len() * n_eta {
            return Err(FloquetError::InvalidGrid(format!(
                "{} values for {} points × {n_eta} quasimomenta",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(FloquetError::NonFinite { point: k / n_eta, eta: k % n_eta });
        }
        Ok(Self { grid, n_eta, values })
    }

    /// Samples a given function of `(z, η)`.
    pub fn from_fn<F: Fn(C64, f64) -> C64>(grid: FieldGrid, n_eta: usize, g: F) -> Result<Self, FloquetError> {
        let pts = grid.points();
        let values =
            pts.iter().flat_map(|&z| (0..n_eta).map(move |j| (z, j))).map(|(z, j)| g(z, eta_node(j, n_eta))).collect();
        Self::new(grid, n_eta, values)
    }

    pub fn grid(&self) -> &FieldGrid {
        &self.grid
    }

    pub fn n_eta(&self) -> usize {
        self.n_eta
    }

    pub fn n_points(&self) -> usize {
        self.grid.len()
    }

    /// `η_j = −π + 2πj/N`.
    pub fn eta(&self, j: usize) -> f64 {
        eta_node(j, self.n_eta)
    }

    pub fn value(&self, point: usize, eta: usize) -> C64 {
        self.values[point * self.n_eta + eta]
    }

    /// Values over the quasimomentum grid at one grid point.
    pub fn column(&self, point: usize) -> &[C64] {
        &self.values[point * self.n_eta..(point + 1) * self.n_eta]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Index of the quasimomentum node equal to `eta` (mod 2π), if any.
    pub fn eta_index(&self, eta: f64) -> Option<usize> {
        let u = (eta + PI).rem_euclid(TAU) / TAU * self.n_eta as f64;
        let j = u.round();
        ((u - j).abs() < 1e-9).then_some(j as usize % self.n_eta)
    }

    /// Values over the quasimomentum grid at a cell point: the stored column
    /// for grid points, a barycentric interpolant for tensor grids.
    pub fn column_at(&self, z: C64) -> Result<Vec<C64>, FloquetError> {
        match &self.grid {
            FieldGrid::Scattered(p) => p
                .iter()
                .position(|&q| (q - z).norm() <= 1e-13)
                .map(|i| self.column(i).to_vec())
                .ok_or_else(|| FloquetError::PointNotOnGrid(format!("{z}"))),
            FieldGrid::Tensor { xs, ys } => {
                let cx = bary_coeffs(xs, &bary_weights(xs), z.re);
                let cy = bary_coeffs(ys, &bary_weights(ys), z.im);
                let mut out = vec![C64::new(0.0, 0.0); self.n_eta];
                for (ix, &ax) in cx.iter().enumerate() {
                    if ax == 0.0 {
                        continue;
                    }
                    for (iy, &ay) in cy.iter().enumerate() {
                        if ay == 0.0 {
                            continue;
                        }
                        let col = self.column(ix * ys.len() + iy);
                        for (o, &v) in out.iter_mut().zip(col) {
                            *o += v * (ax * ay);
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// Writes `re_z, im_z, eta, re_g, im_g` rows, point-major then by `η`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(FIELD_CSV_COLUMNS)?;
        for (i, z) in self.grid.points().iter().enumerate() {
            for j in 0..self.n_eta {
                let g = self.value(i, j);
                w.write_record(&[
                    fmt(z.re),
                    fmt(z.im),
                    fmt(self.eta(j)),
                    fmt(g.re),
                    fmt(g.im),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn eta_node(j: usize, n: usize) -> f64 {
    -PI + TAU * j as f64 / n as f64
}

pub(crate) fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_interpolation_is_spectral() {
        let grid = FieldGrid::gauss_tensor(16, (0.0, 1.0), (-0.5, 0.5));
        let f = FloquetField::from_fn(grid, 4, |z, eta| (C64::new(0.0, eta) * z).exp() / (z - C64::new(0.0, 2.0)))
            .unwrap();
        let z = C64::new(0.31, 0.17);
        let col = f.column_at(z).unwrap();
        for (j, v) in col.iter().enumerate() {
            let exact = (C64::new(0.0, f.eta(j)) * z).exp() / (z - C64::new(0.0, 2.0));
            assert!((v - exact).norm() < 1e-11, "{v} vs {exact}");
        }
        // edges of the cell are reached by extrapolating the same polynomial
        let col = f.column_at(C64::new(1.0, 0.2)).unwrap();
        let exact = (C64::new(0.0, f.eta(1)) * C64::new(1.0, 0.2)).exp() / C64::new(1.0, -1.8);
        assert!((col[1] - exact).norm() < 1e-10);
        assert_eq!(f.eta_index(f.eta(3)), Some(3));
        assert_eq!(f.eta_index(0.1), None);
    }

    #[test]
    fn rejects_non_finite() {
        let g = FieldGrid::Scattered(vec![C64::new(0.5, 0.0)]);
        assert!(matches!(
            FloquetField::new(g, 2, vec![C64::new(0.0, 0.0), C64::new(f64::NAN, 0.0)]),
            Err(FloquetError::NonFinite { point: 0, eta: 1 })
        ));
    }
}
