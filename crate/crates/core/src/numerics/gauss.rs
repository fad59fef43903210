use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use statrs::function::gamma::ln_gamma;

use super::{pairwise_sum, NumericsError};
use crate::Real;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Nodes are Newton-polished roots of the Legendre polynomial evaluated by the
/// three-term recurrence, so the rule is available in any [`Real`] type.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let one = T::one();
    let nt = T::from_usize(n).unwrap();
    for i in 0..n.div_ceil(2) {
        let guess = T::PI() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nt + T::lit(0.5));
        let mut x = guess.cos();
        let mut dp = one;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(2.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = T::lit(2.0) / ((one - x * x) * dp * dp);
        // descending cos guesses: i-th largest root
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kt = T::from_usize(k).unwrap();
        let p2 = ((kt + kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    if n == 1 {
        p0 = T::one();
    }
    let nt = T::from_usize(n).unwrap();
    let dp = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Gauss–Jacobi nodes and weights for the weight `(1−x)^α (1+x)^β` on
/// `[-1, 1]` (Golub–Welsch eigenvalue construction), nodes ascending.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>), NumericsError> {
    if n == 0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(NumericsError::InvalidRule(format!(
            "Gauss–Jacobi needs n ≥ 1 and exponents > -1 (n={n}, α={alpha}, β={beta})"
        )));
    }
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let off = (4.0 * j * (j + alpha) * (j + beta) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// A one-dimensional Gauss rule on `[-1, 1]` in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn legendre(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    /// Rule for `∫ (1−x)^α (1+x)^β f(x) dx`; the weight is not part of `f`.
    pub fn jacobi(n: usize, alpha: f64, beta: f64) -> Result<Self, NumericsError> {
        let (nodes, weights) = gauss_jacobi(n, alpha, beta)?;
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f(t) dt` with the rule mapped affinely onto `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> Complex<f64>>(&self, a: f64, b: f64, mut f: F) -> Complex<f64> {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let terms: Vec<Complex<f64>> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(c + h * x) * w)
            .collect();
        pairwise_sum(&terms) * h
    }
}
