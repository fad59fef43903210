use num_complex::Complex;

type C64 = Complex<f64>;

/// Partial sums of the period series of `f(z) = 1/z` at quasimomentum zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceRow {
    pub m: usize,
    /// One-sided sum `S_M = Σ_{m=1}^{M} 1/(z + m)`.
    pub one_sided: C64,
    /// `S_M − ln M`.
    pub minus_log: C64,
    /// `Re S_{2M} − Re S_M`, which tends to `ln 2` for a harmonic divergence.
    pub doubling_increment: f64,
    /// `|(S_{2M} − ln 2M) − (S_M − ln M)|`.
    pub minus_log_cauchy: f64,
    /// Symmetric sum `T_M = Σ_{|m|≤M} 1/(z + m)`.
    pub symmetric: C64,
    /// `|T_{2M} − T_M|`.
    pub symmetric_cauchy: f64,
}

/// Rows at `M = 10, 100, …` up to `max_m` (and `max_m` itself).
#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceTable {
    pub z: C64,
    pub rows: Vec<DivergenceRow>,
}

impl DivergenceTable {
    pub fn last(&self) -> Option<&DivergenceRow> {
        self.rows.last()
    }

    /// Row with the given `M`, if tabulated.
    pub fn row(&self, m: usize) -> Option<&DivergenceRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

/// Demonstrates that the Floquet series of `1/z` on the strip
/// `ℝ × (1/4, 1/2)` diverges at `η = 0`: the one-sided partial sums at
/// `z = 0.5 + 0.375i` grow like `ln M`, while the symmetric sums converge.
pub fn divergence_demo(max_m: usize) -> DivergenceTable {
    let z = C64::new(0.5, 0.375);
    let max_m = max_m.max(2);
    let mut marks: Vec<usize> = std::iter::successors(Some(10usize), |&m| m.checked_mul(10))
        .take_while(|&m| m <= max_m)
        .collect();
    if marks.last() != Some(&max_m) {
        marks.push(max_m);
    }
    let limit = 2 * max_m;
    let mut one = C64::new(0.0, 0.0);
    let mut sym = 1.0 / z;
    let mut s_at = vec![C64::new(0.0, 0.0); limit + 1];
    let mut t_at = vec![C64::new(0.0, 0.0); limit + 1];
    t_at[0] = sym;
    for m in 1..=limit {
        let mf = m as f64;
        one += 1.0 / (z + mf);
        sym += 2.0 * z / (z * z - mf * mf);
        s_at[m] = one;
        t_at[m] = sym;
    }
    let ln = |m: usize| (m as f64).ln();
    let rows = marks
        .into_iter()
        .map(|m| {
            let (s, s2) = (s_at[m], s_at[2 * m]);
            DivergenceRow {
                m,
                one_sided: s,
                minus_log: s - ln(m),
                doubling_increment: s2.re - s.re,
                minus_log_cauchy: ((s2 - ln(2 * m)) - (s - ln(m))).norm(),
                symmetric: t_at[m],
                symmetric_cauchy: (t_at[2 * m] - t_at[m]).norm(),
            }
        })
        .collect();
    DivergenceTable { z, rows }
}
