use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;

use super::periodic::eval_kernel_points;
use super::{KernelContext, KernelError, KernelMethod};

type C64 = Complex<f64>;

/// Column order of the kernel grid CSV.
pub const KERNEL_CSV_COLUMNS: [&str; 7] = ["re_z", "im_z", "re_w", "im_w", "re_K", "im_K", "method"];

/// One kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRow {
    pub z: C64,
    pub w: C64,
    pub k: C64,
    pub method: KernelMethod,
}

/// Evaluates `K_Π` for every pair and method, in parallel over pairs. Rows
/// are ordered pair-major, then by the order of `methods`.
pub fn kernel_grid(
    ctx: &KernelContext,
    pairs: &[(C64, C64)],
    methods: &[KernelMethod],
) -> Result<Vec<KernelRow>, KernelError> {
    let rows: Result<Vec<Vec<KernelRow>>, KernelError> = pairs
        .par_iter()
        .map(|&(z, w)| {
            let (pz, pw) = (ctx.point(z)?, ctx.point(w)?);
            methods
                .iter()
                .map(|&method| Ok(KernelRow { z, w, k: eval_kernel_points(ctx, method, &pz, &pw)?, method }))
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// Writes rows with columns `re_z, im_z, re_w, im_w, re_K, im_K, method`.
pub fn write_kernel_csv<W: Write>(out: W, rows: &[KernelRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(KERNEL_CSV_COLUMNS)?;
    for r in rows {
        let f = |x: f64| format!("{x:.17e}");
        w.write_record(&[f(r.z.re), f(r.z.im), f(r.w.re), f(r.w.im), f(r.k.re), f(r.k.im), r.method.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
