use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Iteration budget and stopping tolerances for [`nlls_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    pub max_iterations: usize,
    /// Stop when `‖Jᵀr‖_∞` falls below this.
    pub gradient_tol: f64,
    /// Stop when the relative step length falls below this.
    pub step_tol: f64,
    /// Stop when `‖r‖₂` falls below this.
    pub residual_tol: f64,
    /// Levenberg damping is kept inside `[damping_min, damping_max]`.
    pub damping_min: f64,
    pub damping_max: f64,
    pub initial_damping: f64,
    /// Relative step of the central-difference Jacobian.
    pub fd_step: f64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-15,
            step_tol: 1e-15,
            residual_tol: 1e-14,
            damping_min: 1e-15,
            damping_max: 1e12,
            initial_damping: 1e-6,
            fd_step: 1e-7,
        }
    }
}

/// Why the iteration stopped successfully.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualTolerance,
    GradientTolerance,
    StepTolerance,
}

/// Final iterate and its history.
#[derive(Debug, Clone, PartialEq)]
pub struct NllsReport {
    pub x: DVector<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Residual norm after every accepted step, starting with the initial one.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub reason: Option<StopReason>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NllsError {
    #[error("no convergence within budget; best residual {:.3e}", .0.residual_norm)]
    NoConvergence(Box<NllsReport>),
    #[error("residual cannot be evaluated at the initial point")]
    InfeasibleStart,
    #[error("invalid solver budget: {0}")]
    InvalidBudget(String),
}

/// Levenberg–Marquardt minimisation of `½‖r(x)‖²`.
///
/// The residual closure may return `None` for points outside its domain; such
/// trial steps are rejected and the damping increased. The Jacobian is formed
/// by central differences and each damped step is solved through the SVD of
/// the augmented system `[J; √λ D] δ = [−r; 0]` with Marquardt scaling `D`.
/// Identical inputs give bitwise-identical traces.
pub fn nlls_solve<F>(mut residual: F, init: DVector<f64>, budget: &SolverBudget) -> Result<NllsReport, NllsError>
where
    F: FnMut(&DVector<f64>) -> Option<DVector<f64>>,
{
    if budget.max_iterations == 0
        || budget.damping_min <= 0.0
        || budget.damping_max <= budget.damping_min
        || budget.fd_step <= 0.0
    {
        return Err(NllsError::InvalidBudget(format!("{budget:?}")));
    }
    let mut x = init;
    let mut r = residual(&x).ok_or(NllsError::InfeasibleStart)?;
    let mut evaluations = 1;
    let mut norm = r.norm();
    let mut trace = vec![norm];
    let mut lambda = budget.initial_damping.clamp(budget.damping_min, budget.damping_max);
    let n = x.len();
    let report = |x: &DVector<f64>, norm, it, trace: &Vec<f64>, ev, reason| NllsReport {
        x: x.clone(),
        residual_norm: norm,
        iterations: it,
        trace: trace.clone(),
        evaluations: ev,
        reason,
    };

    for iter in 0..budget.max_iterations {
        if norm <= budget.residual_tol {
            return Ok(report(&x, norm, iter, &trace, evaluations, Some(StopReason::ResidualTolerance)));
        }
        let m = r.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = budget.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let mut xm = x.clone();
            xm[j] -= h;
            let rp = residual(&xp);
            let rm = residual(&xm);
            evaluations += 2;
            let col = match (rp, rm) {
                (Some(p), Some(q)) => (p - q) / (2.0 * h),
                (Some(p), None) => (p - &r) / h,
                (None, Some(q)) => (&r - q) / h,
                (None, None) => DVector::zeros(m),
            };
            jac.set_column(j, &col);
        }
        let grad = jac.transpose() * &r;
        if grad.amax() <= budget.gradient_tol {
            return Ok(report(&x, norm, iter, &trace, evaluations, Some(StopReason::GradientTolerance)));
        }
        let diag: Vec<f64> = (0..n).map(|j| jac.column(j).norm_squared()).collect();
        let diag_floor = diag.iter().cloned().fold(0.0, f64::max).max(1.0) * 1e-12;

        let mut accepted = false;
        while lambda <= budget.damping_max {
            let mut aug = DMatrix::<f64>::zeros(m + n, n);
            aug.view_mut((0, 0), (m, n)).copy_from(&jac);
            for j in 0..n {
                aug[(m + j, j)] = (lambda * diag[j].max(diag_floor)).sqrt();
            }
            let mut rhs = DVector::<f64>::zeros(m + n);
            rhs.rows_mut(0, m).copy_from(&(-&r));
            let step = match aug.svd(true, true).solve(&rhs, 1e-14) {
                Ok(s) => s,
                Err(_) => {
                    lambda *= 4.0;
                    continue;
                }
            };
            let x_new = &x + &step;
            let r_new = residual(&x_new);
            evaluations += 1;
            match r_new {
                Some(rn) if rn.norm() < norm => {
                    let small_step = step.norm() <= budget.step_tol * (x.norm() + budget.step_tol);
                    x = x_new;
                    r = rn;
                    norm = r.norm();
                    trace.push(norm);
                    lambda = (lambda / 10.0).max(budget.damping_min);
                    accepted = true;
                    if small_step {
                        return Ok(report(&x, norm, iter + 1, &trace, evaluations, Some(StopReason::StepTolerance)));
                    }
                    break;
                }
                _ => {
                    if step.norm() <= budget.step_tol * (x.norm() + budget.step_tol) {
                        return Ok(report(&x, norm, iter + 1, &trace, evaluations, Some(StopReason::StepTolerance)));
                    }
                    lambda *= 4.0;
                }
            }
        }
        if !accepted {
            return Err(NllsError::NoConvergence(Box::new(report(&x, norm, iter + 1, &trace, evaluations, None))));
        }
    }
    if norm <= budget.residual_tol {
        return Ok(report(&x, norm, budget.max_iterations, &trace, evaluations, Some(StopReason::ResidualTolerance)));
    }
    Err(NllsError::NoConvergence(Box::new(report(
        &x,
        norm,
        budget.max_iterations,
        &trace,
        evaluations,
        None,
    ))))
}
