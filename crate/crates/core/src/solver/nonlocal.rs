//! Direct discretization of the nonlocal equation, independent of any
//! exponential-sum approximation.
//!
//! Backward Euler in time with product integration of the memory term: on a
//! uniform grid the derivative on `[t^k, t^{k+1}]` is the difference quotient
//! and the kernel is integrated exactly over each lag interval,
//!
//! ```text
//! B (y^{n+1} - y^n) + sum_{k=0}^{n} W_{n-k} C (y^{k+1} - y^k) + tau A y^{n+1} = tau f^{n+1},
//! W_j = ∫_{j tau}^{(j+1) tau} k(r) dr.
//! ```
//!
//! The full history is kept, so the cost is quadratic in the number of steps.

use std::sync::Arc;

use super::{ProblemSpec, SchemeConfig};
use crate::error::{Error, Result};
use crate::kernel::MemoryKernel;
use crate::linop::{
    self, default_max_iter, solve_spd_from, LinearCombination, OperatorRef, DEFAULT_CG_TOL,
};

pub const MAX_DIM: usize = 512;
pub const MAX_STEPS: usize = 4000;

/// Product-integration weights `W_j`, `j = 0..n_steps`.
pub fn lag_weights<K: MemoryKernel + ?Sized>(
    kernel: &K,
    tau: f64,
    n_steps: usize,
) -> Result<Vec<f64>> {
    (0..n_steps)
        .map(|j| kernel.interval_integral(j as f64 * tau, (j + 1) as f64 * tau))
        .collect()
}

/// Returns `y^0, ..., y^N` with `N = cfg.n_steps`. `cfg.sigma` is ignored;
/// the scheme is first order.
pub fn nonlocal_quadrature_reference<K: MemoryKernel>(
    spec: &ProblemSpec<K>,
    cfg: &SchemeConfig,
) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let n = spec.dim();
    if n > MAX_DIM {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_DIM,
        });
    }
    if cfg.n_steps > MAX_STEPS {
        return Err(Error::TooLarge {
            size: cfg.n_steps,
            limit: MAX_STEPS,
        });
    }
    let tau = cfg.tau;
    let weights = lag_weights(&spec.kernel, tau, cfg.n_steps)?;

    let mass: OperatorRef = Arc::new(LinearCombination::new(vec![
        (1.0, spec.b.clone()),
        (weights[0], spec.c.clone()),
    ])?);
    let step_op = LinearCombination::new(vec![(1.0, mass.clone()), (tau, spec.a.clone())])?;

    let mut levels = Vec::with_capacity(cfg.n_steps + 1);
    levels.push(spec.u0.clone());
    let mut increments: Vec<Vec<f64>> = Vec::with_capacity(cfg.n_steps);
    let mut rhs = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut history = vec![0.0; n];
    for step in 0..cfg.n_steps {
        let y = &levels[step];
        spec.source.eval_into((step + 1) as f64 * tau, &mut rhs);
        mass.apply_into(y, &mut tmp);
        // sum_{k<step} W_{step-k} (y^{k+1} - y^k)
        history.iter_mut().for_each(|v| *v = 0.0);
        for (k, d) in increments.iter().enumerate() {
            let w = weights[step - k];
            for i in 0..n {
                history[i] += w * d[i];
            }
        }
        let ch = linop::apply(spec.c.as_ref(), &history)?;
        for i in 0..n {
            rhs[i] = tau * rhs[i] + tmp[i] - ch[i];
        }
        let mut next = y.clone();
        solve_spd_from(
            &step_op,
            &rhs,
            &mut next,
            DEFAULT_CG_TOL,
            default_max_iter(n),
        )?;
        increments.push(next.iter().zip(y).map(|(a, b)| a - b).collect());
        levels.push(next);
    }
    Ok(levels)
}
