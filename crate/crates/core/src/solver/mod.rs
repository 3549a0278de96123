//! Time integration of the memory equation with an exponential-sum kernel.
//!
//! With `k(t) = gamma1 + gamma2 delta(t) + sum_i a_i exp(-b_i t)` the memory
//! term is carried by auxiliary states `v_i(t) = ∫_0^t exp(-b_i (t-s)) v'(s) ds`
//! that obey `v_i' + b_i v_i - v' = 0`, so the problem becomes the local
//! system
//!
//! ```text
//! (B + sum a_i/b_i C) v' - sum a_i/b_i C v_i' + A v = f,   v(0) = u0, v_i(0) = 0.
//! ```
//!
//! [`scheme`] discretizes it with two-level weighted steps; [`dense`] and
//! [`nonlocal`] are independent reference solutions.

pub mod dense;
pub mod nonlocal;
pub mod scheme;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::ExpSumKernel;
use crate::linop::{self, GridWeight, LinearCombination, OperatorRef};

pub use self::dense::{block_operators, dense_coupled_levels, dense_coupled_reference};
pub use self::nonlocal::nonlocal_quadrature_reference;
pub use self::scheme::{
    raw_residuals, run, step, EnergyRecord, EnergyTrace, MonitorMode, RunOptions, Snapshot,
    Stepper, Trajectory,
};

type SourceFn = dyn Fn(f64, &mut [f64]) + Send + Sync;

/// Right-hand side `f(t)`: an optional function plus an optional constant
/// vector.
#[derive(Clone, Default)]
pub struct Source {
    func: Option<Arc<SourceFn>>,
    offset: Option<Arc<Vec<f64>>>,
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Source")
            .field("func", &self.func.as_ref().map(|_| "<fn>"))
            .field("offset", &self.offset)
            .finish()
    }
}

impl Source {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `f` writes `f(t)` into its output slice, which arrives zeroed.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Send + Sync + 'static,
    {
        Self {
            func: Some(Arc::new(f)),
            offset: None,
        }
    }

    pub fn constant(v: Vec<f64>) -> Self {
        Self {
            func: None,
            offset: Some(Arc::new(v)),
        }
    }

    /// `f(t) + v`.
    pub fn plus_constant(&self, v: Vec<f64>) -> Self {
        let offset = match &self.offset {
            Some(o) => o.iter().zip(&v).map(|(x, y)| x + y).collect(),
            None => v,
        };
        Self {
            func: self.func.clone(),
            offset: Some(Arc::new(offset)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.func.is_none()
            && self
                .offset
                .as_ref()
                .is_none_or(|o| o.iter().all(|&x| x == 0.0))
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        if let Some(f) = &self.func {
            f(t, out);
        }
        if let Some(o) = &self.offset {
            for (x, y) in out.iter_mut().zip(o.iter()) {
                *x += y;
            }
        }
    }

    pub fn eval(&self, t: f64, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        self.eval_into(t, &mut out);
        out
    }
}

/// `B u' + ∫ k(t-s) C u'(s) ds + A u = f`, `u(0) = u0`.
///
/// Any scalar memory coupling is folded into `C`.
#[derive(Debug, Clone)]
pub struct ProblemSpec<K = ExpSumKernel> {
    pub b: OperatorRef,
    pub c: OperatorRef,
    pub a: OperatorRef,
    pub kernel: K,
    pub source: Source,
    pub u0: Vec<f64>,
    /// Inner-product weight of the underlying space.
    pub weight: GridWeight,
}

impl<K> ProblemSpec<K> {
    pub fn new(
        b: OperatorRef,
        c: OperatorRef,
        a: OperatorRef,
        kernel: K,
        source: Source,
        u0: Vec<f64>,
        weight: GridWeight,
    ) -> Result<Self> {
        let n = u0.len();
        for op in [&b, &c, &a] {
            if op.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: op.dim(),
                });
            }
        }
        if u0.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("initial data must be finite".into()));
        }
        Ok(Self {
            b,
            c,
            a,
            kernel,
            source,
            u0,
            weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Same operators and data with a different kernel.
    pub fn with_kernel<K2>(&self, kernel: K2) -> ProblemSpec<K2> {
        ProblemSpec {
            b: self.b.clone(),
            c: self.c.clone(),
            a: self.a.clone(),
            kernel,
            source: self.source.clone(),
            u0: self.u0.clone(),
            weight: self.weight,
        }
    }
}

impl ProblemSpec<ExpSumKernel> {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()
    }
}

/// Weight `sigma`, step `tau` and number of steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub sigma: f64,
    pub tau: f64,
    pub n_steps: usize,
}

impl SchemeConfig {
    pub fn new(sigma: f64, tau: f64, n_steps: usize) -> Result<Self> {
        let cfg = Self {
            sigma,
            tau,
            n_steps,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::Domain(format!(
                "sigma must lie in (0, 1], got {}",
                self.sigma
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Domain(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.n_steps < 1 {
            return Err(Error::Domain("n_steps must be >= 1".into()));
        }
        Ok(())
    }

    /// Unconditional stability holds for `sigma >= 1/2`.
    pub fn is_stable(&self) -> bool {
        self.sigma >= 0.5
    }

    pub fn t_end(&self) -> f64 {
        self.tau * self.n_steps as f64
    }
}

/// Solution `y^n` and auxiliary states `y_i^n` at level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub level: usize,
    pub y: Vec<f64>,
    pub aux: Vec<Vec<f64>>,
}

impl SolverState {
    /// `y^0 = u0`, `y_i^0 = 0`.
    pub fn initial(spec: &ProblemSpec) -> Self {
        Self {
            level: 0,
            y: spec.u0.clone(),
            aux: vec![vec![0.0; spec.dim()]; spec.kernel.m()],
        }
    }

    pub fn time(&self, tau: f64) -> f64 {
        self.level as f64 * tau
    }
}

/// Moves the constant and point-mass parts of the kernel into the operators:
/// `gamma2 delta(t)` adds `gamma2 C` to `B`, and the constant `gamma1`
/// contributes `gamma1 C (u - u0)`, i.e. `A -> A + gamma1 C`,
/// `f -> f + gamma1 C u0`. The returned kernel is the pure exponential part.
pub fn absorb_gamma(spec: &ProblemSpec) -> Result<ProblemSpec> {
    let (g1, g2) = (spec.kernel.gamma1(), spec.kernel.gamma2());
    if g1 == 0.0 && g2 == 0.0 {
        return Ok(spec.clone());
    }
    let mut out = spec.with_kernel(spec.kernel.exponential_part());
    if g2 != 0.0 {
        out.b = Arc::new(LinearCombination::new(vec![
            (1.0, spec.b.clone()),
            (g2, spec.c.clone()),
        ])?);
    }
    if g1 != 0.0 {
        out.a = Arc::new(LinearCombination::new(vec![
            (1.0, spec.a.clone()),
            (g1, spec.c.clone()),
        ])?);
        let cu0 = linop::apply(spec.c.as_ref(), &spec.u0)?;
        out.source = spec
            .source
            .plus_constant(cu0.iter().map(|v| g1 * v).collect());
    }
    Ok(out)
}

/// `mu = sum_i a_i / (1 + sigma b_i tau)`.
pub fn mu_coefficient(kernel: &ExpSumKernel, sigma: f64, tau: f64) -> f64 {
    kernel
        .terms()
        .iter()
        .map(|e| e.weight / (1.0 + sigma * e.rate * tau))
        .sum()
}
