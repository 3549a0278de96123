//! The two-dimensional relaxation experiment and the commands behind the
//! `memsolve` binary.
//!
//! The model problem is
//!
//! ```text
//! w_t + c ∫_0^t k(t-s) w_s(x, s) ds - Δw = 0   on the unit square,
//! w = 0 on the boundary,   w(x, 0) = x1 (1 - x1^6) x2 (1 - x2^6),
//! ```
//!
//! discretized with the five-point Laplacian, so `B = I`, `C = c I`,
//! `A = -Δ_h`.

mod commands;

use std::path::PathBuf;
use std::sync::Arc;

use serde::Deserialize;

pub use self::commands::{
    cmd_compare, cmd_convergence, cmd_fit_kernel, cmd_solve, observed_order, solve_with,
    CompareArgs, ConvergenceTable, ErrorReport, ErrorRow, FitKernelArgs, OrderRow, SolveOutput,
    DEFAULT_CHECKPOINTS,
};
use crate::error::{Error, Result};
use crate::kernel::{AnalyticKernel, ExpSumKernel};
use crate::linop::{GridLaplacian, LinearOperator, OperatorRef, ScaledIdentity};
use crate::ratapprox::{fit_exp_sum, load_coefficients, tabulated, FitConfig};
use crate::solver::{ProblemSpec, SchemeConfig, Source};

/// Where the exponential-sum kernel comes from.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KernelSource {
    /// Tabulated ten-term kernel when one exists for `(alpha, delta, m)`,
    /// otherwise a fresh fit.
    #[default]
    Auto,
    Tabulated,
    Fit {
        s_max: f64,
    },
    File {
        path: PathBuf,
    },
}

/// Initial condition of the model problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCondition {
    /// `x1 (1 - x1^6) x2 (1 - x2^6)`
    #[default]
    Polynomial,
    /// `sin(pi x1) sin(pi x2)`
    Eigenmode,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelProblem {
    pub n1: usize,
    pub n2: usize,
    /// Memory coupling `c >= 0`.
    pub c: f64,
    pub alpha: f64,
    pub delta: f64,
    pub m: usize,
    pub kernel: KernelSource,
    pub sigma: f64,
    pub t_final: f64,
    pub steps: usize,
    pub probe: (f64, f64),
    pub initial: InitialCondition,
}

impl Default for ModelProblem {
    fn default() -> Self {
        Self {
            n1: 64,
            n2: 64,
            c: 1.0,
            alpha: 0.5,
            delta: 1.0,
            m: 10,
            kernel: KernelSource::Auto,
            sigma: 0.5,
            t_final: 1.0,
            steps: 100,
            probe: (0.5, 0.5),
            initial: InitialCondition::Polynomial,
        }
    }
}

/// Config file layout: a `[problem]` table with [`ModelProblem`] fields.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    problem: ModelProblem,
}

impl ModelProblem {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg.problem)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        GridLaplacian::new(self.n1, self.n2)?;
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return Err(Error::Domain(format!(
                "memory coupling c must be >= 0, got {}",
                self.c
            )));
        }
        AnalyticKernel::new(self.alpha, self.delta)?;
        if self.m < 1 {
            return Err(Error::Domain("m must be >= 1".into()));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::Domain(format!(
                "final time must be positive, got {}",
                self.t_final
            )));
        }
        SchemeConfig::new(self.sigma, self.tau(), self.steps)?;
        let (p1, p2) = self.probe;
        if !(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0) {
            return Err(Error::Domain(format!(
                "probe ({p1}, {p2}) must be inside the unit square"
            )));
        }
        Ok(())
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.steps.max(1) as f64
    }

    /// Sets the step count from a step size; `t_final / tau` must be an integer.
    pub fn set_tau(&mut self, tau: f64) -> Result<()> {
        if !(tau > 0.0) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        let steps = (self.t_final / tau).round();
        if steps < 1.0 || ((steps * tau - self.t_final).abs() > 1e-9 * self.t_final) {
            return Err(Error::Domain(format!(
                "tau = {tau} does not divide the final time {}",
                self.t_final
            )));
        }
        self.steps = steps as usize;
        Ok(())
    }

    pub fn scheme(&self) -> Result<SchemeConfig> {
        SchemeConfig::new(self.sigma, self.tau(), self.steps)
    }

    pub fn grid(&self) -> Result<GridLaplacian> {
        GridLaplacian::new(self.n1, self.n2)
    }

    pub fn analytic_kernel(&self) -> Result<AnalyticKernel> {
        AnalyticKernel::new(self.alpha, self.delta)
    }

    pub fn resolve_kernel(&self) -> Result<ExpSumKernel> {
        let available =
            self.delta == 1.0 && self.m == 10 && [0.25, 0.5, 0.75].contains(&self.alpha);
        match &self.kernel {
            KernelSource::Auto if available => tabulated(self.alpha),
            KernelSource::Auto => self.fit_kernel(1e3),
            KernelSource::Tabulated => {
                if !available {
                    return Err(Error::Config(format!(
                        "no tabulated kernel for alpha = {}, delta = {}, m = {}",
                        self.alpha, self.delta, self.m
                    )));
                }
                tabulated(self.alpha)
            }
            KernelSource::Fit { s_max } => self.fit_kernel(*s_max),
            KernelSource::File { path } => load_coefficients(path),
        }
    }

    fn fit_kernel(&self, s_max: f64) -> Result<ExpSumKernel> {
        let report = fit_exp_sum(&self.analytic_kernel()?, &FitConfig::new(self.m, s_max))?;
        Ok(report.kernel)
    }

    pub fn initial_values(&self, grid: &GridLaplacian) -> Vec<f64> {
        match self.initial {
            InitialCondition::Polynomial => {
                grid.sample(|x1, x2| x1 * (1.0 - x1.powi(6)) * x2 * (1.0 - x2.powi(6)))
            }
            InitialCondition::Eigenmode => grid.sample(|x1, x2| {
                (std::f64::consts::PI * x1).sin() * (std::f64::consts::PI * x2).sin()
            }),
        }
    }

    /// `B = I`, `C = c I`, `A = -Δ_h`, zero source.
    pub fn build_spec(&self, kernel: ExpSumKernel) -> Result<ProblemSpec> {
        self.build_spec_with(kernel)
    }

    /// The same discrete problem with an arbitrary kernel type.
    pub fn build_spec_with<K>(&self, kernel: K) -> Result<ProblemSpec<K>> {
        self.validate()?;
        let grid = self.grid()?;
        let n = grid.dim();
        let b: OperatorRef = Arc::new(ScaledIdentity::identity(n));
        let c: OperatorRef = Arc::new(ScaledIdentity::new(n, self.c));
        let a: OperatorRef = Arc::new(grid);
        ProblemSpec::new(
            b,
            c,
            a,
            kernel,
            Source::zero(),
            self.initial_values(&grid),
            grid.weight(),
        )
    }

    pub fn probe_index(&self) -> Result<usize> {
        Ok(self.grid()?.nearest_node(self.probe.0, self.probe.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_reference_setup() {
        let p = ModelProblem::default();
        assert_eq!((p.n1, p.n2, p.m), (64, 64, 10));
        assert_eq!((p.c, p.alpha, p.delta, p.sigma), (1.0, 0.5, 1.0, 0.5));
        assert_eq!(p.probe, (0.5, 0.5));
        p.validate().unwrap();
        assert_eq!(p.resolve_kernel().unwrap(), tabulated(0.5).unwrap());
        let grid = p.grid().unwrap();
        let idx = p.probe_index().unwrap();
        assert_eq!(grid.nodes()[idx], (0.5, 0.5));
    }

    #[test]
    fn toml_overrides() {
        let p = ModelProblem::from_toml(
            "[problem]\nn1 = 8\nn2 = 8\nc = 0.0\nsigma = 1.0\nkernel = { kind = \"fit\", s_max = 100.0 }\n",
        )
        .unwrap();
        assert_eq!(p.n1, 8);
        assert_eq!(p.c, 0.0);
        assert_eq!(p.kernel, KernelSource::Fit { s_max: 100.0 });
        assert_eq!(p.alpha, 0.5);
        assert!(ModelProblem::from_toml("[problem]\nbogus = 1\n").is_err());
    }

    #[test]
    fn tau_must_divide_final_time() {
        let mut p = ModelProblem::default();
        p.set_tau(0.025).unwrap();
        assert_eq!(p.steps, 40);
        assert!(p.set_tau(0.3).is_err());
    }

    #[test]
    fn invalid_parameters() {
        let p = ModelProblem {
            alpha: 1.5,
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::Domain(_))));
        let p = ModelProblem {
            c: -1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = ModelProblem {
            probe: (1.0, 0.5),
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = ModelProblem {
            kernel: KernelSource::Tabulated,
            alpha: 0.3,
            ..Default::default()
        };
        assert!(p.resolve_kernel().is_err());
    }

    #[test]
    fn spec_shape() {
        let p = ModelProblem {
            n1: 4,
            n2: 4,
            c: 2.0,
            ..Default::default()
        };
        let spec = p.build_spec(tabulated(0.5).unwrap()).unwrap();
        assert_eq!(spec.dim(), 9);
        assert_eq!(spec.weight.0, 1.0 / 16.0);
        assert_eq!(
            crate::linop::apply(spec.c.as_ref(), &[1.0; 9]).unwrap(),
            vec![2.0; 9]
        );
    }
}
