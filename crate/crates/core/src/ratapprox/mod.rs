//! Exponential-sum fits of a kernel through rational approximation of its
//! Laplace transform.
//!
//! A rational function `gamma2 + sum_i a_i / (b_i + s)` with `a_i, b_i > 0`
//! is the Laplace transform of `gamma2 delta(t) + sum_i a_i exp(-b_i t)`, so a
//! good real-axis rational fit of `K(s)` yields an exponential-sum kernel.
//! The fit uses AAA on a sample grid clustered near `s = 0`, converts the
//! barycentric result to poles and residues and certifies the error in both
//! the transform and the time domain.

pub mod aaa;
pub mod io;
pub mod partial;

use std::path::Path;

use log::debug;
use nalgebra::{DMatrix, DVector};

pub use self::aaa::{aaa, Barycentric};
pub use self::io::{
    format_coefficients, load_coefficients, parse_coefficients, save_coefficients, tabulated,
};
pub use self::partial::{poles_to_terms, PoleResidueForm};
use crate::error::{Error, Result};
use crate::io::{csv_table, write_atomic};
use crate::kernel::{
    default_positivity_grid, log_grid, ExpSumKernel, ExpTerm, LaplaceTransform, MemoryKernel,
};

/// Anything that can be fitted and certified: a Laplace transform for the
/// fit and time-domain values for the certificate.
pub trait FitTarget: LaplaceTransform + MemoryKernel {}

impl<T: LaplaceTransform + MemoryKernel> FitTarget for T {}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Number of exponential terms.
    pub m: usize,
    /// Right end of the approximation interval `[0, s_max]`.
    pub s_max: f64,
    pub n_samples: usize,
    pub include_gamma2: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            m: 10,
            s_max: 1e3,
            n_samples: 2000,
            include_gamma2: true,
        }
    }
}

impl FitConfig {
    pub fn new(m: usize, s_max: f64) -> Self {
        Self {
            m,
            s_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Domain("m must be >= 1".into()));
        }
        if !(self.s_max > 0.0 && self.s_max.is_finite()) {
            return Err(Error::Domain(format!(
                "s_max must be positive, got {}",
                self.s_max
            )));
        }
        if self.n_samples < 4 * self.m {
            return Err(Error::Domain(format!(
                "n_samples = {} must be at least 4 m = {}",
                self.n_samples,
                4 * self.m
            )));
        }
        Ok(())
    }
}

/// `s = 0` followed by `n - 1` log-spaced points on `[lo_frac * s_max, s_max]`.
pub fn sample_grid(s_max: f64, n: usize, lo_frac: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(n);
    g.push(0.0);
    g.extend(log_grid(lo_frac * s_max, s_max, n - 1));
    g
}

/// Default certification grid in `s`: zero plus 2000 log-spaced points on
/// `[1e-6 s_max, s_max]`.
pub fn default_s_grid(s_max: f64) -> Vec<f64> {
    sample_grid(s_max, 2001, 1e-6)
}

/// Default certification window in `t`: 500 log-spaced points on `[1e-3, 1e2]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e-3, 1e2, 500)
}

/// Result of a fit or certification run.
#[allow(non_snake_case)]
#[derive(Debug, Clone)]
pub struct FitReport {
    pub kernel: ExpSumKernel,
    /// `max |K~(s) - K(s)|` over the s grid.
    pub eps_F_max: f64,
    /// `max |k~(t) - k(t)|` over the t window.
    pub eps_f_max_on_window: f64,
    pub positivity_ok: bool,
    /// Rows `(s, K, K~, eps_F)`.
    pub s_table: Vec<[f64; 4]>,
    /// Rows `(t, k, k~, eps_f)`.
    pub t_table: Vec<[f64; 4]>,
}

#[allow(non_snake_case)]
impl FitReport {
    pub fn s_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.s_table.iter().map(|r| r.to_vec()).collect();
        csv_table(&["s", "K", "K_fit", "eps_F"], &rows, &[])
    }

    pub fn t_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self.t_table.iter().map(|r| r.to_vec()).collect();
        csv_table(&["t", "k", "k_fit", "eps_f"], &rows, &[])
    }

    pub fn write_csvs(&self, s_path: &Path, t_path: &Path) -> Result<()> {
        write_atomic(s_path, self.s_csv().as_bytes())?;
        write_atomic(t_path, self.t_csv().as_bytes())
    }

    pub fn eps_F_at(&self, s: f64) -> Option<f64> {
        self.s_table.iter().find(|r| r[0] == s).map(|r| r[3])
    }
}

/// Compares a fitted kernel with the exact one on the given grids.
pub fn certify(
    truth: &dyn FitTarget,
    fit: &ExpSumKernel,
    s_grid: &[f64],
    t_grid: &[f64],
) -> Result<FitReport> {
    if s_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::Domain("certification grids must be nonempty".into()));
    }
    if t_grid.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain(
            "certification t grid must be positive".into(),
        ));
    }
    let mut s_table = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let exact = truth.laplace(s)?;
        let approx = fit.eval_laplace(s)?;
        s_table.push([s, exact, approx, (approx - exact).abs()]);
    }
    let mut t_table = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let exact = truth.value(t)?;
        let approx = fit.eval(t);
        t_table.push([t, exact, approx, (approx - exact).abs()]);
    }
    let positivity_ok = fit.validate().is_ok()
        && fit
            .check_positive_type(&default_positivity_grid())?
            .passed();
    Ok(FitReport {
        kernel: fit.clone(),
        eps_F_max: s_table.iter().map(|r| r[3]).fold(0.0, f64::max),
        eps_f_max_on_window: t_table.iter().map(|r| r[3]).fold(0.0, f64::max),
        positivity_ok,
        s_table,
        t_table,
    })
}

const REPAIR_ATTEMPTS: usize = 3;

/// Fits `m` exponential terms (and optionally a constant `gamma2`) to the
/// Laplace transform of `target` on `[0, s_max]` and certifies the result on
/// the default grids.
pub fn fit_exp_sum(target: &dyn FitTarget, cfg: &FitConfig) -> Result<FitReport> {
    cfg.validate()?;
    let mut last_err = None;
    for attempt in 0..=REPAIR_ATTEMPTS {
        // Perturbed grids move the support points and break up spurious poles.
        let lo = 1e-6 * (1.0 + 0.37 * attempt as f64);
        let n = cfg.n_samples + 7 * attempt;
        let grid = sample_grid(cfg.s_max, n, lo);
        match fit_on_grid(target, cfg, &grid) {
            Ok(kernel) => {
                return certify(
                    target,
                    &kernel,
                    &default_s_grid(cfg.s_max),
                    &default_t_grid(),
                );
            }
            Err(e @ Error::FitFailure(_)) | Err(e @ Error::ConversionFailure(_)) => {
                debug!("fit attempt {attempt} failed: {e}");
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::FitFailure(format!(
        "no sign-admissible fit after {} grid perturbations: {}",
        REPAIR_ATTEMPTS,
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn fit_on_grid(target: &dyn FitTarget, cfg: &FitConfig, grid: &[f64]) -> Result<ExpSumKernel> {
    let values: Vec<f64> = grid
        .iter()
        .map(|&s| target.laplace(s))
        .collect::<Result<_>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(
            "target transform is not finite on the sample grid".into(),
        ));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let bary = aaa(grid, &values, cfg.m + 1, 1e-14)?;
    let form = poles_to_terms(&bary.support, &bary.weights, &bary.values)?;

    for &p in &form.poles {
        if p >= 0.0 {
            return Err(Error::FitFailure(format!(
                "pole {p:.6e} lies in the closed right half-line (inside [0, {}] or beyond)",
                cfg.s_max
            )));
        }
    }
    let rates: Vec<f64> = form.poles.iter().map(|p| -p).collect();
    let (gamma2, weights) = if cfg.include_gamma2 {
        (form.constant, form.residues.clone())
    } else {
        refit_residues(grid, &values, &rates)?
    };

    // Terms whose contribution is below roundoff relative to K are kept at a
    // positive floor instead of being treated as sign violations.
    let floor = 1e-13 * scale;
    let mut terms = Vec::with_capacity(cfg.m);
    for (&a, &b) in weights.iter().zip(&rates) {
        let a = if a.abs() <= floor * b { floor * b } else { a };
        if !(a > 0.0) {
            return Err(Error::FitFailure(format!(
                "negative residue a = {a:.6e} at pole b = {b:.6e}"
            )));
        }
        terms.push(ExpTerm { weight: a, rate: b });
    }
    // Exact early convergence leaves fewer poles than requested; pad with
    // negligible fast terms so that the term count is always m.
    let mut pad_rate = 2.0 * cfg.s_max;
    while terms.len() < cfg.m {
        terms.push(ExpTerm {
            weight: floor * pad_rate,
            rate: pad_rate,
        });
        pad_rate *= 2.0;
    }
    let gamma2 = if gamma2.abs() <= floor { 0.0 } else { gamma2 };
    if gamma2 < 0.0 {
        return Err(Error::FitFailure(format!(
            "negative constant term gamma2 = {gamma2:.6e}"
        )));
    }
    terms.sort_by(|x, y| x.rate.total_cmp(&y.rate));
    ExpSumKernel::new(0.0, gamma2, terms).map_err(|e| Error::FitFailure(e.to_string()))
}

/// Least-squares residues for fixed rates with no constant term.
fn refit_residues(grid: &[f64], values: &[f64], rates: &[f64]) -> Result<(f64, Vec<f64>)> {
    let a = DMatrix::from_fn(grid.len(), rates.len(), |i, j| 1.0 / (rates[j] + grid[i]));
    let rhs = DVector::from_column_slice(values);
    let svd = a.svd(true, true);
    let x = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::FitFailure(format!("residue least squares failed: {e}")))?;
    Ok((0.0, x.iter().copied().collect()))
}
