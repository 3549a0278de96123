//! Memory kernels: the tempered power kernel and its exponential-sum
//! approximation.
//!
//! The tempered power kernel is
//!
//! ```text
//! k(t) = t^(-alpha) exp(-delta t) / Gamma(1 - alpha),   K(s) = (s + delta)^(alpha - 1)
//! ```
//!
//! and an exponential-sum kernel is `gamma1 + gamma2 delta(t) + sum_i a_i exp(-b_i t)`
//! with Laplace transform `gamma1 / s + gamma2 + sum_i a_i / (b_i + s)`.

use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma;

/// A kernel `k(t)` that can be evaluated pointwise and integrated over lag
/// intervals.
pub trait MemoryKernel: Send + Sync {
    /// `k(t)` for `t > 0`.
    fn value(&self, t: f64) -> Result<f64>;

    /// `∫_{r0}^{r1} k(r) dr` for `0 <= r0 <= r1`. A point mass at the origin
    /// is included when `r0 == 0`.
    fn interval_integral(&self, r0: f64, r1: f64) -> Result<f64>;
}

/// A kernel with a known Laplace transform on the real half-line.
pub trait LaplaceTransform: Send + Sync {
    fn laplace(&self, s: f64) -> Result<f64>;
}

/// The tempered power kernel `t^(-alpha) exp(-delta t) / Gamma(1 - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticKernel {
    alpha: f64,
    delta: f64,
}

impl AnalyticKernel {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("delta must be >= 0, got {delta}")));
        }
        Ok(Self { alpha, delta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!(
                "kernel is singular at t = {t}; need t > 0"
            )));
        }
        Ok(t.powf(-self.alpha) * (-self.delta * t).exp() / gamma(1.0 - self.alpha))
    }

    pub fn eval_laplace(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !(s + self.delta > 0.0) {
            return Err(Error::Domain(format!(
                "Laplace transform needs s >= 0 and s + delta > 0 (s = {s}, delta = {})",
                self.delta
            )));
        }
        Ok((s + self.delta).powf(self.alpha - 1.0))
    }
}

impl MemoryKernel for AnalyticKernel {
    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }

    fn interval_integral(&self, r0: f64, r1: f64) -> Result<f64> {
        if !(r0 >= 0.0 && r1 >= r0) {
            return Err(Error::Domain(format!("bad lag interval [{r0}, {r1}]")));
        }
        if r0 == r1 {
            return Ok(0.0);
        }
        // u = r^(1 - alpha) removes the singularity:
        // ∫ r^-alpha e^(-delta r) dr = 1/(1-alpha) ∫ exp(-delta u^(1/(1-alpha))) du
        let p = 1.0 - self.alpha;
        let (u0, u1) = (r0.powf(p), r1.powf(p));
        let scale = 1.0 / gamma(2.0 - self.alpha);
        if self.delta == 0.0 {
            return Ok(scale * (u1 - u0));
        }
        let delta = self.delta;
        let inv_p = 1.0 / p;
        let tol = 1e-15 * (u1 - u0).max(f64::MIN_POSITIVE);
        let v = quad::integrate(|u| (-delta * u.powf(inv_p)).exp(), u0, u1, tol)?;
        Ok(scale * v)
    }
}

impl LaplaceTransform for AnalyticKernel {
    fn laplace(&self, s: f64) -> Result<f64> {
        self.eval_laplace(s)
    }
}

/// One term `weight * exp(-rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

/// `gamma1 + gamma2 delta(t) + sum_i a_i exp(-b_i t)` with `a_i, b_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumKernel {
    gamma1: f64,
    gamma2: f64,
    terms: Vec<ExpTerm>,
}

impl ExpSumKernel {
    pub fn new(gamma1: f64, gamma2: f64, terms: Vec<ExpTerm>) -> Result<Self> {
        let kern = Self::new_unchecked(gamma1, gamma2, terms);
        kern.validate()?;
        Ok(kern)
    }

    /// Builds a kernel without checking sign invariants. Diagnostics such as
    /// [`ExpSumKernel::check_positive_type`] are meaningful on such kernels;
    /// the solvers are not.
    pub fn new_unchecked(gamma1: f64, gamma2: f64, terms: Vec<ExpTerm>) -> Self {
        Self {
            gamma1,
            gamma2,
            terms,
        }
    }

    /// Pure exponential sum with no constant or point-mass part.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            0.0,
            0.0,
            pairs
                .iter()
                .map(|&(weight, rate)| ExpTerm { weight, rate })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 >= 0.0 && self.gamma1.is_finite()) {
            return Err(Error::Invariant(format!(
                "gamma1 = {} must be >= 0",
                self.gamma1
            )));
        }
        if !(self.gamma2 >= 0.0 && self.gamma2.is_finite()) {
            return Err(Error::Invariant(format!(
                "gamma2 = {} must be >= 0",
                self.gamma2
            )));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.weight > 0.0 && t.weight.is_finite()) || !(t.rate > 0.0 && t.rate.is_finite()) {
                return Err(Error::Invariant(format!(
                    "term {}: need a > 0 and b > 0, got a = {}, b = {}",
                    i + 1,
                    t.weight,
                    t.rate
                )));
            }
        }
        Ok(())
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// Number of exponential terms.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    /// The same exponentials with `gamma1 = gamma2 = 0`.
    pub fn exponential_part(&self) -> Self {
        Self::new_unchecked(0.0, 0.0, self.terms.clone())
    }

    /// Regular part `gamma1 + sum a_i exp(-b_i t)`; the point mass is not
    /// evaluated pointwise.
    pub fn eval(&self, t: f64) -> f64 {
        self.gamma1
            + self
                .terms
                .iter()
                .map(|e| e.weight * (-e.rate * t).exp())
                .sum::<f64>()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|e| e.weight * e.rate * (-e.rate * t).exp())
            .sum::<f64>()
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|e| e.weight * e.rate * e.rate * (-e.rate * t).exp())
            .sum()
    }

    pub fn eval_laplace(&self, s: f64) -> Result<f64> {
        if s < 0.0 || (s == 0.0 && self.gamma1 > 0.0) {
            return Err(Error::Domain(format!(
                "exp-sum Laplace transform undefined at s = {s} (gamma1 = {})",
                self.gamma1
            )));
        }
        let constant = if self.gamma1 > 0.0 {
            self.gamma1 / s
        } else {
            0.0
        };
        Ok(constant
            + self.gamma2
            + self
                .terms
                .iter()
                .map(|e| e.weight / (e.rate + s))
                .sum::<f64>())
    }

    /// Evaluates the sufficient pointwise conditions `k >= 0`, `k' <= 0`,
    /// `k'' >= 0` on `t_grid`.
    pub fn check_positive_type(&self, t_grid: &[f64]) -> Result<PositivityReport> {
        if t_grid.is_empty() {
            return Err(Error::Domain("empty t grid".into()));
        }
        if t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "t grid must be positive and strictly increasing".into(),
            ));
        }
        let value: Vec<f64> = t_grid.iter().map(|&t| self.eval(t)).collect();
        let first: Vec<f64> = t_grid.iter().map(|&t| self.derivative(t)).collect();
        let second: Vec<f64> = t_grid.iter().map(|&t| self.second_derivative(t)).collect();
        Ok(PositivityReport {
            nonnegative: value.iter().all(|&v| v >= 0.0),
            nonincreasing: first.iter().all(|&v| v <= 0.0),
            convex: second.iter().all(|&v| v >= 0.0),
            t: t_grid.to_vec(),
            value,
            first,
            second,
        })
    }
}

impl MemoryKernel for ExpSumKernel {
    fn value(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("t = {t} < 0")));
        }
        Ok(self.eval(t))
    }

    fn interval_integral(&self, r0: f64, r1: f64) -> Result<f64> {
        if !(r0 >= 0.0 && r1 >= r0) {
            return Err(Error::Domain(format!("bad lag interval [{r0}, {r1}]")));
        }
        let mass = if r0 == 0.0 { self.gamma2 } else { 0.0 };
        let smooth: f64 = self
            .terms
            .iter()
            .map(|e| e.weight / e.rate * ((-e.rate * r0).exp() - (-e.rate * r1).exp()))
            .sum();
        Ok(mass + self.gamma1 * (r1 - r0) + smooth)
    }
}

impl LaplaceTransform for ExpSumKernel {
    fn laplace(&self, s: f64) -> Result<f64> {
        self.eval_laplace(s)
    }
}

/// Pointwise values of `k`, `k'`, `k''` and the sign checks on them.
#[derive(Debug, Clone)]
pub struct PositivityReport {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub nonnegative: bool,
    pub nonincreasing: bool,
    pub convex: bool,
}

impl PositivityReport {
    pub fn passed(&self) -> bool {
        self.nonnegative && self.nonincreasing && self.convex
    }
}

/// `n` logarithmically spaced points on `[lo, hi]`, both ends included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Default grid for positivity diagnostics: 200 points on `[1e-4, 1e2]`.
pub fn default_positivity_grid() -> Vec<f64> {
    log_grid(1e-4, 1e2, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn analytic_kernel_values() {
        let k = AnalyticKernel::new(0.5, 0.0).unwrap();
        assert!((k.eval(1.0).unwrap() - 1.0 / PI.sqrt()).abs() < 1e-14);
        let k = AnalyticKernel::new(0.5, 1.0).unwrap();
        // e^-1 / sqrt(pi) = 0.20755374871029735...
        assert!((k.eval(1.0).unwrap() - 0.207_553_748_710_297_35).abs() < 1e-13);
        let lo = AnalyticKernel::new(0.25, 1.0).unwrap().eval(4.0).unwrap();
        let hi = AnalyticKernel::new(0.25, 4.0).unwrap().eval(4.0).unwrap();
        assert!(lo > hi);
    }

    #[test]
    fn analytic_kernel_domain() {
        let k = AnalyticKernel::new(0.5, 1.0).unwrap();
        assert!(matches!(k.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(k.eval(-1.0), Err(Error::Domain(_))));
        assert!(AnalyticKernel::new(1.5, 1.0).is_err());
        assert!(AnalyticKernel::new(0.0, 1.0).is_err());
        assert!(AnalyticKernel::new(0.5, -1.0).is_err());
        let k0 = AnalyticKernel::new(0.5, 0.0).unwrap();
        assert!(k0.eval_laplace(0.0).is_err());
    }

    #[test]
    fn laplace_closed_form() {
        let k = AnalyticKernel::new(0.5, 1.0).unwrap();
        assert_eq!(k.eval_laplace(0.0).unwrap(), 1.0);
        assert_eq!(k.eval_laplace(3.0).unwrap(), 0.5);
        let k = AnalyticKernel::new(0.75, 1.0).unwrap();
        assert!((k.eval_laplace(15.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interval_integral_matches_closed_form_without_tempering() {
        let k = AnalyticKernel::new(0.3, 0.0).unwrap();
        let g = gamma(1.7);
        for &(a, b) in &[(0.0, 0.01), (0.5, 0.75), (2.0, 10.0)] {
            let exact = (f64::powf(b, 0.7) - f64::powf(a, 0.7)) / g;
            assert!((k.interval_integral(a, b).unwrap() - exact).abs() < 1e-13 * exact);
        }
    }

    #[test]
    fn interval_integral_tempered_against_plain_quadrature() {
        // Away from the singularity the integrand is smooth; integrate it directly.
        let k = AnalyticKernel::new(0.5, 1.0).unwrap();
        let direct = quad::integrate(|t| k.eval(t).unwrap(), 0.5, 2.0, 1e-14).unwrap();
        assert!((k.interval_integral(0.5, 2.0).unwrap() - direct).abs() < 1e-13);
        // On [0, tau] with tau small the e^{-t} factor is nearly 1.
        let tau: f64 = 1e-6;
        let approx = 2.0 * tau.sqrt() / PI.sqrt();
        let v = k.interval_integral(0.0, tau).unwrap();
        assert!(((v - approx) / approx).abs() < 1e-6);
    }

    #[test]
    fn expsum_evaluation() {
        let k = ExpSumKernel::from_pairs(&[(2.0, 1.0)]).unwrap();
        assert_eq!(k.eval(0.0), 2.0);
        assert!((k.eval(2f64.ln()) - 1.0).abs() < 1e-15);
        let c = ExpSumKernel::new(0.5, 0.0, vec![]).unwrap();
        assert_eq!(c.eval(7.0), 0.5);
    }

    #[test]
    fn expsum_laplace() {
        let k = ExpSumKernel::from_pairs(&[(1.0, 1.0)]).unwrap();
        assert_eq!(k.eval_laplace(1.0).unwrap(), 0.5);
        let c = ExpSumKernel::new(0.0, 0.3, vec![]).unwrap();
        for s in [0.0, 1.0, 1e3] {
            assert_eq!(c.eval_laplace(s).unwrap(), 0.3);
        }
        let g1 = ExpSumKernel::new(1.0, 0.0, vec![]).unwrap();
        assert!(g1.eval_laplace(0.0).is_err());
        assert_eq!(g1.eval_laplace(4.0).unwrap(), 0.25);
    }

    #[test]
    fn invariants_rejected() {
        assert!(ExpSumKernel::from_pairs(&[(-1.0, 1.0)]).is_err());
        assert!(ExpSumKernel::from_pairs(&[(1.0, 0.0)]).is_err());
        assert!(ExpSumKernel::new(-0.1, 0.0, vec![]).is_err());
        assert!(ExpSumKernel::new(0.0, f64::NAN, vec![]).is_err());
    }

    #[test]
    fn positivity_diagnostics() {
        let grid = default_positivity_grid();
        assert_eq!(grid.len(), 200);
        let good = ExpSumKernel::from_pairs(&[(1.0, 0.5), (3.0, 20.0)]).unwrap();
        assert!(good.check_positive_type(&grid).unwrap().passed());

        let bad = ExpSumKernel::new_unchecked(
            0.0,
            0.0,
            vec![ExpTerm {
                weight: -1.0,
                rate: 1.0,
            }],
        );
        assert_eq!(bad.eval(0.0), -1.0);
        let report = bad.check_positive_type(&grid).unwrap();
        assert!(!report.nonnegative);
        assert!(!report.passed());

        assert!(good.check_positive_type(&[]).is_err());
        assert!(good.check_positive_type(&[1.0, 0.5]).is_err());
        assert!(good.check_positive_type(&[0.0, 0.5]).is_err());
    }

    #[test]
    fn expsum_interval_integral() {
        let k = ExpSumKernel::new(
            0.5,
            0.25,
            vec![ExpTerm {
                weight: 2.0,
                rate: 3.0,
            }],
        )
        .unwrap();
        let direct = quad::integrate(|t| k.eval(t), 0.2, 0.7, 1e-15).unwrap();
        assert!((k.interval_integral(0.2, 0.7).unwrap() - direct).abs() < 1e-14);
        let direct0 = quad::integrate(|t| k.eval(t), 0.0, 0.7, 1e-15).unwrap();
        assert!((k.interval_integral(0.0, 0.7).unwrap() - direct0 - 0.25).abs() < 1e-14);
    }
}
