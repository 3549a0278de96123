//! Solvers for evolution equations with time-derivative memory,
//!
//! ```text
//! B du/dt + ∫_0^t k(t - s) C du/ds(s) ds + A u = f(t),   u(0) = u0,
//! ```
//!
//! with `A`, `B`, `C` self-adjoint and positive definite.
//!
//! The kernel is replaced by an exponential sum `sum_i a_i exp(-b_i t)`
//! (obtained by rational approximation of its Laplace transform, see
//! [`ratapprox`]), which turns the nonlocal equation into a local system for
//! the solution and `m` auxiliary convolution states. That system is advanced
//! by a two-level weighted scheme in which the auxiliary states are
//! eliminated, so each step costs one SPD solve with
//! `B + sigma tau (mu C + A)` ([`solver`]).
//!
//! Independent oracles live next to the fast path: a dense integrator of the
//! coupled block system and a direct product-integration discretization of
//! the original nonlocal equation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod io;
pub mod kernel;
pub mod linop;
pub mod quad;
pub mod ratapprox;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use kernel::{AnalyticKernel, ExpSumKernel, ExpTerm, LaplaceTransform, MemoryKernel};
pub use linop::{GridLaplacian, GridWeight, LinearOperator, OperatorRef, ScaledIdentity};
pub use ratapprox::{fit_exp_sum, FitConfig, FitReport};
pub use solver::{ProblemSpec, SchemeConfig, SolverState};
