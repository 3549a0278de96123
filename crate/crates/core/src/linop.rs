//! Self-adjoint positive definite operators on `R^n`, grid inner products,
//! and a matrix-free conjugate gradient solver.
//!
//! Vectors are plain `[f64]` slices holding nodal values. Grid functions
//! store interior nodes only; the homogeneous Dirichlet boundary is implicit.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A linear operator acting on nodal vectors.
pub trait LinearOperator: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// `y = D x`. Slices must have length [`LinearOperator::dim`].
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// A declared `nu > 0` with `(Dv, v) >= nu (v, v)`, when known.
    fn lower_bound(&self) -> Option<f64> {
        None
    }
}

pub type OperatorRef = Arc<dyn LinearOperator>;

/// Weight of the discrete inner product `(v, w) = weight * sum v_i w_i`.
/// For grid functions it is the cell measure `h1 * h2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridWeight(pub f64);

impl GridWeight {
    pub const UNIT: GridWeight = GridWeight(1.0);
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub fn apply(op: &dyn LinearOperator, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(op.dim(), v.len())?;
    let mut out = vec![0.0; v.len()];
    op.apply_into(v, &mut out);
    Ok(out)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn inner(weight: GridWeight, v: &[f64], w: &[f64]) -> Result<f64> {
    check_dim(v.len(), w.len())?;
    Ok(weight.0 * dot(v, w))
}

pub fn norm(weight: GridWeight, v: &[f64]) -> f64 {
    (weight.0 * dot(v, v)).sqrt()
}

/// `(D v, v)` in the weighted inner product.
pub fn quadratic_form(op: &dyn LinearOperator, weight: GridWeight, v: &[f64]) -> Result<f64> {
    let dv = apply(op, v)?;
    let q = weight.0 * dot(&dv, v);
    let scale = weight.0 * dot(&dv, &dv).sqrt() * dot(v, v).sqrt();
    if q < -1e-12 * scale {
        return Err(Error::NegativeQuadraticForm { value: q });
    }
    Ok(q.max(0.0))
}

/// `||v||_D = (D v, v)^(1/2)`.
pub fn norm_d(op: &dyn LinearOperator, weight: GridWeight, v: &[f64]) -> Result<f64> {
    Ok(quadratic_form(op, weight, v)?.sqrt())
}

/// `c I`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity {
    dim: usize,
    scale: f64,
}

impl ScaledIdentity {
    pub fn new(dim: usize, scale: f64) -> Self {
        Self { dim, scale }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, 1.0)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl LinearOperator for ScaledIdentity {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = self.scale * xi;
        }
    }

    fn lower_bound(&self) -> Option<f64> {
        (self.scale > 0.0).then_some(self.scale)
    }
}

/// Five-point Dirichlet Laplacian `-Δ_h` on the unit square with
/// `N1 x N2` cells. Interior node `(i, j)`, `1 <= i < N1`, `1 <= j < N2`,
/// is stored at `(j - 1) * (N1 - 1) + (i - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLaplacian {
    n1: usize,
    n2: usize,
}

impl GridLaplacian {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::Domain(format!(
                "grid needs N1, N2 >= 2, got {n1} x {n2}"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn h1(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    pub fn weight(&self) -> GridWeight {
        GridWeight(self.h1() * self.h2())
    }

    /// Number of interior nodes along x1 and x2.
    pub fn interior_shape(&self) -> (usize, usize) {
        (self.n1 - 1, self.n2 - 1)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        (j - 1) * (self.n1 - 1) + (i - 1)
    }

    /// Coordinates of every interior node, in storage order.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let (h1, h2) = (self.h1(), self.h2());
        let mut out = Vec::with_capacity(self.dim());
        for j in 1..self.n2 {
            for i in 1..self.n1 {
                out.push((i as f64 * h1, j as f64 * h2));
            }
        }
        out
    }

    pub fn sample<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes().into_iter().map(|(x1, x2)| f(x1, x2)).collect()
    }

    /// Eigenvalue of the mode `sin(k pi x1) sin(l pi x2)`.
    pub fn eigenvalue(&self, k: usize, l: usize) -> f64 {
        let (h1, h2) = (self.h1(), self.h2());
        let s1 = (std::f64::consts::PI * k as f64 * h1 / 2.0).sin();
        let s2 = (std::f64::consts::PI * l as f64 * h2 / 2.0).sin();
        4.0 / (h1 * h1) * s1 * s1 + 4.0 / (h2 * h2) * s2 * s2
    }

    pub fn smallest_eigenvalue(&self) -> f64 {
        self.eigenvalue(1, 1)
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalue(self.n1 - 1, self.n2 - 1)
    }

    /// Index of the interior node nearest to `(x1, x2)`.
    pub fn nearest_node(&self, x1: f64, x2: f64) -> usize {
        let i = ((x1 * self.n1 as f64).round() as usize).clamp(1, self.n1 - 1);
        let j = ((x2 * self.n2 as f64).round() as usize).clamp(1, self.n2 - 1);
        self.index(i, j)
    }
}

impl LinearOperator for GridLaplacian {
    fn dim(&self) -> usize {
        (self.n1 - 1) * (self.n2 - 1)
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let (m1, m2) = self.interior_shape();
        let c1 = 1.0 / (self.h1() * self.h1());
        let c2 = 1.0 / (self.h2() * self.h2());
        for j in 0..m2 {
            for i in 0..m1 {
                let k = j * m1 + i;
                let w = x[k];
                let west = if i > 0 { x[k - 1] } else { 0.0 };
                let east = if i + 1 < m1 { x[k + 1] } else { 0.0 };
                let south = if j > 0 { x[k - m1] } else { 0.0 };
                let north = if j + 1 < m2 { x[k + m1] } else { 0.0 };
                y[k] = c1 * (2.0 * w - west - east) + c2 * (2.0 * w - south - north);
            }
        }
    }

    fn lower_bound(&self) -> Option<f64> {
        Some(self.smallest_eigenvalue())
    }
}

/// A dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    matrix: DMatrix<f64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Domain(format!(
                "operator matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let scale = matrix.amax().max(f64::MIN_POSITIVE);
        if (&matrix - matrix.transpose()).amax() > 1e-13 * scale {
            return Err(Error::Domain("operator matrix is not symmetric".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for (r, yr) in y.iter_mut().enumerate().take(n) {
            *yr = (0..n).map(|c| self.matrix[(r, c)] * x[c]).sum();
        }
    }
}

/// `sum_k c_k D_k`, applied term by term in a fixed order.
#[derive(Debug, Clone)]
pub struct LinearCombination {
    dim: usize,
    parts: Vec<(f64, OperatorRef)>,
}

impl LinearCombination {
    pub fn new(parts: Vec<(f64, OperatorRef)>) -> Result<Self> {
        let dim = parts
            .first()
            .map(|(_, op)| op.dim())
            .ok_or_else(|| Error::Domain("empty linear combination".into()))?;
        for (_, op) in &parts {
            check_dim(dim, op.dim())?;
        }
        Ok(Self { dim, parts })
    }

    pub fn parts(&self) -> &[(f64, OperatorRef)] {
        &self.parts
    }
}

impl LinearOperator for LinearCombination {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let mut tmp = vec![0.0; self.dim];
        for (c, op) in &self.parts {
            if *c == 0.0 {
                continue;
            }
            op.apply_into(x, &mut tmp);
            for (yi, ti) in y.iter_mut().zip(&tmp) {
                *yi += c * ti;
            }
        }
    }

    fn lower_bound(&self) -> Option<f64> {
        let mut nu = 0.0;
        for (c, op) in &self.parts {
            if *c < 0.0 {
                return None;
            }
            if *c > 0.0 {
                nu += c * op.lower_bound()?;
            }
        }
        (nu > 0.0).then_some(nu)
    }
}

/// The step operator `B + sigma tau (mu C + A)`, never materialized.
pub fn composite(
    b: OperatorRef,
    c: OperatorRef,
    a: OperatorRef,
    mu: f64,
    sigma: f64,
    tau: f64,
) -> Result<LinearCombination> {
    LinearCombination::new(vec![(1.0, b), (sigma * tau * mu, c), (sigma * tau, a)])
}

/// Materializes an operator column by column.
pub fn to_dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let n = op.dim();
    let mut out = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        for i in 0..n {
            out[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    out
}

pub const DEFAULT_CG_TOL: f64 = 1e-10;

/// Default iteration cap, `10 * dim`.
pub fn default_max_iter(dim: usize) -> usize {
    10 * dim.max(1)
}

#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `D x = rhs` by conjugate gradients from a zero initial guess,
/// stopping at `||D x - rhs|| <= tol ||rhs||`.
pub fn solve_spd(
    op: &dyn LinearOperator,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; rhs.len()];
    solve_spd_from(op, rhs, &mut x, tol, max_iter)?;
    Ok(x)
}

/// Conjugate gradients starting from the contents of `x`.
pub fn solve_spd_from(
    op: &dyn LinearOperator,
    rhs: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<CgStats> {
    let n = op.dim();
    check_dim(n, rhs.len())?;
    check_dim(n, x.len())?;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "CG tolerance must be positive, got {tol}"
        )));
    }
    let rhs_norm = dot(rhs, rhs).sqrt();
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgStats {
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut r = vec![0.0; n];
    op.apply_into(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    let mut rr = dot(&r, &r);
    let target = tol * rhs_norm;
    if rr.sqrt() <= target {
        return Ok(CgStats {
            iterations: 0,
            relative_residual: rr.sqrt() / rhs_norm,
        });
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        op.apply_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NegativeQuadraticForm { value: pap });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            return Ok(CgStats {
                iterations: it,
                relative_residual: rr_new.sqrt() / rhs_norm,
            });
        }
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: rr.sqrt() / rhs_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn single_node_laplacian() {
        let lap = GridLaplacian::square(2).unwrap();
        assert_eq!(lap.dim(), 1);
        assert_eq!(apply(&lap, &[1.0]).unwrap(), vec![16.0]);
        // ||v||^2 = h1 h2 for a unit nodal value.
        assert_eq!(norm(lap.weight(), &[1.0]).powi(2), 0.25);
    }

    #[test]
    fn scaled_identity() {
        let op = ScaledIdentity::new(3, 2.5);
        assert_eq!(
            apply(&op, &[1.0, -2.0, 4.0]).unwrap(),
            vec![2.5, -5.0, 10.0]
        );
        let v = [3.0, 4.0];
        let c = 9.0;
        let n = norm_d(&ScaledIdentity::new(2, c), GridWeight::UNIT, &v).unwrap();
        assert!((n - c.sqrt() * 5.0).abs() < 1e-14);
        assert_eq!(
            norm_d(&ScaledIdentity::identity(2), GridWeight::UNIT, &v).unwrap(),
            5.0
        );
    }

    #[test]
    fn laplacian_eigenvectors() {
        for &(n1, n2) in &[(4usize, 4usize), (5, 7), (16, 16)] {
            let lap = GridLaplacian::new(n1, n2).unwrap();
            for k in 1..n1 {
                for l in 1..n2 {
                    let v = lap
                        .sample(|x1, x2| (k as f64 * PI * x1).sin() * (l as f64 * PI * x2).sin());
                    let lv = apply(&lap, &v).unwrap();
                    let lam = lap.eigenvalue(k, l);
                    let err = lv
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| (a - lam * b).abs())
                        .fold(0.0, f64::max);
                    assert!(err <= 1e-10 * lam, "({n1},{n2}) mode ({k},{l}): {err}");
                }
            }
        }
    }

    #[test]
    fn dimension_errors() {
        let lap = GridLaplacian::square(4).unwrap();
        assert!(matches!(
            apply(&lap, &[1.0; 4]),
            Err(Error::DimensionMismatch {
                expected: 9,
                got: 4
            })
        ));
        assert!(GridLaplacian::new(1, 4).is_err());
        let parts: Vec<(f64, OperatorRef)> = vec![
            (1.0, Arc::new(ScaledIdentity::identity(3))),
            (1.0, Arc::new(lap)),
        ];
        assert!(LinearCombination::new(parts).is_err());
    }

    #[test]
    fn negative_quadratic_form_detected() {
        let op = ScaledIdentity::new(2, -1.0);
        assert!(matches!(
            norm_d(&op, GridWeight::UNIT, &[1.0, 0.0]),
            Err(Error::NegativeQuadraticForm { .. })
        ));
    }

    #[test]
    fn cg_on_identities() {
        let x = solve_spd(&ScaledIdentity::new(2, 4.0), &[8.0, 8.0], 1e-10, 20).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let rhs = [1.0, -3.0, 0.5];
        let mut x = vec![0.0; 3];
        let stats = solve_spd_from(&ScaledIdentity::identity(3), &rhs, &mut x, 1e-12, 10).unwrap();
        assert_eq!(stats.iterations, 1);
        assert_eq!(x, rhs.to_vec());
    }

    #[test]
    fn cg_no_convergence_reported() {
        let lap = GridLaplacian::square(16).unwrap();
        let rhs = vec![1.0; lap.dim()];
        match solve_spd(&lap, &rhs, 1e-14, 2) {
            Err(Error::NoConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 1e-14);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn cg_matches_dense_direct_solve() {
        for n in [4usize, 6, 8] {
            let lap = GridLaplacian::square(n).unwrap();
            let dim = lap.dim();
            let rhs: Vec<f64> = (0..dim).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
            let x = solve_spd(&lap, &rhs, 1e-12, default_max_iter(dim)).unwrap();
            let dense = to_dense(&lap);
            let direct = dense
                .clone()
                .lu()
                .solve(&nalgebra::DVector::from_column_slice(&rhs))
                .unwrap();
            let res = apply(&lap, &x).unwrap();
            let rel = res
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
                / dot(&rhs, &rhs).sqrt();
            assert!(rel <= 1e-12);
            let scale = direct.amax();
            for i in 0..dim {
                assert!((x[i] - direct[i]).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn composite_examples() {
        let id: OperatorRef = Arc::new(ScaledIdentity::identity(2));
        let op = composite(id.clone(), id.clone(), id.clone(), 1.0, 0.5, 2.0).unwrap();
        assert_eq!(apply(&op, &[1.0, 2.0]).unwrap(), vec![3.0, 6.0]);
        assert_eq!(op.lower_bound(), Some(3.0));

        let b: OperatorRef = Arc::new(ScaledIdentity::new(2, 1.5));
        let op = composite(b.clone(), id.clone(), id, 7.0, 1.0, 0.0).unwrap();
        assert_eq!(
            apply(&op, &[2.0, -1.0]).unwrap(),
            apply(b.as_ref(), &[2.0, -1.0]).unwrap()
        );
    }

    #[test]
    fn dense_operator_requires_symmetry() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(DenseOperator::new(m).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let op = DenseOperator::new(m).unwrap();
        assert_eq!(apply(&op, &[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
    }
}
