//! Dense reference for the coupled block system
//! `𝐁 d𝐯/dt + 𝐀 𝐯 = 𝐟` with `𝐯 = (v, v_1, ..., v_m)`.

use nalgebra::{DMatrix, DVector};

use super::{absorb_gamma, ProblemSpec};
use crate::error::{Error, Result};
use crate::linop::to_dense;

/// Largest block system the dense reference will materialize.
pub const DENSE_LIMIT: usize = 2000;

/// Block mass and stiffness matrices
///
/// ```text
/// 𝐁 = [ B + Σ a_i/b_i C   -a_1/b_1 C  ...  -a_m/b_m C ]     𝐀 = diag(A, a_1 C, ..., a_m C)
///     [ -a_1/b_1 C         a_1/b_1 C              0   ]
///     [ ...                                           ]
///     [ -a_m/b_m C         0           ...  a_m/b_m C ]
/// ```
///
/// for the spec after absorbing `gamma1`, `gamma2`.
pub fn block_operators(spec: &ProblemSpec) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let spec = absorb_gamma(spec)?;
    let n = spec.dim();
    let m = spec.kernel.m();
    let size = n * (m + 1);
    if size > DENSE_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: DENSE_LIMIT,
        });
    }
    let b = to_dense(spec.b.as_ref());
    let c = to_dense(spec.c.as_ref());
    let a = to_dense(spec.a.as_ref());

    let mut mass = DMatrix::zeros(size, size);
    let mut stiff = DMatrix::zeros(size, size);
    mass.view_mut((0, 0), (n, n)).copy_from(&b);
    stiff.view_mut((0, 0), (n, n)).copy_from(&a);
    for (i, term) in spec.kernel.terms().iter().enumerate() {
        let r = term.weight / term.rate;
        let off = (i + 1) * n;
        let rc = &c * r;
        let mut top = mass.view_mut((0, 0), (n, n));
        top += &rc;
        mass.view_mut((0, off), (n, n)).copy_from(&(-&rc));
        mass.view_mut((off, 0), (n, n)).copy_from(&(-&rc));
        mass.view_mut((off, off), (n, n)).copy_from(&rc);
        stiff
            .view_mut((off, off), (n, n))
            .copy_from(&(&c * term.weight));
    }
    Ok((mass, stiff))
}

/// Integrates the block system from `(u0, 0, ..., 0)` to `t_end` with
/// `fine_steps` classical Runge-Kutta steps and returns the solution block.
pub fn dense_coupled_reference(
    spec: &ProblemSpec,
    t_end: f64,
    fine_steps: usize,
) -> Result<Vec<f64>> {
    Ok(dense_coupled_levels(spec, t_end, fine_steps, &[fine_steps])?.remove(0))
}

/// As [`dense_coupled_reference`], returning the solution block after each
/// of the requested step counts.
pub fn dense_coupled_levels(
    spec: &ProblemSpec,
    t_end: f64,
    fine_steps: usize,
    levels: &[usize],
) -> Result<Vec<Vec<f64>>> {
    if !(t_end >= 0.0) || fine_steps == 0 {
        return Err(Error::Domain("need t_end >= 0 and fine_steps >= 1".into()));
    }
    spec.validate()?;
    let shifted = absorb_gamma(spec)?;
    let (mass, stiff) = block_operators(spec)?;
    let n = spec.dim();
    let size = mass.nrows();
    let chol = mass.cholesky().ok_or(Error::SingularMass)?;
    // v' = -M v + G f(t), M = 𝐁^-1 𝐀, G = 𝐁^-1 [I; 0; ...; 0]
    let m_mat = -chol.solve(&stiff);
    let mut lift = DMatrix::zeros(size, n);
    lift.view_mut((0, 0), (n, n)).fill_with_identity();
    let g_mat = chol.solve(&lift);
    let forced = !shifted.source.is_zero();

    let h = t_end / fine_steps as f64;
    let rhs = |t: f64, v: &DVector<f64>| -> DVector<f64> {
        let mut d = &m_mat * v;
        if forced {
            let f = DVector::from_vec(shifted.source.eval(t, n));
            d += &g_mat * f;
        }
        d
    };

    let mut v = DVector::zeros(size);
    v.rows_mut(0, n).copy_from_slice(&spec.u0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(levels.len());
    let mut wanted: Vec<usize> = levels.to_vec();
    wanted.sort_unstable();
    if wanted.last().is_some_and(|&l| l > fine_steps) {
        return Err(Error::Domain("requested level beyond fine_steps".into()));
    }
    let mut next = wanted.iter().peekable();
    for k in 0..=fine_steps {
        while next.peek().is_some_and(|&&l| l == k) {
            out.push(v.rows(0, n).iter().copied().collect());
            next.next();
        }
        if k == fine_steps {
            break;
        }
        let t = k as f64 * h;
        let k1 = rhs(t, &v);
        let k2 = rhs(t + 0.5 * h, &(&v + &k1 * (0.5 * h)));
        let k3 = rhs(t + 0.5 * h, &(&v + &k2 * (0.5 * h)));
        let k4 = rhs(t + h, &(&v + &k3 * h));
        v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    // Restore the caller's order.
    Ok(levels
        .iter()
        .map(|l| out[wanted.iter().position(|w| w == l).unwrap()].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::kernel::ExpSumKernel;
    use crate::linop::{GridWeight, ScaledIdentity};
    use crate::solver::Source;

    #[test]
    fn exponential_decay_without_memory() {
        let one = Arc::new(ScaledIdentity::identity(1));
        let spec = ProblemSpec::new(
            one.clone(),
            one.clone(),
            one,
            ExpSumKernel::from_pairs(&[]).unwrap(),
            Source::zero(),
            vec![1.0],
            GridWeight::UNIT,
        )
        .unwrap();
        let u = dense_coupled_reference(&spec, 1.0, 1000).unwrap();
        assert!((u[0] - (-1.0f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn block_structure() {
        let one = Arc::new(ScaledIdentity::identity(1));
        let spec = ProblemSpec::new(
            one.clone(),
            Arc::new(ScaledIdentity::new(1, 2.0)),
            one,
            ExpSumKernel::from_pairs(&[(1.0, 4.0), (3.0, 1.0)]).unwrap(),
            Source::zero(),
            vec![1.0],
            GridWeight::UNIT,
        )
        .unwrap();
        let (mass, stiff) = block_operators(&spec).unwrap();
        let expect_mass = DMatrix::from_row_slice(
            3,
            3,
            &[1.0 + 0.5 + 6.0, -0.5, -6.0, -0.5, 0.5, 0.0, -6.0, 0.0, 6.0],
        );
        assert_eq!(mass, expect_mass);
        assert_eq!(
            stiff,
            DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 6.0]))
        );
    }

    #[test]
    fn size_guard() {
        let id = Arc::new(ScaledIdentity::identity(700));
        let spec = ProblemSpec::new(
            id.clone(),
            id.clone(),
            id,
            ExpSumKernel::from_pairs(&[(1.0, 1.0), (1.0, 2.0)]).unwrap(),
            Source::zero(),
            vec![0.0; 700],
            GridWeight::UNIT,
        )
        .unwrap();
        assert!(matches!(
            dense_coupled_reference(&spec, 1.0, 10),
            Err(Error::TooLarge { .. })
        ));
    }
}
