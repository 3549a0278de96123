#![allow(dead_code)]

use std::sync::Arc;

use memsolve::linop::DenseOperator;
use memsolve::solver::Source;
use memsolve::{ExpSumKernel, ExpTerm, GridWeight, OperatorRef, ProblemSpec};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random orthogonal matrix from the QR factor of a uniform matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// SPD matrix with the given spectrum in a random basis.
pub fn spd_with_spectrum(rng: &mut ChaCha8Rng, eig: &[f64]) -> DMatrix<f64> {
    let n = eig.len();
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(eig));
    let m = &q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// SPD matrix with eigenvalues log-uniform in `[lo, hi]`, endpoints included.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let eig: Vec<f64> = (0..n)
        .map(|i| match i {
            0 => lo,
            1 if n > 1 => hi,
            _ => (rng.random_range(lo.ln()..=hi.ln())).exp(),
        })
        .collect();
    spd_with_spectrum(rng, &eig)
}

pub fn dense(m: DMatrix<f64>) -> OperatorRef {
    Arc::new(DenseOperator::new(m).expect("symmetric"))
}

pub fn random_kernel(rng: &mut ChaCha8Rng, m: usize, with_gammas: bool) -> ExpSumKernel {
    let terms = (0..m)
        .map(|_| ExpTerm {
            weight: rng.random_range(0.1..2.0),
            rate: rng.random_range(0.2..5.0),
        })
        .collect();
    let (g1, g2) = if with_gammas {
        (rng.random_range(0.0..0.5), rng.random_range(0.0..0.5))
    } else {
        (0.0, 0.0)
    };
    ExpSumKernel::new(g1, g2, terms).unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Smooth source `f(t) = f0 + sin(w t) f1`.
pub fn random_source(rng: &mut ChaCha8Rng, n: usize) -> Source {
    let f0 = random_vec(rng, n);
    let f1 = random_vec(rng, n);
    let w = rng.random_range(0.5..3.0);
    Source::from_fn(move |t, out| {
        let s = (w * t).sin();
        for ((o, a), b) in out.iter_mut().zip(&f0).zip(&f1) {
            *o = a + s * b;
        }
    })
}

/// Random dense problem; eigenvalues of `B`, `C`, `A` in the given ranges.
pub fn random_spec(
    rng: &mut ChaCha8Rng,
    n: usize,
    kernel: ExpSumKernel,
    b_range: (f64, f64),
    c_range: (f64, f64),
    a_range: (f64, f64),
    with_source: bool,
) -> ProblemSpec {
    let b = dense(random_spd(rng, n, b_range.0, b_range.1));
    let c = dense(random_spd(rng, n, c_range.0, c_range.1));
    let a = dense(random_spd(rng, n, a_range.0, a_range.1));
    let source = if with_source {
        random_source(rng, n)
    } else {
        Source::zero()
    };
    let u0 = random_vec(rng, n);
    ProblemSpec::new(b, c, a, kernel, source, u0, GridWeight::UNIT).unwrap()
}

/// `||v||_A` for a dense `A` with unit weight.
pub fn a_norm(a: &DMatrix<f64>, v: &[f64]) -> f64 {
    let x = nalgebra::DVector::from_row_slice(v);
    x.dot(&(a * &x)).sqrt()
}
