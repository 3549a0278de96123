//! Adaptive barycentric rational approximation on a real sample set.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// `r(z) = sum_j w_j f_j / (z - z_j) / sum_j w_j / (z - z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Barycentric {
    pub support: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Barycentric {
    pub fn new(support: Vec<f64>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() != values.len() || support.len() != weights.len() {
            return Err(Error::ConversionFailure(format!(
                "inconsistent barycentric data: {} support points, {} values, {} weights",
                support.len(),
                values.len(),
                weights.len()
            )));
        }
        Ok(Self {
            support,
            values,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn eval(&self, z: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&zj, &fj), &wj) in self.support.iter().zip(&self.values).zip(&self.weights) {
            let d = z - zj;
            if d == 0.0 {
                return fj;
            }
            num += wj * fj / d;
            den += wj / d;
        }
        num / den
    }
}

/// Greedy AAA: adds the sample with the largest residual as a support point
/// until `max_support` points are used or the residual drops below
/// `rel_tol * max|f|`. Weights come from the smallest right singular vector
/// of the Loewner matrix.
pub fn aaa(z: &[f64], f: &[f64], max_support: usize, rel_tol: f64) -> Result<Barycentric> {
    let n = z.len();
    if n != f.len() || n < 2 {
        return Err(Error::FitFailure(format!(
            "need matching sample arrays, got {} and {}",
            n,
            f.len()
        )));
    }
    if max_support == 0 || max_support >= n {
        return Err(Error::FitFailure(format!(
            "support size {max_support} must be in 1..{n}"
        )));
    }
    let fmax = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean = f.iter().sum::<f64>() / n as f64;
    let mut approx = vec![mean; n];
    let mut is_support = vec![false; n];
    let mut support: Vec<usize> = Vec::with_capacity(max_support);
    let mut weights: Vec<f64> = Vec::new();

    loop {
        let (worst, err) = (0..n)
            .filter(|&i| !is_support[i])
            .map(|i| (i, (f[i] - approx[i]).abs()))
            .fold(
                (usize::MAX, -1.0),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if support.len() == max_support || (!support.is_empty() && err <= rel_tol * fmax) {
            break;
        }
        if support.is_empty() && err <= rel_tol * fmax {
            // Constant data: one support point reproduces it.
            support.push(worst);
            weights = vec![1.0];
            break;
        }
        support.push(worst);
        is_support[worst] = true;

        let rest: Vec<usize> = (0..n).filter(|&i| !is_support[i]).collect();
        let k = support.len();
        let loewner = DMatrix::from_fn(rest.len(), k, |r, c| {
            let i = rest[r];
            let j = support[c];
            (f[i] - f[j]) / (z[i] - z[j])
        });
        let svd = loewner.clone().svd(false, true);
        let v_t = svd
            .v_t
            .ok_or_else(|| Error::FitFailure("SVD of the Loewner matrix failed".into()))?;
        let (imin, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
                );
        // With fewer rows than columns the null space is not in v_t.
        weights = if v_t.nrows() < k {
            null_vector(&loewner)
        } else {
            v_t.row(imin).iter().copied().collect()
        };

        for &i in &rest {
            let mut num = 0.0;
            let mut den = 0.0;
            for (c, &j) in support.iter().enumerate() {
                let d = z[i] - z[j];
                num += weights[c] * f[j] / d;
                den += weights[c] / d;
            }
            approx[i] = num / den;
        }
        for &j in &support {
            approx[j] = f[j];
        }
    }

    Barycentric::new(
        support.iter().map(|&j| z[j]).collect(),
        support.iter().map(|&j| f[j]).collect(),
        weights,
    )
}

fn null_vector(m: &DMatrix<f64>) -> Vec<f64> {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let (imin, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc },
        );
    eig.eigenvectors.column(imin).iter().copied().collect()
}
