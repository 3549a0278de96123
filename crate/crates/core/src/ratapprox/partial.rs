//! Conversion of a barycentric rational function to pole-residue form
//! `constant + sum_i residue_i / (s - pole_i)`.

use nalgebra::DMatrix;

use super::aaa::Barycentric;
use crate::error::{Error, Result};

/// `constant + sum_i residues[i] / (s - poles[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleResidueForm {
    pub constant: f64,
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
}

impl PoleResidueForm {
    pub fn eval(&self, s: f64) -> f64 {
        self.constant
            + self
                .poles
                .iter()
                .zip(&self.residues)
                .map(|(p, r)| r / (s - p))
                .sum::<f64>()
    }

    /// `(a_i, b_i)` pairs with `a_i = residue`, `b_i = -pole`.
    pub fn terms(&self) -> Vec<(f64, f64)> {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(&p, &r)| (r, -p))
            .collect()
    }
}

/// Computes poles, residues and the value at infinity of a barycentric
/// rational function given by support points, weights and values.
///
/// Poles are the finite eigenvalues of the arrowhead pencil, obtained here as
/// the spectrum of `(I - w 1^T / 1^T w)(Z - c I)` shifted back by `c`; the
/// shift places the one spurious zero eigenvalue away from every true pole.
/// Each pole is polished by Newton steps on the barycentric denominator.
pub fn poles_to_terms(support: &[f64], weights: &[f64], values: &[f64]) -> Result<PoleResidueForm> {
    let bary = Barycentric::new(support.to_vec(), values.to_vec(), weights.to_vec())
        .map_err(|e| Error::ConversionFailure(e.to_string()))?;
    let wscale = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    if wscale == 0.0 {
        return Err(Error::ConversionFailure(
            "all barycentric weights vanish".into(),
        ));
    }
    // Support points carrying no weight do not belong to the rational function.
    let keep: Vec<usize> = (0..support.len())
        .filter(|&j| weights[j].abs() > 1e-14 * wscale)
        .collect();
    let z: Vec<f64> = keep.iter().map(|&j| support[j]).collect();
    let w: Vec<f64> = keep.iter().map(|&j| weights[j]).collect();
    let f: Vec<f64> = keep.iter().map(|&j| values[j]).collect();
    let n = z.len();

    let wsum: f64 = w.iter().sum();
    let wabs: f64 = w.iter().map(|x| x.abs()).sum();
    if wsum.abs() <= 1e-13 * wabs {
        return Err(Error::ConversionFailure(
            "weights sum to zero: the rational function is unbounded at infinity".into(),
        ));
    }
    let constant = w.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() / wsum;
    if n == 1 {
        return Ok(PoleResidueForm {
            constant,
            poles: vec![],
            residues: vec![],
        });
    }

    let zmax = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let shift = 3.0 * zmax + 1.0;
    let m = DMatrix::from_fn(n, n, |r, c| {
        let proj = if r == c { 1.0 } else { 0.0 } - w[r] / wsum;
        proj * (z[c] - shift)
    });
    let mut eig: Vec<(f64, f64)> = m
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    // Drop the structural zero eigenvalue.
    let (spurious, _) = eig
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &(re, im))| {
            let mag = re.hypot(im);
            if mag < acc.1 {
                (i, mag)
            } else {
                acc
            }
        });
    eig.remove(spurious);

    let den = |x: f64| w.iter().zip(&z).map(|(wj, zj)| wj / (x - zj)).sum::<f64>();
    let dden = |x: f64| {
        -w.iter()
            .zip(&z)
            .map(|(wj, zj)| wj / ((x - zj) * (x - zj)))
            .sum::<f64>()
    };
    let num = |x: f64| {
        w.iter()
            .zip(&z)
            .zip(&f)
            .map(|((wj, zj), fj)| wj * fj / (x - zj))
            .sum::<f64>()
    };

    let mut poles = Vec::with_capacity(n - 1);
    let mut residues = Vec::with_capacity(n - 1);
    for (re, im) in eig {
        let mu = re + shift;
        if im.abs() > 1e-8 * mu.abs().max(1.0) {
            return Err(Error::ConversionFailure(format!(
                "complex pole {:.6e} {:+.6e}i has no real exponential counterpart",
                mu, im
            )));
        }
        let mut pole = mu;
        for _ in 0..4 {
            let d = dden(pole);
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let step = den(pole) / d;
            if !step.is_finite() {
                break;
            }
            pole -= step;
        }
        if z.contains(&pole) {
            return Err(Error::ConversionFailure(format!(
                "pole {pole:e} coincides with a support point"
            )));
        }
        let d = dden(pole);
        if d == 0.0 || !d.is_finite() {
            return Err(Error::ConversionFailure(format!(
                "pole {pole:e} is not simple"
            )));
        }
        poles.push(pole);
        residues.push(num(pole) / d);
    }
    let mut order: Vec<usize> = (0..poles.len()).collect();
    order.sort_by(|&a, &b| poles[b].total_cmp(&poles[a]));
    let form = PoleResidueForm {
        constant,
        poles: order.iter().map(|&i| poles[i]).collect(),
        residues: order.iter().map(|&i| residues[i]).collect(),
    };

    // The two representations must agree between and beyond the support.
    let mut sorted = z.clone();
    sorted.sort_by(f64::total_cmp);
    let mut probes: Vec<f64> = sorted.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    probes.push(sorted[n - 1] * 2.0 + 1.0);
    let mut worst = 0.0f64;
    for s in probes {
        let r = bary.eval(s);
        let p = form.eval(s);
        worst = worst.max((r - p).abs() / r.abs().max(1e-300));
    }
    if !(worst <= 1e-6) {
        return Err(Error::ConversionFailure(format!(
            "pole-residue form deviates from barycentric form by relative {worst:.3e}"
        )));
    }
    Ok(form)
}
