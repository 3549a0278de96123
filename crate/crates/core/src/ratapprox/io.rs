//! Coefficient files.
//!
//! Plain text. Line 1 holds `m gamma1 gamma2`; each of the following `m`
//! lines holds `a_i b_i`. Values are written with 17 significant digits so
//! that reading a written file reproduces every coefficient bit for bit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::kernel::{ExpSumKernel, ExpTerm};

/// Tabulated ten-term fits of the tempered kernel with `delta = 1`.
pub const TABULATED_ALPHA_025: &str = include_str!("../../data/kernel_alpha_0.25.txt");
pub const TABULATED_ALPHA_050: &str = include_str!("../../data/kernel_alpha_0.50.txt");
pub const TABULATED_ALPHA_075: &str = include_str!("../../data/kernel_alpha_0.75.txt");

/// The shipped ten-term kernel for `alpha` in {0.25, 0.5, 0.75} (`delta = 1`).
pub fn tabulated(alpha: f64) -> Result<ExpSumKernel> {
    let text = if alpha == 0.25 {
        TABULATED_ALPHA_025
    } else if alpha == 0.5 {
        TABULATED_ALPHA_050
    } else if alpha == 0.75 {
        TABULATED_ALPHA_075
    } else {
        return Err(Error::Domain(format!(
            "no tabulated kernel for alpha = {alpha}; available: 0.25, 0.5, 0.75"
        )));
    };
    parse_coefficients(text, Path::new(&format!("<tabulated alpha={alpha}>")))
}

pub fn format_coefficients(kern: &ExpSumKernel) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{} {:.16e} {:.16e}",
        kern.m(),
        kern.gamma1(),
        kern.gamma2()
    )
    .unwrap();
    for t in kern.terms() {
        writeln!(out, "{:.16e} {:.16e}", t.weight, t.rate).unwrap();
    }
    out
}

pub fn parse_coefficients(text: &str, path: &Path) -> Result<ExpSumKernel> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));

    let (lno, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(err(
            lno,
            format!("expected `m gamma1 gamma2`, found {} fields", fields.len()),
        ));
    }
    let m: usize = fields[0]
        .parse()
        .map_err(|_| err(lno, format!("bad term count `{}`", fields[0])))?;
    let num = |s: &str, lno: usize| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| err(lno, format!("bad number `{s}`")))
    };
    let gamma1 = num(fields[1], lno)?;
    let gamma2 = num(fields[2], lno)?;

    let mut terms = Vec::with_capacity(m);
    for k in 0..m {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| err(lno + k + 1, format!("expected {m} term lines, found {k}")))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(err(
                lno,
                format!("expected `a b`, found {} fields", f.len()),
            ));
        }
        terms.push(ExpTerm {
            weight: num(f[0], lno)?,
            rate: num(f[1], lno)?,
        });
    }
    if let Some((lno, _)) = lines.find(|(_, l)| !l.is_empty()) {
        return Err(err(lno, format!("unexpected content after {m} terms")));
    }
    ExpSumKernel::new(gamma1, gamma2, terms)
}

pub fn load_coefficients(path: impl AsRef<Path>) -> Result<ExpSumKernel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_coefficients(&text, path)
}

pub fn save_coefficients(kern: &ExpSumKernel, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), format_coefficients(kern).as_bytes())
}
