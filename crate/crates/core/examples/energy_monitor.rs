// The discrete energy estimate on a stiff problem: the implicit scheme with
// a step a thousand times the fastest time scale stays bounded, while a
// weight below one half breaks the estimate within a few steps.
//
// Run with `cargo run --example energy_monitor`.

use std::sync::Arc;

use memsolve::linop::DenseOperator;
use memsolve::solver::scheme::{run, MonitorMode, RunOptions};
use memsolve::solver::Source;
use memsolve::{
    ExpSumKernel, ExpTerm, GridWeight, OperatorRef, ProblemSpec, Result, ScaledIdentity,
    SchemeConfig,
};
use nalgebra::DMatrix;

pub fn run_example() -> Result<()> {
    let n = 6;
    // Eigenvalues from 1 to 1e6.
    let diag: Vec<f64> = (0..n).map(|i| 10f64.powi(i as i32 + 1) / 10.0).collect();
    let a: OperatorRef = Arc::new(DenseOperator::new(DMatrix::from_diagonal(
        &diag.clone().into(),
    ))?);
    let id = |s: f64| -> OperatorRef { Arc::new(ScaledIdentity::new(n, s)) };
    let kernel = ExpSumKernel::new(
        0.1,
        0.3,
        vec![
            ExpTerm {
                weight: 1.0,
                rate: 2.0,
            },
            ExpTerm {
                weight: 0.5,
                rate: 50.0,
            },
        ],
    )?;
    let spec = ProblemSpec::new(
        id(1.0),
        id(0.5),
        a,
        kernel,
        Source::constant(vec![1.0; n]),
        vec![1.0; n],
        GridWeight::UNIT,
    )?;

    let nu_max = diag[n - 1];
    for sigma in [1.0, 0.5, 0.25] {
        let cfg = SchemeConfig::new(sigma, 1e3 / nu_max, 100)?;
        let opts = RunOptions {
            monitor: MonitorMode::Warn,
            ..Default::default()
        };
        let traj = run(&spec, &cfg, &opts)?;
        let worst = traj
            .energy
            .records
            .iter()
            .map(|r| r.ratio())
            .fold(0.0, f64::max);
        println!(
            "sigma = {sigma:<4} max E/R = {worst:.4e}, violations: {}",
            traj.energy.violations.len()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
