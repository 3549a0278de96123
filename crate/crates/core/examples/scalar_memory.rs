// A scalar equation with a two-term memory kernel: the weighted scheme
// against the dense coupled reference, showing first order for the
// implicit scheme and second order for the symmetric one.
//
// Run with `cargo run --example scalar_memory`.

use std::sync::Arc;

use memsolve::solver::scheme::{run, RunOptions};
use memsolve::solver::{dense_coupled_reference, Source};
use memsolve::{
    ExpSumKernel, ExpTerm, GridWeight, OperatorRef, ProblemSpec, Result, ScaledIdentity,
    SchemeConfig,
};

pub fn run_example() -> Result<()> {
    let scalar = |v: f64| -> OperatorRef { Arc::new(ScaledIdentity::new(1, v)) };
    let kernel = ExpSumKernel::new(
        0.0,
        0.2,
        vec![
            ExpTerm {
                weight: 0.8,
                rate: 1.0,
            },
            ExpTerm {
                weight: 0.4,
                rate: 10.0,
            },
        ],
    )?;
    let source = Source::from_fn(|t, out| out[0] = (3.0 * t).sin());
    let spec = ProblemSpec::new(
        scalar(1.0),
        scalar(1.0),
        scalar(4.0),
        kernel,
        source,
        vec![1.0],
        GridWeight::UNIT,
    )?;

    let exact = dense_coupled_reference(&spec, 1.0, 1 << 14)?[0];
    println!("u(1) from the dense reference: {exact:.12}");
    for sigma in [1.0, 0.5] {
        println!("\nsigma = {sigma}");
        let mut prev: Option<f64> = None;
        for n in [16, 32, 64, 128, 256] {
            let cfg = SchemeConfig::new(sigma, 1.0 / n as f64, n)?;
            let traj = run(&spec, &cfg, &RunOptions::default())?;
            let err = (traj.final_state.y[0] - exact).abs();
            match prev {
                Some(p) => println!(
                    "  tau = 1/{n:<4} error = {err:.3e}  order = {:.3}",
                    (p / err).log2()
                ),
                None => println!("  tau = 1/{n:<4} error = {err:.3e}"),
            }
            prev = Some(err);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
