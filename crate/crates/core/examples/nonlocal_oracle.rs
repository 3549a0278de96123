// The exponential-sum scheme against a direct product-integration
// discretization of the original singular kernel on a small grid.
//
// Run with `cargo run --example nonlocal_oracle`.

use memsolve::experiment::{KernelSource, ModelProblem};
use memsolve::solver::nonlocal_quadrature_reference;
use memsolve::solver::scheme::{run, RunOptions};
use memsolve::Result;

pub fn run_example() -> Result<()> {
    println!("{:>6} {:>10} {:>12}", "steps", "tau", "max |diff|");
    for steps in [50, 100, 200, 400] {
        let p = ModelProblem {
            n1: 8,
            n2: 8,
            kernel: KernelSource::Tabulated,
            sigma: 1.0,
            t_final: 0.5,
            steps,
            ..Default::default()
        };
        let cfg = p.scheme()?;
        let opts = RunOptions {
            snapshot_levels: (0..=steps).collect(),
            ..Default::default()
        };
        let local = run(&p.build_spec(p.resolve_kernel()?)?, &cfg, &opts)?;
        let direct =
            nonlocal_quadrature_reference(&p.build_spec_with(p.analytic_kernel()?)?, &cfg)?;
        let diff = local
            .snapshots
            .iter()
            .zip(&direct)
            .flat_map(|(s, y)| s.values.iter().zip(y).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        println!("{steps:>6} {:>10.5} {diff:>12.4e}", cfg.tau);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
