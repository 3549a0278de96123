// Relaxation of the initial state on the unit square: the probe value at the
// centre for several memory couplings and kernel exponents.
//
// Run with `cargo run --release --example relaxation`.

use memsolve::experiment::{solve_with, ModelProblem};
use memsolve::Result;

pub fn run_example() -> Result<()> {
    run_on(32, 100)
}

fn run_on(grid: usize, steps: usize) -> Result<()> {
    let cases = [(0.0, 0.5), (1.0, 0.25), (1.0, 0.5), (1.0, 0.75)];
    let mut series = Vec::new();
    for (c, alpha) in cases {
        let p = ModelProblem {
            n1: grid,
            n2: grid,
            c,
            alpha,
            steps,
            ..Default::default()
        };
        let traj = solve_with(&p, p.resolve_kernel()?, &[])?;
        series.push(traj.probe_series);
    }
    println!("grid {grid} x {grid}, {steps} steps, probe at (0.5, 0.5)");
    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "t", "c=0", "a=0.25", "a=0.5", "a=0.75"
    );
    for n in (0..=steps).step_by(steps / 10) {
        print!("{:>6.2}", series[0][n].1);
        for s in &series {
            print!(" {:>12.5e}", s[n].2[0]);
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_on(64, 1000)
}
