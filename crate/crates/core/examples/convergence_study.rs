// Errors against a fine symmetric-scheme reference and the observed orders
// for both weights, on a coarse version of the model problem.
//
// Run with `cargo run --release --example convergence_study`.

use memsolve::experiment::{cmd_convergence, CompareArgs, ModelProblem};
use memsolve::Result;

pub fn run_example() -> Result<()> {
    for sigma in [1.0, 0.5] {
        let p = ModelProblem {
            n1: 16,
            n2: 16,
            sigma,
            ..Default::default()
        };
        let args = CompareArgs::new(p, vec![0.05, 0.025, 0.0125, 0.00625]);
        let table = cmd_convergence(&args, None)?;
        println!("sigma = {sigma}");
        println!("{:>10} {:>6} {:>12} {:>8}", "tau", "t", "eps2", "order");
        for row in &table.errors.rows {
            let order = table
                .order_at(row.tau, row.t)
                .map(|o| format!("{:.3}", o.order2))
                .unwrap_or_default();
            println!(
                "{:>10.5} {:>6.2} {:>12.4e} {:>8}",
                row.tau, row.t, row.eps2, order
            );
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
