// Fits exponential sums to the tempered power kernel for several term
// counts and compares them with the tabulated ten-term kernel.
//
// Run with `cargo run --example fit_kernel`.

use memsolve::ratapprox::{certify, default_s_grid, fit_exp_sum, tabulated, FitConfig};
use memsolve::{AnalyticKernel, Result};

pub fn run_example() -> Result<()> {
    let target = AnalyticKernel::new(0.5, 1.0)?;
    println!("alpha = 0.5, delta = 1, s in [0, 1e3]");
    println!(
        "{:>3} {:>14} {:>14} {:>10}",
        "m", "max eps_F", "max eps_f", "positive"
    );
    for m in [4, 6, 8, 10] {
        let report = fit_exp_sum(&target, &FitConfig::new(m, 1e3))?;
        println!(
            "{:>3} {:>14.6e} {:>14.6e} {:>10}",
            m, report.eps_F_max, report.eps_f_max_on_window, report.positivity_ok
        );
    }

    let fitted = fit_exp_sum(&target, &FitConfig::new(10, 1e3))?;
    println!(
        "\nfitted ten-term kernel: gamma2 = {:.6e}",
        fitted.kernel.gamma2()
    );
    for (i, t) in fitted.kernel.terms().iter().enumerate() {
        println!("{:>3} a = {:.6e}  b = {:.6e}", i + 1, t.weight, t.rate);
    }

    let tabulated = tabulated(0.5)?;
    let t_window: Vec<f64> = memsolve::kernel::log_grid(0.1, 10.0, 500);
    let report = certify(&target, &tabulated, &default_s_grid(1e3), &t_window)?;
    println!(
        "\ntabulated kernel: max eps_F = {:.6e}, max eps_f on [0.1, 10] = {:.6e}",
        report.eps_F_max, report.eps_f_max_on_window
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
