//! `memsolve`: fit memory kernels and run the relaxation model problem.
//!
//! Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use memsolve::experiment::{
    cmd_compare, cmd_convergence, cmd_fit_kernel, cmd_solve, CompareArgs, FitKernelArgs,
    KernelSource, ModelProblem,
};
use memsolve::{Error, Result};

#[derive(Parser)]
#[command(
    name = "memsolve",
    version,
    about = "Evolution equations with exponential-sum memory"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Kernel exponent in (0, 1).
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Kernel damping, >= 0.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Number of exponential terms.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    m: Option<u32>,
    /// Memory coupling, >= 0.
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Scheme weight.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// Time step; must divide the final time.
    #[arg(long, global = true)]
    tau: Option<f64>,
    /// Number of time steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Final time.
    #[arg(long, global = true)]
    t_final: Option<f64>,
    /// Grid intervals per direction.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Coefficient file to use instead of the default kernel.
    #[arg(long, global = true)]
    kernel_file: Option<PathBuf>,
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// TOML file with a `[problem]` table; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit an exponential sum to the analytic kernel and certify it.
    FitKernel {
        /// Upper end of the Laplace-domain interval.
        #[arg(long, default_value_t = 1e3)]
        smax: f64,
        #[arg(long)]
        samples: Option<usize>,
        /// Fit without the point-mass term.
        #[arg(long)]
        no_gamma2: bool,
    },
    /// Solve the model problem, writing probe, energy and snapshot CSVs.
    Solve {
        /// Comma-separated snapshot times.
        #[arg(long, value_delimiter = ',')]
        snapshots: Vec<f64>,
    },
    /// Errors of coarse runs against a fine reference.
    Compare(SweepArgs),
    /// Errors and observed orders over a geometric sequence of steps.
    Convergence(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated coarse step sizes; defaults to tau, tau/2, tau/4.
    #[arg(long, value_delimiter = ',')]
    taus: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    reference_steps: usize,
    /// Comma-separated checkpoint times.
    #[arg(long, value_delimiter = ',')]
    checkpoints: Vec<f64>,
}

fn problem_from(common: &Common) -> Result<ModelProblem> {
    let mut p = match &common.config {
        Some(path) => ModelProblem::load(path)?,
        None => ModelProblem::default(),
    };
    if let Some(v) = common.alpha {
        p.alpha = v;
    }
    if let Some(v) = common.delta {
        p.delta = v;
    }
    if let Some(v) = common.m {
        p.m = v as usize;
    }
    if let Some(v) = common.c {
        p.c = v;
    }
    if let Some(v) = common.sigma {
        p.sigma = v;
    }
    if let Some(v) = common.t_final {
        p.t_final = v;
    }
    if let Some(n) = common.grid {
        p.n1 = n;
        p.n2 = n;
    }
    if let Some(path) = &common.kernel_file {
        p.kernel = KernelSource::File { path: path.clone() };
    }
    if let Some(n) = common.steps {
        p.steps = n;
    }
    if let Some(tau) = common.tau {
        let steps = p.steps;
        p.set_tau(tau)?;
        if common.steps.is_some() && steps != p.steps {
            return Err(Error::Config(format!(
                "--tau {tau} and --steps {steps} disagree"
            )));
        }
    }
    p.validate()?;
    Ok(p)
}

fn sweep(common: &Common, args: &SweepArgs) -> Result<CompareArgs> {
    let problem = problem_from(common)?;
    let taus = if args.taus.is_empty() {
        let tau = problem.tau();
        vec![tau, tau / 2.0, tau / 4.0]
    } else {
        args.taus.clone()
    };
    let mut out = CompareArgs::new(problem, taus);
    out.reference_steps = args.reference_steps;
    if !args.checkpoints.is_empty() {
        out.checkpoints = args.checkpoints.clone();
    }
    Ok(out)
}

fn execute(cli: &Cli) -> Result<ExitCode> {
    let common = &cli.common;
    let out_dir = common.out_dir.as_path();
    match &cli.command {
        Command::FitKernel {
            smax,
            samples,
            no_gamma2,
        } => {
            let defaults = FitKernelArgs::default();
            let args = FitKernelArgs {
                alpha: common.alpha.unwrap_or(defaults.alpha),
                delta: common.delta.unwrap_or(defaults.delta),
                m: common.m.map_or(defaults.m, |m| m as usize),
                s_max: *smax,
                n_samples: *samples,
                include_gamma2: !no_gamma2,
                out_dir: common.out_dir.clone(),
            };
            let report = cmd_fit_kernel(&args)?;
            println!("eps_F_max = {:e}", report.eps_F_max);
            println!("eps_f_max = {:e}", report.eps_f_max_on_window);
            println!("positive_type = {}", report.positivity_ok);
            if !report.positivity_ok {
                eprintln!("error: fitted kernel is not of positive type");
                return Ok(ExitCode::from(3));
            }
        }
        Command::Solve { snapshots } => {
            let problem = problem_from(common)?;
            let out = cmd_solve(&problem, snapshots, out_dir)?;
            let last = out
                .trajectory
                .probe_series
                .last()
                .map_or(f64::NAN, |p| p.2[0]);
            println!("u*(T) = {last:e}");
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Compare(args) => {
            let report = cmd_compare(&sweep(common, args)?, Some(out_dir))?;
            print!("{}", report.to_csv());
        }
        Command::Convergence(args) => {
            let table = cmd_convergence(&sweep(common, args)?, Some(out_dir))?;
            print!("{}", table.orders_csv());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
