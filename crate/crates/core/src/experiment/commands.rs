use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use super::ModelProblem;
use crate::error::{Error, Result};
use crate::io::{csv_table, write_atomic};
use crate::kernel::{AnalyticKernel, ExpSumKernel};
use crate::linop::{norm, GridWeight};
use crate::ratapprox::{fit_exp_sum, save_coefficients, FitConfig, FitReport};
use crate::solver::scheme::{run, RunOptions, Trajectory};
use crate::solver::SchemeConfig;

/// Comparison times used when none are given.
pub const DEFAULT_CHECKPOINTS: [f64; 5] = [0.05, 0.1, 0.25, 0.5, 1.0];

#[derive(Debug, Clone)]
pub struct FitKernelArgs {
    pub alpha: f64,
    pub delta: f64,
    pub m: usize,
    pub s_max: f64,
    pub n_samples: Option<usize>,
    pub include_gamma2: bool,
    pub out_dir: PathBuf,
}

impl Default for FitKernelArgs {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            delta: 1.0,
            m: 10,
            s_max: 1e3,
            n_samples: None,
            include_gamma2: true,
            out_dir: PathBuf::from("."),
        }
    }
}

/// Fits the kernel and writes `kernel.txt`, `fit_s.csv` and `fit_t.csv`.
pub fn cmd_fit_kernel(args: &FitKernelArgs) -> Result<FitReport> {
    let target = AnalyticKernel::new(args.alpha, args.delta)?;
    let mut cfg = FitConfig::new(args.m, args.s_max);
    if let Some(n) = args.n_samples {
        cfg.n_samples = n;
    }
    cfg.include_gamma2 = args.include_gamma2;
    cfg.validate()?;
    let report = fit_exp_sum(&target, &cfg)?;
    std::fs::create_dir_all(&args.out_dir)?;
    save_coefficients(&report.kernel, args.out_dir.join("kernel.txt"))?;
    report.write_csvs(
        &args.out_dir.join("fit_s.csv"),
        &args.out_dir.join("fit_t.csv"),
    )?;
    info!(
        "fit m = {}: eps_F = {:e}, eps_f = {:e}, positive type: {}",
        args.m, report.eps_F_max, report.eps_f_max_on_window, report.positivity_ok
    );
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub trajectory: Trajectory,
    pub files: Vec<PathBuf>,
}

/// Level of time `t` on a grid of step `tau`, if `t` is a grid point.
fn level_of(t: f64, tau: f64, n_steps: usize) -> Result<usize> {
    let l = (t / tau).round();
    if l < 0.0 || l > n_steps as f64 || (l * tau - t).abs() > 1e-9 * t.abs().max(tau) {
        return Err(Error::CheckpointMismatch { t, tau });
    }
    Ok(l as usize)
}

fn snapshot_csv(problem: &ModelProblem, values: &[f64]) -> Result<String> {
    let nodes = problem.grid()?.nodes();
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .zip(values)
        .map(|(&(x1, x2), &v)| vec![x1, x2, v])
        .collect();
    Ok(csv_table(&["x1", "x2", "value"], &rows, &[]))
}

/// Solves the model problem, writing `probe.csv`, `energy.csv` and one
/// `snapshot_nNNNNNN.csv` per requested time.
pub fn cmd_solve(
    problem: &ModelProblem,
    snapshot_times: &[f64],
    out_dir: &Path,
) -> Result<SolveOutput> {
    let kernel = problem.resolve_kernel()?;
    let trajectory = solve_with(problem, kernel, snapshot_times)?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = vec![out_dir.join("probe.csv"), out_dir.join("energy.csv")];
    write_atomic(&files[0], trajectory.probes_csv().as_bytes())?;
    write_atomic(&files[1], trajectory.energy.to_csv().as_bytes())?;
    for snap in &trajectory.snapshots {
        let path = out_dir.join(format!("snapshot_n{:06}.csv", snap.level));
        write_atomic(&path, snapshot_csv(problem, &snap.values)?.as_bytes())?;
        files.push(path);
    }
    Ok(SolveOutput { trajectory, files })
}

/// Runs the model problem with a given kernel, probing `problem.probe`.
pub fn solve_with(
    problem: &ModelProblem,
    kernel: ExpSumKernel,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    let spec = problem.build_spec(kernel)?;
    let cfg = problem.scheme()?;
    let snapshot_levels = snapshot_times
        .iter()
        .map(|&t| level_of(t, cfg.tau, cfg.n_steps))
        .collect::<Result<Vec<_>>>()?;
    let opts = RunOptions {
        snapshot_levels,
        probes: vec![problem.probe_index()?],
        ..Default::default()
    };
    run(&spec, &cfg, &opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    pub tau: f64,
    pub t: f64,
    /// Weighted grid L2 norm of the difference.
    pub eps2: f64,
    /// Max-node difference.
    pub eps_inf: f64,
}

/// Errors of coarse runs against a shared reference, ordered by decreasing
/// `tau` and then by checkpoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorReport {
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn at(&self, tau: f64, t: f64) -> Option<&ErrorRow> {
        self.rows
            .iter()
            .find(|r| (r.tau - tau).abs() <= 1e-12 * tau && (r.t - t).abs() <= 1e-12 * t.max(1.0))
    }

    pub fn taus(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.tau) {
                out.push(r.tau);
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|r| vec![r.tau, r.t, r.eps2, r.eps_inf])
            .collect();
        csv_table(&["tau", "t", "eps2", "epsinf"], &rows, &[])
    }
}

#[derive(Debug, Clone)]
pub struct CompareArgs {
    /// Coarse-run setup; `steps` is ignored in favour of `taus`.
    pub problem: ModelProblem,
    pub taus: Vec<f64>,
    pub reference_steps: usize,
    pub checkpoints: Vec<f64>,
}

impl CompareArgs {
    pub fn new(problem: ModelProblem, taus: Vec<f64>) -> Self {
        let checkpoints = DEFAULT_CHECKPOINTS
            .iter()
            .copied()
            .filter(|&t| t <= problem.t_final * (1.0 + 1e-12))
            .collect();
        Self {
            problem,
            taus,
            reference_steps: 1000,
            checkpoints,
        }
    }
}

fn checkpoint_values(
    problem: &ModelProblem,
    kernel: &ExpSumKernel,
    cfg: SchemeConfig,
    checkpoints: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let levels = checkpoints
        .iter()
        .map(|&t| level_of(t, cfg.tau, cfg.n_steps))
        .collect::<Result<Vec<_>>>()?;
    let spec = problem.build_spec(kernel.clone())?;
    let opts = RunOptions {
        snapshot_levels: levels.clone(),
        ..Default::default()
    };
    let traj = run(&spec, &cfg, &opts)?;
    Ok(levels
        .iter()
        .map(|&l| traj.snapshot(l).expect("requested snapshot").values.clone())
        .collect())
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn diff_norm(weight: GridWeight, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(weight, &d)
}

/// Compares coarse runs against a fine `sigma = 0.5` reference and writes
/// `compare.csv` when `out_dir` is given.
pub fn cmd_compare(args: &CompareArgs, out_dir: Option<&Path>) -> Result<ErrorReport> {
    let problem = &args.problem;
    problem.validate()?;
    if args.taus.is_empty() {
        return Err(Error::Config("at least one coarse tau is required".into()));
    }
    if args.checkpoints.is_empty() {
        return Err(Error::Config("at least one checkpoint is required".into()));
    }
    let t_final = problem.t_final;
    let ref_cfg = SchemeConfig::new(
        0.5,
        t_final / args.reference_steps as f64,
        args.reference_steps,
    )?;
    let coarse: Vec<SchemeConfig> = args
        .taus
        .iter()
        .map(|&tau| {
            let mut p = problem.clone();
            p.set_tau(tau)?;
            p.scheme()
        })
        .collect::<Result<_>>()?;
    // Fail on mismatched checkpoints before any expensive work.
    for cfg in coarse.iter().chain(std::iter::once(&ref_cfg)) {
        for &t in &args.checkpoints {
            level_of(t, cfg.tau, cfg.n_steps)?;
        }
    }
    let kernel = problem.resolve_kernel()?;
    let weight = problem.grid()?.weight();

    let (reference, runs) = rayon::join(
        || checkpoint_values(problem, &kernel, ref_cfg, &args.checkpoints),
        || {
            coarse
                .par_iter()
                .map(|&cfg| checkpoint_values(problem, &kernel, cfg, &args.checkpoints))
                .collect::<Result<Vec<_>>>()
        },
    );
    let reference = reference?;
    let runs = runs?;

    let mut rows = Vec::new();
    for (cfg, values) in coarse.iter().zip(&runs) {
        for (k, &t) in args.checkpoints.iter().enumerate() {
            rows.push(ErrorRow {
                tau: cfg.tau,
                t,
                eps2: diff_norm(weight, &values[k], &reference[k]),
                eps_inf: max_abs_diff(&values[k], &reference[k]),
            });
        }
    }
    let report = ErrorReport { rows };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        write_atomic(&dir.join("compare.csv"), report.to_csv().as_bytes())?;
    }
    Ok(report)
}

/// `log(e_coarse / e_fine) / log(ratio)` where `ratio` is the step ratio.
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    (e_coarse / e_fine).ln() / ratio.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderRow {
    pub tau_coarse: f64,
    pub tau_fine: f64,
    pub t: f64,
    pub order2: f64,
    pub order_inf: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub errors: ErrorReport,
    pub orders: Vec<OrderRow>,
}

impl ConvergenceTable {
    /// Builds orders between consecutive step sizes of `errors`.
    pub fn from_errors(errors: ErrorReport) -> Self {
        let taus = errors.taus();
        let mut orders = Vec::new();
        for pair in taus.windows(2) {
            let (tc, tf) = (pair[0], pair[1]);
            for rc in errors.rows.iter().filter(|r| r.tau == tc) {
                if let Some(rf) = errors.at(tf, rc.t) {
                    orders.push(OrderRow {
                        tau_coarse: tc,
                        tau_fine: tf,
                        t: rc.t,
                        order2: observed_order(rc.eps2, rf.eps2, tc / tf),
                        order_inf: observed_order(rc.eps_inf, rf.eps_inf, tc / tf),
                    });
                }
            }
        }
        Self { errors, orders }
    }

    pub fn order_at(&self, tau_coarse: f64, t: f64) -> Option<&OrderRow> {
        self.orders.iter().find(|r| {
            (r.tau_coarse - tau_coarse).abs() <= 1e-12 * tau_coarse
                && (r.t - t).abs() <= 1e-12 * t.max(1.0)
        })
    }

    pub fn orders_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .orders
            .iter()
            .map(|r| vec![r.tau_coarse, r.tau_fine, r.t, r.order2, r.order_inf])
            .collect();
        csv_table(
            &["tau_coarse", "tau_fine", "t", "order2", "orderinf"],
            &rows,
            &[],
        )
    }
}

/// Checks that `taus` has at least three entries with a common ratio.
fn check_geometric(taus: &[f64]) -> Result<()> {
    if taus.len() < 3 {
        return Err(Error::Config(format!(
            "convergence needs at least 3 step sizes, got {}",
            taus.len()
        )));
    }
    let ratio = taus[0] / taus[1];
    if !(ratio > 1.0) {
        return Err(Error::Config("step sizes must decrease".into()));
    }
    for pair in taus.windows(2) {
        if ((pair[0] / pair[1]) / ratio - 1.0).abs() > 1e-9 {
            return Err(Error::Config(
                "step sizes must form a geometric progression".into(),
            ));
        }
    }
    Ok(())
}

/// Error and observed-order tables over a geometric sequence of step sizes.
/// Writes `convergence.csv` and `orders.csv` when `out_dir` is given.
pub fn cmd_convergence(args: &CompareArgs, out_dir: Option<&Path>) -> Result<ConvergenceTable> {
    check_geometric(&args.taus)?;
    let errors = cmd_compare(args, None)?;
    let table = ConvergenceTable::from_errors(errors);
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        write_atomic(
            &dir.join("convergence.csv"),
            table.errors.to_csv().as_bytes(),
        )?;
        write_atomic(&dir.join("orders.csv"), table.orders_csv().as_bytes())?;
    }
    Ok(table)
}
