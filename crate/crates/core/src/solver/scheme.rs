//! Two-level weighted scheme with per-step elimination of the auxiliary
//! states.
//!
//! For `y_i^{n+1}` the auxiliary equation gives
//! `y_i^{n+1} = y^{n+1} / (1 + sigma b_i tau) + chi_i`, and substituting into
//! the main equation leaves one SPD system
//! `(B + sigma tau (mu C + A)) y^{n+1} = chi` per step.

use log::warn;

use super::{absorb_gamma, mu_coefficient, ProblemSpec, SchemeConfig, SolverState};
use crate::error::{Error, Result};
use crate::io::csv_table;
use crate::linop::{
    self, composite, default_max_iter, solve_spd_from, LinearCombination, DEFAULT_CG_TOL,
};

/// What to do when the discrete energy estimate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonitorMode {
    Warn,
    #[default]
    Fail,
}

/// Relative slack of the energy check.
pub const ENERGY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub level: usize,
    pub time: f64,
    /// `||y^n||_A^2 + sum a_i ||y_i^n||_C^2`
    pub energy: f64,
    /// `||u0||_A^2 + 1/2 sum_{k<n} tau ||f^{k+sigma}||_{B^-1}^2`
    pub bound: f64,
}

impl EnergyRecord {
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.energy / self.bound
        } else if self.energy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn holds(&self) -> bool {
        self.energy <= self.bound + ENERGY_SLACK * (1.0 + self.bound)
    }
}

#[derive(Debug, Clone, Default)]
pub struct EnergyTrace {
    pub records: Vec<EnergyRecord>,
    /// Levels at which the estimate failed.
    pub violations: Vec<usize>,
}

impl EnergyTrace {
    pub fn all_hold(&self) -> bool {
        self.records.iter().all(EnergyRecord::holds)
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<Vec<f64>> = self
            .records
            .iter()
            .map(|r| vec![r.level as f64, r.time, r.energy, r.bound, r.ratio()])
            .collect();
        csv_table(&["n", "t", "E", "R", "ratio"], &rows, &[0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub level: usize,
    pub time: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub monitor: MonitorMode,
    /// Levels at which the full solution is stored.
    pub snapshot_levels: Vec<usize>,
    /// Node indices recorded at every level.
    pub probes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub final_state: SolverState,
    pub snapshots: Vec<Snapshot>,
    /// `(level, time, probe values)` for every level, starting at 0.
    pub probe_series: Vec<(usize, f64, Vec<f64>)>,
    pub energy: EnergyTrace,
}

impl Trajectory {
    pub fn snapshot(&self, level: usize) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| s.level == level)
    }

    pub fn probes_csv(&self) -> String {
        let k = self.probe_series.first().map_or(0, |p| p.2.len());
        let names: Vec<String> = if k == 1 {
            vec!["value".into()]
        } else {
            (0..k).map(|i| format!("value_{i}")).collect()
        };
        let mut header = vec!["n", "t"];
        header.extend(names.iter().map(String::as_str));
        let rows: Vec<Vec<f64>> = self
            .probe_series
            .iter()
            .map(|(n, t, v)| {
                let mut r = vec![*n as f64, *t];
                r.extend_from_slice(v);
                r
            })
            .collect();
        csv_table(&header, &rows, &[0])
    }
}

/// Precomputed per-step data for a spec without constant or point-mass
/// kernel parts.
#[derive(Debug)]
pub struct Stepper {
    spec: ProblemSpec,
    cfg: SchemeConfig,
    step_op: LinearCombination,
    /// `1 / (1 + sigma b_i tau)`
    damping: Vec<f64>,
    /// `1 - (1 - sigma) b_i tau`
    explicit: Vec<f64>,
    cg_tol: f64,
    max_iter: usize,
}

impl Stepper {
    /// Absorbs `gamma1`, `gamma2` and prepares the step operator.
    pub fn new(spec: &ProblemSpec, cfg: &SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        spec.validate()?;
        let spec = absorb_gamma(spec)?;
        let (sigma, tau) = (cfg.sigma, cfg.tau);
        let mu = mu_coefficient(&spec.kernel, sigma, tau);
        let step_op = composite(
            spec.b.clone(),
            spec.c.clone(),
            spec.a.clone(),
            mu,
            sigma,
            tau,
        )?;
        let terms = spec.kernel.terms();
        Ok(Self {
            damping: terms
                .iter()
                .map(|e| 1.0 / (1.0 + sigma * e.rate * tau))
                .collect(),
            explicit: terms
                .iter()
                .map(|e| 1.0 - (1.0 - sigma) * e.rate * tau)
                .collect(),
            max_iter: default_max_iter(spec.dim()),
            cg_tol: DEFAULT_CG_TOL,
            step_op,
            cfg: *cfg,
            spec,
        })
    }

    pub fn with_cg_tolerance(mut self, tol: f64) -> Self {
        self.cg_tol = tol;
        self
    }

    /// The spec after absorption of the kernel's constant parts.
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    /// `f^{n+sigma} = sigma f(t^{n+1}) + (1 - sigma) f(t^n)`.
    pub fn weighted_source(&self, level: usize) -> Vec<f64> {
        let n = self.spec.dim();
        let t0 = level as f64 * self.cfg.tau;
        let t1 = t0 + self.cfg.tau;
        let mut out = vec![0.0; n];
        if self.spec.source.is_zero() {
            return out;
        }
        let mut tmp = vec![0.0; n];
        self.spec.source.eval_into(t1, &mut out);
        self.spec.source.eval_into(t0, &mut tmp);
        let s = self.cfg.sigma;
        for (o, t) in out.iter_mut().zip(&tmp) {
            *o = s * *o + (1.0 - s) * t;
        }
        out
    }

    /// Advances `state` by one level.
    pub fn advance(&self, state: &mut SolverState) -> Result<()> {
        let spec = &self.spec;
        let n = spec.dim();
        let (sigma, tau) = (self.cfg.sigma, self.cfg.tau);
        let terms = spec.kernel.terms();
        if state.y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: state.y.len(),
            });
        }
        if state.aux.len() != terms.len() {
            return Err(Error::DimensionMismatch {
                expected: terms.len(),
                got: state.aux.len(),
            });
        }

        // chi_i = ((1 - (1-sigma) b_i tau) y_i - y) / (1 + sigma b_i tau)
        let chis: Vec<Vec<f64>> = state
            .aux
            .iter()
            .enumerate()
            .map(|(i, yi)| {
                yi.iter()
                    .zip(&state.y)
                    .map(|(&yi, &y)| self.damping[i] * (self.explicit[i] * yi - y))
                    .collect()
            })
            .collect();

        // sum_i a_i/b_i (y - y_i + chi_i), multiplied by C once.
        let mut memory = vec![0.0; n];
        for ((term, yi), chi) in terms.iter().zip(&state.aux).zip(&chis) {
            let w = term.weight / term.rate;
            for k in 0..n {
                memory[k] += w * (state.y[k] - yi[k] + chi[k]);
            }
        }

        let mut rhs = self.weighted_source(state.level);
        let mut tmp = vec![0.0; n];
        spec.b.apply_into(&state.y, &mut tmp);
        for k in 0..n {
            rhs[k] = tau * rhs[k] + tmp[k];
        }
        spec.a.apply_into(&state.y, &mut tmp);
        for k in 0..n {
            rhs[k] -= (1.0 - sigma) * tau * tmp[k];
        }
        if !terms.is_empty() {
            spec.c.apply_into(&memory, &mut tmp);
            for k in 0..n {
                rhs[k] += tmp[k];
            }
        }

        let mut y_new = state.y.clone();
        solve_spd_from(&self.step_op, &rhs, &mut y_new, self.cg_tol, self.max_iter)?;

        for ((yi, chi), d) in state.aux.iter_mut().zip(&chis).zip(&self.damping) {
            for k in 0..n {
                yi[k] = d * y_new[k] + chi[k];
            }
        }
        state.y = y_new;
        state.level += 1;
        Ok(())
    }

    /// `||y||_A^2 + sum a_i ||y_i||_C^2`.
    pub fn energy(&self, state: &SolverState) -> Result<f64> {
        let w = self.spec.weight;
        let mut e = linop::quadratic_form(self.spec.a.as_ref(), w, &state.y)?;
        for (term, yi) in self.spec.kernel.terms().iter().zip(&state.aux) {
            e += term.weight * linop::quadratic_form(self.spec.c.as_ref(), w, yi)?;
        }
        Ok(e)
    }

    /// `1/2 tau ||f^{n+sigma}||_{B^-1}^2` for the step leaving `level`.
    pub fn source_increment(&self, level: usize) -> Result<f64> {
        if self.spec.source.is_zero() {
            return Ok(0.0);
        }
        let f = self.weighted_source(level);
        if f.iter().all(|&x| x == 0.0) {
            return Ok(0.0);
        }
        let mut binv_f = vec![0.0; f.len()];
        solve_spd_from(
            self.spec.b.as_ref(),
            &f,
            &mut binv_f,
            1e-13,
            default_max_iter(f.len()),
        )?;
        Ok(0.5 * self.cfg.tau * self.spec.weight.0 * linop::dot(&binv_f, &f))
    }
}

/// One step of the scheme from `state`.
pub fn step(spec: &ProblemSpec, cfg: &SchemeConfig, state: &SolverState) -> Result<SolverState> {
    let stepper = Stepper::new(spec, cfg)?;
    let mut next = state.clone();
    stepper.advance(&mut next)?;
    Ok(next)
}

/// Runs `cfg.n_steps` steps from `y^0 = u0`, `y_i^0 = 0`, recording probes,
/// snapshots and the energy estimate at every level.
pub fn run(spec: &ProblemSpec, cfg: &SchemeConfig, opts: &RunOptions) -> Result<Trajectory> {
    let stepper = Stepper::new(spec, cfg)?;
    run_with(&stepper, opts)
}

pub fn run_with(stepper: &Stepper, opts: &RunOptions) -> Result<Trajectory> {
    let spec = stepper.spec();
    let cfg = *stepper.config();
    for &p in &opts.probes {
        if p >= spec.dim() {
            return Err(Error::Domain(format!(
                "probe index {p} out of range {}",
                spec.dim()
            )));
        }
    }
    let mut state = SolverState::initial(spec);
    let mut bound = linop::quadratic_form(spec.a.as_ref(), spec.weight, &spec.u0)?;
    let mut trace = EnergyTrace::default();
    let mut snapshots = Vec::new();
    let mut probe_series = Vec::with_capacity(cfg.n_steps + 1);

    let mut record = |state: &SolverState, bound: f64, trace: &mut EnergyTrace| -> Result<()> {
        let time = state.time(cfg.tau);
        let rec = EnergyRecord {
            level: state.level,
            time,
            energy: stepper.energy(state)?,
            bound,
        };
        if !rec.holds() {
            trace.violations.push(state.level);
            if cfg.is_stable() && opts.monitor == MonitorMode::Fail {
                return Err(Error::StabilityViolation {
                    level: state.level,
                    energy: rec.energy,
                    bound,
                });
            }
            warn!(
                "energy estimate exceeded at level {}: E = {:e}, R = {:e}",
                state.level, rec.energy, bound
            );
        }
        trace.records.push(rec);
        if opts.snapshot_levels.contains(&state.level) {
            snapshots.push(Snapshot {
                level: state.level,
                time,
                values: state.y.clone(),
            });
        }
        if !opts.probes.is_empty() {
            probe_series.push((
                state.level,
                time,
                opts.probes.iter().map(|&p| state.y[p]).collect(),
            ));
        }
        Ok(())
    };

    record(&state, bound, &mut trace)?;
    for _ in 0..cfg.n_steps {
        bound += stepper.source_increment(state.level)?;
        stepper.advance(&mut state)?;
        record(&state, bound, &mut trace)?;
    }
    Ok(Trajectory {
        final_state: state,
        snapshots,
        probe_series,
        energy: trace,
    })
}

/// Residual norms of the uneliminated two-level equations for the transition
/// `before -> after`: the main equation and the largest auxiliary one.
pub fn raw_residuals(
    spec: &ProblemSpec,
    cfg: &SchemeConfig,
    before: &SolverState,
    after: &SolverState,
) -> Result<(f64, f64)> {
    let stepper = Stepper::new(spec, cfg)?;
    let spec = stepper.spec();
    let n = spec.dim();
    let (sigma, tau) = (cfg.sigma, cfg.tau);
    let terms = spec.kernel.terms();
    let dy: Vec<f64> = (0..n).map(|k| (after.y[k] - before.y[k]) / tau).collect();

    let mut main = linop::apply(spec.b.as_ref(), &dy)?;
    let mut mem = vec![0.0; n];
    for (term, (yi0, yi1)) in terms.iter().zip(before.aux.iter().zip(&after.aux)) {
        let w = term.weight / term.rate;
        for k in 0..n {
            mem[k] += w * (dy[k] - (yi1[k] - yi0[k]) / tau);
        }
    }
    let cm = linop::apply(spec.c.as_ref(), &mem)?;
    let ys: Vec<f64> = (0..n)
        .map(|k| sigma * after.y[k] + (1.0 - sigma) * before.y[k])
        .collect();
    let ay = linop::apply(spec.a.as_ref(), &ys)?;
    let f = stepper.weighted_source(before.level);
    for k in 0..n {
        main[k] += cm[k] + ay[k] - f[k];
    }
    let main_res = linop::norm(spec.weight, &main);

    let mut aux_res = 0.0f64;
    for (term, (yi0, yi1)) in terms.iter().zip(before.aux.iter().zip(&after.aux)) {
        let r: Vec<f64> = (0..n)
            .map(|k| {
                (yi1[k] - yi0[k]) / tau + term.rate * (sigma * yi1[k] + (1.0 - sigma) * yi0[k])
                    - dy[k]
            })
            .collect();
        aux_res = aux_res.max(linop::norm(spec.weight, &r));
    }
    Ok((main_res, aux_res))
}
