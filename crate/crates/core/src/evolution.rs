//! Strang-split time integration of
//!
//! * `i u_t + Delta u = lambda u |u|^3` on a 2D torus or Dirichlet square, and
//! * `i u_t - |D| u = lambda u |u|^3` on a 1D torus standing in for the line.
//!
//! Both sub-flows are solved exactly: the linear one is a Fourier (or sine) multiplier
//! exponential and the nonlinear one a pointwise phase rotation, since `|u|` is constant
//! along `i u_t = lambda u |u|^3`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energies::{energy_report, EnergyReport, Monitor};
use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::grid::{Boundary, Grid};
use crate::transform;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationKind {
    Nls2d,
    HalfWave1d,
}

/// Sign of the nonlinear coupling, `lambda = +1` (defocusing) or `-1` (focusing).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Coupling {
    Defocusing,
    Focusing,
}

impl Coupling {
    pub fn lambda(self) -> f64 {
        match self {
            Coupling::Defocusing => 1.0,
            Coupling::Focusing => -1.0,
        }
    }
}

impl TryFrom<i32> for Coupling {
    type Error = String;
    fn try_from(v: i32) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Coupling::Defocusing),
            -1 => Ok(Coupling::Focusing),
            _ => Err(format!("coupling must be +1 or -1, got {v}")),
        }
    }
}

impl From<Coupling> for i32 {
    fn from(c: Coupling) -> i32 {
        c.lambda() as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionProblem {
    pub kind: EquationKind,
    pub coupling: Coupling,
    pub grid: Grid,
}

impl EvolutionProblem {
    pub fn new(kind: EquationKind, coupling: Coupling, grid: Grid) -> Result<Self> {
        match kind {
            EquationKind::Nls2d if grid.dimension() != 2 => {
                return Err(Error::Unsupported("NLS problems live on 2D grids".into()))
            }
            EquationKind::HalfWave1d if grid.dimension() != 1 || grid.boundary() != Boundary::Periodic => {
                return Err(Error::Unsupported("half-wave problems need a 1D periodic grid".into()))
            }
            _ => {}
        }
        Ok(EvolutionProblem { kind, coupling, grid })
    }

    pub fn lambda(&self) -> f64 {
        self.coupling.lambda()
    }

    /// Dispersion relation of the linear part: `|k|^2` for NLS, `|k|` for half-wave.
    pub fn dispersion(&self, k: f64) -> f64 {
        match self.kind {
            EquationKind::Nls2d => k * k,
            EquationKind::HalfWave1d => k,
        }
    }

    fn check(&self, f: &Field) -> Result<()> {
        self.grid.ensure_same(f.grid())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    pub horizon: f64,
    #[serde(default = "one")]
    pub log_every: usize,
    /// Abort with "blow-up suspected" once `||u||_{H^1}` exceeds this multiple of its initial value.
    #[serde(default = "default_ceiling")]
    pub ceiling_factor: f64,
}

fn one() -> usize {
    1
}

fn default_ceiling() -> f64 {
    1e6
}

impl StepperConfig {
    pub fn new(dt: f64, horizon: f64, log_every: usize) -> Result<Self> {
        let c = StepperConfig {
            dt,
            horizon,
            log_every,
            ceiling_factor: default_ceiling(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.log_every == 0 {
            return Err(Error::InvalidArgument("log_every must be >= 1".into()));
        }
        if !(self.ceiling_factor > 1.0) {
            return Err(Error::InvalidArgument("ceiling_factor must exceed 1".into()));
        }
        Ok(())
    }

    /// Step sizes that reach the horizon exactly: whole steps of `dt` and a shorter last step if needed.
    pub fn schedule(&self) -> Vec<f64> {
        let whole = (self.horizon / self.dt * (1.0 + 1e-12)).floor() as usize;
        let mut steps = vec![self.dt; whole];
        let rest = self.horizon - whole as f64 * self.dt;
        if rest > 1e-12 * self.horizon {
            steps.push(rest);
        }
        steps
    }
}

/// Exact linear flow at time `t`.
pub fn linear_flow(f: &Field, problem: &EvolutionProblem, t: f64) -> Result<Field> {
    problem.check(f)?;
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = problem.grid;
    Ok(f
        .spectrum()
        .scale_by(|i| Complex64::from_polar(1.0, -problem.dispersion(grid.wavenumber_sq(i).sqrt()) * t))
        .into_field())
}

/// Exact flow of `i u_t = lambda u |u|^3`: `u exp(-i lambda |u|^3 t)`.
pub fn nonlinear_flow(f: &Field, lambda: f64, t: f64) -> Field {
    f.map(|v| rotate(v, lambda, t))
}

#[inline]
fn rotate(v: Complex64, lambda: f64, t: f64) -> Complex64 {
    let a = v.norm();
    v * Complex64::from_polar(1.0, -lambda * a * a * a * t)
}

/// One Strang step `L(dt/2) N(dt) L(dt/2)`. Negative `dt` integrates backwards.
pub fn strang_step(f: &Field, problem: &EvolutionProblem, dt: f64) -> Result<Field> {
    problem.check(f)?;
    let mut s = SplitStep::new(*problem, dt);
    let mut u = f.clone();
    s.step(&mut u);
    Ok(u)
}

/// Reusable Strang stepper with the half-step linear propagator tabulated once.
#[derive(Clone, Debug)]
pub struct SplitStep {
    problem: EvolutionProblem,
    dt: f64,
    half: Vec<Complex64>,
    nonlinear: bool,
}

impl SplitStep {
    pub fn new(problem: EvolutionProblem, dt: f64) -> Self {
        let g = problem.grid;
        let half = (0..g.len())
            .map(|i| Complex64::from_polar(1.0, -problem.dispersion(g.wavenumber_sq(i).sqrt()) * 0.5 * dt))
            .collect();
        SplitStep {
            problem,
            dt,
            half,
            nonlinear: true,
        }
    }

    /// Disables the nonlinear sub-flow, leaving the exact linear propagator.
    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&mut self, u: &mut Field) {
        let grid = self.problem.grid;
        let lambda = self.problem.lambda();
        let mut data = std::mem::replace(u, Field::zeros(grid)).into_values();
        transform::forward(&grid, &mut data);
        data.iter_mut().zip(&self.half).for_each(|(c, p)| *c *= p);
        transform::inverse(&grid, &mut data);
        if self.nonlinear {
            data.iter_mut().for_each(|v| *v = rotate(*v, lambda, self.dt));
        }
        transform::forward(&grid, &mut data);
        data.iter_mut().zip(&self.half).for_each(|(c, p)| *c *= p);
        *u = Spectrum::from_coeffs(grid, data).into_field();
    }
}

/// Sampled energies along one trajectory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub problem: EvolutionProblem,
    pub config: StepperConfig,
    pub times: Vec<f64>,
    pub reports: Vec<EnergyReport>,
    /// Running supremum of `||u||_{H^{1/2}}` over the samples so far.
    pub sup_h_half: Vec<f64>,
    /// Running supremum of `||u||_{H^1}`.
    pub sup_h1: Vec<f64>,
    /// Set for half-wave runs longer than `2L`, after which signals wrap around the torus.
    pub wraparound_flag: bool,
    /// Largest `| |u(t)| - |u(0)| |` seen at the samples.
    pub max_modulus_deviation: f64,
    #[serde(skip)]
    pub final_state: Option<Field>,
}

impl TrajectoryLog {
    fn new(problem: EvolutionProblem, config: StepperConfig) -> Self {
        let wraparound_flag = problem.kind == EquationKind::HalfWave1d && config.horizon > 2.0 * problem.grid.half_length();
        TrajectoryLog {
            problem,
            config,
            times: Vec::new(),
            reports: Vec::new(),
            sup_h_half: Vec::new(),
            sup_h1: Vec::new(),
            wraparound_flag,
            max_modulus_deviation: 0.0,
            final_state: None,
        }
    }

    fn push(&mut self, report: EnergyReport) {
        let prev_half = self.sup_h_half.last().copied().unwrap_or(0.0);
        let prev_h1 = self.sup_h1.last().copied().unwrap_or(0.0);
        self.sup_h_half.push(prev_half.max(report.h_half));
        self.sup_h1.push(prev_h1.max(report.h1));
        self.times.push(report.time);
        self.reports.push(report);
    }

    pub fn last(&self) -> Option<&EnergyReport> {
        self.reports.last()
    }

    /// CSV with one row per sample.
    pub fn to_csv(&self) -> String {
        let nls = self.problem.kind == EquationKind::Nls2d;
        let mut out = String::from("time,mass,energy,modified_energy,h_half,h1,");
        if nls {
            out.push_str("h2,");
        }
        out.push_str("linfty,sup_h_half,sup_h1\n");
        for (i, r) in self.reports.iter().enumerate() {
            let me = r.modified_energy.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{},{},{},", r.time, r.mass, r.conserved_energy, me, r.h_half, r.h1));
            if nls {
                out.push_str(&r.h2.map(|v| v.to_string()).unwrap_or_default());
                out.push(',');
            }
            out.push_str(&format!("{},{},{}\n", r.linfty, self.sup_h_half[i], self.sup_h1[i]));
        }
        out
    }
}

/// Integrates `phi` to the configured horizon, sampling an [`EnergyReport`] every `log_every` steps
/// and at the final time.
pub fn evolve(problem: &EvolutionProblem, phi: &Field, cfg: &StepperConfig, monitors: &[Monitor]) -> Result<TrajectoryLog> {
    evolve_observed(problem, phi, cfg, monitors, |_, _| {})
}

/// [`evolve`] with a callback invoked on the state after every step (and once at `t = 0`).
pub fn evolve_observed(
    problem: &EvolutionProblem,
    phi: &Field,
    cfg: &StepperConfig,
    monitors: &[Monitor],
    mut observe: impl FnMut(f64, &Field),
) -> Result<TrajectoryLog> {
    cfg.validate()?;
    problem.check(phi)?;
    let mut log = TrajectoryLog::new(*problem, *cfg);
    let initial = energy_report(phi, problem, 0.0, monitors)?;
    let ceiling = cfg.ceiling_factor * initial.h1;
    let modulus0 = phi.moduli();
    log.push(initial);
    observe(0.0, phi);

    let schedule = cfg.schedule();
    let mut stepper = SplitStep::new(*problem, cfg.dt);
    let mut u = phi.clone();
    let mut t = 0.0;
    for (n, &h) in schedule.iter().enumerate() {
        if h != stepper.dt() {
            stepper = SplitStep::new(*problem, h);
        }
        stepper.step(&mut u);
        t = if n + 1 == schedule.len() { cfg.horizon } else { (n + 1) as f64 * cfg.dt };
        if !u.is_finite() {
            return Err(Error::BlowUpSuspected {
                time: t,
                reason: "non-finite values in the state".into(),
                last_good: log.last().cloned().map(Box::new),
            });
        }
        observe(t, &u);
        if (n + 1) % cfg.log_every == 0 || n + 1 == schedule.len() {
            let report = energy_report(&u, problem, t, monitors)?;
            if report.h1 > ceiling {
                return Err(Error::BlowUpSuspected {
                    time: t,
                    reason: format!("H^1 norm {:e} exceeds ceiling {:e}", report.h1, ceiling),
                    last_good: log.last().cloned().map(Box::new),
                });
            }
            let dev = u
                .values()
                .iter()
                .zip(&modulus0)
                .map(|(v, m0)| (v.norm() - m0).abs())
                .fold(0.0, f64::max);
            log.max_modulus_deviation = log.max_modulus_deviation.max(dev);
            log.push(report);
        }
    }
    debug_assert!((t - cfg.horizon).abs() <= 1e-9 * cfg.horizon.max(1.0));
    log.final_state = Some(u);
    Ok(log)
}
