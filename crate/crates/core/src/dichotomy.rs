//! Threshold dichotomy for focusing data below the ground state.
//!
//! With `x(u) = kinetic(u) ||u||^2` and `f(x) = x^2/2 - C^5 x^3 / 5`, the Gagliardo-Nirenberg
//! inequality gives `f(x(u)) <= E_-(u) ||u||^4`. Data with `E_-(phi)||phi||^4 < f(x_max)` and
//! `x(phi) < x_max` therefore keep `x(u(t))` in the component `(0, x_max)` of the sublevel set,
//! as long as `x(t)` moves continuously.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve_observed, EquationKind, EvolutionProblem, StepperConfig, TrajectoryLog};
use crate::field::Field;
use crate::ground_state::{threshold_profile, GroundStateResult};
use crate::norms::{lebesgue_norm, seminorm, sobolev_norm};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdVerdict {
    /// `E_-(phi) ||phi||^4 < E_-(ref) ||ref||^4`.
    pub energy_condition: bool,
    /// `x(phi) < x(ref)`.
    pub gradient_condition: bool,
    pub below_threshold: bool,
    /// `(rhs - lhs) / |rhs|` of the energy condition; positive when it holds.
    pub margin_energy: f64,
    /// `(rhs - lhs) / |rhs|` of the gradient condition.
    pub margin_gradient: f64,
}

/// `(x(u), E_-(u) ||u||^4)` with the kinetic norm of `kind`.
pub fn controlled_quantities(u: &Field, kind: EquationKind) -> Result<(f64, f64)> {
    let s = match kind {
        EquationKind::HalfWave1d => 0.5,
        EquationKind::Nls2d => 1.0,
    };
    let kinetic = seminorm(u, s)?;
    let mass = sobolev_norm(u, 0.0)?.powi(2);
    let energy = 0.5 * kinetic * kinetic - lebesgue_norm(u, 5.0)?.powi(5) / 5.0;
    Ok((kinetic * mass, energy * mass * mass))
}

/// Evaluates both threshold conditions; the reference side is computed from `reference.profile`
/// by the same function, so `phi = reference.profile` sits exactly on the boundary.
pub fn check_conditions(phi: &Field, reference: &GroundStateResult) -> Result<ThresholdVerdict> {
    reference.profile.grid().ensure_same(phi.grid())?;
    let (x, e) = controlled_quantities(phi, reference.kind)?;
    let (x_ref, e_ref) = controlled_quantities(&reference.profile, reference.kind)?;
    let energy_condition = e < e_ref;
    let gradient_condition = x < x_ref;
    Ok(ThresholdVerdict {
        energy_condition,
        gradient_condition,
        below_threshold: energy_condition && gradient_condition,
        margin_energy: (e_ref - e) / e_ref.abs(),
        margin_gradient: (x_ref - x) / x_ref.abs(),
    })
}

/// `f(x) = x^2 / 2 - c^5 x^3 / 5`, with `c` the Gagliardo-Nirenberg constant.
pub fn sublevel_f(x: f64, c_gn: f64) -> f64 {
    threshold_profile(x, c_gn.powi(5))
}

/// Critical point `5 / (3 c^5)` of [`sublevel_f`].
pub fn x_max(c_gn: f64) -> f64 {
    5.0 / (3.0 * c_gn.powi(5))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub times: Vec<f64>,
    pub x_series: Vec<f64>,
    /// `E_-(u(t)) ||u(t)||^4` at the same times.
    pub energy_series: Vec<f64>,
    pub x_max: f64,
    /// `max_t x(t) >= x_max`.
    pub escaped: bool,
    /// `x_max - max_t x(t)`.
    pub min_gap: f64,
    /// `max_t f(x(t)) - E_-(u(t)) ||u(t)||^4`; nonpositive up to rounding by the GN inequality.
    pub sublevel_max_excess: f64,
    pub sublevel_holds: bool,
    pub sublevel_tolerance: f64,
    /// Relative drift of `E_-(u) ||u||^4` over the run.
    pub energy_drift: f64,
    /// False for defocusing contrast runs, where the sublevel picture carries no meaning.
    pub focusing: bool,
}

impl TrapReport {
    pub fn to_csv(&self, c_gn: f64) -> String {
        let mut out = String::from("time,x,f_x,energy_mass4\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                self.times[i],
                self.x_series[i],
                sublevel_f(self.x_series[i], c_gn),
                self.energy_series[i]
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TrapRun {
    pub verdict: ThresholdVerdict,
    pub report: TrapReport,
    pub log: TrajectoryLog,
}

/// Evolves `phi`, recording `x(t)` and checking `f(x(t)) <= E_-(u(t))||u(t)||^4 + tolerance`
/// after every step.
pub fn run_trap_experiment(
    problem: &EvolutionProblem,
    phi: &Field,
    reference: &GroundStateResult,
    cfg: &StepperConfig,
    sublevel_tolerance: f64,
) -> Result<TrapRun> {
    if reference.kind != problem.kind {
        return Err(Error::InvalidArgument("reference ground state belongs to the other equation".into()));
    }
    let c_gn = reference
        .gn_constant
        .ok_or_else(|| Error::InvalidArgument("reference ground state has no GN constant (p != 4)".into()))?;
    let verdict = check_conditions(phi, reference)?;
    let xm = x_max(c_gn);
    let mut times = Vec::new();
    let mut xs = Vec::new();
    let mut es = Vec::new();
    let mut failure: Option<Error> = None;
    let log = evolve_observed(problem, phi, cfg, &[], |t, u| {
        if failure.is_some() {
            return;
        }
        match controlled_quantities(u, problem.kind) {
            Ok((x, e)) => {
                times.push(t);
                xs.push(x);
                es.push(e);
            }
            Err(err) => failure = Some(err),
        }
    })?;
    if let Some(err) = failure {
        return Err(err);
    }
    let x_peak = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let excess = xs
        .iter()
        .zip(&es)
        .map(|(&x, &e)| sublevel_f(x, c_gn) - e)
        .fold(f64::NEG_INFINITY, f64::max);
    let e0 = es[0];
    let drift = es.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE);
    let report = TrapReport {
        times,
        x_series: xs,
        energy_series: es,
        x_max: xm,
        escaped: x_peak >= xm,
        min_gap: xm - x_peak,
        sublevel_max_excess: excess,
        sublevel_holds: excess <= sublevel_tolerance,
        sublevel_tolerance,
        energy_drift: drift,
        focusing: problem.lambda() < 0.0,
    };
    Ok(TrapRun { verdict, report, log })
}
