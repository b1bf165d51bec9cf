//! One function per subcommand. Each returns the process exit code for a completed run.

use anyhow::Result;
use serde_json::json;

use dispersive_core::dichotomy::run_trap_experiment;
use dispersive_core::energies::identity_check;
use dispersive_core::evolution::evolve;
use dispersive_core::ground_state::{petviashvili, GroundStateProblem};
use dispersive_core::probe::{refinement_check, run_ensemble, ProbeKind};
use dispersive_core::{EnergyReport, Error, EvolutionProblem, Monitor};

use crate::config::{DichotomyConfig, EvolveConfig, GroundStateConfig, IdentityCheckConfig, ProbeConfig};
use crate::data;
use crate::output::OutDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_ESCAPED: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;

fn history_csv(h: &[f64]) -> String {
    let mut out = String::from("iteration,residual\n");
    for (i, r) in h.iter().enumerate() {
        out.push_str(&format!("{},{r}\n", i + 1));
    }
    out
}

fn relative_drift(reports: &[EnergyReport], get: impl Fn(&EnergyReport) -> f64) -> f64 {
    let Some(first) = reports.first() else { return 0.0 };
    let e0 = get(first);
    let scale = e0.abs().max(f64::MIN_POSITIVE);
    reports.iter().map(|r| (get(r) - e0).abs()).fold(0.0, f64::max) / scale
}

pub fn evolve_cmd(cfg: &EvolveConfig, out: &OutDir) -> Result<i32> {
    let grid = cfg.grid.expect("resolved");
    let problem = EvolutionProblem::new(cfg.equation, cfg.coupling, grid)?;
    let phi = data::build(&cfg.initial, cfg.equation, &grid, None)?;
    let monitors: &[Monitor] = if cfg.modified_energy { &[Monitor::ModifiedEnergy] } else { &[] };
    match evolve(&problem, &phi, &cfg.stepper, monitors) {
        Ok(log) => {
            out.write_text("trajectory.csv", &log.to_csv())?;
            if cfg.save_final {
                if let Some(f) = &log.final_state {
                    out.write_field("final_state.bin", f)?;
                }
            }
            let result = json!({
                "status": "completed",
                "samples": log.reports.len(),
                "initial": log.reports.first(),
                "final": log.last(),
                "mass_drift": relative_drift(&log.reports, |r| r.mass),
                "energy_drift": relative_drift(&log.reports, |r| r.conserved_energy),
                "max_modulus_deviation": log.max_modulus_deviation,
                "sup_h_half": log.sup_h_half.last(),
                "sup_h1": log.sup_h1.last(),
                "wraparound_flag": log.wraparound_flag,
            });
            out.write_json("summary.json", "evolve", cfg, &result)?;
            Ok(EXIT_OK)
        }
        Err(Error::BlowUpSuspected { time, reason, last_good }) => {
            log::error!("aborted at t = {time}: {reason}");
            let result = json!({
                "status": "aborted",
                "time": time,
                "reason": reason,
                "last_good": last_good,
            });
            out.write_json("summary.json", "evolve", cfg, &result)?;
            Ok(EXIT_BLOW_UP)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn ground_state_cmd(cfg: &GroundStateConfig, out: &OutDir) -> Result<i32> {
    let grid = cfg.grid.expect("resolved");
    let problem = GroundStateProblem::new(cfg.equation, grid, cfg.power)?;
    let seed = match &cfg.seed_profile {
        Some(d) => data::build(d, cfg.equation, &grid, None)?,
        None => problem.default_seed(),
    };
    match petviashvili(&problem, &seed, &cfg.options) {
        Ok(r) => {
            out.write_field("profile.bin", &r.profile)?;
            if cfg.write_csv {
                out.write_field("profile.csv", &r.profile)?;
            }
            out.write_text("residual_history.csv", &history_csv(&r.residual_history))?;
            let result = json!({ "status": "converged", "summary": r.summary() });
            out.write_json("summary.json", "ground-state", cfg, &result)?;
            Ok(EXIT_OK)
        }
        Err(Error::Divergence {
            iterations,
            residual,
            residual_history,
        }) => {
            log::error!("no convergence after {iterations} iterations, residual {residual:e}");
            out.write_text("residual_history.csv", &history_csv(&residual_history))?;
            let result = json!({ "status": "diverged", "iterations": iterations, "residual": residual });
            out.write_json("summary.json", "ground-state", cfg, &result)?;
            Ok(EXIT_DIVERGED)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn identity_check_cmd(cfg: &IdentityCheckConfig, out: &OutDir) -> Result<i32> {
    let grid = cfg.grid.expect("resolved");
    let problem = EvolutionProblem::new(cfg.equation, cfg.coupling, grid)?;
    let phi = data::build(&cfg.initial, cfg.equation, &grid, None)?;
    let run = identity_check(&problem, &phi, &cfg.stepper, &cfg.identity)?;
    out.write_text("residuals.csv", &run.to_csv())?;
    out.write_text("trajectory.csv", &run.log.to_csv())?;
    let max_imag = run.residuals.iter().map(|r| r.max_imag).fold(0.0, f64::max);
    let max_residual = run.residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let result = json!({
        "samples": run.residuals.len(),
        "max_residual": max_residual,
        "max_relative_residual": run.max_relative_residual(),
        "max_imag": max_imag,
        "bound_statistics": run.bound_statistics(),
    });
    out.write_json("summary.json", "identity-check", cfg, &result)?;
    Ok(EXIT_OK)
}

pub fn probe_cmd(cfg: &ProbeConfig, out: &OutDir) -> Result<i32> {
    let report = run_ensemble(&cfg.probe, &cfg.family, &cfg.grid)?;
    out.write_text("ratios.csv", &report.to_csv())?;
    let refinement = if cfg.refinement {
        let [coarse, fine, change] = refinement_check(&cfg.probe, &cfg.family, &cfg.grid)?;
        Some(json!({ "coarse": coarse, "fine": fine, "relative_change": change }))
    } else {
        None
    };
    if cfg.dump_argmax {
        let index = match cfg.probe {
            ProbeKind::Algebra { .. } | ProbeKind::Kpv { .. } => 2 * report.argmax_index,
            _ => report.argmax_index,
        };
        let (f, _) = cfg.family.member(&cfg.grid, index)?;
        out.write_field("argmax.csv", &f)?;
    }
    let result = json!({
        "inequality": cfg.probe.tag(),
        "members": report.ratios.len(),
        "sup_ratio": report.sup_ratio,
        "argmax_index": report.argmax_index,
        "argmax_descriptor": report.argmax_descriptor,
        "refinement": refinement,
    });
    out.write_json("report.json", "probe", cfg, &result)?;
    Ok(EXIT_OK)
}

pub fn dichotomy_cmd(cfg: &DichotomyConfig, out: &OutDir) -> Result<i32> {
    let grid = cfg.grid.expect("resolved");
    let problem = EvolutionProblem::new(cfg.equation, cfg.coupling, grid)?;
    let reference = data::ground_state(cfg.equation, &grid, cfg.reference.as_deref())?;
    let phi = data::build(&cfg.initial, cfg.equation, &grid, Some(&reference))?;
    let run = run_trap_experiment(&problem, &phi, &reference, &cfg.stepper, cfg.sublevel_tolerance)?;
    let c_gn = reference.gn_constant.expect("quartic reference");
    out.write_text("trap.csv", &run.report.to_csv(c_gn))?;
    out.write_text("trajectory.csv", &run.log.to_csv())?;
    let rep = &run.report;
    let result = json!({
        "trapped": !rep.escaped,
        "verdict": run.verdict,
        "x_max": rep.x_max,
        "min_gap": rep.min_gap,
        "escaped": rep.escaped,
        "sublevel_holds": rep.sublevel_holds,
        "sublevel_max_excess": rep.sublevel_max_excess,
        "energy_drift": rep.energy_drift,
        "focusing": rep.focusing,
        "samples": rep.times.len(),
        "reference": reference.summary(),
    });
    out.write_json("report.json", "dichotomy", cfg, &result)?;
    Ok(if rep.escaped { EXIT_ESCAPED } else { EXIT_OK })
}
