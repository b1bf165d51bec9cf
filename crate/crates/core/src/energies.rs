//! Conserved energies, the modified energies `E(u)` (NLS) and `F(u)` (half-wave), the
//! right-hand sides of their time-derivative identities, and a finite-difference checker.
//!
//! Every integral with a nonlinear integrand is evaluated on the grid refined twice per axis
//! (spectral interpolation), where all derivatives and multipliers are recomputed. Pairings
//! follow `(f, g) = int f conj(g)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{evolve_observed, strang_step, EquationKind, EvolutionProblem, StepperConfig, TrajectoryLog};
use crate::field::Field;
use crate::grid::Grid;
use crate::nonlinear::{nonlinear_sample, quartic, Sampling};
use crate::norms::{lebesgue_norm, seminorm, sobolev_norm};
use crate::transform;

const OVERSAMPLE: usize = 2;

/// Optional, costly quantities an [`EnergyReport`] may carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitor {
    ModifiedEnergy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    /// `||u||_{L^2}^2`.
    pub mass: f64,
    pub conserved_energy: f64,
    pub modified_energy: Option<f64>,
    pub h_half: f64,
    pub h1: f64,
    /// Present on 2D grids only.
    pub h2: Option<f64>,
    pub linfty: f64,
}

/// Per-term values of a modified energy or identity right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermBreakdown {
    pub terms: Vec<(String, f64)>,
    pub total: f64,
    /// Largest imaginary part among pairings that are real in exact arithmetic,
    /// relative to the Cauchy-Schwarz bound of the pairing. Zero when no such pairing occurs.
    pub max_imag: f64,
}

impl TermBreakdown {
    fn new(terms: Vec<(&str, f64)>, max_imag: f64) -> Self {
        let total = terms.iter().map(|t| t.1).sum();
        TermBreakdown {
            terms: terms.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            total,
            max_imag,
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.0 == name).map(|t| t.1)
    }
}

/// `1/2 ||grad u||^2 + lambda/5 ||u||_5^5` (NLS) or `1/2 |||D|^{1/2} u||^2 + lambda/5 ||u||_5^5` (half-wave).
pub fn conserved_energy(u: &Field, problem: &EvolutionProblem) -> Result<f64> {
    problem.grid.ensure_same(u.grid())?;
    let s = match problem.kind {
        EquationKind::Nls2d => 1.0,
        EquationKind::HalfWave1d => 0.5,
    };
    let kinetic = seminorm(u, s)?.powi(2);
    let potential = lebesgue_norm(u, 5.0)?.powi(5);
    Ok(0.5 * kinetic + problem.lambda() / 5.0 * potential)
}

/// Mass, energies and norms of `u` at time `time`.
pub fn energy_report(u: &Field, problem: &EvolutionProblem, time: f64, monitors: &[Monitor]) -> Result<EnergyReport> {
    let modified_energy = if monitors.contains(&Monitor::ModifiedEnergy) {
        Some(modified_energy(u, problem)?.total)
    } else {
        None
    };
    Ok(EnergyReport {
        time,
        mass: sobolev_norm(u, 0.0)?.powi(2),
        conserved_energy: conserved_energy(u, problem)?,
        modified_energy,
        h_half: sobolev_norm(u, 0.5)?,
        h1: sobolev_norm(u, 1.0)?,
        h2: if u.grid().dimension() == 2 { Some(sobolev_norm(u, 2.0)?) } else { None },
        linfty: u.max_modulus(),
    })
}

/// The modified energy matching the problem kind.
pub fn modified_energy(u: &Field, problem: &EvolutionProblem) -> Result<TermBreakdown> {
    problem.grid.ensure_same(u.grid())?;
    match problem.kind {
        EquationKind::Nls2d => modified_energy_nls_terms(u, problem.lambda()),
        EquationKind::HalfWave1d => modified_energy_hw_terms(u, problem.lambda()),
    }
}

/// `E(u) = ||Delta u||^2 - 2 lambda Re(Delta u, u|u|^3) - 3/4 lambda (grad|u|^2, grad(|u|^2)|u|)`.
pub fn modified_energy_nls(u: &Field, lambda: f64) -> Result<f64> {
    Ok(modified_energy_nls_terms(u, lambda)?.total)
}

pub fn modified_energy_nls_terms(u: &Field, lambda: f64) -> Result<TermBreakdown> {
    let s = NlsState::new(u, lambda)?;
    let c = s.cell;
    let e1: f64 = s.lap.iter().map(|v| v.norm_sqr()).sum::<f64>() * c;
    let e2 = -2.0 * lambda * re_pair(&s.lap, &s.quartic, c);
    let e3 = -0.75 * lambda * s.grad_rho_sq.iter().zip(&s.a).map(|(g, a)| g * a).sum::<f64>() * c;
    Ok(TermBreakdown::new(vec![("lap_sq", e1), ("lap_quartic", e2), ("grad_density", e3)], 0.0))
}

/// `F(u) = ||u_x||^2 + 2 lambda Re(|D|u, u|u|^3) - 3/4 lambda (||D|^{1/2}|u|^2|^2, |u|)
///        + lambda (|D|^{1/2}|u|^2 - conj(u)|D|^{1/2}u - u|D|^{1/2}conj(u), |D|^{1/2}|u|^3)`.
pub fn modified_energy_hw(u: &Field, lambda: f64) -> Result<f64> {
    Ok(modified_energy_hw_terms(u, lambda)?.total)
}

pub fn modified_energy_hw_terms(u: &Field, lambda: f64) -> Result<TermBreakdown> {
    let s = HwState::new(u, lambda)?;
    let c = s.cell;
    let mut imag = Realness::default();
    let f1: f64 = s.ux.iter().map(|v| v.norm_sqr()).sum::<f64>() * c;
    let f2 = 2.0 * lambda * re_pair(&s.du, &s.quartic, c);
    let f3 = -0.75 * lambda * s.a_rho.iter().zip(&s.a).map(|(r, a)| r.norm_sqr() * a).sum::<f64>() * c;
    let comm: Vec<Complex64> = (0..s.u.len())
        .map(|i| s.a_rho[i] - s.u[i].conj() * s.a_u[i] - s.u[i] * s.a_ubar[i])
        .collect();
    let f4 = lambda * imag.pair(&comm, &s.a_c3, c);
    Ok(TermBreakdown::new(
        vec![("dx_sq", f1), ("d_quartic", f2), ("half_density_sq", f3), ("commutator", f4)],
        imag.0,
    ))
}

/// `u_t` from the equation: `i(Delta u - lambda u|u|^3)` or `-i(|D|u + lambda u|u|^3)`.
pub fn dt_field(u: &Field, problem: &EvolutionProblem) -> Result<Field> {
    problem.grid.ensure_same(u.grid())?;
    let lambda = problem.lambda();
    let q = nonlinear_sample(u, quartic, Sampling::Oversampled)?;
    let grid = problem.grid;
    let lin = u
        .spectrum()
        .scale_by(|i| Complex64::new(problem.dispersion(grid.wavenumber_sq(i).sqrt()), 0.0))
        .into_field();
    // Both equations read u_t = -i (P(D) u + lambda u|u|^3) with P = |k|^2 or |k|.
    lin.zip_with(&q, |l, q| -Complex64::i() * (l + lambda * q))
}

/// Default regularization of `d/dt |u|`: `1e-8 max|u|`.
pub fn default_regularization(u: &Field) -> f64 {
    1e-8 * u.max_modulus()
}

/// Right-hand side of `d/dt (E(u) + ||u||^2)` for NLS:
/// `-2 lambda^2 Im(grad u, u grad|u|^6) + 3/4 lambda (|grad|u|^2|^2, d_t|u|) + 2 lambda (|grad u|^2, d_t|u|^3)`.
pub fn lemma_rhs_nls(u: &Field, lambda: f64, eps_reg: f64) -> Result<TermBreakdown> {
    let s = NlsState::new(u, lambda)?;
    let c = s.cell;
    let n = s.u.len();
    let i = Complex64::i();
    let ut: Vec<Complex64> = (0..n).map(|j| i * (s.lap[j] - lambda * s.quartic[j])).collect();
    let dt = TimeDerivatives::new(&s.u, &s.a, &ut, eps_reg);

    let mut r1 = Complex64::new(0.0, 0.0);
    for (g, gr) in s.grad.iter().zip(&s.grad_rho) {
        // grad |u|^6 = 3 rho^2 grad rho.
        r1 += (0..n)
            .map(|j| g[j] * (s.u[j] * (3.0 * s.rho[j] * s.rho[j] * gr[j])).conj())
            .sum::<Complex64>();
    }
    let r1 = -2.0 * lambda * lambda * r1.im * c;
    let r2 = 0.75 * lambda * (0..n).map(|j| s.grad_rho_sq[j] * dt.a[j]).sum::<f64>() * c;
    let grad_u_sq: Vec<f64> = (0..n).map(|j| s.grad.iter().map(|g| g[j].norm_sqr()).sum()).collect();
    let r3 = 2.0 * lambda * (0..n).map(|j| grad_u_sq[j] * dt.c3[j]).sum::<f64>() * c;
    Ok(TermBreakdown::new(
        vec![("im_grad_septic", r1), ("density_dt_modulus", r2), ("grad_dt_cube", r3)],
        0.0,
    ))
}

/// Right-hand side of `d/dt (F(u) + ||u||^2)` for the half-wave equation, seven terms.
pub fn lemma_rhs_hw(u: &Field, lambda: f64, eps_reg: f64) -> Result<TermBreakdown> {
    let s = HwState::new(u, lambda)?;
    let g = s.grid;
    let c = s.cell;
    let n = s.u.len();
    let i = Complex64::i();
    let ut: Vec<Complex64> = (0..n).map(|j| -i * (s.du[j] + lambda * s.quartic[j])).collect();
    let ut_bar: Vec<Complex64> = ut.iter().map(|v| v.conj()).collect();
    let dt = TimeDerivatives::new(&s.u, &s.a, &ut, eps_reg);
    let half = |v: &[Complex64]| symbol(&g, v, f64::sqrt);
    let real = |v: &[f64]| -> Vec<Complex64> { v.iter().map(|&x| Complex64::new(x, 0.0)).collect() };
    let mut imag = Realness::default();

    let septic: Vec<Complex64> = (0..n).map(|j| s.u[j] * s.rho[j].powi(3)).collect();
    let t1 = -2.0 * lambda * lambda * pair(&s.du, &septic, c).im;

    let t2 = 2.0 * lambda * (0..n).map(|j| s.a_u[j].norm_sqr() * dt.c3[j]).sum::<f64>() * c;

    let a_drho = half(&real(&dt.rho));
    let a_ut = half(&ut);
    let a_ut_bar = half(&ut_bar);
    let x3: Vec<Complex64> = (0..n)
        .map(|j| {
            a_drho[j]
                - (ut_bar[j] * s.a_u[j] + s.u[j].conj() * a_ut[j])
                - (ut[j] * s.a_ubar[j] + s.u[j] * a_ut_bar[j])
        })
        .collect();
    let t3 = lambda * imag.pair(&x3, &s.a_c3, c);

    let u_dc3: Vec<Complex64> = (0..n).map(|j| s.u[j] * dt.c3[j]).collect();
    let a_u_dc3 = half(&u_dc3);
    let a_dc3 = half(&real(&dt.c3));
    let y4: Vec<Complex64> = (0..n)
        .map(|j| a_u_dc3[j] - s.a_u[j] * dt.c3[j] - s.u[j] * a_dc3[j])
        .collect();
    let t4 = 2.0 * lambda * re_pair(&s.a_u, &y4, c);

    let t5 = -0.75 * lambda * (0..n).map(|j| s.a_rho[j].norm_sqr() * dt.a[j]).sum::<f64>() * c;

    let a_a = half(&real(&s.a));
    let x6: Vec<Complex64> = (0..n).map(|j| a_a[j] * dt.rho[j]).collect();
    let t6 = 1.5 * lambda * imag.pair(&s.a_rho, &x6, c);

    let drho_a: Vec<f64> = (0..n).map(|j| dt.rho[j] * s.a[j]).collect();
    let a_drho_a = half(&real(&drho_a));
    let x7: Vec<Complex64> = (0..n)
        .map(|j| a_drho_a[j] - s.a[j] * a_drho[j] - dt.rho[j] * a_a[j])
        .collect();
    let t7 = 1.5 * lambda * imag.pair(&s.a_rho, &x7, c);

    Ok(TermBreakdown::new(
        vec![
            ("im_d_septic", t1),
            ("half_u_sq_dt_cube", t2),
            ("commutator_dt", t3),
            ("commutator_product", t4),
            ("half_density_sq_dt_modulus", t5),
            ("half_density_half_modulus", t6),
            ("commutator_density", t7),
        ],
        imag.0,
    ))
}

/// The identity right-hand side matching the problem kind.
pub fn lemma_rhs(u: &Field, problem: &EvolutionProblem, eps_reg: f64) -> Result<TermBreakdown> {
    problem.grid.ensure_same(u.grid())?;
    match problem.kind {
        EquationKind::Nls2d => lemma_rhs_nls(u, problem.lambda(), eps_reg),
        EquationKind::HalfWave1d => lemma_rhs_hw(u, problem.lambda(), eps_reg),
    }
}

/// Upper bound shape for `d/dt (E + mass)` on NLS trajectories, `U = sup ||u||_{H^1}`:
/// `U^8 ln^3(2 + h2) + U^3 ||Delta u||^2 ln(2 + h2) + U^2 + U ||Delta u||^2`.
pub fn nls_bound(u_sup: f64, h2: f64, lap_sq: f64) -> f64 {
    let l = (2.0 + h2).ln();
    u_sup.powi(8) * l.powi(3) + u_sup.powi(3) * lap_sq * l + u_sup * u_sup + u_sup * lap_sq
}

/// Upper bound shape for `d/dt (F + mass)` on half-wave trajectories, `U = sup ||u||_{H^{1/2}}`:
/// `(1 + U)^6 ||u||_{H^1}^2 ln(2 + ||u||_{H^1})`.
pub fn hw_bound(u_sup: f64, h1: f64) -> f64 {
    (1.0 + u_sup).powi(6) * h1 * h1 * (2.0 + h1).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub time: f64,
    /// Central difference of `modified energy + mass`.
    pub lhs: f64,
    pub rhs: f64,
    pub terms: Vec<(String, f64)>,
    /// `|lhs - rhs|`.
    pub residual: f64,
    /// `|lhs - rhs| / (|lhs| + |rhs| + 1)`.
    pub relative_residual: f64,
    pub max_imag: f64,
    /// Value of the growth-bound shape at this sample, with the running supremum as `U`.
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityConfig {
    pub dt_fd: f64,
    /// Regularization of `d/dt |u|` relative to `max|u|`.
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

fn default_eps_rel() -> f64 {
    1e-8
}

impl IdentityConfig {
    pub fn new(dt_fd: f64) -> Self {
        IdentityConfig {
            dt_fd,
            eps_rel: default_eps_rel(),
        }
    }
}

/// Residual series and the underlying trajectory.
#[derive(Clone, Debug)]
pub struct IdentityRun {
    pub residuals: Vec<IdentityResidual>,
    pub log: TrajectoryLog,
}

impl IdentityRun {
    pub fn max_relative_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.relative_residual).fold(0.0, f64::max)
    }

    pub fn bound_statistics(&self) -> BoundStatistics {
        BoundStatistics::from_residuals(&self.residuals)
    }

    /// CSV: time, lhs, rhs, residual, then one column per term.
    pub fn to_csv(&self) -> String {
        residuals_csv(&self.residuals)
    }
}

pub fn residuals_csv(residuals: &[IdentityResidual]) -> String {
    let mut out = String::from("time,lhs,rhs,residual,relative_residual,bound");
    if let Some(first) = residuals.first() {
        for (name, _) in &first.terms {
            out.push(',');
            out.push_str(name);
        }
    }
    out.push('\n');
    for r in residuals {
        out.push_str(&format!("{},{},{},{},{},{}", r.time, r.lhs, r.rhs, r.residual, r.relative_residual, r.bound));
        for (_, v) in &r.terms {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

/// Evolves `phi` and compares the central difference of `G = modified energy + mass`
/// (from single Strang steps of `+-dt_fd` off each sampled state) against the identity
/// right-hand side.
pub fn identity_check(
    problem: &EvolutionProblem,
    phi: &Field,
    cfg: &StepperConfig,
    id: &IdentityConfig,
) -> Result<IdentityRun> {
    if !(id.dt_fd > 0.0 && id.dt_fd.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt_fd must be positive, got {}", id.dt_fd)));
    }
    if !(id.eps_rel >= 0.0) {
        return Err(Error::InvalidArgument("eps_rel must be >= 0".into()));
    }
    let mut states = Vec::new();
    let mut calls = 0usize;
    let log = evolve_observed(problem, phi, cfg, &[], |t, u| {
        if calls.is_multiple_of(cfg.log_every) || t == cfg.horizon {
            states.push(u.clone());
        }
        calls += 1;
    })?;
    debug_assert_eq!(states.len(), log.reports.len());

    let g = |u: &Field| -> Result<f64> { Ok(modified_energy(u, problem)?.total + sobolev_norm(u, 0.0)?.powi(2)) };
    let mut residuals = Vec::with_capacity(states.len());
    for (k, u) in states.iter().enumerate() {
        let plus = strang_step(u, problem, id.dt_fd)?;
        let minus = strang_step(u, problem, -id.dt_fd)?;
        let lhs = (g(&plus)? - g(&minus)?) / (2.0 * id.dt_fd);
        let rhs = lemma_rhs(u, problem, id.eps_rel * u.max_modulus())?;
        let bound = match problem.kind {
            EquationKind::Nls2d => {
                let lap_sq = seminorm(u, 2.0)?.powi(2);
                nls_bound(log.sup_h1[k], log.reports[k].h2.unwrap_or(0.0), lap_sq)
            }
            EquationKind::HalfWave1d => hw_bound(log.sup_h_half[k], log.reports[k].h1),
        };
        let residual = (lhs - rhs.total).abs();
        residuals.push(IdentityResidual {
            time: log.times[k],
            lhs,
            rhs: rhs.total,
            residual,
            relative_residual: residual / (lhs.abs() + rhs.total.abs() + 1.0),
            max_imag: rhs.max_imag,
            terms: rhs.terms,
            bound,
        });
    }
    Ok(IdentityRun { residuals, log })
}

/// Ratio statistics of measured `d/dt (modified energy + mass)` against the bound shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundStatistics {
    pub samples: usize,
    /// `sup lhs / bound`; the smallest constant making the bound hold on these samples.
    pub sup_ratio: f64,
    pub mean_abs_ratio: f64,
}

impl BoundStatistics {
    pub fn from_residuals(rs: &[IdentityResidual]) -> Self {
        let ratios: Vec<f64> = rs
            .iter()
            .filter(|r| r.bound > 0.0)
            .map(|r| r.lhs / r.bound)
            .collect();
        let n = ratios.len();
        BoundStatistics {
            samples: n,
            sup_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max).max(0.0),
            mean_abs_ratio: if n == 0 { 0.0 } else { ratios.iter().map(|r| r.abs()).sum::<f64>() / n as f64 },
        }
    }

    pub fn merge(stats: &[BoundStatistics]) -> Self {
        let n: usize = stats.iter().map(|s| s.samples).sum();
        BoundStatistics {
            samples: n,
            sup_ratio: stats.iter().map(|s| s.sup_ratio).fold(0.0, f64::max),
            mean_abs_ratio: if n == 0 {
                0.0
            } else {
                stats.iter().map(|s| s.mean_abs_ratio * s.samples as f64).sum::<f64>() / n as f64
            },
        }
    }
}

/// `||u||_{H^2}^2` against `E(u) + ||u||^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoercivityProbe {
    pub h2_sq: f64,
    pub bound: f64,
    /// `h2_sq / bound`, reported as 1 when both vanish.
    pub ratio: f64,
}

pub fn coercivity_probe(u: &Field, lambda: f64) -> Result<CoercivityProbe> {
    let h2_sq = sobolev_norm(u, 2.0)?.powi(2);
    let bound = modified_energy_nls(u, lambda)? + sobolev_norm(u, 0.0)?.powi(2);
    let ratio = if h2_sq == 0.0 && bound == 0.0 { 1.0 } else { h2_sq / bound };
    Ok(CoercivityProbe { h2_sq, bound, ratio })
}

struct NlsState {
    cell: f64,
    u: Vec<Complex64>,
    rho: Vec<f64>,
    a: Vec<f64>,
    lap: Vec<Complex64>,
    quartic: Vec<Complex64>,
    grad: Vec<Vec<Complex64>>,
    grad_rho: Vec<Vec<f64>>,
    grad_rho_sq: Vec<f64>,
}

impl NlsState {
    fn new(u: &Field, lambda: f64) -> Result<Self> {
        if u.grid().dimension() != 2 {
            return Err(Error::Unsupported("the NLS modified energy needs a 2D grid".into()));
        }
        let _ = lambda;
        let fine = u.refine(OVERSAMPLE)?;
        let grid = *fine.grid();
        let v = fine.into_values();
        let rho: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let a: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
        let lap = symbol(&grid, &v, |k| -k * k);
        let quartic = v.iter().map(|&z| quartic(z)).collect();
        let grad: Vec<Vec<Complex64>> = (0..2).map(|ax| transform::partial(&grid, &v, ax)).collect();
        // grad |u|^2 = 2 Re(conj(u) grad u); exact on walls where u = 0.
        let grad_rho: Vec<Vec<f64>> = grad
            .iter()
            .map(|g| g.iter().zip(&v).map(|(d, z)| 2.0 * (z.conj() * d).re).collect())
            .collect();
        let grad_rho_sq = (0..v.len()).map(|j| grad_rho[0][j].powi(2) + grad_rho[1][j].powi(2)).collect();
        Ok(NlsState {
            cell: grid.cell_volume(),
            u: v,
            rho,
            a,
            lap,
            quartic,
            grad,
            grad_rho,
            grad_rho_sq,
        })
    }
}

struct HwState {
    grid: Grid,
    cell: f64,
    u: Vec<Complex64>,
    rho: Vec<f64>,
    a: Vec<f64>,
    ux: Vec<Complex64>,
    du: Vec<Complex64>,
    quartic: Vec<Complex64>,
    a_u: Vec<Complex64>,
    a_ubar: Vec<Complex64>,
    a_rho: Vec<Complex64>,
    a_c3: Vec<Complex64>,
}

impl HwState {
    fn new(u: &Field, lambda: f64) -> Result<Self> {
        if u.grid().dimension() != 1 || u.grid().is_dirichlet() {
            return Err(Error::Unsupported("the half-wave modified energy needs a 1D periodic grid".into()));
        }
        let _ = lambda;
        let fine = u.refine(OVERSAMPLE)?;
        let grid = *fine.grid();
        let v = fine.into_values();
        let rho: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
        let a: Vec<f64> = rho.iter().map(|r| r.sqrt()).collect();
        let ubar: Vec<Complex64> = v.iter().map(|z| z.conj()).collect();
        let to_c = |x: &[f64]| -> Vec<Complex64> { x.iter().map(|&r| Complex64::new(r, 0.0)).collect() };
        let c3: Vec<f64> = a.iter().map(|x| x * x * x).collect();
        Ok(HwState {
            cell: grid.cell_volume(),
            ux: transform::partial(&grid, &v, 0),
            du: symbol(&grid, &v, |k| k),
            quartic: v.iter().map(|&z| quartic(z)).collect(),
            a_u: symbol(&grid, &v, f64::sqrt),
            a_ubar: symbol(&grid, &ubar, f64::sqrt),
            a_rho: symbol(&grid, &to_c(&rho), f64::sqrt),
            a_c3: symbol(&grid, &to_c(&c3), f64::sqrt),
            grid,
            u: v,
            rho,
            a,
        })
    }
}

/// Time derivatives of `|u|^2`, `|u|` (regularized) and `|u|^3` given `u_t`.
struct TimeDerivatives {
    rho: Vec<f64>,
    a: Vec<f64>,
    c3: Vec<f64>,
}

impl TimeDerivatives {
    fn new(u: &[Complex64], a: &[f64], ut: &[Complex64], eps: f64) -> Self {
        let re: Vec<f64> = u.iter().zip(ut).map(|(z, w)| (z.conj() * w).re).collect();
        TimeDerivatives {
            rho: re.iter().map(|r| 2.0 * r).collect(),
            a: re.iter().zip(a).map(|(r, m)| r / (m * m + eps * eps).sqrt().max(f64::MIN_POSITIVE)).collect(),
            c3: re.iter().zip(a).map(|(r, m)| 3.0 * m * r).collect(),
        }
    }
}

/// Applies the radial symbol `m(|k|)` to raw samples on `grid`.
fn symbol(grid: &Grid, v: &[Complex64], m: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let mut data = v.to_vec();
    transform::forward(grid, &mut data);
    for (i, c) in data.iter_mut().enumerate() {
        *c *= m(grid.wavenumber_sq(i).sqrt());
    }
    transform::inverse(grid, &mut data);
    data
}

fn pair(f: &[Complex64], g: &[Complex64], cell: f64) -> Complex64 {
    crate::norms::pair(f, g, cell)
}

fn re_pair(f: &[Complex64], g: &[Complex64], cell: f64) -> f64 {
    pair(f, g, cell).re
}

/// Tracks the relative imaginary part of pairings that are real in exact arithmetic.
#[derive(Default)]
struct Realness(f64);

impl Realness {
    fn pair(&mut self, f: &[Complex64], g: &[Complex64], cell: f64) -> f64 {
        let p = pair(f, g, cell);
        let nf: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        let ng: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let scale = (nf * ng).sqrt() * cell;
        if scale > 0.0 {
            self.0 = self.0.max(p.im.abs() / scale);
        }
        p.re
    }
}
