//! Ground states of `L u = u^p` by Petviashvili iteration, where `L = |D| + 1` (half-wave) or
//! `-Delta + 1` (NLS), together with the Gagliardo-Nirenberg constant they realize and the
//! threshold quantities derived from it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EquationKind;
use crate::field::Field;
use crate::grid::Grid;
use crate::multiplier::Multiplier;
use crate::nonlinear::{nonlinear_sample, Sampling};
use crate::norms::{lebesgue_norm, seminorm, sobolev_norm};

#[derive(Clone, Debug)]
pub struct GroundStateProblem {
    kind: EquationKind,
    linear_op: Multiplier,
    power: u32,
    grid: Grid,
}

impl GroundStateProblem {
    /// `|D| R + R = R^p` on a 1D grid, or `-Delta Q + Q = Q^p` on a 2D grid.
    pub fn new(kind: EquationKind, grid: Grid, power: u32) -> Result<Self> {
        let op = match kind {
            EquationKind::HalfWave1d => Multiplier::half_wave_operator(),
            EquationKind::Nls2d => Multiplier::schrodinger_operator(),
        };
        Self::with_operator(kind, op, grid, power)
    }

    pub fn with_operator(kind: EquationKind, linear_op: Multiplier, grid: Grid, power: u32) -> Result<Self> {
        let dim = match kind {
            EquationKind::HalfWave1d => 1,
            EquationKind::Nls2d => 2,
        };
        if grid.dimension() != dim {
            return Err(Error::Unsupported(format!("{kind:?} ground states need a {dim}D grid")));
        }
        if power < 2 {
            return Err(Error::InvalidArgument(format!("power must be >= 2, got {power}")));
        }
        let table = linear_op.table(&grid)?;
        if let Some(m) = table.iter().copied().find(|m| !(*m >= 1.0)) {
            return Err(Error::InvalidArgument(format!(
                "linear operator `{}` must be >= 1 on the grid, found {m}",
                linear_op.description()
            )));
        }
        Ok(GroundStateProblem {
            kind,
            linear_op,
            power,
            grid,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn kind(&self) -> EquationKind {
        self.kind
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// Unit Gaussian `exp(-|x|^2)`.
    pub fn default_seed(&self) -> Field {
        Field::from_real_fn(self.grid, |x, y| (-(x * x + y * y)).exp())
    }

    fn nonlinearity(&self, u: Complex64) -> Complex64 {
        u * u.norm().powi(self.power as i32 - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Stabilizer exponent; `p / (p - 1)` when absent.
    #[serde(default)]
    pub gamma: Option<f64>,
    /// Sampling of `u^p`. Collocation makes the profile a discrete stationary state of the split-step flow.
    #[serde(default = "direct", with = "sampling_serde")]
    pub sampling: Sampling,
}

fn direct() -> Sampling {
    Sampling::Direct
}

mod sampling_serde {
    use super::Sampling;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Sampling, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(match s {
            Sampling::Direct => "direct",
            Sampling::Oversampled => "oversampled",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Sampling, D::Error> {
        match String::deserialize(de)?.as_str() {
            "direct" => Ok(Sampling::Direct),
            "oversampled" => Ok(Sampling::Oversampled),
            other => Err(serde::de::Error::custom(format!("unknown sampling `{other}`"))),
        }
    }
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        GroundStateOptions {
            tol: 1e-10,
            max_iter: 1000,
            gamma: None,
            sampling: Sampling::Direct,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub kind: EquationKind,
    pub power: u32,
    pub profile: Field,
    /// `||L u - u^p||_{L^2}`.
    pub residual: f64,
    pub iterations: usize,
    /// `||u||_{L^2}` (not squared).
    pub mass: f64,
    /// `|||D|^{1/2} u||_{L^2}` in 1D, `||grad u||_{L^2}` in 2D.
    pub kinetic_norm: f64,
    pub l5_norm: f64,
    /// Set for `p = 4`, where the profile optimizes the quintic Gagliardo-Nirenberg quotient.
    pub gn_constant: Option<f64>,
    /// Focusing energy `1/2 kinetic^2 - 1/5 ||u||_5^5`.
    pub energy: f64,
    pub residual_history: Vec<f64>,
    pub stabilizer_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl GroundStateResult {
    pub fn stabilizer(&self) -> Option<f64> {
        self.stabilizer_history.last().copied()
    }

    /// Norms and derived quantities, without the profile.
    pub fn summary(&self) -> GroundStateSummary {
        GroundStateSummary {
            kind: self.kind,
            power: self.power,
            grid: *self.profile.grid(),
            residual: self.residual,
            iterations: self.iterations,
            mass: self.mass,
            kinetic_norm: self.kinetic_norm,
            l5_norm: self.l5_norm,
            gn_constant: self.gn_constant,
            energy: self.energy,
            stabilizer: self.stabilizer(),
            pohozaev: pohozaev_check(self).ok(),
            threshold: threshold_quantities(self).ok(),
            warnings: self.warnings.clone(),
        }
    }

    /// Rebuilds a result from a stored profile, recomputing every norm from the samples.
    pub fn from_profile(kind: EquationKind, power: u32, profile: Field) -> Result<Self> {
        let problem = GroundStateProblem::new(kind, *profile.grid(), power)?;
        let residual = residual(&problem, &profile, Sampling::Direct)?;
        finish(&problem, profile, residual, 0, Vec::new(), Vec::new())
    }
}

/// JSON sidecar stored next to a serialized profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateSummary {
    pub kind: EquationKind,
    pub power: u32,
    pub grid: Grid,
    pub residual: f64,
    pub iterations: usize,
    pub mass: f64,
    pub kinetic_norm: f64,
    pub l5_norm: f64,
    pub gn_constant: Option<f64>,
    pub energy: f64,
    pub stabilizer: Option<f64>,
    pub pohozaev: Option<[f64; 2]>,
    pub threshold: Option<ThresholdQuantities>,
    pub warnings: Vec<String>,
}

/// Runs `u <- S^gamma L^{-1}(u^p)` with `S = (L u, u) / (u^p, u)` until `||L u - u^p|| < tol`,
/// replacing each iterate by its even part.
pub fn petviashvili(problem: &GroundStateProblem, seed: &Field, opts: &GroundStateOptions) -> Result<GroundStateResult> {
    problem.grid.ensure_same(seed.grid())?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol must be positive, got {}", opts.tol)));
    }
    let max = seed.max_modulus();
    if !(max > 0.0) || !seed.is_finite() {
        return Err(Error::InvalidArgument("seed must be finite and nonzero".into()));
    }
    check_real(seed, max)?;
    let p = problem.power as f64;
    let gamma = opts.gamma.unwrap_or(p / (p - 1.0));
    let table = problem.linear_op.table(&problem.grid)?;

    let mut u = seed.map(|v| Complex64::new(v.re, 0.0)).even_part();
    let mut residuals = Vec::new();
    let mut stabilizers = Vec::new();
    for it in 1..=opts.max_iter {
        let up = nonlinear_sample(&u, |v| problem.nonlinearity(v), opts.sampling)?;
        let uh = u.spectrum();
        let uph = up.spectrum();
        let num: f64 = uh.coeffs().iter().zip(&table).map(|(c, m)| m * c.norm_sqr()).sum();
        let den: f64 = uph.coeffs().iter().zip(uh.coeffs()).map(|(a, b)| (a * b.conj()).re).sum();
        let s = num / den;
        if !s.is_finite() || s <= 0.0 {
            return Err(diverged(it, residuals, "stabilizing factor left (0, inf)"));
        }
        stabilizers.push(s);
        let factor = s.powf(gamma);
        let mut next = uph.scale_by(|i| Complex64::new(factor / table[i], 0.0)).into_field();
        let peak = next.max_modulus();
        check_real(&next, peak)?;
        next = next.map(|v| Complex64::new(v.re, 0.0)).even_part();
        u = clamp_negatives(&next);
        let r = residual(problem, &u, opts.sampling)?;
        residuals.push(r);
        if !r.is_finite() {
            return Err(diverged(it, residuals, "non-finite residual"));
        }
        if r < opts.tol {
            return finish(problem, u, r, it, residuals, stabilizers);
        }
    }
    let last = residuals.last().copied().unwrap_or(f64::NAN);
    log::warn!("Petviashvili stopped at residual {last:e}");
    Err(Error::Divergence {
        iterations: opts.max_iter,
        residual: last,
        residual_history: residuals,
    })
}

fn diverged(iterations: usize, history: Vec<f64>, why: &str) -> Error {
    log::warn!("Petviashvili diverged: {why}");
    Error::Divergence {
        iterations,
        residual: history.last().copied().unwrap_or(f64::NAN),
        residual_history: history,
    }
}

fn check_real(f: &Field, peak: f64) -> Result<()> {
    let imag = f.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    if imag > 1e-8 * peak {
        return Err(Error::NonRealDrift { imag: imag / peak });
    }
    Ok(())
}

/// Zeroes negative samples at rounding level; larger negatives are kept so they stay visible.
/// A coarser floor would keep overwriting exponentially small tails and stall the residual.
fn clamp_negatives(f: &Field) -> Field {
    let floor = -1e-13 * f.max_modulus();
    f.map(|v| if v.re < 0.0 && v.re > floor { Complex64::new(0.0, 0.0) } else { v })
}

/// `||L u - u^p||_{L^2}`.
pub fn residual(problem: &GroundStateProblem, u: &Field, sampling: Sampling) -> Result<f64> {
    let table = problem.linear_op.table(&problem.grid)?;
    let lu = u.spectrum().scale_by(|i| Complex64::new(table[i], 0.0)).into_field();
    let up = nonlinear_sample(u, |v| problem.nonlinearity(v), sampling)?;
    sobolev_norm(&(&lu - &up), 0.0)
}

fn finish(
    problem: &GroundStateProblem,
    profile: Field,
    residual: f64,
    iterations: usize,
    residual_history: Vec<f64>,
    stabilizer_history: Vec<f64>,
) -> Result<GroundStateResult> {
    let mass = sobolev_norm(&profile, 0.0)?;
    let kinetic_norm = match problem.kind {
        EquationKind::HalfWave1d => seminorm(&profile, 0.5)?,
        EquationKind::Nls2d => seminorm(&profile, 1.0)?,
    };
    let l5_norm = lebesgue_norm(&profile, 5.0)?;
    let gn_constant = if problem.power == 4 {
        Some(l5_norm / (kinetic_norm.powf(0.6) * mass.powf(0.4)))
    } else {
        None
    };
    let energy = 0.5 * kinetic_norm * kinetic_norm - l5_norm.powi(5) / 5.0;
    let warnings = decay_warnings(&profile);
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(GroundStateResult {
        kind: problem.kind,
        power: problem.power,
        profile,
        residual,
        iterations,
        mass,
        kinetic_norm,
        l5_norm,
        gn_constant,
        energy,
        residual_history,
        stabilizer_history,
        warnings,
    })
}

/// Flags profiles not yet below `1e-4 max` at distance `L/2` along the axes.
fn decay_warnings(profile: &Field) -> Vec<String> {
    let g = profile.grid();
    let n = g.points();
    let peak = profile.max_modulus();
    let v = profile.values();
    let (quarter, center) = (n / 4, n / 2);
    let probes: Vec<usize> = if g.dimension() == 1 {
        vec![quarter, 3 * quarter]
    } else {
        vec![quarter * n + center, 3 * quarter * n + center, center * n + quarter, center * n + 3 * quarter]
    };
    let worst = probes.iter().map(|&i| v[i].norm()).fold(0.0, f64::max);
    if worst > 1e-4 * peak {
        vec![format!(
            "profile at |x| = L/2 is {:.3e} of its maximum (above 1e-4); enlarge the box",
            worst / peak
        )]
    } else {
        Vec::new()
    }
}

/// `C_GN = ||u||_5 / (kinetic^{3/5} ||u||^{2/5})` for the quartic ground state.
pub fn gn_constant(r: &GroundStateResult) -> Result<f64> {
    if r.power != 4 {
        return Err(Error::InvalidArgument("the GN constant is defined for p = 4".into()));
    }
    if !(r.kinetic_norm > 0.0 && r.mass > 0.0) {
        return Err(Error::InvalidArgument("GN constant of a zero profile".into()));
    }
    Ok(r.l5_norm / (r.kinetic_norm.powf(0.6) * r.mass.powf(0.4)))
}

/// `(3 C^5 ||u||^2 kinetic, 2 C^5 kinetic^3)`; both equal 5 at the ground state.
pub fn pohozaev_check(r: &GroundStateResult) -> Result<[f64; 2]> {
    let c5 = gn_constant(r)?.powi(5);
    Ok([3.0 * c5 * r.mass * r.mass * r.kinetic_norm, 2.0 * c5 * r.kinetic_norm.powi(3)])
}

/// `f(x) = x^2 / 2 - C^5 x^3 / 5`.
pub fn threshold_profile(x: f64, c5: f64) -> f64 {
    0.5 * x * x - c5 * x * x * x / 5.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdQuantities {
    /// `kinetic * ||u||^2`.
    pub x_crit: f64,
    /// `energy * ||u||^4`.
    pub e_crit: f64,
    /// Critical point `5 / (3 C^5)` of `f`.
    pub x_max: f64,
    pub f_at_xmax: f64,
}

pub fn threshold_quantities(r: &GroundStateResult) -> Result<ThresholdQuantities> {
    let c5 = gn_constant(r)?.powi(5);
    let x_max = 5.0 / (3.0 * c5);
    Ok(ThresholdQuantities {
        x_crit: r.kinetic_norm * r.mass * r.mass,
        e_crit: r.energy * r.mass.powi(4),
        x_max,
        f_at_xmax: threshold_profile(x_max, c5),
    })
}

/// Quintic Gagliardo-Nirenberg quotient `||f||_5 / (kinetic^{3/5} ||f||^{2/5})`, with the
/// kinetic norm `|||D|^{1/2} f||` in 1D and `||grad f||` in 2D.
pub fn gn_quotient(f: &Field) -> Result<f64> {
    let s = if f.grid().dimension() == 1 { 0.5 } else { 1.0 };
    let k = seminorm(f, s)?;
    let m = sobolev_norm(f, 0.0)?;
    if !(k > 0.0 && m > 0.0) {
        return Err(Error::InvalidArgument("GN quotient of a field with zero norm".into()));
    }
    Ok(lebesgue_norm(f, 5.0)? / (k.powf(0.6) * m.powf(0.4)))
}

/// Spectral-residual check of a candidate profile with no iteration.
pub fn candidate_residual(problem: &GroundStateProblem, candidate: &Field) -> Result<f64> {
    problem.grid.ensure_same(candidate.grid())?;
    residual(problem, candidate, Sampling::Direct)
}
