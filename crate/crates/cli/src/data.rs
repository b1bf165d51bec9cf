//! Construction of initial data and reference ground states on an experiment grid.

use std::path::Path;

use anyhow::{bail, Context, Result};

use dispersive_core::ground_state::{petviashvili, GroundStateOptions, GroundStateProblem, GroundStateResult};
use dispersive_core::probe::FunctionFamily;
use dispersive_core::{io, Complex64, EquationKind, Field, Grid};

use crate::config::InitialData;

pub fn load_field(path: &Path, grid: &Grid) -> Result<Field> {
    let f = io::load(path).with_context(|| format!("loading field {}", path.display()))?;
    if !f.grid().same_as(grid) {
        bail!("field in {} lives on {:?}, expected {:?}", path.display(), f.grid(), grid);
    }
    Ok(f)
}

/// Quartic ground state solved on `grid` from the default seed, or rebuilt from a stored profile.
pub fn ground_state(kind: EquationKind, grid: &Grid, path: Option<&Path>) -> Result<GroundStateResult> {
    match path {
        Some(p) => Ok(GroundStateResult::from_profile(kind, 4, load_field(p, grid)?)?),
        None => {
            let problem = GroundStateProblem::new(kind, *grid, 4)?;
            Ok(petviashvili(&problem, &problem.default_seed(), &GroundStateOptions::default())
                .context("solving for the reference ground state")?)
        }
    }
}

/// Builds the datum. `cache` holds a ground state already solved on this grid, reused for
/// unscaled `ground_state` entries without a path.
pub fn build(data: &InitialData, kind: EquationKind, grid: &Grid, cache: Option<&GroundStateResult>) -> Result<Field> {
    Ok(match data {
        InitialData::Zero => Field::zeros(*grid),
        InitialData::Gaussian {
            amplitude,
            width,
            center,
            wavenumber,
        } => {
            let (a, w, c, k) = (*amplitude, *width, *center, *wavenumber);
            if !(w > 0.0) {
                bail!("gaussian width must be positive");
            }
            let two_d = grid.dimension() == 2;
            Field::from_fn(*grid, |x, y| {
                let (dx, dy) = (x - c[0], if two_d { y - c[1] } else { 0.0 });
                let phase = k[0] * x + if two_d { k[1] * y } else { 0.0 };
                Complex64::from_polar(a * (-(dx * dx + dy * dy) / (w * w)).exp(), phase)
            })
        }
        InitialData::Random {
            seed,
            cutoff,
            decay,
            amplitude,
        } => {
            let family = FunctionFamily::BandlimitedRandom {
                seed: *seed,
                count: 1,
                cutoff: *cutoff,
                decay: *decay,
                amplitude: *amplitude,
            };
            family.member(grid, 0)?.0
        }
        InitialData::GroundState { scale, path } => {
            let profile = match (path, cache) {
                (Some(p), _) => load_field(p, grid)?,
                (None, Some(r)) => r.profile.clone(),
                (None, None) => ground_state(kind, grid, None)?.profile,
            };
            profile.scale(*scale)
        }
        InitialData::File { path, scale } => load_field(path, grid)?.scale(*scale),
        InitialData::Sum { terms } => {
            let mut acc = Field::zeros(*grid);
            for t in terms {
                acc = acc.zip_with(&build(t, kind, grid, cache)?, |a, b| a + b)?;
            }
            acc
        }
    })
}
