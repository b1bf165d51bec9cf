//! Pseudospectral laboratory for the quartic Schrodinger equation
//! `i u_t + Delta u = lambda u |u|^3` in two dimensions and the quartic half-wave equation
//! `i u_t - |D| u = lambda u |u|^3` on the line.
//!
//! Fields live on uniform grids: periodic tori in one or two dimensions, or a Dirichlet
//! square handled with sine transforms. On top of the spectral substrate the crate provides
//! split-step evolution, conserved and modified energies with a finite-difference identity
//! checker, Petviashvili ground states, numerical probes of functional inequalities, and the
//! threshold dichotomy for focusing data below the ground state.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dichotomy;
pub mod energies;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod ground_state;
pub mod io;
pub mod multiplier;
pub mod nonlinear;
pub mod norms;
pub mod probe;
pub mod transform;

pub use energies::{EnergyReport, IdentityResidual, Monitor};
pub use error::{Error, Result};
pub use evolution::{Coupling, EquationKind, EvolutionProblem, StepperConfig, TrajectoryLog};
pub use field::{Field, Spectrum};
pub use grid::{Boundary, Grid};
pub use multiplier::{apply_multiplier, Multiplier};
pub use nonlinear::{nonlinear_sample, Sampling};
pub use norms::{inner, lebesgue_norm, seminorm, sobolev_norm};
pub use num_complex::Complex64;
