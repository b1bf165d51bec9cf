//! Python module `dispersive`: grids, fields, evolution, energies, ground states, inequality
//! probes and the threshold dichotomy. Structured results come back as plain dicts.

use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use dispersive_core::dichotomy::{check_conditions, run_trap_experiment};
use dispersive_core::energies::{conserved_energy as core_conserved, identity_check as core_identity, modified_energy as core_modified, IdentityConfig};
use dispersive_core::evolution::evolve as core_evolve;
use dispersive_core::ground_state::{petviashvili, GroundStateOptions, GroundStateProblem, GroundStateResult};
use dispersive_core::probe::{refinement_check, run_ensemble, FunctionFamily, ProbeKind};
use dispersive_core::{
    io, lebesgue_norm, sobolev_norm, Boundary, Complex64, Coupling, EquationKind, Error, EvolutionProblem, Field, Grid,
    Monitor, StepperConfig,
};

create_exception!(dispersive, BlowUpError, PyRuntimeError, "Evolution aborted on a non-finite state or norm ceiling.");
create_exception!(dispersive, DivergenceError, PyRuntimeError, "Petviashvili iteration did not converge.");

fn err(e: Error) -> PyErr {
    match e {
        Error::BlowUpSuspected { .. } => BlowUpError::new_err(e.to_string()),
        Error::Divergence { .. } => DivergenceError::new_err(e.to_string()),
        Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

fn equation(kind: &str) -> PyResult<EquationKind> {
    serde_json::from_value(serde_json::Value::String(kind.into()))
        .map_err(|_| PyValueError::new_err(format!("equation must be 'nls2d' or 'half_wave1d', got '{kind}'")))
}

fn coupling(lambda: i32) -> PyResult<Coupling> {
    Coupling::try_from(lambda).map_err(PyValueError::new_err)
}

fn problem(kind: &str, lambda: i32, grid: Grid) -> PyResult<EvolutionProblem> {
    EvolutionProblem::new(equation(kind)?, coupling(lambda)?, grid).map_err(err)
}

#[pyclass(name = "Grid", frozen, module = "dispersive")]
#[derive(Clone)]
struct PyGrid(Grid);

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (dimension, half_length, points, boundary = "periodic"))]
    fn new(dimension: usize, half_length: f64, points: usize, boundary: &str) -> PyResult<Self> {
        let b = Boundary::from_tag(boundary).ok_or_else(|| PyValueError::new_err(format!("unknown boundary '{boundary}'")))?;
        Grid::new(dimension, half_length, points, b).map(PyGrid).map_err(err)
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[getter]
    fn half_length(&self) -> f64 {
        self.0.half_length()
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.0.boundary().tag()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    /// Axis coordinates `x_j`.
    fn coordinates(&self) -> Vec<f64> {
        (0..self.0.points()).map(|j| self.0.coordinate(j)).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(dimension={}, half_length={}, points={}, boundary='{}')",
            self.0.dimension(),
            self.0.half_length(),
            self.0.points(),
            self.0.boundary().tag()
        )
    }
}

/// Complex samples on a grid, row-major in 2D.
#[pyclass(name = "Field", module = "dispersive")]
#[derive(Clone)]
struct PyField(Field);

#[pymethods]
impl PyField {
    #[new]
    fn new(grid: &PyGrid, values: Vec<Complex64>) -> PyResult<Self> {
        Field::new(grid.0, values).map(PyField).map_err(err)
    }

    #[staticmethod]
    fn from_real(grid: &PyGrid, values: Vec<f64>) -> PyResult<Self> {
        Field::from_real(grid.0, &values).map(PyField).map_err(err)
    }

    #[staticmethod]
    fn zeros(grid: &PyGrid) -> Self {
        PyField(Field::zeros(grid.0))
    }

    /// `amplitude * exp(-|x|^2 / width^2) * exp(i wavenumber x_1)`.
    #[staticmethod]
    #[pyo3(signature = (grid, amplitude = 1.0, width = 1.0, wavenumber = 0.0))]
    fn gaussian(grid: &PyGrid, amplitude: f64, width: f64, wavenumber: f64) -> Self {
        PyField(Field::from_fn(grid.0, |x, y| Complex64::from_polar(amplitude * (-(x * x + y * y) / (width * width)).exp(), wavenumber * x)))
    }

    /// `.csv` or binary by extension.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        io::load(&path).map(PyField).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        let bytes = io::to_bytes(&self.0, &path).map_err(err)?;
        std::fs::write(&path, bytes).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn values(&self) -> Vec<Complex64> {
        self.0.values().to_vec()
    }

    fn moduli(&self) -> Vec<f64> {
        self.0.moduli()
    }

    fn max_modulus(&self) -> f64 {
        self.0.max_modulus()
    }

    fn scale(&self, factor: f64) -> Self {
        PyField(self.0.scale(factor))
    }

    /// `||u||_{H^s}`.
    fn sobolev_norm(&self, s: f64) -> PyResult<f64> {
        sobolev_norm(&self.0, s).map_err(err)
    }

    /// `||u||_{L^p}`.
    fn lebesgue_norm(&self, p: f64) -> PyResult<f64> {
        lebesgue_norm(&self.0, p).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __add__(&self, other: &PyField) -> PyResult<Self> {
        self.0.zip_with(&other.0, |a, b| a + b).map(PyField).map_err(err)
    }
}

#[pyclass(name = "GroundState", frozen, module = "dispersive")]
struct PyGroundState(GroundStateResult);

#[pymethods]
impl PyGroundState {
    #[getter]
    fn profile(&self) -> PyField {
        PyField(self.0.profile.clone())
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn kinetic_norm(&self) -> f64 {
        self.0.kinetic_norm
    }

    #[getter]
    fn gn_constant(&self) -> Option<f64> {
        self.0.gn_constant
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }

    #[getter]
    fn residual_history(&self) -> Vec<f64> {
        self.0.residual_history.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.summary())
    }

    /// Rebuilds every derived quantity from a stored profile.
    #[staticmethod]
    #[pyo3(signature = (equation_kind, profile, power = 4))]
    fn from_profile(equation_kind: &str, profile: &PyField, power: u32) -> PyResult<Self> {
        GroundStateResult::from_profile(equation(equation_kind)?, power, profile.0.clone())
            .map(PyGroundState)
            .map_err(err)
    }
}

/// Petviashvili iteration from the default Gaussian seed (or `seed`).
#[pyfunction]
#[pyo3(signature = (equation_kind, grid, power = 4, tol = 1e-10, max_iter = 1000, seed = None))]
fn ground_state(py: Python<'_>, equation_kind: &str, grid: &PyGrid, power: u32, tol: f64, max_iter: usize, seed: Option<&PyField>) -> PyResult<PyGroundState> {
    let p = GroundStateProblem::new(equation(equation_kind)?, grid.0, power).map_err(err)?;
    let start = seed.map(|s| s.0.clone()).unwrap_or_else(|| p.default_seed());
    let opts = GroundStateOptions { tol, max_iter, ..GroundStateOptions::default() };
    py.allow_threads(|| petviashvili(&p, &start, &opts)).map(PyGroundState).map_err(err)
}

#[pyfunction]
fn conserved_energy(field: &PyField, equation_kind: &str, coupling_sign: i32) -> PyResult<f64> {
    core_conserved(&field.0, &problem(equation_kind, coupling_sign, *field.0.grid())?).map_err(err)
}

/// `(total, {term: value})`.
#[pyfunction]
fn modified_energy(field: &PyField, equation_kind: &str, coupling_sign: i32) -> PyResult<(f64, Vec<(String, f64)>)> {
    let b = core_modified(&field.0, &problem(equation_kind, coupling_sign, *field.0.grid())?).map_err(err)?;
    Ok((b.total, b.terms))
}

/// Returns `(final_state, log)` with the log as a dict of per-sample series.
#[pyfunction]
#[pyo3(signature = (equation_kind, coupling_sign, field, dt, horizon, log_every = 1, track_modified_energy = false))]
#[allow(clippy::too_many_arguments)]
fn evolve<'py>(
    py: Python<'py>,
    equation_kind: &str,
    coupling_sign: i32,
    field: &PyField,
    dt: f64,
    horizon: f64,
    log_every: usize,
    track_modified_energy: bool,
) -> PyResult<(PyField, Bound<'py, PyAny>)> {
    let p = problem(equation_kind, coupling_sign, *field.0.grid())?;
    let cfg = StepperConfig::new(dt, horizon, log_every).map_err(err)?;
    let monitors: &[Monitor] = if track_modified_energy { &[Monitor::ModifiedEnergy] } else { &[] };
    let phi = field.0.clone();
    let mut log = py.allow_threads(|| core_evolve(&p, &phi, &cfg, monitors)).map_err(err)?;
    let last = log.final_state.take().expect("evolve keeps the final state");
    Ok((PyField(last), to_py(py, &log)?))
}

/// Finite-difference check of the modified-energy identity along a trajectory.
#[pyfunction]
#[pyo3(signature = (equation_kind, coupling_sign, field, dt, horizon, dt_fd, log_every = 1))]
#[allow(clippy::too_many_arguments)]
fn identity_check<'py>(
    py: Python<'py>,
    equation_kind: &str,
    coupling_sign: i32,
    field: &PyField,
    dt: f64,
    horizon: f64,
    dt_fd: f64,
    log_every: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let p = problem(equation_kind, coupling_sign, *field.0.grid())?;
    let cfg = StepperConfig::new(dt, horizon, log_every).map_err(err)?;
    let phi = field.0.clone();
    let run = py.allow_threads(|| core_identity(&p, &phi, &cfg, &IdentityConfig::new(dt_fd))).map_err(err)?;
    to_py(
        py,
        &serde_json::json!({
            "max_relative_residual": run.max_relative_residual(),
            "bound_statistics": run.bound_statistics(),
            "residuals": run.residuals,
        }),
    )
}

/// Evaluates an inequality over a function family. Both descriptions are JSON, for example
/// `{"inequality": "gn", "which": "gn_l5"}` and `{"kind": "bandlimited_random", "seed": 1, "count": 50}`.
#[pyfunction]
#[pyo3(signature = (grid, probe_kind, family, refine = false))]
fn probe<'py>(py: Python<'py>, grid: &PyGrid, probe_kind: &str, family: &str, refine: bool) -> PyResult<Bound<'py, PyAny>> {
    let kind: ProbeKind = from_json(probe_kind, "probe")?;
    let fam: FunctionFamily = from_json(family, "family")?;
    let g = grid.0;
    let (report, refinement) = py
        .allow_threads(|| -> dispersive_core::Result<_> {
            let r = run_ensemble(&kind, &fam, &g)?;
            let f = if refine { Some(refinement_check(&kind, &fam, &g)?) } else { None };
            Ok((r, f))
        })
        .map_err(err)?;
    to_py(py, &serde_json::json!({ "report": report, "refinement": refinement }))
}

/// Energy and gradient conditions of `field` against a quartic ground state.
#[pyfunction]
fn threshold_verdict<'py>(py: Python<'py>, field: &PyField, reference: &PyGroundState) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &check_conditions(&field.0, &reference.0).map_err(err)?)
}

/// Evolves `field` and tracks the controlled quantity against the threshold.
#[pyfunction]
#[pyo3(signature = (field, reference, dt, horizon, coupling_sign = -1, tolerance = 1e-6))]
fn trap_experiment<'py>(
    py: Python<'py>,
    field: &PyField,
    reference: &PyGroundState,
    dt: f64,
    horizon: f64,
    coupling_sign: i32,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = EvolutionProblem::new(reference.0.kind, coupling(coupling_sign)?, *field.0.grid()).map_err(err)?;
    let cfg = StepperConfig::new(dt, horizon, 1).map_err(err)?;
    let (phi, r) = (field.0.clone(), &reference.0);
    let run = py.allow_threads(|| run_trap_experiment(&p, &phi, r, &cfg, tolerance)).map_err(err)?;
    to_py(py, &serde_json::json!({ "verdict": run.verdict, "report": run.report }))
}

#[pymodule]
fn dispersive(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyGroundState>()?;
    m.add_function(wrap_pyfunction!(ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(conserved_energy, m)?)?;
    m.add_function(wrap_pyfunction!(modified_energy, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(trap_experiment, m)?)?;
    m.add("BlowUpError", m.py().get_type::<BlowUpError>())?;
    m.add("DivergenceError", m.py().get_type::<DivergenceError>())?;
    Ok(())
}
