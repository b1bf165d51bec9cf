//! Experiment configurations: strict JSON records with dotted `key=value` overrides.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use dispersive_core::energies::IdentityConfig;
use dispersive_core::ground_state::GroundStateOptions;
use dispersive_core::probe::{FunctionFamily, ProbeKind};
use dispersive_core::{Boundary, Coupling, EquationKind, Grid, StepperConfig};

const TAGS: [&str; 2] = ["kind", "inequality"];

/// Starts from the defaults of `T`, merges the config file over them, applies the overrides in
/// order, and deserializes with unknown keys rejected.
pub fn load<T: DeserializeOwned + Serialize>(path: Option<&Path>, overrides: &[String]) -> Result<T> {
    let defaults: T = serde_json::from_value(Value::Object(Default::default())).map_err(|e| anyhow!("defaults: {e}"))?;
    let mut value = serde_json::to_value(defaults)?;
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
        let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?;
        if !file.is_object() {
            bail!("config {} must hold a JSON object", p.display());
        }
        merge(&mut value, file);
    }
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    serde_json::from_value(value).map_err(|e| anyhow!("invalid config: {e}"))
}

fn tag_of(v: &Value) -> Option<&Value> {
    TAGS.iter().find_map(|t| v.get(*t))
}

/// Recursive object merge. A variant tag that changes replaces the whole object, so fields of
/// the old variant do not leak into the new one.
fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() && tag_of(slot) == tag_of(&v) => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// `a.b.c=value`; the value is read as JSON when it parses and as a string otherwise.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| anyhow!("override `{spec}` is not key=value"))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        bail!("override `{spec}` has an empty key segment");
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut cur = root;
    let segments: Vec<&str> = key.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    if TAGS.contains(seg) && map.get(*seg).is_some_and(|old| *old != value) {
                        map.clear();
                    }
                    map.insert(seg.to_string(), value);
                    return Ok(());
                }
                let slot = map.entry(seg.to_string()).or_insert(Value::Null);
                if slot.is_null() {
                    *slot = Value::Object(Default::default());
                }
                slot
            }
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| anyhow!("`{seg}` in `{key}` indexes an array"))?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| anyhow!("index {idx} out of range ({len}) in `{key}`"))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => bail!("`{key}` descends into a non-object value"),
        };
    }
    unreachable!("the loop returns on the last segment")
}

fn default_grid(kind: EquationKind) -> Grid {
    match kind {
        EquationKind::HalfWave1d => Grid::new(1, 40.0, 8192, Boundary::Periodic),
        EquationKind::Nls2d => Grid::new(2, 8.0, 64, Boundary::Periodic),
    }
    .expect("default grids are valid")
}

fn half_wave() -> EquationKind {
    EquationKind::HalfWave1d
}

fn focusing() -> Coupling {
    Coupling::Focusing
}

fn default_stepper() -> StepperConfig {
    StepperConfig::new(1e-3, 1.0, 100).expect("valid default")
}

fn unit() -> f64 {
    1.0
}

fn four() -> u32 {
    4
}

/// Initial datum, built on the experiment grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    #[default]
    Zero,
    /// `A exp(-|x - c|^2 / w^2) e^{i k.x}`.
    Gaussian {
        #[serde(default = "unit")]
        amplitude: f64,
        #[serde(default = "unit")]
        width: f64,
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        wavenumber: [f64; 2],
    },
    /// Member 0 of a band-limited random family.
    Random {
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        cutoff: Option<usize>,
        #[serde(default = "unit")]
        decay: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `scale` times the quartic ground state, loaded from `path` or solved on the grid.
    GroundState {
        #[serde(default = "unit")]
        scale: f64,
        #[serde(default)]
        path: Option<PathBuf>,
    },
    /// A stored field; `.csv` or binary by extension.
    File {
        path: PathBuf,
        #[serde(default = "unit")]
        scale: f64,
    },
    Sum { terms: Vec<InitialData> },
}

impl InitialData {
    fn reseed(&mut self, seed: u64) {
        match self {
            InitialData::Random { seed: s, .. } => *s = seed,
            InitialData::Sum { terms } => terms.iter_mut().for_each(|t| t.reseed(seed)),
            _ => {}
        }
    }

    fn paths(&self, out: &mut Vec<PathBuf>) {
        match self {
            InitialData::GroundState { path: Some(p), .. } | InitialData::File { path: p, .. } => out.push(p.clone()),
            InitialData::Sum { terms } => terms.iter().for_each(|t| t.paths(out)),
            _ => {}
        }
    }
}

fn check_paths(data: &InitialData) -> Result<()> {
    let mut paths = Vec::new();
    data.paths(&mut paths);
    for p in paths {
        if !p.is_file() {
            bail!("referenced file {} does not exist", p.display());
        }
    }
    Ok(())
}

fn resolve_grid(grid: &mut Option<Grid>, kind: EquationKind) {
    grid.get_or_insert_with(|| default_grid(kind));
}

/// Shared behaviour of the per-command configs.
pub trait Experiment: Serialize + DeserializeOwned + Clone + Send + Sync {
    /// Fills defaults that depend on other fields and checks referenced paths.
    fn resolve(&mut self) -> Result<()>;
    /// Replaces every seed in the config.
    fn reseed(&mut self, seed: u64);
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    #[serde(default = "half_wave")]
    pub equation: EquationKind,
    #[serde(default = "focusing")]
    pub coupling: Coupling,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "default_stepper")]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub initial: InitialData,
    /// Track the modified energy at every logged sample.
    #[serde(default)]
    pub modified_energy: bool,
    /// Also write the final state as `final_state.bin`.
    #[serde(default)]
    pub save_final: bool,
}

impl Experiment for EvolveConfig {
    fn resolve(&mut self) -> Result<()> {
        resolve_grid(&mut self.grid, self.equation);
        self.stepper.validate()?;
        check_paths(&self.initial)
    }

    fn reseed(&mut self, seed: u64) {
        self.initial.reseed(seed);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundStateConfig {
    #[serde(default = "half_wave")]
    pub equation: EquationKind,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "four")]
    pub power: u32,
    #[serde(default)]
    pub options: GroundStateOptions,
    /// Iteration seed; the unit Gaussian when absent.
    #[serde(default)]
    pub seed_profile: Option<InitialData>,
    /// Also write the profile as CSV next to the binary file.
    #[serde(default)]
    pub write_csv: bool,
}

impl Experiment for GroundStateConfig {
    fn resolve(&mut self) -> Result<()> {
        resolve_grid(&mut self.grid, self.equation);
        if let Some(s) = &self.seed_profile {
            check_paths(s)?;
        }
        Ok(())
    }

    fn reseed(&mut self, seed: u64) {
        if let Some(s) = &mut self.seed_profile {
            s.reseed(seed);
        }
    }
}

fn default_identity() -> IdentityConfig {
    IdentityConfig::new(1e-4)
}

fn identity_stepper() -> StepperConfig {
    StepperConfig::new(1e-3, 0.1, 10).expect("valid default")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentityCheckConfig {
    #[serde(default = "half_wave")]
    pub equation: EquationKind,
    #[serde(default = "focusing")]
    pub coupling: Coupling,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "identity_stepper")]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default = "default_identity")]
    pub identity: IdentityConfig,
}

impl Experiment for IdentityCheckConfig {
    fn resolve(&mut self) -> Result<()> {
        resolve_grid(&mut self.grid, self.equation);
        self.stepper.validate()?;
        if !(self.identity.dt_fd > 0.0) {
            bail!("identity.dt_fd must be positive");
        }
        check_paths(&self.initial)
    }

    fn reseed(&mut self, seed: u64) {
        self.initial.reseed(seed);
    }
}

fn default_probe_grid() -> Grid {
    Grid::new(1, 10.0, 256, Boundary::Periodic).expect("valid default")
}

fn default_probe() -> ProbeKind {
    ProbeKind::Gn {
        which: dispersive_core::probe::GnInequality::GnL5,
    }
}

fn default_family() -> FunctionFamily {
    FunctionFamily::BandlimitedRandom {
        seed: 0,
        count: 100,
        cutoff: None,
        decay: 1.0,
        amplitude: 1.0,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "default_probe_grid")]
    pub grid: Grid,
    #[serde(default = "default_probe")]
    pub probe: ProbeKind,
    #[serde(default = "default_family")]
    pub family: FunctionFamily,
    /// Re-evaluate the ensemble at twice the resolution.
    #[serde(default)]
    pub refinement: bool,
    /// Write the maximizing member (first of the pair for pairwise probes) as `argmax.csv`.
    #[serde(default)]
    pub dump_argmax: bool,
}

impl Experiment for ProbeConfig {
    fn resolve(&mut self) -> Result<()> {
        self.family.validate(&self.grid)?;
        Ok(())
    }

    fn reseed(&mut self, seed: u64) {
        match &mut self.family {
            FunctionFamily::BandlimitedRandom { seed: s, .. } | FunctionFamily::PlaneWaveMix { seed: s, .. } => *s = seed,
            _ => {}
        }
    }
}

fn dichotomy_stepper() -> StepperConfig {
    StepperConfig::new(1e-3, 10.0, 1000).expect("valid default")
}

fn half_ground_state() -> InitialData {
    InitialData::GroundState { scale: 0.5, path: None }
}

fn sublevel_tolerance() -> f64 {
    1e-6
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DichotomyConfig {
    #[serde(default = "half_wave")]
    pub equation: EquationKind,
    #[serde(default = "focusing")]
    pub coupling: Coupling,
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "dichotomy_stepper")]
    pub stepper: StepperConfig,
    #[serde(default = "half_ground_state")]
    pub initial: InitialData,
    /// Stored reference ground state; solved on the grid when absent.
    #[serde(default)]
    pub reference: Option<PathBuf>,
    #[serde(default = "sublevel_tolerance")]
    pub sublevel_tolerance: f64,
}

impl Experiment for DichotomyConfig {
    fn resolve(&mut self) -> Result<()> {
        resolve_grid(&mut self.grid, self.equation);
        self.stepper.validate()?;
        if let Some(p) = &self.reference {
            if !p.is_file() {
                bail!("reference file {} does not exist", p.display());
            }
        }
        check_paths(&self.initial)
    }

    fn reseed(&mut self, seed: u64) {
        self.initial.reseed(seed);
    }
}
