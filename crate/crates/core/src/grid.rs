//! Uniform spectral grids on the torus `[-L, L)^d` or the Dirichlet square `[-L, L]^2`.
//!
//! Samples sit at `x_j = -L + j h` with `h = 2L / N`, `j = 0..N`, stored row-major
//! (first axis slowest). On a Dirichlet grid the `j = 0` samples lie on the wall and the
//! opposite wall `x = L` is implicit, so both conventions share the same array shape.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    DirichletRectangle,
}

impl Boundary {
    pub fn tag(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::DirichletRectangle => "dirichlet_rectangle",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "periodic" => Some(Boundary::Periodic),
            "dirichlet_rectangle" | "dirichlet" => Some(Boundary::DirichletRectangle),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    dimension: usize,
    half_length: f64,
    points: usize,
    boundary: Boundary,
}

/// Unvalidated mirror of [`Grid`] used for (de)serialization.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dimension: usize,
    pub half_length: f64,
    pub points: usize,
    pub boundary: Boundary,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.dimension, s.half_length, s.points, s.boundary)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            dimension: g.dimension,
            half_length: g.half_length,
            points: g.points,
            boundary: g.boundary,
        }
    }
}

impl Grid {
    pub fn new(dimension: usize, half_length: f64, points: usize, boundary: Boundary) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {dimension}")));
        }
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::InvalidGrid(format!("half-length must be positive, got {half_length}")));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if boundary == Boundary::DirichletRectangle && dimension != 2 {
            return Err(Error::InvalidGrid("Dirichlet rectangle grids are two-dimensional".into()));
        }
        Ok(Grid {
            dimension,
            half_length,
            points,
            boundary,
        })
    }

    pub fn periodic_1d(half_length: f64, points: usize) -> Result<Self> {
        Self::new(1, half_length, points, Boundary::Periodic)
    }

    pub fn periodic_2d(half_length: f64, points: usize) -> Result<Self> {
        Self::new(2, half_length, points, Boundary::Periodic)
    }

    pub fn dirichlet_2d(half_length: f64, points: usize) -> Result<Self> {
        Self::new(2, half_length, points, Boundary::DirichletRectangle)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_dirichlet(&self) -> bool {
        self.boundary == Boundary::DirichletRectangle
    }

    /// Total number of samples, `N^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Volume of the domain, `(2L)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * self.half_length).powi(self.dimension as i32)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.spacing()
    }

    /// Axis indices of a flat sample index.
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dimension == 1 {
            [flat, 0]
        } else {
            [flat / self.points, flat % self.points]
        }
    }

    pub fn position(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(flat);
        if self.dimension == 1 {
            [self.coordinate(i), 0.0]
        } else {
            [self.coordinate(i), self.coordinate(j)]
        }
    }

    /// Flat index of the sample at `-x`.
    pub fn mirror(&self, flat: usize) -> usize {
        let n = self.points;
        let [i, j] = self.unflatten(flat);
        let mi = (n - i) % n;
        if self.dimension == 1 {
            mi
        } else {
            mi * n + (n - j) % n
        }
    }

    /// True when the sample lies on the wall of a Dirichlet grid.
    pub fn on_wall(&self, flat: usize) -> bool {
        if !self.is_dirichlet() {
            return false;
        }
        let [i, j] = self.unflatten(flat);
        i == 0 || j == 0
    }

    /// Signed integer mode number of spectral index `m` along one axis.
    pub fn mode_number(&self, m: usize) -> i64 {
        match self.boundary {
            Boundary::Periodic => {
                let n = self.points as i64;
                let m = m as i64;
                if m < n / 2 {
                    m
                } else {
                    m - n
                }
            }
            Boundary::DirichletRectangle => m as i64,
        }
    }

    /// Physical wavenumber of spectral index `m` along one axis: `pi m / L` on the torus,
    /// `pi m / (2L)` for the sine basis.
    pub fn axis_wavenumber(&self, m: usize) -> f64 {
        let base = match self.boundary {
            Boundary::Periodic => PI / self.half_length,
            Boundary::DirichletRectangle => PI / (2.0 * self.half_length),
        };
        base * self.mode_number(m) as f64
    }

    /// Wavevector of a flat spectral index (second component zero in 1D).
    pub fn wavevector(&self, flat: usize) -> [f64; 2] {
        let [a, b] = self.unflatten(flat);
        if self.dimension == 1 {
            [self.axis_wavenumber(a), 0.0]
        } else {
            [self.axis_wavenumber(a), self.axis_wavenumber(b)]
        }
    }

    pub fn wavenumber_sq(&self, flat: usize) -> f64 {
        let [kx, ky] = self.wavevector(flat);
        kx * kx + ky * ky
    }

    /// `|k|` at every spectral index.
    pub fn wavenumber_magnitudes(&self) -> Vec<f64> {
        (0..self.len()).map(|f| self.wavenumber_sq(f).sqrt()).collect()
    }

    /// Spectral indices that carry no degree of freedom (the `m = 0` sine modes).
    pub fn is_null_mode(&self, flat: usize) -> bool {
        if !self.is_dirichlet() {
            return false;
        }
        let [a, b] = self.unflatten(flat);
        a == 0 || b == 0
    }

    /// Parseval weight: `sum_j |f_j|^2 h^d = weight * sum_k |c_k|^2` for unnormalized coefficients.
    pub fn spectral_weight(&self) -> f64 {
        let per_axis = match self.boundary {
            Boundary::Periodic => self.spacing() / self.points as f64,
            Boundary::DirichletRectangle => 2.0 * self.spacing() / self.points as f64,
        };
        per_axis.powi(self.dimension as i32)
    }

    /// Same domain with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Grid> {
        Grid::new(self.dimension, self.half_length, self.points * factor, self.boundary)
    }

    pub fn with_points(&self, points: usize) -> Result<Grid> {
        Grid::new(self.dimension, self.half_length, points, self.boundary)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
