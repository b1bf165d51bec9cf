use num_complex::Complex64;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::transform;

/// Complex samples of a state on a [`Grid`].
///
/// Fields are plain values: every operation returns a new field. On Dirichlet grids the
/// wall samples are zero by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

/// Unnormalized transform coefficients of a field (Fourier on the torus, sine on Dirichlet grids).
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SampleCount {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if grid.is_dirichlet() {
            if let Some(index) = (0..grid.len()).find(|&f| grid.on_wall(f) && values[f] != Complex64::new(0.0, 0.0)) {
                return Err(Error::BoundaryViolation { index });
            }
        }
        Ok(Field { grid, values })
    }

    /// Builds a field without checking the Dirichlet wall condition; wall samples are zeroed.
    pub(crate) fn from_raw(grid: Grid, mut values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        if grid.is_dirichlet() {
            for (f, v) in values.iter_mut().enumerate() {
                if grid.on_wall(f) {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x, y)` at every grid point (`y = 0` in 1D). Wall samples are forced to zero.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| {
                let [x, y] = grid.position(i);
                f(x, y)
            })
            .collect();
        Field::from_raw(grid, values)
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        Field::from_fn(grid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Field::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.re).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|c| c.norm()).collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Pointwise map. On Dirichlet grids the wall samples stay zero.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, s: f64) -> Field {
        self.map(|v| v * s)
    }

    pub fn conj(&self) -> Field {
        self.map(|v| v.conj())
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Field> {
        self.grid.ensure_same(&other.grid)?;
        Ok(Field::from_raw(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn spectrum(&self) -> Spectrum {
        let mut coeffs = self.values.clone();
        transform::forward(&self.grid, &mut coeffs);
        Spectrum { grid: self.grid, coeffs }
    }

    /// Trigonometric interpolation onto a grid with `factor` times as many points per axis.
    pub fn refine(&self, factor: usize) -> Result<Field> {
        if factor == 1 {
            return Ok(self.clone());
        }
        let fine = self.grid.refined(factor)?;
        Ok(self.spectrum().resample(fine).into_field())
    }

    /// Spectral truncation onto a grid with `points` per axis (must not exceed the current count).
    pub fn truncate(&self, points: usize) -> Result<Field> {
        if points > self.grid.points() {
            return Err(Error::InvalidArgument("truncation target is finer than the field".into()));
        }
        let coarse = self.grid.with_points(points)?;
        Ok(self.spectrum().resample(coarse).into_field())
    }

    /// Circular shift by whole cells along each axis (torus only).
    pub fn shifted(&self, shift: [usize; 2]) -> Field {
        let n = self.grid.points();
        let values = (0..self.len())
            .map(|f| {
                let [i, j] = self.grid.unflatten(f);
                let si = (i + n - shift[0] % n) % n;
                if self.grid.dimension() == 1 {
                    self.values[si]
                } else {
                    let sj = (j + n - shift[1] % n) % n;
                    self.values[si * n + sj]
                }
            })
            .collect();
        Field::from_raw(self.grid, values)
    }

    /// Even part `(f(x) + f(-x)) / 2`.
    pub fn even_part(&self) -> Field {
        let values = (0..self.len())
            .map(|f| 0.5 * (self.values[f] + self.values[self.grid.mirror(f)]))
            .collect();
        Field::from_raw(self.grid, values)
    }

    /// Maximum pointwise distance to another field.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Spectrum {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub(crate) fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        Spectrum { grid, coeffs }
    }

    pub fn into_field(self) -> Field {
        let mut values = self.coeffs;
        transform::inverse(&self.grid, &mut values);
        Field::from_raw(self.grid, values)
    }

    /// Multiplies every coefficient by `symbol(flat spectral index)`.
    pub fn scale_by(mut self, symbol: impl Fn(usize) -> Complex64) -> Spectrum {
        for (f, c) in self.coeffs.iter_mut().enumerate() {
            *c *= symbol(f);
        }
        self
    }

    /// `sum_k w(|k|) |c_k|^2` times the Parseval weight.
    pub fn weighted_energy(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let total: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(f, c)| weight(self.grid.wavenumber_sq(f).sqrt()) * c.norm_sqr())
            .sum();
        total * self.grid.spectral_weight()
    }

    /// Zero-pads or truncates the coefficient array onto `target` (same domain, other N),
    /// rescaling so that sample values interpolate.
    pub fn resample(&self, target: Grid) -> Spectrum {
        let (n_src, n_dst) = (self.grid.points(), target.points());
        let dim = self.grid.dimension();
        let scale = (n_dst as f64 / n_src as f64).powi(dim as i32);
        let mut out = vec![Complex64::new(0.0, 0.0); target.len()];
        let axis_map = axis_transfer(&self.grid, n_src, n_dst);
        if dim == 1 {
            for &(s, d, w) in &axis_map {
                out[d] += self.coeffs[s] * w * scale;
            }
        } else {
            for &(si, di, wi) in &axis_map {
                for &(sj, dj, wj) in &axis_map {
                    out[di * n_dst + dj] += self.coeffs[si * n_src + sj] * (wi * wj * scale);
                }
            }
        }
        Spectrum {
            grid: target,
            coeffs: out,
        }
    }
}

/// Per-axis (source index, destination index, weight) triples for spectral resampling.
fn axis_transfer(grid: &Grid, n_src: usize, n_dst: usize) -> Vec<(usize, usize, f64)> {
    let mut map = Vec::new();
    if grid.is_dirichlet() {
        for m in 1..n_src.min(n_dst) {
            map.push((m, m, 1.0));
        }
        return map;
    }
    let to_dst = |mode: i64| -> usize { mode.rem_euclid(n_dst as i64) as usize };
    if n_dst >= n_src {
        let half = (n_src / 2) as i64;
        for s in 0..n_src {
            let mode = grid.mode_number(s);
            if mode == -half {
                // split the Nyquist coefficient symmetrically
                map.push((s, to_dst(-half), 0.5));
                map.push((s, to_dst(half), 0.5));
            } else {
                map.push((s, to_dst(mode), 1.0));
            }
        }
    } else {
        let half = (n_dst / 2) as i64;
        for s in 0..n_src {
            let mode = grid.mode_number(s);
            if mode.abs() < half {
                map.push((s, to_dst(mode), 1.0));
            } else if mode.abs() == half {
                map.push((s, to_dst(-half), 1.0));
            }
        }
    }
    map
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in field addition")
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in field subtraction")
    }
}

/// Pointwise product.
impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_with(rhs, |a, b| a * b).expect("grid mismatch in field product")
    }
}
