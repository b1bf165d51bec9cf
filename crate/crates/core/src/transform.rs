//! Discrete transforms behind [`Field`](crate::Field): the FFT on periodic grids and a
//! type-I sine transform (computed through an odd extension of length `2N`) on Dirichlet grids.
//!
//! Forward transforms are unnormalized; inverses carry the `1/N` (or `2/N`) factor.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

use crate::grid::{Boundary, Grid};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// Forward transform in place: sample values to spectral coefficients.
pub fn forward(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, Direction::Forward);
}

/// Inverse transform in place: spectral coefficients to sample values.
pub fn inverse(grid: &Grid, data: &mut [Complex64]) {
    transform(grid, data, Direction::Inverse);
}

fn transform(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    debug_assert_eq!(data.len(), grid.len());
    let n = grid.points();
    match grid.boundary() {
        Boundary::Periodic => {
            let fft = plan(n, dir == Direction::Inverse);
            // contiguous rows
            fft.process(data);
            if grid.dimension() == 2 {
                for_each_column(data, n, |col| fft.process(col));
            }
            if dir == Direction::Inverse {
                let scale = 1.0 / grid.len() as f64;
                data.iter_mut().for_each(|c| *c *= scale);
            }
        }
        Boundary::DirichletRectangle => {
            let mut dst = SineTransform::new(n);
            for row in data.chunks_exact_mut(n) {
                dst.apply(row);
            }
            for_each_column(data, n, |col| dst.apply(col));
            if dir == Direction::Inverse {
                let scale = (2.0 / n as f64).powi(2);
                data.iter_mut().for_each(|c| *c *= scale);
            }
        }
    }
}

fn for_each_column(data: &mut [Complex64], n: usize, mut f: impl FnMut(&mut [Complex64])) {
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        f(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
}

/// Unnormalized DST-I on indices `1..N`: `S_m = sum_j v_j sin(pi j m / N)`, with slot 0
/// (the wall sample / null mode) forced to zero. It is its own inverse up to `2/N`.
struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
}

impl SineTransform {
    fn new(n: usize) -> Self {
        SineTransform {
            n,
            fft: plan(2 * n, false),
            buf: vec![Complex64::new(0.0, 0.0); 2 * n],
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn apply(&mut self, line: &mut [Complex64]) {
        let n = self.n;
        let zero = Complex64::new(0.0, 0.0);
        self.buf[0] = zero;
        self.buf[n] = zero;
        for j in 1..n {
            self.buf[j] = line[j];
            self.buf[2 * n - j] = -line[j];
        }
        self.fft.process(&mut self.buf);
        // Y_m = -2i S_m
        line[0] = zero;
        for m in 1..n {
            line[m] = self.buf[m] * Complex64::new(0.0, 0.5);
        }
    }
}

/// Spectral derivative of a sampled function along `axis` (0 = x, 1 = y).
///
/// Periodic grids differentiate the Fourier series; Dirichlet grids differentiate the odd
/// extension across the walls, so the result is the cosine series of the derivative and is
/// generally nonzero on the wall.
pub fn partial(grid: &Grid, values: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.points();
    let mut out = values.to_vec();
    let lines: Vec<Vec<usize>> = line_indices(grid, axis);
    match grid.boundary() {
        Boundary::Periodic => {
            let fwd = plan(n, false);
            let inv = plan(n, true);
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            for idx in &lines {
                for (b, &f) in buf.iter_mut().zip(idx) {
                    *b = values[f];
                }
                fwd.process(&mut buf);
                for (m, b) in buf.iter_mut().enumerate() {
                    let k = if m == n / 2 { 0.0 } else { grid.axis_wavenumber(m) };
                    *b *= Complex64::new(0.0, k / n as f64);
                }
                inv.process(&mut buf);
                for (&f, b) in idx.iter().zip(&buf) {
                    out[f] = *b;
                }
            }
        }
        Boundary::DirichletRectangle => {
            let m2 = 2 * n;
            let fwd = plan(m2, false);
            let inv = plan(m2, true);
            let mut buf = vec![Complex64::new(0.0, 0.0); m2];
            // odd extension has period 4L
            let base = std::f64::consts::PI / (2.0 * grid.half_length());
            for idx in &lines {
                buf[0] = Complex64::new(0.0, 0.0);
                buf[n] = Complex64::new(0.0, 0.0);
                for j in 1..n {
                    buf[j] = values[idx[j]];
                    buf[m2 - j] = -values[idx[j]];
                }
                fwd.process(&mut buf);
                for (m, b) in buf.iter_mut().enumerate() {
                    let mode = if m < n {
                        m as f64
                    } else if m == n {
                        0.0
                    } else {
                        m as f64 - m2 as f64
                    };
                    *b *= Complex64::new(0.0, base * mode / m2 as f64);
                }
                inv.process(&mut buf);
                for j in 0..n {
                    out[idx[j]] = buf[j];
                }
            }
        }
    }
    out
}

fn line_indices(grid: &Grid, axis: usize) -> Vec<Vec<usize>> {
    let n = grid.points();
    if grid.dimension() == 1 {
        assert_eq!(axis, 0, "1D grids have a single axis");
        return vec![(0..n).collect()];
    }
    match axis {
        0 => (0..n).map(|j| (0..n).map(|i| i * n + j).collect()).collect(),
        1 => (0..n).map(|i| (0..n).map(|j| i * n + j).collect()).collect(),
        _ => panic!("axis {axis} out of range"),
    }
}
