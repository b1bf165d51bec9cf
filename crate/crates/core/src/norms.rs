//! Discrete norms and the `L^2` pairing `(f, g) = sum f conj(g) h^d`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::Field;

/// Inhomogeneous Sobolev norm `(sum (1 + |k|^2)^s |f_k|^2 w)^{1/2}`; `s = 0` is the discrete `L^2` norm.
pub fn sobolev_norm(f: &Field, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("Sobolev order must be >= 0, got {s}")));
    }
    Ok(f.spectrum().weighted_energy(|k| (1.0 + k * k).powf(s)).sqrt())
}

/// Homogeneous seminorm `|| |D|^s f ||_{L^2}`, evaluated in the transform domain.
pub fn seminorm(f: &Field, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!("seminorm order must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(f.spectrum().weighted_energy(|_| 1.0).sqrt());
    }
    Ok(f.spectrum().weighted_energy(|k| k.powf(2.0 * s)).sqrt())
}

/// Rectangle-rule `L^p` norm with the grid cell volume; `p = inf` gives the max modulus.
pub fn lebesgue_norm(f: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("L^p exponent must be >= 1, got {p}")));
    }
    Ok(lp_of_samples(f.values(), f.grid().cell_volume(), p))
}

pub(crate) fn lp_of_samples(values: &[Complex64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().map(|c| c.norm()).fold(0.0, f64::max);
    }
    let sum: f64 = if p == 2.0 {
        values.iter().map(|c| c.norm_sqr()).sum()
    } else {
        values.iter().map(|c| c.norm().powf(p)).sum()
    };
    (sum * cell).powf(1.0 / p)
}

/// `(f, g) = int f conj(g) dx`.
pub fn inner(f: &Field, g: &Field) -> Result<Complex64> {
    f.grid().ensure_same(g.grid())?;
    Ok(pair(f.values(), g.values(), f.grid().cell_volume()))
}

pub(crate) fn pair(f: &[Complex64], g: &[Complex64], cell: f64) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum::<Complex64>() * cell
}
