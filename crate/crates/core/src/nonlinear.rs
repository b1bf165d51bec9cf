//! Pointwise nonlinear maps evaluated on a refined grid.

use num_complex::Complex64;

use crate::error::Result;
use crate::field::Field;

/// How a pointwise map is sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    /// Interpolate onto a grid with twice the points per axis, apply, transform back and truncate.
    #[default]
    Oversampled,
    /// Apply at the native collocation points.
    Direct,
}

/// Evaluates `expr(u)` pointwise, by default on the 2x oversampled grid.
pub fn nonlinear_sample(f: &Field, expr: impl Fn(Complex64) -> Complex64, sampling: Sampling) -> Result<Field> {
    match sampling {
        Sampling::Direct => Ok(f.map(expr)),
        Sampling::Oversampled => {
            let fine = f.refine(2)?;
            fine.map(expr).truncate(f.grid().points())
        }
    }
}

/// Oversampled pointwise product `f * g`.
pub fn product(f: &Field, g: &Field, sampling: Sampling) -> Result<Field> {
    match sampling {
        Sampling::Direct => f.zip_with(g, |a, b| a * b),
        Sampling::Oversampled => {
            let n = f.grid().points();
            let (ff, gf) = (f.refine(2)?, g.refine(2)?);
            ff.zip_with(&gf, |a, b| a * b)?.truncate(n)
        }
    }
}

/// `u |u|^3`, the quartic nonlinearity.
pub fn quartic(u: Complex64) -> Complex64 {
    let a = u.norm();
    u * (a * a * a)
}

/// `u |u|^6`.
pub fn septic(u: Complex64) -> Complex64 {
    let a2 = u.norm_sqr();
    u * (a2 * a2 * a2)
}

pub fn modulus_sq(u: Complex64) -> Complex64 {
    Complex64::new(u.norm_sqr(), 0.0)
}

pub fn modulus_cubed(u: Complex64) -> Complex64 {
    let a = u.norm();
    Complex64::new(a * a * a, 0.0)
}
