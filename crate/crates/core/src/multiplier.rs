//! Real Fourier multipliers: `|D|^s`, `-Delta`, Bessel potentials, and user symbols.

use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;

type RadialSymbol = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type VectorSymbol = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Symbol {
    Radial(RadialSymbol),
    Vector(VectorSymbol),
}

/// A real symbol `m(k)` acting diagonally on transform coefficients.
#[derive(Clone)]
pub struct Multiplier {
    symbol: Symbol,
    description: String,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("description", &self.description)
            .field("radial", &self.is_radial())
            .finish()
    }
}

impl Multiplier {
    /// Symbol depending on `|k|` only; admissible on every grid.
    pub fn radial(description: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let m = Multiplier {
            symbol: Symbol::Radial(Arc::new(f)),
            description: description.into(),
        };
        m.check_origin()?;
        Ok(m)
    }

    /// Symbol depending on the full wavevector; periodic grids only.
    pub fn vector(description: impl Into<String>, f: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let m = Multiplier {
            symbol: Symbol::Vector(Arc::new(f)),
            description: description.into(),
        };
        m.check_origin()?;
        Ok(m)
    }

    fn check_origin(&self) -> Result<()> {
        if self.eval([0.0, 0.0]).is_finite() {
            Ok(())
        } else {
            Err(Error::SingularMultiplier(self.description.clone()))
        }
    }

    /// `|D|^s`, `s >= 0`.
    pub fn fractional(s: f64) -> Self {
        assert!(s >= 0.0, "fractional order must be nonnegative");
        let d = format!("|D|^{s}");
        if s == 0.0 {
            return Multiplier::radial(d, |_| 1.0).expect("finite");
        }
        Multiplier::radial(d, move |k| k.powf(s)).expect("finite at the origin")
    }

    /// `-Delta`, symbol `|k|^2`.
    pub fn neg_laplacian() -> Self {
        Multiplier::radial("-Delta", |k| k * k).expect("finite")
    }

    /// `(1 + |k|^2)^{s/2}`.
    pub fn bessel(s: f64) -> Self {
        Multiplier::radial(format!("<D>^{s}"), move |k| (1.0 + k * k).powf(0.5 * s)).expect("finite")
    }

    /// `|D| + 1`, the linear part of the half-wave ground-state equation.
    pub fn half_wave_operator() -> Self {
        Multiplier::radial("|D| + 1", |k| k + 1.0).expect("finite")
    }

    /// `-Delta + 1`, the linear part of the NLS ground-state equation.
    pub fn schrodinger_operator() -> Self {
        Multiplier::radial("-Delta + 1", |k| k * k + 1.0).expect("finite")
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.symbol, Symbol::Radial(_))
    }

    pub fn eval(&self, k: [f64; 2]) -> f64 {
        match &self.symbol {
            Symbol::Radial(f) => f((k[0] * k[0] + k[1] * k[1]).sqrt()),
            Symbol::Vector(f) => f(k),
        }
    }

    /// Symbol values at every spectral index of `f`'s grid.
    pub fn table(&self, grid: &crate::Grid) -> Result<Vec<f64>> {
        if grid.is_dirichlet() && !self.is_radial() {
            return Err(Error::NonRadialMultiplier(self.description.clone()));
        }
        Ok((0..grid.len()).map(|i| self.eval(grid.wavevector(i))).collect())
    }
}

/// Returns the field whose transform coefficients are `m(k) * f_hat(k)`.
pub fn apply_multiplier(f: &Field, m: &Multiplier) -> Result<Field> {
    let table = m.table(f.grid())?;
    Ok(f.spectrum().scale_by(|i| Complex64::new(table[i], 0.0)).into_field())
}
