//! Numerical probes of functional inequalities: every probe returns `lhs / rhs`, and
//! ensembles report the supremum over a deterministic family of test functions.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Spectrum};
use crate::grid::Grid;
use crate::ground_state::gn_quotient;
use crate::norms::{lebesgue_norm, lp_of_samples, seminorm, sobolev_norm};
use crate::transform;

/// Parametrized test functions. Member `i` depends only on the parameters and `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionFamily {
    /// I.i.d. complex Gaussian coefficients on mode numbers `|m| <= cutoff`, variance
    /// `(1 + |m|^2)^{-decay}`, rescaled to sup norm `amplitude`.
    BandlimitedRandom {
        seed: u64,
        count: usize,
        #[serde(default)]
        cutoff: Option<usize>,
        #[serde(default)]
        decay: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `exp(-|x|^2 / w^2)` with `w` geometrically spaced over `[min_width, max_width]`.
    GaussianWidthSweep { min_width: f64, max_width: f64, count: usize },
    /// Fourier series with coefficients `1 / (1 + |m|)` on `|m| <= 2^n`, `n = n_min, n_min + 1, ...`.
    ConcentratingBump { n_min: u32, count: usize },
    /// Sums of `modes` plane waves with random mode numbers `|m| <= cutoff` and Gaussian amplitudes.
    PlaneWaveMix { seed: u64, count: usize, modes: usize, cutoff: usize },
}

fn unit() -> f64 {
    1.0
}

impl FunctionFamily {
    pub fn bandlimited(seed: u64, count: usize) -> Self {
        FunctionFamily::BandlimitedRandom {
            seed,
            count,
            cutoff: None,
            decay: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn count(&self) -> usize {
        match *self {
            FunctionFamily::BandlimitedRandom { count, .. }
            | FunctionFamily::GaussianWidthSweep { count, .. }
            | FunctionFamily::ConcentratingBump { count, .. }
            | FunctionFamily::PlaneWaveMix { count, .. } => count,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.count() == 0 {
            return bad("a family needs at least one member".into());
        }
        let nyquist = grid.points() / 2;
        match *self {
            FunctionFamily::BandlimitedRandom { cutoff, amplitude, decay, .. } => {
                if cutoff.is_some_and(|c| c == 0 || c >= nyquist) {
                    return bad(format!("cutoff must lie in 1..{nyquist}"));
                }
                if !(amplitude > 0.0) || !decay.is_finite() {
                    return bad("amplitude must be positive and decay finite".into());
                }
            }
            FunctionFamily::GaussianWidthSweep { min_width, max_width, .. } => {
                if !(min_width > 0.0 && max_width >= min_width) {
                    return bad("widths must satisfy 0 < min_width <= max_width".into());
                }
            }
            FunctionFamily::ConcentratingBump { n_min, count } => {
                if (1usize << (n_min as usize + count - 1)) >= nyquist {
                    return bad(format!("largest cutoff 2^{} reaches the Nyquist mode", n_min as usize + count - 1));
                }
            }
            FunctionFamily::PlaneWaveMix { modes, cutoff, .. } => {
                if modes == 0 || cutoff == 0 || cutoff >= nyquist {
                    return bad(format!("need modes >= 1 and cutoff in 1..{nyquist}"));
                }
            }
        }
        Ok(())
    }

    /// Member `index`, with a short description.
    pub fn member(&self, grid: &Grid, index: usize) -> Result<(Field, String)> {
        self.validate(grid)?;
        if index >= self.count() {
            return Err(Error::InvalidArgument(format!("member {index} of {}", self.count())));
        }
        let g = *grid;
        Ok(match *self {
            FunctionFamily::BandlimitedRandom {
                seed,
                cutoff,
                decay,
                amplitude,
                ..
            } => {
                let cutoff = cutoff.unwrap_or(g.points() / 4) as f64;
                let mut rng = member_rng(seed, index);
                let spec = spectrum_from(g, |m| {
                    let r2 = m[0] * m[0] + m[1] * m[1];
                    // Draw for every index so the stream position does not depend on the cutoff test.
                    let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                    if r2.sqrt() <= cutoff {
                        z * (1.0 + r2).powf(-0.5 * decay)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                let f = spec.into_field();
                let peak = f.max_modulus();
                (f.scale(amplitude / peak), format!("bandlimited_random[{index}] seed={seed}"))
            }
            FunctionFamily::GaussianWidthSweep { min_width, max_width, count } => {
                let t = if count == 1 { 0.0 } else { index as f64 / (count - 1) as f64 };
                let w = min_width * (max_width / min_width).powf(t);
                let f = Field::from_real_fn(g, |x, y| (-(x * x + y * y) / (w * w)).exp());
                (f, format!("gaussian width={w}"))
            }
            FunctionFamily::ConcentratingBump { n_min, .. } => {
                let n = n_min + index as u32;
                (concentrating_bump(&g, n), format!("concentrating_bump n={n}"))
            }
            FunctionFamily::PlaneWaveMix { seed, modes, cutoff, .. } => {
                let mut rng = member_rng(seed, index);
                let c = cutoff as i64;
                let waves: Vec<([f64; 2], Complex64)> = (0..modes)
                    .map(|_| {
                        let mut k = [0.0; 2];
                        for kk in k.iter_mut().take(g.dimension()) {
                            *kk = rng.random_range(-c..=c) as f64 * std::f64::consts::PI / g.half_length();
                        }
                        let a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                        (k, a)
                    })
                    .collect();
                let f = Field::from_fn(g, |x, y| {
                    waves
                        .iter()
                        .map(|(k, a)| a * Complex64::from_polar(1.0, k[0] * x + k[1] * y))
                        .sum()
                });
                if g.is_dirichlet() {
                    return Err(Error::Unsupported("plane-wave mixtures need a periodic grid".into()));
                }
                (f, format!("plane_wave_mix[{index}] seed={seed}"))
            }
        })
    }
}

fn member_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Builds a spectrum from a function of the signed mode numbers `(m_x, m_y)`, visiting indices in order.
fn spectrum_from(g: Grid, mut coeff: impl FnMut([f64; 2]) -> Complex64) -> Spectrum {
    let coeffs = (0..g.len())
        .map(|flat| {
            let [i, j] = g.unflatten(flat);
            let m = if g.dimension() == 1 {
                [g.mode_number(i) as f64, 0.0]
            } else {
                [g.mode_number(i) as f64, g.mode_number(j) as f64]
            };
            if g.is_null_mode(flat) && g.is_dirichlet() {
                return Complex64::new(0.0, 0.0);
            }
            coeff(m)
        })
        .collect();
    Spectrum::from_coeffs(g, coeffs)
}

/// The series `sum_{|m| <= 2^n} e^{i m.x} / (1 + |m|)`, so `v(0) = sum 1 / (1 + |m|)` grows like `n`.
/// On `[-pi, pi)` the mode numbers are the wavenumbers.
pub fn concentrating_bump(grid: &Grid, n: u32) -> Field {
    let cut = (1u64 << n) as f64;
    let points = grid.len() as f64;
    spectrum_from(*grid, |m| {
        let r = (m[0] * m[0] + m[1] * m[1]).sqrt();
        if r <= cut {
            Complex64::new(points / (1.0 + r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .into_field()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogSobolevVariant {
    /// `||v||_inf / (||v||_{H^1} sqrt(ln(2 + ||v||_{H^2})) + 1)`, 2D.
    Nls2d,
    /// `||v||_inf / (||v||_{H^{1/2}} sqrt(ln(2 + ||v||_{H^1})) + 1)`, 1D.
    Hw1d,
}

pub fn log_sobolev_ratio(v: &Field, variant: LogSobolevVariant) -> Result<f64> {
    let (dim, a, b) = match variant {
        LogSobolevVariant::Nls2d => (2, 1.0, 2.0),
        LogSobolevVariant::Hw1d => (1, 0.5, 1.0),
    };
    if v.grid().dimension() != dim {
        return Err(Error::Unsupported(format!("{variant:?} needs a {dim}D grid")));
    }
    let rhs = sobolev_norm(v, a)? * (2.0 + sobolev_norm(v, b)?).ln().sqrt() + 1.0;
    Ok(v.max_modulus() / rhs)
}

/// `||v||_inf / ||v||_{H^{1/2}}`, the quotient without the logarithm.
pub fn naive_sup_ratio(v: &Field) -> Result<f64> {
    quotient(v.max_modulus(), sobolev_norm(v, 0.5)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GnInequality {
    /// `||grad u||_{L^4} <= C ||Delta u||^{1/2} ||grad u||^{1/2}`, 2D.
    #[serde(rename = "gnl4")]
    GnL4,
    /// `|||D|^{1/2} u||_{L^4}^2 <= C |||D| u|| |||D|^{1/2} u||`.
    #[serde(rename = "half_l4")]
    HalfL4,
    /// `||u||_5 <= C kinetic^{3/5} ||u||^{2/5}`.
    #[serde(rename = "gn_l5")]
    GnL5,
}

pub fn gn_ratio(u: &Field, which: GnInequality) -> Result<f64> {
    match which {
        GnInequality::GnL4 => {
            if u.grid().dimension() != 2 {
                return Err(Error::Unsupported("GNL4 needs a 2D grid".into()));
            }
            let fine = u.refine(2)?;
            let g = *fine.grid();
            let dx = transform::partial(&g, fine.values(), 0);
            let dy = transform::partial(&g, fine.values(), 1);
            let sq: f64 = dx.iter().zip(&dy).map(|(a, b)| (a.norm_sqr() + b.norm_sqr()).powi(2)).sum();
            let lhs = (sq * g.cell_volume()).powf(0.25);
            quotient(lhs, (seminorm(u, 2.0)? * seminorm(u, 1.0)?).sqrt())
        }
        GnInequality::HalfL4 => {
            let half = u.spectrum().scale_by(|i| Complex64::new(u.grid().wavenumber_sq(i).powf(0.25), 0.0));
            let fine = half.resample(u.grid().refined(2)?).into_field();
            let lhs = lebesgue_norm(&fine, 4.0)?.powi(2);
            quotient(lhs, seminorm(u, 1.0)? * seminorm(u, 0.5)?)
        }
        GnInequality::GnL5 => {
            if sobolev_norm(u, 0.0)? == 0.0 {
                return Ok(0.0);
            }
            gn_quotient(u)
        }
    }
}

/// `||v w||_{H^s} / (||v||_{H^s} ||w||_inf + ||w||_{H^s} ||v||_inf)`, the product formed on the refined grid.
pub fn algebra_ratio(v: &Field, w: &Field, s: f64) -> Result<f64> {
    v.grid().ensure_same(w.grid())?;
    let (vf, wf) = (v.refine(2)?, w.refine(2)?);
    let prod = vf.zip_with(&wf, |a, b| a * b)?;
    let lhs = sobolev_norm(&prod, s)?;
    let rhs = sobolev_norm(v, s)? * w.max_modulus() + sobolev_norm(w, s)? * v.max_modulus();
    quotient(lhs, rhs)
}

/// Exponents of the fractional Leibniz commutator estimate
/// `|||D|^s(fg) - g|D|^s f - f|D|^s g||_p <= C |||D|^{s1} f||_q |||D|^{s2} g||_r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KpvExponents {
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl Default for KpvExponents {
    fn default() -> Self {
        KpvExponents {
            s: 0.5,
            s1: 0.5,
            s2: 0.0,
            p: 4.0 / 3.0,
            q: 2.0,
            r: 4.0,
        }
    }
}

impl KpvExponents {
    pub fn validate(&self) -> Result<()> {
        let e = |m: &str| Err(Error::InvalidArgument(format!("KPV exponents: {m}")));
        if !(self.s > 0.0 && self.s < 1.0) {
            return e("need 0 < s < 1");
        }
        if !(self.s1 >= 0.0 && self.s2 >= 0.0) || (self.s - self.s1 - self.s2).abs() > 1e-12 {
            return e("need s = s1 + s2 with s1, s2 >= 0");
        }
        let open = |x: f64| x > 1.0 && x.is_finite();
        if !(open(self.p) && open(self.q) && open(self.r)) {
            return e("need 1 < p, q, r < inf");
        }
        if (1.0 / self.p - 1.0 / self.q - 1.0 / self.r).abs() > 1e-12 {
            return e("need 1/p = 1/q + 1/r");
        }
        Ok(())
    }
}

pub fn kpv_ratio(f: &Field, g: &Field, ex: &KpvExponents) -> Result<f64> {
    ex.validate()?;
    f.grid().ensure_same(g.grid())?;
    let (ff, gf) = (f.refine(2)?, g.refine(2)?);
    let grid = *ff.grid();
    let d = |v: &[Complex64], s: f64| -> Vec<Complex64> {
        let mut data = v.to_vec();
        transform::forward(&grid, &mut data);
        for (i, c) in data.iter_mut().enumerate() {
            *c *= grid.wavenumber_sq(i).powf(0.5 * s);
        }
        transform::inverse(&grid, &mut data);
        data
    };
    let (fv, gv) = (ff.values(), gf.values());
    let fg: Vec<Complex64> = fv.iter().zip(gv).map(|(a, b)| a * b).collect();
    let (d_fg, d_f, d_g) = (d(&fg, ex.s), d(fv, ex.s), d(gv, ex.s));
    let comm: Vec<Complex64> = (0..fg.len()).map(|i| d_fg[i] - gv[i] * d_f[i] - fv[i] * d_g[i]).collect();
    let cell = grid.cell_volume();
    let lhs = lp_of_samples(&comm, cell, ex.p);
    let rhs = lp_of_samples(&d(fv, ex.s1), cell, ex.q) * lp_of_samples(&d(gv, ex.s2), cell, ex.r);
    quotient(lhs, rhs)
}

fn quotient(lhs: f64, rhs: f64) -> Result<f64> {
    if rhs > 0.0 {
        Ok(lhs / rhs)
    } else if lhs == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::InvalidArgument(format!("zero denominator with lhs {lhs:e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub inequality_tag: String,
    /// Ratios in member order.
    pub ratios: Vec<f64>,
    pub sup_ratio: f64,
    pub argmax_index: usize,
    pub argmax_descriptor: String,
}

impl RatioReport {
    pub fn from_members(tag: impl Into<String>, members: Vec<(f64, String)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        if let Some((r, d)) = members.iter().find(|(r, _)| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidArgument(format!("ratio {r} for {d} is not finite and nonnegative")));
        }
        let (argmax_index, _) = members
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, (r, _))| if *r > bv { (i, *r) } else { (bi, bv) });
        Ok(RatioReport {
            inequality_tag: tag.into(),
            sup_ratio: members[argmax_index].0,
            argmax_descriptor: members[argmax_index].1.clone(),
            argmax_index,
            ratios: members.into_iter().map(|m| m.0).collect(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("member,ratio\n");
        for (i, r) in self.ratios.iter().enumerate() {
            out.push_str(&format!("{i},{r}\n"));
        }
        out
    }
}

/// Which inequality an ensemble measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "inequality", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeKind {
    LogSobolev { variant: LogSobolevVariant },
    Gn { which: GnInequality },
    /// Members `2i` and `2i + 1` form the pair for ratio `i`.
    Algebra { s: f64 },
    Kpv { exponents: KpvExponents },
}

impl ProbeKind {
    pub fn tag(&self) -> String {
        match self {
            ProbeKind::LogSobolev { variant } => format!("log_sobolev_{variant:?}").to_lowercase(),
            ProbeKind::Gn { which } => format!("gn_{which:?}").to_lowercase(),
            ProbeKind::Algebra { s } => format!("algebra_s{s}"),
            ProbeKind::Kpv { .. } => "kpv".into(),
        }
    }

    fn is_pairwise(&self) -> bool {
        matches!(self, ProbeKind::Algebra { .. } | ProbeKind::Kpv { .. })
    }

    /// Ratio for ensemble slot `i`.
    pub fn evaluate(&self, family: &FunctionFamily, grid: &Grid, i: usize) -> Result<(f64, String)> {
        if self.is_pairwise() {
            let (v, dv) = family.member(grid, 2 * i)?;
            let (w, dw) = family.member(grid, 2 * i + 1)?;
            let r = match self {
                ProbeKind::Algebra { s } => algebra_ratio(&v, &w, *s)?,
                ProbeKind::Kpv { exponents } => kpv_ratio(&v, &w, exponents)?,
                _ => unreachable!(),
            };
            return Ok((r, format!("{dv} x {dw}")));
        }
        let (v, d) = family.member(grid, i)?;
        let r = match self {
            ProbeKind::LogSobolev { variant } => log_sobolev_ratio(&v, *variant)?,
            ProbeKind::Gn { which } => gn_ratio(&v, *which)?,
            _ => unreachable!(),
        };
        Ok((r, d))
    }

    pub fn slots(&self, family: &FunctionFamily) -> usize {
        if self.is_pairwise() {
            family.count() / 2
        } else {
            family.count()
        }
    }
}

/// Evaluates `kind` over every member of `family` in parallel; the report is independent of thread count.
pub fn run_ensemble(kind: &ProbeKind, family: &FunctionFamily, grid: &Grid) -> Result<RatioReport> {
    family.validate(grid)?;
    let slots = kind.slots(family);
    if slots == 0 {
        return Err(Error::InvalidArgument("pairwise probes need at least two members".into()));
    }
    let members = (0..slots)
        .into_par_iter()
        .map(|i| kind.evaluate(family, grid, i))
        .collect::<Result<Vec<_>>>()?;
    RatioReport::from_members(kind.tag(), members)
}

/// Sup ratio at the grid's resolution and at twice the points per axis with the same members
/// (spectrally interpolated), and their relative change.
pub fn refinement_check(kind: &ProbeKind, family: &FunctionFamily, grid: &Grid) -> Result<[f64; 3]> {
    let coarse = run_ensemble(kind, family, grid)?.sup_ratio;
    let slots = kind.slots(family);
    let fine = (0..slots)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let take = |j: usize| -> Result<Field> { family.member(grid, j)?.0.refine(2) };
            Ok(match kind {
                ProbeKind::Algebra { s } => algebra_ratio(&take(2 * i)?, &take(2 * i + 1)?, *s)?,
                ProbeKind::Kpv { exponents } => kpv_ratio(&take(2 * i)?, &take(2 * i + 1)?, exponents)?,
                ProbeKind::LogSobolev { variant } => log_sobolev_ratio(&take(i)?, *variant)?,
                ProbeKind::Gn { which } => gn_ratio(&take(i)?, *which)?,
            })
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok([coarse, fine, (fine - coarse).abs() / coarse.abs().max(f64::MIN_POSITIVE)])
}

/// The concentrating family swept over cutoffs `2^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub n: Vec<u32>,
    /// `||v_n||_inf / ||v_n||_{H^{1/2}}`.
    pub naive: Vec<f64>,
    /// Log-Sobolev ratio of `v_n`, half-wave variant.
    pub log_ratio: Vec<f64>,
    pub h1: Vec<f64>,
    /// Slope of `ln(naive_n^2 - naive_0^2)` against `ln(ln h1_n - ln h1_0)`.
    pub growth_exponent: f64,
}

/// Sweeps the concentrating bumps `n = n_min .. n_min + count - 1` on the 1D grid and fits
/// how the squared naive quotient grows with `ln ||v_n||_{H^1}`. Growth linear in the
/// logarithm (exponent 1) is what a `sqrt(ln)` correction exactly compensates.
pub fn log_sobolev_sharpness(grid: &Grid, n_min: u32, count: usize) -> Result<SharpnessReport> {
    if grid.dimension() != 1 {
        return Err(Error::Unsupported("the sharpness sweep runs in 1D".into()));
    }
    if count < 3 {
        return Err(Error::InvalidArgument("need at least three cutoffs to fit an exponent".into()));
    }
    let family = FunctionFamily::ConcentratingBump { n_min, count };
    family.validate(grid)?;
    let mut rep = SharpnessReport {
        n: Vec::new(),
        naive: Vec::new(),
        log_ratio: Vec::new(),
        h1: Vec::new(),
        growth_exponent: f64::NAN,
    };
    for i in 0..count {
        let v = concentrating_bump(grid, n_min + i as u32);
        rep.n.push(n_min + i as u32);
        rep.naive.push(naive_sup_ratio(&v)?);
        rep.log_ratio.push(log_sobolev_ratio(&v, LogSobolevVariant::Hw1d)?);
        rep.h1.push(sobolev_norm(&v, 1.0)?);
    }
    let pts: Vec<(f64, f64)> = (1..count)
        .map(|i| {
            let x = (rep.h1[i].ln() - rep.h1[0].ln()).ln();
            let y = (rep.naive[i].powi(2) - rep.naive[0].powi(2)).ln();
            (x, y)
        })
        .collect();
    rep.growth_exponent = least_squares_slope(&pts);
    Ok(rep)
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
