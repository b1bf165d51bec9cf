mod common;

use std::f64::consts::PI;

use common::*;
use dispersive_core::energies::{
    coercivity_probe, conserved_energy, dt_field, identity_check, lemma_rhs_hw, lemma_rhs_nls, modified_energy,
    modified_energy_hw, modified_energy_nls, modified_energy_nls_terms, residuals_csv, BoundStatistics, IdentityConfig,
};
use dispersive_core::{Complex64, Coupling, EquationKind, EvolutionProblem, Field, Grid, StepperConfig};

fn problem(kind: EquationKind, c: Coupling, g: Grid) -> EvolutionProblem {
    EvolutionProblem::new(kind, c, g).unwrap()
}

#[test]
fn conserved_energy_of_gaussians() {
    // 2D: ||grad e^{-|x|^2}||^2 = pi and ||e^{-|x|^2}||_5^5 = pi / 5.
    let g2 = Grid::periodic_2d(8.0, 128).unwrap();
    let f2 = Field::from_real_fn(g2, |x, y| (-(x * x + y * y)).exp());
    // 1D: the torus half-derivative energy is the Poisson sum (1/2L) sum |k_m| |f^(k_m)|^2 with
    // f^(k) = sqrt(pi) e^{-k^2/4}, and ||e^{-x^2}||_5^5 = sqrt(pi / 5).
    let l = 20.0;
    let g1 = Grid::periodic_1d(l, 1024).unwrap();
    let f1 = Field::from_real_fn(g1, |x, _| (-x * x).exp());
    let kinetic_1d: f64 = (1..400).map(|m| {
        let k = m as f64 * PI / l;
        2.0 * k * PI * (-k * k / 2.0).exp()
    }).sum::<f64>() / (2.0 * l);
    for c in [Coupling::Focusing, Coupling::Defocusing] {
        let lam = c.lambda();
        let e2 = conserved_energy(&f2, &problem(EquationKind::Nls2d, c, g2)).unwrap();
        let exact2 = PI / 2.0 + lam * PI / 25.0;
        assert!(rel(e2, exact2) < 1e-8, "{e2} vs {exact2}");
        let e1 = conserved_energy(&f1, &problem(EquationKind::HalfWave1d, c, g1)).unwrap();
        let exact1 = 0.5 * kinetic_1d + lam / 5.0 * (PI / 5.0).sqrt();
        assert!(rel(e1, exact1) < 1e-8, "{e1} vs {exact1}");
    }
}

#[test]
fn single_mode_closed_forms_across_modes() {
    for (m, a) in [(1.0, 0.3), (5.0, 1.1), (9.0, 0.6)] {
        let l = 4.0;
        let g = Grid::periodic_1d(l, 64).unwrap();
        let k = m * PI / l;
        let f = Field::from_fn(g, |x, _| Complex64::from_polar(a, -k * x));
        for lam in [1.0, -1.0] {
            let mf = modified_energy_hw(&f, lam).unwrap();
            let exact = 2.0 * l * (a * a * k * k + 2.0 * lam * k * a.powi(5));
            assert!((mf - exact).abs() < 1e-11 * exact.abs().max(1.0));
            let rhs = lemma_rhs_hw(&f, lam, 0.0).unwrap();
            assert!(rhs.total.abs() < 1e-9 * exact.abs().max(1.0));
        }
        let g2 = Grid::periodic_2d(l, 32).unwrap();
        let f2 = Field::from_fn(g2, |x, y| Complex64::from_polar(a, k * (x - y)));
        let k2 = 2.0 * k * k;
        for lam in [1.0, -1.0] {
            let t = modified_energy_nls_terms(&f2, lam).unwrap();
            assert!(t.get("grad_density").unwrap().abs() < 1e-9 * t.total.abs());
            let exact = (2.0 * l).powi(2) * (a * a * k2 * k2 + 2.0 * lam * k2 * a.powi(5));
            assert!(rel(t.total, exact) < 1e-11);
        }
    }
}

#[test]
fn q_against_the_radial_oracle() {
    let radial = radial_ground_state();
    let q = q_ground(12.0, 256);
    let mass_sq = q.mass * q.mass;
    assert!(rel(mass_sq, radial.mass_sq) < 1e-4, "{mass_sq} vs {}", radial.mass_sq);
    assert!(rel(q.energy, radial.energy) < 1e-4, "{} vs {}", q.energy, radial.energy);
    assert!(rel(q.profile.max_modulus(), radial.q0) < 1e-4);
    let e = modified_energy_nls(&q.profile, -1.0).unwrap();
    assert!(rel(e, radial.modified) < 1e-5, "{e} vs {}", radial.modified);
}

#[test]
fn modified_energy_of_r_is_resolution_stable() {
    // R carries a slowly decaying spectrum; N = 1024 resolves it on a box of half-length 10.
    let values: Vec<f64> = [1024, 2048, 4096]
        .iter()
        .map(|&n| modified_energy_hw(&r_ground(10.0, n).profile, -1.0).unwrap())
        .collect();
    for v in &values[1..] {
        assert!(v.is_finite() && rel(*v, values[0]) < 1e-5, "{values:?}");
    }
}

#[test]
fn time_derivative_of_ground_states() {
    let r = r_ground(40.0, 8192);
    let p = problem(EquationKind::HalfWave1d, Coupling::Focusing, *r.profile.grid());
    let expect = r.profile.map(|v| Complex64::i() * v);
    let d = dt_field(&r.profile, &p).unwrap();
    let dist = d.sup_distance(&expect).unwrap();
    assert!(dist < 1e-9, "{dist}");

    let q = q_ground(6.0, 256);
    let p = problem(EquationKind::Nls2d, Coupling::Focusing, *q.profile.grid());
    let d = dt_field(&q.profile, &p).unwrap();
    let dist = d.sup_distance(&q.profile.map(|v| Complex64::i() * v)).unwrap();
    assert!(dist < 1e-9, "{dist}");
    assert_eq!(dt_field(&Field::zeros(*q.profile.grid()), &p).unwrap().max_modulus(), 0.0);
}

#[test]
fn real_data_kills_the_imaginary_septic_pairings() {
    let g = Grid::periodic_2d(5.0, 32).unwrap();
    let f = Field::from_real_fn(g, |x, y| 0.9 * (-(x * x + 0.5 * y * y)).exp() + 0.2 * (-((x - 1.0).powi(2) + y * y)).exp());
    for lam in [1.0, -1.0] {
        let t = lemma_rhs_nls(&f, lam, 1e-10).unwrap();
        assert!(t.get("im_grad_septic").unwrap().abs() < 1e-13);
    }
    let g1 = Grid::periodic_1d(10.0, 128).unwrap();
    let f1 = Field::from_real_fn(g1, |x, _| (-x * x).exp() * (1.0 + 0.3 * x));
    let t = lemma_rhs_hw(&f1, -1.0, 1e-10).unwrap();
    assert!(t.get("im_d_septic").unwrap().abs() < 1e-13);
}

#[test]
fn identity_check_on_zero_data() {
    let p = problem(EquationKind::HalfWave1d, Coupling::Focusing, Grid::periodic_1d(5.0, 64).unwrap());
    let run = identity_check(&p, &Field::zeros(p.grid), &StepperConfig::new(0.01, 0.05, 1).unwrap(), &IdentityConfig::new(1e-3))
        .unwrap();
    assert_eq!(run.residuals.len(), 6);
    for r in &run.residuals {
        assert_eq!((r.lhs, r.rhs, r.residual), (0.0, 0.0, 0.0));
        assert!(r.terms.iter().all(|t| t.1 == 0.0));
    }
}

/// Along trajectories the identity holds to the differencing error, all pairings that must
/// be real stay real, and the bound ratios stay finite.
#[test]
fn identity_along_trajectories() {
    let cfg = StepperConfig::new(1e-3, 0.05, 25).unwrap();
    let mut stats = Vec::new();
    for c in [Coupling::Focusing, Coupling::Defocusing] {
        let p1 = problem(EquationKind::HalfWave1d, c, Grid::periodic_1d(20.0, 512).unwrap());
        let p2 = problem(EquationKind::Nls2d, c, Grid::periodic_2d(8.0, 64).unwrap());
        for (p, phi) in [(p1, lumpy_1d(&p1.grid, 0.8)), (p2, lumpy_2d(&p2.grid, 0.8))] {
            let run = identity_check(&p, &phi, &cfg, &IdentityConfig::new(1e-4)).unwrap();
            assert!(run.max_relative_residual() < 1e-4, "{:?} {}", p.kind, run.max_relative_residual());
            for r in &run.residuals {
                assert!(r.max_imag < 1e-10, "imaginary part {}", r.max_imag);
                assert_eq!(r.residual, (r.lhs - r.rhs).abs());
                assert!((r.terms.iter().map(|t| t.1).sum::<f64>() - r.rhs).abs() < 1e-12 * r.rhs.abs().max(1.0));
            }
            let csv = residuals_csv(&run.residuals);
            assert_eq!(csv.lines().count(), run.residuals.len() + 1);
            stats.push(run.bound_statistics());
        }
    }
    let merged = BoundStatistics::merge(&stats);
    assert_eq!(merged.samples, 12);
    assert!(merged.sup_ratio.is_finite() && merged.mean_abs_ratio.is_finite());
}

#[test]
fn modified_energy_dispatch_and_coercivity() {
    let g = Grid::periodic_2d(6.0, 32).unwrap();
    let f = lumpy_2d(&g, 1.0);
    let p = problem(EquationKind::Nls2d, Coupling::Focusing, g);
    assert_eq!(modified_energy(&f, &p).unwrap().total, modified_energy_nls(&f, -1.0).unwrap());
    let q = q_ground(12.0, 128);
    let probe = coercivity_probe(&q.profile, -1.0).unwrap();
    // Q sits far outside the small-data regime: the quartic pairing overwhelms the bound.
    let radial = radial_ground_state();
    assert!(rel(probe.bound, radial.modified + radial.mass_sq) < 1e-4, "{probe:?}");
    assert!(probe.bound < 0.0 && probe.ratio < 0.0 && probe.h2_sq > 0.0);
    // The ratio approaches a constant as amplitude grows with the H^1 norm held by rescaling.
    let bump = Field::from_real_fn(g, |x, y| (-(x * x + y * y)).exp());
    let ratios: Vec<f64> = [1.0, 4.0, 16.0]
        .iter()
        .map(|&s| {
            let narrow = Field::from_real_fn(g, |x, y| (-(s * (x * x + y * y))).exp());
            let scale = dispersive_core::sobolev_norm(&bump, 1.0).unwrap() / dispersive_core::sobolev_norm(&narrow, 1.0).unwrap();
            coercivity_probe(&narrow.scale(scale), -1.0).unwrap().ratio
        })
        .collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0), "{ratios:?}");
}
