mod common;

use common::*;
use dispersive_core::ground_state::{
    candidate_residual, gn_constant, gn_quotient, petviashvili, pohozaev_check, residual, threshold_profile,
    threshold_quantities, GroundStateOptions, GroundStateProblem, GroundStateResult, GroundStateSummary,
};
use dispersive_core::{Complex64, EquationKind, Error, Field, Grid, Multiplier, Sampling};

fn hw_problem(l: f64, n: usize, p: u32) -> GroundStateProblem {
    GroundStateProblem::new(EquationKind::HalfWave1d, Grid::periodic_1d(l, n).unwrap(), p).unwrap()
}

#[test]
fn quadratic_half_wave_matches_the_periodic_closed_form() {
    let p = hw_problem(256.0, 8192, 2);
    let exact = bo_periodic(p.grid());
    assert!(candidate_residual(&p, &exact).unwrap() < 1e-8);
    let r = petviashvili(&p, &p.default_seed(), &GroundStateOptions::default()).unwrap();
    assert!(r.profile.sup_distance(&exact).unwrap() < 1e-8);
    assert!(r.gn_constant.is_none() && gn_constant(&r).is_err());
    // On the line the profile is 2 / (1 + x^2); the box perturbs it at order 1/L^2.
    assert!(r.profile.sup_distance(&bo_line(p.grid())).unwrap() < 1e-3);
}

#[test]
fn r_is_real_even_positive_and_self_consistent() {
    let r = r_ground(40.0, 8192);
    assert!(r.residual < 1e-10);
    let v = r.profile.values();
    let n = v.len();
    let peak = r.profile.max_modulus();
    assert_eq!(v[n / 2].re, peak);
    for j in 1..n {
        assert_eq!(v[j].im, 0.0);
        assert_eq!(v[j], v[n - j]);
        assert!(v[j].re > -1e-10 * peak);
    }
    assert!((r.stabilizer().unwrap() - 1.0).abs() < 1e-8);
    // After the transient the residual falls monotonically.
    let h = &r.residual_history;
    let start = h.len() / 5;
    assert!(h[start..].windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-6)), "{h:?}");
    assert_eq!(r.iterations, h.len());
}

#[test]
fn pohozaev_and_threshold_relations() {
    let q = q_ground(12.0, 256);
    let k2 = q.kinetic_norm.powi(2);
    assert!(rel(k2, 1.5 * q.mass * q.mass) < 1e-7);
    let [a, b] = pohozaev_check(&q).unwrap();
    assert!((a - 5.0).abs() < 1e-7 && (b - 5.0).abs() < 1e-7, "{a} {b}");
    // The energy is K^2 / 2 - K^2 (1 + M^2 / K^2) / 5 = K^2 / 6 at the ground state.
    assert!(rel(q.energy, k2 / 6.0) < 1e-7);
    let t = threshold_quantities(&q).unwrap();
    let c5 = gn_constant(&q).unwrap().powi(5);
    assert!(rel(t.x_max, t.x_crit) < 1e-7);
    assert!(rel(t.f_at_xmax, t.e_crit) < 1e-7);
    assert_eq!(t.f_at_xmax, threshold_profile(t.x_max, c5));
    assert!(threshold_profile(0.99 * t.x_max, c5) < t.f_at_xmax);
    assert!(threshold_profile(1.01 * t.x_max, c5) < t.f_at_xmax);
}

/// R decays like `x^{-2}`, so on a torus the dilation identities pick up an `O(L^{-2})` defect.
#[test]
fn r_pohozaev_defect_shrinks_like_inverse_box_squared() {
    let defect = |l: f64, n: usize| {
        let r = r_ground(l, n);
        (r.kinetic_norm.powi(2) / (1.5 * r.mass * r.mass) - 1.0).abs()
    };
    let (coarse, fine) = (defect(40.0, 8192), defect(80.0, 16384));
    assert!(coarse < 3e-3 && fine < 1e-3);
    assert!((3.8..4.2).contains(&(coarse / fine)), "{coarse} {fine}");
}

#[test]
fn different_seeds_reach_the_same_profile() {
    let p = hw_problem(20.0, 2048, 4);
    let opts = GroundStateOptions::default();
    let base = petviashvili(&p, &p.default_seed(), &opts).unwrap();
    let seeds = [
        Field::from_real_fn(*p.grid(), |x, _| 3.0 / (1.0 + x * x)),
        Field::from_real_fn(*p.grid(), |x, _| 0.5 * (-x * x / 8.0).exp()),
        Field::from_real_fn(*p.grid(), |x, _| (-x.abs()).exp() + 0.1 * (-(x - 2.0).powi(2)).exp()),
    ];
    for s in &seeds {
        let r = petviashvili(&p, s, &opts).unwrap();
        assert!(r.profile.sup_distance(&base.profile).unwrap() < 1e-9);
    }
}

#[test]
fn perturbed_profile_fails_the_residual() {
    let r = r_ground(20.0, 2048);
    let bumped = &r.profile + &Field::from_real_fn(*r.profile.grid(), |x, _| 0.01 * (-x * x).exp());
    let rebuilt = GroundStateResult::from_profile(EquationKind::HalfWave1d, 4, bumped).unwrap();
    assert!(rebuilt.residual > 1e-2);
    let same = GroundStateResult::from_profile(EquationKind::HalfWave1d, 4, r.profile.clone()).unwrap();
    assert!(rel(same.residual, r.residual) < 1e-6);
    assert_eq!(same.iterations, 0);
    assert!(rel(same.gn_constant.unwrap(), r.gn_constant.unwrap()) < 1e-14);
}

#[test]
fn ground_state_maximizes_the_gn_quotient() {
    let r = r_ground(40.0, 8192);
    let c = r.gn_constant.unwrap();
    let g = *r.profile.grid();
    assert!(rel(gn_quotient(&r.profile).unwrap(), c) < 1e-13);
    for w in [0.3, 0.7, 1.0, 2.0, 5.0] {
        let gauss = Field::from_real_fn(g, |x, _| (-x * x / (w * w)).exp());
        let lorentz = Field::from_real_fn(g, |x, _| 1.0 / (1.0 + (x / w).powi(2)));
        for f in [gauss, lorentz] {
            assert!(gn_quotient(&f).unwrap() <= c + 1e-6);
        }
    }
    assert!(gn_quotient(&Field::zeros(g)).is_err());
}

/// Rescaling by `u(x) -> sqrt(mu) u(mu x)` maps the grid of half-length `L` to `L / mu` with
/// the same samples, so the discrete quotient is exactly invariant.
#[test]
fn gn_constant_is_dilation_invariant_on_matched_grids() {
    let r = r_ground(20.0, 2048);
    let mu = 2.0;
    let g = Grid::periodic_1d(20.0 / mu, 2048).unwrap();
    let v = Field::new(g, r.profile.values().iter().map(|z| z * mu.sqrt()).collect()).unwrap();
    assert!(rel(gn_quotient(&v).unwrap(), r.gn_constant.unwrap()) < 1e-13);
}

#[test]
fn q_ground_state_on_a_coarse_box() {
    let q = q_ground(12.0, 128);
    assert!(q.residual < 1e-10);
    let v = q.profile.values();
    let n = q.profile.grid().points();
    let c = n / 2;
    assert_eq!(v[c * n + c].re, q.profile.max_modulus());
    for i in 1..n {
        for j in 1..n {
            assert!((v[i * n + j] - v[j * n + i]).norm() < 1e-15);
            assert!((v[i * n + j] - v[(n - i) * n + j]).norm() < 1e-15);
        }
    }
    let radial = radial_ground_state();
    assert!(rel(q.mass * q.mass, radial.mass_sq) < 1e-3);
}

#[test]
fn failure_modes() {
    let p = hw_problem(20.0, 512, 4);
    let capped = GroundStateOptions { max_iter: 1, ..GroundStateOptions::default() };
    match petviashvili(&p, &p.default_seed(), &capped) {
        Err(Error::Divergence { iterations, residual, residual_history }) => {
            assert_eq!(iterations, 1);
            assert_eq!(residual_history, vec![residual]);
        }
        other => panic!("expected divergence, got {other:?}"),
    }
    let complex = Field::from_fn(*p.grid(), |x, _| Complex64::new((-x * x).exp(), 0.5 * (-x * x).exp()));
    assert!(matches!(petviashvili(&p, &complex, &GroundStateOptions::default()), Err(Error::NonRealDrift { .. })));
    assert!(petviashvili(&p, &Field::zeros(*p.grid()), &GroundStateOptions::default()).is_err());
    let bad_tol = GroundStateOptions { tol: 0.0, ..GroundStateOptions::default() };
    assert!(petviashvili(&p, &p.default_seed(), &bad_tol).is_err());
    let other = Field::zeros(Grid::periodic_1d(20.0, 256).unwrap());
    assert!(matches!(petviashvili(&p, &other, &GroundStateOptions::default()), Err(Error::GridMismatch(_))));
    assert!(GroundStateProblem::new(EquationKind::Nls2d, Grid::periodic_1d(1.0, 16).unwrap(), 4).is_err());
    assert!(GroundStateProblem::new(EquationKind::HalfWave1d, Grid::periodic_1d(1.0, 16).unwrap(), 1).is_err());
    let soft = Multiplier::fractional(1.0);
    assert!(GroundStateProblem::with_operator(EquationKind::HalfWave1d, soft, Grid::periodic_1d(1.0, 16).unwrap(), 4).is_err());
}

#[test]
fn small_box_triggers_the_decay_warning() {
    let r = r_ground(4.0, 512);
    assert!(!r.warnings.is_empty());
    assert!(r.warnings[0].contains("enlarge the box"));
}

#[test]
fn summary_round_trips_through_json() {
    let r = r_ground(20.0, 2048);
    let s = r.summary();
    assert!(s.pohozaev.is_some() && s.threshold.is_some());
    let text = serde_json::to_string(&s).unwrap();
    let back: GroundStateSummary = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["surprise"] = serde_json::json!(1);
    assert!(serde_json::from_value::<GroundStateSummary>(value).is_err());
}

#[test]
fn oversampled_iteration_also_converges() {
    let p = hw_problem(10.0, 2048, 4);
    let opts = GroundStateOptions { sampling: Sampling::Oversampled, ..GroundStateOptions::default() };
    let r = petviashvili(&p, &p.default_seed(), &opts).unwrap();
    assert!(residual(&p, &r.profile, Sampling::Oversampled).unwrap() < 1e-10);
    let direct = petviashvili(&p, &p.default_seed(), &GroundStateOptions::default()).unwrap();
    assert!(r.profile.sup_distance(&direct.profile).unwrap() < 1e-8);
}
