mod common;

use std::f64::consts::PI;

use proptest::prelude::*;

use common::*;
use dispersive_core::probe::{
    algebra_ratio, concentrating_bump, gn_ratio, kpv_ratio, log_sobolev_ratio, log_sobolev_sharpness, naive_sup_ratio,
    refinement_check, run_ensemble, FunctionFamily, GnInequality, KpvExponents, LogSobolevVariant, ProbeKind,
    RatioReport,
};
use dispersive_core::{Complex64, Error, Field, Grid};

fn g1() -> Grid {
    Grid::periodic_1d(10.0, 256).unwrap()
}

fn random(grid: &Grid, seed: u64, i: usize) -> Field {
    let fam = FunctionFamily::BandlimitedRandom { seed, count: i + 1, cutoff: Some(24), decay: 1.0, amplitude: 1.0 };
    fam.member(grid, i).unwrap().0
}

#[test]
fn log_sobolev_closed_forms() {
    for l in [1.0, 4.0, 10.0] {
        let g = Grid::periodic_1d(l, 64).unwrap();
        assert_eq!(log_sobolev_ratio(&Field::zeros(g), LogSobolevVariant::Hw1d).unwrap(), 0.0);
        let one = Field::from_real_fn(g, |_, _| 1.0);
        let n = (2.0 * l).sqrt();
        let exact = 1.0 / (n * (2.0 + n).ln().sqrt() + 1.0);
        assert!(rel(log_sobolev_ratio(&one, LogSobolevVariant::Hw1d).unwrap(), exact) < 1e-14);
        // In 2D every Sobolev norm of the constant is the square root of the area.
        let g2 = Grid::periodic_2d(l, 16).unwrap();
        let one2 = Field::from_real_fn(g2, |_, _| 1.0);
        let n2 = 2.0 * l;
        let exact2 = 1.0 / (n2 * (2.0 + n2).ln().sqrt() + 1.0);
        assert!(rel(log_sobolev_ratio(&one2, LogSobolevVariant::Nls2d).unwrap(), exact2) < 1e-14);
    }
    let g2 = Grid::periodic_2d(1.0, 16).unwrap();
    assert!(matches!(log_sobolev_ratio(&Field::zeros(g2), LogSobolevVariant::Hw1d), Err(Error::Unsupported(_))));
}

/// A single mode `A e^{i k x}` with `k = pi m / L` gives `(2 pi |m|)^{-1/2}` for both quartic
/// inequalities, and `(2 pi |m|)^{-3/10}` in 1D and `(2 pi |m|)^{-3/5}` in 2D for the quintic one,
/// whatever `A` and `L`.
#[test]
fn single_mode_gn_ratios() {
    for l in [1.0, PI, 12.0] {
        for m in [1.0f64, 3.0, 7.0] {
            let k = PI * m / l;
            let g = Grid::periodic_1d(l, 64).unwrap();
            let g2 = Grid::periodic_2d(l, 32).unwrap();
            for a in [0.01, 1.0, 30.0] {
                let wave = Field::from_fn(g, |x, _| Complex64::from_polar(a, k * x));
                let wave2 = Field::from_fn(g2, |_, y| Complex64::from_polar(a, -k * y));
                let quartic = (2.0 * PI * m).powf(-0.5);
                assert!(rel(gn_ratio(&wave, GnInequality::HalfL4).unwrap(), quartic) < 1e-12);
                assert!(rel(gn_ratio(&wave2, GnInequality::GnL4).unwrap(), quartic) < 1e-12);
                assert!(rel(gn_ratio(&wave, GnInequality::GnL5).unwrap(), (2.0 * PI * m).powf(-0.3)) < 1e-12);
                assert!(rel(gn_ratio(&wave2, GnInequality::GnL5).unwrap(), (2.0 * PI * m).powf(-0.6)) < 1e-12);
            }
        }
    }
}

#[test]
fn zero_denominator_convention() {
    let g = g1();
    for which in [GnInequality::HalfL4, GnInequality::GnL5] {
        assert_eq!(gn_ratio(&Field::zeros(g), which).unwrap(), 0.0);
    }
    assert_eq!(algebra_ratio(&Field::zeros(g), &Field::zeros(g), 0.5).unwrap(), 0.0);
    // A constant has no kinetic part but a nonzero L^4 norm of nothing: the quartic side is also zero.
    let one = Field::from_real_fn(g, |_, _| 1.0);
    assert_eq!(gn_ratio(&one, GnInequality::HalfL4).unwrap(), 0.0);
    assert!(gn_ratio(&one, GnInequality::GnL5).is_err());
    assert!(matches!(gn_ratio(&one, GnInequality::GnL4), Err(Error::Unsupported(_))));
}

#[test]
fn algebra_property_examples() {
    let g = g1();
    let one = Field::from_real_fn(g, |_, _| 1.0);
    let gauss = Field::from_real_fn(g, |x, _| (-x * x).exp());
    for s in [0.0, 0.5, 1.0, 2.0] {
        for v in [gauss.clone(), random(&g, 5, 2)] {
            let r = algebra_ratio(&v, &one, s).unwrap();
            assert!(r <= 1.0 + 1e-14, "s = {s}: {r}");
            let w = random(&g, 6, 3);
            assert_eq!(algebra_ratio(&v, &w, s).unwrap(), algebra_ratio(&w, &v, s).unwrap());
        }
    }
    let r = algebra_ratio(&gauss, &gauss, 0.5).unwrap();
    assert!(r.is_finite() && r > 0.0 && r <= 1.0);
    assert!(algebra_ratio(&gauss, &Field::zeros(Grid::periodic_1d(10.0, 128).unwrap()), 0.5).is_err());
}

#[test]
fn kpv_examples() {
    let g = g1();
    let ex = KpvExponents::default();
    let f = random(&g, 9, 0);
    let c = Field::from_fn(g, |_, _| Complex64::new(0.7, -0.2));
    assert!(kpv_ratio(&f, &c, &ex).unwrap() < 1e-13);
    let gauss = Field::from_real_fn(g, |x, _| (-x * x).exp());
    let r = kpv_ratio(&gauss, &gauss, &ex).unwrap();
    assert!(r.is_finite() && r > 0.0);
    for bad in [
        KpvExponents { s: 1.0, s1: 1.0, ..ex },
        KpvExponents { s1: 0.3, ..ex },
        KpvExponents { p: 1.0, ..ex },
        KpvExponents { p: 1.5, ..ex },
        KpvExponents { r: f64::INFINITY, ..ex },
    ] {
        assert!(matches!(kpv_ratio(&f, &f, &bad), Err(Error::InvalidArgument(_))), "{bad:?}");
    }
    let split = KpvExponents { s: 0.6, s1: 0.3, s2: 0.3, p: 1.5, q: 3.0, r: 3.0 };
    assert!(kpv_ratio(&f, &random(&g, 9, 1), &split).unwrap().is_finite());
}

#[test]
fn large_ensembles_are_finite_and_kpv_is_refinement_stable() {
    let g = g1();
    let fam = FunctionFamily::BandlimitedRandom { seed: 2024, count: 2000, cutoff: Some(32), decay: 1.0, amplitude: 1.0 };
    for kind in [
        ProbeKind::Gn { which: GnInequality::HalfL4 },
        ProbeKind::Gn { which: GnInequality::GnL5 },
        ProbeKind::LogSobolev { variant: LogSobolevVariant::Hw1d },
    ] {
        let rep = run_ensemble(&kind, &fam, &g).unwrap();
        assert_eq!(rep.ratios.len(), 2000);
        assert!(rep.sup_ratio.is_finite() && rep.sup_ratio > 0.0);
    }
    let kpv = ProbeKind::Kpv { exponents: KpvExponents::default() };
    let [coarse, fine, change] = refinement_check(&kpv, &fam, &g).unwrap();
    assert!(coarse.is_finite() && fine.is_finite());
    assert!(change < 0.1, "{coarse} -> {fine}");
    let rep = run_ensemble(&kpv, &fam, &g).unwrap();
    assert_eq!(rep.ratios.len(), 1000);
    assert_eq!(rep.sup_ratio, coarse);
}

#[test]
fn ensembles_reproduce_under_a_fixed_seed() {
    let g2 = Grid::periodic_2d(6.0, 32).unwrap();
    let fam = FunctionFamily::PlaneWaveMix { seed: 4, count: 30, modes: 5, cutoff: 6 };
    let kind = ProbeKind::Gn { which: GnInequality::GnL4 };
    let a = run_ensemble(&kind, &fam, &g2).unwrap();
    let b = run_ensemble(&kind, &fam, &g2).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let other = FunctionFamily::PlaneWaveMix { seed: 5, count: 30, modes: 5, cutoff: 6 };
    assert_ne!(run_ensemble(&kind, &other, &g2).unwrap().ratios, a.ratios);
}

#[test]
fn gaussian_sweep_stays_below_the_ground_state_constant() {
    let r = r_ground(40.0, 8192);
    let c = r.gn_constant.unwrap();
    let fam = FunctionFamily::GaussianWidthSweep { min_width: 0.2, max_width: 8.0, count: 25 };
    let rep = run_ensemble(&ProbeKind::Gn { which: GnInequality::GnL5 }, &fam, r.profile.grid()).unwrap();
    assert!(rep.sup_ratio < c, "{} vs {c}", rep.sup_ratio);
    assert!(rel(gn_ratio(&r.profile, GnInequality::GnL5).unwrap(), c) < 1e-13);
}

#[test]
fn concentrating_family_needs_the_logarithm() {
    let s = log_sobolev_sharpness(&Grid::periodic_1d(PI, 4096).unwrap(), 3, 8).unwrap();
    assert_eq!(s.n, (3..11).collect::<Vec<_>>());
    assert!((s.growth_exponent - 1.0).abs() <= 0.2, "{}", s.growth_exponent);
    // The naive quotient keeps climbing while the logarithmic one levels off.
    assert!(s.naive.windows(2).all(|w| w[1] > w[0]));
    assert!(s.naive[7] / s.naive[0] > 1.4);
    let (lo, hi) = s.log_ratio.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 1.25, "{:?}", s.log_ratio);
    let v0 = concentrating_bump(&Grid::periodic_1d(PI, 4096).unwrap(), 3);
    let series: f64 = (-8i32..=8).map(|m| 1.0 / (1.0 + m.abs() as f64)).sum();
    assert!((v0.max_modulus() - series).abs() < 1e-12 * series);
    let v = concentrating_bump(&Grid::periodic_1d(PI, 4096).unwrap(), 5);
    assert_eq!(naive_sup_ratio(&v).unwrap(), s.naive[2]);
}

#[test]
fn report_construction_and_csv() {
    let rep = RatioReport::from_members(
        "t",
        vec![(0.5, "a".into()), (2.0, "b".into()), (2.0, "c".into()), (1.0, "d".into())],
    )
    .unwrap();
    assert_eq!((rep.sup_ratio, rep.argmax_index, rep.argmax_descriptor.as_str()), (2.0, 1, "b"));
    assert_eq!(rep.to_csv(), "member,ratio\n0,0.5\n1,2\n2,2\n3,1\n");
    assert!(RatioReport::from_members("t", vec![]).is_err());
    assert!(RatioReport::from_members("t", vec![(f64::NAN, "x".into())]).is_err());
    assert!(RatioReport::from_members("t", vec![(-1.0, "x".into())]).is_err());
}

#[test]
fn family_and_probe_configs_are_strict() {
    let fam: FunctionFamily = serde_json::from_str(r#"{"kind":"bandlimited_random","seed":3,"count":4}"#).unwrap();
    assert_eq!(fam, FunctionFamily::bandlimited(3, 4));
    assert!(serde_json::from_str::<FunctionFamily>(r#"{"kind":"bandlimited_random","seed":3,"count":4,"x":1}"#).is_err());
    assert!(serde_json::from_str::<FunctionFamily>(r#"{"kind":"mystery","count":4}"#).is_err());
    let kind: ProbeKind = serde_json::from_str(r#"{"inequality":"gn","which":"gn_l5"}"#).unwrap();
    assert_eq!(kind, ProbeKind::Gn { which: GnInequality::GnL5 });
    assert!(serde_json::from_str::<ProbeKind>(r#"{"inequality":"gn","which":"gn_l5","extra":0}"#).is_err());
    let bad_sweep = FunctionFamily::GaussianWidthSweep { min_width: -1.0, max_width: 2.0, count: 3 };
    assert!(run_ensemble(&kind, &bad_sweep, &g1()).is_err());
    let empty = FunctionFamily::bandlimited(1, 0);
    assert!(run_ensemble(&kind, &empty, &g1()).is_err());
    let single = FunctionFamily::bandlimited(1, 1);
    assert!(run_ensemble(&ProbeKind::Algebra { s: 0.5 }, &single, &g1()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous_ratios_ignore_amplitude(seed in any::<u64>(), c in 0.01f64..100.0, d in 0.01f64..100.0) {
        let g = g1();
        let (v, w) = (random(&g, seed, 0), random(&g, seed, 1));
        for which in [GnInequality::HalfL4, GnInequality::GnL5] {
            let (a, b) = (gn_ratio(&v.scale(c), which).unwrap(), gn_ratio(&v, which).unwrap());
            prop_assert!(rel(a, b) < 1e-10);
        }
        let ex = KpvExponents::default();
        prop_assert!(rel(kpv_ratio(&v.scale(c), &w.scale(d), &ex).unwrap(), kpv_ratio(&v, &w, &ex).unwrap()) < 1e-10);
        prop_assert!(rel(algebra_ratio(&v.scale(c), &w.scale(d), 0.5).unwrap(), algebra_ratio(&v, &w, 0.5).unwrap()) < 1e-10);
    }

    #[test]
    fn grid_translations_fix_every_ratio(seed in any::<u64>(), shift in 0usize..256) {
        let g = g1();
        let (v, w) = (random(&g, seed, 0), random(&g, seed, 1));
        let (vs, ws) = (v.shifted([shift, 0]), w.shifted([shift, 0]));
        let ls = LogSobolevVariant::Hw1d;
        prop_assert!(rel(log_sobolev_ratio(&vs, ls).unwrap(), log_sobolev_ratio(&v, ls).unwrap()) < 1e-10);
        prop_assert!(rel(gn_ratio(&vs, GnInequality::HalfL4).unwrap(), gn_ratio(&v, GnInequality::HalfL4).unwrap()) < 1e-10);
        let ex = KpvExponents::default();
        prop_assert!(rel(kpv_ratio(&vs, &ws, &ex).unwrap(), kpv_ratio(&v, &w, &ex).unwrap()) < 1e-10);
    }
}
