//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use dispersive_core::ground_state::{petviashvili, GroundStateOptions, GroundStateProblem, GroundStateResult};
use dispersive_core::{Complex64, EquationKind, Field, Grid};

/// `(1/pi) int_0^K k sqrt(pi) e^{-k^2/4} cos(k x) dk`, the inverse Fourier integral of
/// `|k| * FT[exp(-x^2)]`, by composite Simpson with `intervals` panels on `[0, 16]`.
pub fn abs_d_gaussian(x: f64, intervals: usize) -> f64 {
    let kmax = 16.0;
    let h = kmax / intervals as f64;
    let g = |k: f64| k * PI.sqrt() * (-k * k / 4.0).exp() * (k * x).cos();
    let mut s = g(0.0) + g(kmax);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * g(i as f64 * h);
    }
    s * h / 3.0 / PI
}

/// Closed-form periodic solution of `(|D| + 1) u = u^2` on `[-L, L)`:
/// `kappa sinh(a) / (cosh(a) - cos(kappa x))` with `kappa = pi / L`, `tanh(a) = kappa`.
/// It tends to `2 / (1 + x^2)` as `L` grows.
/// `|D| exp(-x^2)` for the `2L`-periodization, by Poisson summation: the inverse Fourier
/// integral with nodes `k_m = pi m / L`, `(1/2L) sum_m |k_m| sqrt(pi) e^{-k_m^2/4} cos(k_m x)`.
pub fn abs_d_gaussian_periodic(x: f64, half_length: f64) -> f64 {
    let dk = PI / half_length;
    let mut s = 0.0;
    let mut m = 1;
    loop {
        let k = m as f64 * dk;
        let term = k * PI.sqrt() * (-k * k / 4.0).exp();
        if term < 1e-300 {
            break;
        }
        s += 2.0 * term * (k * x).cos();
        m += 1;
    }
    s / (2.0 * half_length)
}

pub fn bo_periodic(grid: &Grid) -> Field {
    let kappa = PI / grid.half_length();
    let a = kappa.atanh();
    Field::from_real_fn(*grid, |x, _| kappa * a.sinh() / (a.cosh() - (kappa * x).cos()))
}

pub fn bo_line(grid: &Grid) -> Field {
    Field::from_real_fn(*grid, |x, _| 2.0 / (1.0 + x * x))
}

pub fn solve(kind: EquationKind, grid: Grid, power: u32) -> GroundStateResult {
    let p = GroundStateProblem::new(kind, grid, power).unwrap();
    petviashvili(&p, &p.default_seed(), &GroundStateOptions::default()).unwrap()
}

pub fn r_ground(l: f64, n: usize) -> GroundStateResult {
    solve(EquationKind::HalfWave1d, Grid::periodic_1d(l, n).unwrap(), 4)
}

pub fn q_ground(l: f64, n: usize) -> GroundStateResult {
    solve(EquationKind::Nls2d, Grid::periodic_2d(l, n).unwrap(), 4)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Relative discrete L^2 distance.
pub fn l2_rel(a: &Field, b: &Field) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Smooth localized complex datum with no symmetry.
pub fn lumpy_1d(grid: &Grid, amp: f64) -> Field {
    Field::from_fn(*grid, |x, _| {
        Complex64::new(amp * (-x * x / 2.0).exp(), 0.6 * amp * x * (-(x - 1.0).powi(2) / 3.0).exp())
    })
}

pub fn lumpy_2d(grid: &Grid, amp: f64) -> Field {
    Field::from_fn(*grid, |x, y| {
        let r2 = x * x + y * y;
        Complex64::new(
            amp * (-r2 / 2.0).exp(),
            0.6 * amp * x * (-((x - 1.0).powi(2) + y * y) / 3.0).exp(),
        )
    })
}

/// Radial ground state of `-Q'' - Q'/r + Q = Q^4` by shooting on `Q(0)`, with the mass
/// `2 pi int Q^2 r dr` and focusing energy `2 pi int (Q'^2 / 2 - Q^5 / 5) r dr`.
/// The tail beyond the last reliable point is closed by the `K_0` asymptotics.
pub struct RadialGroundState {
    pub q0: f64,
    pub mass_sq: f64,
    pub energy: f64,
    /// Focusing modified energy `||Delta Q||^2 + 2 (Delta Q, Q^4) + 3 int Q^3 |Q'|^2`,
    /// with `Delta Q = Q - Q^4` read off the radial equation.
    pub modified: f64,
}

pub fn radial_ground_state() -> RadialGroundState {
    let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let q = y[0];
        let qp = y[1];
        let damp = if r == 0.0 { 0.0 } else { qp / r };
        [qp, -damp + q - q.abs().powi(3) * q]
    };
    let h = 1e-4;
    // Returns +1 when the trajectory overshoots (crosses zero), -1 when it turns back up.
    let shoot = |q0: f64, record: bool| -> (i32, Vec<(f64, f64, f64)>) {
        // Series start: Q(r) = q0 + c r^2 with c = (q0 - q0^4) / 4.
        let c = (q0 - q0.powi(4)) / 4.0;
        let mut r = h;
        let mut y = [q0 + c * h * h, 2.0 * c * h];
        let mut path = Vec::new();
        if record {
            path.push((0.0, q0, 0.0));
            path.push((r, y[0], y[1]));
        }
        while r < 30.0 {
            let k1 = rhs(r, y);
            let k2 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            r += h;
            if record {
                path.push((r, y[0], y[1]));
            }
            if y[0] < 0.0 {
                return (1, path);
            }
            if y[1] > 0.0 {
                return (-1, path);
            }
        }
        (0, path)
    };
    let (mut lo, mut hi) = (1.2, 3.0);
    assert_eq!(shoot(lo, false).0, -1);
    assert_eq!(shoot(hi, false).0, 1);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid, false).0 == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let q0 = 0.5 * (lo + hi);
    let (_, path) = shoot(q0, true);
    // Keep the part where the shot still tracks the decaying branch: Q' < 0 and Q above 1e-7.
    let cut = path
        .iter()
        .position(|&(r, q, qp)| r > 0.0 && (q < 1e-7 || qp >= 0.0))
        .unwrap_or(path.len());
    let path = &path[..cut];
    let mut mass_sq = 0.0;
    let mut energy = 0.0;
    let mut modified = 0.0;
    for w in path.windows(2) {
        let (r0, q0_, p0) = w[0];
        let (r1, q1, p1) = w[1];
        let dr = r1 - r0;
        mass_sq += 0.5 * dr * (q0_ * q0_ * r0 + q1 * q1 * r1);
        let e = |r: f64, q: f64, p: f64| (0.5 * p * p - q.abs().powi(5) / 5.0) * r;
        energy += 0.5 * dr * (e(r0, q0_, p0) + e(r1, q1, p1));
        let m = |r: f64, q: f64, p: f64| {
            let lap = q - q.powi(4);
            (lap * lap + 2.0 * lap * q.powi(4) + 3.0 * q.powi(3) * p * p) * r
        };
        modified += 0.5 * dr * (m(r0, q0_, p0) + m(r1, q1, p1));
    }
    // Tail: Q ~ A e^{-r} / sqrt(r) for large r, so int_R^inf Q^2 r dr ~ Q(R)^2 R / 2 and
    // int Q'^2 r dr matches it to leading order.
    let &(rt, qt, _) = path.last().unwrap();
    mass_sq += qt * qt * rt / 2.0;
    energy += 0.5 * qt * qt * rt / 2.0;
    RadialGroundState {
        q0,
        mass_sq: 2.0 * PI * mass_sq,
        energy: 2.0 * PI * energy,
        modified: 2.0 * PI * modified,
    }
}
