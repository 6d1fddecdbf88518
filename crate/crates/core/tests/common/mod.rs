//! Independent reference values and random inputs shared by the test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use repvol_core::hyperbolic::from_klein;
use repvol_core::{Dimension, ExtendedPoint, Input, Isometry, KleinPoint};

pub fn corpus(name: &str) -> Input {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    let bytes = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    repvol_core::parse(&bytes).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

fn x_log_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `−∫₀^θ log|2 sin t| dt` for θ in [0, π]. The endpoint singularities are
/// split off as `log t + log(π − t)` and integrated exactly.
pub fn lobachevsky_integral(theta: f64) -> f64 {
    assert!((0.0..=PI).contains(&theta));
    let smooth = |t: f64| {
        if t == 0.0 {
            (2.0 / PI).ln()
        } else {
            (2.0 * t.sin() / (t * (PI - t))).ln()
        }
    };
    let regular = integrate(smooth, 0.0, theta, 16);
    let log_t = x_log_x(theta) - theta;
    let log_pi_minus_t = -x_log_x(PI - theta) + (PI - theta) + x_log_x(PI) - PI;
    -(regular + log_t + log_pi_minus_t)
}

/// Л on the whole line, by π-periodicity.
pub fn lobachevsky_oracle(theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    lobachevsky_integral(r)
}

/// Bloch–Wigner value through the dihedral angles of the ideal tetrahedron.
pub fn bloch_wigner_oracle(z: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let angles = [z.arg(), (one - one / z).arg(), (one / (one - z)).arg()];
    angles.iter().map(|&a| lobachevsky_oracle(a)).sum()
}

/// Volume of the regular ideal tetrahedron.
pub fn regular_ideal_volume() -> f64 {
    3.0 * lobachevsky_oracle(PI / 3.0)
}

pub fn random_point(rng: &mut ChaCha8Rng, dim: Dimension, ideal: bool) -> ExtendedPoint {
    let n = dim.n();
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(1e-3..=1.0).contains(&r) {
            continue;
        }
        let scale = if ideal { 1.0 / r } else { 0.95 };
        let k: Vec<f64> = v.iter().map(|x| x * scale).collect();
        return from_klein(&KleinPoint::new(dim, &k, ideal).unwrap()).unwrap();
    }
}

pub fn random_tuple(rng: &mut ChaCha8Rng, dim: Dimension, len: usize) -> Vec<ExtendedPoint> {
    (0..len)
        .map(|_| {
            let ideal = rng.gen_bool(0.5);
            random_point(rng, dim, ideal)
        })
        .collect()
}

pub fn random_isometry(rng: &mut ChaCha8Rng, dim: Dimension) -> Isometry {
    loop {
        let mut entry = || match dim {
            Dimension::Two => Complex64::new(rng.gen_range(-2.0..2.0), 0.0),
            Dimension::Three => Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        };
        let m = [[entry(), entry()], [entry(), entry()]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.norm() < 0.1 || (dim == Dimension::Two && det.re <= 0.0) {
            continue;
        }
        return Isometry::from_matrix(dim, m).unwrap();
    }
}
