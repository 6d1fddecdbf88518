//! Lobachevsky function and Bloch–Wigner dilogarithm.
//!
//! Both kernels are power series whose coefficients are built from the even
//! zeta values `ζ(2k)`, computed once by a short direct sum with an
//! Euler–Maclaurin tail.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const SERIES_TERMS: usize = 40;

/// `ζ(2k)` for `k = 1..=SERIES_TERMS` (index 0 holds `ζ(2)`).
fn zeta_even() -> &'static [f64; SERIES_TERMS] {
    static TABLE: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; SERIES_TERMS];
        out[0] = PI * PI / 6.0;
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = zeta_direct(2.0 * (i + 1) as f64);
        }
        out
    })
}

/// `ζ(s)` for real `s ≥ 4`.
fn zeta_direct(s: f64) -> f64 {
    const K: usize = 50;
    let mut sum = 0.0;
    // smallest terms first
    for k in (1..K).rev() {
        sum += (k as f64).powf(-s);
    }
    let k = K as f64;
    let tail = k.powf(-s) / 2.0 + k.powf(1.0 - s) / (s - 1.0) + s * k.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * k.powf(-s - 3.0) / 720.0;
    sum + tail
}

/// Lobachevsky function `Л(θ) = −∫₀^θ log|2 sin t| dt`.
///
/// The argument is reduced with π-periodicity and oddness to `[0, π/2]`,
/// where `Л(θ) = θ − θ log 2θ + Σ_k ζ(2k) θ (θ/π)^{2k} / (k (2k + 1))`.
/// The ratio of consecutive terms is at most 1/4, so forty terms reach
/// machine precision.
pub fn lobachevsky(theta: f64) -> f64 {
    if !theta.is_finite() {
        return f64::NAN;
    }
    let mut t = theta.rem_euclid(PI);
    if t > PI / 2.0 {
        t -= PI;
    }
    let sign = if t < 0.0 { -1.0 } else { 1.0 };
    let t = t.abs();
    if t == 0.0 {
        return 0.0;
    }
    let x2 = (t / PI) * (t / PI);
    let zeta = zeta_even();
    let mut power = x2;
    let mut series = 0.0;
    for (k, z) in zeta.iter().enumerate() {
        let k = (k + 1) as f64;
        series += z * power / (k * (2.0 * k + 1.0));
        power *= x2;
        if power < 1e-20 {
            break;
        }
    }
    sign * t * (1.0 - (2.0 * t).ln() + series)
}

/// `B_n / (n + 1)!` for the Bernoulli numbers, `n = 0..=2·SERIES_TERMS`.
fn bernoulli_over_factorial() -> &'static [f64; 2 * SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; 2 * SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; 2 * SERIES_TERMS + 1];
        out[0] = 1.0;
        out[1] = -0.25;
        let two_pi = 2.0 * PI;
        for (k, z) in zeta_even().iter().enumerate() {
            let k = k + 1;
            let n = 2 * k;
            // B_{2k} = (−1)^{k+1} 2 (2k)! ζ(2k) / (2π)^{2k}
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out[n] = sign * 2.0 * z / two_pi.powi(n as i32) / (n as f64 + 1.0);
        }
        out
    })
}

/// `Li₂(w)` via the Bernoulli series in `u = −log(1 − w)`, valid for `|u| < 2π`.
fn dilog_reduced(w: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - w).ln();
    let coeff = bernoulli_over_factorial();
    let u2 = u * u;
    let mut power = u;
    let mut sum = Complex64::new(0.0, 0.0);
    sum += coeff[0] * power;
    sum += coeff[1] * power * u;
    // odd Bernoulli numbers beyond B₁ vanish
    let mut n = 2;
    while n < coeff.len() {
        power *= u2;
        let term = coeff[n] * power;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
        n += 2;
    }
    sum
}

/// Bloch–Wigner dilogarithm `D(z) = Im Li₂(z) + arg(1 − z) log|z|`.
///
/// `D(z)` is the signed volume of the ideal tetrahedron with vertices
/// `0, 1, ∞, z`. Real arguments (including 0 and 1) and non-finite input
/// return 0.
pub fn bloch_wigner(z: Complex64) -> f64 {
    if !(z.re.is_finite() && z.im.is_finite()) || z.im == 0.0 {
        return 0.0;
    }
    let one = Complex64::new(1.0, 0.0);
    // the six images of z under the anharmonic group, with the sign of D
    let images = [
        (z, 1.0),
        (one - one / z, 1.0),
        (one / (one - z), 1.0),
        (one / z, -1.0),
        (one - z, -1.0),
        (z / (z - one), -1.0),
    ];
    // the series in u = −log(1 − w) converges for |u| < 2π; one image always
    // has |u| below about 1.3
    let (w, sign) = images
        .iter()
        .copied()
        .filter(|(w, _)| w.re.is_finite() && w.im.is_finite())
        .min_by(|a, b| {
            let ua = (one - a.0).ln().norm();
            let ub = (one - b.0).ln().norm();
            ua.total_cmp(&ub)
        })
        .expect("z itself is finite");
    let li = dilog_reduced(w);
    sign * (li.im + (one - w).arg() * w.norm().ln())
}
