//! Signed volumes of geodesic simplices with finite or ideal vertices.
//!
//! [`simplex_volume`] is the bounded volume cocycle on `ℍⁿ ∪ ∂ℍⁿ`: the
//! integral of the volume form over the geodesic simplex spanned by an ordered
//! vertex tuple. The sign is the orientation of the tuple in the Klein chart
//! (determinant of the edge vectors from vertex 0).
//!
//! Evaluation paths:
//! - plane: exact angle defect;
//! - space, all vertices ideal: Bloch–Wigner dilogarithm of the cross-ratio;
//! - space, otherwise: vertical cones integrated adaptively, see
//!   [`crate::quadrature`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{self, chordal_distance, klein3, Dimension, ExtendedPoint};
use crate::quadrature::{self, BaseVertex, LEAF_BUDGET};
use crate::special::{bloch_wigner, lobachevsky};

/// Klein determinants below this magnitude are treated as flat simplices.
pub const FLAT_CUTOFF: f64 = 1e-14;

/// Error bound reported for the Bloch–Wigner path.
const CLOSED_FORM_ERROR: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VolumeError {
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("simplex in dimension {dim} needs {expected} vertices, got {found}")]
    VertexCount { dim: Dimension, expected: usize, found: usize },
    #[error("vertices of different dimensions")]
    MixedDimensions,
    #[error("cross-ratio needs four distinct ideal points of hyperbolic space")]
    DegenerateTuple,
    #[error("no closed form for a tetrahedron with finite vertices")]
    NoClosedForm,
    #[error("quadrature did not converge: {partial:?}")]
    QuadratureFailure { partial: VolumeValue },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Ordered vertex tuple of a geodesic simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSimplex {
    dim: Dimension,
    vertices: Vec<ExtendedPoint>,
}

impl GeodesicSimplex {
    pub fn new(vertices: Vec<ExtendedPoint>) -> Result<Self, VolumeError> {
        let dim = vertices
            .first()
            .map(|v| v.dimension())
            .ok_or(VolumeError::VertexCount {
                dim: Dimension::Three,
                expected: 4,
                found: 0,
            })?;
        if vertices.iter().any(|v| v.dimension() != dim) {
            return Err(VolumeError::MixedDimensions);
        }
        if vertices.len() != dim.n() + 1 {
            return Err(VolumeError::VertexCount {
                dim,
                expected: dim.n() + 1,
                found: vertices.len(),
            });
        }
        Ok(GeodesicSimplex { dim, vertices })
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn vertices(&self) -> &[ExtendedPoint] {
        &self.vertices
    }

    /// Determinant of the Klein-model edge vectors from vertex 0.
    pub fn klein_determinant(&self) -> f64 {
        let k: Vec<[f64; 3]> = self.vertices.iter().map(klein3).collect();
        let e = |i: usize| [k[i][0] - k[0][0], k[i][1] - k[0][1], k[i][2] - k[0][2]];
        match self.dim {
            // plane points live in the (x, h) coordinates of the Klein 3-vector
            Dimension::Two => {
                let (a, b) = (e(1), e(2));
                a[0] * b[2] - a[2] * b[0]
            }
            Dimension::Three => {
                let (a, b, c) = (e(1), e(2), e(3));
                a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    ClosedForm,
    Quadrature,
}

/// Which evaluation path to use for tetrahedra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    /// Closed form when every vertex is ideal, quadrature otherwise.
    #[default]
    Auto,
    /// Closed form only; tetrahedra with a finite vertex are an error.
    Closed,
    /// Quadrature for every tetrahedron.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeValue {
    pub value: f64,
    pub est_error: f64,
    pub method: VolumeMethod,
}

impl VolumeValue {
    fn exact(value: f64) -> Self {
        VolumeValue {
            value,
            est_error: 0.0,
            method: VolumeMethod::ClosedForm,
        }
    }
}

/// Supremum `vₙ` of simplex volumes: `π` for the plane, `3Л(π/3)` for space.
pub fn max_simplex_volume(n: usize) -> Result<f64, VolumeError> {
    match n {
        2 => Ok(PI),
        3 => Ok(3.0 * lobachevsky(PI / 3.0)),
        other => Err(VolumeError::UnsupportedDimension(other)),
    }
}

/// Cross-ratio of four ideal points of `∂ℍ³`: the image of `p3` under the
/// Möbius map sending `(p0, p1, p2)` to `(0, 1, ∞)`.
pub fn cross_ratio(
    p0: &ExtendedPoint,
    p1: &ExtendedPoint,
    p2: &ExtendedPoint,
    p3: &ExtendedPoint,
) -> Result<Complex64, VolumeError> {
    let pts = [p0, p1, p2, p3];
    let mut at = Vec::with_capacity(4);
    for p in pts {
        match p {
            ExtendedPoint::Ideal {
                dim: Dimension::Three,
                at: b,
            } => at.push(*b),
            _ => return Err(VolumeError::DegenerateTuple),
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if chordal_distance(at[i], at[j]) <= 1e-14 {
                return Err(VolumeError::DegenerateTuple);
            }
        }
    }
    let h: Vec<_> = at.iter().map(|b| b.homogeneous()).collect();
    let br = |i: usize, j: usize| h[i].0 * h[j].1 - h[i].1 * h[j].0;
    Ok((br(3, 0) * br(1, 2)) / (br(3, 2) * br(1, 0)))
}

/// Signed volume with the default evaluation path.
pub fn simplex_volume(s: &GeodesicSimplex, tol: f64) -> Result<VolumeValue, VolumeError> {
    simplex_volume_with(s, tol, MethodChoice::Auto)
}

pub fn simplex_volume_with(
    s: &GeodesicSimplex,
    tol: f64,
    method: MethodChoice,
) -> Result<VolumeValue, VolumeError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(VolumeError::BadTolerance(tol));
    }
    let det = s.klein_determinant();
    if det.is_nan() || det.abs() < FLAT_CUTOFF {
        return Ok(VolumeValue::exact(0.0));
    }
    match s.dim {
        Dimension::Two => Ok(triangle_area(s, det.signum())),
        Dimension::Three => {
            let all_ideal = s.vertices.iter().all(|v| v.is_ideal());
            match (method, all_ideal) {
                (MethodChoice::Auto | MethodChoice::Closed, true) => Ok(ideal_tetrahedron(s)),
                (MethodChoice::Closed, false) => Err(VolumeError::NoClosedForm),
                _ => tetrahedron_by_quadrature(s, tol),
            }
        }
    }
}

fn triangle_area(s: &GeodesicSimplex, sign: f64) -> VolumeValue {
    let v = &s.vertices;
    let mut angles = 0.0;
    for i in 0..3 {
        let Some(g) = hyperbolic::to_basepoint(&v[i]) else {
            continue;
        };
        // geodesics through the Klein centre are Euclidean rays
        let a = klein3(&g.act_unchecked(&v[(i + 1) % 3]));
        let b = klein3(&g.act_unchecked(&v[(i + 2) % 3]));
        let (a, b) = ([a[0], a[2]], [b[0], b[2]]);
        angles += (a[0] * b[1] - a[1] * b[0]).abs().atan2(a[0] * b[0] + a[1] * b[1]);
    }
    VolumeValue {
        value: sign * (PI - angles).max(0.0),
        est_error: 16.0 * f64::EPSILON * PI,
        method: VolumeMethod::ClosedForm,
    }
}

fn ideal_tetrahedron(s: &GeodesicSimplex) -> VolumeValue {
    let v = &s.vertices;
    match cross_ratio(&v[0], &v[1], &v[2], &v[3]) {
        // D > 0 tuples are negatively oriented in the Klein chart
        Ok(z) => VolumeValue {
            value: -bloch_wigner(z),
            est_error: CLOSED_FORM_ERROR,
            method: VolumeMethod::ClosedForm,
        },
        Err(_) => VolumeValue::exact(0.0),
    }
}

fn base_vertex(p: &ExtendedPoint) -> BaseVertex {
    match *p {
        ExtendedPoint::Interior { z, h, .. } => BaseVertex {
            xy: [z.re, z.im],
            h,
            ideal: false,
        },
        ExtendedPoint::Ideal { at, .. } => match at {
            hyperbolic::Boundary::Finite(z) => BaseVertex {
                xy: [z.re, z.im],
                h: 0.0,
                ideal: true,
            },
            hyperbolic::Boundary::Infinity => unreachable!("cone bases avoid ∞"),
        },
    }
}

fn tetrahedron_by_quadrature(s: &GeodesicSimplex, tol: f64) -> Result<VolumeValue, VolumeError> {
    let v = &s.vertices;
    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    if let Some(k) = v.iter().position(|p| p.is_ideal()) {
        // Θ(v) = (−1)^k Θ(v_k, v without v_k)
        let g = hyperbolic::to_infinity(&v[k]).expect("ideal vertex");
        let mut base = [base_vertex(&ExtendedPoint::basepoint(Dimension::Three)); 3];
        for (slot, j) in (0..4).filter(|&j| j != k).enumerate() {
            base[slot] = base_vertex(&g.act_unchecked(&v[j]));
        }
        let r = quadrature::cone_volume(base, tol, LEAF_BUDGET);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        value = sign * r.value;
        err = r.err;
        converged = r.converged;
    } else {
        // coboundary of the cocycle on (∞, v₀, …, v₃):
        // Θ(v) = Σᵢ (−1)^i Θ(∞, v without vᵢ)
        let g = hyperbolic::to_basepoint(&v[3]).expect("finite vertex");
        let w: Vec<BaseVertex> = v.iter().map(|p| base_vertex(&g.act_unchecked(p))).collect();
        let budget = LEAF_BUDGET;
        for i in 0..4 {
            let mut base = [w[0]; 3];
            for (slot, j) in (0..4).filter(|&j| j != i).enumerate() {
                base[slot] = w[j];
            }
            let r = quadrature::cone_volume(base, tol / 4.0, budget);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            value += sign * r.value;
            err += r.err;
            converged &= r.converged;
        }
    }
    let out = VolumeValue {
        value,
        est_error: err,
        method: VolumeMethod::Quadrature,
    };
    if converged {
        Ok(out)
    } else {
        Err(VolumeError::QuadratureFailure { partial: out })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(re: f64, im: f64) -> ExtendedPoint {
        ExtendedPoint::ideal(Dimension::Three, Complex64::new(re, im)).unwrap()
    }

    fn inf3() -> ExtendedPoint {
        ExtendedPoint::infinity(Dimension::Three)
    }

    #[test]
    fn repeated_vertex_is_flat() {
        let s = GeodesicSimplex::new(vec![ideal(0.0, 0.0), ideal(1.0, 0.0), ideal(0.0, 0.0), inf3()]).unwrap();
        assert_eq!(simplex_volume(&s, 1e-8).unwrap().value, 0.0);
        let p = ExtendedPoint::basepoint(Dimension::Three);
        let s = GeodesicSimplex::new(vec![p, ideal(1.0, 0.0), p, inf3()]).unwrap();
        assert_eq!(simplex_volume(&s, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn ideal_triangle_has_area_pi() {
        let d = Dimension::Two;
        let s = GeodesicSimplex::new(vec![
            ExtendedPoint::ideal(d, Complex64::new(0.0, 0.0)).unwrap(),
            ExtendedPoint::ideal(d, Complex64::new(1.0, 0.0)).unwrap(),
            ExtendedPoint::infinity(d),
        ])
        .unwrap();
        let v = simplex_volume(&s, 1e-10).unwrap();
        assert!((v.value.abs() - PI).abs() < 1e-14);
    }

    #[test]
    fn regular_ideal_tetrahedron_both_paths() {
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let s = GeodesicSimplex::new(vec![ideal(0.0, 0.0), ideal(1.0, 0.0), inf3(), ideal(w.re, w.im)]).unwrap();
        let closed = simplex_volume(&s, 1e-10).unwrap();
        assert_eq!(closed.method, VolumeMethod::ClosedForm);
        assert!((closed.value.abs() - 1.0149416064).abs() < 1e-9);
        let quad = simplex_volume_with(&s, 1e-10, MethodChoice::Quadrature).unwrap();
        assert_eq!(quad.method, VolumeMethod::Quadrature);
        assert!((quad.value - closed.value).abs() < 1e-9, "{quad:?} vs {closed:?}");
        // sign convention: Klein determinant
        assert_eq!(closed.value.signum(), s.klein_determinant().signum());
    }

    #[test]
    fn closed_only_rejects_finite_vertices() {
        let s = GeodesicSimplex::new(vec![
            ExtendedPoint::basepoint(Dimension::Three),
            ideal(1.0, 0.0),
            inf3(),
            ideal(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(
            simplex_volume_with(&s, 1e-8, MethodChoice::Closed).unwrap_err(),
            VolumeError::NoClosedForm
        );
    }

    #[test]
    fn cross_ratio_normal_form() {
        let z = Complex64::new(0.3, 0.8);
        let r = cross_ratio(&ideal(0.0, 0.0), &ideal(1.0, 0.0), &inf3(), &ideal(z.re, z.im)).unwrap();
        assert!((r - z).norm() < 1e-15);
        assert_eq!(
            cross_ratio(&ideal(0.0, 0.0), &ideal(0.0, 0.0), &inf3(), &ideal(1.0, 1.0)).unwrap_err(),
            VolumeError::DegenerateTuple
        );
    }

    #[test]
    fn max_volumes() {
        assert_eq!(max_simplex_volume(2).unwrap(), PI);
        assert!((max_simplex_volume(3).unwrap() - 1.0149416064).abs() < 1e-9);
        assert_eq!(max_simplex_volume(4).unwrap_err(), VolumeError::UnsupportedDimension(4));
    }

    #[test]
    fn wrong_vertex_count() {
        let err = GeodesicSimplex::new(vec![inf3(), ideal(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, VolumeError::VertexCount { expected: 4, found: 2, .. }));
    }
}
