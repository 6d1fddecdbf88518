//! Real hyperbolic plane and space in the upper half-space model.
//!
//! Points of the closed model `ℍⁿ ∪ ∂ℍⁿ` (n = 2, 3) are stored in upper
//! half-space coordinates. The plane is embedded as the vertical half-plane
//! over the real axis, so both dimensions share the quaternionic Möbius
//! action of `PSL(2, ℂ)`; real matrices preserve the embedded plane.
//!
//! The Klein ball is a derived chart. It is only used where straightness is
//! linear: orientation signs of vertex tuples and the degeneracy cutoff.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default cutoff for identity and parabolic tests on matrices.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Maximum allowed `|det − 1|` for a stored isometry.
pub const DET_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HyperbolicError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Dimension, found: Dimension },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(i64),
    #[error("interior point needs a finite positive height, got {0}")]
    BadHeight(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("plane points and isometries must be real")]
    NotReal,
    #[error("singular matrix")]
    Singular,
    #[error("orientation-reversing matrix (determinant {0})")]
    OrientationReversing(f64),
    #[error("determinant {0} is not 1")]
    Determinant(Complex64),
    #[error("every boundary point is fixed; an ambient choice is required")]
    AmbientChoiceRequired,
    #[error("no common fixed point")]
    NoCommonFixedPoint,
    #[error("empty isometry list")]
    Empty,
    #[error("Klein coordinates outside the closed unit ball")]
    OutsideBall,
}

/// Dimension of the hyperbolic space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    pub fn n(self) -> usize {
        match self {
            Dimension::Two => 2,
            Dimension::Three => 3,
        }
    }

    pub fn from_n(n: i64) -> Result<Self, HyperbolicError> {
        match n {
            2 => Ok(Dimension::Two),
            3 => Ok(Dimension::Three),
            other => Err(HyperbolicError::UnsupportedDimension(other)),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.n())
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.n() as u64)
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = i64::deserialize(d)?;
        Dimension::from_n(n).map_err(D::Error::custom)
    }
}

/// A point on the sphere at infinity `ℂ ∪ {∞}` (or `ℝ ∪ {∞}` for the plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Finite(Complex64),
    Infinity,
}

impl Boundary {
    /// Homogeneous coordinates `(z, 1)` or `(1, 0)`.
    pub fn homogeneous(self) -> (Complex64, Complex64) {
        match self {
            Boundary::Finite(z) => (z, Complex64::new(1.0, 0.0)),
            Boundary::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }

    /// Images within roundoff of `∞` on the sphere are snapped to it.
    fn from_homogeneous(u: Complex64, v: Complex64) -> Self {
        if v.norm() <= SNAP_TO_INFINITY * u.norm() || v == Complex64::new(0.0, 0.0) {
            Boundary::Infinity
        } else {
            Boundary::Finite(u / v)
        }
    }
}

/// Relative size of the denominator below which a boundary image is `∞`.
const SNAP_TO_INFINITY: f64 = 1e-15;

/// Chordal distance on the Riemann sphere (the sphere of diameter 1 scaled to 2).
pub fn chordal_distance(p: Boundary, q: Boundary) -> f64 {
    let (pu, pv) = p.homogeneous();
    let (qu, qv) = q.homogeneous();
    let np = pu.norm().hypot(pv.norm());
    let nq = qu.norm().hypot(qv.norm());
    2.0 * (pu * qv - pv * qu).norm() / (np * nq)
}

/// A point of `ℍⁿ ∪ ∂ℍⁿ`.
///
/// Interior points carry upper half-space coordinates `(z, h)` with `h > 0`;
/// for the plane `z` is real. Ideal points carry a [`Boundary`] value, with
/// `∞` distinguished rather than approximated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Interior { dim: Dimension, z: Complex64, h: f64 },
    Ideal { dim: Dimension, at: Boundary },
}

impl ExtendedPoint {
    pub fn interior(dim: Dimension, z: Complex64, h: f64) -> Result<Self, HyperbolicError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(HyperbolicError::BadHeight(h));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(HyperbolicError::NonFinite);
        }
        if dim == Dimension::Two && z.im != 0.0 {
            return Err(HyperbolicError::NotReal);
        }
        Ok(ExtendedPoint::Interior { dim, z, h })
    }

    pub fn ideal(dim: Dimension, z: Complex64) -> Result<Self, HyperbolicError> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(HyperbolicError::NonFinite);
        }
        if dim == Dimension::Two && z.im != 0.0 {
            return Err(HyperbolicError::NotReal);
        }
        Ok(ExtendedPoint::Ideal {
            dim,
            at: Boundary::Finite(z),
        })
    }

    pub fn infinity(dim: Dimension) -> Self {
        ExtendedPoint::Ideal {
            dim,
            at: Boundary::Infinity,
        }
    }

    /// The point `(0, 1)` / `(0, 0, 1)`, centre of the Klein ball.
    pub fn basepoint(dim: Dimension) -> Self {
        ExtendedPoint::Interior {
            dim,
            z: Complex64::new(0.0, 0.0),
            h: 1.0,
        }
    }

    pub fn dimension(&self) -> Dimension {
        match *self {
            ExtendedPoint::Interior { dim, .. } | ExtendedPoint::Ideal { dim, .. } => dim,
        }
    }

    pub fn is_ideal(&self) -> bool {
        matches!(self, ExtendedPoint::Ideal { .. })
    }

    pub fn boundary(&self) -> Option<Boundary> {
        match *self {
            ExtendedPoint::Ideal { at, .. } => Some(at),
            ExtendedPoint::Interior { .. } => None,
        }
    }
}

/// JSON coordinate: a number in the plane, `[re, im]` in space.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Real(f64),
    Complex([f64; 2]),
    Infinity(String),
}

impl CoordRepr {
    fn of(dim: Dimension, z: Complex64) -> Self {
        match dim {
            Dimension::Two => CoordRepr::Real(z.re),
            Dimension::Three => CoordRepr::Complex([z.re, z.im]),
        }
    }

    fn value<E: serde::de::Error>(self) -> Result<Option<Complex64>, E> {
        match self {
            CoordRepr::Real(x) => Ok(Some(Complex64::new(x, 0.0))),
            CoordRepr::Complex([re, im]) => Ok(Some(Complex64::new(re, im))),
            CoordRepr::Infinity(s) if s == "inf" => Ok(None),
            CoordRepr::Infinity(s) => Err(E::custom(format!("expected \"inf\", found {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum PointRepr {
    Interior { dimension: Dimension, z: CoordRepr, h: f64 },
    Ideal { dimension: Dimension, at: CoordRepr },
}

impl Serialize for ExtendedPoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match *self {
            ExtendedPoint::Interior { dim, z, h } => PointRepr::Interior {
                dimension: dim,
                z: CoordRepr::of(dim, z),
                h,
            },
            ExtendedPoint::Ideal { dim, at } => PointRepr::Ideal {
                dimension: dim,
                at: match at {
                    Boundary::Finite(z) => CoordRepr::of(dim, z),
                    Boundary::Infinity => CoordRepr::Infinity("inf".into()),
                },
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtendedPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Interior { dimension, z, h } => {
                let z = z.value()?.ok_or_else(|| D::Error::custom("interior point at infinity"))?;
                ExtendedPoint::interior(dimension, z, h).map_err(D::Error::custom)
            }
            PointRepr::Ideal { dimension, at } => match at.value()? {
                Some(z) => ExtendedPoint::ideal(dimension, z).map_err(D::Error::custom),
                None => Ok(ExtendedPoint::infinity(dimension)),
            },
        }
    }
}

/// Hyperbolic distance between two interior points (curvature −1).
pub fn hyperbolic_distance(p: &ExtendedPoint, q: &ExtendedPoint) -> Option<f64> {
    match (*p, *q) {
        (ExtendedPoint::Interior { z: z1, h: h1, .. }, ExtendedPoint::Interior { z: z2, h: h2, .. }) => {
            let chord2 = (z1 - z2).norm_sqr() + (h1 - h2) * (h1 - h2);
            Some(2.0 * (chord2 / (4.0 * h1 * h2)).sqrt().asinh())
        }
        _ => None,
    }
}

/// Displacement used by equivariance witnesses: hyperbolic distance for
/// interior pairs, chordal distance for ideal pairs and `∞` for mixed kinds.
pub fn displacement(p: &ExtendedPoint, q: &ExtendedPoint) -> f64 {
    match (p.boundary(), q.boundary()) {
        (Some(a), Some(b)) => chordal_distance(a, b),
        (None, None) => hyperbolic_distance(p, q).unwrap_or(f64::INFINITY),
        _ => f64::INFINITY,
    }
}

type Matrix = [[Complex64; 2]; 2];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn det(m: &Matrix) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// An orientation-preserving isometry: an element of `PSL(2, ℝ)` (plane) or
/// `PSL(2, ℂ)` (space), stored with unit determinant and a canonical sign.
#[derive(Debug, Clone, Copy)]
pub struct Isometry {
    dim: Dimension,
    m: Matrix,
}

impl Isometry {
    pub fn identity(dim: Dimension) -> Self {
        Isometry {
            dim,
            m: [[c(1.0), c(0.0)], [c(0.0), c(1.0)]],
        }
    }

    /// Builds an isometry from a matrix whose determinant is already 1
    /// (within [`DET_TOL`]); the matrix is rescaled to exact unit determinant.
    pub fn new(dim: Dimension, m: [[Complex64; 2]; 2]) -> Result<Self, HyperbolicError> {
        let d = det(&m);
        if (d - c(1.0)).norm() > DET_TOL {
            return Err(HyperbolicError::Determinant(d));
        }
        Self::from_matrix(dim, m)
    }

    /// Builds an isometry from any invertible matrix by dividing by a square
    /// root of its determinant. Plane matrices must be real with positive
    /// determinant.
    pub fn from_matrix(dim: Dimension, m: [[Complex64; 2]; 2]) -> Result<Self, HyperbolicError> {
        if m.iter().flatten().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
            return Err(HyperbolicError::NonFinite);
        }
        let d = det(&m);
        if d.norm() == 0.0 {
            return Err(HyperbolicError::Singular);
        }
        let scale = match dim {
            Dimension::Two => {
                if m.iter().flatten().any(|x| x.im != 0.0) {
                    return Err(HyperbolicError::NotReal);
                }
                if d.re <= 0.0 {
                    return Err(HyperbolicError::OrientationReversing(d.re));
                }
                c(d.re.sqrt())
            }
            Dimension::Three => d.sqrt(),
        };
        let mut out = m;
        for row in out.iter_mut() {
            for x in row.iter_mut() {
                *x /= scale;
                if dim == Dimension::Two {
                    x.im = 0.0;
                }
            }
        }
        Ok(Self::canonical(dim, out))
    }

    /// Convenience constructor for real entries `[[a, b], [c, d]]`.
    pub fn real(dim: Dimension, m: [[f64; 2]; 2]) -> Result<Self, HyperbolicError> {
        Self::from_matrix(
            dim,
            [[c(m[0][0]), c(m[0][1])], [c(m[1][0]), c(m[1][1])]],
        )
    }

    fn canonical(dim: Dimension, mut m: Matrix) -> Self {
        let first = m.iter().flatten().copied().find(|x| x.norm() != 0.0);
        if let Some(x) = first {
            if x.re < 0.0 || (x.re == 0.0 && x.im < 0.0) {
                for row in m.iter_mut() {
                    for y in row.iter_mut() {
                        *y = -*y;
                    }
                }
            }
        }
        Isometry { dim, m }
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn determinant(&self) -> Complex64 {
        det(&self.m)
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Self {
        let m = &self.m;
        Self::canonical(self.dim, [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// Conjugate `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &Isometry) -> Self {
        (h * self) * h.inverse()
    }

    /// Distance of the matrix from `±I` in the max-entry norm.
    pub fn identity_residual(&self) -> f64 {
        let m = &self.m;
        let off = m[0][1].norm().max(m[1][0].norm());
        let plus = off.max((m[0][0] - 1.0).norm()).max((m[1][1] - 1.0).norm());
        let minus = off.max((m[0][0] + 1.0).norm()).max((m[1][1] + 1.0).norm());
        plus.min(minus)
    }

    /// Max-entry distance between the two matrices modulo sign.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let mut plus: f64 = 0.0;
        let mut minus: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                plus = plus.max((self.m[i][j] - other.m[i][j]).norm());
                minus = minus.max((self.m[i][j] + other.m[i][j]).norm());
            }
        }
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        self.dim == other.dim && self.distance(other) <= tol
    }

    pub fn act(&self, p: &ExtendedPoint) -> Result<ExtendedPoint, HyperbolicError> {
        if p.dimension() != self.dim {
            return Err(HyperbolicError::DimensionMismatch {
                expected: self.dim,
                found: p.dimension(),
            });
        }
        Ok(self.act_unchecked(p))
    }

    pub(crate) fn act_unchecked(&self, p: &ExtendedPoint) -> ExtendedPoint {
        let [[a, b], [cc, d]] = self.m;
        match *p {
            ExtendedPoint::Ideal { dim, at } => {
                let (u, v) = at.homogeneous();
                let at = Boundary::from_homogeneous(a * u + b * v, cc * u + d * v);
                let at = match at {
                    Boundary::Finite(mut z) if dim == Dimension::Two => {
                        z.im = 0.0;
                        Boundary::Finite(z)
                    }
                    other => other,
                };
                ExtendedPoint::Ideal { dim, at }
            }
            ExtendedPoint::Interior { dim, z, h } => {
                // (a q + b)(c q + d)⁻¹ for the quaternion q = z + h j
                let den = cc * z + d;
                let norm = den.norm_sqr() + cc.norm_sqr() * h * h;
                let num = (a * z + b) * den.conj() + a * cc.conj() * (h * h);
                let mut nz = num / norm;
                if dim == Dimension::Two {
                    nz.im = 0.0;
                }
                ExtendedPoint::Interior { dim, z: nz, h: h / norm }
            }
        }
    }

    pub fn classify(&self) -> IsometryClass {
        self.classify_with_tol(CLASSIFY_TOL)
    }

    pub fn classify_with_tol(&self, tol: f64) -> IsometryClass {
        let tr = self.trace();
        let trace_squared = tr * tr;
        let kind = if self.identity_residual() <= tol {
            IsometryKind::Identity
        } else if (trace_squared - 4.0).norm() <= tol {
            IsometryKind::Parabolic
        } else if trace_squared.im.abs() <= tol && trace_squared.re >= -tol && trace_squared.re < 4.0 {
            IsometryKind::Elliptic
        } else {
            IsometryKind::Loxodromic
        };
        IsometryClass { kind, trace_squared }
    }

    /// Boundary fixed points, attracting point first for loxodromic elements.
    ///
    /// Parabolic elements have one fixed point. Elliptic elements of the plane
    /// fix no point of `∂ℍ²` and yield an empty list.
    pub fn fixed_points(&self) -> Result<Vec<ExtendedPoint>, HyperbolicError> {
        self.fixed_points_with_tol(CLASSIFY_TOL)
    }

    pub fn fixed_points_with_tol(&self, tol: f64) -> Result<Vec<ExtendedPoint>, HyperbolicError> {
        let class = self.classify_with_tol(tol);
        let dim = self.dim;
        let [[a, b], [cc, d]] = self.m;
        let scale = self.m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        let ideal = |at: Boundary| ExtendedPoint::Ideal { dim, at };
        // roots of c z² + (d − a) z − b = 0; eigenvalue c z + d at a finite root, a at ∞
        let mut roots: Vec<(Boundary, f64)> = match class.kind {
            IsometryKind::Identity => return Err(HyperbolicError::AmbientChoiceRequired),
            IsometryKind::Parabolic => {
                if cc.norm() <= 1e-14 * scale {
                    vec![(Boundary::Infinity, a.norm())]
                } else {
                    let z = (a - d) / (2.0 * cc);
                    vec![(Boundary::Finite(z), (cc * z + d).norm())]
                }
            }
            IsometryKind::Elliptic | IsometryKind::Loxodromic => {
                if cc.norm() <= 1e-14 * scale {
                    let z = b / (d - a);
                    vec![(Boundary::Infinity, a.norm()), (Boundary::Finite(z), d.norm())]
                } else {
                    let bb = d - a;
                    let mut s = (class.trace_squared - 4.0).sqrt();
                    if (bb.conj() * s).re < 0.0 {
                        s = -s;
                    }
                    let q = -(bb + s) / 2.0;
                    let z1 = q / cc;
                    let z2 = -b / q;
                    vec![
                        (Boundary::Finite(z1), (cc * z1 + d).norm()),
                        (Boundary::Finite(z2), (cc * z2 + d).norm()),
                    ]
                }
            }
        };
        if class.kind == IsometryKind::Loxodromic && roots.len() == 2 && roots[1].1 > roots[0].1 {
            roots.swap(0, 1);
        }
        if dim == Dimension::Two {
            if class.kind == IsometryKind::Elliptic {
                return Ok(Vec::new());
            }
            for (at, _) in roots.iter_mut() {
                if let Boundary::Finite(z) = at {
                    z.im = 0.0;
                }
            }
        }
        Ok(roots.into_iter().map(|(at, _)| ideal(at)).collect())
    }
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.m == other.m
    }
}

impl Mul for &Isometry {
    type Output = Isometry;

    fn mul(self, rhs: &Isometry) -> Isometry {
        assert_eq!(self.dim, rhs.dim, "composing isometries of different dimensions");
        let mut m = matmul(&self.m, &rhs.m);
        // keep det = 1 against drift over long products
        let d = det(&m);
        if (d - 1.0).norm() > 1e-15 {
            let s = d.sqrt();
            for x in m.iter_mut().flatten() {
                *x /= s;
            }
        }
        if self.dim == Dimension::Two {
            for x in m.iter_mut().flatten() {
                x.im = 0.0;
            }
        }
        Isometry::canonical(self.dim, m)
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        Mul::mul(&self, &rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    pub trace_squared: Complex64,
}

/// Free-function form of [`Isometry::act`].
pub fn act(g: &Isometry, p: &ExtendedPoint) -> Result<ExtendedPoint, HyperbolicError> {
    g.act(p)
}

pub fn classify(g: &Isometry) -> IsometryClass {
    g.classify()
}

pub fn fixed_points(g: &Isometry) -> Result<Vec<ExtendedPoint>, HyperbolicError> {
    g.fixed_points()
}

/// A boundary point fixed (to spherical tolerance `tol`) by every element.
///
/// Candidates are the fixed points of the first non-identity element, in
/// [`Isometry::fixed_points`] order. If every element is identity-class the
/// canonical point `∞` is returned.
pub fn common_fixed_point(gs: &[Isometry], tol: f64) -> Result<ExtendedPoint, HyperbolicError> {
    let first = gs.first().ok_or(HyperbolicError::Empty)?;
    let dim = first.dimension();
    if let Some(bad) = gs.iter().find(|g| g.dimension() != dim) {
        return Err(HyperbolicError::DimensionMismatch {
            expected: dim,
            found: bad.dimension(),
        });
    }
    let Some(leader) = gs.iter().find(|g| g.identity_residual() > tol) else {
        return Ok(ExtendedPoint::infinity(dim));
    };
    let candidates = leader.fixed_points_with_tol(tol)?;
    candidates
        .into_iter()
        .find(|xi| {
            let at = xi.boundary().expect("fixed points are ideal");
            gs.iter().all(|g| {
                let moved = g.act_unchecked(xi).boundary().expect("ideal maps to ideal");
                chordal_distance(moved, at) <= tol
            })
        })
        .ok_or(HyperbolicError::NoCommonFixedPoint)
}

/// Isometry taking the interior point `p` to the basepoint `(0, …, 0, 1)`.
pub fn to_basepoint(p: &ExtendedPoint) -> Option<Isometry> {
    match *p {
        ExtendedPoint::Interior { dim, z, h } => {
            let s = h.sqrt();
            Some(Isometry {
                dim,
                m: [[c(1.0 / s), -z / s], [c(0.0), c(s)]],
            })
        }
        ExtendedPoint::Ideal { .. } => None,
    }
}

/// Isometry taking the ideal point `p` to `∞`.
pub fn to_infinity(p: &ExtendedPoint) -> Option<Isometry> {
    match *p {
        ExtendedPoint::Ideal { dim, at } => Some(match at {
            Boundary::Infinity => Isometry::identity(dim),
            Boundary::Finite(z) => Isometry::canonical(dim, [[c(0.0), c(-1.0)], [c(1.0), -z]]),
        }),
        ExtendedPoint::Interior { .. } => None,
    }
}

/// Coordinates in the Klein (projective) ball model.
///
/// `coords()` has length n. For the plane the two coordinates are the
/// horizontal and vertical directions of the half-plane picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KleinPoint {
    dim: Dimension,
    coords: [f64; 3],
    ideal: bool,
}

impl KleinPoint {
    pub fn new(dim: Dimension, coords: &[f64], ideal: bool) -> Result<Self, HyperbolicError> {
        if coords.len() != dim.n() {
            return Err(HyperbolicError::UnsupportedDimension(coords.len() as i64));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(HyperbolicError::NonFinite);
        }
        let mut k = [0.0; 3];
        k[..coords.len()].copy_from_slice(coords);
        let r2: f64 = k.iter().map(|x| x * x).sum();
        if ideal {
            if (r2 - 1.0).abs() > 1e-9 {
                return Err(HyperbolicError::OutsideBall);
            }
            let r = r2.sqrt();
            k.iter_mut().for_each(|x| *x /= r);
        } else if r2 >= 1.0 {
            return Err(HyperbolicError::OutsideBall);
        }
        Ok(KleinPoint { dim, coords: k, ideal })
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim.n()]
    }

    pub fn is_ideal(&self) -> bool {
        self.ideal
    }
}

/// Klein coordinates of a point, as a 3-vector (plane points have a zero
/// middle coordinate here; see [`to_klein`] for the n-dimensional form).
pub(crate) fn klein3(p: &ExtendedPoint) -> [f64; 3] {
    match *p {
        ExtendedPoint::Interior { z, h, .. } => {
            let r2 = z.norm_sqr() + h * h;
            let den = r2 + 1.0;
            [2.0 * z.re / den, 2.0 * z.im / den, (r2 - 1.0) / den]
        }
        ExtendedPoint::Ideal { at, .. } => match at {
            Boundary::Infinity => [0.0, 0.0, 1.0],
            Boundary::Finite(z) => {
                let r2 = z.norm_sqr();
                let den = r2 + 1.0;
                [2.0 * z.re / den, 2.0 * z.im / den, (r2 - 1.0) / den]
            }
        },
    }
}

pub fn to_klein(p: &ExtendedPoint) -> KleinPoint {
    let k = klein3(p);
    let dim = p.dimension();
    let coords = match dim {
        Dimension::Three => k,
        Dimension::Two => [k[0], k[2], 0.0],
    };
    KleinPoint {
        dim,
        coords,
        ideal: p.is_ideal(),
    }
}

pub fn from_klein(k: &KleinPoint) -> Result<ExtendedPoint, HyperbolicError> {
    let dim = k.dim;
    let (k1, k2, k3) = match dim {
        Dimension::Three => (k.coords[0], k.coords[1], k.coords[2]),
        Dimension::Two => (k.coords[0], 0.0, k.coords[1]),
    };
    let rest = 1.0 - k3;
    if k.ideal {
        if rest <= 0.0 {
            return Ok(ExtendedPoint::infinity(dim));
        }
        return Ok(ExtendedPoint::Ideal {
            dim,
            at: Boundary::Finite(Complex64::new(k1 / rest, k2 / rest)),
        });
    }
    let s = 1.0 - (k1 * k1 + k2 * k2 + k3 * k3);
    if s <= 0.0 || rest <= 0.0 {
        return Err(HyperbolicError::OutsideBall);
    }
    ExtendedPoint::interior(dim, Complex64::new(k1 / rest, k2 / rest), s.sqrt() / rest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn iso3(m: [[(f64, f64); 2]; 2]) -> Isometry {
        Isometry::from_matrix(
            Dimension::Three,
            [
                [cx(m[0][0].0, m[0][0].1), cx(m[0][1].0, m[0][1].1)],
                [cx(m[1][0].0, m[1][0].1), cx(m[1][1].0, m[1][1].1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn translation_moves_zero_to_one() {
        let g = Isometry::real(Dimension::Three, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let p = ExtendedPoint::ideal(Dimension::Three, cx(0.0, 0.0)).unwrap();
        assert_eq!(
            g.act(&p).unwrap(),
            ExtendedPoint::ideal(Dimension::Three, cx(1.0, 0.0)).unwrap()
        );
    }

    #[test]
    fn dilation_scales_height() {
        let g = Isometry::real(Dimension::Three, [[2.0, 0.0], [0.0, 0.5]]).unwrap();
        let p = g.act(&ExtendedPoint::basepoint(Dimension::Three)).unwrap();
        match p {
            ExtendedPoint::Interior { z, h, .. } => {
                assert!(z.norm() < 1e-15);
                assert!((h - 4.0).abs() < 1e-15);
            }
            _ => panic!("interior expected"),
        }
    }

    #[test]
    fn act_rejects_dimension_mismatch() {
        let g = Isometry::identity(Dimension::Two);
        let err = g.act(&ExtendedPoint::basepoint(Dimension::Three)).unwrap_err();
        assert!(matches!(err, HyperbolicError::DimensionMismatch { .. }));
    }

    #[test]
    fn sign_quotient() {
        let g = Isometry::real(Dimension::Three, [[1.0, 2.0], [3.0, 7.0]]).unwrap();
        let h = Isometry::real(Dimension::Three, [[-1.0, -2.0], [-3.0, -7.0]]).unwrap();
        assert_eq!(g, h);
        let minus_id = Isometry::real(Dimension::Three, [[-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(minus_id.classify().kind, IsometryKind::Identity);
    }

    #[test]
    fn classification_examples() {
        let t = Isometry::real(Dimension::Three, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(t.classify().kind, IsometryKind::Parabolic);
        let d = Isometry::real(Dimension::Three, [[2.0, 0.0], [0.0, 0.5]]).unwrap();
        let class = d.classify();
        assert_eq!(class.kind, IsometryKind::Loxodromic);
        assert!((class.trace_squared.re - 6.25).abs() < 1e-14);
        let r = Isometry::real(Dimension::Three, [[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(r.classify().kind, IsometryKind::Elliptic);
        let lox = iso3([[(0.0, 1.0), (0.0, 0.0)], [(0.0, 0.0), (0.0, -1.0)]]);
        // i·diag(1,-1): trace 0, elliptic of order 2
        assert_eq!(lox.classify().kind, IsometryKind::Elliptic);
        let screw = iso3([[(1.5, 1.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]]);
        assert_eq!(screw.classify().kind, IsometryKind::Loxodromic);
    }

    #[test]
    fn fixed_point_examples() {
        let t = Isometry::real(Dimension::Three, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert_eq!(t.fixed_points().unwrap(), vec![ExtendedPoint::infinity(Dimension::Three)]);

        let d = Isometry::real(Dimension::Three, [[2.0, 0.0], [0.0, 0.5]]).unwrap();
        let fp = d.fixed_points().unwrap();
        // z ↦ 4z attracts towards ∞
        assert_eq!(fp[0], ExtendedPoint::infinity(Dimension::Three));
        assert_eq!(fp[1], ExtendedPoint::ideal(Dimension::Three, cx(0.0, 0.0)).unwrap());

        let lower = Isometry::real(Dimension::Three, [[1.0, 0.0], [1.0, 1.0]]).unwrap();
        let fp = lower.fixed_points().unwrap();
        assert_eq!(fp.len(), 1);
        let z = match fp[0].boundary().unwrap() {
            Boundary::Finite(z) => z,
            Boundary::Infinity => panic!("finite fixed point expected"),
        };
        // quadratic-root oracle: z² = 0
        assert!(z.norm() < 1e-15);

        let id = Isometry::identity(Dimension::Three);
        assert_eq!(id.fixed_points().unwrap_err(), HyperbolicError::AmbientChoiceRequired);
    }

    #[test]
    fn plane_elliptic_has_no_boundary_fixed_point() {
        let r = Isometry::real(Dimension::Two, [[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert!(r.fixed_points().unwrap().is_empty());
        let h = Isometry::real(Dimension::Two, [[2.0, 1.0], [1.0, 1.0]]).unwrap();
        let fp = h.fixed_points().unwrap();
        assert_eq!(fp.len(), 2);
        for p in fp {
            let at = p.boundary().unwrap();
            let moved = h.act(&p).unwrap().boundary().unwrap();
            assert!(chordal_distance(at, moved) < 1e-12);
        }
    }

    #[test]
    fn common_fixed_point_examples() {
        let t1 = Isometry::real(Dimension::Three, [[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let ti = iso3([[(1.0, 0.0), (0.0, 1.0)], [(0.0, 0.0), (1.0, 0.0)]]);
        assert_eq!(
            common_fixed_point(&[t1, ti], 1e-9).unwrap(),
            ExtendedPoint::infinity(Dimension::Three)
        );
        assert_eq!(
            common_fixed_point(&[Isometry::identity(Dimension::Three)], 1e-9).unwrap(),
            ExtendedPoint::infinity(Dimension::Three)
        );
        let s = Isometry::real(Dimension::Three, [[0.0, -1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(
            common_fixed_point(&[t1, s], 1e-9).unwrap_err(),
            HyperbolicError::NoCommonFixedPoint
        );
        assert_eq!(common_fixed_point(&[], 1e-9).unwrap_err(), HyperbolicError::Empty);
    }

    #[test]
    fn orientation_reversing_plane_matrix_rejected() {
        let err = Isometry::real(Dimension::Two, [[1.0, 0.0], [0.0, -1.0]]).unwrap_err();
        assert!(matches!(err, HyperbolicError::OrientationReversing(_)));
    }

    #[test]
    fn klein_examples() {
        let o = to_klein(&ExtendedPoint::basepoint(Dimension::Three));
        assert_eq!(o.coords(), &[0.0, 0.0, 0.0]);
        let n = to_klein(&ExtendedPoint::infinity(Dimension::Three));
        assert_eq!(n.coords(), &[0.0, 0.0, 1.0]);
        let p = ExtendedPoint::interior(Dimension::Three, cx(0.0, 0.0), 2.0).unwrap();
        let k = to_klein(&p);
        assert!((k.coords()[2] - 0.6).abs() < 1e-15);
        assert_eq!(from_klein(&k).unwrap(), p);
        let n2 = to_klein(&ExtendedPoint::infinity(Dimension::Two));
        assert_eq!(n2.coords(), &[0.0, 1.0]);
    }

    #[test]
    fn basepoint_and_infinity_normalisers() {
        let p = ExtendedPoint::interior(Dimension::Three, cx(0.3, -1.2), 0.7).unwrap();
        let g = to_basepoint(&p).unwrap();
        let q = g.act(&p).unwrap();
        assert!(hyperbolic_distance(&q, &ExtendedPoint::basepoint(Dimension::Three)).unwrap() < 1e-14);
        let xi = ExtendedPoint::ideal(Dimension::Three, cx(2.0, 1.0)).unwrap();
        assert_eq!(
            to_infinity(&xi).unwrap().act(&xi).unwrap(),
            ExtendedPoint::infinity(Dimension::Three)
        );
    }
}
