//! Adaptive integration of vertical cones.
//!
//! A geodesic simplex with a vertex at `∞` is the region above its lower face
//! over the Euclidean triangle `Δ` spanned by the projections of the other
//! three vertices, so its volume is `∫_Δ dA / (2 h²)`. The lower face is a
//! hemisphere of radius `R` centred at `c`, with `h² = R² − |x − c|²`.
//!
//! `Δ` is split into the three triangles `(c, P, Q)` over its edges. In polar
//! coordinates about `c` the radial integral is exact, leaving
//!
//! ```text
//! ∫ dA / (2h²) = −¼ ∫ log(1 − ρ(φ)² / R²) dφ
//! ```
//!
//! over the angle `φ` measured from the foot of the perpendicular from `c` to
//! the edge line. These one-dimensional integrals, with logarithmic endpoint
//! singularities at ideal vertices, are done by adaptive Gauss–Kronrod.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Maximum number of subintervals before giving up.
pub const LEAF_BUDGET: usize = 1 << 16;

type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd Kronrod nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod value and its distance from the embedded 7-point Gauss value.
fn kronrod(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    (k * h, (k - g).abs() * h)
}

/// `log(1 − ρ(φ)²/R²)` over one edge line, with `cos α = p / R`.
#[derive(Debug, Clone, Copy)]
struct EdgeLog {
    alpha: f64,
}

impl EdgeLog {
    fn at(&self, phi: f64) -> f64 {
        let a = self.alpha;
        ((a + phi).sin() * (a - phi).sin()).max(0.0).ln() - 2.0 * phi.cos().ln()
    }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    edge: usize,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    seq: usize,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// A vertex of the base triangle: its projection and height (0 when ideal).
#[derive(Debug, Clone, Copy)]
pub(crate) struct BaseVertex {
    pub xy: P2,
    pub h: f64,
    pub ideal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Integral {
    pub value: f64,
    pub err: f64,
    pub leaves: usize,
    pub converged: bool,
}

/// The hemisphere through the three vertices: centre and squared radius.
fn hemisphere(verts: &[BaseVertex; 3], area2: f64) -> (P2, f64) {
    let [a, b, c] = verts;
    let ab = sub(b.xy, a.xy);
    let ac = sub(c.xy, a.xy);
    let rb = dot(ab, ab) + b.h * b.h - a.h * a.h;
    let rc = dot(ac, ac) + c.h * c.h - a.h * a.h;
    let off = [
        (rb * ac[1] - rc * ab[1]) / (2.0 * area2),
        (ab[0] * rc - ac[0] * rb) / (2.0 * area2),
    ];
    let centre = [a.xy[0] + off[0], a.xy[1] + off[1]];
    (centre, a.h * a.h + dot(off, off))
}

/// Angular data of the triangle `(centre, P, Q)`: the log kernel, the angle
/// range and the orientation sign. `None` when the triangle is flat.
fn edge_setup(centre: P2, r2: f64, p: &BaseVertex, q: &BaseVertex) -> Option<(EdgeLog, f64, f64, f64)> {
    let pq = sub(q.xy, p.xy);
    let len = dot(pq, pq).sqrt();
    let u = [pq[0] / len, pq[1] / len];
    let cp = sub(p.xy, centre);
    let normal = sub(cp, [dot(cp, u) * u[0], dot(cp, u) * u[1]]);
    let sign = cross(normal, u).signum();
    let dist = dot(normal, normal).sqrt();
    if dist == 0.0 || sign == 0.0 {
        return None;
    }
    let r = r2.sqrt();
    let half_chord = ((r - dist) * (r + dist)).max(0.0).sqrt();
    let alpha = half_chord.atan2(dist);
    let angle = |v: &BaseVertex| {
        let t = dot(sub(v.xy, centre), u);
        let phi = t.atan2(dist);
        if v.ideal {
            alpha.copysign(phi)
        } else {
            phi.clamp(-alpha, alpha)
        }
    };
    Some((EdgeLog { alpha }, angle(p), angle(q), sign))
}

/// Signed volume of the geodesic simplex `(∞, a, b, c)`.
///
/// Orientation follows the Klein-determinant convention, which for a cone
/// from `∞` is the opposite of the orientation of the projected triangle.
pub(crate) fn cone_volume(verts: [BaseVertex; 3], tol: f64, budget: usize) -> Integral {
    let [a, b, c] = verts;
    let ab = sub(b.xy, a.xy);
    let ac = sub(c.xy, a.xy);
    let area2 = cross(ab, ac);
    let scale = dot(ab, ab).max(dot(ac, ac)).max(dot(sub(c.xy, b.xy), sub(c.xy, b.xy)));
    if area2.abs() <= 1e-14 * scale || scale == 0.0 {
        return Integral {
            value: 0.0,
            err: 0.0,
            leaves: 0,
            converged: true,
        };
    }
    let (centre, r2) = hemisphere(&verts, area2);

    let mut edges = Vec::with_capacity(3);
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    for (p, q) in [(a, b), (b, c), (c, a)] {
        let Some((kernel, lo, hi, sign)) = edge_setup(centre, r2, &p, &q) else {
            continue;
        };
        let (value, err) = kronrod(|x| kernel.at(x), lo, hi);
        heap.push(Piece {
            edge: edges.len(),
            a: lo,
            b: hi,
            value,
            err,
            seq,
        });
        seq += 1;
        edges.push((kernel, sign));
    }
    // each unit of the φ-integral carries weight ¼
    let tol = 4.0 * tol;
    let mut err_total: f64 = heap.iter().map(|p| p.err).sum();
    while err_total > tol && heap.len() < budget {
        let piece = heap.pop().expect("heap is never empty");
        err_total -= piece.err;
        let kernel = edges[piece.edge].0;
        let m = 0.5 * (piece.a + piece.b);
        for (lo, hi) in [(piece.a, m), (m, piece.b)] {
            let (value, err) = kronrod(|x| kernel.at(x), lo, hi);
            err_total += err;
            heap.push(Piece {
                edge: piece.edge,
                a: lo,
                b: hi,
                value,
                err,
                seq,
            });
            seq += 1;
        }
        if heap.len() % 1024 == 0 {
            err_total = heap.iter().map(|p| p.err).sum();
        }
    }
    let mut pieces = heap.into_vec();
    pieces.sort_by_key(|p| p.seq);
    let mut value = 0.0;
    let mut err = 0.0;
    for p in &pieces {
        value += edges[p.edge].1 * p.value;
        err += p.err;
    }
    // signed area integral is −¼ Σ; the cone orientation flips it again
    Integral {
        value: 0.25 * value,
        err: 0.25 * err,
        leaves: pieces.len(),
        converged: err <= tol,
    }
}
