//! Equivariant vertex placement and development of a triangulation.
//!
//! Each vertex is placed once, in the local frame of its first corner:
//! ideal vertices at the common fixed point of their peripheral holonomy,
//! finite vertices at the Klein centre or at a seeded random point. A corner
//! `(σ, k)` sees that point through the corner transport `T(σ, k)`, and the
//! simplex frame `h_σ` comes from a breadth-first dual spanning tree, so the
//! developed tuple of `σ` is `h_σ · T(σ, k) · P(vertex)`.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{
    corner_frames, verify_peripheral, PeripheralData, Slot, TransitionCocycle, Triangulation, VertexKind,
};
use crate::hyperbolic::{displacement, from_klein, Dimension, ExtendedPoint, Isometry, KleinPoint};

/// Tolerance for peripheral fixed points.
pub const PERIPHERAL_TOL: f64 = 1e-9;

/// Witness displacement above which a cocycle is reported inconsistent.
pub const WITNESS_FAIL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DevelopError {
    #[error("placement radius must lie in (0, 1), got {0}")]
    BadRadius(f64),
    #[error("peripheral data of vertex {vertex}: {reason}")]
    Peripheral { vertex: i64, reason: String },
    #[error("root simplex {0} does not exist")]
    BadRoot(usize),
    #[error("equivariance witness {residual:.3e} across faces {a} and {b}: inconsistent cocycle")]
    Equivariance { a: Slot, b: Slot, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    #[default]
    Canonical,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementPolicy {
    pub mode: PlacementMode,
    pub seed: u64,
    pub radius: f64,
}

impl Default for PlacementPolicy {
    fn default() -> Self {
        PlacementPolicy::canonical()
    }
}

impl PlacementPolicy {
    pub fn canonical() -> Self {
        PlacementPolicy {
            mode: PlacementMode::Canonical,
            seed: 0,
            radius: 0.5,
        }
    }

    pub fn random(seed: u64) -> Self {
        PlacementPolicy {
            mode: PlacementMode::Random,
            seed,
            radius: 0.5,
        }
    }

    pub fn with_radius(self, radius: f64) -> Self {
        PlacementPolicy { radius, ..self }
    }
}

/// One point per vertex, in the frame of the vertex's first corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub policy: PlacementPolicy,
    pub points: Vec<ExtendedPoint>,
}

fn random_klein(rng: &mut ChaCha8Rng, dim: Dimension, radius: f64) -> ExtendedPoint {
    let n = dim.n();
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            let scaled: Vec<f64> = v.iter().map(|x| radius * x).collect();
            let k = KleinPoint::new(dim, &scaled, false).expect("inside the unit ball");
            return from_klein(&k).expect("interior Klein point");
        }
    }
}

pub fn place_vertices(
    t: &Triangulation,
    c: &TransitionCocycle,
    p: &PeripheralData,
    policy: PlacementPolicy,
) -> Result<Placement, DevelopError> {
    if !(policy.radius > 0.0 && policy.radius < 1.0) {
        return Err(DevelopError::BadRadius(policy.radius));
    }
    let dim = t.dimension();
    let report = verify_peripheral(t, c, p, PERIPHERAL_TOL);
    if let Some(bad) = report.entries.iter().find(|e| e.failure.is_some()) {
        return Err(DevelopError::Peripheral {
            vertex: bad.vertex,
            reason: bad.failure.clone().unwrap_or_default(),
        });
    }
    let fixed = report.points(t);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let points = t
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| match v.kind {
            VertexKind::Ideal => fixed[&i],
            VertexKind::Finite => match policy.mode {
                PlacementMode::Canonical => ExtendedPoint::basepoint(dim),
                PlacementMode::Random => random_klein(&mut rng, dim, policy.radius),
            },
        })
        .collect();
    Ok(Placement { policy, points })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainEntry {
    pub simplex: i64,
    pub sign: i8,
    pub vertices: Vec<ExtendedPoint>,
}

/// Straightened fundamental cycle: one developed vertex tuple per simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DevelopedChain {
    pub entries: Vec<ChainEntry>,
    pub root: usize,
    pub seed: u64,
    /// Largest displacement between the two placements of a shared vertex.
    pub witness: f64,
}

/// Simplex frames from a breadth-first dual spanning tree (faces in index order).
fn tree_frames(t: &Triangulation, c: &TransitionCocycle, root: usize) -> Vec<Isometry> {
    let n = t.dimension().n();
    let mut frames: Vec<Option<Isometry>> = vec![None; t.simplices().len()];
    frames[root] = Some(Isometry::identity(t.dimension()));
    let mut queue = VecDeque::from([root]);
    while let Some(s) = queue.pop_front() {
        let h = frames[s].expect("queued simplices have frames");
        for f in 0..=n {
            let slot = Slot { simplex: s, face: f };
            let next = t.neighbour(slot).slot.simplex;
            if frames[next].is_none() {
                frames[next] = Some(h * c.at(slot));
                queue.push_back(next);
            }
        }
    }
    frames
        .into_iter()
        .map(|h| h.expect("the dual graph of a closed pseudo-manifold is connected"))
        .collect()
}

/// Develops the placement over the triangulation, rooting the dual tree at
/// simplex index `root`.
pub fn develop(
    t: &Triangulation,
    c: &TransitionCocycle,
    placement: &Placement,
    root: usize,
) -> Result<DevelopedChain, DevelopError> {
    if root >= t.simplices().len() {
        return Err(DevelopError::BadRoot(root));
    }
    let n = t.dimension().n();
    let corners = corner_frames(t, c);
    let local = |s: usize, k: usize| {
        let v = t.simplices()[s].vertices[k];
        corners.transport[s][k].act_unchecked(&placement.points[v])
    };

    let mut witness: f64 = 0.0;
    let mut worst = None;
    for g in t.gluings() {
        let nb = t.neighbour(g.from);
        let tr = c.at(g.from);
        for k in (0..=n).filter(|&k| k != g.from.face) {
            let here = local(g.from.simplex, k);
            let there = tr.act_unchecked(&local(g.to.simplex, nb.perm[k]));
            let d = displacement(&here, &there);
            if d > witness || d.is_nan() {
                witness = if d.is_nan() { f64::INFINITY } else { d };
                worst = Some((g.from, g.to));
            }
        }
    }
    if witness > WITNESS_FAIL {
        let (a, b) = worst.expect("set together with the witness");
        return Err(DevelopError::Equivariance { a, b, residual: witness });
    }

    let frames = tree_frames(t, c, root);
    let entries = t
        .simplices()
        .iter()
        .enumerate()
        .map(|(s, simplex)| ChainEntry {
            simplex: simplex.id,
            sign: simplex.sign,
            vertices: (0..=n).map(|k| frames[s].act_unchecked(&local(s, k))).collect(),
        })
        .collect();
    Ok(DevelopedChain {
        entries,
        root,
        seed: placement.policy.seed,
        witness,
    })
}
