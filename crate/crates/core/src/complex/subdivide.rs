//! Barycentric subdivision of a triangulation together with its cocycle.
//!
//! Sub-simplex `(σ, π)` for a permutation `π` of the positions of `σ` has
//! vertices `w_j = barycentre of {π₀, …, π_j}` and index
//! `σ · (n+1)! + rank(π)`, permutations ranked lexicographically. Its faces
//! `j < n` are interior to `σ` and carry the identity; face `n` lies in the old
//! face opposite `π_n` and inherits that gluing's transition.

use std::collections::HashMap;

use super::{perm_sign, Gluing, Simplex, Slot, TransitionCocycle, Triangulation, Vertex, VertexKind};
use crate::hyperbolic::Isometry;

fn permutations(len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..len {
        for rest in permutations(len - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        self.0[a.max(b)] = a.min(b);
    }
}

/// Subdivides every simplex into `(n+1)!` pieces. New barycentre vertices are
/// finite and numbered after the existing vertex ids; old vertices keep their
/// ids, kinds and indices, so peripheral data carries over unchanged.
pub fn barycentric_subdivide(t: &Triangulation, c: &TransitionCocycle) -> (Triangulation, TransitionCocycle) {
    let n = t.dim.n();
    let perms = permutations(n + 1);
    let rank: HashMap<Vec<usize>, usize> = perms.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
    let masks = 1usize << (n + 1);
    let key = |s: usize, mask: usize| s * masks + mask;

    // faces of old simplices, identified across gluings
    let mut uf = UnionFind((0..t.simplices.len() * masks).collect());
    for s in 0..t.simplices.len() {
        for f in 0..=n {
            let nb = t.neighbour(Slot { simplex: s, face: f });
            for mask in (1..masks).filter(|m| m & (1 << f) == 0) {
                let image = (0..=n)
                    .filter(|k| mask & (1 << k) != 0)
                    .fold(0, |acc, k| acc | (1 << nb.perm[k]));
                uf.union(key(s, mask), key(nb.slot.simplex, image));
            }
        }
    }

    let mut vertices = t.vertices.clone();
    let mut next_id = t.vertices.iter().map(|v| v.id).max().unwrap_or(-1) + 1;
    let mut class_vertex: HashMap<usize, usize> = HashMap::new();
    for (s, simplex) in t.simplices.iter().enumerate() {
        for (k, &v) in simplex.vertices.iter().enumerate() {
            let root = uf.find(key(s, 1 << k));
            class_vertex.insert(root, v);
        }
    }

    let fact = perms.len();
    let mut simplices = Vec::with_capacity(t.simplices.len() * fact);
    for (s, old) in t.simplices.iter().enumerate() {
        for (r, p) in perms.iter().enumerate() {
            let mut mask = 0;
            let mut verts = Vec::with_capacity(n + 1);
            for &k in p {
                mask |= 1 << k;
                let root = uf.find(key(s, mask));
                let v = *class_vertex.entry(root).or_insert_with(|| {
                    vertices.push(Vertex {
                        id: next_id,
                        kind: VertexKind::Finite,
                    });
                    next_id += 1;
                    vertices.len() - 1
                });
                verts.push(v);
            }
            simplices.push(Simplex {
                id: (s * fact + r) as i64,
                vertices: verts,
                sign: old.sign * perm_sign(p),
            });
        }
    }

    let identity = Isometry::identity(t.dim);
    let interior_map = |j: usize| (0..=n).filter(|&k| k != j).collect::<Vec<_>>();
    let boundary_map: Vec<usize> = (0..n).collect();
    let mut gluings = Vec::new();
    let mut forward = Vec::new();
    for s in 0..t.simplices.len() {
        for (r, p) in perms.iter().enumerate() {
            let here = s * fact + r;
            for j in 0..n {
                let mut q = p.clone();
                q.swap(j, j + 1);
                let there = s * fact + rank[&q];
                if here < there {
                    gluings.push(Gluing {
                        from: Slot { simplex: here, face: j },
                        to: Slot { simplex: there, face: j },
                        vertex_map: interior_map(j),
                    });
                    forward.push(identity);
                }
            }
            let old_slot = Slot { simplex: s, face: p[n] };
            let nb = t.neighbour(old_slot);
            let q: Vec<usize> = p.iter().map(|&k| nb.perm[k]).collect();
            let there = nb.slot.simplex * fact + rank[&q];
            if here < there {
                gluings.push(Gluing {
                    from: Slot { simplex: here, face: n },
                    to: Slot { simplex: there, face: n },
                    vertex_map: boundary_map.clone(),
                });
                forward.push(c.at(old_slot));
            }
        }
    }
    let sub = Triangulation::new(t.dim, vertices, simplices, gluings).expect("subdivision of a valid triangulation");
    let cocycle = TransitionCocycle::new(&sub, forward).expect("one transition per gluing");
    (sub, cocycle)
}
