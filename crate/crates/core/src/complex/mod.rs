//! Triangulations of the end compactification, transition cocycles on face
//! gluings, peripheral data and their validation.
//!
//! Conventions:
//! - face `f` of a simplex is the face opposite vertex position `f`;
//! - a gluing's `vertex_map` lists, for the positions of the `from` simplex
//!   other than `f` in increasing order, the matching positions of the `to`
//!   simplex;
//! - the transition `g` of a gluing relates local coordinates by
//!   `x_from = g · x_to`; the reverse slot carries `g⁻¹`;
//! - peripheral isometries of a vertex are written in the local coordinates
//!   of its first corner, the smallest `(simplex, position)` pair holding it.

pub mod format;
mod subdivide;

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hyperbolic::{common_fixed_point, Dimension, ExtendedPoint, HyperbolicError, Isometry};

pub use format::{Document, MatrixDoc, VertexKind};
pub use subdivide::barycentric_subdivide;

use format::{isometry_from_doc, matrix_doc, GluingDoc, SimplexDoc, TransitionDoc, VertexDoc};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid input at {path}: {message}")]
    Invariant { path: String, message: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("non-orientable or mis-signed: face {a} glued to face {b}")]
    NonOrientable { a: Slot, b: Slot },
    #[error("cocycle fails validation: max residual {max_residual:.3e} at {failing} codimension-2 faces")]
    InvalidCocycle { max_residual: f64, failing: usize },
}

fn invariant(path: impl Into<String>, message: impl Into<String>) -> ComplexError {
    ComplexError::Invariant {
        path: path.into(),
        message: message.into(),
    }
}

/// A face slot: simplex index and the position opposite the face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub simplex: usize,
    pub face: usize,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.simplex, self.face)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: i64,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    pub id: i64,
    /// Vertex indices (into [`Triangulation::vertices`]) by position.
    pub vertices: Vec<usize>,
    pub sign: i8,
}

/// One listed face pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub from: Slot,
    pub to: Slot,
    pub vertex_map: Vec<usize>,
}

/// What lies across a face slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbour {
    pub slot: Slot,
    /// Full position permutation: position `k` here is `perm[k]` there.
    pub perm: Vec<usize>,
    /// Index of the listed gluing and whether this slot is its `from` side.
    pub gluing: usize,
    pub forward: bool,
}

/// Closed pseudo-manifold triangulation with ideal and finite vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    dim: Dimension,
    vertices: Vec<Vertex>,
    simplices: Vec<Simplex>,
    gluings: Vec<Gluing>,
    neighbours: Vec<Vec<Neighbour>>,
}

impl Triangulation {
    /// Checks the structural invariants and builds the slot table.
    pub fn new(
        dim: Dimension,
        vertices: Vec<Vertex>,
        simplices: Vec<Simplex>,
        gluings: Vec<Gluing>,
    ) -> Result<Self, ComplexError> {
        let n = dim.n();
        let mut ids = HashSet::new();
        for (i, v) in vertices.iter().enumerate() {
            if !ids.insert(v.id) {
                return Err(invariant(format!("$.vertices[{i}].id"), format!("duplicate vertex id {}", v.id)));
            }
        }
        if !vertices.iter().any(|v| v.kind == VertexKind::Ideal) {
            return Err(invariant("$.vertices", "at least one ideal vertex is required"));
        }
        let mut sids = HashSet::new();
        for (i, s) in simplices.iter().enumerate() {
            if !sids.insert(s.id) {
                return Err(invariant(format!("$.simplices[{i}].id"), format!("duplicate simplex id {}", s.id)));
            }
            if s.vertices.len() != n + 1 {
                return Err(invariant(
                    format!("$.simplices[{i}].vertices"),
                    format!("expected {} vertices, found {}", n + 1, s.vertices.len()),
                ));
            }
            if let Some(&bad) = s.vertices.iter().find(|&&v| v >= vertices.len()) {
                return Err(invariant(format!("$.simplices[{i}].vertices"), format!("vertex index {bad} out of range")));
            }
            if s.sign != 1 && s.sign != -1 {
                return Err(invariant(format!("$.simplices[{i}].sign"), "sign must be 1 or -1"));
            }
        }
        if simplices.is_empty() {
            return Err(invariant("$.simplices", "no simplices"));
        }

        let mut neighbours: Vec<Vec<Option<Neighbour>>> = vec![vec![None; n + 1]; simplices.len()];
        for (gi, g) in gluings.iter().enumerate() {
            let path = format!("$.gluings[{gi}]");
            for slot in [g.from, g.to] {
                if slot.simplex >= simplices.len() || slot.face > n {
                    return Err(invariant(path.clone(), format!("slot {slot} does not exist")));
                }
            }
            if g.vertex_map.len() != n {
                return Err(invariant(format!("{path}.vertex_map"), format!("expected {n} entries")));
            }
            let mut perm = vec![0; n + 1];
            let mut seen = vec![false; n + 1];
            seen[g.to.face] = true;
            perm[g.from.face] = g.to.face;
            let others = (0..=n).filter(|&k| k != g.from.face);
            for (k, &m) in others.zip(&g.vertex_map) {
                if m > n || seen[m] {
                    return Err(invariant(
                        format!("{path}.vertex_map"),
                        "not a bijection onto the positions of the target face",
                    ));
                }
                seen[m] = true;
                perm[k] = m;
            }
            for k in (0..=n).filter(|&k| k != g.from.face) {
                let a = simplices[g.from.simplex].vertices[k];
                let b = simplices[g.to.simplex].vertices[perm[k]];
                if a != b {
                    return Err(invariant(
                        format!("{path}.vertex_map"),
                        format!(
                            "position {k} carries vertex {} but is mapped to vertex {}",
                            vertices[a].id, vertices[b].id
                        ),
                    ));
                }
            }
            let mut inverse = vec![0; n + 1];
            for (k, &m) in perm.iter().enumerate() {
                inverse[m] = k;
            }
            if g.from == g.to {
                return Err(invariant(path, format!("slot {} glued to itself", g.from)));
            }
            for (slot, other, p, forward) in [(g.from, g.to, perm, true), (g.to, g.from, inverse, false)] {
                let cell = &mut neighbours[slot.simplex][slot.face];
                if cell.is_some() {
                    return Err(invariant(path.clone(), format!("face slot {slot} is glued twice")));
                }
                *cell = Some(Neighbour {
                    slot: other,
                    perm: p,
                    gluing: gi,
                    forward,
                });
            }
        }
        let mut table = Vec::with_capacity(simplices.len());
        for (s, row) in neighbours.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n + 1);
            for (f, cell) in row.into_iter().enumerate() {
                out.push(cell.ok_or_else(|| invariant("$.gluings", format!("face slot ({s}, {f}) is not glued")))?);
            }
            table.push(out);
        }
        let t = Triangulation {
            dim,
            vertices,
            simplices,
            gluings,
            neighbours: table,
        };
        t.check_vertex_classes()?;
        Ok(t)
    }

    /// Every declared vertex must be exactly one class of glued corners.
    fn check_vertex_classes(&self) -> Result<(), ComplexError> {
        let classes = self.corner_classes();
        let mut owner: HashMap<usize, usize> = HashMap::new();
        for (s, row) in classes.iter().enumerate() {
            for (k, &cls) in row.iter().enumerate() {
                let v = self.simplices[s].vertices[k];
                if let Some(&prev) = owner.get(&v) {
                    if prev != cls {
                        return Err(invariant(
                            format!("$.simplices[{s}].vertices[{k}]"),
                            format!("vertex {} is used by corners that are not glued together", self.vertices[v].id),
                        ));
                    }
                } else {
                    owner.insert(v, cls);
                }
            }
        }
        if let Some((i, v)) = self.vertices.iter().enumerate().find(|(i, _)| !owner.contains_key(i)) {
            return Err(invariant(format!("$.vertices[{i}]"), format!("vertex {} is not used by any simplex", v.id)));
        }
        Ok(())
    }

    /// Union-find over corners `(simplex, position)` glued across faces.
    fn corner_classes(&self) -> Vec<Vec<usize>> {
        let n = self.dim.n();
        let idx = |s: usize, k: usize| s * (n + 1) + k;
        let mut parent: Vec<usize> = (0..self.simplices.len() * (n + 1)).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (s, row) in self.neighbours.iter().enumerate() {
            for (f, nb) in row.iter().enumerate() {
                for k in (0..=n).filter(|&k| k != f) {
                    let a = find(&mut parent, idx(s, k));
                    let b = find(&mut parent, idx(nb.slot.simplex, nb.perm[k]));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.simplices.len())
            .map(|s| (0..=n).map(|k| find(&mut parent, idx(s, k))).collect())
            .collect()
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn neighbour(&self, slot: Slot) -> &Neighbour {
        &self.neighbours[slot.simplex][slot.face]
    }

    pub fn ideal_vertex_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Ideal).count()
    }

    pub fn finite_vertex_count(&self) -> usize {
        self.vertices.len() - self.ideal_vertex_count()
    }

    /// Copy with every simplex sign negated.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for s in &mut out.simplices {
            s.sign = -s.sign;
        }
        out
    }
}

/// Source form of a transition, kept for faithful serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum TransitionSource {
    Matrix(MatrixDoc),
    Word(String),
}

/// An isometry per face slot; the two slots of a gluing carry inverse elements.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCocycle {
    dim: Dimension,
    forward: Vec<Isometry>,
    slots: Vec<Vec<Isometry>>,
    sources: Vec<TransitionSource>,
    generators: Option<BTreeMap<String, MatrixDoc>>,
}

impl TransitionCocycle {
    /// Builds a cocycle from one isometry per listed gluing (its `from` side).
    pub fn new(t: &Triangulation, forward: Vec<Isometry>) -> Result<Self, ComplexError> {
        let sources = forward.iter().map(|g| TransitionSource::Matrix(matrix_doc(g))).collect();
        Self::with_sources(t, forward, sources, None)
    }

    fn with_sources(
        t: &Triangulation,
        forward: Vec<Isometry>,
        sources: Vec<TransitionSource>,
        generators: Option<BTreeMap<String, MatrixDoc>>,
    ) -> Result<Self, ComplexError> {
        if forward.len() != t.gluings.len() {
            return Err(invariant(
                "$.gluings",
                format!("{} transitions for {} gluings", forward.len(), t.gluings.len()),
            ));
        }
        if let Some(i) = forward.iter().position(|g| g.dimension() != t.dim) {
            return Err(invariant(format!("$.gluings[{i}].transition"), "dimension mismatch"));
        }
        let slots = t
            .neighbours
            .iter()
            .map(|row| {
                row.iter()
                    .map(|nb| {
                        let g = forward[nb.gluing];
                        if nb.forward {
                            g
                        } else {
                            g.inverse()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(TransitionCocycle {
            dim: t.dim,
            forward,
            slots,
            sources,
            generators,
        })
    }

    /// The trivial representation.
    pub fn identity(t: &Triangulation) -> Self {
        Self::new(t, vec![Isometry::identity(t.dim); t.gluings.len()]).expect("sizes match")
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    /// Transition applied when crossing `slot`.
    pub fn at(&self, slot: Slot) -> Isometry {
        self.slots[slot.simplex][slot.face]
    }

    /// Transitions of the listed gluings, `from` side.
    pub fn forward(&self) -> &[Isometry] {
        &self.forward
    }

    /// Every transition replaced by `h · g · h⁻¹`.
    pub fn conjugated(&self, t: &Triangulation, h: &Isometry) -> Self {
        Self::new(t, self.forward.iter().map(|g| g.conjugate_by(h)).collect()).expect("same shape")
    }
}

/// Declared peripheral holonomy per ideal vertex (keyed by vertex index).
#[derive(Debug, Clone, PartialEq)]
pub struct PeripheralData {
    entries: BTreeMap<usize, Vec<(Isometry, MatrixDoc)>>,
}

impl PeripheralData {
    pub fn new(entries: BTreeMap<usize, Vec<Isometry>>) -> Self {
        PeripheralData {
            entries: entries
                .into_iter()
                .map(|(v, gs)| (v, gs.into_iter().map(|g| (g, matrix_doc(&g))).collect()))
                .collect(),
        }
    }

    /// Identity holonomy at every ideal vertex.
    pub fn trivial(t: &Triangulation) -> Self {
        Self::new(
            t.vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| v.kind == VertexKind::Ideal)
                .map(|(i, _)| (i, vec![Isometry::identity(t.dim)]))
                .collect(),
        )
    }

    pub fn get(&self, vertex: usize) -> Option<Vec<Isometry>> {
        self.entries.get(&vertex).map(|gs| gs.iter().map(|(g, _)| *g).collect())
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn conjugated(&self, h: &Isometry) -> Self {
        Self::new(
            self.entries
                .iter()
                .map(|(&v, gs)| (v, gs.iter().map(|(g, _)| g.conjugate_by(h)).collect()))
                .collect(),
        )
    }
}

/// Parsed input file.
#[derive(Debug, Clone, PartialEq)]
pub struct Input {
    pub triangulation: Triangulation,
    pub cocycle: TransitionCocycle,
    pub peripheral: PeripheralData,
}

fn schema(path: String, message: impl Into<String>) -> ComplexError {
    ComplexError::Schema {
        path,
        message: message.into(),
    }
}

/// Parses and structurally validates an input document.
pub fn parse(bytes: &[u8]) -> Result<Input, ComplexError> {
    let doc = Document::from_slice(bytes).map_err(|(path, message)| schema(path, message))?;
    from_document(&doc)
}

pub fn from_document(doc: &Document) -> Result<Input, ComplexError> {
    let dim = Dimension::from_n(doc.dimension).map_err(|e| schema("$.dimension".into(), e.to_string()))?;
    let n = dim.n();
    let vertex_index: HashMap<i64, usize> = doc.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
    let simplex_index: HashMap<i64, usize> = doc.simplices.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    let vertices = doc
        .vertices
        .iter()
        .map(|v| Vertex { id: v.id, kind: v.kind })
        .collect();
    let mut simplices = Vec::with_capacity(doc.simplices.len());
    for (i, s) in doc.simplices.iter().enumerate() {
        let mut vs = Vec::with_capacity(s.vertices.len());
        for (k, id) in s.vertices.iter().enumerate() {
            let v = vertex_index
                .get(id)
                .ok_or_else(|| invariant(format!("$.simplices[{i}].vertices[{k}]"), format!("unknown vertex id {id}")))?;
            vs.push(*v);
        }
        let sign = i8::try_from(s.sign).unwrap_or(0);
        simplices.push(Simplex { id: s.id, vertices: vs, sign });
    }
    let slot = |path: String, raw: [i64; 2]| -> Result<Slot, ComplexError> {
        let simplex = *simplex_index
            .get(&raw[0])
            .ok_or_else(|| invariant(path.clone(), format!("unknown simplex id {}", raw[0])))?;
        let face = usize::try_from(raw[1])
            .ok()
            .filter(|&f| f <= n)
            .ok_or_else(|| invariant(path, format!("face index {} out of range", raw[1])))?;
        Ok(Slot { simplex, face })
    };
    let mut gluings = Vec::with_capacity(doc.gluings.len());
    for (i, g) in doc.gluings.iter().enumerate() {
        let from = slot(format!("$.gluings[{i}].from"), g.from)?;
        let to = slot(format!("$.gluings[{i}].to"), g.to)?;
        let vertex_map = g
            .vertex_map
            .iter()
            .map(|&m| usize::try_from(m).map_err(|_| invariant(format!("$.gluings[{i}].vertex_map"), "negative position")))
            .collect::<Result<_, _>>()?;
        gluings.push(Gluing { from, to, vertex_map });
    }
    let t = Triangulation::new(dim, vertices, simplices, gluings)?;

    let generators = match &doc.generators {
        Some(gens) => {
            let mut out = BTreeMap::new();
            for (name, m) in gens {
                let g = isometry_from_doc(dim, m)
                    .map_err(|e| invariant(format!("$.generators.{name}"), e.to_string()))?;
                out.insert(name.clone(), g);
            }
            out
        }
        None => BTreeMap::new(),
    };
    let mut forward = Vec::with_capacity(doc.gluings.len());
    let mut sources = Vec::with_capacity(doc.gluings.len());
    for (i, g) in doc.gluings.iter().enumerate() {
        let path = format!("$.gluings[{i}].transition");
        match &g.transition {
            TransitionDoc::Matrix(m) => {
                forward.push(isometry_from_doc(dim, m).map_err(|e| invariant(path, e.to_string()))?);
                sources.push(TransitionSource::Matrix(*m));
            }
            TransitionDoc::Word { word } => {
                forward.push(evaluate_word(dim, &generators, word).map_err(|e| match e {
                    ComplexError::UnknownGenerator(name) => {
                        invariant(path, format!("unknown generator `{name}`"))
                    }
                    other => other,
                })?);
                sources.push(TransitionSource::Word(word.clone()));
            }
        }
    }
    let cocycle = TransitionCocycle::with_sources(&t, forward, sources, doc.generators.clone())?;

    let mut entries = BTreeMap::new();
    for (key, ms) in &doc.peripheral {
        let path = format!("$.peripheral.{key}");
        let v = key
            .parse::<i64>()
            .ok()
            .and_then(|id| vertex_index.get(&id).copied())
            .ok_or_else(|| invariant(path.clone(), format!("unknown vertex id `{key}`")))?;
        if t.vertices[v].kind != VertexKind::Ideal {
            return Err(invariant(path, "peripheral data given for a finite vertex"));
        }
        let mut gs = Vec::with_capacity(ms.len());
        for (j, m) in ms.iter().enumerate() {
            let g = isometry_from_doc(dim, m).map_err(|e| invariant(format!("{path}[{j}]"), e.to_string()))?;
            gs.push((g, *m));
        }
        entries.insert(v, gs);
    }
    Ok(Input {
        triangulation: t,
        cocycle,
        peripheral: PeripheralData { entries },
    })
}

/// Inverse of [`from_document`]: transitions keep their source form.
pub fn to_document(t: &Triangulation, c: &TransitionCocycle, p: &PeripheralData) -> Document {
    let vertices = t
        .vertices
        .iter()
        .map(|v| VertexDoc { id: v.id, kind: v.kind })
        .collect();
    let simplices = t
        .simplices
        .iter()
        .map(|s| SimplexDoc {
            id: s.id,
            vertices: s.vertices.iter().map(|&v| t.vertices[v].id).collect(),
            sign: s.sign as i64,
        })
        .collect();
    let gluings = t
        .gluings
        .iter()
        .zip(&c.sources)
        .map(|(g, src)| GluingDoc {
            from: [t.simplices[g.from.simplex].id, g.from.face as i64],
            to: [t.simplices[g.to.simplex].id, g.to.face as i64],
            vertex_map: g.vertex_map.iter().map(|&m| m as i64).collect(),
            transition: match src {
                TransitionSource::Matrix(m) => TransitionDoc::Matrix(*m),
                TransitionSource::Word(w) => TransitionDoc::Word { word: w.clone() },
            },
        })
        .collect();
    let peripheral = p
        .entries
        .iter()
        .map(|(&v, gs)| (t.vertices[v].id.to_string(), gs.iter().map(|(_, m)| *m).collect()))
        .collect();
    Document {
        dimension: t.dim.n() as i64,
        vertices,
        simplices,
        gluings,
        generators: c.generators.clone(),
        peripheral,
    }
}

pub fn serialize(t: &Triangulation, c: &TransitionCocycle, p: &PeripheralData) -> String {
    to_document(t, c, p).to_json()
}

/// Parses a generator token: `a`, `a^-1`, `a⁻¹` or `a^{-1}`.
fn parse_letter(token: &str) -> (&str, bool) {
    for suffix in ["^-1", "⁻¹", "^{-1}"] {
        if let Some(name) = token.strip_suffix(suffix) {
            return (name, true);
        }
    }
    (token, false)
}

/// Product of the letters of a whitespace-separated word, left to right.
pub fn evaluate_word(
    dim: Dimension,
    generators: &BTreeMap<String, Isometry>,
    word: &str,
) -> Result<Isometry, ComplexError> {
    let mut out = Isometry::identity(dim);
    for token in word.split_whitespace() {
        let (name, inverse) = parse_letter(token);
        let g = generators
            .get(name)
            .ok_or_else(|| ComplexError::UnknownGenerator(name.to_string()))?;
        let g = if inverse { g.inverse() } else { *g };
        out = out * g;
    }
    Ok(out)
}

/// Builds a cocycle from one word per listed gluing and validates it.
pub fn word_to_cocycle(
    t: &Triangulation,
    generators: &BTreeMap<String, Isometry>,
    face_words: &[String],
    tol: f64,
) -> Result<TransitionCocycle, ComplexError> {
    if face_words.len() != t.gluings.len() {
        return Err(invariant(
            "$.gluings",
            format!("{} words for {} gluings", face_words.len(), t.gluings.len()),
        ));
    }
    let forward = face_words
        .iter()
        .map(|w| evaluate_word(t.dim, generators, w))
        .collect::<Result<Vec<_>, _>>()?;
    let sources = face_words.iter().map(|w| TransitionSource::Word(w.clone())).collect();
    let docs = generators.iter().map(|(k, g)| (k.clone(), matrix_doc(g))).collect();
    let c = TransitionCocycle::with_sources(t, forward, sources, Some(docs))?;
    let report = validate_cocycle(t, &c, tol);
    if !report.pass {
        return Err(ComplexError::InvalidCocycle {
            max_residual: report.max_residual,
            failing: report.residuals.iter().filter(|r| !r.pass).count(),
        });
    }
    Ok(c)
}

/// Holonomy residual around one codimension-2 face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codim2Residual {
    pub id: usize,
    /// Simplex id and positions spanning the face in its first occurrence.
    pub simplex: i64,
    pub positions: Vec<usize>,
    pub valence: usize,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub residuals: Vec<Codim2Residual>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// A codimension-2 face as the cycle of slots crossed around it.
struct Codim2 {
    simplex: usize,
    positions: Vec<usize>,
    slots: Vec<Slot>,
}

/// Walks every codimension-2 face: edges in space, vertex corners in the
/// plane. Faces are numbered by first occurrence in `(simplex, positions)`
/// order.
fn codim2_faces(t: &Triangulation) -> Vec<Codim2> {
    let n = t.dim.n();
    let mut seen: HashSet<(usize, Vec<usize>)> = HashSet::new();
    let mut out = Vec::new();
    let subsets: Vec<Vec<usize>> = match n {
        2 => (0..3).map(|k| vec![k]).collect(),
        _ => (0..4)
            .flat_map(|i| ((i + 1)..4).map(move |j| vec![i, j]))
            .collect(),
    };
    for s in 0..t.simplices.len() {
        for a in &subsets {
            if seen.contains(&(s, a.clone())) {
                continue;
            }
            let rest: Vec<usize> = (0..=n).filter(|k| !a.contains(k)).collect();
            let (mut cs, mut ca, mut exit, mut other) = (s, a.clone(), rest[0], rest[1]);
            let mut slots = Vec::new();
            loop {
                let mut key = ca.clone();
                key.sort_unstable();
                seen.insert((cs, key));
                let slot = Slot { simplex: cs, face: exit };
                slots.push(slot);
                let nb = t.neighbour(slot);
                let next_a: Vec<usize> = ca.iter().map(|&k| nb.perm[k]).collect();
                let (next_exit, next_other) = (nb.perm[other], nb.perm[exit]);
                cs = nb.slot.simplex;
                ca = next_a;
                exit = next_exit;
                other = next_other;
                let mut sorted = ca.clone();
                sorted.sort_unstable();
                if cs == s && sorted == *a && exit == rest[0] {
                    break;
                }
            }
            out.push(Codim2 {
                simplex: s,
                positions: a.clone(),
                slots,
            });
        }
    }
    out
}

/// Checks that transitions compose to the identity around every
/// codimension-2 face. In the plane, corners at ideal vertices are skipped:
/// the composite there is the peripheral holonomy.
pub fn validate_cocycle(t: &Triangulation, c: &TransitionCocycle, tol: f64) -> CocycleReport {
    let mut residuals = Vec::new();
    for face in codim2_faces(t) {
        if t.dim == Dimension::Two {
            let v = t.simplices[face.simplex].vertices[face.positions[0]];
            if t.vertices[v].kind == VertexKind::Ideal {
                continue;
            }
        }
        let mut m = Isometry::identity(t.dim);
        for slot in &face.slots {
            m = m * c.at(*slot);
        }
        let residual = m.identity_residual();
        residuals.push(Codim2Residual {
            id: residuals.len(),
            simplex: t.simplices[face.simplex].id,
            positions: face.positions,
            valence: face.slots.len(),
            residual,
            pass: residual <= tol,
        });
    }
    let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    CocycleReport {
        pass: residuals.iter().all(|r| r.pass),
        residuals,
        max_residual,
        tol,
    }
}

/// Sign of a permutation given as images.
pub(crate) fn perm_sign(p: &[usize]) -> i8 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Signed simplex list whose boundary cancels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalCycle {
    pub entries: Vec<(i64, i8)>,
}

/// The fundamental cycle `Σ εᵢ σᵢ`, after checking that every glued face pair
/// receives opposite induced orientations.
pub fn fundamental_cycle(t: &Triangulation) -> Result<FundamentalCycle, ComplexError> {
    for g in &t.gluings {
        let nb = t.neighbour(g.from);
        let product = t.simplices[g.from.simplex].sign * t.simplices[g.to.simplex].sign * perm_sign(&nb.perm);
        if product != -1 {
            return Err(ComplexError::NonOrientable { a: g.from, b: g.to });
        }
    }
    Ok(FundamentalCycle {
        entries: t.simplices.iter().map(|s| (s.id, s.sign)).collect(),
    })
}

/// Transports of every corner into the frame of its vertex's first corner.
#[derive(Debug, Clone)]
pub struct CornerFrames {
    /// `transport[s][k]`: local position at corner `(s, k)` is
    /// `transport[s][k] · (position in the first-corner frame)`.
    pub transport: Vec<Vec<Isometry>>,
    /// Non-trivial link loops per vertex, in the first-corner frame.
    pub loops: Vec<Vec<Isometry>>,
    pub first_corner: Vec<(usize, usize)>,
}

/// Breadth-first transport over glued corners, vertices in order of first
/// corner.
pub fn corner_frames(t: &Triangulation, c: &TransitionCocycle) -> CornerFrames {
    let n = t.dim.n();
    let id = Isometry::identity(t.dim);
    let mut transport: Vec<Vec<Option<Isometry>>> = vec![vec![None; n + 1]; t.simplices.len()];
    let mut loops = vec![Vec::new(); t.vertices.len()];
    let mut first_corner = vec![(usize::MAX, usize::MAX); t.vertices.len()];
    for s in 0..t.simplices.len() {
        for k in 0..=n {
            if transport[s][k].is_some() {
                continue;
            }
            let v = t.simplices[s].vertices[k];
            first_corner[v] = (s, k);
            transport[s][k] = Some(id);
            let mut queue = VecDeque::from([(s, k)]);
            while let Some((cs, ck)) = queue.pop_front() {
                let here = transport[cs][ck].expect("queued corners are set");
                for f in (0..=n).filter(|&f| f != ck) {
                    let slot = Slot { simplex: cs, face: f };
                    let nb = t.neighbour(slot);
                    let g = c.at(slot);
                    let (os, ok) = (nb.slot.simplex, nb.perm[ck]);
                    let candidate = g.inverse() * here;
                    match transport[os][ok] {
                        None => {
                            transport[os][ok] = Some(candidate);
                            queue.push_back((os, ok));
                        }
                        Some(there) => {
                            let lp = (here.inverse() * g) * there;
                            if lp.identity_residual() > 1e-12 {
                                loops[v].push(lp);
                            }
                        }
                    }
                }
            }
        }
    }
    CornerFrames {
        transport: transport
            .into_iter()
            .map(|row| row.into_iter().map(|g| g.expect("every corner is reached")).collect())
            .collect(),
        loops,
        first_corner,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeripheralEntry {
    pub vertex: i64,
    pub point: Option<ExtendedPoint>,
    pub failure: Option<String>,
    /// Largest displacement of `point` under the link loops of the cocycle.
    pub loop_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeripheralReport {
    pub entries: Vec<PeripheralEntry>,
    pub pass: bool,
}

impl PeripheralReport {
    /// Fixed point of each ideal vertex, by vertex index.
    pub fn points(&self, t: &Triangulation) -> HashMap<usize, ExtendedPoint> {
        let index: HashMap<i64, usize> = t.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        self.entries
            .iter()
            .filter_map(|e| e.point.map(|p| (index[&e.vertex], p)))
            .collect()
    }
}

/// The common boundary fixed point of each ideal vertex's declared holonomy.
pub fn verify_peripheral(t: &Triangulation, c: &TransitionCocycle, p: &PeripheralData, tol: f64) -> PeripheralReport {
    let frames = corner_frames(t, c);
    let mut entries = Vec::new();
    for (i, v) in t.vertices.iter().enumerate() {
        if v.kind != VertexKind::Ideal {
            continue;
        }
        let (point, failure) = match p.get(i) {
            None => (None, Some("no peripheral data declared".to_string())),
            Some(gs) => match common_fixed_point(&gs, tol) {
                Ok(pt) => (Some(pt), None),
                Err(HyperbolicError::NoCommonFixedPoint) => {
                    (None, Some("peripheral isometries have no common boundary fixed point".to_string()))
                }
                Err(e) => (None, Some(e.to_string())),
            },
        };
        let loop_residual = point.map(|pt| {
            frames.loops[i]
                .iter()
                .map(|g| crate::hyperbolic::displacement(&g.act_unchecked(&pt), &pt))
                .fold(0.0, f64::max)
        });
        entries.push(PeripheralEntry {
            vertex: v.id,
            point,
            failure,
            loop_residual,
        });
    }
    PeripheralReport {
        pass: entries.iter().all(|e| e.failure.is_none()),
        entries,
    }
}
