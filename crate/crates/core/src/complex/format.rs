//! Serde model of the JSON input document, in on-disk field order.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::hyperbolic::{Dimension, HyperbolicError, Isometry};

/// A matrix entry: a bare number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Row-major 2×2 matrix.
pub type MatrixDoc = [[Entry; 2]; 2];

pub fn matrix_value(m: &MatrixDoc) -> [[Complex64; 2]; 2] {
    [
        [m[0][0].value(), m[0][1].value()],
        [m[1][0].value(), m[1][1].value()],
    ]
}

/// Plane matrices are written with real entries, space matrices with pairs.
pub fn matrix_doc(g: &Isometry) -> MatrixDoc {
    let m = g.matrix();
    let entry = |z: Complex64| match g.dimension() {
        Dimension::Two => Entry::Real(z.re + 0.0),
        Dimension::Three => Entry::Complex([z.re + 0.0, z.im + 0.0]),
    };
    [[entry(m[0][0]), entry(m[0][1])], [entry(m[1][0]), entry(m[1][1])]]
}

/// Unit-determinant check loose enough for decimal input, then exact rescaling.
pub const PARSE_DET_TOL: f64 = 1e-6;

pub fn isometry_from_doc(dim: Dimension, m: &MatrixDoc) -> Result<Isometry, HyperbolicError> {
    if dim == Dimension::Two && m.iter().flatten().any(|e| e.value().im != 0.0) {
        return Err(HyperbolicError::NotReal);
    }
    let value = matrix_value(m);
    let det = value[0][0] * value[1][1] - value[0][1] * value[1][0];
    if !(det.re.is_finite() && det.im.is_finite()) {
        return Err(HyperbolicError::NonFinite);
    }
    if (det - 1.0).norm() > PARSE_DET_TOL {
        return Err(HyperbolicError::Determinant(det));
    }
    Isometry::from_matrix(dim, value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Ideal,
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: i64,
    pub kind: VertexKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexDoc {
    pub id: i64,
    pub vertices: Vec<i64>,
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransitionDoc {
    Matrix(MatrixDoc),
    Word {
        word: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDoc {
    pub from: [i64; 2],
    pub to: [i64; 2],
    pub vertex_map: Vec<i64>,
    pub transition: TransitionDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub dimension: i64,
    pub vertices: Vec<VertexDoc>,
    pub simplices: Vec<SimplexDoc>,
    pub gluings: Vec<GluingDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<BTreeMap<String, MatrixDoc>>,
    pub peripheral: BTreeMap<String, Vec<MatrixDoc>>,
}

impl Document {
    /// Deserializes, reporting schema errors with the JSON path of the fault.
    pub fn from_slice(bytes: &[u8]) -> Result<Self, (String, String)> {
        let text = std::str::from_utf8(bytes).map_err(|e| (String::from("$"), format!("invalid UTF-8: {e}")))?;
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            (format!("$.{path}").replace("$..", "$"), e.into_inner().to_string())
        })
    }

    /// Pretty JSON with two-space indentation and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents always serialize");
        out.push('\n');
        out
    }
}
