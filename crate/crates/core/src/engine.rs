//! Representation volume from a developed fundamental cycle, and the
//! verification experiments built on it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::complex::{
    barycentric_subdivide, fundamental_cycle, to_document, validate_cocycle, ComplexError, PeripheralData,
    TransitionCocycle, Triangulation,
};
use crate::developing::{develop, place_vertices, DevelopError, PlacementPolicy};
use crate::simplex::{max_simplex_volume, simplex_volume_with, GeodesicSimplex, MethodChoice, VolumeError, VolumeMethod};

pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TOL: f64 = 1e-8;

/// Residual allowed around codimension-2 faces before volumes are computed.
pub const COCYCLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Develop(#[from] DevelopError),
    #[error("simplex {simplex}: {source}")]
    Volume { simplex: i64, source: VolumeError },
    #[error("quadrature did not converge on simplex {simplex}")]
    Quadrature { simplex: i64, partial: Box<VolumeReport> },
}

impl EngineError {
    /// Numerical failures as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, EngineError::Quadrature { .. } | EngineError::Volume { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeOptions {
    pub tol: f64,
    pub method: MethodChoice,
    pub placement: PlacementPolicy,
    pub root: usize,
}

impl Default for VolumeOptions {
    fn default() -> Self {
        VolumeOptions {
            tol: DEFAULT_TOL,
            method: MethodChoice::Auto,
            placement: PlacementPolicy::canonical(),
            root: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexVolume {
    pub simplex: i64,
    pub sign: i8,
    pub value: f64,
    pub est_error: f64,
    pub method: VolumeMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MethodCounts {
    pub closed_form: usize,
    pub quadrature: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub dimension: usize,
    pub simplices: usize,
    pub placement: PlacementPolicy,
    pub seed: u64,
    pub root: usize,
    pub method: MethodChoice,
    pub tol: f64,
    pub per_simplex_tol: f64,
    pub cocycle_tol: f64,
    pub witness: f64,
    /// SHA-256 of the canonical serialization of the input.
    pub input_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeReport {
    pub schema_version: u32,
    pub total: f64,
    pub est_error: f64,
    pub method_counts: MethodCounts,
    pub per_simplex: Vec<SimplexVolume>,
    pub metadata: ReportMetadata,
}

/// Neumaier-compensated sum in iteration order.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

impl VolumeReport {
    /// Signed per-simplex terms in input order.
    pub fn terms(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_simplex.iter().map(|e| f64::from(e.sign) * e.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

pub fn input_digest(t: &Triangulation, c: &TransitionCocycle, p: &PeripheralData) -> String {
    let doc = to_document(t, c, p);
    let bytes = serde_json::to_vec(&doc).expect("documents always serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Validates the input, develops it and sums the signed simplex volumes.
pub fn compute_volume(
    t: &Triangulation,
    c: &TransitionCocycle,
    p: &PeripheralData,
    opts: &VolumeOptions,
) -> Result<VolumeReport, EngineError> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(EngineError::BadTolerance(opts.tol));
    }
    let check = validate_cocycle(t, c, COCYCLE_TOL);
    if !check.pass {
        return Err(ComplexError::InvalidCocycle {
            max_residual: check.max_residual,
            failing: check.residuals.iter().filter(|r| !r.pass).count(),
        }
        .into());
    }
    fundamental_cycle(t)?;
    let placement = place_vertices(t, c, p, opts.placement)?;
    let chain = develop(t, c, &placement, opts.root)?;

    let n_simplices = chain.entries.len();
    let per_tol = opts.tol / n_simplices as f64;
    let results: Vec<_> = chain
        .entries
        .par_iter()
        .map(|e| {
            let s = GeodesicSimplex::new(e.vertices.clone())?;
            simplex_volume_with(&s, per_tol, opts.method)
        })
        .collect();

    let mut per_simplex = Vec::with_capacity(n_simplices);
    let mut failure = None;
    for (entry, result) in chain.entries.iter().zip(results) {
        let value = match result {
            Ok(v) => v,
            Err(VolumeError::QuadratureFailure { partial }) => {
                failure.get_or_insert(entry.simplex);
                partial
            }
            Err(source) => {
                return Err(EngineError::Volume {
                    simplex: entry.simplex,
                    source,
                })
            }
        };
        per_simplex.push(SimplexVolume {
            simplex: entry.simplex,
            sign: entry.sign,
            value: value.value,
            est_error: value.est_error,
            method: value.method,
        });
    }

    let mut method_counts = MethodCounts::default();
    for e in &per_simplex {
        match e.method {
            VolumeMethod::ClosedForm => method_counts.closed_form += 1,
            VolumeMethod::Quadrature => method_counts.quadrature += 1,
        }
    }
    let mut report = VolumeReport {
        schema_version: SCHEMA_VERSION,
        total: 0.0,
        est_error: per_simplex.iter().map(|e| e.est_error).sum(),
        method_counts,
        per_simplex,
        metadata: ReportMetadata {
            dimension: t.dimension().n(),
            simplices: n_simplices,
            placement: opts.placement,
            seed: opts.placement.seed,
            root: opts.root,
            method: opts.method,
            tol: opts.tol,
            per_simplex_tol: per_tol,
            cocycle_tol: COCYCLE_TOL,
            witness: chain.witness,
            input_digest: input_digest(t, c, p),
        },
    };
    report.total = compensated_sum(report.terms());
    match failure {
        Some(simplex) => Err(EngineError::Quadrature {
            simplex,
            partial: Box::new(report),
        }),
        None => Ok(report),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub schema_version: u32,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub seeds: Vec<u64>,
    pub values: Vec<f64>,
    pub max_deviation: f64,
    pub threshold: f64,
    /// Finite vertices are the only ones a placement moves.
    pub finite_vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

/// Seeds for the invariance samples, drawn from a stream keyed by `seed`.
pub fn derived_seeds(seed: u64, samples: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| rng.next_u64()).collect()
}

/// Recomputes the volume under `samples` random placements and compares.
pub fn invariance_test(
    t: &Triangulation,
    c: &TransitionCocycle,
    p: &PeripheralData,
    samples: usize,
    seed: u64,
    tol: f64,
) -> InvarianceReport {
    let seeds = derived_seeds(seed, samples);
    let threshold = 10.0 * tol;
    let mut report = InvarianceReport {
        schema_version: SCHEMA_VERSION,
        samples,
        seed,
        tol,
        seeds: seeds.clone(),
        values: Vec::new(),
        max_deviation: 0.0,
        threshold,
        finite_vertices: t.finite_vertex_count(),
        error: None,
        pass: false,
    };
    if samples < 2 {
        report.error = Some(format!("need at least 2 samples, got {samples}"));
        return report;
    }
    for s in seeds {
        let opts = VolumeOptions {
            tol,
            placement: PlacementPolicy::random(s),
            ..VolumeOptions::default()
        };
        match compute_volume(t, c, p, &opts) {
            Ok(r) => report.values.push(r.total),
            Err(e) => {
                report.error = Some(e.to_string());
                report.max_deviation = f64::INFINITY;
                return report;
            }
        }
    }
    let max = report.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = report.values.iter().copied().fold(f64::INFINITY, f64::min);
    report.max_deviation = max - min;
    report.pass = report.max_deviation <= threshold;
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionReport {
    pub schema_version: u32,
    pub tol: f64,
    pub simplices_before: usize,
    pub simplices_after: usize,
    pub vol_before: f64,
    pub vol_after: f64,
    pub delta: f64,
    pub budget: f64,
    pub pass: bool,
}

/// Compares the volume before and after one barycentric subdivision.
pub fn subdivision_test(
    t: &Triangulation,
    c: &TransitionCocycle,
    p: &PeripheralData,
    tol: f64,
) -> Result<SubdivisionReport, EngineError> {
    let opts = VolumeOptions {
        tol,
        ..VolumeOptions::default()
    };
    let before = compute_volume(t, c, p, &opts)?;
    let (st, sc) = barycentric_subdivide(t, c);
    let after = compute_volume(&st, &sc, p, &opts)?;
    let delta = after.total - before.total;
    let budget = 10.0 * tol * st.simplices().len() as f64;
    Ok(SubdivisionReport {
        schema_version: SCHEMA_VERSION,
        tol,
        simplices_before: t.simplices().len(),
        simplices_after: st.simplices().len(),
        vol_before: before.total,
        vol_after: after.total,
        delta,
        budget,
        pass: delta.abs() <= budget,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilnorWoodReport {
    pub schema_version: u32,
    pub total: f64,
    pub simplex_bound: f64,
    pub simplices: usize,
    pub bound: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Compares `|total|` with `N · vₙ`.
pub fn milnor_wood_report(report: &VolumeReport, n: usize, simplices: usize) -> Result<MilnorWoodReport, VolumeError> {
    let simplex_bound = max_simplex_volume(n)?;
    let bound = simplices as f64 * simplex_bound;
    let ratio = if bound > 0.0 { report.total.abs() / bound } else { 0.0 };
    Ok(MilnorWoodReport {
        schema_version: SCHEMA_VERSION,
        total: report.total,
        simplex_bound,
        simplices,
        bound,
        ratio,
        pass: report.total.abs() <= bound + report.est_error,
    })
}
