mod common;

use std::f64::consts::PI;

use repvol_core::complex::{fundamental_cycle, serialize, verify_peripheral};
use repvol_core::*;

use common::*;

fn raw(name: &str) -> serde_json::Value {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn serialization_reproduces_every_file() {
    for name in [
        "figure8.json",
        "figure8_broken.json",
        "figure8_trivial.json",
        "figure8_upper.json",
        "figure8_words.json",
        "punctured_torus.json",
        "punctured_torus_trivial.json",
    ] {
        let input = corpus(name);
        let text = serialize(&input.triangulation, &input.cocycle, &input.peripheral);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value, raw(name), "{name}");
    }
}

#[test]
fn words_and_matrices_agree() {
    let a = corpus("figure8.json");
    let b = corpus("figure8_words.json");
    for (g, h) in a.cocycle.forward().iter().zip(b.cocycle.forward()) {
        assert!(g.distance(h) < 1e-12);
    }
    let opts = VolumeOptions::default();
    let va = compute_volume(&a.triangulation, &a.cocycle, &a.peripheral, &opts).unwrap();
    let vb = compute_volume(&b.triangulation, &b.cocycle, &b.peripheral, &opts).unwrap();
    assert!((va.total - vb.total).abs() < 1e-12);
    assert!((va.total.abs() - 2.0 * regular_ideal_volume()).abs() < 1e-10);
}

#[test]
fn figure_eight_edges_have_valence_six() {
    let input = corpus("figure8.json");
    let report = validate_cocycle(&input.triangulation, &input.cocycle, 1e-9);
    assert!(report.pass);
    assert_eq!(report.residuals.len(), 2);
    assert!(report.residuals.iter().all(|r| r.valence == 6));
    let cycle = fundamental_cycle(&input.triangulation).unwrap();
    assert_eq!(cycle.entries.len(), 2);
}

#[test]
fn broken_cocycle_is_rejected_everywhere() {
    let input = corpus("figure8_broken.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let report = validate_cocycle(t, c, 1e-9);
    assert!(!report.pass);
    assert!(report.max_residual > 1e-4);
    let err = compute_volume(t, c, p, &VolumeOptions::default()).unwrap_err();
    assert!(matches!(err, EngineError::Complex(ComplexError::InvalidCocycle { failing: 2, .. })));
    assert!(!err.is_numerical());
    let inv = invariance_test(t, c, p, 5, 1, 1e-8);
    assert!(!inv.pass);
    assert!(inv.error.is_some());
    let placement = place_vertices(t, c, p, PlacementPolicy::canonical()).unwrap();
    assert!(matches!(develop(t, c, &placement, 0), Err(DevelopError::Equivariance { .. })));
}

#[test]
fn punctured_torus_area() {
    let input = corpus("punctured_torus.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let r = compute_volume(t, c, p, &VolumeOptions::default()).unwrap();
    assert!((r.total.abs() - 2.0 * PI).abs() < 1e-12);
    let peripheral = verify_peripheral(t, c, p, 1e-9);
    assert!(peripheral.pass);
    let mw = milnor_wood_report(&r, 2, 2).unwrap();
    assert!((mw.ratio - 1.0).abs() < 1e-12);
}

#[test]
fn trivial_representation_has_zero_bound_ratio() {
    let input = corpus("figure8_trivial.json");
    let t = &input.triangulation;
    let r = compute_volume(t, &input.cocycle, &input.peripheral, &VolumeOptions::default()).unwrap();
    let mw = milnor_wood_report(&r, 3, t.simplices().len()).unwrap();
    assert_eq!(mw.ratio, 0.0);
    assert!(mw.pass);
}

#[test]
fn report_fields() {
    let input = corpus("figure8.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let opts = VolumeOptions {
        tol: 1e-6,
        ..VolumeOptions::default()
    };
    let r = compute_volume(t, c, p, &opts).unwrap();
    assert_eq!(r.schema_version, 1);
    assert_eq!(r.metadata.per_simplex_tol, 5e-7);
    assert_eq!(r.method_counts.closed_form, 2);
    assert_eq!(r.total, engine::compensated_sum(r.terms()));
    assert_eq!(r.metadata.input_digest.len(), 64);
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["per_simplex"].as_array().unwrap().len(), 2);
}

#[test]
fn quadrature_only_matches_closed_form() {
    let input = corpus("figure8.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let closed = compute_volume(t, c, p, &VolumeOptions::default()).unwrap();
    let quad = compute_volume(
        t,
        c,
        p,
        &VolumeOptions {
            method: MethodChoice::Quadrature,
            ..VolumeOptions::default()
        },
    )
    .unwrap();
    assert_eq!(quad.method_counts.quadrature, 2);
    assert!((closed.total - quad.total).abs() <= 1e-8);
}

#[test]
fn closed_form_refuses_finite_vertices() {
    let input = corpus("figure8.json");
    let (st, sc) = barycentric_subdivide(&input.triangulation, &input.cocycle);
    let opts = VolumeOptions {
        method: MethodChoice::Closed,
        placement: PlacementPolicy::random(3),
        ..VolumeOptions::default()
    };
    let err = compute_volume(&st, &sc, &input.peripheral, &opts).unwrap_err();
    assert!(matches!(
        err,
        EngineError::Volume {
            source: VolumeError::NoClosedForm,
            ..
        }
    ));
}

#[test]
fn subdivision_keeps_volume() {
    let input = corpus("figure8.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let r = subdivision_test(t, c, p, 1e-7).unwrap();
    assert_eq!(r.simplices_after, 48);
    assert!(r.pass);
    assert!(r.delta.abs() <= 5e-5);
}
