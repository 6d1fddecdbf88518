use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use repvol_bench::corpus;
use repvol_core::simplex::{simplex_volume_with, GeodesicSimplex, MethodChoice};
use repvol_core::special::{bloch_wigner, lobachevsky};
use repvol_core::{barycentric_subdivide, compute_volume, Dimension, ExtendedPoint, PlacementPolicy, VolumeOptions};

fn special(c: &mut Criterion) {
    c.bench_function("lobachevsky", |b| b.iter(|| lobachevsky(black_box(1.1))));
    let z = Complex64::new(0.3, 0.8);
    c.bench_function("bloch_wigner", |b| b.iter(|| bloch_wigner(black_box(z))));
}

fn tetrahedra(c: &mut Criterion) {
    let ideal = |re, im| ExtendedPoint::ideal(Dimension::Three, Complex64::new(re, im)).unwrap();
    let s = GeodesicSimplex::new(vec![
        ExtendedPoint::infinity(Dimension::Three),
        ideal(0.0, 0.0),
        ideal(1.0, 0.0),
        ideal(0.5, 0.866_025_403_784_438_6),
    ])
    .unwrap();
    c.bench_function("ideal tetrahedron closed form", |b| {
        b.iter(|| simplex_volume_with(black_box(&s), 1e-10, MethodChoice::Closed))
    });
    c.bench_function("ideal tetrahedron quadrature", |b| {
        b.iter(|| simplex_volume_with(black_box(&s), 1e-10, MethodChoice::Quadrature))
    });
    let p = ExtendedPoint::interior(Dimension::Three, Complex64::new(0.1, 0.2), 0.7).unwrap();
    let q = ExtendedPoint::interior(Dimension::Three, Complex64::new(-0.3, 0.1), 1.4).unwrap();
    let mixed = GeodesicSimplex::new(vec![p, ideal(1.0, 0.0), q, ideal(0.0, 1.0)]).unwrap();
    c.bench_function("mixed tetrahedron quadrature", |b| {
        b.iter(|| simplex_volume_with(black_box(&mixed), 1e-10, MethodChoice::Auto))
    });
}

fn figure_eight(c: &mut Criterion) {
    let input = corpus("figure8.json");
    let (t, cc, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    c.bench_function("figure-eight volume", |b| {
        b.iter(|| compute_volume(t, cc, p, &VolumeOptions::default()).unwrap())
    });
    let (st, sc) = barycentric_subdivide(t, cc);
    let opts = VolumeOptions {
        placement: PlacementPolicy::random(7),
        ..VolumeOptions::default()
    };
    c.bench_function("subdivided figure-eight volume", |b| {
        b.iter(|| compute_volume(&st, &sc, p, &opts).unwrap())
    });
}

criterion_group!(benches, special, tetrahedra, figure_eight);
criterion_main!(benches);
