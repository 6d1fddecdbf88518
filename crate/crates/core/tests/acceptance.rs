//! Acceptance criteria, one line per criterion. Exits non-zero on any failure.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repvol_core::engine::compensated_sum;
use repvol_core::simplex::{max_simplex_volume, simplex_volume, simplex_volume_with};
use repvol_core::special::{bloch_wigner, lobachevsky};
use repvol_core::*;

use common::*;

const FIGURE_EIGHT: f64 = 2.0298832128193;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn special_functions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = rng.gen_range(1e-6..PI - 1e-6);
        worst = worst.max((lobachevsky(theta) - lobachevsky_integral(theta)).abs());
    }
    let omega = Complex64::from_polar(1.0, PI / 3.0);
    let gap = (bloch_wigner(omega) - 3.0 * lobachevsky(PI / 3.0)).abs();
    ensure(
        worst <= 1e-9 && gap <= 1e-8,
        format!("max |Л − ∫| = {worst:.2e}, |D(ω) − 3Л(π/3)| = {gap:.2e}"),
    )
}

fn simplex_properties() -> Outcome {
    let tol = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut alt, mut inv, mut bound_excess, mut cocycle) = (0.0f64, 0.0f64, f64::NEG_INFINITY, 0.0f64);
    for i in 0..200 {
        let dim = if i % 2 == 0 { Dimension::Three } else { Dimension::Two };
        let v = random_tuple(&mut rng, dim, dim.n() + 1);
        let base = simplex_volume(&GeodesicSimplex::new(v.clone()).unwrap(), tol).unwrap();

        let (a, b) = loop {
            let (a, b) = (rng.gen_range(0..=dim.n()), rng.gen_range(0..=dim.n()));
            if a != b {
                break (a, b);
            }
        };
        let mut swapped = v.clone();
        swapped.swap(a, b);
        let s = simplex_volume(&GeodesicSimplex::new(swapped).unwrap(), tol).unwrap();
        alt = alt.max((s.value + base.value).abs());

        let g = random_isometry(&mut rng, dim);
        let moved: Vec<_> = v.iter().map(|p| g.act(p).unwrap()).collect();
        let m = simplex_volume(&GeodesicSimplex::new(moved).unwrap(), tol).unwrap();
        inv = inv.max((m.value - base.value).abs());

        let vn = max_simplex_volume(dim.n()).unwrap();
        bound_excess = bound_excess.max(base.value.abs() - vn - base.est_error);
    }
    for i in 0..50 {
        let dim = if i % 2 == 0 { Dimension::Three } else { Dimension::Two };
        let v = random_tuple(&mut rng, dim, dim.n() + 2);
        let terms: Vec<f64> = (0..v.len())
            .map(|skip| {
                let face: Vec<_> = v.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, p)| *p).collect();
                let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
                sign * simplex_volume(&GeodesicSimplex::new(face).unwrap(), tol).unwrap().value
            })
            .collect();
        cocycle = cocycle.max(compensated_sum(terms).abs());
    }
    ensure(
        alt <= 2.0 * tol && inv <= 2.0 * tol && bound_excess <= 0.0 && cocycle <= 5.0 * tol,
        format!("alternation {alt:.2e}, invariance {inv:.2e}, bound excess {bound_excess:.2e}, cocycle {cocycle:.2e}"),
    )
}

fn cross_path() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut worst, mut oracle) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let v: Vec<_> = (0..4).map(|_| random_point(&mut rng, Dimension::Three, true)).collect();
        let s = GeodesicSimplex::new(v.clone()).unwrap();
        let closed = simplex_volume_with(&s, 1e-9, MethodChoice::Closed).unwrap();
        let quad = simplex_volume_with(&s, 1e-9, MethodChoice::Quadrature).unwrap();
        worst = worst.max((closed.value - quad.value).abs());
        let z = simplex::cross_ratio(&v[0], &v[1], &v[2], &v[3]).unwrap();
        oracle = oracle.max((closed.value.abs() - bloch_wigner_oracle(z).abs()).abs());
    }
    ensure(
        worst <= 1e-6 && oracle <= 1e-9,
        format!("closed vs quadrature {worst:.2e}, closed vs dihedral-angle oracle {oracle:.2e}"),
    )
}

fn figure_eight() -> Outcome {
    let input = corpus("figure8.json");
    let t = &input.triangulation;
    let r = compute_volume(t, &input.cocycle, &input.peripheral, &VolumeOptions::default()).map_err(|e| e.to_string())?;
    let mw = milnor_wood_report(&r, 3, t.simplices().len()).map_err(|e| e.to_string())?;
    let oracle = 2.0 * regular_ideal_volume();
    let gap = (r.total.abs() - FIGURE_EIGHT).abs();
    let oracle_gap = (r.total.abs() - oracle).abs();
    ensure(
        gap <= 1e-6 && oracle_gap <= 1e-6 && (mw.ratio - 1.0).abs() <= 1e-5 && mw.pass,
        format!("total {:.13}, |gap| {gap:.2e}, oracle gap {oracle_gap:.2e}, ratio {:.6}", r.total, mw.ratio),
    )
}

fn punctured_torus() -> Outcome {
    let input = corpus("punctured_torus.json");
    let r = compute_volume(&input.triangulation, &input.cocycle, &input.peripheral, &VolumeOptions::default())
        .map_err(|e| e.to_string())?;
    let gap = (r.total.abs() - 2.0 * PI).abs();
    ensure(gap <= 1e-9, format!("total {:.13}, |gap| {gap:.2e}", r.total))
}

fn choice_independence() -> Outcome {
    let tol = 1e-7;
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, sub_budget) in [("figure8.json", 5e-5), ("punctured_torus.json", 1e-12)] {
        let input = corpus(name);
        let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
        let (st, sc) = barycentric_subdivide(t, c);
        for (label, t, c) in [("", t, c), (" subdivided", &st, &sc)] {
            let inv = invariance_test(t, c, p, 20, 7, tol);
            ok &= inv.pass && inv.max_deviation <= 1e-6;
            lines.push(format!("{name}{label} deviation {:.1e}", inv.max_deviation));
        }
        let sub = subdivision_test(t, c, p, tol).map_err(|e| e.to_string())?;
        ok &= sub.pass && sub.delta.abs() <= sub_budget;
        lines.push(format!("{name} subdivision delta {:.1e}", sub.delta));
    }
    ensure(ok, lines.join(", "))
}

fn degenerate() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["figure8_trivial.json", "punctured_torus_trivial.json"] {
        let input = corpus(name);
        let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
        let (st, sc) = barycentric_subdivide(t, c);
        let before = compute_volume(t, c, p, &VolumeOptions::default()).map_err(|e| e.to_string())?;
        let after = compute_volume(&st, &sc, p, &VolumeOptions::default()).map_err(|e| e.to_string())?;
        ok &= before.total == 0.0 && after.total == 0.0;
        lines.push(format!("{name} {} / {}", before.total, after.total));
    }
    let input = corpus("figure8_upper.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let (st, sc) = barycentric_subdivide(t, c);
    let mut worst: f64 = 0.0;
    for seed in engine::derived_seeds(11, 10) {
        let opts = VolumeOptions {
            placement: PlacementPolicy::random(seed),
            ..VolumeOptions::default()
        };
        for (t, c) in [(t, c), (&st, &sc)] {
            let r = compute_volume(t, c, p, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(r.total.abs());
        }
    }
    ok &= worst <= 1e-6;
    lines.push(format!("upper-triangular max |total| {worst:.1e}"));
    ensure(ok, lines.join(", "))
}

fn validator() -> Outcome {
    let input = corpus("figure8.json");
    let (t, c, p) = (&input.triangulation, &input.cocycle, &input.peripheral);
    let (mut weakest_residual, mut weakest_witness) = (f64::INFINITY, f64::INFINITY);
    let mut cases = 0;
    for gluing in 0..t.gluings().len() {
        for entry in 0..4 {
            for delta in [Complex64::new(1e-3, 0.0), Complex64::new(0.0, 1e-3)] {
                let mut forward = c.forward().to_vec();
                let mut m = forward[gluing].matrix();
                m[entry / 2][entry % 2] += delta;
                forward[gluing] = Isometry::from_matrix(Dimension::Three, m).unwrap();
                let perturbed = TransitionCocycle::new(t, forward).unwrap();
                let report = validate_cocycle(t, &perturbed, 1e-9);
                weakest_residual = weakest_residual.min(if report.pass { 0.0 } else { report.max_residual });
                let placement = place_vertices(t, &perturbed, p, PlacementPolicy::canonical()).unwrap();
                let witness = match develop(t, &perturbed, &placement, 0) {
                    Err(DevelopError::Equivariance { residual, .. }) => residual,
                    _ => 0.0,
                };
                weakest_witness = weakest_witness.min(witness);
                cases += 1;
            }
        }
    }
    ensure(
        weakest_residual >= 1e-4 && weakest_witness > developing::WITNESS_FAIL,
        format!("{cases} perturbations, smallest residual {weakest_residual:.2e}, smallest witness {weakest_witness:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("special functions", special_functions),
        ("simplex volume properties", simplex_properties),
        ("closed form vs quadrature", cross_path),
        ("figure-eight knot complement", figure_eight),
        ("punctured torus", punctured_torus),
        ("choice independence", choice_independence),
        ("degenerate representations", degenerate),
        ("cocycle validator", validator),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed().as_secs_f64();
        let (verdict, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {verdict} {name}: {detail} ({elapsed:.2}s)", i + 1);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
