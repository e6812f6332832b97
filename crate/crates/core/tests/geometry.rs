//! Curvature and integral checks on spheroids against closed forms.

use std::f64::consts::PI;

use mcflab::geometry::{gauss_integrals, pinching_constant, trace_free_norm};
use mcflab::{compute_curvatures, Profile};

/// Principal curvatures of the spheroid `r = a sin(phi)`, `z = c cos(phi)`
/// at the point `(z, r)`.
fn spheroid_curvatures(a: f64, c: f64, z: f64, r: f64) -> (f64, f64) {
    let (s, co) = (r / a, z / c);
    let w = (a * a * co * co + c * c * s * s).sqrt();
    (a * c / w.powi(3), c / (a * w))
}

fn max_curvature_error(nodes: usize) -> f64 {
    let (a, c) = (1.0, 1.5);
    let p = Profile::ellipsoid(2, a, c, nodes).unwrap();
    let cf = compute_curvatures(&p).unwrap();
    cf.nodes
        .iter()
        .map(|k| {
            let (ax, rot) = spheroid_curvatures(a, c, k.axis, k.radius);
            (k.kappa_axial - ax).abs().max((k.kappa_rot - rot).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn curvature_error_is_second_order() {
    let e1 = max_curvature_error(201);
    let e2 = max_curvature_error(401);
    assert!(e1 < 1e-3);
    let factor = e1 / e2;
    assert!((3.5..=4.5).contains(&factor), "factor {factor}");
}

/// `int H^2 dmu` over the spheroid by a fine midpoint rule in `phi`.
fn spheroid_total_h2(a: f64, c: f64) -> f64 {
    let m = 200_000;
    let dphi = PI / m as f64;
    (0..m)
        .map(|k| {
            let phi = (k as f64 + 0.5) * dphi;
            let (s, co) = phi.sin_cos();
            let w = (a * a * co * co + c * c * s * s).sqrt();
            let h = a * c / w.powi(3) + c / (a * w);
            2.0 * PI * a * s * w * h * h * dphi
        })
        .sum()
}

#[test]
fn ellipsoid_integrals_match_quadrature() {
    let p = Profile::ellipsoid(2, 1.0, 1.5, 401).unwrap();
    let g = gauss_integrals(&p).unwrap();
    assert!((g.int_k - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
    let oracle = spheroid_total_h2(1.0, 1.5);
    assert!((g.int_hn - oracle).abs() < 1e-3 * oracle, "{} vs {oracle}", g.int_hn);
}

#[test]
fn sphere_h_squared_converges_to_sixteen_pi() {
    let err = |nodes| (gauss_integrals(&Profile::sphere(2, 1.0, nodes).unwrap()).unwrap().int_hn - 16.0 * PI).abs();
    let (e1, e2) = (err(101), err(201));
    assert!(e1 < 1e-3 * 16.0 * PI);
    assert!(e1 / e2 > 3.5, "{e1} {e2}");
}

#[test]
fn total_gauss_curvature_in_three_dimensions() {
    // |S^3| = 2 pi^2
    let g = gauss_integrals(&Profile::ellipsoid(3, 1.2, 0.8, 401).unwrap()).unwrap();
    assert!((g.int_k - 2.0 * PI * PI).abs() < 1e-3 * 2.0 * PI * PI);
}

#[test]
fn ellipsoid_pinching_matches_fine_oracle() {
    let (a, c) = (1.0, 1.5);
    let p = Profile::ellipsoid(2, a, c, 401).unwrap();
    let got = pinching_constant(&compute_curvatures(&p).unwrap()).unwrap();
    let oracle = (0..=4000)
        .map(|k| {
            let phi = PI * k as f64 / 4000.0;
            let (ax, rot) = spheroid_curvatures(a, c, c * phi.cos(), a * phi.sin());
            ax.min(rot) / (ax + rot)
        })
        .fold(f64::INFINITY, f64::min);
    assert!((got.mean_normalized - oracle).abs() < 1e-5, "{} vs {oracle}", got.mean_normalized);
}

#[test]
fn capsule_pinching_is_zero_and_sphere_is_half() {
    let cyl = compute_curvatures(&Profile::capsule(2, 1.0, 1.0, 401).unwrap()).unwrap();
    assert!(pinching_constant(&cyl).unwrap().mean_normalized.abs() < 1e-3);
    let s = compute_curvatures(&Profile::sphere(2, 2.0, 101).unwrap()).unwrap();
    let pin = pinching_constant(&s).unwrap();
    assert!((pin.mean_normalized - 0.5).abs() < 1e-12);
    for node in &s.nodes {
        assert!((node.kappa_min - 0.5).abs() < 1e-12 && (node.mean - 1.0).abs() < 1e-12);
    }
    assert!(trace_free_norm(&s).iter().all(|x| x.abs() < 1e-6));
}

#[test]
fn ratio_is_at_most_one_over_n() {
    for n in 2..5 {
        let cf = compute_curvatures(&Profile::ellipsoid(n, 1.0, 2.0, 201).unwrap()).unwrap();
        for node in &cf.nodes {
            assert!(node.ratio <= 1.0 / n as f64 + 1e-12);
        }
    }
}
