mod common;

use std::f64::consts::PI;

use hyptri::hypgeom::*;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let m = Mobius::new(common::random_point(rng, 2.0), common::random_point(rng, 2.0), common::random_point(rng, 2.0), common::random_point(rng, 2.0));
        if m.det().norm() > 0.1 {
            return m.normalized().unwrap();
        }
    }
}

#[test]
fn angle_sum_is_pi() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let s = common::random_geometric_shape(&mut rng);
        let a = dihedral_angles(s).unwrap();
        assert!((a.sum() - PI).abs() < 1e-12, "{:?}", s);
        assert!(a.min() > 0.0);
    }
}

#[test]
fn lobachevsky_against_series() {
    for k in 1..60 {
        let t = k as f64 * PI / 61.0;
        let v = lobachevsky(t);
        assert!((v - common::lobachevsky_fourier(t)).abs() < 1e-8, "fourier at {t}");
        if t < 2.5 {
            assert!((v - common::lobachevsky_bernoulli(t)).abs() < 1e-12, "bernoulli at {t}");
        }
    }
    // maximum at π/6
    let peak = lobachevsky(PI / 6.0);
    assert!(peak > lobachevsky(PI / 6.0 - 1e-3) && peak > lobachevsky(PI / 6.0 + 1e-3));
}

#[test]
fn regular_tetrahedron_volume() {
    let regular = tet_volume(ShapeParameter::new(C64::from_polar(1.0, PI / 3.0))).unwrap();
    assert!((regular - 3.0 * common::lobachevsky_bernoulli(PI / 3.0)).abs() < 1e-13);
    // maximal among random shapes
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let s = common::random_geometric_shape(&mut rng);
        assert!(tet_volume(s).unwrap() <= regular + 1e-13);
    }
}

#[test]
fn cross_ratio_is_mobius_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let m = random_mobius(&mut rng);
        let pts: Vec<IdealPoint> = (0..4).map(|_| IdealPoint::Finite(common::random_point(&mut rng, 3.0))).collect();
        let Ok(z) = cross_ratio(pts[0], pts[1], pts[2], pts[3]) else { continue };
        let img: Vec<IdealPoint> = pts.iter().map(|&p| apply_mobius(&m, p).unwrap()).collect();
        let w = cross_ratio(img[0], img[1], img[2], img[3]).unwrap();
        assert!((z.z - w.z).norm() < 1e-8 * (1.0 + z.z.norm()));
    }
}

#[test]
fn cross_ratio_under_vertex_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let p: Vec<IdealPoint> = (0..4).map(|_| IdealPoint::Finite(common::random_point(&mut rng, 3.0))).collect();
        let z = cross_ratio(p[0], p[1], p[2], p[3]).unwrap();
        let scale = 1.0 + z.z.norm() + z.second().norm() + z.third().norm();
        // double transpositions fix the shape
        for q in [[1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]] {
            let w = cross_ratio(p[q[0]], p[q[1]], p[q[2]], p[q[3]]).unwrap();
            assert!((w.z - z.z).norm() < 1e-9 * scale);
        }
        // the 3-cycle on slots 1, 2, 3 moves to the next edge parameter
        let w = cross_ratio(p[0], p[2], p[3], p[1]).unwrap();
        assert!((w.z - z.second()).norm() < 1e-9 * scale);
        // swapping slots 2 and 3 inverts the shape
        let w = cross_ratio(p[0], p[1], p[3], p[2]).unwrap();
        assert!((w.z - 1.0 / z.z).norm() < 1e-9 * scale);
    }
}

#[test]
fn orthogeodesics_are_mobius_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 200 {
        let m = random_mobius(&mut rng);
        let b1 = Horoball::new(IdealPoint::Finite(common::random_point(&mut rng, 3.0)), rng.gen_range(0.1..1.0)).unwrap();
        let b2 = Horoball::new(IdealPoint::Finite(common::random_point(&mut rng, 3.0)), rng.gen_range(0.1..1.0)).unwrap();
        let Ok(d) = orthogeodesic_length(&b1, &b2) else { continue };
        let (Ok(c1), Ok(c2)) = (apply_mobius_horoball(&m, &b1), apply_mobius_horoball(&m, &b2)) else { continue };
        let e = orthogeodesic_length(&c1, &c2).unwrap();
        assert!((d - e).abs() < 1e-8 * (1.0 + d), "{d} vs {e}");
        checked += 1;
    }
}

#[test]
fn fourth_vertex_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let p: Vec<IdealPoint> = (0..4).map(|_| IdealPoint::Finite(common::random_point(&mut rng, 2.0))).collect();
        let z = cross_ratio(p[0], p[1], p[2], p[3]).unwrap();
        for miss in 0..4 {
            let known: Vec<(usize, IdealPoint)> = (0..4).filter(|&i| i != miss).map(|i| (i, p[i])).collect();
            let q = place_fourth(z.z, [known[0], known[1], known[2]]).unwrap();
            assert!((q.as_finite().unwrap() - p[miss].as_finite().unwrap()).norm() < 1e-7);
        }
    }
}
