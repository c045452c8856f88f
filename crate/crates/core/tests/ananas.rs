use std::f64::consts::PI;

use hyptri::ananas::*;
use hyptri::farey::{path_to_slope_limit, replaced_slopes, FareyTriangle, Slope, Turn};
use hyptri::hypgeom::{cross_ratio, IdealPoint};
use hyptri::triangulation::*;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_omega(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let w = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.5));
        if w.re.abs() > 0.02 {
            return w;
        }
    }
}

fn random_word(rng: &mut ChaCha8Rng, n: usize) -> Vec<Turn> {
    (0..n).map(|_| if rng.gen_bool(0.5) { Turn::L } else { Turn::R }).collect()
}

fn start(w: C64) -> DrilledAnanasState {
    DrilledAnanasState::delaunay(CuspLattice::new(w).unwrap(), None).unwrap()
}

#[test]
fn hexagonal_delta_matches_cross_ratio() {
    let lat = CuspLattice::new(C64::from_polar(1.0, PI / 3.0)).unwrap();
    let w = lat.omega();
    let st = DrilledAnanasState::build(lat, FareyTriangle::base()).unwrap();
    let (delta, _) = st.peel(&Slope::from_i64(1, 1).unwrap()).unwrap();
    let z = cross_ratio(IdealPoint::finite(0.0, 0.0), IdealPoint::finite(1.0, 0.0), IdealPoint::Finite(1.0 + w), IdealPoint::Finite(w)).unwrap().z;
    let z = if z.im > 0.0 { z } else { 1.0 / z };
    assert!(z.im > 0.0);
    assert!((delta.z - z).norm() < 1e-12);
}

#[test]
fn deep_walks_stay_geometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let w = random_omega(&mut rng);
        let word = random_word(&mut rng, 100);
        let mut count = 0;
        for (i, node) in tree_walk(&start(w), &word).enumerate() {
            let node = node.unwrap();
            assert_eq!(node.triangulation.len(), i + 2);
            assert!(node.report.passed);
            let a = node.state.boundary_angles();
            assert!((a.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-10);
            let big: Vec<usize> = (0..3).filter(|&k| a[k] >= PI).collect();
            assert!(big.len() <= 1);
            if let Some(&k) = big.first() {
                assert_eq!(Some(&node.state.triangle().0[k]), node.state.forbidden());
            }
            let [c1, c2] = node.state.core_shapes();
            assert!((c1.z - c2.z).norm() < 1e-10);
            count += 1;
        }
        assert_eq!(count, 101);
    }
}

#[test]
fn cusp_cellulation_follows_farey_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_omega(&mut rng);
    let word = random_word(&mut rng, 30);
    let st = start(w);
    let path = path_to_slope_limit(st.triangle(), &word);
    for (node, tri) in tree_walk(&st, &word).zip(path.iter()) {
        assert_eq!(node.unwrap().state.triangle(), tri);
    }
}

#[test]
fn peel_is_a_two_three_move() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let w = random_omega(&mut rng);
        let word = random_word(&mut rng, 8);
        let mut st = start(w);
        for turn in word {
            let k = if turn == Turn::L { 1 } else { 0 };
            let (cell, face) = st.core_face_over(k);
            let before = st.triangulation().unwrap();
            let moved = pachner_23(&before, PachnerSite::Face { cell, face }, &MoveOptions::default()).unwrap();
            st = st.step(turn).unwrap().1;
            let after = st.triangulation().unwrap();
            assert!(find_geometric_isomorphism(&moved, &after, 1e-9).is_some());
        }
    }
}

#[test]
fn volume_telescopes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = random_omega(&mut rng);
    let st = start(w);
    let v0 = st.core_volume();
    let mut cur = st;
    for turn in random_word(&mut rng, 50) {
        cur = cur.step(turn).unwrap().1;
        assert!((v0 - cur.peeled_volume() - cur.core_volume()).abs() < 1e-8);
    }
    assert!((cur.triangulation().unwrap().volume().unwrap() - v0).abs() < 1e-8);
}

#[test]
fn replaced_denominators_grow() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let word = random_word(&mut rng, 40);
        let slopes = replaced_slopes(&path_to_slope_limit(&FareyTriangle::base(), &word));
        for pair in slopes.windows(2) {
            assert!(pair[1].q() >= pair[0].q());
            let size = |s: &Slope| s.p().magnitude() + s.q().magnitude();
            assert!(size(&pair[1]) > size(&pair[0]));
        }
    }
}

#[test]
fn index_two_cover() {
    let st = start(C64::new(0.2, 1.1));
    let sub = Sublattice::from_basis((2, 0), (0, 1)).unwrap();
    let cover = st.lift_to_cover(&sub).unwrap();
    assert_eq!(cover.triangulation.len(), 4);
    cover.triangulation.validate().unwrap();
    assert!(cover.triangulation.verify_geometric(&VerifyOptions::default()).unwrap().passed);
    let id = st.lift_to_cover(&Sublattice::full()).unwrap();
    assert!(find_geometric_isomorphism(&id.triangulation, &st.triangulation().unwrap(), 1e-12).is_some());
}

#[test]
fn deck_translations_are_automorphisms() {
    let st = start(C64::new(-0.3, 1.2)).step(Turn::L).unwrap().1.step(Turn::R).unwrap().1;
    for n in 1..=4i64 {
        for a in 1..=n {
            if n % a != 0 {
                continue;
            }
            let c = n / a;
            for b in 0..a {
                let sub = Sublattice::from_basis((a, 0), (b, c)).unwrap();
                let cover = st.lift_to_cover(&sub).unwrap();
                assert_eq!(cover.triangulation.len(), n as usize * 4);
                cover.triangulation.validate().unwrap();
                assert!(cover.triangulation.verify_geometric(&VerifyOptions::default()).unwrap().passed);
                for j in 0..n as usize {
                    assert!(cover.is_automorphism(j));
                }
            }
        }
    }
}

#[test]
fn rectangular_choices() {
    let lat = CuspLattice::new(C64::new(0.0, 1.0)).unwrap();
    let plus = Slope::from_i64(1, 1).unwrap();
    let minus = Slope::from_i64(-1, 1).unwrap();
    for d in [&plus, &minus] {
        let st = DrilledAnanasState::delaunay(lat, Some(d)).unwrap();
        let a = st.boundary_angles();
        assert!((a[2] - PI).abs() < 1e-9);
        assert!(matches!(st.peel(d), Err(AnanasError::AngleAtLeastPi { .. })));
        let word: Vec<Turn> = (0..50).map(|i| if i % 3 == 0 { Turn::L } else { Turn::R }).collect();
        for node in tree_walk(&st, &word) {
            assert!(node.unwrap().report.passed);
        }
    }
}

fn diagonal_site(t: &IdealTriangulation) -> PachnerSite {
    let class = t.edge_classes().into_iter().find(|c| !c.boundary && c.valence() == 4).unwrap();
    let (cell, e) = class.members[0];
    let edge = EDGES[e];
    let star = edge_star(t, cell, edge).unwrap();
    let mirror_or_cusp = |v: u32| v != 1;
    let corner_first = !mirror_or_cusp(t.cells[star[0].cell].vertices[star[0].y]);
    PachnerSite::Octahedron { cell, edge, diagonal: if corner_first { 0 } else { 1 } }
}

#[test]
fn rectangular_four_four() {
    let lat = CuspLattice::new(C64::new(0.0, 1.3)).unwrap();
    let plus = doubled_rectangular(&lat, &Slope::from_i64(1, 1).unwrap()).unwrap();
    let minus = doubled_rectangular(&lat, &Slope::from_i64(-1, 1).unwrap()).unwrap();
    for t in [&plus, &minus] {
        t.validate().unwrap();
        assert!(t.verify_geometric(&VerifyOptions::default()).unwrap().passed);
    }
    let moved = pachner_44(&plus, diagonal_site(&plus), &MoveOptions::default()).unwrap();
    assert!(find_geometric_isomorphism(&moved, &minus, 1e-9).is_some());
    assert!((moved.volume().unwrap() - plus.volume().unwrap()).abs() < 1e-9);
}
