mod common;

use common::{ccw, random_bipyramid, random_octahedron};
use hyptri::hypgeom::{cross_ratio, IdealPoint};
use hyptri::triangulation::*;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Point at a slot of a cell; vertex labels index `pts`.
fn at(t: &IdealTriangulation, pts: &[IdealPoint], cell: usize, slot: usize) -> IdealPoint {
    pts[t.cells[cell].vertices[slot] as usize]
}

fn inside(p: C64, x: [C64; 3]) -> Option<bool> {
    let s = [ccw(x[0], x[1], p), ccw(x[1], x[2], p), ccw(x[2], x[0], p)];
    if s.iter().any(|v| v.abs() < 1e-6) {
        return None;
    }
    Some(s.iter().all(|&v| v > 0.0))
}

fn all_geometric(t: &IdealTriangulation) -> bool {
    t.shapes().unwrap().iter().all(|s| s.z.im > 0.0)
}

#[test]
fn two_three_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut moved, mut refused) = (0, 0);
    while moved < 200 {
        let Some((t, site, _)) = random_bipyramid(&mut rng) else { continue };
        let v0 = t.volume().unwrap();
        let e0 = t.euler_characteristic();
        match pachner_23(&t, site, &common::move_opts()) {
            Ok(t3) => {
                moved += 1;
                t3.validate().unwrap();
                assert_eq!(t3.len(), 3);
                assert!(all_geometric(&t3));
                assert!((t3.volume().unwrap() - v0).abs() < 1e-9);
                assert_eq!(t3.euler_characteristic(), e0);
                let axis = t3.edge_classes().into_iter().find(|c| !c.boundary).unwrap();
                assert_eq!(axis.valence(), 3);
                let (c, e) = axis.members[0];
                let back = pachner_32(&t3, PachnerSite::Edge { cell: c, edge: EDGES[e] }, &common::move_opts()).unwrap();
                assert!(find_isomorphism(&back, &t).is_some());
                assert!(find_geometric_isomorphism(&back, &t, 1e-9).is_some());
            }
            Err(TriangulationError::NotConvex) => refused += 1,
            Err(e) => panic!("{e}"),
        }
    }
    assert!(refused > 0);
}

/// The 2–3 move is geometric exactly when the lower apex projects into the triangle.
#[test]
fn two_three_convexity_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut checked = 0;
    while checked < 300 {
        let Some((t, site, pts)) = random_bipyramid(&mut rng) else { continue };
        let z: Vec<C64> = pts[1..].iter().map(|p| p.as_finite().unwrap()).collect();
        let Some(expect) = inside(z[3], [z[0], z[1], z[2]]) else { continue };
        checked += 1;
        assert_eq!(pachner_23(&t, site, &common::move_opts()).is_ok(), expect);
    }
}

#[test]
fn four_four_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let (mut moved, mut refused) = (0, 0);
    while moved < 200 {
        let Some((t, pts)) = random_octahedron(&mut rng) else { continue };
        let v0 = t.volume().unwrap();
        let star = edge_star(&t, 0, (0, 1)).unwrap();
        assert_eq!(star.len(), 4);
        let y: Vec<IdealPoint> = star.iter().map(|s| at(&t, &pts, s.cell, s.y)).collect();
        let (top, bottom) = (at(&t, &pts, 0, 0), at(&t, &pts, 0, 1));
        for diagonal in 0..2 {
            // the new cells around the diagonal y_d y_{d+2}, in link order
            let (a, b) = (y[diagonal], y[diagonal + 2]);
            let link = [top, y[diagonal + 1], bottom, y[(diagonal + 3) % 4]];
            let signs: Vec<f64> = (0..4).map(|k| cross_ratio(a, b, link[k], link[(k + 1) % 4]).unwrap().z.im).collect();
            if signs.iter().any(|s| s.abs() < 1e-6) {
                continue;
            }
            let expect = signs.iter().all(|&s| s > 0.0) || signs.iter().all(|&s| s < 0.0);
            match pachner_44(&t, PachnerSite::Octahedron { cell: 0, edge: (0, 1), diagonal }, &common::move_opts()) {
                Ok(t4) => {
                    assert!(expect);
                    moved += 1;
                    t4.validate().unwrap();
                    assert_eq!(t4.len(), 4);
                    assert!(all_geometric(&t4));
                    assert!((t4.volume().unwrap() - v0).abs() < 1e-9);
                    assert_eq!(t4.euler_characteristic(), t.euler_characteristic());
                }
                Err(TriangulationError::NonGeometricResult) => {
                    assert!(!expect);
                    refused += 1;
                }
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(refused > 0);
}

#[test]
fn text_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut done = 0;
    while done < 50 {
        let Some((t, site, _)) = random_bipyramid(&mut rng) else { continue };
        let Ok(mut t3) = pachner_23(&t, site, &common::move_opts()) else { continue };
        t3.cusp_labels.insert(0, "cusp".into());
        for u in [&t, &t3] {
            let back = from_text(&to_text(u)).unwrap();
            assert_eq!(&back, u);
            assert_eq!(to_text(&back), to_text(u));
        }
        let mut bare = t3.clone();
        bare.strip_shapes();
        assert_eq!(from_text(&to_text(&bare)).unwrap(), bare);
        done += 1;
    }
}

#[test]
fn malformed_files() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let t = loop {
        if let Some((t, _, _)) = random_bipyramid(&mut rng) {
            break t;
        }
    };
    let text = to_text(&t);
    let lines: Vec<&str> = text.lines().collect();
    for cut in 1..lines.len() {
        let truncated = lines[..cut].join("\n");
        assert!(from_text(&truncated).is_err(), "cut at {cut}");
    }
    let bad = text.replacen("vertices", "vertices x", 1);
    let e = from_text(&bad).unwrap_err();
    assert_eq!(e.line, 3);
}
