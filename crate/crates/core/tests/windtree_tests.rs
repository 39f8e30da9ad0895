mod common;

use common::*;
use windtree_core::cover::CoverError;
use windtree_core::exactgeom::{q, qi, RatAngle, RatVec2};
use windtree_core::homology;
use windtree_core::windtree::{build_model, certify, classical_model, embed_l, unfold_model, Obstacle, WindTreeError};

fn unit_square() -> Vec<RatVec2> {
    vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]
}

fn z2() -> [RatVec2; 2] {
    [p(1, 0), p(0, 1)]
}

#[test]
fn battery_unfolds_consistently() {
    for (name, m) in all_models() {
        let um = unfold_model(&m).unwrap();
        let s = &um.x.surface;
        assert_eq!(um.x.copies(), 2 * m.n() as usize, "{name}");
        assert_eq!(s.genus() as i64, s.genus_from_euler(), "{name}");
        assert_eq!(um.basis.rank(), 2 * s.genus() as usize + s.orbits().len() - 1, "{name}");
        for g in &um.gamma {
            let h = homology::holonomy_f64(s, &um.basis, g);
            assert!(h[0].abs() < 1e-9 && h[1].abs() < 1e-9, "{name}: {h:?}");
        }
        let cert = certify(&m).unwrap();
        assert_eq!(cert.valid(), m.embedding.is_some(), "{name}\n{}", cert.to_text());
        assert_eq!(cert.copies, um.x.copies());
    }
}

#[test]
fn l_pair_certifies_every_even_model() {
    for (name, m) in all_models() {
        if m.n() % 2 == 1 || m.embedding.is_some() {
            continue;
        }
        let e = embed_l(&m, None, None, None).unwrap();
        assert_eq!(e.n(), m.n(), "{name}");
        assert!(certify(&e).unwrap().valid(), "{name}");
    }
}

#[test]
fn classical_rectangles() {
    for (a, b) in [(q(1, 2), q(1, 2)), (q(1, 3), q(3, 5)), (q(9, 10), q(1, 10))] {
        let m = classical_model(a, b).unwrap();
        assert_eq!(m.n(), 2);
        let um = unfold_model(&m).unwrap();
        assert_eq!(um.x.copies(), 4);
    }
}

#[test]
fn overlapping_obstacles() {
    let r = build_model(
        z2(),
        unit_square(),
        vec![(0, 2), (3, 1)],
        vec![Obstacle::rectangle(q(1, 4), q(1, 4), q(1, 2), q(1, 2)), Obstacle::rectangle(q(3, 8), q(3, 8), q(3, 4), q(3, 4))],
    );
    assert_eq!(r.unwrap_err(), WindTreeError::ObstacleOverlap(0, 1));
}

#[test]
fn clockwise_obstacle() {
    let mut o = Obstacle::rectangle(q(1, 4), q(1, 4), q(1, 2), q(1, 2));
    o.vertices.reverse();
    let r = build_model(z2(), unit_square(), vec![(0, 2), (3, 1)], vec![o]);
    assert_eq!(r.unwrap_err(), WindTreeError::BadObstacle(0));
}

#[test]
fn inconsistent_angles_are_irrational() {
    let o = Obstacle::new(
        vec![RatVec2::new(q(1, 4), q(1, 4)), RatVec2::new(q(3, 4), q(1, 4)), RatVec2::new(q(1, 2), q(3, 4))],
        vec![RatAngle::new(0, 1), RatAngle::new(2, 3), RatAngle::new(4, 3)],
    );
    let r = build_model(z2(), unit_square(), vec![(0, 2), (3, 1)], vec![o]);
    assert!(matches!(r.unwrap_err(), WindTreeError::Irrational(_)));
}

#[test]
fn domain_of_wrong_area() {
    let r = build_model([p(2, 0), p(0, 1)], unit_square(), vec![(0, 2), (3, 1)], vec![]);
    assert!(matches!(r.unwrap_err(), WindTreeError::NotFundamentalDomain(_)));
}

#[test]
fn non_integral_side_pairing() {
    let lattice = [p(2, 0), RatVec2::new(qi(0), q(1, 2))];
    let r = build_model(lattice, unit_square(), vec![(0, 2), (3, 1)], vec![]);
    assert!(matches!(r.unwrap_err(), WindTreeError::Lattice(CoverError::NonIntegralDecomposition { .. })));
    let r = build_model([p(1, 0), p(2, 0)], unit_square(), vec![(0, 2), (3, 1)], vec![]);
    assert_eq!(r.unwrap_err(), WindTreeError::Lattice(CoverError::DegenerateLattice));
}

#[test]
fn l_pair_errors() {
    let m = classical_model(q(1, 2), q(1, 2)).unwrap();
    let r = embed_l(&m, Some(RatAngle::new(1, 5)), None, None);
    assert_eq!(r.unwrap_err(), WindTreeError::BreaksRationality { expected: 2, got: 10 });
    assert!(matches!(embed_l(&m, None, Some(qi(5)), None).unwrap_err(), WindTreeError::NoValidPlacement(_)));
    // anchor inside the obstacle
    let inside = Some(RatVec2::new(q(1, 2), q(1, 2)));
    let WindTreeError::NoValidPlacement(why) = embed_l(&m, None, Some(q(1, 16)), inside).unwrap_err() else { panic!() };
    assert!(!why.is_empty());
    let corner = Some(RatVec2::new(q(1, 8), q(1, 8)));
    let e = embed_l(&m, None, Some(q(1, 16)), corner.clone()).unwrap();
    assert_eq!(Some(e.embedding.unwrap().s1), corner);
}

#[test]
fn l_pair_makes_odd_constant_even() {
    let odd = load("n_odd_no_L.toml");
    assert_eq!(odd.n(), 3);
    let e = embed_l(&odd, None, None, None).unwrap();
    assert_eq!(e.n(), 6);
    let emb = e.embedding.as_ref().unwrap();
    assert_eq!(emb.rotation, RatAngle::new(1, 3));
}

#[test]
fn odd_model_certificate_fails() {
    let cert = certify(&load("n_odd_no_L.toml")).unwrap();
    assert!(!cert.valid());
    assert!(!cert.conditions[0].passed);
    let text = cert.to_text();
    assert_eq!(text, certify(&load("n_odd_no_L.toml")).unwrap().to_text());
}
