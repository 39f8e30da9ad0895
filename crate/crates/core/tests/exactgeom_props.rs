use proptest::prelude::*;
use windtree_core::exactgeom::{self as eg, dihedral_group, DihedralElement, RatAngle, RatVec2};

fn element(n: u32) -> impl Strategy<Value = DihedralElement> {
    (0..2 * n as usize).prop_map(move |i| DihedralElement::from_ordinal(n, i))
}

fn group_and_pair() -> impl Strategy<Value = (u32, DihedralElement, DihedralElement, i64, i64, i64, i64)> {
    (1u32..=12).prop_flat_map(|n| (Just(n), element(n), element(n), -20i64..20, -20i64..20, 0i64..8, 1i64..8))
}

proptest! {
    #[test]
    fn action_is_a_homomorphism((n, g, h, x, y, an, ad) in group_and_pair()) {
        let axis = RatAngle::new(an, ad);
        let v = [x as f64, y as f64];
        let lhs = g.compose(&h).apply_f64_axis(axis, v);
        let rhs = g.apply_f64_axis(axis, h.apply_f64_axis(axis, v));
        prop_assert!(eg::norm(eg::sub(lhs, rhs)) < 1e-10 * (1.0 + eg::norm(v)));
        let w = RatVec2::from_ints(x, y);
        if let (Some(a), Some(b)) = (g.compose(&h).apply_exact_axis(axis, &w), h.apply_exact_axis(axis, &w)) {
            if let Some(c) = g.apply_exact_axis(axis, &b) {
                prop_assert_eq!(a, c);
            }
        }
        prop_assert_eq!(g.compose(&g.inverse()), DihedralElement::identity(n));
    }

    #[test]
    fn determinant_sign((_n, g, _h, x, y, an, ad) in group_and_pair()) {
        let axis = RatAngle::new(an, ad);
        let u = [x as f64 + 0.5, y as f64];
        let v = [-(y as f64), x as f64 + 0.25];
        let before = eg::cross(u, v);
        let after = eg::cross(g.apply_f64_axis(axis, u), g.apply_f64_axis(axis, v));
        prop_assert!((after - g.det_sign() as f64 * before).abs() < 1e-9 * (1.0 + before.abs()));
    }

    #[test]
    fn iota_negates(half in 1u32..=6, x in -50i64..50, y in -50i64..50, an in 0i64..8, ad in 1i64..8) {
        let grp = dihedral_group(2 * half);
        let iota = grp.iota().unwrap();
        let w = RatVec2::from_ints(x, y);
        let axis = RatAngle::new(an, ad);
        let neg = RatVec2::from_ints(-x, -y);
        if let Some(img) = iota.apply_exact_axis(axis, &w) {
            prop_assert_eq!(img, neg.clone());
        }
        let m = 4 * 2 * half * ad as u32;
        prop_assert!(iota.apply_cyclo(axis, &w, m).exact_eq(&eg::Cyclo::from_complex(m, &neg.x, &neg.y)));
    }

    #[test]
    fn difference_set_is_symmetric(nums in prop::collection::vec((0i64..16, 1i64..9), 1..6)) {
        let mut angles: Vec<RatAngle> = nums.iter().map(|&(a, b)| RatAngle::new(a, b)).collect();
        // paired edges point both ways
        let opposite: Vec<RatAngle> = angles.iter().map(|&a| a + RatAngle::half_turn()).collect();
        angles.extend(opposite);
        let d = eg::angle_diff_set(&angles);
        for x in &d {
            let y = (RatAngle::half_turn() - *x).mod_pi();
            prop_assert!(d.contains(&y) || y.is_zero());
        }
    }

    #[test]
    fn rationals_round_trip(n in -10_000i64..10_000, m in 1i64..10_000) {
        let v = eg::q(n, m);
        prop_assert_eq!(eg::parse_q(&eg::format_q(&v)), Some(v));
    }
}

#[test]
fn unfolding_constants() {
    // right triangle with angles pi/2, 3pi/8, pi/8
    let tri = [RatAngle::new(0, 1), RatAngle::new(5, 8), RatAngle::new(3, 2)];
    assert_eq!(eg::unfolding_constant(&eg::angle_diff_set(&tri)), 8);
    let square = [RatAngle::new(0, 1), RatAngle::new(1, 2), RatAngle::new(1, 1), RatAngle::new(3, 2)];
    assert_eq!(eg::unfolding_constant(&eg::angle_diff_set(&square)), 2);
    assert_eq!(dihedral_group(8).order(), 16);
}
