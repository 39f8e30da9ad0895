mod common;

use common::*;
use proptest::prelude::*;
use windtree_core::exactgeom::{self as eg, dihedral_group, q, Pt};
use windtree_core::flow::{self, Budget, Termination, Tracer};
use windtree_core::windtree::{classical_model, WindTreeModel};

fn free_start(tracer: &Tracer, x: f64, y: f64) -> Option<Pt> {
    let p = [x, y];
    (tracer.containing_obstacle(p).is_none() && tracer.clearance(p) > 1e-3).then_some(p)
}

fn unit(theta: f64) -> Pt {
    [theta.cos(), theta.sin()]
}

fn models() -> Vec<WindTreeModel> {
    vec![classical_model(q(1, 3), q(3, 5)).unwrap(), load("n8_slanted.toml"), load("classical_with_L.toml")]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, max_shrink_iters: 256, ..ProptestConfig::default() })]

    #[test]
    fn speed_and_length_are_conserved(mi in 0usize..3, x in 0.0f64..1.0, y in 0.0f64..1.0, theta in 0.0f64..6.283) {
        let m = &models()[mi];
        let tracer = Tracer::new(m);
        let Some(p) = free_start(&tracer, x, y) else { return Ok(()) };
        let tr = flow::trace_with(&tracer, p, unit(theta), Budget::collisions(500)).unwrap();
        let mut prev = (p, 0.0);
        for e in &tr.events {
            prop_assert!((eg::norm(e.incoming) - 1.0).abs() < 1e-12);
            prop_assert!((eg::norm(e.outgoing) - 1.0).abs() < 1e-12);
            prop_assert!((eg::norm(eg::sub(e.point, prev.0)) - (e.t - prev.1)).abs() < 1e-9);
            // tangential part kept, normal part flipped to the outside
            let o = &m.obstacles[e.obstacle].vertices;
            let t = eg::sub(o[(e.edge + 1) % o.len()].to_f64(), o[e.edge].to_f64());
            prop_assert!((eg::dot(e.incoming, t) - eg::dot(e.outgoing, t)).abs() < 1e-9);
            prop_assert!((eg::cross(t, e.incoming) + eg::cross(t, e.outgoing)).abs() < 1e-9);
            prop_assert!(eg::cross(t, e.outgoing) < 0.0);
            prev = (e.point, e.t);
        }
    }

    #[test]
    fn lattice_lookup_matches_brute_force(mi in 0usize..3, x in -3.0f64..3.0, y in -3.0f64..3.0, theta in 0.0f64..6.283) {
        let m = &models()[mi];
        let tracer = Tracer::new(m);
        let Some(p) = free_start(&tracer, x, y) else { return Ok(()) };
        let fast = tracer.first_hit(p, unit(theta), 60.0);
        let slow = tracer.first_hit_brute(p, unit(theta), 70).filter(|h| h.t <= 60.0);
        match (fast, slow) {
            (Some(a), Some(b)) => {
                prop_assert!((a.t - b.t).abs() < 1e-9);
                prop_assert_eq!((a.obstacle, a.edge, a.cell), (b.obstacle, b.edge, b.cell));
            }
            (None, None) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}

#[test]
fn time_reversal_after_a_thousand_bounces() {
    for m in models() {
        let tracer = Tracer::new(&m);
        let p = flow::default_start(&m);
        for k in 0..4 {
            let d = unit(flow::direction_for(7, k));
            let fwd = flow::trace_with(&tracer, p, d, Budget::collisions(1001)).unwrap();
            if fwd.status != Termination::BudgetExhausted {
                continue;
            }
            let (a, b) = (&fwd.events[999], &fwd.events[1000]);
            let mid = eg::scale(eg::add(a.point, b.point), 0.5);
            let back = flow::trace_with(&tracer, mid, eg::scale(a.outgoing, -1.0), Budget::collisions(1000)).unwrap();
            assert_eq!(back.events.len(), 1000);
            for (i, e) in back.events.iter().enumerate() {
                let f = &fwd.events[999 - i];
                assert_eq!((e.obstacle, e.edge, e.cell), (f.obstacle, f.edge, f.cell));
                assert!(eg::norm(eg::sub(e.point, f.point)) < 1e-6);
            }
            let last = back.events.last().unwrap();
            let to_start = eg::sub(p, last.point);
            assert!(eg::cross(to_start, last.outgoing).abs() < 1e-6 && eg::dot(to_start, last.outgoing) > 0.0);
        }
    }
}

#[test]
fn symmetric_images_of_trajectories() {
    // the rectangle is centered, so the D_2 action about the centre maps the
    // obstacle grid to itself
    let m = classical_model(q(1, 3), q(3, 5)).unwrap();
    let tracer = Tracer::new(&m);
    let c = [0.5, 0.5];
    let act = |g: &eg::DihedralElement, v: Pt| eg::apply_f64(g, v);
    let p = [0.13, 0.07];
    for k in 0..6 {
        let d = unit(flow::direction_for(3, k));
        let base = flow::trace_with(&tracer, p, d, Budget::collisions(300)).unwrap();
        for g in &dihedral_group(2).elements {
            let gp = eg::add(c, act(g, eg::sub(p, c)));
            let img = flow::trace_with(&tracer, gp, act(g, d), Budget::collisions(300)).unwrap();
            assert_eq!(img.events.len(), base.events.len());
            for (a, b) in base.events.iter().zip(&img.events) {
                assert!(eg::norm(eg::sub(eg::add(c, act(g, eg::sub(a.point, c))), b.point)) < 1e-7, "{g}");
                assert!(eg::norm(eg::sub(act(g, a.outgoing), b.outgoing)) < 1e-9);
            }
        }
    }
}

#[test]
fn cover_reconstruction_on_every_model() {
    for (name, m) in all_models() {
        let um = windtree_core::windtree::unfold_model(&m).unwrap();
        let p = flow::default_start(&m);
        let theta = flow::direction_for(11, 0);
        let planar = flow::trace(&m, p, theta, Budget::collisions(300)).unwrap();
        let cover = flow::cover_trace(&m, &um, p, theta, Budget::collisions(300)).unwrap();
        let err = flow::reconstruction_error(&planar, &cover.trajectory);
        assert!(err < 1e-6, "{name}: {err}");
    }
}
