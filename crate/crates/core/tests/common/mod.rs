#![allow(dead_code)]

use std::path::PathBuf;
use windtree_core::exactgeom::{Pt, RatVec2};
use windtree_core::modelfile;
use windtree_core::surface::{build_surface, exact_polygon_surface, EdgeRef, Polygon, TranslationSurface};
use windtree_core::windtree::WindTreeModel;

pub fn p(x: i64, y: i64) -> RatVec2 {
    RatVec2::from_ints(x, y)
}

pub fn model_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

pub fn load(name: &str) -> WindTreeModel {
    let text = std::fs::read_to_string(model_path(name)).unwrap();
    modelfile::load_model(&text).unwrap().1
}

/// Every model file shipped with the crate, by name.
pub fn all_models() -> Vec<(String, WindTreeModel)> {
    let mut names: Vec<String> = std::fs::read_dir(model_path(""))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".toml"))
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), load(&n))).collect()
}

/// Unit square with bottom/top (pair 0) and left/right (pair 1, left positive).
pub fn square_torus() -> TranslationSurface {
    exact_polygon_surface(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], &[(0, 2), (3, 1)]).unwrap()
}

/// Two unit squares glued left to right in a cycle, each closed up vertically.
pub fn two_square_torus() -> TranslationSurface {
    let a = Polygon::from_exact(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)]);
    let b = Polygon::from_exact(vec![p(1, 0), p(2, 0), p(2, 1), p(1, 1)]);
    let e = EdgeRef::new;
    build_surface(
        vec![a, b],
        &[(e(0, 0), e(0, 2)), (e(1, 0), e(1, 2)), (e(0, 1), e(1, 3)), (e(1, 1), e(0, 3))],
    )
    .unwrap()
}

pub fn regular_octagon() -> TranslationSurface {
    let v: Vec<Pt> = (0..8)
        .map(|k| {
            let a = std::f64::consts::PI / 8.0 * (2 * k + 1) as f64 - std::f64::consts::FRAC_PI_2;
            [a.cos(), a.sin()]
        })
        .collect();
    let poly = Polygon::from_f64(v);
    let e = EdgeRef::new;
    build_surface(vec![poly], &(0..4).map(|k| (e(0, k), e(0, k + 4))).collect::<Vec<_>>()).unwrap()
}

/// Centrally symmetric polygon from edge vectors of increasing angle in the
/// upper half plane; opposite sides glued.
pub fn symmetric_polygon(edges: &[(i64, i64)]) -> TranslationSurface {
    let mut dirs: Vec<(i64, i64)> = edges.to_vec();
    dirs.sort_by(|a, b| (a.1 as f64).atan2(a.0 as f64).partial_cmp(&(b.1 as f64).atan2(b.0 as f64)).unwrap());
    let k = dirs.len();
    let mut verts = vec![p(0, 0)];
    let all: Vec<(i64, i64)> = dirs.iter().copied().chain(dirs.iter().map(|&(x, y)| (-x, -y))).collect();
    for &(x, y) in &all[..2 * k - 1] {
        let last = verts.last().unwrap().clone();
        verts.push(&last + &p(x, y));
    }
    let pairs: Vec<(usize, usize)> = (0..k).map(|i| (i, i + k)).collect();
    exact_polygon_surface(verts, &pairs).unwrap()
}

/// Distinct primitive directions in the open upper half plane (plus `(1, 0)`).
pub fn random_directions(rng: &mut impl rand::Rng, k: usize) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::new();
    while out.len() < k {
        let x = rng.gen_range(-4i64..=4);
        let y = rng.gen_range(0i64..=4);
        if (y == 0 && x <= 0) || (x == 0 && y == 0) {
            continue;
        }
        let g = num_integer::gcd(x, y);
        let d = (x / g, y / g);
        let angle = |v: (i64, i64)| (v.1 as f64).atan2(v.0 as f64);
        if out.iter().all(|&o| (angle(o) - angle(d)).abs() > 1e-9) {
            out.push((x, y));
        }
    }
    out
}
