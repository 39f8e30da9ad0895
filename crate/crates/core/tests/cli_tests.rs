mod common;

use common::*;
use proptest::prelude::*;
use std::path::PathBuf;
use std::process::Command;
use windtree_core::cli;
use windtree_core::exactgeom::{q, RatAngle, RatVec2};
use windtree_core::modelfile::{parse_model, serialize_model, EmbeddingParams, ModelFile, SimulationParams};
use windtree_core::windtree::Obstacle;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("windtree").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("windtree-cli-{}-{name}", std::process::id()))
}

fn path(name: &str) -> String {
    model_path(name).to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["build", &path("classical.toml")]).0, 0);
    assert_eq!(run(&["certify", &path("classical_with_L.toml")]).0, 0);
    let (code, out, _) = run(&["certify", &path("classical.toml")]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL"), "{out}");
    let (code, _, err) = run(&["build", "/nonexistent/model.toml"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["simulate", &path("classical.toml"), "--epsilon", "-1/2"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn parse_errors_carry_a_location() {
    let dir = scratch("bad");
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(model_path("classical.toml")).unwrap().replacen("\"1/4\"", "\"x\"", 1);
    let f = dir.join("bad.toml");
    std::fs::write(&f, text).unwrap();
    let (code, _, err) = run(&["build", f.to_str().unwrap()]);
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(code, 2);
    let loc = format!("{}:", f.display());
    assert!(err.contains(&loc) && err.contains("`x` is not an exact rational"), "{err}");
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_windtree");
    let ok = Command::new(bin).args(["unfold", &path("classical.toml")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("genus = 5"));
    let bad = Command::new(bin).args(["certify", &path("n_odd_no_L.toml")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn simulate_writes_one_row_per_direction() {
    let (code, out, err) = run(&["simulate", &path("classical_with_L.toml"), "--directions", "100", "--budget", "500"]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "direction,returned,first_return_t,envelope_slope");
    assert_eq!(lines.len(), 101);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
}

#[test]
fn output_directory_and_figures() {
    let dir = scratch("figs");
    let m = path("n4_cut_corner.toml");
    let mut figures = Vec::new();
    for rep in 0..2 {
        let out = dir.join(rep.to_string());
        let o = out.to_str().unwrap();
        assert_eq!(run(&["plot", &m, "--out", o, "--budget", "100"]).0, 0);
        assert_eq!(run(&["unfold", &m, "--out", o, "--svg"]).0, 0);
        assert_eq!(run(&["build", &m, "--out", o]).0, 0);
        let read = |n: &str| std::fs::read_to_string(out.join(n)).unwrap();
        figures.push((read("model.svg"), read("unfolded.svg"), read("unfold.txt")));
        let round = parse_model(&read("model.toml")).unwrap();
        assert_eq!(round, parse_model(&std::fs::read_to_string(model_path("n4_cut_corner.toml")).unwrap()).unwrap());
    }
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(figures[0], figures[1]);
    assert!(figures[0].0.starts_with("<?xml") && figures[0].0.trim_end().ends_with("</svg>"));
}

fn rational() -> impl Strategy<Value = num_rational::BigRational> {
    (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| q(n, d))
}

fn point() -> impl Strategy<Value = RatVec2> {
    (rational(), rational()).prop_map(|(x, y)| RatVec2::new(x, y))
}

fn angle() -> impl Strategy<Value = RatAngle> {
    (0i64..48, 1i64..24).prop_map(|(n, d)| RatAngle::new(n, d))
}

prop_compose! {
    fn model_file()(
        lattice in [point(), point()],
        domain in prop::collection::vec(point(), 3..7),
        pairing in prop::collection::vec((0usize..8, 0usize..8), 0..4),
        obstacles in prop::collection::vec(prop::collection::vec((point(), angle()), 3..6), 0..3),
        embedding in prop::option::of((prop::option::of(angle()), prop::option::of(rational()), prop::option::of(point()))),
        simulation in prop::option::of((0usize..1000, 0usize..1_000_000, any::<u64>())),
    ) -> ModelFile {
        ModelFile {
            lattice,
            domain,
            pairing,
            obstacles: obstacles.into_iter().map(|o| {
                let (v, a) = o.into_iter().unzip();
                Obstacle::new(v, a)
            }).collect(),
            embedding: embedding.map(|(xi, scale, anchor)| EmbeddingParams { xi, scale, anchor }),
            simulation: simulation.map(|(directions, budget, seed)| SimulationParams { directions, budget, seed }),
        }
    }
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(f in model_file()) {
        prop_assert_eq!(parse_model(&serialize_model(&f)).unwrap(), f);
    }
}
