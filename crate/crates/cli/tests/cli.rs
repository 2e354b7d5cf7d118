//! The binary end to end: outputs, exit codes and file round trips.

use std::process::{Command, Output};

use hecke_atlas::export::{from_json, to_json_string, Names};
use hecke_core::hecke::{build_graph, Operator};
use hecke_core::{Curve, Place};
use proptest::prelude::*;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke-atlas")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn rank3_export_has_full_out_weights() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = run(&[
        "graph", "build", "--curve", "E2", "--rank", "3", "--place", "deg1:0", "--r", "1", "--window", "-4..4", "--format",
        "json", "-o", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (c, g) = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let direct = build_graph(&c, &g.operator, -4, 4).unwrap();
    assert_eq!(g, direct);
    // every vertex whose neighbourhood fits in the window sums to 7
    for v in 0..g.vertices.len() {
        if hecke_core::hecke::neighborhood_in_window(&c, &g, &g.vertices[v]).unwrap() {
            assert_eq!(g.out_weight(v), 7, "{}", g.vertices[v]);
        }
    }
}

#[test]
fn mutated_weight_exits_3_and_names_the_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let o = run(&["graph", "build", "--curve", "E2", "--rank", "3", "--window", "-3..3", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let ok = run(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));

    let (c, mut g) = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let victim = (0..g.vertices.len())
        .find(|&v| hecke_core::hecke::neighborhood_in_window(&c, &g, &g.vertices[v]).unwrap())
        .unwrap();
    let e = g.edges.iter_mut().find(|e| e.src == victim).unwrap();
    e.weight += 1;
    std::fs::write(&path, to_json_string(&c, &g, &Names::new())).unwrap();
    let bad = run(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(3));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert!(err.contains(&g.vertices[victim].to_string()), "{err}");
}

#[test]
fn duality_check_passes() {
    for rank in ["2", "3"] {
        let o = run(&["check", "--curve", "E2", "--rank", rank, "--r", "1", "--window", "-2..2", "--duality"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("(c) first duality"));
    }
}

#[test]
fn check_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["check", "--curve", "E3a", "--rank", "2", "--place", "deg1:1", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn spectral_root_sets() {
    assert_eq!(stdout(&run(&["spectral", "--q", "3", "--cusp"])), "λ ∈ {0}\n");
    // the exact system admits lambda = 0 besides +-q
    assert_eq!(stdout(&run(&["spectral", "--q", "2", "--toroidal"])), "λ ∈ {-2, 0, 2}\n");
    assert_eq!(stdout(&run(&["spectral", "--q", "4", "--toroidal"])), "λ ∈ {-4, 0, 4}\n");
    assert_eq!(run(&["spectral", "--q", "5", "--cusp"]).status.code(), Some(2));
    assert_eq!(run(&["spectral", "--q", "2"]).status.code(), Some(2));
}

#[test]
fn hall_commands() {
    let o = run(&["hall", "number", "--lambda", "1,1", "--mu", "1", "--nu", "1", "--q", "3"]);
    assert_eq!(stdout(&o), "h^(1,1)_{(1),(1)}(q=3) = 4\n");
    let o = run(&["hall", "decompose", "--curve", "E2", "--place", "deg2:1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("N2 = 5"));
    assert_eq!(run(&["hall", "number", "--lambda", "5", "--mu", "4", "--nu", "1", "--q", "2"]).status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_2() {
    let cases: [&[&str]; 6] = [
        &["graph", "build", "--curve", "E9"],
        &["graph", "build", "--window", "3..1"],
        &["graph", "build", "--place", "deg1:5"],
        &["graph", "build", "--rank", "3", "--place", "deg2:0"],
        &["graph", "build", "--curve", "E2a", "--golden", "fig1"],
        &["graph", "build", "--format", "svg"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn golden_exports_carry_names() {
    let o = run(&["graph", "build", "--curve", "E3", "--golden", "fig1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = v["vertices"].as_array().unwrap().iter().filter_map(|x| x["name"].as_str()).collect();
    for n in ["O+O", "N_y1", "N_y3", "M_x1", "M_x0", "O+L_1x"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
    let dot = stdout(&run(&["graph", "build", "--curve", "E2", "--even", "--format", "dot"]));
    assert!(dot.starts_with("digraph hecke {"));
    assert!(dot.contains("t_y1"));
    assert!(dot.contains("[label=\"3\"]"));
}

#[test]
fn curve_files() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("e2.toml");
    std::fs::write(&toml_path, "name = \"E2\"\np = 2\na = [0, 0, 1, 1, 1]\n").unwrap();
    let json_path = dir.path().join("e2.json");
    std::fs::write(&json_path, r#"{"name": "E2", "p": 2, "e": 1, "a": [0, 0, 1, 1, 1], "base": null}"#).unwrap();
    let named = stdout(&run(&["graph", "build", "--curve", "E2", "--rank", "3"]));
    for p in [&toml_path, &json_path] {
        let o = run(&["graph", "build", "--curve", p.to_str().unwrap(), "--rank", "3"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), named);
    }
    std::fs::write(&toml_path, "name = \"bad\"\np = 2\na = [0, 0, 0, 0, 0]\n").unwrap();
    assert_eq!(run(&["graph", "build", "--curve", toml_path.to_str().unwrap()]).status.code(), Some(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_round_trip(ci in 0usize..6, rank in 2u32..=3, r in 1u32..=2, lo in -3i32..=0, width in 0i32..=3, pi in 0usize..4) {
        prop_assume!(r < rank);
        let c = Curve::named(Curve::NAMED[ci]).unwrap();
        let places = c.places(1).unwrap();
        let x: Place = places[pi % places.len()].place;
        let g = build_graph(&c, &Operator::new(x, r, rank), lo, lo + width).unwrap();
        let text = to_json_string(&c, &g, &Names::new());
        let (c2, g2) = from_json(&text).unwrap();
        prop_assert_eq!(&g2, &g);
        prop_assert_eq!(to_json_string(&c2, &g2, &Names::new()), text);
    }
}
