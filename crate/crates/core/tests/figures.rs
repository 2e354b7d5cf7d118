//! Built PGL_2 graphs against the hand-entered figures.

use hecke_core::hecke::golden::{compare, even_figure, figure1};
use hecke_core::hecke::{build_graph, project_pgl, Operator};
use hecke_core::{Curve, Place};

#[test]
fn figure1_matches_for_one_point_curves() {
    for name in ["E2", "E3", "E4"] {
        let c = Curve::named(name).unwrap();
        let x = Place::rational(c.zero(1));
        let op = Operator::new(x, 1, 2);
        let g = build_graph(&c, &op, -3, 3).unwrap();
        let p = project_pgl(&c, &g);
        let fig = figure1(&c, 6).unwrap();
        let diffs = compare(&fig, &p, op.expected_out_weight(&c));
        assert!(diffs.is_empty(), "{name}: {diffs:#?}");
    }
}

#[test]
fn even_figures_match() {
    for name in ["E2", "E3"] {
        let c = Curve::named(name).unwrap();
        for info in c.places(2).unwrap().iter() {
            let op = Operator::new(info.place, 1, 2);
            let g = build_graph(&c, &op, -4, 4).unwrap();
            let p = project_pgl(&c, &g);
            let fig = even_figure(&c, &info.place, 6).unwrap();
            let diffs = compare(&fig, &p, op.expected_out_weight(&c));
            assert!(diffs.is_empty(), "{name} {}: {diffs:#?}", info.place);
        }
    }
}
