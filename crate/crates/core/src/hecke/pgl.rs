//! Projection of a GL graph onto twist classes.

use std::collections::{BTreeMap, HashMap};

use super::{Form, HeckeEdge, HeckeGraph};
use crate::bundle::BundleClass;
use crate::curve::Curve;

/// Replaces every vertex by its twist class and sums the weights of
/// targets in the same class. Each class takes its out-edges from one
/// representative: the first one (in vertex order) with the largest
/// in-window out-weight, so that representatives whose neighbourhood is
/// complete are preferred.
pub fn project_pgl(curve: &Curve, g: &HeckeGraph) -> HeckeGraph {
    let canon: Vec<BundleClass> = g.vertices.iter().map(|v| v.pbun_canonical(curve)).collect();
    let mut out_weight = vec![0u64; g.vertices.len()];
    for e in &g.edges {
        out_weight[e.src] += e.weight;
    }
    let mut rep: HashMap<&BundleClass, usize> = HashMap::new();
    for (i, c) in canon.iter().enumerate() {
        let slot = rep.entry(c).or_insert(i);
        if out_weight[i] > out_weight[*slot] {
            *slot = i;
        }
    }
    let mut keyed: Vec<(i32, String, BundleClass)> =
        rep.keys().map(|c| (c.degree(), c.to_string(), (*c).clone())).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let vertices: Vec<BundleClass> = keyed.into_iter().map(|(_, _, c)| c).collect();
    let index: HashMap<&BundleClass, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut edges = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        let r = rep[v];
        let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
        for e in g.out_edges(r) {
            *acc.entry(index[&canon[e.dst]]).or_default() += e.weight;
        }
        edges.extend(acc.into_iter().map(|(dst, weight)| HeckeEdge { src: i, dst, weight }));
    }
    let mut operator = g.operator;
    operator.form = Form::Pgl;
    HeckeGraph { curve: g.curve.clone(), operator, window: g.window, vertices, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::{build_graph, Operator};
    use crate::places::Place;

    #[test]
    fn projection_preserves_complete_out_weights() {
        let c = Curve::named("E2a").unwrap();
        let x = Place::rational(c.points(1).unwrap()[1]);
        let op = Operator::new(x, 1, 2);
        let g = build_graph(&c, &op, -3, 3).unwrap();
        let p = project_pgl(&c, &g);
        let full = op.expected_out_weight(&c);
        let complete = (0..p.vertices.len()).filter(|&v| p.out_weight(v) == full).count();
        assert!(complete > 0);
        assert!((0..p.vertices.len()).all(|v| p.out_weight(v) <= full));
    }
}
