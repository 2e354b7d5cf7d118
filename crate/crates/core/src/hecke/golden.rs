//! Hand-entered PGL_2 graphs of curves with a single rational point: the
//! graph of Phi_{x,1} for q = 2, 3, 4 and the even component of Phi_{y,1}
//! for q = 2, 3. They are written down edge by edge and never derived from
//! the neighbour generators.

use std::collections::{BTreeMap, HashMap};

use super::ctx::{line, stable, unip};
use super::{Form, HeckeEdge, HeckeGraph, Operator};
use crate::bundle::{BundleClass, Label};
use crate::curve::Curve;
use crate::error::{HeckeError, Result};
use crate::places::Place;

/// A golden graph with display names. `head` counts the leading vertices
/// that every faithful projection must contain with full out-weight; the
/// remaining ones are the tail c_k, k >= 2.
#[derive(Clone, Debug)]
pub struct Figure {
    pub graph: HeckeGraph,
    pub names: Vec<String>,
    pub head: usize,
}

struct Builder<'a> {
    curve: &'a Curve,
    vertices: Vec<BundleClass>,
    names: Vec<String>,
    edges: Vec<(String, String, u64)>,
}

impl<'a> Builder<'a> {
    fn vertex(&mut self, name: String, labels: Vec<Label>) {
        self.vertices.push(BundleClass::new(labels).pbun_canonical(self.curve));
        self.names.push(name);
    }

    fn edge(&mut self, a: &str, b: &str, w: u64) {
        self.edges.push((a.to_string(), b.to_string(), w));
    }

    fn finish(self, operator: Operator, window: (i32, i32), head: usize) -> Result<Figure> {
        let by_name: HashMap<&str, usize> = self.names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut edges = Vec::new();
        for (a, b, w) in &self.edges {
            let (Some(&src), Some(&dst)) = (by_name.get(a.as_str()), by_name.get(b.as_str())) else {
                return Err(HeckeError::Invariant(format!("golden edge {a} -> {b} names an unknown vertex")));
            };
            edges.push(HeckeEdge { src, dst, weight: *w });
        }
        edges.sort_by_key(|e| (e.src, e.dst));
        let graph = HeckeGraph { curve: self.curve.name().to_string(), operator, window, vertices: self.vertices, edges };
        Ok(Figure { graph, names: self.names, head })
    }
}

/// The PGL_2 graph of Phi_{x,1} on E_q with the tail O + L_{kx} cut at
/// k = `tail` (whose upward edge is omitted).
pub fn figure1(curve: &Curve, tail: u32) -> Result<Figure> {
    let q = curve.q();
    if !(2..=4).contains(&q) || curve.n1() != 1 {
        return Err(HeckeError::Config(format!("figure 1 needs a one-point curve over F_2, F_3 or F_4, not {}", curve.name())));
    }
    let tail = tail.max(2) as i32;
    let o = curve.zero(1);
    let mut b = Builder { curve, vertices: Vec::new(), names: Vec::new(), edges: Vec::new() };
    b.vertex("O+O".into(), vec![line(0, o), line(0, o)]);
    let ys: Vec<Place> = curve.places(2)?.iter().map(|i| i.place).collect();
    for (i, y) in ys.iter().enumerate() {
        b.vertex(format!("N_y{}", i + 1), vec![Label::trace(0, *y)]);
    }
    b.vertex("M_x1".into(), vec![stable(2, 1, o)]);
    b.vertex("M_x0".into(), vec![unip(2, 0, o)]);
    for k in 1..=tail {
        b.vertex(format!("O+L_{k}x"), vec![line(0, o), line(k, o)]);
    }
    let head = 4 + ys.len();
    b.edge("O+O", "O+L_1x", q + 1);
    for i in 1..=ys.len() {
        let n = format!("N_y{i}");
        b.edge(&n, "M_x1", q + 1);
        b.edge("M_x1", &n, 1);
    }
    b.edge("M_x1", "M_x0", 1);
    b.edge("M_x0", "M_x1", q);
    b.edge("M_x0", "O+L_1x", 1);
    b.edge("O+L_1x", "M_x0", q - 1);
    b.edge("O+L_1x", "O+O", 1);
    b.edge("O+L_1x", "O+L_2x", 1);
    for k in 2..=tail {
        b.edge(&format!("O+L_{k}x"), &format!("O+L_{}x", k - 1), q);
        if k < tail {
            b.edge(&format!("O+L_{k}x"), &format!("O+L_{}x", k + 1), 1);
        }
    }
    let x = Place::rational(o);
    let mut op = Operator::new(x, 1, 2);
    op.form = Form::Pgl;
    b.finish(op, (0, tail), head)
}

/// The even component of the PGL_2 graph of Phi_{y,1} on E_2 or E_3, with
/// y_n the place of n z for a point z over y, and the tail c_{2k} cut at
/// c_{2 tail}.
pub fn even_figure(curve: &Curve, y: &Place, tail: u32) -> Result<Figure> {
    let q = curve.q();
    if !(2..=3).contains(&q) || curve.n1() != 1 {
        return Err(HeckeError::Config(format!(
            "the even-component figures exist for the one-point curves over F_2 and F_3, not {}",
            curve.name()
        )));
    }
    if y.degree != 2 {
        return Err(HeckeError::Config(format!("{y} is not a degree-two place")));
    }
    let tail = tail.max(2) as i32;
    let o = curve.zero(1);
    let z = curve.lifts(y, 2)?[0];
    let mut b = Builder { curve, vertices: Vec::new(), names: Vec::new(), edges: Vec::new() };
    for n in 1..=q as i64 {
        b.vertex(format!("t_y{n}"), vec![Label::trace(0, curve.place_of_point(curve.mul(z, n))?)]);
    }
    b.vertex("s_0".into(), vec![unip(2, 0, o)]);
    for k in 0..=tail {
        b.vertex(format!("c_{}", 2 * k), vec![line(-k, o), line(k, o)]);
    }
    let head = q as usize + 3;
    let rows: &[(&str, &str, u64)] = if q == 2 {
        &[
            ("t_y1", "t_y1", 3),
            ("t_y1", "t_y2", 1),
            ("t_y1", "c_0", 1),
            ("t_y2", "t_y1", 1),
            ("t_y2", "s_0", 3),
            ("t_y2", "t_y2", 1),
            ("s_0", "t_y2", 2),
            ("s_0", "c_2", 1),
            ("s_0", "s_0", 2),
            ("c_0", "t_y1", 2),
            ("c_0", "c_2", 3),
            ("c_2", "c_0", 2),
            ("c_2", "s_0", 2),
            ("c_2", "c_4", 1),
        ]
    } else {
        &[
            ("t_y1", "t_y1", 4),
            ("t_y1", "c_0", 1),
            ("t_y1", "t_y2", 1),
            ("t_y1", "t_y3", 4),
            ("t_y2", "t_y2", 4),
            ("t_y2", "t_y3", 1),
            ("t_y2", "t_y1", 1),
            ("t_y2", "s_0", 4),
            ("t_y3", "t_y3", 1),
            ("t_y3", "t_y2", 1),
            ("t_y3", "t_y1", 4),
            ("t_y3", "s_0", 4),
            ("s_0", "s_0", 3),
            ("s_0", "t_y3", 3),
            ("s_0", "t_y2", 3),
            ("s_0", "c_2", 1),
            ("c_0", "t_y1", 6),
            ("c_0", "c_2", 4),
            ("c_2", "c_0", 3),
            ("c_2", "s_0", 6),
            ("c_2", "c_4", 1),
        ]
    };
    for &(a, c, w) in rows {
        b.edge(a, c, w);
    }
    for k in 2..=tail {
        b.edge(&format!("c_{}", 2 * k), &format!("c_{}", 2 * k - 2), q * q);
        if k < tail {
            b.edge(&format!("c_{}", 2 * k), &format!("c_{}", 2 * k + 2), 1);
        }
    }
    let mut op = Operator::new(*y, 1, 2);
    op.form = Form::Pgl;
    b.finish(op, (0, 2 * tail), head)
}

fn out_map(g: &HeckeGraph, v: usize) -> BTreeMap<&BundleClass, u64> {
    let mut m = BTreeMap::new();
    for e in g.out_edges(v) {
        *m.entry(&g.vertices[e.dst]).or_default() += e.weight;
    }
    m
}

/// Differences between a projected graph and a figure: vertices missing
/// on either side, head vertices without full out-weight, and out-edges of
/// fully covered vertices that disagree. Empty means edge-for-edge equal.
pub fn compare(fig: &Figure, projected: &HeckeGraph, full: u64) -> Vec<String> {
    let gold = &fig.graph;
    let gi = gold.index();
    let pi = projected.index();
    let mut diffs = Vec::new();
    for v in &projected.vertices {
        if !gi.contains_key(v) {
            diffs.push(format!("vertex {v} is not in the figure"));
        }
    }
    for (i, v) in gold.vertices.iter().enumerate().take(fig.head) {
        match pi.get(v) {
            None => diffs.push(format!("figure vertex {} ({v}) missing", fig.names[i])),
            Some(&j) if projected.out_weight(j) != full => {
                diffs.push(format!("figure vertex {} has out-weight {} in the window", fig.names[i], projected.out_weight(j)))
            }
            _ => {}
        }
    }
    for (j, v) in projected.vertices.iter().enumerate() {
        let Some(&i) = gi.get(v) else { continue };
        if projected.out_weight(j) != full {
            continue;
        }
        let (a, b) = (out_map(projected, j), out_map(gold, i));
        if a != b {
            diffs.push(format!("out-edges of {} differ: built {a:?}, figure {b:?}", fig.names[i]));
        }
    }
    diffs
}
