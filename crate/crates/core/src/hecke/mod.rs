//! Hecke operator graphs: neighbour generators, graph assembly, PGL
//! projection and the cross-check suite.

use std::collections::HashMap;
use std::fmt;

use crate::bundle::{enumerate_bundles, BundleClass, Label};
use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};
use crate::places::Place;

pub mod checks;
mod ctx;
pub mod degree2;
pub mod duality;
pub mod golden;
pub mod pgl;
pub mod rank2;
pub mod rank3;

pub use checks::{check_suite, CheckReport, CheckResult, StableRange, Status};
pub use pgl::project_pgl;

/// GL_n graph on bundles or PGL_n graph on twist classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    Gl,
    Pgl,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Gl => "GL",
            Form::Pgl => "PGL",
        })
    }
}

/// The operator Phi_{x,r} on rank-n bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Operator {
    pub place: Place,
    pub r: u32,
    pub rank: u32,
    pub form: Form,
}

impl Operator {
    pub fn new(place: Place, r: u32, rank: u32) -> Operator {
        Operator { place, r, rank, form: Form::Gl }
    }

    /// Number of F_{q_x}-points of Gr(n-r, n).
    pub fn expected_out_weight(&self, curve: &Curve) -> u64 {
        let qx = curve.q().pow(self.place.degree);
        gaussian_binomial(self.rank, self.r, qx)
    }
}

/// [n choose k]_q.
pub fn gaussian_binomial(n: u32, k: u32, q: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (q as u128).pow(n - i) - 1;
        den *= (q as u128).pow(i + 1) - 1;
    }
    (num / den) as u64
}

/// A target of a Hecke operator with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Neighbor {
    pub target: BundleClass,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeEdge {
    pub src: usize,
    pub dst: usize,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeGraph {
    pub curve: String,
    pub operator: Operator,
    pub window: (i32, i32),
    pub vertices: Vec<BundleClass>,
    pub edges: Vec<HeckeEdge>,
}

impl HeckeGraph {
    pub fn index(&self) -> HashMap<&BundleClass, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v, i)).collect()
    }

    pub fn out_weight(&self, v: usize) -> u64 {
        self.edges.iter().filter(|e| e.src == v).map(|e| e.weight).sum()
    }

    pub fn weight(&self, src: usize, dst: usize) -> u64 {
        self.edges.iter().filter(|e| e.src == src && e.dst == dst).map(|e| e.weight).sum()
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &HeckeEdge> {
        self.edges.iter().filter(move |e| e.src == v)
    }
}

/// Sequential or rayon-parallel graph assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExecMode {
    Sequential,
    #[default]
    Parallel,
}

/// Accumulates targets of one source and validates them.
pub(crate) struct Targets<'a> {
    curve: &'a Curve,
    items: Vec<(BundleClass, u64)>,
}

impl<'a> Targets<'a> {
    pub(crate) fn new(curve: &'a Curve) -> Targets<'a> {
        Targets { curve, items: Vec::new() }
    }

    pub(crate) fn push(&mut self, labels: Vec<Label>, weight: u64) {
        self.items.push((BundleClass::new(labels), weight));
    }

    pub(crate) fn twisted(self, k: i32, c: Point) -> Targets<'a> {
        let curve = self.curve;
        let items = self.items.into_iter().map(|(b, w)| (b.twist(curve, k, c), w)).collect();
        Targets { curve, items }
    }

    /// Sorts, rejects zero weights and collisions, and checks that every
    /// target has degree `deg(src) - drop` and determinant `det(src) - shift`.
    pub(crate) fn finish(self, src: &BundleClass, drop: i32, shift: Point) -> Result<Vec<Neighbor>> {
        let curve = self.curve;
        let mut items = self.items;
        items.sort();
        for w in items.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(HeckeError::Invariant(format!("target collision at {} from {src}", w[0].0)));
            }
        }
        let det = curve.sub(src.det_class(curve), shift);
        let mut out = Vec::with_capacity(items.len());
        for (t, w) in items {
            if w == 0 {
                return Err(HeckeError::Invariant(format!("zero weight edge {src} -> {t}")));
            }
            if t.rank() != src.rank() || t.degree() != src.degree() - drop {
                return Err(HeckeError::Invariant(format!("target {t} of {src} has wrong rank or degree")));
            }
            if t.det_class(curve) != det {
                return Err(HeckeError::Invariant(format!("target {t} of {src} has wrong determinant")));
            }
            out.push(Neighbor { target: t, weight: w });
        }
        Ok(out)
    }
}

/// V_{Phi}(E) for the supported operators.
pub fn neighbors(curve: &Curve, op: &Operator, e: &BundleClass) -> Result<Vec<Neighbor>> {
    if e.rank() != op.rank {
        return Err(HeckeError::Domain(format!("{e} does not have rank {}", op.rank)));
    }
    match (op.rank, op.place.degree, op.r) {
        (3, 1, 1) => rank3::phi1(curve, e, &op.place),
        (3, 1, 2) => duality::phi2_rank3(curve, e, &op.place),
        (2, 1, 1) => rank2::phi1(curve, e, &op.place),
        (2, 1, 2) => rank2::phi2(curve, e, &op.place),
        (2, 2, 1) => degree2::even_component(curve, e, &op.place),
        (3, 2, 1) => degree2::o3_neighbors(curve, e, &op.place),
        (n, d, r) => Err(HeckeError::Domain(format!(
            "no closed formula for rank {n}, |x| = {d}, r = {r}"
        ))),
    }
}

/// Whether the graph keeps this vertex; the even component drops odd degrees.
fn keeps(op: &Operator, e: &BundleClass) -> bool {
    !(op.rank == 2 && op.place.degree == 2) || e.degree() % 2 == 0
}

/// Vertices of the window: all bundles of total degree in `[lo, hi]` whose
/// summands also have degree in `[lo, hi]`.
pub fn window_vertices(curve: &Curve, op: &Operator, lo: i32, hi: i32) -> Result<Vec<BundleClass>> {
    if lo > hi {
        return Err(HeckeError::Config(format!("empty window {lo}..{hi}")));
    }
    let mut v = Vec::new();
    for d in lo..=hi {
        v.extend(enumerate_bundles(curve, op.rank, d, lo, hi)?.into_iter().filter(|e| keeps(op, e)));
    }
    let mut keyed: Vec<(i32, String, BundleClass)> = v.into_iter().map(|e| (e.degree(), e.to_string(), e)).collect();
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    Ok(keyed.into_iter().map(|(_, _, e)| e).collect())
}

pub fn build_graph(curve: &Curve, op: &Operator, lo: i32, hi: i32) -> Result<HeckeGraph> {
    build_graph_with(curve, op, lo, hi, ExecMode::default())
}

/// Builds the GL graph on a degree window. Edges to vertices outside the
/// window are dropped; the output is independent of `mode`.
pub fn build_graph_with(curve: &Curve, op: &Operator, lo: i32, hi: i32, mode: ExecMode) -> Result<HeckeGraph> {
    if op.form != Form::Gl {
        return Err(HeckeError::Config("build the GL graph and project it".into()));
    }
    if op.rank == 3 && op.place.degree == 2 {
        return Err(HeckeError::Domain(
            "rank 3 with a degree-two place is only known at the trivial bundle".into(),
        ));
    }
    let vertices = window_vertices(curve, op, lo, hi)?;
    let index: HashMap<&BundleClass, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let per_vertex = |(i, v): (usize, &BundleClass)| -> Result<Vec<HeckeEdge>> {
        let mut out: Vec<HeckeEdge> = neighbors(curve, op, v)?
            .into_iter()
            .filter_map(|n| index.get(&n.target).map(|&j| HeckeEdge { src: i, dst: j, weight: n.weight }))
            .collect();
        out.sort_by_key(|e| e.dst);
        Ok(out)
    };
    let lists: Vec<Vec<HeckeEdge>> = match mode {
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => {
            use rayon::prelude::*;
            vertices.par_iter().enumerate().map(per_vertex).collect::<Result<_>>()?
        }
        _ => vertices.iter().enumerate().map(per_vertex).collect::<Result<_>>()?,
    };
    Ok(HeckeGraph {
        curve: curve.name().to_string(),
        operator: *op,
        window: (lo, hi),
        vertices,
        edges: lists.into_iter().flatten().collect(),
    })
}

/// True if every target of `v` is a vertex of the graph.
pub fn neighborhood_in_window(curve: &Curve, g: &HeckeGraph, v: &BundleClass) -> Result<bool> {
    let index = g.index();
    Ok(neighbors(curve, &g.operator, v)?.iter().all(|n| index.contains_key(&n.target)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grassmannian_counts() {
        assert_eq!(gaussian_binomial(3, 1, 2), 7);
        assert_eq!(gaussian_binomial(3, 2, 3), 13);
        assert_eq!(gaussian_binomial(2, 1, 4), 5);
        assert_eq!(gaussian_binomial(3, 1, 4), 21);
        assert_eq!(gaussian_binomial(2, 0, 4), 1);
    }
}
