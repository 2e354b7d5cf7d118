//! JSON and DOT serialisation of graphs, and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use hecke_core::hecke::{Form, HeckeEdge, HeckeGraph, Operator};
use hecke_core::{BundleClass, Curve, Place};
use serde::{Deserialize, Serialize};

use crate::config::CurveSpec;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub place: String,
    pub r: u32,
    pub rank: u32,
    pub form: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub label: String,
    pub degree: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub src: usize,
    pub dst: usize,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub curve: CurveSpec,
    pub operator: OperatorJson,
    pub window: [i32; 2],
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

/// Optional display names, keyed by vertex index.
pub type Names = BTreeMap<usize, String>;

pub fn to_json(curve: &Curve, g: &HeckeGraph, names: &Names) -> GraphJson {
    GraphJson {
        curve: CurveSpec::of(curve),
        operator: OperatorJson {
            place: g.operator.place.to_string(),
            r: g.operator.r,
            rank: g.operator.rank,
            form: g.operator.form.to_string(),
        },
        window: [g.window.0, g.window.1],
        vertices: g
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| VertexJson { id, label: v.to_string(), degree: v.degree(), name: names.get(&id).cloned() })
            .collect(),
        edges: g.edges.iter().map(|e| EdgeJson { src: e.src, dst: e.dst, weight: e.weight }).collect(),
    }
}

pub fn to_json_string(curve: &Curve, g: &HeckeGraph, names: &Names) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(curve, g, names)).expect("graph serialises");
    s.push('\n');
    s
}

/// Rebuilds the curve and the in-memory graph from its JSON form.
pub fn from_json(text: &str) -> Result<(Curve, HeckeGraph), CliError> {
    let j: GraphJson = serde_json::from_str(text).map_err(|e| CliError::Config(format!("graph JSON: {e}")))?;
    let curve = j.curve.build()?;
    let form = match j.operator.form.as_str() {
        "GL" => Form::Gl,
        "PGL" => Form::Pgl,
        f => return Err(CliError::Config(format!("unknown form '{f}'"))),
    };
    let place = Place::from_str(&j.operator.place)?;
    let operator = Operator { place, r: j.operator.r, rank: j.operator.rank, form };
    let mut vertices = Vec::with_capacity(j.vertices.len());
    for (i, v) in j.vertices.iter().enumerate() {
        if v.id != i {
            return Err(CliError::Config(format!("vertex ids must be 0..n in order, found {} at {i}", v.id)));
        }
        let b = BundleClass::from_str(&v.label)?;
        if b.degree() != v.degree {
            return Err(CliError::Config(format!("vertex {i} has degree {} but its label says {}", v.degree, b.degree())));
        }
        vertices.push(b);
    }
    let n = vertices.len();
    let mut edges = Vec::with_capacity(j.edges.len());
    for e in &j.edges {
        if e.src >= n || e.dst >= n {
            return Err(CliError::Config(format!("edge {} -> {} references a missing vertex", e.src, e.dst)));
        }
        edges.push(HeckeEdge { src: e.src, dst: e.dst, weight: e.weight });
    }
    let g = HeckeGraph { curve: curve.name().to_string(), operator, window: (j.window[0], j.window[1]), vertices, edges };
    Ok((curve, g))
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One node per vertex and one labelled arrow per (source, target).
pub fn to_dot(g: &HeckeGraph, names: &Names) -> String {
    let op = &g.operator;
    let mut s = format!(
        "digraph hecke {{\n  label=\"{} {} Phi_{{{},{}}} rank {} window {}..{}\";\n  node [shape=box];\n",
        dot_escape(&g.curve),
        op.form,
        op.place,
        op.r,
        op.rank,
        g.window.0,
        g.window.1
    );
    for (i, v) in g.vertices.iter().enumerate() {
        let label = match names.get(&i) {
            Some(n) => format!("{n}\\n{}", dot_escape(&v.to_string())),
            None => dot_escape(&v.to_string()),
        };
        s.push_str(&format!("  v{i} [label=\"{label}\"];\n"));
    }
    for e in &g.edges {
        s.push_str(&format!("  v{} -> v{} [label=\"{}\"];\n", e.src, e.dst, e.weight));
    }
    s.push_str("}\n");
    s
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
