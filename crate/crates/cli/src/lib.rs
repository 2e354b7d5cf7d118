//! The `hecke-atlas` command line: graph export, invariant checks, the
//! eigenvalue systems and the Hall oracle.

pub mod config;
pub mod export;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::hall::{hall_number, verify_character_decomposition, Partition};
use hecke_core::hecke::golden::{compare, even_figure, figure1, Figure};
use hecke_core::hecke::{build_graph_with, check_suite, project_pgl, CheckReport, ExecMode, HeckeEdge, HeckeGraph, Operator, Status};
use hecke_core::spectral::{solve, Condition};
use hecke_core::{Curve, HeckeError};
use serde::Serialize;
use thiserror::Error;

use config::{load_curve, select_place, Window};
use export::{from_json, to_dot, to_json_string, write_atomic, Names};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] HeckeError),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A check or comparison failed; the message carries the counterexample.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    /// 2 for bad input and unsupported parameters, 3 for violated invariants.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(HeckeError::Invariant(_)) | CliError::Failed(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hecke-atlas", version, about = "Graphs of Hecke operators on bundles over elliptic curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and export graphs.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Run the invariant suite on a built or imported graph.
    Check(CheckArgs),
    /// Solve the cusp or toroidal eigenvalue system of the PGL_2 graph.
    Spectral(SpectralArgs),
    /// Hall numbers and the character expansion of K_y.
    Hall {
        #[command(subcommand)]
        action: HallAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum GraphAction {
    Build(BuildArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Golden {
    Fig1,
    Even,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Built-in curve name or a TOML/JSON curve file.
    #[arg(long, default_value = "E2")]
    pub curve: String,
    #[arg(long, default_value_t = 2)]
    pub rank: u32,
    /// `degD:I` for the I-th place of degree D, or an explicit place like `1:inf`.
    #[arg(long)]
    pub place: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub r: u32,
    /// Degree window `lo..hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Assemble the graph on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Project onto twist classes.
    #[arg(long)]
    pub pgl: bool,
    /// Compare the PGL_2 graph with a hand-entered figure and export the
    /// figure's part of it.
    #[arg(long, value_enum)]
    pub golden: Option<Golden>,
    /// Shorthand for `--golden even`.
    #[arg(long)]
    pub even: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Check a graph exported with `graph build --format json` instead.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Also build the complementary operator Phi_{x,n-r} and check the
    /// first duality against it.
    #[arg(long)]
    pub duality: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write a JSON report here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectralArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, conflicts_with = "toroidal", required_unless_present = "toroidal")]
    pub cusp: bool,
    #[arg(long)]
    pub toroidal: bool,
    /// Also print the determinant and kernel dimensions.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum HallAction {
    /// h^lambda_{mu,nu}: submodules of type nu with quotient of type mu.
    Number {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
        /// Size of the residue field.
        #[arg(long)]
        q: u64,
    },
    /// Expand K_y through the character-averaged T_{(0,2)} and report residuals.
    Decompose {
        #[arg(long, default_value = "E2")]
        curve: String,
        #[arg(long, default_value = "deg2:0")]
        place: String,
    },
}

fn parse_partition(s: &str) -> Result<Partition, CliError> {
    let parts: Result<Vec<u32>, _> =
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect();
    parts.map(Partition::new).map_err(|_| CliError::Config(format!("malformed partition '{s}'")))
}

fn exec_mode(sequential: bool) -> ExecMode {
    if sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    }
}

fn build(curve: &Curve, a: &GraphArgs, r: u32, default_place: &str, default_window: &str) -> Result<HeckeGraph, CliError> {
    let place = select_place(curve, a.place.as_deref().unwrap_or(default_place))?;
    let w: Window = a.window.as_deref().unwrap_or(default_window).parse()?;
    let op = Operator::new(place, r, a.rank);
    Ok(build_graph_with(curve, &op, w.lo, w.hi, exec_mode(a.sequential))?)
}

/// The projected graph restricted to the figure's vertices, named after it.
fn restrict_to_figure(fig: &Figure, g: &HeckeGraph) -> (HeckeGraph, Names) {
    let gi = fig.graph.index();
    let keep: Vec<usize> = (0..g.vertices.len()).filter(|&i| gi.contains_key(&g.vertices[i])).collect();
    let mut renumber = vec![usize::MAX; g.vertices.len()];
    for (new, &old) in keep.iter().enumerate() {
        renumber[old] = new;
    }
    let edges = g
        .edges
        .iter()
        .filter(|e| renumber[e.src] != usize::MAX && renumber[e.dst] != usize::MAX)
        .map(|e| HeckeEdge { src: renumber[e.src], dst: renumber[e.dst], weight: e.weight })
        .collect();
    let vertices: Vec<_> = keep.iter().map(|&i| g.vertices[i].clone()).collect();
    let names = vertices.iter().enumerate().map(|(i, v)| (i, fig.names[gi[v]].clone())).collect();
    (HeckeGraph { vertices, edges, ..g.clone() }, names)
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn graph_build(a: &BuildArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let curve = load_curve(&a.graph.curve)?;
    let golden = if a.even { Some(Golden::Even) } else { a.golden };
    let (graph, names) = match golden {
        None => {
            let g = build(&curve, &a.graph, a.graph.r, "deg1:0", "-2..2")?;
            let g = if a.pgl { project_pgl(&curve, &g) } else { g };
            (g, Names::new())
        }
        Some(kind) => {
            if a.graph.rank != 2 || a.graph.r != 1 {
                return Err(CliError::Config("the figures show Phi_{x,1} on rank 2".into()));
            }
            let (place_default, window_default) = match kind {
                Golden::Fig1 => ("deg1:0", "-3..3"),
                Golden::Even => ("deg2:0", "-4..4"),
            };
            let g = build(&curve, &a.graph, 1, place_default, window_default)?;
            let projected = project_pgl(&curve, &g);
            let fig = match kind {
                Golden::Fig1 => figure1(&curve, 6)?,
                Golden::Even => even_figure(&curve, &g.operator.place, 6)?,
            };
            let diffs = compare(&fig, &projected, g.operator.expected_out_weight(&curve));
            if !diffs.is_empty() {
                return Err(CliError::Failed(format!("graph differs from the figure:\n  {}", diffs.join("\n  "))));
            }
            restrict_to_figure(&fig, &projected)
        }
    };
    let text = match a.format {
        Format::Json => to_json_string(&curve, &graph, &names),
        Format::Dot => to_dot(&graph, &names),
    };
    emit(out, a.output.as_ref(), &text)
}

#[derive(Serialize)]
struct CheckJson {
    curve: String,
    passed: bool,
    checks: Vec<CheckLine>,
}

#[derive(Serialize)]
struct CheckLine {
    id: String,
    name: String,
    status: String,
    checked: usize,
    counterexample: Option<String>,
}

fn report_json(curve: &Curve, rep: &CheckReport) -> String {
    let j = CheckJson {
        curve: curve.name().to_string(),
        passed: rep.passed(),
        checks: rep
            .results
            .iter()
            .map(|r| CheckLine {
                id: r.id.to_string(),
                name: r.name.to_string(),
                status: match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                }
                .to_string(),
                checked: r.checked,
                counterexample: r.counterexample.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&j).expect("report serialises");
    s.push('\n');
    s
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (curve, g) = match &a.input {
        Some(path) => from_json(&std::fs::read_to_string(path)?)?,
        None => {
            let curve = load_curve(&a.graph.curve)?;
            let g = build(&curve, &a.graph, a.graph.r, "deg1:0", "-2..2")?;
            (curve, g)
        }
    };
    if g.operator.form != hecke_core::hecke::Form::Gl {
        return Err(CliError::Config("the check suite runs on GL graphs".into()));
    }
    let dual = if a.duality {
        let op = g.operator;
        if op.r == 0 || op.r >= op.rank {
            return Err(CliError::Config(format!("no complementary operator for r = {} in rank {}", op.r, op.rank)));
        }
        let dop = Operator::new(op.place, op.rank - op.r, op.rank);
        Some(build_graph_with(&curve, &dop, g.window.0, g.window.1, exec_mode(a.graph.sequential))?)
    } else {
        None
    };
    let rep = check_suite(&curve, &g, dual.as_ref(), a.seed)?;
    write!(out, "{rep}")?;
    if let Some(p) = &a.output {
        write_atomic(p, &report_json(&curve, &rep))?;
    }
    if !rep.passed() {
        let bad: Vec<String> = rep
            .results
            .iter()
            .filter(|r| r.status == Status::Fail)
            .map(|r| format!("({}) {}: {}", r.id, r.name, r.counterexample.as_deref().unwrap_or("")))
            .collect();
        return Err(CliError::Failed(format!("checks failed: {}", bad.join("; "))));
    }
    Ok(())
}

/// `λ ∈ {a, b, ...}` with rationals written a or a/b.
pub fn format_roots(roots: &[num_rational::Ratio<i128>]) -> String {
    let items: Vec<String> = roots.iter().map(|r| r.to_string()).collect();
    format!("λ ∈ {{{}}}", items.join(", "))
}

fn spectral(a: &SpectralArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cond = if a.cusp { Condition::Cusp } else { Condition::Toroidal };
    let rep = solve(a.q, cond)?;
    writeln!(out, "{}", format_roots(&rep.lambdas()))?;
    if a.verbose {
        writeln!(out, "determinant coefficients (constant term first): {:?}", rep.determinant.0)?;
        for r in &rep.roots {
            writeln!(out, "  λ = {}: kernel dimension {}", r.lambda, r.kernel.len())?;
        }
        writeln!(out, "common factor without rational roots: degree {}", rep.irrational_degree)?;
    }
    Ok(())
}

fn hall(a: &HallAction, out: &mut dyn Write) -> Result<(), CliError> {
    match a {
        HallAction::Number { lambda, mu, nu, q } => {
            let (l, m, n) = (parse_partition(lambda)?, parse_partition(mu)?, parse_partition(nu)?);
            writeln!(out, "h^{l}_{{{m},{n}}}(q={q}) = {}", hall_number(&l, &m, &n, *q)?)?;
        }
        HallAction::Decompose { curve, place } => {
            let c = load_curve(curve)?;
            let y = select_place(&c, place)?;
            let rep = verify_character_decomposition(&c, &y)?;
            writeln!(out, "{} y = {} N2 = {}", rep.curve, rep.y, rep.n2)?;
            for run in &rep.runs {
                writeln!(
                    out,
                    "  c = {:<32} coefficient of K_{} = {:.12}  residual {:.3e}",
                    run.label, run.target, run.at_target.re, run.residual
                )?;
            }
        }
    }
    Ok(())
}

/// Runs a parsed command, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Graph { action: GraphAction::Build(a) } => graph_build(a, out),
        Command::Check(a) => check(a, out),
        Command::Spectral(a) => spectral(a, out),
        Command::Hall { action } => hall(action, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_parse() {
        assert_eq!(parse_partition("1,2").unwrap(), Partition::new(vec![2, 1]));
        assert_eq!(parse_partition("").unwrap(), Partition::empty());
        assert!(parse_partition("a").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Core(HeckeError::Guard("x".into())).exit_code(), 2);
        assert_eq!(CliError::Core(HeckeError::Invariant("x".into())).exit_code(), 3);
        assert_eq!(CliError::Failed("x".into()).exit_code(), 3);
    }
}
