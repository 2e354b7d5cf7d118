//! Cross-checks on built graphs: weight sums, the dualities, the
//! stable-range corollary, delta ranges and twist invariance.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{neighbors, rank2, HeckeGraph, Neighbor, Operator};
use crate::bundle::{BundleClass, Label};
use crate::curve::{Curve, Point};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: char,
    pub name: &'static str,
    pub status: Status,
    /// Number of instances examined.
    pub checked: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn get(&self, id: char) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.id == id)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let s = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            write!(f, "({}) {:<28} {s} [{} checked]", r.id, r.name, r.checked)?;
            if let Some(c) = &r.counterexample {
                write!(f, " counterexample: {c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct Tally {
    id: char,
    name: &'static str,
    checked: usize,
    bad: Option<String>,
}

impl Tally {
    fn new(id: char, name: &'static str) -> Tally {
        Tally { id, name, checked: 0, bad: None }
    }

    fn record(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.bad.is_none() {
            self.bad = Some(msg());
        }
    }

    fn done(self) -> CheckResult {
        let status = if self.bad.is_some() { Status::Fail } else { Status::Pass };
        CheckResult { id: self.id, name: self.name, status, checked: self.checked, counterexample: self.bad }
    }
}

fn skipped(id: char, name: &'static str) -> CheckResult {
    CheckResult { id, name, status: Status::Skipped, checked: 0, counterexample: None }
}

/// Which hypotheses of the Ext-vanishing lemma a splitting E = M + L
/// satisfies, for a degree-one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct StableRange {
    /// Hypothesis (ii): L far above M.
    pub above: bool,
    /// Hypothesis (iv), for every neighbour M' of M.
    pub below: bool,
}

impl StableRange {
    /// `m` is the rank-2 part, `l` the line, `xdeg` the degree of the place,
    /// `targets` the neighbours of M under V_{x,1}.
    pub fn of(m: &BundleClass, l: &Label, xdeg: i32, targets: &[Neighbor]) -> StableRange {
        let s = m.summands();
        let dl = l.d;
        if s.len() == 1 {
            let gap = 2 * dl - m.degree();
            let below = targets.iter().all(|n| {
                if n.target.is_indecomposable() {
                    gap < -xdeg
                } else {
                    gap < -2 * xdeg
                }
            });
            StableRange { above: gap > 2 * xdeg, below }
        } else {
            StableRange {
                above: s.iter().all(|li| dl > li.d + xdeg),
                below: s.iter().all(|li| dl < li.d - xdeg),
            }
        }
    }
}

/// Splittings of a rank-3 bundle as (rank-2 part, line summand).
fn splittings(e: &BundleClass) -> Vec<(BundleClass, Label)> {
    let s = e.summands();
    let mut out = Vec::new();
    for (i, l) in s.iter().enumerate() {
        if !l.is_line() || (i > 0 && s[i - 1] == *l) {
            continue;
        }
        let rest: Vec<Label> = s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, t)| *t).collect();
        out.push((BundleClass::new(rest), *l));
    }
    out
}

/// The neighbour list predicted by the stable-range corollary, if E = M + L
/// is in one of its two ranges.
pub fn stable_range_prediction(curve: &Curve, op: &Operator, m: &BundleClass, l: &Label) -> Result<Option<Vec<Neighbor>>> {
    let x = op.place.rep;
    let qx = curve.q().pow(op.place.degree);
    let targets = rank2::phi1(curve, m, &op.place)?;
    let range = StableRange::of(m, l, op.place.degree as i32, &targets);
    let (w_drop, scale) = if range.above {
        (qx * qx, 1)
    } else if range.below {
        (1, qx)
    } else {
        return Ok(None);
    };
    let mut acc: BTreeMap<BundleClass, u64> = BTreeMap::new();
    let mut with = |v: Vec<Label>, w: u64| *acc.entry(BundleClass::new(v)).or_default() += w;
    let ldown = l.twist(curve, -1, curve.neg(x));
    with(m.summands().iter().copied().chain([ldown]).collect(), w_drop);
    for n in targets {
        with(n.target.summands().iter().copied().chain([*l]).collect(), n.weight * scale);
    }
    Ok(Some(acc.into_iter().map(|(target, weight)| Neighbor { target, weight }).collect()))
}

fn twist_by_place(curve: &Curve, op: &Operator, e: &BundleClass, sign: i32) -> Result<BundleClass> {
    let c = curve.place_class(&op.place)?;
    let c = if sign < 0 { curve.neg(c) } else { c };
    Ok(e.twist(curve, sign * op.place.degree as i32, c))
}

/// Runs checks (a)-(f) on a GL graph. `dual` is the graph of the
/// complementary operator Phi_{x,n-r} on the same window, used by the first
/// duality; for rank 2 and r = 1 the graph is its own complement.
pub fn check_suite(curve: &Curve, g: &HeckeGraph, dual: Option<&HeckeGraph>, seed: u64) -> Result<CheckReport> {
    let op = g.operator;
    let index = g.index();
    let full = op.expected_out_weight(curve);
    let mut results = Vec::new();

    // (a) out-weight sums on vertices whose neighbourhood lies in the window
    let mut a = Tally::new('a', "weight sums");
    let mut complete = vec![false; g.vertices.len()];
    for (i, v) in g.vertices.iter().enumerate() {
        let nb = neighbors(curve, &op, v)?;
        complete[i] = nb.iter().all(|n| index.contains_key(&n.target));
        if complete[i] {
            let w = g.out_weight(i);
            a.record(w == full, || format!("vertex {v}: out-weight {w}, expected {full}"));
        }
    }
    results.push(a.done());

    let weights: HashMap<(usize, usize), u64> = g.edges.iter().map(|e| ((e.src, e.dst), e.weight)).collect();

    // (b) derived duality on nonvanishing
    let mut b = Tally::new('b', "derived duality");
    for e in &g.edges {
        let (s, t) = (&g.vertices[e.src], &g.vertices[e.dst]);
        let (ds, dt) = (s.dual(curve), t.dual(curve));
        if let (Some(&i), Some(&j)) = (index.get(&dt), index.get(&ds)) {
            b.record(weights.contains_key(&(i, j)), || format!("{s} -> {t} present but {dt} -> {ds} absent"));
        }
    }
    results.push(b.done());

    // (c) first duality: E -> E' under r iff E'(x) -> E under n - r
    let self_dual = op.rank == 2 * op.r;
    let partner = if self_dual { Some(g) } else { dual };
    match partner {
        Some(h) if h.operator.place == op.place && h.operator.r + op.r == op.rank => {
            let mut c = Tally::new('c', "first duality");
            let hindex = h.index();
            let hw: HashMap<(usize, usize), u64> = h.edges.iter().map(|e| ((e.src, e.dst), e.weight)).collect();
            for e in &g.edges {
                let (s, t) = (&g.vertices[e.src], &g.vertices[e.dst]);
                let up = twist_by_place(curve, &op, t, 1)?;
                if let (Some(&i), Some(&j)) = (hindex.get(&up), hindex.get(s)) {
                    c.record(hw.contains_key(&(i, j)), || format!("{s} -> {t} present but {up} -> {s} absent"));
                }
            }
            for e in &h.edges {
                let (s, t) = (&h.vertices[e.src], &h.vertices[e.dst]);
                let down = twist_by_place(curve, &op, s, -1)?;
                if let (Some(&i), Some(&j)) = (index.get(t), index.get(&down)) {
                    c.record(weights.contains_key(&(i, j)), || format!("{s} -> {t} present but {t} -> {down} absent"));
                }
            }
            results.push(c.done());
        }
        _ => results.push(skipped('c', "first duality")),
    }

    // (d) stable-range corollary
    if op.rank == 3 && op.r == 1 && op.place.degree == 1 {
        let mut d = Tally::new('d', "stable-range corollary");
        for v in &g.vertices {
            for (m, l) in splittings(v) {
                if let Some(pred) = stable_range_prediction(curve, &op, &m, &l)? {
                    let got = neighbors(curve, &op, v)?;
                    d.record(got == pred, || format!("{v} = ({m}) + {l}: built {} targets, corollary {}", got.len(), pred.len()));
                }
            }
        }
        results.push(d.done());
    } else {
        results.push(skipped('d', "stable-range corollary"));
    }

    // (e) delta ranges and congruences on sums of three lines
    if op.rank == 3 && op.place.degree == 1 {
        let mut t = Tally::new('e', "delta congruence");
        let xd = op.place.degree as i32;
        // (lower, upper, residue) for delta_1 and delta_2
        let bounds = if op.r == 1 { [(-2 * xd, xd, xd), (-xd, 2 * xd, 2 * xd)] } else { [(-xd, 2 * xd, 2 * xd), (-2 * xd, xd, xd)] };
        for e in &g.edges {
            let (s, u) = (&g.vertices[e.src], &g.vertices[e.dst]);
            if !s.all_lines() || !u.all_lines() {
                continue;
            }
            let d1 = u.delta1()? - s.delta1()?;
            let d2 = u.delta2()? - s.delta2()?;
            for (dd, (lo, hi, res)) in [d1, d2].into_iter().zip(bounds) {
                t.record((lo..=hi).contains(&dd) && (dd - res).rem_euclid(3) == 0, || {
                    format!("{s} -> {u}: delta change {dd} outside [{lo}, {hi}] or not {res} mod 3")
                });
            }
        }
        results.push(t.done());
    } else {
        results.push(skipped('e', "delta congruence"));
    }

    // (f) twist invariance on sampled vertices and line bundles
    let mut f = Tally::new('f', "twist invariance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Point> = curve.points(1)?.to_vec();
    let samples = g.vertices.len().min(40);
    for _ in 0..samples {
        let v = &g.vertices[rng.gen_range(0..g.vertices.len())];
        let k: i32 = rng.gen_range(-2..=2);
        let c = pts[rng.gen_range(0..pts.len())];
        let base = neighbors(curve, &op, v)?;
        let moved = neighbors(curve, &op, &v.twist(curve, k, c))?;
        let mut expect: Vec<Neighbor> =
            base.into_iter().map(|n| Neighbor { target: n.target.twist(curve, k, c), weight: n.weight }).collect();
        expect.sort();
        f.record(moved == expect, || format!("{v} twisted by ({k}, {c})"));
    }
    results.push(f.done());

    Ok(CheckReport { results })
}
