//! V_{x,1} on rank-3 bundles for a degree-one place x.
//!
//! Every bundle is first twisted by a multiple of x0 into a normal form, its
//! neighbours are read off the closed formulas there, and the targets are
//! twisted back. Twisting by O(k x0) leaves all classes unchanged.

use super::ctx::{line, stable, unip, Ctx};
use super::{Neighbor, Targets};
use crate::bundle::{BundleClass, Kind, Label};
use crate::curve::Point;
use crate::error::{HeckeError, Result};
use crate::places::Place;
use crate::Curve;

pub fn phi1(curve: &Curve, e: &BundleClass, place: &Place) -> Result<Vec<Neighbor>> {
    let ctx = Ctx::new(curve, place)?;
    if e.rank() != 3 {
        return Err(HeckeError::Domain(format!("{e} is not of rank 3")));
    }
    let (k, t) = normal_form(&ctx, e)?;
    t.twisted(-k, ctx.zero).finish(e, 1, ctx.x)
}

/// Returns the twist k and the targets of `e(k x0)`.
fn normal_form<'a>(ctx: &Ctx<'a>, e: &BundleClass) -> Result<(i32, Targets<'a>)> {
    let s = e.summands();
    match s.len() {
        1 => {
            let m = s[0];
            let r = if m.kind() == Kind::Stable { m.d.rem_euclid(3) } else { 0 };
            let k = -(m.d - r) / 3;
            let m0 = m.twist(ctx.c, k, ctx.zero);
            Ok((k, indecomposable(ctx, m0)?))
        }
        2 => {
            let (m, l) = (s[0], s[1]);
            let r = m.d.rem_euclid(2);
            let k = -(m.d - r) / 2;
            let m0 = m.twist(ctx.c, k, ctx.zero);
            let l0 = l.twist(ctx.c, k, ctx.zero);
            let t = match m0.kind() {
                Kind::Unipotent => unipotent_plus_line(ctx, m0.class(), l0.d, l0.class()),
                Kind::Trace => trace_plus_line(ctx, m0.y, l0.d, l0.class())?,
                Kind::Stable => stable_plus_line(ctx, m0.class(), l0.d, l0.class())?,
                Kind::Line => unreachable!("rank-2 summand"),
            };
            Ok((k, t))
        }
        _ => {
            // ascending degrees
            let mut ls: Vec<(i32, Point)> = s.iter().map(|l| (l.d, l.class())).collect();
            ls.reverse();
            let (a, b, c) = (ls[0].0, ls[1].0, ls[2].0);
            let cls = |i: usize| ls[i].1;
            if a == c {
                Ok((-a, triple_at_zero(ctx, [cls(0), cls(1), cls(2)])))
            } else if a == b && c - a == 1 {
                Ok((-a, pair_plus_line_up(ctx, cls(0), cls(1), cls(2))))
            } else if a == b {
                Ok((-a, pair_plus_far_line(ctx, cls(0), cls(1), c - a, cls(2))))
            } else if b == c && a - b == -1 {
                Ok((-b, pair_plus_line_down(ctx, cls(1), cls(2), cls(0))))
            } else if b == c {
                Ok((-b, pair_plus_far_line(ctx, cls(1), cls(2), a - b, cls(0))))
            } else if b - a == 1 {
                Ok((-a, staircase(ctx, cls(0), cls(1), c - a, cls(2))))
            } else if c - b == 1 {
                Ok((-b, staircase(ctx, cls(1), cls(2), a - b, cls(0))))
            } else {
                Ok((0, spread(ctx, &ls)))
            }
        }
    }
}

fn indecomposable<'a>(ctx: &Ctx<'a>, m: Label) -> Result<Targets<'a>> {
    let q = ctx.q;
    let mut t = Targets::new(ctx.c);
    match (m.kind(), m.d) {
        (Kind::Trace, 0) => {
            let c = ctx.c.place_class(&m.y)?;
            t.push(vec![stable(3, -1, ctx.mx(c))], q * q + q + 1);
        }
        (Kind::Unipotent, 0) => {
            let y = m.class();
            t.push(vec![stable(3, -1, ctx.mx(ctx.mul(y, 3)))], q * q);
            t.push(vec![stable(2, -1, ctx.mx(ctx.mul(y, 2))), line(0, y)], q);
            t.push(vec![line(-1, ctx.mx(y)), unip(2, 0, y)], 1);
        }
        (Kind::Stable, 1) => {
            // one edge per effective divisor of degree 3 in the class y - x
            for d in ctx.eff3(ctx.mx(m.class()))? {
                t.push(d, 1);
            }
        }
        (Kind::Stable, 2) => {
            let y = m.class();
            let n1 = ctx.c.n1();
            t.push(vec![stable(3, 1, ctx.mx(y))], q * q + q + 1 - n1);
            for a in ctx.points()? {
                t.push(vec![line(0, a), stable(2, 1, ctx.sub(ctx.mx(y), a))], 1);
            }
        }
        _ => return Err(HeckeError::Invariant(format!("{m} is not in normal form"))),
    }
    Ok(t)
}

/// F_2 tensor L_y plus a line of degree d and class y'.
fn unipotent_plus_line<'a>(ctx: &Ctx<'a>, y: Point, d: i32, y1: Point) -> Targets<'a> {
    let (q, x) = (ctx.q, ctx.x);
    let u2 = unip(2, 0, y);
    let s2 = stable(2, -1, ctx.mx(ctx.mul(y, 2)));
    let drop = line(-1, ctx.mx(y));
    let l = line(d, y1);
    let mut t = Targets::new(ctx.c);
    match d {
        0 if y != y1 => {
            t.push(vec![stable(3, -1, ctx.mx(ctx.add(y1, ctx.mul(y, 2))))], q * q - q);
            t.push(vec![line(-1, ctx.mx(y1)), u2], 1);
            t.push(vec![s2, l], q);
            t.push(vec![stable(2, -1, ctx.mx(ctx.add(y, y1))), line(0, y)], q - 1);
            t.push(vec![drop, line(0, y), l], 1);
        }
        0 => {
            t.push(vec![drop, line(0, y), line(0, y)], 1);
            t.push(vec![s2, line(0, y)], q * q);
            t.push(vec![drop, u2], q);
        }
        1 => {
            t.push(vec![s2, l], q);
            t.push(vec![drop, line(0, y), l], 1);
            if y != ctx.sub(y1, x) {
                t.push(vec![u2, line(0, ctx.mx(y1))], q * q);
            } else {
                t.push(vec![unip(3, 0, y)], q * q - q);
                t.push(vec![u2, line(0, y)], q);
            }
        }
        -1 => {
            t.push(vec![l, s2], q * q);
            t.push(vec![line(-2, ctx.mx(y1)), u2], 1);
            if y != ctx.add(y1, x) {
                t.push(vec![l, drop, line(0, y)], q);
            } else {
                t.push(vec![unip(2, -2, y1), line(0, y)], q - 1);
                t.push(vec![l, l, line(0, y)], 1);
            }
        }
        _ => {
            let (top, mid, low) = if d >= 2 { (q * q, q, 1) } else { (1, q * q, q) };
            t.push(vec![u2, line(d - 1, ctx.mx(y1))], top);
            t.push(vec![s2, l], mid);
            t.push(vec![drop, line(0, y), l], low);
        }
    }
    t
}

/// The trace of a degree-2 place w plus a line of degree d and class y'.
fn trace_plus_line<'a>(ctx: &Ctx<'a>, w: Place, d: i32, y1: Point) -> Result<Targets<'a>> {
    let q = ctx.q;
    let c = ctx.c.place_class(&w)?;
    let tr = Label::trace(0, w);
    let s2 = stable(2, -1, ctx.mx(c));
    let l = line(d, y1);
    let mut t = Targets::new(ctx.c);
    if d == 0 {
        t.push(vec![stable(3, -1, ctx.mx(ctx.add(y1, c)))], q * q - 1);
        t.push(vec![tr, line(-1, ctx.mx(y1))], 1);
        t.push(vec![s2, l], q + 1);
    } else {
        let (top, low) = if d >= 1 { (q * q, q + 1) } else { (1, q * q + q) };
        t.push(vec![tr, line(d - 1, ctx.mx(y1))], top);
        t.push(vec![s2, l], low);
    }
    Ok(t)
}

/// The stable bundle of rank 2, degree 1 and class y plus a line of degree d
/// and class y'.
fn stable_plus_line<'a>(ctx: &Ctx<'a>, y: Point, d: i32, y1: Point) -> Result<Targets<'a>> {
    let q = ctx.q;
    let s = stable(2, 1, y);
    let l = line(d, y1);
    let divisors = ctx.eff2(ctx.mx(y))?;
    let mut t = Targets::new(ctx.c);
    match d {
        0 => {
            for dv in divisors {
                match dv.as_slice() {
                    [a, b] if a.class() == y1 || b.class() == y1 => {
                        let other = if a.class() == y1 { b.class() } else { a.class() };
                        t.push(vec![line(0, other), unip(2, 0, y1)], q - 1);
                        t.push(vec![l, l, line(0, other)], 1);
                    }
                    [u] if u.kind() == Kind::Unipotent && u.class() == y1 => {
                        t.push(vec![l, unip(2, 0, y1)], 1);
                        t.push(vec![unip(3, 0, y1)], q - 1);
                    }
                    _ => {
                        let mut v = dv.clone();
                        v.push(l);
                        t.push(v, q);
                    }
                }
            }
            t.push(vec![s, line(-1, ctx.mx(y1))], 1);
        }
        1 => {
            for mut dv in divisors {
                dv.push(l);
                t.push(dv, 1);
            }
            t.push(vec![s, line(0, ctx.mx(y1))], q);
            t.push(vec![stable(3, 1, ctx.mx(ctx.add(y, y1)))], q * q - q);
        }
        _ => {
            let (each, top) = if d >= 2 { (1, q * q) } else { (q, 1) };
            for mut dv in divisors {
                dv.push(l);
                t.push(dv, each);
            }
            t.push(vec![s, line(d - 1, ctx.mx(y1))], top);
        }
    }
    Ok(t)
}

fn triple_at_zero<'a>(ctx: &Ctx<'a>, mut ys: [Point; 3]) -> Targets<'a> {
    let q = ctx.q;
    ys.sort();
    let mut t = Targets::new(ctx.c);
    let l0 = |y| line(0, y);
    let drop = |y| line(-1, ctx.mx(y));
    if ys[0] == ys[2] {
        let y = ys[0];
        t.push(vec![drop(y), l0(y), l0(y)], q * q + q + 1);
    } else if ys[0] == ys[1] || ys[1] == ys[2] {
        let (y, y1) = if ys[0] == ys[1] { (ys[0], ys[2]) } else { (ys[2], ys[0]) };
        t.push(vec![l0(y), l0(y), drop(y1)], 1);
        t.push(vec![drop(y), l0(y), l0(y1)], q + 1);
        t.push(vec![stable(2, -1, ctx.mx(ctx.add(y, y1))), l0(y)], q * q - 1);
    } else {
        let sum = ctx.add(ctx.add(ys[0], ys[1]), ys[2]);
        t.push(vec![stable(3, -1, ctx.mx(sum))], (q - 1) * (q - 1));
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            t.push(vec![drop(ys[i]), l0(ys[j]), l0(ys[k])], 1);
            t.push(vec![stable(2, -1, ctx.mx(ctx.add(ys[j], ys[k]))), l0(ys[i])], q - 1);
        }
    }
    t
}

/// L_y + L_{y1} in degree 0 plus a line of degree 1 and class y2.
fn pair_plus_line_up<'a>(ctx: &Ctx<'a>, y: Point, y1: Point, y2: Point) -> Targets<'a> {
    let q = ctx.q;
    let m = ctx.mx(y2);
    let top = line(1, y2);
    let mut t = Targets::new(ctx.c);
    if y != y1 {
        let (y, y1) = if m == y { (y1, y) } else { (y, y1) };
        t.push(vec![line(-1, ctx.mx(y)), line(0, y1), top], 1);
        t.push(vec![line(-1, ctx.mx(y1)), line(0, y), top], 1);
        t.push(vec![stable(2, -1, ctx.mx(ctx.add(y, y1))), top], q - 1);
        if m == y1 {
            t.push(vec![line(0, y), unip(2, 0, y1)], q * q - q);
            t.push(vec![line(0, y), line(0, y1), line(0, y1)], q);
        } else {
            t.push(vec![line(0, y), line(0, y1), line(0, m)], q * q);
        }
    } else {
        t.push(vec![line(-1, ctx.mx(y)), line(0, y), top], q + 1);
        if m == y {
            t.push(vec![line(0, y), unip(2, 0, y)], q * q - 1);
            t.push(vec![line(0, y); 3], 1);
        } else {
            t.push(vec![line(0, y), line(0, y), line(0, m)], q * q);
        }
    }
    t
}

/// L_y + L_{y1} in degree 0 plus a line of degree -1 and class y2.
fn pair_plus_line_down<'a>(ctx: &Ctx<'a>, y: Point, y1: Point, y2: Point) -> Targets<'a> {
    let (q, x) = (ctx.q, ctx.x);
    let low = line(-1, y2);
    let mut t = Targets::new(ctx.c);
    t.push(vec![line(-2, ctx.mx(y2)), line(0, y), line(0, y1)], 1);
    if y == y1 {
        if y != ctx.add(y2, x) {
            t.push(vec![line(0, y), line(-1, ctx.mx(y)), low], q * q + q);
        } else {
            t.push(vec![unip(2, -2, y2), line(0, y)], q * q - 1);
            t.push(vec![low, low, line(0, y)], q + 1);
        }
    } else {
        t.push(vec![low, stable(2, -1, ctx.mx(ctx.add(y, y1)))], q * q - q);
        for (a, b) in [(y, y1), (y1, y)] {
            if ctx.mx(a) == y2 {
                t.push(vec![unip(2, -2, y2), line(0, b)], q - 1);
                t.push(vec![low, low, line(0, b)], 1);
            } else {
                t.push(vec![low, line(-1, ctx.mx(a)), line(0, b)], q);
            }
        }
    }
    t
}

/// L_y + L_{y1} in degree 0 plus a line of degree d, |d| >= 2.
fn pair_plus_far_line<'a>(ctx: &Ctx<'a>, y: Point, y1: Point, d: i32, y2: Point) -> Targets<'a> {
    let q = ctx.q;
    let far = line(d, y2);
    let mut t = Targets::new(ctx.c);
    let up = d >= 2;
    t.push(vec![line(0, y), line(0, y1), line(d - 1, ctx.mx(y2))], if up { q * q } else { 1 });
    if y != y1 {
        let w = if up { 1 } else { q };
        t.push(vec![line(-1, ctx.mx(y)), line(0, y1), far], w);
        t.push(vec![line(0, y), line(-1, ctx.mx(y1)), far], w);
        t.push(vec![stable(2, -1, ctx.mx(ctx.add(y, y1))), far], if up { q - 1 } else { q * q - q });
    } else {
        t.push(vec![line(-1, ctx.mx(y)), line(0, y), far], if up { q + 1 } else { q * q + q });
    }
    t
}

/// L_y in degree 0, L_{y1} in degree 1 and a line of degree d, with d >= 2
/// or d <= -1.
fn staircase<'a>(ctx: &Ctx<'a>, y: Point, y1: Point, d: i32, y2: Point) -> Targets<'a> {
    let (q, x) = (ctx.q, ctx.x);
    let e1 = y == ctx.mx(y1);
    let e2 = y1 == ctx.mx(y2);
    let f = y == ctx.add(y2, x);
    let l_y = line(0, y);
    let l_y1 = line(1, y1);
    let l_d = line(d, y2);
    let a = vec![l_y, l_y1, line(d - 1, ctx.mx(y2))];
    let b = vec![line(-1, ctx.mx(y)), l_y1, l_d];
    let c = vec![l_y, line(0, ctx.mx(y1)), l_d];
    let dd = vec![unip(2, 0, y), l_d];
    let mut t = Targets::new(ctx.c);
    if d >= 2 {
        if d == 2 && e2 {
            t.push(a, q);
            t.push(vec![l_y, unip(2, 2, y1)], q * q - q);
        } else {
            t.push(a, q * q);
        }
        t.push(b, 1);
        if e1 {
            t.push(c, 1);
            t.push(dd, q - 1);
        } else {
            t.push(c, q);
        }
    } else {
        t.push(a, 1);
        if d == -1 && f {
            t.push(b, 1);
            t.push(vec![unip(2, -2, y2), l_y1], q - 1);
        } else {
            t.push(b, q);
        }
        if e1 {
            t.push(c, q);
            t.push(dd, q * q - q);
        } else {
            t.push(c, q * q);
        }
    }
    t
}

/// Three lines with pairwise degree gaps at least 2, ascending.
fn spread<'a>(ctx: &Ctx<'a>, ls: &[(i32, Point)]) -> Targets<'a> {
    let q = ctx.q;
    let mut t = Targets::new(ctx.c);
    for (i, w) in [1, q, q * q].into_iter().enumerate() {
        let v = ls
            .iter()
            .enumerate()
            .map(|(j, &(d, y))| if i == j { line(d - 1, ctx.mx(y)) } else { line(d, y) })
            .collect();
        t.push(v, w);
    }
    t
}
