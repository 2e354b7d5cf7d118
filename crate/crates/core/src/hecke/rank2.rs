//! V_{x,1} and V_{x,2} on rank-2 bundles for a degree-one place x.

use super::ctx::{line, stable, unip, Ctx};
use super::{Neighbor, Targets};
use crate::bundle::{BundleClass, Kind};
use crate::curve::Point;
use crate::error::{HeckeError, Result};
use crate::places::Place;
use crate::Curve;

pub fn phi1(curve: &Curve, e: &BundleClass, place: &Place) -> Result<Vec<Neighbor>> {
    let ctx = Ctx::new(curve, place)?;
    if e.rank() != 2 {
        return Err(HeckeError::Domain(format!("{e} is not of rank 2")));
    }
    let q = ctx.q;
    let s = e.summands();
    let mut t = Targets::new(curve);
    let k;
    if s.len() == 1 {
        let m = s[0];
        let r = m.d.rem_euclid(2);
        k = -(m.d - r) / 2;
        let m0 = m.twist(curve, k, ctx.zero);
        match m0.kind() {
            Kind::Unipotent => {
                let y = m0.class();
                t.push(vec![stable(2, -1, ctx.mx(ctx.mul(y, 2)))], q);
                t.push(vec![line(-1, ctx.mx(y)), line(0, y)], 1);
            }
            Kind::Trace => {
                let c = curve.place_class(&m0.y)?;
                t.push(vec![stable(2, -1, ctx.mx(c))], q + 1);
            }
            Kind::Stable => {
                for dv in ctx.eff2(ctx.mx(m0.class()))? {
                    t.push(dv, 1);
                }
            }
            Kind::Line => unreachable!("rank-2 label"),
        }
    } else {
        // summands are sorted by descending degree
        let (hi, lo) = (s[0], s[1]);
        k = -lo.d;
        let (y, y1, d) = (lo.class(), hi.class(), hi.d - lo.d);
        pair(&ctx, &mut t, y, y1, d);
    }
    t.twisted(-k, ctx.zero).finish(e, 1, ctx.x)
}

/// L_y in degree 0 plus L_{y1} in degree d >= 0.
fn pair(ctx: &Ctx<'_>, t: &mut Targets<'_>, y: Point, y1: Point, d: i32) {
    let q = ctx.q;
    let drop = line(-1, ctx.mx(y));
    let top = line(d, y1);
    match d {
        0 if y != y1 => {
            t.push(vec![drop, top], 1);
            t.push(vec![line(0, y), line(-1, ctx.mx(y1))], 1);
            t.push(vec![stable(2, -1, ctx.mx(ctx.add(y, y1)))], q - 1);
        }
        0 => t.push(vec![drop, line(0, y)], q + 1),
        1 => {
            t.push(vec![drop, top], 1);
            if y != ctx.mx(y1) {
                t.push(vec![line(0, y), line(0, ctx.mx(y1))], q);
            } else {
                t.push(vec![line(0, y), line(0, y)], 1);
                t.push(vec![unip(2, 0, y)], q - 1);
            }
        }
        _ => {
            t.push(vec![drop, top], 1);
            t.push(vec![line(0, y), line(d - 1, ctx.mx(y1))], q);
        }
    }
}

/// V_{x,2}(M) = {M(-x)} with weight 1.
pub fn phi2(curve: &Curve, e: &BundleClass, place: &Place) -> Result<Vec<Neighbor>> {
    let ctx = Ctx::new(curve, place)?;
    let mut t = Targets::new(curve);
    t.push(e.summands().to_vec(), 1);
    t.twisted(-1, curve.neg(ctx.x)).finish(e, 2, curve.mul(ctx.x, 2))
}
