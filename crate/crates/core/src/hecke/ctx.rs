//! Shared helpers for the closed formulas: class arithmetic relative to the
//! Hecke place and effective divisors of small degree as bundles.

use crate::bundle::Label;
use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};
use crate::places::Place;

pub(crate) struct Ctx<'a> {
    pub c: &'a Curve,
    pub q: u64,
    /// Class of the Hecke place.
    pub x: Point,
    pub zero: Point,
}

impl<'a> Ctx<'a> {
    pub fn new(c: &'a Curve, place: &Place) -> Result<Ctx<'a>> {
        if place.degree != 1 {
            return Err(HeckeError::Domain(format!("{place} is not a degree-one place")));
        }
        c.place_info(place)?;
        Ok(Ctx { c, q: c.q(), x: place.rep, zero: c.zero(1) })
    }

    pub fn add(&self, a: Point, b: Point) -> Point {
        self.c.add(a, b)
    }

    pub fn sub(&self, a: Point, b: Point) -> Point {
        self.c.sub(a, b)
    }

    pub fn mul(&self, a: Point, k: i64) -> Point {
        self.c.mul(a, k)
    }

    /// a - x.
    pub fn mx(&self, a: Point) -> Point {
        self.c.sub(a, self.x)
    }

    pub fn points(&self) -> Result<Vec<Point>> {
        Ok(self.c.points(1)?.to_vec())
    }

    /// Effective divisors of degree 2 and class `t`, as degree-0 rank-2
    /// bundles: two distinct points, a double point, or a degree-2 place.
    pub fn eff2(&self, t: Point) -> Result<Vec<Vec<Label>>> {
        let pts = self.points()?;
        let mut out = Vec::new();
        for (i, &a) in pts.iter().enumerate() {
            for &b in &pts[i + 1..] {
                if self.add(a, b) == t {
                    out.push(vec![line(0, a), line(0, b)]);
                }
            }
            if self.mul(a, 2) == t {
                out.push(vec![Label::unipotent(2, 0, a)]);
            }
        }
        for info in self.c.places(2)?.iter() {
            if info.class == t {
                out.push(vec![Label::trace(0, info.place)]);
            }
        }
        Ok(out)
    }

    /// Effective divisors of degree 3 and class `t`, as degree-0 rank-3
    /// bundles.
    pub fn eff3(&self, t: Point) -> Result<Vec<Vec<Label>>> {
        let pts = self.points()?;
        let mut out = Vec::new();
        for (i, &a) in pts.iter().enumerate() {
            for (j, &b) in pts.iter().enumerate().skip(i + 1) {
                for &c in &pts[j + 1..] {
                    if self.add(self.add(a, b), c) == t {
                        out.push(vec![line(0, a), line(0, b), line(0, c)]);
                    }
                }
            }
            for &b in pts.iter() {
                if a != b && self.add(a, self.mul(b, 2)) == t {
                    out.push(vec![line(0, a), Label::unipotent(2, 0, b)]);
                }
            }
            if self.mul(a, 3) == t {
                out.push(vec![Label::unipotent(3, 0, a)]);
            }
            for info in self.c.places(2)?.iter() {
                if self.add(a, info.class) == t {
                    out.push(vec![line(0, a), Label::trace(0, info.place)]);
                }
            }
        }
        for info in self.c.places(3)?.iter() {
            if info.class == t {
                out.push(vec![Label::trace(0, info.place)]);
            }
        }
        Ok(out)
    }
}

pub(crate) fn line(d: i32, y: Point) -> Label {
    Label::line(d, y)
}

pub(crate) fn stable(n: u32, d: i32, y: Point) -> Label {
    Label::stable(n, d, y)
}

pub(crate) fn unip(n: u32, d: i32, y: Point) -> Label {
    Label::unipotent(n, d, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_divisor_counts() {
        for name in Curve::NAMED {
            let c = Curve::named(name).unwrap();
            let pts = c.points(1).unwrap();
            let ctx = Ctx::new(&c, &Place::rational(pts[0])).unwrap();
            let q = c.q() as usize;
            for &t in pts.iter() {
                assert_eq!(ctx.eff2(t).unwrap().len(), q + 1, "{name}");
                assert_eq!(ctx.eff3(t).unwrap().len(), q * q + q + 1, "{name}");
            }
        }
    }
}
