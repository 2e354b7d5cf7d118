//! Atiyah labels of indecomposable bundles and isomorphism classes of
//! bundles of rank at most 3 as sorted multisets of labels.
//!
//! A label E[(y,l)]^(n,d) has determinant class `l * class(y)` in Pic^0(X):
//! lines carry their class, gcd-one labels carry the determinant class,
//! `l = n` labels are F_n tensor a line of class y, and traces store the
//! place of a point y~ of X_n, meaning the pushforward of O(y~ - x0~)
//! twisted by a multiple of x0.

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};
use crate::places::{gcd, Place};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub n: u32,
    pub d: i32,
    pub y: Place,
    pub l: u32,
}

/// Shape of a label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Line,
    /// gcd(n, d) = 1.
    Stable,
    /// F_n tensor a line bundle, l = n.
    Unipotent,
    /// Pushforward from X_n, |y| = n.
    Trace,
}

fn gcd_i(n: u32, d: i32) -> u32 {
    gcd(n, d.unsigned_abs())
}

impl Label {
    pub fn line(d: i32, class: Point) -> Label {
        Label { n: 1, d, y: Place::rational(class), l: 1 }
    }

    pub fn stable(n: u32, d: i32, class: Point) -> Label {
        debug_assert_eq!(gcd_i(n, d), 1);
        Label { n, d, y: Place::rational(class), l: 1 }
    }

    /// F_n tensor L where L has degree d/n and class `class`.
    pub fn unipotent(n: u32, d: i32, class: Point) -> Label {
        debug_assert_eq!(d.rem_euclid(n as i32), 0);
        Label { n, d, y: Place::rational(class), l: n }
    }

    pub fn trace(d: i32, y: Place) -> Label {
        debug_assert_eq!(d.rem_euclid(y.degree as i32), 0);
        Label { n: y.degree, d, y, l: 1 }
    }

    /// Checked constructor.
    pub fn new(curve: &Curve, n: u32, d: i32, y: Place, l: u32) -> Result<Label> {
        let g = gcd_i(n, d);
        let shape_ok = matches!(
            (n, y.degree, l),
            (1, 1, 1) | (2, 1, 1) | (2, 1, 2) | (2, 2, 1) | (3, 1, 1) | (3, 1, 3) | (3, 3, 1)
        );
        if !shape_ok || l * y.degree != g {
            return Err(HeckeError::Config(format!(
                "illegal label shape n={n} d={d} |y|={} l={l}",
                y.degree
            )));
        }
        curve.place_info(&y)?;
        Ok(Label { n, d, y, l })
    }

    pub fn kind(&self) -> Kind {
        match (self.n, self.y.degree, self.l) {
            (1, _, _) => Kind::Line,
            (_, 1, 1) => Kind::Stable,
            (_, 1, _) => Kind::Unipotent,
            _ => Kind::Trace,
        }
    }

    pub fn is_line(&self) -> bool {
        self.n == 1
    }

    /// The level-1 class carried by a non-trace label.
    pub fn class(&self) -> Point {
        debug_assert!(self.y.degree == 1);
        self.y.rep
    }

    /// Determinant class l * class(y).
    pub fn det_class(&self, curve: &Curve) -> Point {
        let c = curve.place_class(&self.y).expect("valid place");
        curve.mul(c, self.l as i64)
    }

    /// Tensor with the line bundle of degree k and class c.
    pub fn twist(&self, curve: &Curve, k: i32, c: Point) -> Label {
        let d = self.d + self.n as i32 * k;
        match self.kind() {
            Kind::Line | Kind::Unipotent => Label { d, y: Place::rational(curve.add(self.y.rep, c)), ..*self },
            Kind::Stable => {
                Label { d, y: Place::rational(curve.add(self.y.rep, curve.mul(c, self.n as i64))), ..*self }
            }
            Kind::Trace => {
                let lifted = curve.embed(c, self.y.degree).expect("embedding");
                let y = curve.place_of_point(curve.add(self.y.rep, lifted)).expect("place");
                Label { d, y, ..*self }
            }
        }
    }

    pub fn dual(&self, curve: &Curve) -> Label {
        Label { d: -self.d, y: curve.neg_place(&self.y), ..*self }
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        (Reverse(self.n), Reverse(self.d), self.y, self.l).cmp(&(Reverse(other.n), Reverse(other.d), other.y, other.l))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E[({},{})]^({},{})", self.y, self.l, self.n, self.d)
    }
}

impl FromStr for Label {
    type Err = HeckeError;

    /// Parses the text form without validating against a curve.
    fn from_str(s: &str) -> Result<Label> {
        let bad = || HeckeError::Config(format!("malformed label '{s}'"));
        let s = s.trim();
        let inner = s.strip_prefix("E[(").ok_or_else(bad)?;
        let (yl, rest) = inner.split_once(")]^(").ok_or_else(bad)?;
        let (y, l) = yl.rsplit_once(',').ok_or_else(bad)?;
        let nd = rest.strip_suffix(')').ok_or_else(bad)?;
        let (n, d) = nd.split_once(',').ok_or_else(bad)?;
        let y: Place = y.parse()?;
        let l: u32 = l.parse().map_err(|_| bad())?;
        let n: u32 = n.parse().map_err(|_| bad())?;
        let d: i32 = d.parse().map_err(|_| bad())?;
        if l * y.degree != gcd_i(n, d) {
            return Err(bad());
        }
        Ok(Label { n, d, y, l })
    }
}

/// A bundle as a sorted multiset of indecomposable summands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BundleClass {
    summands: Vec<Label>,
}

impl BundleClass {
    pub fn new(mut summands: Vec<Label>) -> BundleClass {
        summands.sort();
        BundleClass { summands }
    }

    pub fn summands(&self) -> &[Label] {
        &self.summands
    }

    pub fn rank(&self) -> u32 {
        self.summands.iter().map(|s| s.n).sum()
    }

    pub fn degree(&self) -> i32 {
        self.summands.iter().map(|s| s.d).sum()
    }

    pub fn is_indecomposable(&self) -> bool {
        self.summands.len() == 1
    }

    pub fn all_lines(&self) -> bool {
        self.summands.iter().all(Label::is_line)
    }

    pub fn det_class(&self, curve: &Curve) -> Point {
        self.summands.iter().fold(curve.zero(1), |acc, s| curve.add(acc, s.det_class(curve)))
    }

    pub fn twist(&self, curve: &Curve, k: i32, c: Point) -> BundleClass {
        BundleClass::new(self.summands.iter().map(|s| s.twist(curve, k, c)).collect())
    }

    pub fn dual(&self, curve: &Curve) -> BundleClass {
        BundleClass::new(self.summands.iter().map(|s| s.dual(curve)).collect())
    }

    /// Least member of the twist orbit whose degree lies in [0, rank).
    pub fn pbun_canonical(&self, curve: &Curve) -> BundleClass {
        let n = self.rank() as i32;
        let k = -self.degree().div_euclid(n);
        let pts = curve.points(1).expect("rational points");
        pts.iter().map(|&c| self.twist(curve, k, c)).min().expect("nonempty Pic")
    }

    /// max over line summands of rank * deg L - deg E.
    pub fn delta1(&self) -> Result<i32> {
        if !self.all_lines() {
            return Err(HeckeError::Domain("delta1 is only defined here for sums of line bundles".into()));
        }
        let n = self.rank() as i32;
        Ok(self.summands.iter().map(|s| n * s.d).max().unwrap() - self.degree())
    }

    /// For a sum of three lines: max over rank-2 subsums of 3 deg F - 2 deg E.
    pub fn delta2(&self) -> Result<i32> {
        if !self.all_lines() || self.rank() != 3 {
            return Err(HeckeError::Domain("delta2 is only defined here for sums of three lines".into()));
        }
        let top = self.summands[0].d + self.summands[1].d;
        Ok(3 * top - 2 * self.degree())
    }
}

impl fmt::Display for BundleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for BundleClass {
    type Err = HeckeError;

    fn from_str(s: &str) -> Result<BundleClass> {
        let labels = s.split(" + ").map(str::parse).collect::<Result<Vec<Label>>>()?;
        if labels.is_empty() {
            return Err(HeckeError::Config("empty bundle".into()));
        }
        Ok(BundleClass::new(labels))
    }
}

/// Indecomposable bundles of rank n and degree d.
pub fn indecomposables(curve: &Curve, n: u32, d: i32) -> Result<Vec<Label>> {
    if !(1..=3).contains(&n) {
        return Err(HeckeError::Domain(format!("rank {n} is not supported")));
    }
    let g = gcd_i(n, d);
    let mut out = Vec::new();
    for info in curve.places(1)?.iter() {
        let c = info.place.rep;
        out.push(if n == 1 {
            Label::line(d, c)
        } else if g == 1 {
            Label::stable(n, d, c)
        } else {
            Label::unipotent(n, d, c)
        });
    }
    if n > 1 && g == n {
        for info in curve.places(n)?.iter() {
            out.push(Label::trace(d, info.place));
        }
    }
    out.sort();
    Ok(out)
}

/// All bundles of the given rank and degree whose summand degrees lie in
/// `[lo, hi]`.
pub fn enumerate_bundles(curve: &Curve, rank: u32, degree: i32, lo: i32, hi: i32) -> Result<Vec<BundleClass>> {
    if !(1..=3).contains(&rank) {
        return Err(HeckeError::Domain(format!("rank {rank} is not supported")));
    }
    let in_range = |d: i32| lo <= d && d <= hi;
    let mut set = BTreeSet::new();
    if in_range(degree) {
        for l in indecomposables(curve, rank, degree)? {
            set.insert(BundleClass::new(vec![l]));
        }
    }
    let lines = |d: i32| indecomposables(curve, 1, d);
    if rank == 2 {
        for a in lo..=hi {
            let b = degree - a;
            if b < a || !in_range(b) {
                continue;
            }
            for l1 in lines(a)? {
                for l2 in lines(b)? {
                    set.insert(BundleClass::new(vec![l1, l2]));
                }
            }
        }
    }
    if rank == 3 {
        for a in lo..=hi {
            let b = degree - a;
            if !in_range(b) {
                continue;
            }
            for m in indecomposables(curve, 2, a)? {
                for l in lines(b)? {
                    set.insert(BundleClass::new(vec![m, l]));
                }
            }
        }
        for a in lo..=hi {
            for b in a..=hi {
                let c = degree - a - b;
                if c < b || !in_range(c) {
                    continue;
                }
                for l1 in lines(a)? {
                    for l2 in lines(b)? {
                        for l3 in lines(c)? {
                            set.insert(BundleClass::new(vec![l1, l2, l3]));
                        }
                    }
                }
            }
        }
    }
    Ok(set.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e2_rank3_indecomposables() {
        let c = Curve::named("E2").unwrap();
        assert_eq!(indecomposables(&c, 3, 0).unwrap().len(), 5);
        assert_eq!(indecomposables(&c, 3, 1).unwrap().len(), 1);
        assert_eq!(indecomposables(&c, 1, 0).unwrap().len(), 1);
    }

    #[test]
    fn text_round_trip() {
        let c = Curve::named("E3a").unwrap();
        for d in -2..=2 {
            for e in enumerate_bundles(&c, 3, d, -2, 2).unwrap() {
                let s = e.to_string();
                assert_eq!(s.parse::<BundleClass>().unwrap(), e, "{s}");
            }
        }
    }

    #[test]
    fn dual_is_involutive_and_commutes_with_twist() {
        for name in ["E2", "E2a", "E3a"] {
            let c = Curve::named(name).unwrap();
            let pts = c.points(1).unwrap();
            for d in -1..=2 {
                for e in enumerate_bundles(&c, 3, d, -2, 2).unwrap() {
                    assert_eq!(e.dual(&c).dual(&c), e);
                    for &p in pts.iter() {
                        let lhs = e.twist(&c, 1, p).dual(&c);
                        let rhs = e.dual(&c).twist(&c, -1, c.neg(p));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn det_shifts_under_twist() {
        let c = Curve::named("E2b").unwrap();
        let pts = c.points(1).unwrap();
        for e in enumerate_bundles(&c, 3, 0, -1, 1).unwrap() {
            for &p in pts.iter() {
                let t = e.twist(&c, 2, p);
                assert_eq!(t.det_class(&c), c.add(e.det_class(&c), c.mul(p, 3)));
                assert_eq!(t.degree(), e.degree() + 6);
            }
        }
    }

    #[test]
    fn unipotent_twist() {
        let c = Curve::named("E2a").unwrap();
        let pts = c.points(1).unwrap();
        let (y, z) = (pts[1], pts[2]);
        let e = Label::unipotent(2, 0, y);
        assert_eq!(e.twist(&c, 1, z), Label::unipotent(2, 2, c.add(y, z)));
    }

    #[test]
    fn pbun_identifies_twists() {
        let c = Curve::named("E2").unwrap();
        let z = c.zero(1);
        let o3 = BundleClass::new(vec![Label::line(0, z); 3]);
        let o3x = BundleClass::new(vec![Label::line(1, z); 3]);
        assert_eq!(o3.pbun_canonical(&c), o3x.pbun_canonical(&c));
    }

    #[test]
    fn delta_values() {
        let c = Curve::named("E2").unwrap();
        let z = c.zero(1);
        let e = BundleClass::new(vec![Label::line(0, z), Label::line(0, z), Label::line(2, z)]);
        assert_eq!(e.delta1().unwrap(), 4);
        let f = BundleClass::new(vec![Label::line(0, z), Label::line(1, z)]);
        assert_eq!(f.delta1().unwrap(), 1);
        assert!(BundleClass::new(vec![Label::unipotent(3, 0, z)]).delta1().is_err());
    }

    #[test]
    fn illegal_shapes_rejected() {
        let c = Curve::named("E2").unwrap();
        let y = Place::rational(c.zero(1));
        assert!(Label::new(&c, 2, 1, y, 2).is_err());
        assert!(Label::new(&c, 3, 3, y, 1).is_err());
        assert!(Label::new(&c, 3, 3, y, 3).is_ok());
        assert!("E[(1:inf,2)]^(2,1)".parse::<Label>().is_err());
    }
}
