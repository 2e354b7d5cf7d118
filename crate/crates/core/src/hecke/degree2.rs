//! Hecke operators at a place y of degree two: the even component of the
//! rank-2 graph on curves with a single rational point, the neighbourhood
//! of L+L+L in rank 3, and the complete list of edges into
//! L(-2)_x + L_{x'} + L_{x'}.

use std::collections::BTreeSet;

use super::ctx::{line, unip};
use super::{Neighbor, Targets};
use crate::bundle::{BundleClass, Kind, Label};
use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};
use crate::places::Place;

fn degree_two(curve: &Curve, y: &Place) -> Result<()> {
    if y.degree != 2 {
        return Err(HeckeError::Domain(format!("{y} is not a degree-two place")));
    }
    curve.place_info(y)?;
    Ok(())
}

/// Level-2 data of the Hecke place: a point z over y and its conjugate.
struct Lifts {
    z: [Point; 2],
}

impl Lifts {
    fn of(curve: &Curve, y: &Place) -> Result<Lifts> {
        let l = curve.lifts(y, 2)?;
        Ok(Lifts { z: [l[0], l[1]] })
    }
}

/// True if some lift of `a` equals k times some lift of `b` in X(F_{q^2}).
fn multiple_of(curve: &Curve, a: &Place, k: i64, b: &Place) -> Result<bool> {
    let la = curve.lifts(a, 2)?;
    let lb = curve.lifts(b, 2)?;
    Ok(la.iter().any(|&p| lb.iter().any(|&r| curve.mul(r, k) == p)))
}

/// V_{y,1} on the even-degree rank-2 bundles of a curve with N_1 = 1.
pub fn even_component(curve: &Curve, e: &BundleClass, y: &Place) -> Result<Vec<Neighbor>> {
    degree_two(curve, y)?;
    if curve.n1() != 1 {
        return Err(HeckeError::Domain(format!(
            "the even component is implemented for curves with one rational point; {} has {}",
            curve.name(),
            curve.n1()
        )));
    }
    if e.rank() != 2 || e.degree() % 2 != 0 {
        return Err(HeckeError::Domain(format!("{e} is not an even-degree rank-2 bundle")));
    }
    let q = curve.q();
    let o = curve.zero(1);
    let others: Vec<Place> =
        curve.places(2)?.iter().map(|i| i.place).filter(|p| p != y).collect();
    let mut t = Targets::new(curve);
    let s = e.summands();
    if s.len() == 2 {
        let (d1, d2) = (s[1].d, s[0].d);
        match d2 - d1 {
            0 => {
                t.push(vec![line(d1 - 2, o), line(d1, o)], q + 1);
                t.push(vec![Label::trace(2 * d1 - 2, *y)], q * q - q);
            }
            2 => {
                t.push(vec![line(d1 - 2, o), line(d2, o)], 1);
                t.push(vec![line(d1, o), line(d1, o)], q);
                t.push(vec![unip(2, 2 * d1, o)], q * q - q);
            }
            _ => {
                t.push(vec![line(d1 - 2, o), line(d2, o)], 1);
                t.push(vec![line(d1, o), line(d2 - 2, o)], q * q);
            }
        }
    } else {
        let m = s[0];
        let k = m.d / 2;
        match m.kind() {
            Kind::Unipotent => {
                t.push(vec![line(k - 2, o), line(k, o)], 1);
                t.push(vec![unip(2, m.d - 2, o)], q);
                for w in &others {
                    t.push(vec![Label::trace(m.d - 2, *w)], q);
                }
            }
            Kind::Trace if m.y == *y => {
                let lz = Lifts::of(curve, y)?;
                let m1 = if curve.mul(lz.z[0], 3) == curve.zero(2) { 1 } else { q + 1 };
                t.push(vec![line(k - 1, o), line(k - 1, o)], 1);
                t.push(vec![Label::trace(m.d - 2, *y)], m1);
                for w in &others {
                    let m2 = if multiple_of(curve, w, 2, y)? { 1 } else { q + 1 };
                    t.push(vec![Label::trace(m.d - 2, *w)], m2);
                }
            }
            Kind::Trace => {
                let w = m.y;
                let lz = Lifts::of(curve, y)?;
                let lw = curve.lifts(&w, 2)?;
                let mut third = BTreeSet::new();
                for &pw in &lw {
                    let v = curve.add(lz.z[0], pw);
                    let pl = curve.place_of_point(v)?;
                    if pl.degree == 2 && pl != *y && pl != w {
                        third.insert(pl);
                    }
                }
                for v in third {
                    t.push(vec![Label::trace(m.d - 2, v)], 1);
                }
                let m1 = if multiple_of(curve, y, 2, &w)? { 1 } else { q + 1 };
                let m2 = if multiple_of(curve, &w, 2, y)? { 1 } else { q + 1 };
                t.push(vec![Label::trace(m.d - 2, w)], m1);
                t.push(vec![Label::trace(m.d - 2, *y)], m2);
                t.push(vec![unip(2, m.d - 2, o)], q + 1);
            }
            _ => return Err(HeckeError::Domain(format!("{e} is not an even-degree rank-2 bundle"))),
        }
    }
    t.finish(e, 2, curve.place_class(y)?)
}

/// V_{y,1}(L+L+L) for a degree-two place y.
pub fn o3_neighbors(curve: &Curve, e: &BundleClass, y: &Place) -> Result<Vec<Neighbor>> {
    degree_two(curve, y)?;
    let s = e.summands();
    if s.len() != 3 || !e.all_lines() || s[0] != s[2] {
        return Err(HeckeError::Domain(format!(
            "rank 3 at a degree-two place is only known at L+L+L, not at {e}"
        )));
    }
    let (d, c) = (s[0].d, s[0].class());
    let q = curve.q();
    let o = curve.zero(1);
    let cy = curve.place_class(y)?;
    let mut t = Targets::new(curve);
    t.push(vec![line(-2, curve.neg(cy)), line(0, o), line(0, o)], q * q + q + 1);
    t.push(vec![Label::trace(-2, curve.neg_place(y)), line(0, o)], q * q * q * q - q);
    t.twisted(d, c).finish(e, 2, cy)
}

/// All sources E with m_{y,1}(E, E') > 0 for E' = L(-2)_x + L_{x'} + L_{x'},
/// with their multiplicities.
pub fn reverse_edges_idl2(curve: &Curve, target: &BundleClass, y: &Place) -> Result<Vec<Neighbor>> {
    degree_two(curve, y)?;
    let s = target.summands();
    let shape = s.len() == 3 && target.all_lines() && s[0] == s[1] && s[0].d == 0 && s[2].d == -2;
    if !shape {
        return Err(HeckeError::Domain(format!("{target} is not of the shape L(-2) + L' + L'")));
    }
    let (x, x1) = (s[2].class(), s[0].class());
    let q = curve.q();
    let cy = curve.place_class(y)?;
    let l1 = line(0, x1);
    let mut out = Vec::new();
    let mut push = |v: Vec<Label>, w: u64| out.push(Neighbor { target: BundleClass::new(v), weight: w });
    let xy = curve.add(x, cy);
    if xy != x1 {
        push(vec![line(0, xy), l1, l1], 1);
    } else {
        push(vec![l1, unip(2, 0, x1)], 1);
        push(vec![l1, l1, l1], q * q + q + 1);
    }
    push(vec![line(-2, x), l1, line(2, curve.add(x1, cy))], q * q * q);
    let shifted = curve.add(y.rep, curve.embed(x1, 2)?);
    push(vec![line(-2, x), Label::trace(2, curve.place_of_point(shifted)?)], q * q);
    out.sort();
    let det = curve.add(target.det_class(curve), cy);
    for n in &out {
        if n.target.degree() != target.degree() + 2 || n.target.det_class(curve) != det {
            return Err(HeckeError::Invariant(format!("source {} of {target} has wrong degree or determinant", n.target)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn o3_weights() {
        for name in Curve::NAMED {
            let c = Curve::named(name).unwrap();
            let q = c.q();
            let y = c.places(2).unwrap()[0].place;
            let o = c.zero(1);
            let e = BundleClass::new(vec![line(0, o); 3]);
            let v = o3_neighbors(&c, &e, &y).unwrap();
            let w: BTreeSet<u64> = v.iter().map(|n| n.weight).collect();
            assert_eq!(w, BTreeSet::from([q * q + q + 1, q * q * q * q - q]), "{name}");
        }
    }

    #[test]
    fn even_component_sums() {
        for name in ["E2", "E3", "E4"] {
            let c = Curve::named(name).unwrap();
            let q = c.q();
            for info in c.places(2).unwrap().iter() {
                for d in [-4, -2, 0, 2] {
                    for e in crate::bundle::enumerate_bundles(&c, 2, d, -4, 4).unwrap() {
                        let v = even_component(&c, &e, &info.place).unwrap();
                        assert_eq!(v.iter().map(|n| n.weight).sum::<u64>(), q * q + 1, "{name} {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn even_component_needs_one_point_curve() {
        let c = Curve::named("E2a").unwrap();
        let y = c.places(2).unwrap()[0].place;
        let o = c.zero(1);
        let e = BundleClass::new(vec![line(0, o), line(0, o)]);
        assert!(matches!(even_component(&c, &e, &y), Err(HeckeError::Domain(_))));
    }
}
