//! Closed points of X as Frobenius orbits and their classes in Pic^0(X).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};

/// A closed point of degree `degree`, represented by the least point of its
/// Frobenius orbit in X(F_{q^degree}).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Place {
    pub degree: u32,
    pub rep: Point,
}

impl Place {
    /// The degree-one place of a rational point.
    pub fn rational(p: Point) -> Place {
        debug_assert_eq!(p.level, 1);
        Place { degree: 1, rep: p }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.degree, self.rep)
    }
}

impl FromStr for Place {
    type Err = HeckeError;

    /// Parses `deg:inf` or `deg:x.y`.
    fn from_str(s: &str) -> Result<Place> {
        let bad = || HeckeError::Config(format!("malformed place '{s}'"));
        let (d, rest) = s.split_once(':').ok_or_else(bad)?;
        let degree: u32 = d.trim().parse().map_err(|_| bad())?;
        let rep = if rest == "inf" {
            Point::infinity(degree)
        } else {
            let (x, y) = rest.split_once('.').ok_or_else(bad)?;
            Point::affine(degree, x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?)
        };
        Ok(Place { degree, rep })
    }
}

#[derive(Clone, Debug)]
pub struct PlaceInfo {
    pub place: Place,
    /// P, Fr P, ..., Fr^{d-1} P.
    pub orbit: Vec<Point>,
    /// Class of y - |y| x0 as a point of X(F_q).
    pub class: Point,
}

#[derive(Debug, Default)]
pub(crate) struct PlaceCache {
    by_degree: RwLock<HashMap<u32, Arc<Vec<PlaceInfo>>>>,
}

/// A linear equation `sum c_i [p_i] = target` over tuples of places with
/// prescribed degrees.
///
/// At level 1 the classes `[p_i]` are the level-1 place classes. At level
/// `n > 1` the equation must hold for some choice of points of X(F_{q^n})
/// lying over the places.
#[derive(Clone, Debug)]
pub struct ClassPattern {
    pub degrees: Vec<u32>,
    pub coeffs: Vec<i64>,
    pub target: Point,
    pub distinct: bool,
    /// Keep positions with equal degree and coefficient distinguishable.
    pub ordered: bool,
}

impl ClassPattern {
    pub fn new(degrees: &[u32], coeffs: &[i64], target: Point) -> ClassPattern {
        ClassPattern { degrees: degrees.to_vec(), coeffs: coeffs.to_vec(), target, distinct: false, ordered: false }
    }

    pub fn distinct(mut self) -> ClassPattern {
        self.distinct = true;
        self
    }

    pub fn ordered(mut self) -> ClassPattern {
        self.ordered = true;
        self
    }
}

impl Curve {
    /// All places of exact degree `d`, sorted by representative.
    pub fn places(&self, d: u32) -> Result<Arc<Vec<PlaceInfo>>> {
        if let Some(v) = self.places.by_degree.read().unwrap().get(&d) {
            return Ok(v.clone());
        }
        let pts = self.points(d)?;
        let mut out = Vec::new();
        for &p in pts.iter() {
            let orbit = self.orbit(p);
            if orbit.len() as u32 != d || orbit.iter().any(|&o| o < p) {
                continue;
            }
            let class = self.norm(p, 1)?;
            out.push(PlaceInfo { place: Place { degree: d, rep: p }, orbit, class });
        }
        let out = Arc::new(out);
        let mut w = self.places.by_degree.write().unwrap();
        Ok(w.entry(d).or_insert(out).clone())
    }

    /// Frobenius orbit of a point, starting at the point itself.
    pub fn orbit(&self, p: Point) -> Vec<Point> {
        let mut orbit = vec![p];
        let mut cur = self.frobenius(p);
        while cur != p {
            orbit.push(cur);
            cur = self.frobenius(cur);
        }
        orbit
    }

    pub fn place_info(&self, y: &Place) -> Result<PlaceInfo> {
        let list = self.places(y.degree)?;
        list.binary_search_by(|i| i.place.cmp(y))
            .map(|i| list[i].clone())
            .map_err(|_| HeckeError::Config(format!("{y} is not a place of {}", self.name())))
    }

    /// Class of y - |y| x0 in Pic^0(X) = X(F_q).
    pub fn place_class(&self, y: &Place) -> Result<Point> {
        if y.degree == 1 {
            return Ok(y.rep);
        }
        let list = self.places(y.degree)?;
        list.binary_search_by(|i| i.place.cmp(y))
            .map(|i| list[i].class)
            .map_err(|_| HeckeError::Config(format!("{y} is not a place of {}", self.name())))
    }

    /// The place under a point of X(F_{q^n}).
    pub fn place_of_point(&self, p: Point) -> Result<Place> {
        let d = self.orbit(p).len() as u32;
        let low = self
            .descend(p, d)?
            .ok_or_else(|| HeckeError::Invariant("orbit size does not match field of definition".into()))?;
        let rep = self.orbit(low).into_iter().min().expect("nonempty orbit");
        Ok(Place { degree: d, rep })
    }

    /// The place whose orbit is the pointwise negation of the orbit of `y`.
    pub fn neg_place(&self, y: &Place) -> Place {
        self.place_of_point(self.neg(y.rep)).expect("negation preserves degree")
    }

    /// Points of X(F_{q^n}) over the place `y`; requires `|y|` to divide `n`.
    pub fn lifts(&self, y: &Place, n: u32) -> Result<Vec<Point>> {
        if n % y.degree != 0 {
            return Err(HeckeError::Domain(format!("degree {} does not divide {n}", y.degree)));
        }
        self.orbit(y.rep).into_iter().map(|p| self.embed(p, n)).collect()
    }

    /// Classes in Pic^0(X_n) of the closed points of X_n over `y`, one per
    /// closed point, listed along the Frobenius action.
    pub fn classes_above(&self, y: &Place, n: u32) -> Result<Vec<Point>> {
        let d = y.degree;
        let g = gcd(d, n);
        let l = d / g * n;
        let p = self.embed(y.rep, l)?;
        let mut out = Vec::with_capacity(g as usize);
        let mut start = p;
        for _ in 0..g {
            // y' has degree d/g over F_{q^n}; its class is the sum of its
            // Fr^n-orbit
            let mut acc = self.zero(l);
            let mut cur = start;
            for _ in 0..d / g {
                acc = self.add(acc, cur);
                cur = self.frobenius_pow(cur, n);
            }
            out.push(
                self.descend(acc, n)?
                    .ok_or_else(|| HeckeError::Invariant("class above is not defined over level n".into()))?,
            );
            start = self.frobenius(start);
        }
        Ok(out)
    }

    /// Complete list of solutions of a class pattern, with interchangeable
    /// positions canonicalized to nondecreasing order.
    pub fn solve_class_equations(&self, pat: &ClassPattern) -> Result<Vec<Vec<Place>>> {
        let k = pat.degrees.len();
        if k == 0 || pat.coeffs.len() != k {
            return Err(HeckeError::Domain("pattern needs matching degrees and coefficients".into()));
        }
        let level = pat.target.level;
        if pat.degrees.iter().any(|&d| d == 0 || (level > 1 && level % d != 0)) {
            return Err(HeckeError::Domain("place degree incompatible with the pattern level".into()));
        }
        let lists: Vec<Arc<Vec<PlaceInfo>>> =
            pat.degrees.iter().map(|&d| self.places(d)).collect::<Result<_>>()?;
        // values a place can contribute, per position
        let values = |pos: usize, info: &PlaceInfo| -> Result<Vec<Point>> {
            let c = pat.coeffs[pos];
            if level == 1 {
                Ok(vec![self.mul(info.class, c)])
            } else {
                Ok(self.lifts(&info.place, level)?.into_iter().map(|p| self.mul(p, c)).collect())
            }
        };
        let mut out = Vec::new();
        let mut chosen: Vec<(Place, Vec<Point>)> = Vec::with_capacity(k);
        self.solve_rec(pat, &lists, &values, &mut chosen, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::type_complexity)]
    fn solve_rec(
        &self,
        pat: &ClassPattern,
        lists: &[Arc<Vec<PlaceInfo>>],
        values: &dyn Fn(usize, &PlaceInfo) -> Result<Vec<Point>>,
        chosen: &mut Vec<(Place, Vec<Point>)>,
        out: &mut Vec<Vec<Place>>,
    ) -> Result<()> {
        let pos = chosen.len();
        if pos == pat.degrees.len() {
            // any combination of contributions hitting the target
            let mut sums = vec![self.zero(pat.target.level)];
            for (_, vals) in chosen.iter() {
                let mut next: Vec<Point> = Vec::with_capacity(sums.len() * vals.len());
                for s in &sums {
                    for v in vals {
                        next.push(self.add(*s, *v));
                    }
                }
                next.sort();
                next.dedup();
                sums = next;
            }
            if sums.contains(&pat.target) {
                out.push(chosen.iter().map(|(p, _)| *p).collect());
            }
            return Ok(());
        }
        for info in lists[pos].iter() {
            let p = info.place;
            let mut ok = true;
            for (j, (prev, _)) in chosen.iter().enumerate() {
                let same_kind = pat.degrees[j] == pat.degrees[pos] && pat.coeffs[j] == pat.coeffs[pos];
                if pat.distinct && *prev == p {
                    ok = false;
                }
                if same_kind && !pat.ordered && *prev > p {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            chosen.push((p, values(pos, info)?));
            self.solve_rec(pat, lists, values, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
