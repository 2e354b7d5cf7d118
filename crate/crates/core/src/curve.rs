//! Weierstrass curves over F_q, their points over F_{q^n}, and the group law
//! recentred at a rational base point x0.

use std::fmt;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{HeckeError, Result};
use crate::field::{Gf, Tower};

/// Default bound on q^n for exhaustive enumeration.
pub const DEFAULT_GUARD: u64 = 1_000_000;
const MAX_LEVEL: usize = 32;

/// Enumeration guard, overridable with `HECKE_ATLAS_GUARD`.
pub fn guard() -> u64 {
    std::env::var("HECKE_ATLAS_GUARD")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD)
}

/// A point of X(F_{q^level}); `None` is the point at infinity.
///
/// The derived order (level, then infinity first, then coordinates) is the
/// canonical order used for orbit representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub level: u32,
    pub coords: Option<(u32, u32)>,
}

impl Point {
    pub const fn infinity(level: u32) -> Point {
        Point { level, coords: None }
    }

    pub const fn affine(level: u32, x: u32, y: u32) -> Point {
        Point { level, coords: Some((x, y)) }
    }

    pub fn is_infinity(&self) -> bool {
        self.coords.is_none()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords {
            None => write!(f, "inf"),
            Some((x, y)) => write!(f, "{x}.{y}"),
        }
    }
}

#[derive(Debug)]
struct Level {
    field: Arc<Gf>,
    a: [u32; 5],
    x0: Point,
    two_x0: Point,
    points: OnceLock<Arc<Vec<Point>>>,
}

/// An elliptic curve in general Weierstrass form
/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over F_q.
#[derive(Debug)]
pub struct Curve {
    name: String,
    tower: Tower,
    a: [u32; 5],
    base: Option<(u32, u32)>,
    n1: u64,
    levels: Vec<OnceLock<Arc<Level>>>,
    pub(crate) places: crate::places::PlaceCache,
    pub(crate) char_tables: RwLock<HashMap<u32, Arc<crate::characters::CharacterTable>>>,
}

impl Curve {
    /// Builds a curve from level-1 coefficient encodings `[a1, a2, a3, a4, a6]`
    /// and an optional affine base point (infinity when `None`).
    pub fn new(name: &str, p: u32, e: u32, a: [u32; 5], base: Option<(u32, u32)>) -> Result<Curve> {
        let tower = Tower::new(p, e)?;
        let f = tower.level(1)?;
        if a.iter().any(|&c| c >= f.size()) {
            return Err(HeckeError::Config("coefficient outside the base field".into()));
        }
        let mut curve = Curve {
            name: name.to_string(),
            tower,
            a,
            base,
            n1: 0,
            levels: (0..MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            places: Default::default(),
            char_tables: RwLock::new(HashMap::new()),
        };
        if curve.discriminant(&f) == 0 {
            return Err(HeckeError::Config(format!("curve {name} is singular")));
        }
        if let Some((x, y)) = base {
            if x >= f.size() || y >= f.size() || !curve.on_curve_raw(&f, &a, x, y) {
                return Err(HeckeError::Config("base point is not on the curve".into()));
            }
        }
        curve.n1 = curve.points(1)?.len() as u64;
        Ok(curve)
    }

    /// Built-in curves. `E2`, `E3`, `E4` are the one-point curves over F_2,
    /// F_3, F_4; the others have more rational points.
    pub fn named(name: &str) -> Result<Curve> {
        match name {
            "E2" => Curve::new("E2", 2, 1, [0, 0, 1, 1, 1], None),
            "E3" => Curve::new("E3", 3, 1, [0, 0, 0, 2, 2], None),
            // alpha is the class of t, encoded as 2
            "E4" => Curve::new("E4", 2, 2, [0, 0, 1, 0, 2], None),
            "E2a" => Curve::new("E2a", 2, 1, [1, 0, 0, 0, 1], None),
            "E2b" => Curve::new("E2b", 2, 1, [0, 0, 1, 0, 0], None),
            "E3a" => Curve::new("E3a", 3, 1, [0, 0, 0, 2, 0], None),
            _ => Err(HeckeError::Config(format!("unknown curve {name}"))),
        }
    }

    /// Names accepted by [`Curve::named`].
    pub const NAMED: [&'static str; 6] = ["E2", "E3", "E4", "E2a", "E2b", "E3a"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn p(&self) -> u32 {
        self.tower.p()
    }

    pub fn q(&self) -> u64 {
        self.tower.q()
    }

    pub fn coefficients(&self) -> [u32; 5] {
        self.a
    }

    /// N_1 = #X(F_q).
    pub fn n1(&self) -> u64 {
        self.n1
    }

    /// a = q + 1 - N_1.
    pub fn trace_of_frobenius(&self) -> i64 {
        self.q() as i64 + 1 - self.n1 as i64
    }

    /// N_n = q^n + 1 - (alpha^n + conj(alpha)^n) via the Newton recursion.
    pub fn count(&self, n: u32) -> u64 {
        let q = self.q() as i128;
        let a = self.trace_of_frobenius() as i128;
        let (mut s0, mut s1) = (2i128, a);
        for _ in 1..n {
            let s2 = a * s1 - q * s0;
            s0 = s1;
            s1 = s2;
        }
        (q.pow(n) + 1 - s1) as u64
    }

    pub fn base_point(&self, level: u32) -> Point {
        match self.base {
            None => Point::infinity(level),
            Some(_) if level == 1 => Point { level, coords: self.base },
            Some(_) => self.embed(Point { level: 1, coords: self.base }, level).expect("base embeds"),
        }
    }

    fn discriminant(&self, f: &Gf) -> u32 {
        let [a1, a2, a3, a4, a6] = self.a;
        let s = |k: i64, x: u32| f.scale(k, x);
        let m = |x: u32, y: u32| f.mul(x, y);
        let ad = |x: u32, y: u32| f.add(x, y);
        let b2 = ad(m(a1, a1), s(4, a2));
        let b4 = ad(s(2, a4), m(a1, a3));
        let b6 = ad(m(a3, a3), s(4, a6));
        let b8 = {
            let t1 = m(m(a1, a1), a6);
            let t2 = s(4, m(a2, a6));
            let t3 = m(m(a1, a3), a4);
            let t4 = m(a2, m(a3, a3));
            let t5 = m(a4, a4);
            f.sub(f.sub(ad(ad(t1, t2), t4), t3), t5)
        };
        let d1 = f.neg(m(m(b2, b2), b8));
        let d2 = s(8, m(m(b4, b4), b4));
        let d3 = s(27, m(b6, b6));
        let d4 = s(9, m(m(b2, b4), b6));
        f.add(f.sub(f.sub(d1, d2), d3), d4)
    }

    fn on_curve_raw(&self, f: &Gf, a: &[u32; 5], x: u32, y: u32) -> bool {
        let [a1, a2, a3, a4, a6] = *a;
        let lhs = f.add(f.add(f.mul(y, y), f.mul(f.mul(a1, x), y)), f.mul(a3, y));
        let x2 = f.mul(x, x);
        let rhs = f.add(f.add(f.add(f.mul(x2, x), f.mul(a2, x2)), f.mul(a4, x)), a6);
        lhs == rhs
    }

    pub fn is_on_curve(&self, p: Point) -> Result<bool> {
        let lv = self.level(p.level)?;
        Ok(match p.coords {
            None => true,
            Some((x, y)) => {
                x < lv.field.size() && y < lv.field.size() && self.on_curve_raw(&lv.field, &lv.a, x, y)
            }
        })
    }

    fn level(&self, n: u32) -> Result<&Arc<Level>> {
        if n == 0 || n as usize >= MAX_LEVEL {
            return Err(HeckeError::Domain(format!("extension level {n} out of range")));
        }
        if let Some(l) = self.levels[n as usize].get() {
            return Ok(l);
        }
        let field = self.tower.level(n)?;
        let emb = self.tower.embedding(1, n)?;
        let a = self.a.map(|c| emb.map(c));
        let x0 = match self.base {
            None => Point::infinity(n),
            Some((x, y)) => Point::affine(n, emb.map(x), emb.map(y)),
        };
        let mut lv = Level { field, a, x0, two_x0: x0, points: OnceLock::new() };
        lv.two_x0 = std_add(&lv, x0, x0);
        let lv = Arc::new(lv);
        Ok(self.levels[n as usize].get_or_init(|| lv))
    }

    /// The field F_{q^n}.
    pub fn field(&self, n: u32) -> Result<Arc<Gf>> {
        Ok(self.level(n)?.field.clone())
    }

    /// All points of X(F_{q^n}) in canonical order.
    pub fn points(&self, n: u32) -> Result<Arc<Vec<Point>>> {
        let lv = self.level(n)?;
        if let Some(p) = lv.points.get() {
            return Ok(p.clone());
        }
        let size = lv.field.size() as u64;
        if size > guard() {
            return Err(HeckeError::Guard(format!(
                "enumerating X(F_{{q^{n}}}) needs {size} field elements, guard is {}",
                guard()
            )));
        }
        let pts = Arc::new(enumerate(lv));
        if self.n1 != 0 && pts.len() as u64 != self.count(n) {
            return Err(HeckeError::Invariant(format!(
                "point count {} at level {n} disagrees with N_{n} = {}",
                pts.len(),
                self.count(n)
            )));
        }
        Ok(lv.points.get_or_init(|| pts).clone())
    }

    /// Transported group law with identity x0.
    pub fn add(&self, p: Point, q: Point) -> Point {
        assert_eq!(p.level, q.level, "points at different levels");
        let lv = self.level(p.level).expect("level");
        let s = std_add(lv, p, q);
        if lv.x0.is_infinity() {
            return s;
        }
        std_add(lv, s, std_neg(lv, lv.x0))
    }

    /// Checked variant of [`Curve::add`].
    pub fn group_add(&self, p: Point, q: Point) -> Result<Point> {
        if p.level != q.level {
            return Err(HeckeError::Domain(format!(
                "cannot add points at levels {} and {}",
                p.level, q.level
            )));
        }
        Ok(self.add(p, q))
    }

    pub fn neg(&self, p: Point) -> Point {
        let lv = self.level(p.level).expect("level");
        std_add(lv, std_neg(lv, p), lv.two_x0)
    }

    pub fn sub(&self, p: Point, q: Point) -> Point {
        self.add(p, self.neg(q))
    }

    pub fn zero(&self, level: u32) -> Point {
        self.base_point(level)
    }

    pub fn mul(&self, p: Point, k: i64) -> Point {
        let mut acc = self.zero(p.level);
        let mut base = if k < 0 { self.neg(p) } else { p };
        let mut k = k.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Coordinates raised to the q-th power.
    pub fn frobenius(&self, p: Point) -> Point {
        match p.coords {
            None => p,
            Some((x, y)) => {
                let f = self.field(p.level).expect("level");
                let q = self.q();
                Point::affine(p.level, f.pow(x, q), f.pow(y, q))
            }
        }
    }

    pub fn frobenius_pow(&self, p: Point, k: u32) -> Point {
        (0..k % p.level.max(1)).fold(p, |acc, _| self.frobenius(acc))
    }

    /// Maps a point of X(F_{q^m}) into X(F_{q^n}).
    pub fn embed(&self, p: Point, n: u32) -> Result<Point> {
        if p.level == n {
            return Ok(p);
        }
        let emb = self.tower.embedding(p.level, n)?;
        Ok(match p.coords {
            None => Point::infinity(n),
            Some((x, y)) => Point::affine(n, emb.map(x), emb.map(y)),
        })
    }

    /// Inverse of [`Curve::embed`]; `None` if the point is not defined over
    /// F_{q^m}.
    pub fn descend(&self, p: Point, m: u32) -> Result<Option<Point>> {
        if p.level == m {
            return Ok(Some(p));
        }
        let emb = self.tower.embedding(m, p.level)?;
        Ok(match p.coords {
            None => Some(Point::infinity(m)),
            Some((x, y)) => match (emb.pull(x), emb.pull(y)) {
                (Some(a), Some(b)) => Some(Point::affine(m, a, b)),
                _ => None,
            },
        })
    }

    /// Relative norm: the sum of Fr^{m i}(P) for i < n/m, as a point of level m.
    pub fn norm(&self, p: Point, m: u32) -> Result<Point> {
        let n = p.level;
        if m == 0 || n % m != 0 {
            return Err(HeckeError::Domain(format!("{m} does not divide {n}")));
        }
        let mut acc = self.zero(n);
        let mut cur = p;
        for _ in 0..n / m {
            acc = self.add(acc, cur);
            for _ in 0..m {
                cur = self.frobenius(cur);
            }
        }
        self.descend(acc, m)?
            .ok_or_else(|| HeckeError::Invariant("norm is not Frobenius-fixed".into()))
    }
}

fn std_neg(lv: &Level, p: Point) -> Point {
    match p.coords {
        None => p,
        Some((x, y)) => {
            let f = &lv.field;
            let [a1, _, a3, _, _] = lv.a;
            let ny = f.neg(f.add(f.add(y, f.mul(a1, x)), a3));
            Point::affine(p.level, x, ny)
        }
    }
}

/// Chord-tangent law with identity at infinity.
fn std_add(lv: &Level, p: Point, q: Point) -> Point {
    let (x1, y1) = match p.coords {
        None => return q,
        Some(c) => c,
    };
    let (x2, y2) = match q.coords {
        None => return p,
        Some(c) => c,
    };
    let f = &lv.field;
    let [a1, a2, a3, a4, a6] = lv.a;
    let (lambda, nu);
    if x1 == x2 {
        let d = f.add(f.add(f.add(y1, y2), f.mul(a1, x2)), a3);
        if d == 0 {
            return Point::infinity(p.level);
        }
        // doubling
        let den = f.add(f.add(f.scale(2, y1), f.mul(a1, x1)), a3);
        let x1s = f.mul(x1, x1);
        let num_l = f.sub(
            f.add(f.add(f.scale(3, x1s), f.scale(2, f.mul(a2, x1))), a4),
            f.mul(a1, y1),
        );
        let num_n = f.sub(
            f.add(f.add(f.neg(f.mul(x1s, x1)), f.mul(a4, x1)), f.scale(2, a6)),
            f.mul(a3, y1),
        );
        lambda = f.div(num_l, den);
        nu = f.div(num_n, den);
    } else {
        let den = f.sub(x2, x1);
        lambda = f.div(f.sub(y2, y1), den);
        nu = f.div(f.sub(f.mul(y1, x2), f.mul(y2, x1)), den);
    }
    let x3 = f.sub(
        f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1),
        x2,
    );
    let y3 = f.sub(f.neg(f.mul(f.add(lambda, a1), x3)), f.add(nu, a3));
    Point::affine(p.level, x3, y3)
}

/// Exhaustive enumeration in O(q^n) using square-root or Artin-Schreier
/// tables.
fn enumerate(lv: &Level) -> Vec<Point> {
    let f = &lv.field;
    let size = f.size();
    let [a1, a2, a3, a4, a6] = lv.a;
    let level = lv.x0.level;
    let mut pts = vec![Point::infinity(level)];
    let cubic = |x: u32| {
        let x2 = f.mul(x, x);
        f.add(f.add(f.add(f.mul(x2, x), f.mul(a2, x2)), f.mul(a4, x)), a6)
    };
    if f.characteristic() == 2 {
        let mut sqrt = vec![u32::MAX; size as usize];
        let mut as_root = vec![u32::MAX; size as usize];
        for z in 0..size {
            sqrt[f.mul(z, z) as usize] = z;
            let c = f.add(f.mul(z, z), z) as usize;
            if as_root[c] == u32::MAX {
                as_root[c] = z;
            }
        }
        for x in 0..size {
            let b = f.add(f.mul(a1, x), a3);
            let c = cubic(x);
            if b == 0 {
                pts.push(Point::affine(level, x, sqrt[c as usize]));
            } else {
                let binv = f.inv(b);
                let t = f.mul(c, f.mul(binv, binv));
                let z = as_root[t as usize];
                if z != u32::MAX {
                    pts.push(Point::affine(level, x, f.mul(b, z)));
                    pts.push(Point::affine(level, x, f.mul(b, f.add(z, 1))));
                }
            }
        }
    } else {
        let mut roots: Vec<Vec<u32>> = vec![Vec::new(); size as usize];
        for r in 0..size {
            roots[f.mul(r, r) as usize].push(r);
        }
        let half = f.inv(2);
        for x in 0..size {
            let lin = f.add(f.mul(a1, x), a3);
            let d = f.add(f.scale(4, cubic(x)), f.mul(lin, lin));
            for &r in &roots[d as usize] {
                let y = f.mul(f.sub(r, lin), half);
                pts.push(Point::affine(level, x, y));
            }
        }
    }
    pts.sort();
    pts
}
