//! Characters of Pic^0(X_n) = X(F_{q^n}) and their Frobenius orbits.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_complex::Complex64;

use crate::curve::{Curve, Point};
use crate::error::{HeckeError, Result};
use crate::places::Place;

/// Largest group order for which a full character table is built.
pub const CHARACTER_GUARD: usize = 10_000;

/// A character, written in coordinates dual to the generators `(g1, g2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Character {
    pub s: u32,
    pub t: u32,
}

/// Pic^0(X_n) written as Z/m1 x Z/m2 with m2 | m1, plus its dual group.
#[derive(Debug)]
pub struct CharacterTable {
    level: u32,
    m1: u32,
    m2: u32,
    g1: Point,
    g2: Point,
    dlog: HashMap<Point, (u32, u32)>,
    /// Frobenius images of the generators, in coordinates.
    frob: [(u32, u32); 2],
}

impl CharacterTable {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> usize {
        (self.m1 * self.m2) as usize
    }

    /// Invariant factors `(m1, m2)`.
    pub fn structure(&self) -> (u32, u32) {
        (self.m1, self.m2)
    }

    pub fn generators(&self) -> (Point, Point) {
        (self.g1, self.g2)
    }

    pub fn characters(&self) -> impl Iterator<Item = Character> + '_ {
        (0..self.m1).flat_map(move |s| (0..self.m2).map(move |t| Character { s, t }))
    }

    pub fn coordinates(&self, p: Point) -> Option<(u32, u32)> {
        self.dlog.get(&p).copied()
    }

    /// chi(P) = zeta_{m1}^k; returns k.
    pub fn exponent(&self, chi: Character, p: Point) -> u32 {
        let (a, b) = self.dlog[&p];
        let scale = self.m1 / self.m2;
        ((chi.s as u64 * a as u64 + chi.t as u64 * b as u64 * scale as u64) % self.m1 as u64) as u32
    }

    pub fn value(&self, chi: Character, p: Point) -> Complex64 {
        let k = self.exponent(chi, p);
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / self.m1 as f64)
    }

    /// The character chi o Fr.
    pub fn frobenius(&self, chi: Character) -> Character {
        let scale = self.m1 / self.m2;
        let e = |(a, b): (u32, u32)| {
            ((chi.s as u64 * a as u64 + chi.t as u64 * b as u64 * scale as u64) % self.m1 as u64) as u32
        };
        let s = e(self.frob[0]);
        let t = e(self.frob[1]) / scale;
        Character { s, t }
    }

    pub fn frobenius_orbit(&self, chi: Character) -> Vec<Character> {
        let mut orbit = vec![chi];
        let mut cur = self.frobenius(chi);
        while cur != chi {
            orbit.push(cur);
            cur = self.frobenius(cur);
        }
        orbit
    }

    /// Not induced from a lower level: the Frobenius orbit has size `level`.
    pub fn is_primitive(&self, chi: Character) -> bool {
        self.frobenius_orbit(chi).len() as u32 == self.level
    }
}

fn order_of(curve: &Curve, p: Point, n: u64) -> u64 {
    let zero = curve.zero(p.level);
    let mut divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    divs.sort();
    for d in divs {
        if curve.mul(p, d as i64) == zero {
            return d;
        }
    }
    n
}

impl Curve {
    /// The character table of Pic^0(X_n), cached per level.
    pub fn characters(&self, n: u32) -> Result<Arc<CharacterTable>> {
        if let Some(t) = self.char_tables.read().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let table = Arc::new(self.build_characters(n)?);
        let mut w = self.char_tables.write().unwrap();
        Ok(w.entry(n).or_insert(table).clone())
    }

    fn build_characters(&self, n: u32) -> Result<CharacterTable> {
        let count = self.count(n);
        if count as usize > CHARACTER_GUARD {
            return Err(HeckeError::Guard(format!(
                "Pic^0(X_{n}) has {count} elements, character guard is {CHARACTER_GUARD}"
            )));
        }
        let pts = self.points(n)?;
        let big = pts.len() as u64;
        let zero = self.zero(n);
        let (mut g1, mut m1) = (zero, 1u64);
        for &p in pts.iter() {
            let o = order_of(self, p, big);
            if o > m1 {
                m1 = o;
                g1 = p;
            }
        }
        let m2 = big / m1;
        let span1: HashSet<Point> = (0..m1).map(|k| self.mul(g1, k as i64)).collect();
        let g2 = if m2 == 1 {
            zero
        } else {
            *pts.iter()
                .find(|&&p| {
                    order_of(self, p, big) == m2 && (1..m2).all(|k| !span1.contains(&self.mul(p, k as i64)))
                })
                .ok_or_else(|| HeckeError::Invariant("no complement to the maximal cyclic subgroup".into()))?
        };
        let mut dlog = HashMap::with_capacity(big as usize);
        let mut row = zero;
        for a in 0..m1 {
            let mut cur = row;
            for b in 0..m2 {
                dlog.insert(cur, (a as u32, b as u32));
                cur = self.add(cur, g2);
            }
            row = self.add(row, g1);
        }
        if dlog.len() as u64 != big {
            return Err(HeckeError::Invariant("generators do not span Pic^0".into()));
        }
        let frob = [dlog[&self.frobenius(g1)], dlog[&self.frobenius(g2)]];
        Ok(CharacterTable { level: n, m1: m1 as u32, m2: m2 as u32, g1, g2, dlog, frob })
    }

    /// rho~(y): the Frobenius average of rho over the closed points of X_n
    /// above `y`.
    pub fn averaged_character(&self, table: &CharacterTable, chi: Character, y: &Place) -> Result<Complex64> {
        let classes = self.classes_above(y, table.level())?;
        let g = classes.len() as f64;
        Ok(classes.iter().map(|&c| table.value(chi, c)).sum::<Complex64>() / g)
    }
}
