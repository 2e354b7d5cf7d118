//! Finite fields F_{p^k} for p in {2, 3} with a compatible tower of extensions.
//!
//! Elements are stored as `u32` encodings `sum c_i p^i` of their coefficient
//! vectors in the polynomial basis `1, t, t^2, ...`. The encoding is canonical
//! and also serves as the total order used everywhere else in the crate.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{HeckeError, Result};

/// Dense polynomial over F_p, coefficients low to high.
type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    if a.is_empty() {
        a.push(0);
    }
    a
}

fn poly_is_zero(a: &[u32]) -> bool {
    a.iter().all(|&c| c == 0)
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(out)
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| a * b % p == 1).expect("nonzero scalar")
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Poly {
    let mut r: Poly = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = inv_mod_p(m[dm], p);
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = r[dr] * lead_inv % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p * p - c * m[i] % p) % p;
            }
        }
        r.pop();
    }
    trim(r)
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !poly_is_zero(&b) {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Poly {
    let mut result = vec![1u32];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = poly_rem(&poly_mul(&result, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin irreducibility test for a monic polynomial of degree k over F_p.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = (f.len() - 1) as u64;
    let x = vec![0u32, 1];
    // x^(p^k) == x mod f
    let mut xp = x.clone();
    for _ in 0..k {
        xp = poly_powmod(&xp, p as u64, f, p);
    }
    if !poly_is_zero(&poly_sub(&xp, &poly_rem(&x, f, p), p)) {
        return false;
    }
    for r in prime_factors(k) {
        let mut y = x.clone();
        for _ in 0..(k / r) {
            y = poly_powmod(&y, p as u64, f, p);
        }
        let g = poly_gcd(f, &poly_sub(&y, &x, p), p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `k` over F_p, where candidates
/// are ordered by the integer `sum_{i<k} c_i p^i` of their lower coefficients.
pub fn least_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as u64).pow(k);
    for enc in 0..count {
        let mut f = Vec::with_capacity(k as usize + 1);
        let mut e = enc;
        for _ in 0..k {
            f.push((e % p as u64) as u32);
            e /= p as u64;
        }
        f.push(1);
        if k == 1 || (f[0] != 0 && is_irreducible(&f, p)) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

/// The field F_p[t]/(f) with log/exp tables.
#[derive(Debug)]
pub struct Gf {
    p: u32,
    degree: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Gf {
    pub fn new(p: u32, degree: u32) -> Result<Gf> {
        if p != 2 && p != 3 {
            return Err(HeckeError::Config(format!("unsupported characteristic {p}")));
        }
        if degree == 0 {
            return Err(HeckeError::Config("field degree must be positive".into()));
        }
        let size64 = (p as u64).pow(degree);
        if size64 > u32::MAX as u64 / 4 {
            return Err(HeckeError::Guard(format!("field of size {size64} is too large")));
        }
        let size = size64 as u32;
        let modulus = least_irreducible(p, degree);
        let mut gf = Gf { p, degree, size, modulus, exp: Vec::new(), log: Vec::new() };
        gf.build_tables();
        Ok(gf)
    }

    fn build_tables(&mut self) {
        let order = (self.size - 1) as u64;
        let factors = prime_factors(order);
        let gen = (1..self.size)
            .find(|&g| {
                let gp = self.to_poly(g);
                factors.iter().all(|&r| {
                    let h = poly_powmod(&gp, order / r, &self.modulus, self.p);
                    !(h.len() == 1 && h[0] == 1)
                })
            })
            .expect("multiplicative group is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; self.size as usize];
        let mut cur = 1u32;
        for i in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = i;
            cur = self.slow_mul(cur, gen);
        }
        self.exp = exp;
        self.log = log;
    }

    fn to_poly(&self, mut a: u32) -> Poly {
        let mut v = Vec::with_capacity(self.degree as usize);
        for _ in 0..self.degree {
            v.push(a % self.p);
            a /= self.p;
        }
        trim(v)
    }

    fn from_poly(&self, v: &[u32]) -> u32 {
        v.iter().rev().fold(0u32, |acc, &c| acc * self.p + c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mul(&self.to_poly(a), &self.to_poly(b), self.p);
        self.from_poly(&poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Coefficient vector of `a` in the basis `1, t, ..., t^{k-1}`.
    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.degree as usize);
        let mut a = a;
        for _ in 0..self.degree {
            v.push(a % self.p);
            a /= self.p;
        }
        v
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        while a > 0 || b > 0 {
            out += ((a % 3 + b % 3) % 3) * scale;
            a /= 3;
            b /= 3;
            scale *= 3;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut scale = 1;
        while a > 0 {
            out += ((3 - a % 3) % 3) * scale;
            a /= 3;
            scale *= 3;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % (self.size as u64 - 1)) as usize]
    }

    /// Multiplicative inverse. Panics on zero.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let order = self.size - 1;
        let l = self.log[a as usize];
        self.exp[((order - l) % order) as usize]
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a as usize] as u64;
        self.exp[((l * (e % order)) % order) as usize]
    }

    /// Scalar `k` of the prime field times `a`.
    pub fn scale(&self, k: i64, a: u32) -> u32 {
        let c = k.rem_euclid(self.p as i64) as u32;
        self.mul(c, a)
    }

    /// Evaluates a polynomial whose coefficients are field elements.
    pub fn eval(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Field embedding between two levels of the tower.
#[derive(Debug)]
pub struct Embedding {
    forward: Vec<u32>,
    inverse: HashMap<u32, u32>,
}

impl Embedding {
    #[inline]
    pub fn map(&self, a: u32) -> u32 {
        self.forward[a as usize]
    }

    pub fn pull(&self, a: u32) -> Option<u32> {
        self.inverse.get(&a).copied()
    }
}

/// The tower F_q = F_{p^e} inside F_{q^n}, with level n realized as
/// F_p[t]/(f_{en}). Embeddings are chosen compatibly with level 1.
#[derive(Debug)]
pub struct Tower {
    p: u32,
    e: u32,
    levels: RwLock<HashMap<u32, Arc<Gf>>>,
    embeddings: RwLock<HashMap<(u32, u32), Arc<Embedding>>>,
}

impl Tower {
    pub fn new(p: u32, e: u32) -> Result<Tower> {
        let t = Tower {
            p,
            e,
            levels: RwLock::new(HashMap::new()),
            embeddings: RwLock::new(HashMap::new()),
        };
        t.level(1)?;
        Ok(t)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    pub fn level(&self, n: u32) -> Result<Arc<Gf>> {
        if let Some(f) = self.levels.read().unwrap().get(&n) {
            return Ok(f.clone());
        }
        let f = Arc::new(Gf::new(self.p, self.e * n)?);
        let mut w = self.levels.write().unwrap();
        Ok(w.entry(n).or_insert(f).clone())
    }

    /// Embedding of level `m` into level `n`; requires `m | n`.
    pub fn embedding(&self, m: u32, n: u32) -> Result<Arc<Embedding>> {
        if n % m != 0 {
            return Err(HeckeError::Config(format!("level {m} does not divide level {n}")));
        }
        if let Some(e) = self.embeddings.read().unwrap().get(&(m, n)) {
            return Ok(e.clone());
        }
        let emb = Arc::new(self.build_embedding(m, n)?);
        let mut w = self.embeddings.write().unwrap();
        Ok(w.entry((m, n)).or_insert(emb).clone())
    }

    fn build_embedding(&self, m: u32, n: u32) -> Result<Embedding> {
        let small = self.level(m)?;
        let big = self.level(n)?;
        let forward: Vec<u32> = if m == n {
            (0..small.size()).collect()
        } else {
            let modulus = small.modulus().to_vec();
            // level-1 generator t, seen in level m and level n
            let anchor = if m > 1 && self.e > 1 {
                let g_m = self.embedding(1, m)?.map(self.p);
                let g_n = self.embedding(1, n)?.map(self.p);
                Some((small.digits(g_m), g_n))
            } else {
                None
            };
            let compatible = |r: u32| match &anchor {
                Some((digits, g_n)) => big.eval(digits, r) == *g_n,
                None => true,
            };
            let root = (0..big.size())
                .find(|&r| big.eval(&modulus, r) == 0 && compatible(r))
                .ok_or_else(|| HeckeError::Invariant(format!("no embedding of level {m} into {n}")))?;
            (0..small.size()).map(|a| big.eval(&small.digits(a), root)).collect()
        };
        let inverse = forward.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        Ok(Embedding { forward, inverse })
    }

    /// x -> x^q at level `n`.
    pub fn frobenius(&self, n: u32, a: u32) -> Result<u32> {
        Ok(self.level(n)?.pow(a, self.q()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_irreducibles() {
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(least_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (2, 4)] {
            let f = Gf::new(p, k).unwrap();
            for a in 0..f.size() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in 0..f.size() {
                    assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                    assert_eq!(f.add(a, b), f.add(b, a));
                }
            }
        }
    }

    #[test]
    fn f4_alpha_satisfies_its_polynomial() {
        let f = Gf::new(2, 2).unwrap();
        let alpha = 2;
        assert_eq!(f.add(f.add(f.mul(alpha, alpha), alpha), 1), 0);
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for (p, e) in [(2, 1), (2, 2), (3, 1)] {
            let t = Tower::new(p, e).unwrap();
            for (m, n) in [(1, 2), (1, 3), (2, 4), (1, 4)] {
                let emb = t.embedding(m, n).unwrap();
                let fs = t.level(m).unwrap();
                let fb = t.level(n).unwrap();
                for a in 0..fs.size() {
                    for b in 0..fs.size() {
                        assert_eq!(emb.map(fs.mul(a, b)), fb.mul(emb.map(a), emb.map(b)));
                        assert_eq!(emb.map(fs.add(a, b)), fb.add(emb.map(a), emb.map(b)));
                    }
                }
            }
            // 1 -> 2 -> 4 agrees with 1 -> 4
            let e12 = t.embedding(1, 2).unwrap();
            let e24 = t.embedding(2, 4).unwrap();
            let e14 = t.embedding(1, 4).unwrap();
            for a in 0..t.level(1).unwrap().size() {
                assert_eq!(e24.map(e12.map(a)), e14.map(a));
            }
        }
    }

    #[test]
    fn frobenius_fixes_base_field() {
        let t = Tower::new(2, 2).unwrap();
        let e = t.embedding(1, 3).unwrap();
        for a in 0..4 {
            assert_eq!(t.frobenius(3, e.map(a)).unwrap(), e.map(a));
        }
    }
}
