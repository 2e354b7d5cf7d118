//! Eigenvalue conditions for cusp forms and toroidal forms on the PGL_2
//! graph of Phi_{x,1} for a one-point curve, solved exactly.
//!
//! Unknowns, in order: f(O+O), f(N_y1) .. f(N_yq), f(M_x1), f(M_x0),
//! f(O+L_x). The first q+3 rows are the eigenvalue equations at the head
//! vertices of the figure; entries are polynomials of degree at most one
//! in lambda.

use num_rational::Ratio;

use crate::error::{HeckeError, Result};

/// Integer polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<i128>);

fn overflow() -> HeckeError {
    HeckeError::Invariant("integer overflow in exact elimination".into())
}

impl Poly {
    pub fn constant(c: i128) -> Poly {
        Poly(vec![c]).trim()
    }

    /// a + b * lambda
    pub fn linear(a: i128, b: i128) -> Poly {
        Poly(vec![a, b]).trim()
    }

    fn trim(mut self) -> Poly {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &Poly) -> Result<Poly> {
        let n = self.0.len().max(o.0.len());
        let mut v = vec![0i128; n];
        for (i, c) in v.iter_mut().enumerate() {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = o.0.get(i).copied().unwrap_or(0);
            *c = a.checked_add(b).ok_or_else(overflow)?;
        }
        Ok(Poly(v).trim())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Result<Poly> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Result<Poly> {
        if self.is_zero() || o.is_zero() {
            return Ok(Poly::default());
        }
        let mut v = vec![0i128; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                let t = a.checked_mul(*b).ok_or_else(overflow)?;
                v[i + j] = v[i + j].checked_add(t).ok_or_else(overflow)?;
            }
        }
        Ok(Poly(v).trim())
    }

    /// Exact quotient; fails if `d` does not divide `self` in Z[lambda].
    pub fn div_exact(&self, d: &Poly) -> Result<Poly> {
        let dd = d.degree().ok_or_else(|| HeckeError::Invariant("division by zero polynomial".into()))?;
        let lead = d.0[dd];
        let mut r = self.0.clone();
        if r.len() <= dd {
            return if self.is_zero() { Ok(Poly::default()) } else { Err(HeckeError::Invariant("inexact division".into())) };
        }
        let mut q = vec![0i128; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = r[k + dd];
            if c % lead != 0 {
                return Err(HeckeError::Invariant("inexact division".into()));
            }
            let t = c / lead;
            q[k] = t;
            for (j, dj) in d.0.iter().enumerate() {
                r[k + j] = r[k + j].checked_sub(t.checked_mul(*dj).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
        }
        if r.iter().any(|&c| c != 0) {
            return Err(HeckeError::Invariant("inexact division".into()));
        }
        Ok(Poly(q).trim())
    }

    pub fn eval(&self, x: Ratio<i128>) -> Ratio<i128> {
        self.0.iter().rev().fold(Ratio::from_integer(0), |acc, &c| acc * x + Ratio::from_integer(c))
    }
}

pub type PolyMatrix = Vec<Vec<Poly>>;

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(m: &PolyMatrix) -> Result<Poly> {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = 1i128;
    let mut prev = Poly::constant(1);
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(Poly::default());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = t.div_exact(&prev)?;
            }
            a[i][k] = Poly::default();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { d.neg() } else { d })
}

/// Determinant by Laplace expansion along the first row.
pub fn det_cofactor(m: &PolyMatrix) -> Result<Poly> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::constant(1));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = Poly::default();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: PolyMatrix =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, p)| p.clone()).collect()).collect();
        let t = m[0][j].mul(&det_cofactor(&minor)?)?;
        acc = if j % 2 == 0 { acc.add(&t)? } else { acc.sub(&t)? };
    }
    Ok(acc)
}

fn divisors(n: i128) -> Vec<i128> {
    let n = n.abs();
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Rational roots of a nonzero integer polynomial.
pub fn rational_roots(p: &Poly) -> Vec<Ratio<i128>> {
    let mut out = Vec::new();
    let Some(low) = p.0.iter().position(|&c| c != 0) else {
        return out;
    };
    if low > 0 {
        out.push(Ratio::from_integer(0));
    }
    let reduced = Poly(p.0[low..].to_vec());
    let (a0, an) = (reduced.0[0], *reduced.0.last().unwrap());
    for num in divisors(a0) {
        for den in divisors(an) {
            for s in [-1, 1] {
                let r = Ratio::new(s * num, den);
                if reduced.eval(r) == Ratio::from_integer(0) && !out.contains(&r) {
                    out.push(r);
                }
            }
        }
    }
    out.sort();
    out
}

type QPoly = Vec<Ratio<i128>>;

fn q_trim(mut p: QPoly) -> QPoly {
    while p.last() == Some(&Ratio::from_integer(0)) {
        p.pop();
    }
    p
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let lead = *b.last().expect("nonzero divisor");
    while r.len() >= b.len() {
        let c = *r.last().unwrap() / lead;
        let shift = r.len() - b.len();
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= c * bj;
        }
        r = q_trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn to_q(p: &Poly) -> QPoly {
    q_trim(p.0.iter().map(|&c| Ratio::from_integer(c)).collect())
}

/// Monic greatest common divisor over Q.
pub fn poly_gcd(a: &[Ratio<i128>], b: &[Ratio<i128>]) -> Vec<Ratio<i128>> {
    let mut x: QPoly = q_trim(a.to_vec());
    let mut y: QPoly = q_trim(b.to_vec());
    while !y.is_empty() {
        let r = q_rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(&lead) = x.last() {
        for c in x.iter_mut() {
            *c /= lead;
        }
    }
    x
}

/// Degree of what remains of a monic rational polynomial after dividing
/// out (lambda - r) for each listed root, with multiplicity.
fn residual_degree(mut g: QPoly, roots: &[Ratio<i128>]) -> usize {
    for &r in roots {
        loop {
            if g.len() < 2 {
                break;
            }
            // synthetic division by (lambda - r)
            let n = g.len() - 1;
            let mut quo = vec![Ratio::from_integer(0); n];
            let mut acc = Ratio::from_integer(0);
            for i in (0..=n).rev() {
                acc = acc * r + g[i];
                if i > 0 {
                    quo[i - 1] = acc;
                }
            }
            if acc != Ratio::from_integer(0) {
                break;
            }
            g = quo;
        }
    }
    g.len().saturating_sub(1)
}

/// Rank of a rational matrix and a basis of its kernel.
pub fn kernel(m: &[Vec<Ratio<i128>>]) -> (usize, Vec<Vec<Ratio<i128>>>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let zero = Ratio::from_integer(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != zero) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && a[i][c] != zero {
                let f = a[i][c];
                for j in 0..cols {
                    let t = a[r][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero; cols];
        v[free] = Ratio::from_integer(1);
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[i][free];
        }
        basis.push(v);
    }
    (r, basis)
}

/// The period condition appended to the head system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// f(O+O) + (q-1) f(M_x0) = 0, with f(O+L_kx) = 0 for k >= 1.
    Cusp,
    /// f(O+O) + 2 sum f(N_yi) = 0.
    Toroidal,
}

/// Column indices of the unknowns.
pub struct Unknowns {
    pub q: usize,
}

impl Unknowns {
    pub fn oo(&self) -> usize {
        0
    }
    pub fn n(&self, i: usize) -> usize {
        1 + i
    }
    pub fn m1(&self) -> usize {
        self.q + 1
    }
    pub fn m0(&self) -> usize {
        self.q + 2
    }
    pub fn ol(&self) -> usize {
        self.q + 3
    }
    pub fn len(&self) -> usize {
        self.q + 4
    }
}

fn check_q(q: u64) -> Result<usize> {
    if !(2..=4).contains(&q) {
        return Err(HeckeError::Config(format!("the head system is tabulated for q in {{2,3,4}}, not {q}")));
    }
    Ok(q as usize)
}

/// The q+3 eigenvalue equations as rows of lambda * f(v) - sum m f(w) = 0.
pub fn head_system(q: u64) -> Result<PolyMatrix> {
    let qi = check_q(q)?;
    let u = Unknowns { q: qi };
    let q = q as i128;
    let row = |entries: &[(usize, i128, i128)]| -> Vec<Poly> {
        let mut r = vec![Poly::default(); u.len()];
        for &(c, a, b) in entries {
            r[c] = Poly::linear(a, b);
        }
        r
    };
    let mut m = vec![row(&[(u.oo(), 0, 1), (u.ol(), -(q + 1), 0)])];
    for i in 0..qi {
        m.push(row(&[(u.n(i), 0, 1), (u.m1(), -(q + 1), 0)]));
    }
    let mut r = row(&[(u.m1(), 0, 1), (u.m0(), -1, 0)]);
    for i in 0..qi {
        r[u.n(i)] = Poly::constant(-1);
    }
    m.push(r);
    m.push(row(&[(u.m0(), 0, 1), (u.m1(), -q, 0), (u.ol(), -1, 0)]));
    Ok(m)
}

/// The full system for a condition: square for the toroidal case, one row
/// taller than wide for the cusp case (the support constraint fixes
/// f(O+L_x) = 0 and its column is dropped).
pub fn system(q: u64, cond: Condition) -> Result<PolyMatrix> {
    let qi = check_q(q)?;
    let u = Unknowns { q: qi };
    let mut m = head_system(q)?;
    let mut extra = vec![Poly::default(); u.len()];
    extra[u.oo()] = Poly::constant(1);
    match cond {
        Condition::Toroidal => {
            for i in 0..qi {
                extra[u.n(i)] = Poly::constant(2);
            }
            m.push(extra);
        }
        Condition::Cusp => {
            extra[u.m0()] = Poly::constant(q as i128 - 1);
            m.push(extra);
            for r in m.iter_mut() {
                r.remove(u.ol());
            }
        }
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct Root {
    pub lambda: Ratio<i128>,
    pub kernel: Vec<Vec<Ratio<i128>>>,
}

#[derive(Clone, Debug)]
pub struct SpectralReport {
    pub q: u64,
    pub condition: Condition,
    /// Determinant (toroidal) or the first nonzero maximal minor (cusp).
    pub determinant: Poly,
    pub roots: Vec<Root>,
    /// Degree of the common factor of all maximal minors that has no
    /// rational root; a positive value means irrational eigenvalues.
    pub irrational_degree: usize,
}

impl SpectralReport {
    pub fn lambdas(&self) -> Vec<Ratio<i128>> {
        self.roots.iter().map(|r| r.lambda).collect()
    }
}

fn at(m: &PolyMatrix, x: Ratio<i128>) -> Vec<Vec<Ratio<i128>>> {
    m.iter().map(|r| r.iter().map(|p| p.eval(x)).collect()).collect()
}

/// All rational lambda for which the system has a nonzero solution, each
/// with a kernel basis. Both determinant algorithms must agree.
pub fn solve(q: u64, cond: Condition) -> Result<SpectralReport> {
    let m = system(q, cond)?;
    let (determinant, roots, irrational_degree) = solve_matrix(&m)?;
    Ok(SpectralReport { q, condition: cond, determinant, roots, irrational_degree })
}

/// Rational lambda with a nonzero kernel for any system with at least as
/// many rows as columns, together with the first nonzero maximal minor and
/// the degree of the irrational part of the common factor of all minors.
pub fn solve_matrix(m: &PolyMatrix) -> Result<(Poly, Vec<Root>, usize)> {
    let cols = m[0].len();
    if m.len() < cols {
        return Err(HeckeError::Config("underdetermined system".into()));
    }
    let minors: Vec<PolyMatrix> = if m.len() == cols {
        vec![m.clone()]
    } else {
        (0..m.len()).map(|skip| m.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, r)| r.clone()).collect()).collect()
    };
    let mut dets = Vec::new();
    for sq in &minors {
        let a = det_bareiss(sq)?;
        let b = det_cofactor(sq)?;
        if a != b {
            return Err(HeckeError::Invariant(format!("determinants disagree: {a:?} vs {b:?}")));
        }
        dets.push(a);
    }
    let determinant = dets.iter().find(|d| !d.is_zero()).cloned().unwrap_or_default();
    if determinant.is_zero() {
        return Err(HeckeError::Invariant("every maximal minor vanishes identically".into()));
    }
    let gcd = dets.iter().fold(to_q(&determinant), |g, d| poly_gcd(&g, &to_q(d)));
    let mut roots = Vec::new();
    for lambda in rational_roots(&determinant) {
        let (rank, basis) = kernel(&at(m, lambda));
        if rank < cols {
            roots.push(Root { lambda, kernel: basis });
        }
    }
    let found: Vec<Ratio<i128>> = roots.iter().map(|r| r.lambda).collect();
    Ok((determinant, roots, residual_degree(gcd, &found)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128) -> Ratio<i128> {
        Ratio::from_integer(n)
    }

    #[test]
    fn polynomial_division() {
        let a = Poly::linear(-2, 1);
        let b = Poly::linear(2, 1);
        let p = a.mul(&b).unwrap();
        assert_eq!(p, Poly(vec![-4, 0, 1]));
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert!(p.div_exact(&Poly::linear(3, 1)).is_err());
    }

    #[test]
    fn gcd_of_products() {
        let a = Poly::linear(-2, 1).mul(&Poly(vec![-3, 0, 1])).unwrap();
        let b = Poly::linear(-2, 1).mul(&Poly::linear(5, 1)).unwrap();
        let g = poly_gcd(&to_q(&a), &to_q(&b));
        assert_eq!(g, vec![r(-2), r(1)]);
        assert_eq!(residual_degree(poly_gcd(&to_q(&a), &to_q(&a)), &[r(2)]), 2);
    }

    #[test]
    fn roots_survive_permuting_the_n_unknowns() {
        for cond in [Condition::Cusp, Condition::Toroidal] {
            for q in 2..=4u64 {
                let base = solve(q, cond).unwrap();
                let m = system(q, cond).unwrap();
                let n = q as usize;
                // reverse the N block in both rows and columns
                let perm = |i: usize| if (1..=n).contains(&i) { n + 1 - i } else { i };
                let pm: PolyMatrix = (0..m.len())
                    .map(|i| (0..m[0].len()).map(|j| m[perm(i)][perm(j)].clone()).collect())
                    .collect();
                let (_, roots, _) = solve_matrix(&pm).unwrap();
                let l: Vec<_> = roots.iter().map(|r| r.lambda).collect();
                assert_eq!(l, base.lambdas(), "{cond:?} q = {q}");
            }
        }
    }

    #[test]
    fn cusp_roots_are_tempered() {
        for q in 2..=4u64 {
            for l in solve(q, Condition::Cusp).unwrap().lambdas() {
                let x = *l.numer() as f64 / *l.denom() as f64;
                assert!(x * x <= 4.0 * q as f64);
            }
        }
    }

    #[test]
    fn cusp_roots() {
        for q in 2..=4u64 {
            let rep = solve(q, Condition::Cusp).unwrap();
            assert_eq!(rep.lambdas(), vec![r(0)], "q = {q}");
            assert_eq!(rep.irrational_degree, 0, "q = {q}");
            assert!(!rep.roots[0].kernel.is_empty());
        }
    }

    #[test]
    fn cusp_kernel_at_zero() {
        let q = 3u64;
        let u = Unknowns { q: 3 };
        let rep = solve(q, Condition::Cusp).unwrap();
        let k = &rep.roots[0].kernel;
        assert_eq!(k.len(), q as usize);
        // every kernel vector has f(M_x1) = 0 and f(O+O) = (q-1) sum f(N)
        for v in k {
            assert_eq!(v[u.m1()], r(0));
            let s: Ratio<i128> = (0..3).map(|i| v[u.n(i)]).sum();
            assert_eq!(v[u.oo()], s * r(2));
        }
    }

    #[test]
    fn toroidal_roots_include_zero() {
        for q in 2..=4i128 {
            let rep = solve(q as u64, Condition::Toroidal).unwrap();
            assert_eq!(rep.lambdas(), vec![r(-q), r(0), r(q)], "q = {q}");
            assert_eq!(rep.irrational_degree, 0, "q = {q}");
        }
    }

    #[test]
    fn toroidal_relation_away_from_zero() {
        // determinant = c * lambda^q * (lambda^2 - q^2)
        for q in 2..=4i128 {
            let d = solve(q as u64, Condition::Toroidal).unwrap().determinant;
            let mut f = Poly(vec![-q * q, 0, 1]);
            for _ in 0..q {
                f = f.mul(&Poly::linear(0, 1)).unwrap();
            }
            let c = d.div_exact(&f).unwrap();
            assert_eq!(c.degree(), Some(0), "q = {q}: {d:?}");
        }
    }
}
