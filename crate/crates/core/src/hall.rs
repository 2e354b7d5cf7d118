//! Torsion Hall algebra at a single place, computed by brute force.
//!
//! The module of type lambda over the completed local ring at y is realised
//! as the F_{q_y}-vector space M = sum F[t]/t^{lambda_i} with T acting as
//! multiplication by t. Submodules are the T-stable subspaces, found by
//! enumerating every subspace in reduced row echelon form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_rational::Ratio;

use crate::curve::Curve;
use crate::error::{HeckeError, Result};
use crate::field::Gf;
use crate::places::Place;

/// Largest weight for which Hall numbers are enumerated.
pub const HALL_WEIGHT_GUARD: u32 = 4;
/// Largest number of candidate subspaces per dimension, roughly q_y^(n^2/4).
pub const HALL_SUBSPACE_GUARD: u64 = 1_000_000;

/// A partition, parts weakly decreasing and positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Partition {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Partition {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All partitions of n, in decreasing lexicographic order.
    pub fn all(n: u32) -> Vec<Partition> {
        fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=n.min(max)).rev() {
                cur.push(p);
                rec(n - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// The partition with prescribed counts: c[k-1] parts of size >= k.
    fn from_ge_counts(c: &[usize]) -> Partition {
        let len = c.first().copied().unwrap_or(0);
        Partition::new((0..len).map(|j| c.iter().filter(|&&n| n > j).count() as u32).collect())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

fn split_prime_power(q: u64) -> Result<(u32, u32)> {
    for p in [2u64, 3] {
        let (mut n, mut e) = (q, 0u32);
        while n > 1 && n % p == 0 {
            n /= p;
            e += 1;
        }
        if n == 1 && e > 0 {
            return Ok((p as u32, e));
        }
    }
    Err(HeckeError::Config(format!("{q} is not a power of 2 or 3")))
}

struct Module<'a> {
    gf: &'a Gf,
    lambda: &'a Partition,
    dim: usize,
}

impl Module<'_> {
    fn t(&self, v: &[u32]) -> Vec<u32> {
        let mut w = vec![0; self.dim];
        let mut off = 0;
        for &l in self.lambda.parts() {
            for j in 0..l as usize - 1 {
                w[off + j + 1] = v[off + j];
            }
            off += l as usize;
        }
        w
    }

    fn rank(&self, vs: &[Vec<u32>]) -> usize {
        let gf = self.gf;
        let mut rows: Vec<Vec<u32>> = vs.to_vec();
        let mut r = 0;
        for c in 0..self.dim {
            let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
            rows.swap(r, p);
            let inv = gf.inv(rows[r][c]);
            for i in r + 1..rows.len() {
                if rows[i][c] != 0 {
                    let f = gf.mul(rows[i][c], inv);
                    for j in c..self.dim {
                        rows[i][j] = gf.sub(rows[i][j], gf.mul(f, rows[r][j]));
                    }
                }
            }
            r += 1;
        }
        r
    }

    /// Jordan type of T on the span of `vs` (a basis), and on M modulo it.
    fn types(&self, basis: &[Vec<u32>]) -> (Partition, Partition) {
        let k = basis.len();
        let mut sub_ranks = vec![k];
        let mut cur = basis.to_vec();
        while *sub_ranks.last().unwrap() > 0 {
            cur = cur.iter().map(|v| self.t(v)).collect();
            sub_ranks.push(self.rank(&cur));
        }
        let mut quo_ranks = vec![self.dim - k];
        let mut img: Vec<Vec<u32>> = (0..self.dim)
            .map(|i| {
                let mut e = vec![0; self.dim];
                e[i] = 1;
                e
            })
            .collect();
        while *quo_ranks.last().unwrap() > 0 {
            img = img.iter().map(|v| self.t(v)).collect();
            let mut all = img.clone();
            all.extend(basis.iter().cloned());
            quo_ranks.push(self.rank(&all) - k);
        }
        let counts = |r: &[usize]| -> Vec<usize> { r.windows(2).map(|w| w[0] - w[1]).collect() };
        (Partition::from_ge_counts(&counts(&sub_ranks)), Partition::from_ge_counts(&counts(&quo_ranks)))
    }

    /// True if the row-reduced basis spans a T-stable subspace.
    fn stable(&self, rows: &[Vec<u32>], pivots: &[usize]) -> bool {
        let gf = self.gf;
        rows.iter().all(|v| {
            let mut w = self.t(v);
            for (r, &p) in rows.iter().zip(pivots) {
                let c = w[p];
                if c != 0 {
                    for j in 0..self.dim {
                        w[j] = gf.sub(w[j], gf.mul(c, r[j]));
                    }
                }
            }
            w.iter().all(|&x| x == 0)
        })
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

type HallTable = HashMap<(Partition, Partition), u64>;

fn table(lambda: &Partition, q_y: u64) -> Result<Arc<HallTable>> {
    static MEMO: OnceLock<Mutex<HashMap<(Partition, u64), Arc<HallTable>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(t) = memo.lock().unwrap().get(&(lambda.clone(), q_y)) {
        return Ok(t.clone());
    }
    let n = lambda.weight();
    if n > HALL_WEIGHT_GUARD {
        return Err(HeckeError::Guard(format!("Hall numbers are enumerated up to weight {HALL_WEIGHT_GUARD}, not {n}")));
    }
    let worst = (q_y as f64).powi((n * n / 4) as i32);
    if worst > HALL_SUBSPACE_GUARD as f64 {
        return Err(HeckeError::Guard(format!("about {worst:.0} subspaces of F_{q_y}^{n}")));
    }
    let (p, e) = split_prime_power(q_y)?;
    let gf = Gf::new(p, e)?;
    let dim = n as usize;
    let m = Module { gf: &gf, lambda, dim };
    let size = gf.size();
    let mut out = HallTable::new();
    for k in 0..=dim {
        for pivots in k_subsets(dim, k) {
            let free: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| (pivots[r] + 1..dim).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let mut digits = vec![0u32; free.len()];
            loop {
                let mut rows = vec![vec![0u32; dim]; k];
                for (r, &pc) in pivots.iter().enumerate() {
                    rows[r][pc] = 1;
                }
                for (&(r, c), &d) in free.iter().zip(&digits) {
                    rows[r][c] = d;
                }
                if m.stable(&rows, &pivots) {
                    let (nu, mu) = m.types(&rows);
                    *out.entry((mu, nu)).or_default() += 1;
                }
                let Some(i) = digits.iter().position(|&d| d + 1 < size) else { break };
                digits[i] += 1;
                for d in &mut digits[..i] {
                    *d = 0;
                }
            }
        }
    }
    let t = Arc::new(out);
    memo.lock().unwrap().insert((lambda.clone(), q_y), t.clone());
    Ok(t)
}

/// h^lambda_{mu,nu}: the number of submodules N of M_lambda over a field of
/// size q_y with N of type nu and M_lambda / N of type mu.
pub fn hall_number(lambda: &Partition, mu: &Partition, nu: &Partition, q_y: u64) -> Result<u64> {
    if mu.weight() + nu.weight() != lambda.weight() {
        return Ok(0);
    }
    Ok(table(lambda, q_y)?.get(&(mu.clone(), nu.clone())).copied().unwrap_or(0))
}

/// a + b v with v^2 = 1/q, a and b rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Qv {
    pub a: Ratio<i64>,
    pub b: Ratio<i64>,
    pub q: i64,
}

impl Qv {
    pub fn zero(q: u64) -> Qv {
        Qv { a: Ratio::from_integer(0), b: Ratio::from_integer(0), q: q as i64 }
    }

    pub fn int(q: u64, n: i64) -> Qv {
        Qv { a: Ratio::from_integer(n), ..Qv::zero(q) }
    }

    /// v^k.
    pub fn v_pow(q: u64, k: i32) -> Qv {
        let half = k.div_euclid(2);
        let scale = Ratio::from_integer(q as i64).pow(-half);
        if k.rem_euclid(2) == 0 {
            Qv { a: scale, ..Qv::zero(q) }
        } else {
            Qv { b: scale, ..Qv::zero(q) }
        }
    }

    /// The quantum integer [m] = v^(1-m) + v^(3-m) + ... + v^(m-1).
    pub fn quantum(q: u64, m: u32) -> Qv {
        (0..m).fold(Qv::zero(q), |acc, i| acc.add(&Qv::v_pow(q, 1 - m as i32 + 2 * i as i32)))
    }

    pub fn is_zero(&self) -> bool {
        self.a == Ratio::from_integer(0) && self.b == Ratio::from_integer(0)
    }

    pub fn add(&self, o: &Qv) -> Qv {
        Qv { a: self.a + o.a, b: self.b + o.b, q: self.q }
    }

    pub fn mul(&self, o: &Qv) -> Qv {
        let q = Ratio::from_integer(self.q);
        Qv { a: self.a * o.a + self.b * o.b / q, b: self.a * o.b + self.b * o.a, q: self.q }
    }

    pub fn scale(&self, r: Ratio<i64>) -> Qv {
        Qv { a: self.a * r, b: self.b * r, q: self.q }
    }

    pub fn to_f64(&self) -> f64 {
        let v = (self.q as f64).powf(-0.5);
        *self.a.numer() as f64 / *self.a.denom() as f64 + v * (*self.b.numer() as f64 / *self.b.denom() as f64)
    }
}

impl fmt::Display for Qv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} v", self.a, self.b)
    }
}

/// A finite combination of K_y^(lambda) at one place.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionElement {
    pub place: Place,
    /// Size of the constant field of the curve; v^2 = 1/q.
    pub q: u64,
    pub terms: BTreeMap<Partition, Qv>,
}

impl TorsionElement {
    pub fn zero(place: Place, q: u64) -> TorsionElement {
        TorsionElement { place, q, terms: BTreeMap::new() }
    }

    /// The single symbol K_y^(lambda).
    pub fn symbol(place: Place, q: u64, lambda: Partition) -> TorsionElement {
        let mut t = TorsionElement::zero(place, q);
        t.terms.insert(lambda, Qv::int(q, 1));
        t
    }

    pub fn q_y(&self) -> u64 {
        self.q.pow(self.place.degree)
    }

    pub fn coefficient(&self, lambda: &Partition) -> Qv {
        self.terms.get(lambda).copied().unwrap_or(Qv::zero(self.q))
    }

    fn insert(&mut self, lambda: Partition, c: Qv) {
        let e = self.terms.entry(lambda).or_insert(Qv::zero(c.q as u64));
        *e = e.add(&c);
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, o: &TorsionElement) -> Result<TorsionElement> {
        same_place(self, o)?;
        let mut out = self.clone();
        for (l, c) in &o.terms {
            out.insert(l.clone(), *c);
        }
        Ok(out)
    }
}

fn same_place(a: &TorsionElement, b: &TorsionElement) -> Result<()> {
    if a.place != b.place || a.q != b.q {
        return Err(HeckeError::Config(format!("torsion elements at {} and {} cannot be combined", a.place, b.place)));
    }
    Ok(())
}

/// The Hall product a * b: the coefficient of K^lambda is
/// sum a_mu b_nu h^lambda_{mu,nu}, the right factor being the subsheaf.
pub fn hall_multiply(a: &TorsionElement, b: &TorsionElement) -> Result<TorsionElement> {
    same_place(a, b)?;
    let q_y = a.q_y();
    let mut out = TorsionElement::zero(a.place, a.q);
    for (mu, ca) in &a.terms {
        for (nu, cb) in &b.terms {
            let w = mu.weight() + nu.weight();
            let c = ca.mul(cb);
            for lambda in Partition::all(w) {
                let h = hall_number(&lambda, mu, nu, q_y)?;
                if h > 0 {
                    out.insert(lambda, c.scale(Ratio::from_integer(h as i64)));
                }
            }
        }
    }
    Ok(out)
}

/// prod_{i=1}^{l} (1 - q_y^i).
fn n_u(q_y: u64, l: usize) -> i64 {
    (1..=l as u32).map(|i| 1 - (q_y as i64).pow(i)).product()
}

/// T_{(0,m),y} = [m] |y| / m * sum_{|lambda| = m/|y|} n_u(l(lambda) - 1) K_y^(lambda),
/// and zero when |y| does not divide m.
pub fn torsion_generator(curve: &Curve, m: u32, y: &Place) -> TorsionElement {
    let q = curve.q();
    let mut out = TorsionElement::zero(*y, q);
    if m == 0 || m % y.degree != 0 {
        return out;
    }
    let lead = Qv::quantum(q, m).scale(Ratio::new(y.degree as i64, m as i64));
    let q_y = out.q_y();
    for lambda in Partition::all(m / y.degree) {
        let c = lead.scale(Ratio::from_integer(n_u(q_y, lambda.len() - 1)));
        out.insert(lambda, c);
    }
    out
}

/// One evaluation of c * sum_sigma sigma~(-y') sum_w sigma~(w) T_{(0,2),w}.
#[derive(Clone, Debug)]
pub struct DecompositionRun {
    pub label: String,
    pub constant: f64,
    /// The place whose K_{y'} the expansion is compared against.
    pub target: Place,
    pub coefficients: Vec<(Place, Partition, Complex64)>,
    /// Coefficient of K_{target}.
    pub at_target: Complex64,
    /// Largest deviation from the single symbol K_{target}.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport {
    pub curve: String,
    pub y: Place,
    pub n2: usize,
    pub runs: Vec<DecompositionRun>,
}

impl DecompositionReport {
    pub fn run(&self, label: &str) -> Option<&DecompositionRun> {
        self.runs.iter().find(|r| r.label.starts_with(label))
    }
}

/// Expands the character-averaged combination of the T_{(0,2),w} over all
/// places of degree one and two, for both normalisations in circulation
/// and for the same sum with -y replaced by -y' for every other degree-two
/// place y'.
pub fn verify_character_decomposition(curve: &Curve, y: &Place) -> Result<DecompositionReport> {
    if y.degree != 2 {
        return Err(HeckeError::Config(format!("{y} is not a degree-two place")));
    }
    curve.place_info(y)?;
    let table = curve.characters(2)?;
    let chars: Vec<_> = table.characters().collect();
    let n2 = chars.len();
    let mut places: Vec<Place> = curve.places(1)?.iter().map(|i| i.place).collect();
    places.extend(curve.places(2)?.iter().map(|i| i.place));
    let gens: Vec<TorsionElement> = places.iter().map(|w| torsion_generator(curve, 2, w)).collect();
    let mut avg: HashMap<(usize, Place), Complex64> = HashMap::new();
    let mut tilde = |s: usize, p: &Place| -> Result<Complex64> {
        if let Some(v) = avg.get(&(s, *p)) {
            return Ok(*v);
        }
        let v = curve.averaged_character(&table, chars[s], p)?;
        avg.insert((s, *p), v);
        Ok(v)
    };
    let q2 = Qv::quantum(curve.q(), 2).to_f64();
    let n2f = n2 as f64;
    let expand = |weights: &[Complex64], c: f64| -> Vec<(Place, Partition, Complex64)> {
        let mut out = Vec::new();
        for ((w, g), s) in places.iter().zip(&gens).zip(weights) {
            for (lambda, coef) in &g.terms {
                out.push((*w, lambda.clone(), *s * c * coef.to_f64()));
            }
        }
        out
    };
    let mut targets = vec![*y];
    targets.extend(places.iter().filter(|p| p.degree == 2 && *p != y));
    let mut runs = Vec::new();
    for (ti, target) in targets.iter().enumerate() {
        let minus = curve.neg_place(target);
        let mut weights = vec![Complex64::new(0.0, 0.0); places.len()];
        for s in 0..n2 {
            let a = tilde(s, &minus)?;
            for (i, w) in places.iter().enumerate() {
                weights[i] += a * tilde(s, w)?;
            }
        }
        let constants: Vec<(String, f64)> = if ti == 0 {
            vec![
                ("2/(N2^2 [2])".to_string(), 2.0 / (n2f * n2f * q2)),
                ("2/(N2 [2])".to_string(), 2.0 / (n2f * q2)),
            ]
        } else {
            vec![(format!("2/(N2 [2]) at y' = {target}"), 2.0 / (n2f * q2))]
        };
        for (label, c) in constants {
            let coefficients = expand(&weights, c);
            let unit = Partition::new(vec![1]);
            let mut at_target = Complex64::new(0.0, 0.0);
            let mut residual = 0.0f64;
            for (w, l, z) in &coefficients {
                let want = if w == target && *l == unit { 1.0 } else { 0.0 };
                if w == target && *l == unit {
                    at_target = *z;
                }
                residual = residual.max((*z - want).norm());
            }
            runs.push(DecompositionRun { label, constant: c, target: *target, coefficients, at_target, residual });
        }
    }
    Ok(DecompositionReport { curve: curve.name().to_string(), y: *y, n2, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn partitions_of_four() {
        let all = Partition::all(4);
        assert_eq!(all.len(), 5);
        assert_eq!(all[0], p(&[4]));
        assert_eq!(all[4], p(&[1, 1, 1, 1]));
    }

    #[test]
    fn basic_hall_numbers() {
        for q in [2, 3, 4] {
            assert_eq!(hall_number(&p(&[1, 1]), &p(&[1]), &p(&[1]), q).unwrap(), q + 1);
            assert_eq!(hall_number(&p(&[2]), &p(&[1]), &p(&[1]), q).unwrap(), 1);
            assert_eq!(hall_number(&p(&[2, 1]), &p(&[]), &p(&[2, 1]), q).unwrap(), 1);
        }
    }

    #[test]
    fn classical_values() {
        // the socle is the only submodule of type (1,1) in M_(2,1)
        assert_eq!(hall_number(&p(&[2, 1]), &p(&[1]), &p(&[1, 1]), 2).unwrap(), 1);
        // lines in a 3-dimensional space
        assert_eq!(hall_number(&p(&[1, 1, 1]), &p(&[1, 1]), &p(&[1]), 3).unwrap(), 13);
        // h^{(2,1)}_{(2),(1)}: lines in the socle other than t M, so q
        assert_eq!(hall_number(&p(&[2, 1]), &p(&[2]), &p(&[1]), 2).unwrap(), 2);
        assert_eq!(hall_number(&p(&[2, 1]), &p(&[1, 1]), &p(&[1]), 2).unwrap(), 1);
    }

    #[test]
    fn weight_guard() {
        assert!(matches!(hall_number(&p(&[5]), &p(&[4]), &p(&[1]), 2), Err(HeckeError::Guard(_))));
    }

    #[test]
    fn quantum_two() {
        // [2] = v^-1 + v, v^2 = 1/q: both coefficients land on the v term
        let t = Qv::quantum(2, 2);
        assert_eq!(t.a, Ratio::from_integer(0));
        assert_eq!(t.b, Ratio::from_integer(3));
        assert!((t.to_f64() - (2f64.sqrt() + 1.0 / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn generators() {
        let c = Curve::named("E3").unwrap();
        let x = Place::rational(c.zero(1));
        assert_eq!(torsion_generator(&c, 1, &x), TorsionElement::symbol(x, 3, p(&[1])));
        let t = torsion_generator(&c, 2, &x);
        let half = Qv::quantum(3, 2).scale(Ratio::new(1, 2));
        assert_eq!(t.coefficient(&p(&[2])), half);
        assert_eq!(t.coefficient(&p(&[1, 1])), half.scale(Ratio::from_integer(-2)));
        let y = c.places(2).unwrap()[0].place;
        let ty = torsion_generator(&c, 2, &y);
        assert_eq!(ty.terms.len(), 1);
        assert_eq!(ty.coefficient(&p(&[1])), Qv::quantum(3, 2));
        assert!(torsion_generator(&c, 3, &y).terms.is_empty());
    }

    #[test]
    fn product_of_points() {
        let c = Curve::named("E2").unwrap();
        let x = Place::rational(c.zero(1));
        let k = TorsionElement::symbol(x, 2, p(&[1]));
        let kk = hall_multiply(&k, &k).unwrap();
        assert_eq!(kk.coefficient(&p(&[1, 1])), Qv::int(2, 3));
        assert_eq!(kk.coefficient(&p(&[2])), Qv::int(2, 1));
    }

    #[test]
    fn mixed_places_rejected() {
        let c = Curve::named("E2").unwrap();
        let x = Place::rational(c.zero(1));
        let y = c.places(2).unwrap()[0].place;
        let a = TorsionElement::symbol(x, 2, p(&[1]));
        let b = TorsionElement::symbol(y, 2, p(&[1]));
        assert!(hall_multiply(&a, &b).is_err());
    }

    #[test]
    fn decomposition_on_e2() {
        let c = Curve::named("E2").unwrap();
        let y = c.places(2).unwrap()[0].place;
        let r = verify_character_decomposition(&c, &y).unwrap();
        assert_eq!(r.n2, 5);
        let strict = r.run("2/(N2^2").unwrap();
        assert!((strict.at_target.re - 0.2).abs() < 1e-9);
        let loose = r.run("2/(N2 [2])").unwrap();
        assert!(loose.residual < 1e-9, "{}", loose.residual);
        for run in r.runs.iter().skip(2) {
            assert!(run.residual < 1e-9, "{}", run.label);
        }
    }
}
