//! Finite fields `F_{p^k}` and univariate polynomials over them.
//!
//! Elements are stored packed: the coefficient vector `(e_0, .., e_{k-1})` of
//! an element over `F_p` (with respect to the power basis of the modulus root)
//! is read as the base-`p` integer `e_0 + e_1 p + .. + e_{k-1} p^{k-1}`. This
//! makes enumeration order, hashing and serialization trivial, and keeps
//! `FieldElem` a `Copy` word.

mod embed;
mod factor;
mod poly;

pub use embed::Embedding;
pub use factor::{irreducible_count, is_irreducible, Factorization};
pub use poly::UniPoly;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest extension degree supported by the packed representation.
pub const MAX_EXT_DEGREE: u32 = 62;

/// Fields with at most this many elements get log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 20;

/// A field element in packed base-`p` form. Only meaningful together with the
/// [`Field`] that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct FieldElem(pub u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Position in the lexicographic enumeration of the field.
    #[inline]
    pub fn index(self) -> u64 {
        self.0
    }
}

struct LogTables {
    log: Vec<u32>,
    exp: Vec<u32>,
}

struct FieldInner {
    p: u64,
    k: u32,
    q: u64,
    /// Monic modulus, constant term first, length `k + 1`.
    modulus: Vec<u64>,
    seed: u64,
    tables: Option<LogTables>,
}

/// The finite field `F_q`, `q = p^k`, `p > 3`. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (mod {:?})", self.0.p, self.0.k, self.0.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.k == other.0.k && self.0.modulus == other.0.modulus
    }
}

impl Eq for Field {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factors of `n`, without multiplicity, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
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

/// Splits a prime power `q` into `(p, k)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    let ps = prime_factors(q);
    if ps.len() != 1 {
        return None;
    }
    let p = ps[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p, k))
}

fn modulus_cache() -> &'static Mutex<HashMap<(u64, u32), Vec<u64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Vec<u64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Smallest monic irreducible of degree `k` over `F_p`, where candidates are
/// ordered by the packed value of their non-leading coefficients.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    if let Some(m) = modulus_cache().lock().unwrap().get(&(p, k)) {
        return m.clone();
    }
    let prime = Field::prime_unchecked(p);
    let mut j: u64 = 0;
    let found = loop {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut r = j;
        for _ in 0..k {
            coeffs.push(FieldElem(r % p));
            r /= p;
        }
        coeffs.push(FieldElem::ONE);
        let f = UniPoly::from_coeffs(coeffs);
        if is_irreducible(&f, &prime) {
            break f.coeffs().iter().map(|c| c.0).collect::<Vec<_>>();
        }
        j += 1;
    };
    modulus_cache().lock().unwrap().insert((p, k), found.clone());
    found
}

impl Field {
    /// `F_{p^k}` with the canonical modulus and factoring seed 0.
    pub fn new(p: u64, k: u32) -> Result<Field> {
        Field::with_seed(p, k, 0)
    }

    /// `F_{p^k}`; the seed only drives randomized factoring internals.
    pub fn with_seed(p: u64, k: u32, seed: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p <= 3 {
            return Err(Error::InvalidField(format!(
                "characteristic {p} is excluded: the invariant theory needs char != 2, 3"
            )));
        }
        if p >= 1 << 32 {
            return Err(Error::InvalidField(format!("characteristic {p} exceeds 32 bits")));
        }
        if k == 0 || k > MAX_EXT_DEGREE {
            return Err(Error::InvalidField(format!("extension degree {k} out of range")));
        }
        let q = (p as u128).checked_pow(k).filter(|&q| q < (1u128 << 63)).ok_or_else(|| {
            Error::InvalidField(format!("{p}^{k} does not fit in 63 bits"))
        })? as u64;
        let modulus = if k == 1 { vec![0, 1] } else { smallest_irreducible(p, k) };
        let mut inner = FieldInner { p, k, q, modulus, seed, tables: None };
        if k > 1 && q <= TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(Field(Arc::new(inner)))
    }

    /// The field with `q` elements.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::InvalidField(format!("{q} is not a prime power")))?;
        Field::new(p, k)
    }

    fn prime_unchecked(p: u64) -> Field {
        Field(Arc::new(FieldInner { p, k: 1, q: p, modulus: vec![0, 1], seed: 0, tables: None }))
    }

    /// `F_{q^m}` over this field, with the same seed.
    pub fn extension(&self, m: u32) -> Result<Field> {
        Field::with_seed(self.0.p, self.0.k * m, self.0.seed)
    }

    /// The prime subfield `F_p`.
    pub fn prime_field(&self) -> Field {
        if self.0.k == 1 {
            return self.clone();
        }
        Field::with_seed(self.0.p, 1, self.0.seed).expect("valid characteristic")
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    pub fn seed(&self) -> u64 {
        self.0.seed
    }

    /// The defining modulus over `F_p` (monic, constant term first).
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.0.p as i64) as u64)
    }

    /// The class of the modulus variable (a generator of the field over `F_p`).
    pub fn generator(&self) -> FieldElem {
        if self.0.k == 1 {
            // Any element generates F_p over itself; use the canonical root of x.
            FieldElem::ZERO
        } else {
            FieldElem(self.0.p)
        }
    }

    /// Element with the given coefficient vector over `F_p` (constant term
    /// first). Coefficients are reduced mod `p`.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem> {
        if coeffs.len() > self.0.k as usize {
            return Err(Error::Parse(format!(
                "element has {} coefficients, field degree is {}",
                coeffs.len(),
                self.0.k
            )));
        }
        let p = self.0.p as i64;
        let mut v = 0u64;
        for &c in coeffs.iter().rev() {
            v = v * self.0.p + c.rem_euclid(p) as u64;
        }
        Ok(FieldElem(v))
    }

    /// Coefficient vector over `F_p`, constant term first, length `k`.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.0.k as usize);
        let mut v = x.0;
        for _ in 0..self.0.k {
            out.push(v % self.0.p);
            v /= self.0.p;
        }
        out
    }

    /// The element at position `i` of the lexicographic enumeration.
    pub fn element(&self, i: u64) -> FieldElem {
        debug_assert!(i < self.0.q);
        FieldElem(i)
    }

    /// All `q` elements in lexicographic order of their coefficient vectors.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.0.q).map(FieldElem)
    }

    /// Elements from position `start` (restartable enumeration).
    pub fn elements_from(&self, start: u64) -> impl Iterator<Item = FieldElem> {
        (start.min(self.0.q)..self.0.q).map(FieldElem)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (1..self.0.q).map(FieldElem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.0.q))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.0.p;
        if self.0.k == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.k {
            let mut d = x % p + y % p;
            if d >= p {
                d -= p;
            }
            out += d * place;
            x /= p;
            y /= p;
            place = place.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.0.p;
        if self.0.k == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.0.k {
            let d = x % p;
            if d != 0 {
                out += (p - d) * place;
            }
            x /= p;
            place = place.wrapping_mul(p);
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.0.k == 1 {
            let p = self.0.p;
            return FieldElem(if a.0 >= b.0 { a.0 - b.0 } else { a.0 + p - b.0 });
        }
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.0.k == 1 {
            return FieldElem(a.0 * b.0 % self.0.p);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if let Some(t) = &self.0.tables {
            let n = self.0.q as usize - 1;
            let mut e = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            if e >= n {
                e -= n;
            }
            return FieldElem(t.exp[e] as u64);
        }
        self.mul_slow(a, b)
    }

    /// Multiplication by an integer (the image of `n` in `F_p`).
    #[inline]
    pub fn mul_int(&self, a: FieldElem, n: i64) -> FieldElem {
        self.mul(a, self.from_int(n))
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &self.0;
        let (p, k) = (inner.p, inner.k as usize);
        let mut da = [0u64; MAX_EXT_DEGREE as usize];
        let mut db = [0u64; MAX_EXT_DEGREE as usize];
        let (mut x, mut y) = (a.0, b.0);
        for i in 0..k {
            da[i] = x % p;
            db[i] = y % p;
            x /= p;
            y /= p;
        }
        let mut prod = [0u64; 2 * MAX_EXT_DEGREE as usize];
        for i in 0..k {
            if da[i] == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
            }
        }
        let m = &inner.modulus;
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                // x^i = x^(i-k) * x^k and x^k = -sum m_j x^j
                let t = c * m[j] % p;
                prod[i - k + j] = (prod[i - k + j] + p - t) % p;
            }
        }
        let mut out = 0u64;
        for i in (0..k).rev() {
            out = out * p + prod[i];
        }
        FieldElem(out)
    }

    pub fn square(&self, a: FieldElem) -> FieldElem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElem, mut e: u128) -> FieldElem {
        if self.0.k > 1 {
            if let Some(t) = &self.0.tables {
                if a.0 == 0 {
                    return if e == 0 { FieldElem::ONE } else { FieldElem::ZERO };
                }
                let n = self.0.q as u128 - 1;
                let l = (t.log[a.0 as usize] as u128 * (e % n)) % n;
                return FieldElem(t.exp[l as usize] as u64);
            }
        }
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        if self.0.k == 1 {
            let p = self.0.p as i64;
            let (mut r0, mut r1) = (p, a.0 as i64);
            let (mut s0, mut s1) = (0i64, 1i64);
            while r1 != 0 {
                let t = r0 / r1;
                (r0, r1) = (r1, r0 - t * r1);
                (s0, s1) = (s1, s0 - t * s1);
            }
            return Some(FieldElem(s0.rem_euclid(p) as u64));
        }
        if let Some(t) = &self.0.tables {
            let n = self.0.q as usize - 1;
            let l = t.log[a.0 as usize] as usize;
            return Some(FieldElem(t.exp[(n - l) % n] as u64));
        }
        Some(self.pow(a, self.0.q as u128 - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `num / den` for integers with `den` prime to `p`.
    pub fn ratio(&self, num: i64, den: i64) -> FieldElem {
        let d = self.inv(self.from_int(den)).expect("denominator prime to the characteristic");
        self.mul(self.from_int(num), d)
    }

    /// The Frobenius `x -> x^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.0.p as u128)
    }

    /// `x -> x^(p^j)`.
    pub fn frobenius_pow(&self, a: FieldElem, j: u32) -> FieldElem {
        let mut x = a;
        for _ in 0..(j % self.0.k) {
            x = self.frobenius(x);
        }
        x
    }

    /// Euler's criterion.
    pub fn is_square(&self, a: FieldElem) -> bool {
        a.0 == 0 || self.pow(a, (self.0.q as u128 - 1) / 2) == FieldElem::ONE
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FieldElem) -> u64 {
        assert!(!a.is_zero());
        let mut n = self.0.q - 1;
        for r in prime_factors(self.0.q - 1) {
            while n % r == 0 && self.pow(a, (n / r) as u128) == FieldElem::ONE {
                n /= r;
            }
        }
        n
    }

    /// The coefficient vector of `x`, as signed integers, for JSON output.
    pub fn to_json(&self, x: FieldElem) -> serde_json::Value {
        serde_json::Value::from(self.coeffs(x))
    }

    /// Human-readable form: an integer for prime fields, otherwise the
    /// coefficient vector joined by `:` (constant term first).
    pub fn display(&self, x: FieldElem) -> String {
        if self.0.k == 1 {
            x.0.to_string()
        } else {
            self.coeffs(x).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
        }
    }

    /// Parses an integer (prime subfield) or a `:`-separated coefficient vector.
    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let parts: std::result::Result<Vec<i64>, _> =
            s.trim().split(':').map(|t| t.trim().parse::<i64>()).collect();
        let parts = parts.map_err(|e| Error::Parse(format!("bad field element {s:?}: {e}")))?;
        self.from_coeffs(&parts)
    }
}

fn build_tables(inner: &FieldInner) -> LogTables {
    let field = Field(Arc::new(FieldInner {
        p: inner.p,
        k: inner.k,
        q: inner.q,
        modulus: inner.modulus.clone(),
        seed: inner.seed,
        tables: None,
    }));
    let n = inner.q - 1;
    let factors = prime_factors(n);
    let gen = (1..inner.q)
        .map(FieldElem)
        .find(|&g| factors.iter().all(|&r| field.pow(g, (n / r) as u128) != FieldElem::ONE))
        .expect("multiplicative group is cyclic");
    let mut log = vec![0u32; inner.q as usize];
    let mut exp = vec![0u32; n as usize];
    let mut x = FieldElem::ONE;
    for i in 0..n {
        exp[i as usize] = x.0 as u32;
        log[x.0 as usize] = i as u32;
        x = field.mul_slow(x, gen);
    }
    LogTables { log, exp }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.mul(f.from_int(2), f.from_int(3)), f.one());
        assert_eq!(f.inv(f.from_int(2)), Some(f.from_int(3)));
        assert_eq!(f.neg(f.from_int(1)), f.from_int(4));
        assert_eq!(f.ratio(1, 3), f.from_int(2));
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(matches!(Field::new(4, 1), Err(Error::InvalidField(_))));
        let err = Field::new(3, 2).unwrap_err().to_string();
        assert!(err.contains("char != 2, 3"), "{err}");
        assert!(Field::new(2, 1).is_err());
        assert!(Field::of_order(12).is_err());
    }

    #[test]
    fn frobenius_fixes_the_extension() {
        let f = Field::new(5, 2).unwrap();
        let t = f.generator();
        assert_eq!(f.pow(t, 25), t);
        assert_ne!(f.pow(t, 5), t);
        assert_eq!(f.frobenius_pow(t, 2), t);
    }

    #[test]
    fn smallest_modulus_is_stable() {
        // x^2 + 2 is the first irreducible quadratic over F_5 in packed order.
        assert_eq!(Field::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(Field::new(7, 2).unwrap().modulus(), &[1, 0, 1]);
        // seed does not change the modulus
        assert_eq!(Field::with_seed(5, 3, 99).unwrap().modulus(), Field::new(5, 3).unwrap().modulus());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let f = Field::new(7, 1).unwrap();
        let all: Vec<_> = f.elements().collect();
        assert_eq!(all.len(), 7);
        assert_eq!(all[0], f.zero());
        assert_eq!(all[6], f.from_int(6));
        assert_eq!(Field::new(5, 2).unwrap().elements().count(), 25);
        assert_eq!(Field::new(5, 1).unwrap().elements().count(), 5);
        assert_eq!(f.elements_from(5).count(), 2);
    }

    #[test]
    fn squares() {
        let f = Field::new(5, 1).unwrap();
        assert!(f.is_square(f.from_int(0)));
        assert!(!f.is_square(f.from_int(2)));
        assert!(f.is_square(f.from_int(4)));
        let g = Field::new(5, 2).unwrap();
        // every element of F_5 is a square in F_25
        for x in f.elements() {
            assert!(g.is_square(x));
        }
        assert_eq!(g.units().filter(|&x| g.is_square(x)).count(), 12);
    }

    fn check_axioms(f: &Field, trials: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(f.q());
        for _ in 0..trials {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.mul(a, b), f.mul(b, a));
            assert_eq!(f.sub(f.add(a, b), b), a);
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            assert_eq!(f.frobenius_pow(a, f.k()), a);
        }
    }

    #[test]
    fn field_axioms_hold() {
        for (p, k) in [(5, 1), (7, 1), (5, 2), (7, 3), (5, 12), (11, 2)] {
            check_axioms(&Field::new(p, k).unwrap(), 1000);
        }
    }

    #[test]
    fn table_and_slow_multiplication_agree() {
        let f = Field::new(5, 4).unwrap();
        for a in f.elements().step_by(7) {
            for b in f.elements().step_by(11) {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn parse_and_display_roundtrip() {
        let f = Field::new(5, 2).unwrap();
        let x = f.parse("3:4").unwrap();
        assert_eq!(f.coeffs(x), vec![3, 4]);
        assert_eq!(f.display(x), "3:4");
        assert!(f.parse("1:2:3").is_err());
        let g = Field::new(7, 1).unwrap();
        assert_eq!(g.parse("-1").unwrap(), g.from_int(6));
    }
}
