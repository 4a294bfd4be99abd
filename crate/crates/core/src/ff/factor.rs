//! Squarefree, distinct-degree and equal-degree factorization over `F_q`.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{prime_factors, Field, FieldElem, UniPoly};
use crate::error::{Error, Result};

/// `f = unit * prod factor^mult`, factors monic irreducible, sorted by degree
/// then coefficient vector (constant term first).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: FieldElem,
    pub factors: Vec<(UniPoly, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn expand(&self, f: &Field) -> UniPoly {
        self.factors
            .iter()
            .fold(UniPoly::constant(self.unit), |acc, (g, m)| acc.mul(&g.pow(*m as u64, f), f))
    }

    /// Degrees of the irreducible factors, repeated by multiplicity.
    pub fn degree_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat(g.degree().unwrap()).take(*m as usize))
            .collect();
        v.sort_unstable();
        v
    }
}

/// `x^(q^i) mod m` for i = 1..=n, each obtained from the previous by a q-th power.
fn frobenius_iterates(m: &UniPoly, n: usize, f: &Field) -> Vec<UniPoly> {
    let mut out = Vec::with_capacity(n);
    let mut cur = UniPoly::x().rem(m, f);
    for _ in 0..n {
        cur = cur.pow_mod(f.q() as u128, m, f);
        out.push(cur.clone());
    }
    out
}

/// Rabin's irreducibility test.
pub fn is_irreducible(g: &UniPoly, f: &Field) -> bool {
    let n = match g.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let g = g.monic(f);
    let iters = frobenius_iterates(&g, n, f);
    let x = UniPoly::x();
    if iters[n - 1] != x.rem(&g, f) {
        return false;
    }
    for r in prime_factors(n as u64) {
        let h = &iters[n / r as usize - 1];
        if !h.sub(&x, f).is_coprime(&g, f) {
            return false;
        }
    }
    true
}

/// The `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(g: &UniPoly, f: &Field) -> UniPoly {
    let p = f.p() as usize;
    // a^(1/p) = a^(q/p) on F_q
    let e = (f.q() / f.p()) as u128;
    let n = g.degree().unwrap_or(0) / p;
    UniPoly::from_coeffs((0..=n).map(|i| f.pow(g.coeff(i * p), e)).collect())
}

/// Squarefree factorization of a monic polynomial: pairs (squarefree monic,
/// multiplicity), multiplicities distinct.
fn squarefree_parts(g: &UniPoly, f: &Field) -> Vec<(UniPoly, u32)> {
    let mut out = Vec::new();
    if g.degree().unwrap_or(0) == 0 {
        return out;
    }
    let p = f.p() as u32;
    let dg = g.derivative(f);
    if dg.is_zero() {
        for (h, m) in squarefree_parts(&pth_root(g, f), f) {
            out.push((h, m * p));
        }
        return out;
    }
    let mut c = g.gcd(&dg, f);
    let mut w = g.exact_div(&c, f);
    let mut i = 1u32;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd(&c, f);
        let z = w.exact_div(&y, f);
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        w = y;
        c = c.exact_div(&w, f);
        i += 1;
    }
    if c.degree().unwrap_or(0) > 0 {
        for (h, m) in squarefree_parts(&pth_root(&c, f), f) {
            out.push((h, m * p));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial.
fn distinct_degree(g: &UniPoly, f: &Field) -> Vec<(UniPoly, usize)> {
    let mut out = Vec::new();
    let mut rest = g.clone();
    let x = UniPoly::x();
    let mut h = x.rem(&rest, f);
    let mut d = 0usize;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(f.q() as u128, &rest, f);
        let gd = h.sub(&x, f).gcd(&rest, f);
        if gd.degree().unwrap_or(0) > 0 {
            rest = rest.exact_div(&gd, f);
            h = h.rem(&rest, f);
            out.push((gd, d));
        }
    }
    if let Some(dr) = rest.degree() {
        if dr > 0 {
            out.push((rest, dr));
        }
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
fn equal_degree(g: &UniPoly, d: usize, f: &Field, rng: &mut ChaCha8Rng, out: &mut Vec<UniPoly>) {
    let n = g.degree().unwrap();
    if n == d {
        out.push(g.clone());
        return;
    }
    let half = (f.q() as u128 - 1) / 2;
    loop {
        let a = UniPoly::from_coeffs((0..n).map(|_| f.random(rng)).collect());
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        // a^((q^d - 1)/2) = (a * a^q * .. * a^(q^(d-1)))^((q-1)/2)
        let mut norm = a.rem(g, f);
        let mut cur = norm.clone();
        for _ in 1..d {
            cur = cur.pow_mod(f.q() as u128, g, f);
            norm = norm.mul_mod(&cur, g, f);
        }
        let b = norm.pow_mod(half, g, f).sub(&UniPoly::one(), f);
        let h = b.gcd(g, f);
        let dh = h.degree().unwrap_or(0);
        if dh > 0 && dh < n {
            equal_degree(&h, d, f, rng, out);
            equal_degree(&g.exact_div(&h, f), d, f, rng, out);
            return;
        }
    }
}

impl UniPoly {
    /// Complete factorization into monic irreducibles.
    pub fn factor(&self, f: &Field) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let unit = self.leading();
        let g = self.monic(f);
        let mut rng = ChaCha8Rng::seed_from_u64(f.seed() ^ 0x5eed_fac7);
        let mut factors = Vec::new();
        for (sq, m) in squarefree_parts(&g, f) {
            for (part, d) in distinct_degree(&sq, f) {
                let mut pieces = Vec::new();
                equal_degree(&part, d, f, &mut rng, &mut pieces);
                factors.extend(pieces.into_iter().map(|h| (h, m)));
            }
        }
        factors.sort_by(|(a, ma), (b, mb)| {
            a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())).then(ma.cmp(mb))
        });
        Ok(Factorization { unit, factors })
    }

    /// Roots in `f`, ascending, with multiplicities.
    pub fn roots(&self, f: &Field) -> Result<Vec<(FieldElem, u32)>> {
        let fac = self.factor(f)?;
        let mut roots: Vec<_> = fac
            .factors
            .iter()
            .filter(|(g, _)| g.degree() == Some(1))
            .map(|(g, m)| (f.neg(g.coeff(0)), *m))
            .collect();
        roots.sort_unstable();
        Ok(roots)
    }

    /// Squarefree decomposition of a nonzero polynomial: monic squarefree
    /// pieces with their multiplicities, ordered by multiplicity.
    pub fn squarefree_decomposition(&self, f: &Field) -> Vec<(UniPoly, u32)> {
        let mut v = squarefree_parts(&self.monic(f), f);
        v.sort_by_key(|(_, m)| *m);
        v
    }
}

fn mobius(mut n: u64) -> i32 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// Number of monic irreducible polynomials of degree `n` over `F_q`.
pub fn irreducible_count(q: u64, n: u32) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let q = BigUint::from(q);
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        match mobius(d as u64) {
            1 => plus += q.pow(n / d),
            -1 => minus += q.pow(n / d),
            _ => {}
        }
    }
    Ok((plus - minus) / BigUint::from(n))
}
