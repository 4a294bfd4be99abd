//! Sections of `V(E, L)` for split bundles `E = O(n) + O` on `P^1`,
//! fiberwise regularity, Harder-Narasimhan strata masses and Monte Carlo
//! estimates of the average Selmer mass.
//!
//! A section in stratum `(n, d)` is a quartic `sum c_i x^(4-i) y^i` with
//! `c_i` a section of `O((2 - i) n + 2 d)`, i.e. a polynomial in `t` of
//! degree at most that bound.

mod average;
mod mc;

pub use average::{
    bun_mass, case1_witness, case2_contribution, hn_average, selmer_bounds_report, AverageReport,
    Case1Report, Case2Report, SelmerBoundsReport, StratumEntry,
};
pub use mc::{
    combined_density_mc, minimality_rate_mc, regular_density_mc, sample_family, sample_section,
    sample_sections, substream, transversal_density_mc, Estimate, MIN_SAMPLES,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::family::WeierstrassFamily;
use crate::ff::{Embedding, Field, FieldElem, UniPoly};
use crate::pfield::ClosedPoint;
use crate::quartic::{invariants, lie_stabilizer_dim, BinaryQuartic, PolyRing};

/// A Harder-Narasimhan stratum: `E = O(n) + O` (up to twist) and `L = O(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleStratum {
    pub field: Field,
    pub n: u32,
    pub d: u32,
}

impl BundleStratum {
    pub fn new(field: &Field, n: u32, d: u32) -> BundleStratum {
        BundleStratum { field: field.clone(), n, d }
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn bounds(&self) -> [i64; 5] {
        section_space_dims(self.n, self.d).0
    }

    pub fn dim(&self) -> u64 {
        section_space_dims(self.n, self.d).1
    }

    /// `1 / |Aut(E)|`.
    pub fn aut_mass(&self) -> BigRational {
        aut_mass(self.q(), self.n)
    }
}

pub fn aut_mass(q: u64, n: u32) -> BigRational {
    let q = BigInt::from(q);
    let den = if n == 0 { q.pow(3) - &q } else { (&q - 1) * q.pow(n + 1) };
    BigRational::new(BigInt::one(), den)
}

/// Degree bounds `(2 - i) n + 2 d` and the total dimension of the section
/// space (negative bounds contribute nothing).
pub fn section_space_dims(n: u32, d: u32) -> ([i64; 5], u64) {
    let bounds: [i64; 5] = std::array::from_fn(|i| (2 - i as i64) * n as i64 + 2 * d as i64);
    let dim = bounds.iter().map(|&b| (b + 1).max(0) as u64).sum();
    (bounds, dim)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarticSection {
    pub n: u32,
    pub d: u32,
    pub c: [UniPoly; 5],
}

impl QuarticSection {
    pub fn new(n: u32, d: u32, c: [UniPoly; 5]) -> Result<QuarticSection> {
        let (bounds, _) = section_space_dims(n, d);
        for (p, &b) in c.iter().zip(&bounds) {
            if let Some(deg) = p.degree() {
                if deg as i64 > b {
                    return Err(Error::DegreeBound { degree: deg, bound: b });
                }
            }
        }
        Ok(QuarticSection { n, d, c })
    }

    pub fn from_ints(field: &Field, n: u32, d: u32, c: [&[i64]; 5]) -> Result<QuarticSection> {
        QuarticSection::new(n, d, c.map(|x| UniPoly::from_ints(field, x)))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(UniPoly::is_zero)
    }

    pub fn bounds(&self) -> [i64; 5] {
        section_space_dims(self.n, self.d).0
    }

    pub fn as_quartic(&self) -> BinaryQuartic<UniPoly> {
        BinaryQuartic::new(self.c.clone())
    }

    /// Fiber in the chart at infinity: the coefficient of `t^bound` in each `c_i`.
    pub fn fiber_at_infinity(&self) -> BinaryQuartic<FieldElem> {
        let bounds = self.bounds();
        BinaryQuartic::new(std::array::from_fn(|i| {
            if bounds[i] < 0 {
                FieldElem::ZERO
            } else {
                self.c[i].coeff(bounds[i] as usize)
            }
        }))
    }

    /// Fiberwise invariants `(A, B)`, sections of `O(4d)` and `O(6d)`.
    pub fn invariants(&self, field: &Field) -> Result<WeierstrassFamily> {
        let inv = invariants(&PolyRing::new(field), &self.as_quartic());
        WeierstrassFamily::new(self.d, inv.a, inv.b)
    }

    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "d": self.d,
            "c": self.c.iter().map(|p| p.to_json(field)).collect::<Vec<_>>(),
        })
    }
}

/// The fiber of `s` at a closed point, over its residue field.
pub fn fiber_at(field: &Field, s: &QuarticSection, point: &ClosedPoint) -> Result<(Field, BinaryQuartic<FieldElem>)> {
    match point {
        ClosedPoint::Infinity => Ok((field.clone(), s.fiber_at_infinity())),
        ClosedPoint::Finite(p) => {
            let e = p.degree().unwrap() as u32;
            let k = field.extension(e)?;
            let emb = Embedding::new(field, &k)?;
            let alpha = emb.map_poly(p).roots(&k)?.first().map(|r| r.0).ok_or_else(|| {
                Error::InvalidArgument("closed point has no root in its residue field".into())
            })?;
            let c = std::array::from_fn(|i| emb.map_poly(&s.c[i]).eval(alpha, &k));
            Ok((k, BinaryQuartic::new(c)))
        }
    }
}

/// True iff every fiber of `s`, at every closed point of `P^1`, is a stable
/// quartic.
///
/// A fiber is stable exactly when its Lie matrix has rank 3, so the finite
/// fibers are all stable iff the ten 3x3 minors of the Lie matrix over
/// `F_q[t]` have no common zero, i.e. coprime minors. The fiber at infinity
/// is checked directly.
pub fn is_regular_section(field: &Field, s: &QuarticSection) -> Result<bool> {
    if s.is_zero() {
        return Err(Error::ZeroSection);
    }
    if lie_stabilizer_dim(field, &s.fiber_at_infinity()) != 0 {
        return Ok(false);
    }
    Ok(finite_fibers_regular(field, s))
}

fn finite_fibers_regular(field: &Field, s: &QuarticSection) -> bool {
    let rows = poly_lie_matrix(field, &s.c);
    let mut g = UniPoly::zero();
    for (a, b, c) in MINOR_ROWS {
        let m = det3(field, &rows[a], &rows[b], &rows[c]);
        if m.is_zero() {
            continue;
        }
        g = if g.is_zero() { m.monic(field) } else { g.gcd(&m, field) };
        if g.degree() == Some(0) {
            return true;
        }
    }
    false
}

// Row triples ordered so that coprime pairs tend to show up early.
const MINOR_ROWS: [(usize, usize, usize); 10] =
    [(0, 2, 4), (0, 1, 2), (2, 3, 4), (1, 2, 3), (0, 1, 3), (1, 3, 4), (0, 1, 4), (0, 3, 4), (0, 2, 3), (1, 2, 4)];

fn poly_lie_matrix(field: &Field, c: &[UniPoly; 5]) -> [[UniPoly; 3]; 5] {
    let zero = UniPoly::zero();
    std::array::from_fn(|j| {
        let j = j as i64;
        let at = |i: i64| if (0..5).contains(&i) { &c[i as usize] } else { &zero };
        [
            at(j).scale(field.from_int(4 - 2 * j), field),
            at(j + 1).scale(field.from_int(j + 1), field),
            at(j - 1).scale(field.from_int(5 - j), field),
        ]
    })
}

fn det3(field: &Field, r0: &[UniPoly; 3], r1: &[UniPoly; 3], r2: &[UniPoly; 3]) -> UniPoly {
    let m2 = |a: &UniPoly, b: &UniPoly, c: &UniPoly, d: &UniPoly| a.mul(b, field).sub(&c.mul(d, field), field);
    let t0 = r0[0].mul(&m2(&r1[1], &r2[2], &r1[2], &r2[1]), field);
    let t1 = r0[1].mul(&m2(&r1[0], &r2[2], &r1[2], &r2[0]), field);
    let t2 = r0[2].mul(&m2(&r1[0], &r2[1], &r1[1], &r2[0]), field);
    t0.sub(&t1, field).add(&t2, field)
}
