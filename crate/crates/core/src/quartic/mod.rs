//! Binary quartic forms `f = c0 x^4 + c1 x^3 y + c2 x^2 y^2 + c3 x y^3 + c4 y^4`
//! under `G = PGL_2`.
//!
//! `b` uses the classical term `9 c1 c2 c3`. With a `9 c2 c3 c4` term the form
//! `x y (x - y)^2`, which has a double root, would get a nonzero discriminant,
//! and `b` would not be `G`-invariant.

mod pgl2;
mod reduce;
mod ring;
mod stabilizer;

pub use pgl2::{act, act_matrix, Pgl2Elem};
pub use reduce::{reduce_to_weierstrass, WeierstrassReduction};
pub use ring::{CoeffRing, DualNumber, DualRing, PolyRing};
pub use stabilizer::{
    cubic_factor_degrees, geometric_stabilizer, is_closed_under_composition, splitting_degree,
    stabilizer, stabilizer_brute_force, stabilizer_in, two_torsion_count, GeometricStabilizer,
    Stabilizer, DEFAULT_BUDGET,
};

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, FieldElem, UniPoly};

/// Coefficients `(c0, .., c4)` of a binary quartic over some coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryQuartic<E> {
    pub c: [E; 5],
}

impl<E: Clone> BinaryQuartic<E> {
    pub fn new(c: [E; 5]) -> Self {
        BinaryQuartic { c }
    }

    pub fn map<F, T>(&self, f: F) -> BinaryQuartic<T>
    where
        F: Fn(&E) -> T,
    {
        BinaryQuartic { c: [f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3]), f(&self.c[4])] }
    }
}

impl BinaryQuartic<FieldElem> {
    pub fn from_ints(field: &Field, c: [i64; 5]) -> Self {
        BinaryQuartic { c: c.map(|x| field.from_int(x)) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// `y (x^3 + a x y^2 + b y^3)`.
    pub fn weierstrass(a: FieldElem, b: FieldElem) -> Self {
        BinaryQuartic { c: [FieldElem::ZERO, FieldElem::ONE, FieldElem::ZERO, a, b] }
    }

    /// The quartic whose coefficients are the base-`q` digits of `index`,
    /// `c0` most significant: lexicographic order on `(c0, .., c4)`.
    pub fn from_index(field: &Field, index: u64) -> Self {
        let q = field.q();
        let mut c = [FieldElem::ZERO; 5];
        let mut r = index;
        for i in (0..5).rev() {
            c[i] = field.element(r % q);
            r /= q;
        }
        BinaryQuartic { c }
    }

    pub fn index(&self, field: &Field) -> u64 {
        self.c.iter().fold(0, |acc, x| acc * field.q() + x.index())
    }

    pub fn embed(&self, e: &Embedding) -> Self {
        self.map(|&x| e.map(x))
    }

    /// `f(x, 1)` as a polynomial in `x`.
    pub fn dehomogenize(&self) -> UniPoly {
        UniPoly::from_coeffs(self.c.iter().rev().copied().collect())
    }

    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        serde_json::Value::from(self.c.iter().map(|&x| field.to_json(x)).collect::<Vec<_>>())
    }

    pub fn display(&self, field: &Field) -> String {
        let s: Vec<_> = self.c.iter().map(|&x| field.display(x)).collect();
        format!("({})", s.join(", "))
    }

    pub fn parse(field: &Field, s: &str) -> Result<Self> {
        let parts: Vec<_> = s.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Parse(format!("a quartic needs 5 coefficients, got {}", parts.len())));
        }
        let mut c = [FieldElem::ZERO; 5];
        for (i, t) in parts.iter().enumerate() {
            c[i] = field.parse(t)?;
        }
        Ok(BinaryQuartic { c })
    }
}

/// `(a, b, disc)` with `disc = -(4 a^3 + 27 b^2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants<E> {
    pub a: E,
    pub b: E,
    pub disc: E,
}

/// The discriminant `-(4 a^3 + 27 b^2)`.
pub fn discriminant<R: CoeffRing>(ring: &R, a: &R::Elem, b: &R::Elem) -> R::Elem {
    let a3 = ring.mul(&ring.mul(a, a), a);
    let b2 = ring.mul(b, b);
    ring.neg(&ring.add(&ring.scale_int(&a3, 4), &ring.scale_int(&b2, 27)))
}

pub fn invariants<R: CoeffRing>(ring: &R, f: &BinaryQuartic<R::Elem>) -> Invariants<R::Elem> {
    let [c0, c1, c2, c3, c4] = &f.c;
    let m = |x: &R::Elem, y: &R::Elem| ring.mul(x, y);
    let c0c4 = m(c0, c4);
    let c1c3 = m(c1, c3);
    let c2c2 = m(c2, c2);
    // a = -(1/3)(12 c0 c4 - 3 c1 c3 + c2^2)
    let inner_a = ring.add(&ring.sub(&ring.scale_int(&c0c4, 12), &ring.scale_int(&c1c3, 3)), &c2c2);
    let a = ring.mul(&ring.ratio(-1, 3), &inner_a);
    // b = -(1/27)(72 c0 c2 c4 + 9 c1 c2 c3 - 27 c0 c3^2 - 27 c1^2 c4 - 2 c2^3)
    let t1 = ring.scale_int(&m(&c0c4, c2), 72);
    let t2 = ring.scale_int(&m(&c1c3, c2), 9);
    let t3 = ring.scale_int(&m(c0, &m(c3, c3)), 27);
    let t4 = ring.scale_int(&m(&m(c1, c1), c4), 27);
    let t5 = ring.scale_int(&m(&c2c2, c2), 2);
    let inner_b = ring.sub(&ring.sub(&ring.sub(&ring.add(&t1, &t2), &t3), &t4), &t5);
    let b = ring.mul(&ring.ratio(-1, 27), &inner_b);
    let disc = discriminant(ring, &a, &b);
    Invariants { a, b, disc }
}

/// Root-multiplicity pattern of a quartic over the algebraic closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuarticType {
    T1111,
    T112,
    T13,
    T22,
    T4,
    Zero,
}

impl QuarticType {
    pub const ALL: [QuarticType; 6] = [
        QuarticType::T1111,
        QuarticType::T112,
        QuarticType::T13,
        QuarticType::T22,
        QuarticType::T4,
        QuarticType::Zero,
    ];

    /// Stable types: at least one simple root.
    pub fn is_regular(self) -> bool {
        matches!(self, QuarticType::T1111 | QuarticType::T112 | QuarticType::T13)
    }

    pub fn label(self) -> &'static str {
        match self {
            QuarticType::T1111 => "(1,1,1,1)",
            QuarticType::T112 => "(1,1,2)",
            QuarticType::T13 => "(1,3)",
            QuarticType::T22 => "(2,2)",
            QuarticType::T4 => "(4)",
            QuarticType::Zero => "Zero",
        }
    }

    fn from_multiplicities(m: &[u32]) -> QuarticType {
        match m {
            [1, 1, 1, 1] => QuarticType::T1111,
            [1, 1, 2] => QuarticType::T112,
            [1, 3] => QuarticType::T13,
            [2, 2] => QuarticType::T22,
            [4] => QuarticType::T4,
            other => unreachable!("multiplicities {other:?} do not partition 4"),
        }
    }
}

impl fmt::Display for QuarticType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for QuarticType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Sorted multiplicities of the geometric roots of a nonzero quartic.
pub fn root_multiplicities(field: &Field, f: &BinaryQuartic<FieldElem>) -> Vec<u32> {
    let g = f.dehomogenize();
    let deg = g.degree().expect("nonzero quartic");
    let mut mult = Vec::with_capacity(4);
    if deg < 4 {
        mult.push((4 - deg) as u32);
    }
    for (h, m) in g.squarefree_decomposition(field) {
        for _ in 0..h.degree().unwrap() {
            mult.push(m);
        }
    }
    mult.sort_unstable();
    mult
}

pub fn classify_type(field: &Field, f: &BinaryQuartic<FieldElem>) -> QuarticType {
    if f.is_zero() {
        return QuarticType::Zero;
    }
    QuarticType::from_multiplicities(&root_multiplicities(field, f))
}

/// The 5 x 3 matrix of `X -> X.f` on the basis `(alpha, beta, gamma)` of
/// `sl_2`, `X = [[alpha, beta], [gamma, -alpha]]`, where
/// `(X.f) = f_x (alpha x + gamma y) + f_y (beta x - alpha y)`.
/// Row `j` is the coefficient of `x^(4-j) y^j`.
pub fn lie_matrix<R: CoeffRing>(ring: &R, f: &BinaryQuartic<R::Elem>) -> [[R::Elem; 3]; 5] {
    let c = |i: i64| -> R::Elem {
        if (0..5).contains(&i) {
            f.c[i as usize].clone()
        } else {
            ring.zero()
        }
    };
    std::array::from_fn(|j| {
        let j = j as i64;
        [
            ring.scale_int(&c(j), 4 - 2 * j),
            ring.scale_int(&c(j + 1), j + 1),
            ring.scale_int(&c(j - 1), 5 - j),
        ]
    })
}

/// Dimension of the infinitesimal stabilizer `{X in sl_2 : X.f = 0}`.
pub fn lie_stabilizer_dim(field: &Field, f: &BinaryQuartic<FieldElem>) -> u32 {
    let mut m: Vec<[FieldElem; 3]> = lie_matrix(field, f).to_vec();
    let mut rank = 0usize;
    for col in 0..3 {
        let Some(piv) = (rank..5).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let inv = field.inv(m[rank][col]).unwrap();
        for r in 0..5 {
            if r != rank && !m[r][col].is_zero() {
                let t = field.mul(m[r][col], inv);
                for cc in 0..3 {
                    m[r][cc] = field.sub(m[r][cc], field.mul(t, m[rank][cc]));
                }
            }
        }
        rank += 1;
    }
    3 - rank as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    #[test]
    fn weierstrass_form_has_its_invariants() {
        let f = Field::new(7, 1).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                let inv = invariants(&f, &BinaryQuartic::weierstrass(a, b));
                assert_eq!((inv.a, inv.b), (a, b));
            }
        }
    }

    #[test]
    fn square_of_xy_invariants() {
        let f = Field::new(11, 1).unwrap();
        for c in f.units() {
            let q = BinaryQuartic::new([f.zero(), f.zero(), c, f.zero(), f.zero()]);
            let inv = invariants(&f, &q);
            let c2 = f.mul(c, c);
            assert_eq!(inv.a, f.mul(f.ratio(-1, 3), c2));
            assert_eq!(inv.b, f.mul(f.ratio(2, 27), f.mul(c2, c)));
            assert!(inv.disc.is_zero());
        }
    }

    #[test]
    fn double_root_form_has_zero_discriminant() {
        let f = f5();
        // x y (x - y)^2 = x^3 y - 2 x^2 y^2 + x y^3
        let q = BinaryQuartic::from_ints(&f, [0, 1, -2, 1, 0]);
        let inv = invariants(&f, &q);
        assert_eq!(inv.a, f.ratio(-1, 3));
        assert_eq!(inv.b, f.ratio(2, 27));
        assert!(inv.disc.is_zero());
    }

    #[test]
    fn classification_examples() {
        let f = f5();
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [0, 1, 0, 0, 0])), QuarticType::T13);
        for c in 1..5 {
            let q = BinaryQuartic::from_ints(&f, [0, c, -2 * c, c, 0]);
            assert_eq!(classify_type(&f, &q), QuarticType::T112);
        }
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [1, 0, 0, 0, 1])), QuarticType::T1111);
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [0, 0, 1, 0, 0])), QuarticType::T22);
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [0, 0, 0, 0, 3])), QuarticType::T4);
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [2, 0, 0, 0, 0])), QuarticType::T4);
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [0; 5])), QuarticType::Zero);
        // (x^2 + 2 y^2)^2 has two conjugate double roots
        assert_eq!(classify_type(&f, &BinaryQuartic::from_ints(&f, [1, 0, 4, 0, 4])), QuarticType::T22);
    }

    #[test]
    fn lie_dimensions() {
        let f = f5();
        assert_eq!(lie_stabilizer_dim(&f, &BinaryQuartic::from_ints(&f, [0, 1, 0, 1, 0])), 0);
        assert_eq!(lie_stabilizer_dim(&f, &BinaryQuartic::from_ints(&f, [0, 0, 1, 0, 0])), 1);
        assert_eq!(lie_stabilizer_dim(&f, &BinaryQuartic::from_ints(&f, [0, 0, 0, 0, 1])), 1);
        assert_eq!(lie_stabilizer_dim(&f, &BinaryQuartic::from_ints(&f, [0; 5])), 3);
    }

    #[test]
    fn index_roundtrip() {
        let f = Field::new(7, 1).unwrap();
        for i in [0u64, 1, 2400, 16806] {
            assert_eq!(BinaryQuartic::from_index(&f, i).index(&f), i);
        }
        assert_eq!(BinaryQuartic::from_index(&f, 1).c[4], f.one());
    }

    #[test]
    fn parse_quartic() {
        let f = f5();
        let q = BinaryQuartic::parse(&f, "0,1,0,-1,0").unwrap();
        assert_eq!(q, BinaryQuartic::from_ints(&f, [0, 1, 0, 4, 0]));
        assert!(BinaryQuartic::parse(&f, "1,2,3").is_err());
    }
}
