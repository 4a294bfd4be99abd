use std::fmt;

use super::{BinaryQuartic, CoeffRing};
use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, FieldElem};

/// An element of `PGL_2(F)`, stored as the representative whose first nonzero
/// entry (row-major) is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pgl2Elem {
    m: [[FieldElem; 2]; 2],
}

impl Pgl2Elem {
    pub fn identity() -> Pgl2Elem {
        Pgl2Elem { m: [[FieldElem::ONE, FieldElem::ZERO], [FieldElem::ZERO, FieldElem::ONE]] }
    }

    pub fn from_matrix(field: &Field, m: [[FieldElem; 2]; 2]) -> Result<Pgl2Elem> {
        if det(field, &m).is_zero() {
            return Err(Error::SingularMatrix);
        }
        let lead = [m[0][0], m[0][1], m[1][0], m[1][1]]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("nonsingular");
        let s = field.inv(lead).unwrap();
        Ok(Pgl2Elem { m: m.map(|row| row.map(|x| field.mul(x, s))) })
    }

    pub fn from_ints(field: &Field, m: [[i64; 2]; 2]) -> Result<Pgl2Elem> {
        Pgl2Elem::from_matrix(field, m.map(|row| row.map(|x| field.from_int(x))))
    }

    pub fn matrix(&self) -> [[FieldElem; 2]; 2] {
        self.m
    }

    pub fn det(&self, field: &Field) -> FieldElem {
        det(field, &self.m)
    }

    pub fn is_identity(&self) -> bool {
        *self == Pgl2Elem::identity()
    }

    /// The class of `self * other`.
    pub fn compose(&self, field: &Field, other: &Pgl2Elem) -> Pgl2Elem {
        Pgl2Elem::from_matrix(field, mat_mul(field, &self.m, &other.m)).expect("product of units")
    }

    pub fn inverse(&self, field: &Field) -> Pgl2Elem {
        let [[a, b], [c, d]] = self.m;
        Pgl2Elem::from_matrix(field, [[d, field.neg(b)], [field.neg(c), a]]).expect("adjugate of a unit")
    }

    pub fn embed(&self, e: &Embedding) -> Pgl2Elem {
        Pgl2Elem { m: self.m.map(|row| row.map(|x| e.map(x))) }
    }

    /// The element of the small field's group mapping to `self`, if any.
    pub fn preimage(&self, e: &Embedding) -> Option<Pgl2Elem> {
        let mut m = [[FieldElem::ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = e.preimage(self.m[i][j])?;
            }
        }
        Some(Pgl2Elem { m })
    }

    /// `|PGL_2(F_q)| = q^3 - q`.
    pub fn group_order(q: u64) -> u128 {
        let q = q as u128;
        q * q * q - q
    }

    /// All elements: `[[0, 1], [c, d]]` with `c != 0`, then `[[1, b], [c, d]]`
    /// with `d != b c`, each in lexicographic order.
    pub fn enumerate(field: &Field) -> impl Iterator<Item = Pgl2Elem> + '_ {
        let (zero, one) = (FieldElem::ZERO, FieldElem::ONE);
        let first = field.units().flat_map(move |c| {
            field.elements().map(move |d| Pgl2Elem { m: [[zero, one], [c, d]] })
        });
        let second = field.elements().flat_map(move |b| {
            field.elements().flat_map(move |c| {
                field
                    .elements()
                    .filter(move |&d| d != field.mul(b, c))
                    .map(move |d| Pgl2Elem { m: [[one, b], [c, d]] })
            })
        });
        first.chain(second)
    }

    /// `[m00, m01, m10, m11]`.
    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        serde_json::Value::from(self.m.iter().flatten().map(|&x| field.to_json(x)).collect::<Vec<_>>())
    }

    pub fn display(&self, field: &Field) -> String {
        let d = |x| field.display(x);
        format!("[[{}, {}], [{}, {}]]", d(self.m[0][0]), d(self.m[0][1]), d(self.m[1][0]), d(self.m[1][1]))
    }

    /// Parses `a,b,c,d` (row-major).
    pub fn parse(field: &Field, s: &str) -> Result<Pgl2Elem> {
        let parts: Vec<_> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("a 2x2 matrix needs 4 entries, got {}", parts.len())));
        }
        let e: Vec<FieldElem> = parts.iter().map(|t| field.parse(t)).collect::<Result<_>>()?;
        Pgl2Elem::from_matrix(field, [[e[0], e[1]], [e[2], e[3]]])
    }
}

impl fmt::Display for Pgl2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0].0, m[0][1].0, m[1][0].0, m[1][1].0)
    }
}

pub(crate) fn det(field: &Field, m: &[[FieldElem; 2]; 2]) -> FieldElem {
    field.sub(field.mul(m[0][0], m[1][1]), field.mul(m[0][1], m[1][0]))
}

pub(crate) fn mat_mul(field: &Field, a: &[[FieldElem; 2]; 2], b: &[[FieldElem; 2]; 2]) -> [[FieldElem; 2]; 2] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| field.add(field.mul(a[i][0], b[0][j]), field.mul(a[i][1], b[1][j])))
    })
}

/// `(g . f)(x, y) = det(g)^-2 f((x, y) g)`, a left action:
/// `g . (h . f) = (g h) . f`. Fails if `det(g)` is not a unit.
pub fn act_matrix<R: CoeffRing>(
    ring: &R,
    g: &[[R::Elem; 2]; 2],
    f: &BinaryQuartic<R::Elem>,
) -> Result<BinaryQuartic<R::Elem>> {
    let det = ring.sub(&ring.mul(&g[0][0], &g[1][1]), &ring.mul(&g[0][1], &g[1][0]));
    let det_inv = ring.unit_inverse(&det).ok_or(Error::SingularMatrix)?;
    let scale = ring.mul(&det_inv, &det_inv);
    // X = g00 x + g10 y, Y = g01 x + g11 y; a binary form of degree n is the
    // vector of coefficients of x^(n-j) y^j.
    let xp = linear_powers(ring, &g[0][0], &g[1][0]);
    let yp = linear_powers(ring, &g[0][1], &g[1][1]);
    let mut out: [R::Elem; 5] = std::array::from_fn(|_| ring.zero());
    for i in 0..5 {
        if ring.is_zero(&f.c[i]) {
            continue;
        }
        let (u, v) = (&xp[4 - i], &yp[i]);
        for (j, uj) in u.iter().enumerate() {
            if ring.is_zero(uj) {
                continue;
            }
            let t = ring.mul(&f.c[i], uj);
            for (k, vk) in v.iter().enumerate() {
                out[j + k] = ring.add(&out[j + k], &ring.mul(&t, vk));
            }
        }
    }
    Ok(BinaryQuartic { c: out.map(|x| ring.mul(&x, &scale)) })
}

fn linear_powers<R: CoeffRing>(ring: &R, cx: &R::Elem, cy: &R::Elem) -> Vec<Vec<R::Elem>> {
    let mut out = vec![vec![ring.one()]];
    for n in 1..=4 {
        let prev: &Vec<R::Elem> = &out[n - 1];
        let mut next = vec![ring.zero(); n + 1];
        for (j, c) in prev.iter().enumerate() {
            next[j] = ring.add(&next[j], &ring.mul(c, cx));
            next[j + 1] = ring.add(&next[j + 1], &ring.mul(c, cy));
        }
        out.push(next);
    }
    out
}

pub fn act(field: &Field, g: &Pgl2Elem, f: &BinaryQuartic<FieldElem>) -> BinaryQuartic<FieldElem> {
    act_matrix(field, &g.m, f).expect("group elements are invertible")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::{classify_type, invariants, DualNumber, DualRing};

    #[test]
    fn enumeration_is_the_whole_group() {
        for q in [5u64, 7, 25] {
            let f = Field::of_order(q).unwrap();
            let all: Vec<_> = Pgl2Elem::enumerate(&f).collect();
            assert_eq!(all.len() as u128, Pgl2Elem::group_order(q));
            let mut s = all.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), all.len());
            assert!(all.iter().all(|g| Pgl2Elem::from_matrix(&f, g.matrix()).unwrap() == *g));
        }
    }

    #[test]
    fn action_composes_on_the_left() {
        let f = Field::new(7, 1).unwrap();
        let q = BinaryQuartic::from_ints(&f, [1, 2, 3, 4, 5]);
        let g = Pgl2Elem::from_ints(&f, [[1, 2], [3, 5]]).unwrap();
        let h = Pgl2Elem::from_ints(&f, [[0, 1], [4, 6]]).unwrap();
        let lhs = act(&f, &g, &act(&f, &h, &q));
        assert_eq!(lhs, act(&f, &g.compose(&f, &h), &q));
        assert_eq!(act(&f, &g.inverse(&f), &act(&f, &g, &q)), q);
    }

    #[test]
    fn scalars_act_trivially() {
        let f = Field::new(11, 1).unwrap();
        let q = BinaryQuartic::from_ints(&f, [3, 1, 4, 1, 5]);
        for l in f.units() {
            let m = [[l, f.zero()], [f.zero(), l]];
            assert_eq!(act_matrix(&f, &m, &q).unwrap(), q);
        }
    }

    #[test]
    fn roots_move_by_inverse() {
        let f = Field::new(5, 1).unwrap();
        // x (x - y) y (x + y) has roots 0, 1, -1, infinity.
        let q = BinaryQuartic::from_ints(&f, [0, 1, 0, -1, 0]);
        let g = Pgl2Elem::from_ints(&f, [[1, 1], [0, 1]]).unwrap();
        let moved = act(&f, &g, &q);
        assert_eq!(classify_type(&f, &moved), classify_type(&f, &q));
        // Each root r of q gives a root r g^-1 of the moved form.
        let ginv = g.inverse(&f).matrix();
        for r in [[0i64, 1], [1, 1], [4, 1], [1, 0]] {
            let r = r.map(|x| f.from_int(x));
            let s = [
                f.add(f.mul(r[0], ginv[0][0]), f.mul(r[1], ginv[1][0])),
                f.add(f.mul(r[0], ginv[0][1]), f.mul(r[1], ginv[1][1])),
            ];
            let mut val = f.zero();
            for i in 0..5 {
                val = f.add(val, f.mul(moved.c[i], f.mul(f.pow(s[0], 4 - i as u128), f.pow(s[1], i as u128))));
            }
            assert!(val.is_zero());
        }
    }

    #[test]
    fn explicit_reduction_matrix() {
        // For c4 = 0, c3 != 0: [[1, 0], [-c2/3, 1]] [[1/c3, 0], [0, 1]] [[0, 1], [1, 0]]
        // takes f to y (x^3 + a x y^2 + b y^3).
        let f = Field::new(7, 1).unwrap();
        for c in [[2, 5, 3, 6, 0], [1, 0, 0, 1, 0], [0, 4, 6, 2, 0]] {
            let q = BinaryQuartic::from_ints(&f, c);
            let (c2, c3) = (q.c[2], q.c[3]);
            let m1 = [[f.one(), f.zero()], [f.neg(f.div(c2, f.from_int(3)).unwrap()), f.one()]];
            let m2 = [[f.inv(c3).unwrap(), f.zero()], [f.zero(), f.one()]];
            let m3 = [[f.zero(), f.one()], [f.one(), f.zero()]];
            let g = mat_mul(&f, &mat_mul(&f, &m1, &m2), &m3);
            let w = act_matrix(&f, &g, &q).unwrap();
            let inv = invariants(&f, &q);
            assert_eq!(w, BinaryQuartic::weierstrass(inv.a, inv.b));
        }
    }

    #[test]
    fn dual_number_action() {
        let f = Field::new(5, 1).unwrap();
        let r = DualRing::new(&f);
        let d = |a: i64, b: i64| DualNumber { re: f.from_int(a), eps: f.from_int(b) };
        let q = BinaryQuartic::new([d(0, 1), d(1, 0), d(0, 0), d(1, 2), d(0, 0)]);
        let g = [[d(1, 1), d(0, 3)], [d(2, 0), d(1, 0)]];
        let moved = act_matrix(&r, &g, &q).unwrap();
        assert_eq!(invariants(&r, &moved), invariants(&r, &q));
        let singular = [[d(0, 1), d(0, 0)], [d(0, 0), d(1, 0)]];
        assert!(act_matrix(&r, &singular, &q).is_err());
    }
}
