//! Coefficient rings for binary quartics: a finite field, its dual numbers
//! `F_q[eps]/(eps^2)`, and the polynomial ring `F_q[t]`.

use std::fmt::Debug;

use serde::Serialize;

use crate::ff::{Field, FieldElem, UniPoly};

pub trait CoeffRing {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// The image of `num / den`; `den` must be prime to the characteristic.
    fn ratio(&self, num: i64, den: i64) -> Self::Elem;
    /// Inverse of a unit, `None` for non-units.
    fn unit_inverse(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn scale_int(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        self.mul(a, &self.ratio(n, 1))
    }
}

impl CoeffRing for Field {
    type Elem = FieldElem;

    fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }
    fn one(&self) -> FieldElem {
        FieldElem::ONE
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::add(self, *a, *b)
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::sub(self, *a, *b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        Field::neg(self, *a)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        Field::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
    fn ratio(&self, num: i64, den: i64) -> FieldElem {
        Field::ratio(self, num, den)
    }
    fn unit_inverse(&self, a: &FieldElem) -> Option<FieldElem> {
        self.inv(*a)
    }
}

/// `a + b eps` with `eps^2 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DualNumber {
    pub re: FieldElem,
    pub eps: FieldElem,
}

#[derive(Clone, Debug)]
pub struct DualRing {
    pub field: Field,
}

impl DualRing {
    pub fn new(field: &Field) -> DualRing {
        DualRing { field: field.clone() }
    }

    /// Reduction mod eps.
    pub fn reduce(&self, a: &DualNumber) -> FieldElem {
        a.re
    }

    /// All `q^2` elements, ordered by (re, eps).
    pub fn elements(&self) -> impl Iterator<Item = DualNumber> + '_ {
        self.field
            .elements()
            .flat_map(move |re| self.field.elements().map(move |eps| DualNumber { re, eps }))
    }
}

impl CoeffRing for DualRing {
    type Elem = DualNumber;

    fn zero(&self) -> DualNumber {
        DualNumber { re: FieldElem::ZERO, eps: FieldElem::ZERO }
    }
    fn one(&self) -> DualNumber {
        DualNumber { re: FieldElem::ONE, eps: FieldElem::ZERO }
    }
    fn add(&self, a: &DualNumber, b: &DualNumber) -> DualNumber {
        let f = &self.field;
        DualNumber { re: f.add(a.re, b.re), eps: f.add(a.eps, b.eps) }
    }
    fn sub(&self, a: &DualNumber, b: &DualNumber) -> DualNumber {
        let f = &self.field;
        DualNumber { re: f.sub(a.re, b.re), eps: f.sub(a.eps, b.eps) }
    }
    fn neg(&self, a: &DualNumber) -> DualNumber {
        DualNumber { re: self.field.neg(a.re), eps: self.field.neg(a.eps) }
    }
    fn mul(&self, a: &DualNumber, b: &DualNumber) -> DualNumber {
        let f = &self.field;
        DualNumber {
            re: f.mul(a.re, b.re),
            eps: f.add(f.mul(a.re, b.eps), f.mul(a.eps, b.re)),
        }
    }
    fn is_zero(&self, a: &DualNumber) -> bool {
        a.re.is_zero() && a.eps.is_zero()
    }
    fn ratio(&self, num: i64, den: i64) -> DualNumber {
        DualNumber { re: self.field.ratio(num, den), eps: FieldElem::ZERO }
    }
    fn unit_inverse(&self, a: &DualNumber) -> Option<DualNumber> {
        // (a + b eps)^-1 = a^-1 - b a^-2 eps
        let f = &self.field;
        let ai = f.inv(a.re)?;
        Some(DualNumber { re: ai, eps: f.neg(f.mul(a.eps, f.mul(ai, ai))) })
    }
}

/// The polynomial ring `F_q[t]`.
#[derive(Clone, Debug)]
pub struct PolyRing {
    pub field: Field,
}

impl PolyRing {
    pub fn new(field: &Field) -> PolyRing {
        PolyRing { field: field.clone() }
    }
}

impl CoeffRing for PolyRing {
    type Elem = UniPoly;

    fn zero(&self) -> UniPoly {
        UniPoly::zero()
    }
    fn one(&self) -> UniPoly {
        UniPoly::one()
    }
    fn add(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        a.add(b, &self.field)
    }
    fn sub(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        a.sub(b, &self.field)
    }
    fn neg(&self, a: &UniPoly) -> UniPoly {
        a.neg(&self.field)
    }
    fn mul(&self, a: &UniPoly, b: &UniPoly) -> UniPoly {
        a.mul(b, &self.field)
    }
    fn is_zero(&self, a: &UniPoly) -> bool {
        a.is_zero()
    }
    fn ratio(&self, num: i64, den: i64) -> UniPoly {
        UniPoly::constant(self.field.ratio(num, den))
    }
    fn unit_inverse(&self, a: &UniPoly) -> Option<UniPoly> {
        if a.degree() == Some(0) {
            Some(UniPoly::constant(self.field.inv(a.coeff(0))?))
        } else {
            None
        }
    }
    fn scale_int(&self, a: &UniPoly, n: i64) -> UniPoly {
        a.scale(self.field.from_int(n), &self.field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_squares_to_zero() {
        let f = Field::new(5, 1).unwrap();
        let r = DualRing::new(&f);
        let eps = DualNumber { re: f.zero(), eps: f.one() };
        assert!(r.is_zero(&r.mul(&eps, &eps)));
        let u = DualNumber { re: f.from_int(2), eps: f.from_int(3) };
        assert_eq!(r.mul(&u, &r.unit_inverse(&u).unwrap()), r.one());
        assert_eq!(r.unit_inverse(&eps), None);
        assert_eq!(r.elements().count(), 25);
    }

    #[test]
    fn polynomial_units() {
        let f = Field::new(7, 1).unwrap();
        let r = PolyRing::new(&f);
        assert_eq!(r.unit_inverse(&UniPoly::constant(f.from_int(3))), Some(UniPoly::constant(f.from_int(5))));
        assert_eq!(r.unit_inverse(&UniPoly::x()), None);
        assert_eq!(r.unit_inverse(&UniPoly::zero()), None);
    }
}
