use serde::{Deserialize, Serialize};

use super::{Field, FieldElem};

/// Univariate polynomial over a [`Field`], constant term first, with no
/// trailing zero coefficients. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct UniPoly {
    coeffs: Vec<FieldElem>,
}

impl UniPoly {
    pub fn zero() -> UniPoly {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> UniPoly {
        UniPoly { coeffs: vec![FieldElem::ONE] }
    }

    pub fn constant(c: FieldElem) -> UniPoly {
        UniPoly::from_coeffs(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> UniPoly {
        UniPoly { coeffs: vec![FieldElem::ZERO, FieldElem::ONE] }
    }

    /// `c x^n`.
    pub fn monomial(c: FieldElem, n: usize) -> UniPoly {
        let mut v = vec![FieldElem::ZERO; n + 1];
        v[n] = c;
        UniPoly::from_coeffs(v)
    }

    pub fn from_coeffs(mut coeffs: Vec<FieldElem>) -> UniPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(field: &Field, coeffs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<FieldElem> {
        self.coeffs
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero past the degree).
    #[inline]
    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElem::ONE
    }

    pub fn add(&self, other: &UniPoly, f: &Field) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        UniPoly::from_coeffs(v)
    }

    pub fn sub(&self, other: &UniPoly, f: &Field) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        UniPoly::from_coeffs(v)
    }

    pub fn neg(&self, f: &Field) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: FieldElem, f: &Field) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    pub fn mul(&self, other: &UniPoly, f: &Field) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let (a, b) = (&self.coeffs, &other.coeffs);
        let n = a.len() + b.len() - 1;
        let p = f.p();
        if f.is_prime_field() && p < (1 << 20) {
            // Products are below 2^40, so a row of up to 2^23 terms fits in u64.
            let mut acc = vec![0u64; n];
            for (i, &x) in a.iter().enumerate() {
                if x.0 == 0 {
                    continue;
                }
                for (j, &y) in b.iter().enumerate() {
                    acc[i + j] += x.0 * y.0;
                }
            }
            return UniPoly::from_coeffs(acc.into_iter().map(|s| FieldElem(s % p)).collect());
        }
        let mut out = vec![FieldElem::ZERO; n];
        for (i, &x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        UniPoly::from_coeffs(out)
    }

    pub fn square(&self, f: &Field) -> UniPoly {
        self.mul(self, f)
    }

    pub fn pow(&self, mut e: u64, f: &Field) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.square(f);
            }
        }
        acc
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UniPoly, f: &Field) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        if self.coeffs.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let inv_lead = f.inv(d.leading()).unwrap();
        let mut r = self.coeffs.clone();
        let mut quot = vec![FieldElem::ZERO; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i];
            if c.is_zero() {
                continue;
            }
            let t = f.mul(c, inv_lead);
            quot[i - dd] = t;
            let shift = i - dd;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[shift + j] = f.sub(r[shift + j], f.mul(t, dc));
            }
        }
        r.truncate(dd);
        (UniPoly::from_coeffs(quot), UniPoly::from_coeffs(r))
    }

    pub fn rem(&self, d: &UniPoly, f: &Field) -> UniPoly {
        if f.is_prime_field() {
            return self.rem_prime(d, f);
        }
        self.div_rem(d, f).1
    }

    fn rem_prime(&self, d: &UniPoly, f: &Field) -> UniPoly {
        let dd = d.degree().expect("division by the zero polynomial");
        if self.coeffs.len() <= dd {
            return self.clone();
        }
        let p = f.p();
        let inv_lead = f.inv(d.leading()).unwrap().0;
        let mut r: Vec<u64> = self.coeffs.iter().map(|c| c.0).collect();
        for i in (dd..r.len()).rev() {
            let c = r[i] % p;
            if c == 0 {
                continue;
            }
            let t = p - c * inv_lead % p;
            let shift = i - dd;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[shift + j] = (r[shift + j] + t * dc.0) % p;
            }
        }
        r.truncate(dd);
        UniPoly::from_coeffs(r.into_iter().map(FieldElem).collect())
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &UniPoly, f: &Field) -> UniPoly {
        let (q, r) = self.div_rem(d, f);
        assert!(r.is_zero(), "exact_div: nonzero remainder");
        q
    }

    pub fn divides(&self, other: &UniPoly, f: &Field) -> bool {
        other.rem(self, f).is_zero()
    }

    /// Scales to leading coefficient one; zero stays zero.
    pub fn monic(&self, f: &Field) -> UniPoly {
        match f.inv(self.leading()) {
            Some(inv) if self.leading() != FieldElem::ONE => self.scale(inv, f),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor (`gcd(0, 0) = 0`).
    pub fn gcd(&self, other: &UniPoly, f: &Field) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// True iff `gcd(self, other)` is a nonzero constant.
    pub fn is_coprime(&self, other: &UniPoly, f: &Field) -> bool {
        let g = self.gcd(other, f);
        g.degree() == Some(0)
    }

    pub fn derivative(&self, f: &Field) -> UniPoly {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul_int(c, i as i64))
            .collect();
        UniPoly::from_coeffs(v)
    }

    pub fn eval(&self, x: FieldElem, f: &Field) -> FieldElem {
        self.coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Evaluation at an element of a larger field, through `map` from this
    /// polynomial's field into `big`.
    pub fn eval_in(
        &self,
        x: FieldElem,
        big: &Field,
        map: impl Fn(FieldElem) -> FieldElem,
    ) -> FieldElem {
        self.coeffs.iter().rev().fold(FieldElem::ZERO, |acc, &c| big.add(big.mul(acc, x), map(c)))
    }

    /// Coefficientwise image under a field map.
    pub fn map_coeffs(&self, map: impl Fn(FieldElem) -> FieldElem) -> UniPoly {
        UniPoly::from_coeffs(self.coeffs.iter().map(|&c| map(c)).collect())
    }

    /// `self * other mod m`.
    pub fn mul_mod(&self, other: &UniPoly, m: &UniPoly, f: &Field) -> UniPoly {
        self.mul(other, f).rem(m, f)
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &UniPoly, f: &Field) -> UniPoly {
        let mut base = self.rem(m, f);
        let mut acc = UniPoly::one().rem(m, f);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, m, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, m, f);
            }
        }
        acc
    }

    /// `x^deg * self(1/x)` for a declared degree bound `deg >= degree`.
    pub fn reverse(&self, deg: usize) -> UniPoly {
        let mut v = vec![FieldElem::ZERO; deg + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[deg - i] = c;
        }
        UniPoly::from_coeffs(v)
    }

    /// Largest `e` with `x^e | self` (`None` for zero).
    pub fn low_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Coefficient vector as integers for a prime field (else packed values).
    pub fn to_json(&self, f: &Field) -> serde_json::Value {
        if f.is_prime_field() {
            serde_json::Value::from(self.coeffs.iter().map(|c| c.0).collect::<Vec<_>>())
        } else {
            serde_json::Value::from(
                self.coeffs.iter().map(|&c| f.to_json(c)).collect::<Vec<_>>(),
            )
        }
    }

    pub fn display(&self, f: &Field) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = f.display(c);
            let cs = if f.is_prime_field() { cs } else { format!("({cs})") };
            terms.push(match (i, c == FieldElem::ONE) {
                (0, _) => cs,
                (1, true) => "t".into(),
                (1, false) => format!("{cs}*t"),
                (_, true) => format!("t^{i}"),
                (_, false) => format!("{cs}*t^{i}"),
            });
        }
        terms.join(" + ")
    }

    /// Parses a comma-separated coefficient list, constant term first.
    pub fn parse(s: &str, f: &Field) -> crate::error::Result<UniPoly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(UniPoly::zero());
        }
        let v: crate::error::Result<Vec<_>> = s.split(',').map(|t| f.parse(t)).collect();
        Ok(UniPoly::from_coeffs(v?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    #[test]
    fn trims_and_degrees() {
        let f = f5();
        let p = UniPoly::from_ints(&f, &[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::from_ints(&f, &[0, 0]).degree(), None);
        assert_eq!(UniPoly::from_ints(&f, &[5, 10]), UniPoly::zero());
    }

    #[test]
    fn division_identity() {
        let f = f5();
        let a = UniPoly::from_ints(&f, &[3, 1, 4, 1, 5, 9, 2, 6]);
        let b = UniPoly::from_ints(&f, &[2, 7, 1]);
        let (q, r) = a.div_rem(&b, &f);
        assert_eq!(q.mul(&b, &f).add(&r, &f), a);
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(a.rem(&b, &f), r);
    }

    #[test]
    fn gcd_and_derivative() {
        let f = Field::new(7, 1).unwrap();
        // (x-1)^2 (x+2)
        let a = UniPoly::from_ints(&f, &[-1, 1]).square(&f).mul(&UniPoly::from_ints(&f, &[2, 1]), &f);
        let g = a.gcd(&a.derivative(&f), &f);
        assert_eq!(g, UniPoly::from_ints(&f, &[-1, 1]));
        assert!(UniPoly::from_ints(&f, &[1, 1]).is_coprime(&UniPoly::from_ints(&f, &[2, 1]), &f));
        assert!(!UniPoly::zero().is_coprime(&UniPoly::from_ints(&f, &[2, 1]), &f));
        assert!(UniPoly::one().is_coprime(&UniPoly::zero(), &f));
    }

    #[test]
    fn pow_mod_matches_naive() {
        let f = Field::new(5, 2).unwrap();
        let m = UniPoly::from_coeffs(vec![f.from_int(1), f.generator(), f.from_int(0), f.one()]);
        let a = UniPoly::from_coeffs(vec![f.generator(), f.from_int(3)]);
        assert_eq!(a.pow_mod(13, &m, &f), a.pow(13, &f).rem(&m, &f));
    }

    #[test]
    fn reverse_and_eval() {
        let f = f5();
        let a = UniPoly::from_ints(&f, &[1, 2]);
        assert_eq!(a.reverse(3), UniPoly::from_ints(&f, &[0, 0, 2, 1]));
        assert_eq!(a.eval(f.from_int(2), &f), f.from_int(0));
        assert_eq!(UniPoly::from_ints(&f, &[0, 0, 3]).low_order(), Some(2));
    }

    #[test]
    fn parse_lists() {
        let f = f5();
        assert_eq!(UniPoly::parse("0,0,0,0,1", &f).unwrap(), UniPoly::monomial(f.one(), 4));
        assert_eq!(UniPoly::parse("0", &f).unwrap(), UniPoly::zero());
        assert!(UniPoly::parse("1,x", &f).is_err());
    }
}
