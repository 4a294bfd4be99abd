//! Weierstrass families `y^2 = x^3 + a x + b` over `P^1`, with `a` and `b`
//! sections of `O(4d)` and `O(6d)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem, UniPoly};
use crate::pfield::{ord_at, ClosedPoint, Order};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassFamily {
    pub d: u32,
    pub a: UniPoly,
    pub b: UniPoly,
}

/// JSON form: `{"d": 1, "a": [..], "b": [..]}`, coefficients constant term first.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub d: u32,
    pub a: Vec<serde_json::Value>,
    pub b: Vec<serde_json::Value>,
}

impl WeierstrassFamily {
    pub fn new(d: u32, a: UniPoly, b: UniPoly) -> Result<WeierstrassFamily> {
        check_degree(&a, 4 * d as i64)?;
        check_degree(&b, 6 * d as i64)?;
        Ok(WeierstrassFamily { d, a, b })
    }

    pub fn from_ints(field: &Field, d: u32, a: &[i64], b: &[i64]) -> Result<WeierstrassFamily> {
        WeierstrassFamily::new(d, UniPoly::from_ints(field, a), UniPoly::from_ints(field, b))
    }

    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        serde_json::json!({ "d": self.d, "a": self.a.to_json(field), "b": self.b.to_json(field) })
    }

    pub fn from_json(field: &Field, v: &serde_json::Value) -> Result<WeierstrassFamily> {
        let j: FamilyJson = serde_json::from_value(v.clone())?;
        let poly = |xs: &[serde_json::Value]| -> Result<UniPoly> {
            let coeffs = xs
                .iter()
                .map(|x| match x {
                    serde_json::Value::Number(n) => {
                        n.as_i64().map(|n| field.from_int(n)).ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))
                    }
                    serde_json::Value::String(s) => field.parse(s),
                    other => Err(Error::Parse(format!("bad coefficient {other}"))),
                })
                .collect::<Result<Vec<FieldElem>>>()?;
            Ok(UniPoly::from_coeffs(coeffs))
        };
        WeierstrassFamily::new(j.d, poly(&j.a)?, poly(&j.b)?)
    }

    pub fn discriminant(&self, field: &Field) -> UniPoly {
        family_discriminant(field, self)
    }

    pub fn is_degenerate(&self, field: &Field) -> bool {
        self.discriminant(field).is_zero()
    }

    fn nondegenerate(&self, field: &Field) -> Result<UniPoly> {
        let disc = self.discriminant(field);
        if disc.is_zero() {
            return Err(Error::DegenerateFamily);
        }
        Ok(disc)
    }
}

fn check_degree(p: &UniPoly, bound: i64) -> Result<()> {
    match p.degree() {
        Some(deg) if deg as i64 > bound => Err(Error::DegreeBound { degree: deg, bound }),
        _ => Ok(()),
    }
}

/// `-(4 a^3 + 27 b^2)`, a section of `O(12d)`.
pub fn family_discriminant(field: &Field, fam: &WeierstrassFamily) -> UniPoly {
    let a3 = fam.a.square(field).mul(&fam.a, field);
    let b2 = fam.b.square(field);
    a3.scale(field.from_int(4), field).add(&b2.scale(field.from_int(27), field), field).neg(field)
}

/// The discriminant divisor is reduced: `disc` is squarefree and vanishes to
/// order at most 1 at infinity.
pub fn is_transversal(field: &Field, fam: &WeierstrassFamily) -> Result<bool> {
    let disc = fam.nondegenerate(field)?;
    Ok(is_transversal_disc(field, &disc, fam.d))
}

pub(crate) fn is_transversal_disc(field: &Field, disc: &UniPoly, d: u32) -> bool {
    let deg = disc.degree().expect("nonzero discriminant") as i64;
    if 12 * d as i64 - deg > 1 {
        return false;
    }
    disc.gcd(&disc.derivative(field), field).is_constant()
}

/// A closed point where `ord(a) >= 4` and `ord(b) >= 6`, if one exists.
pub fn nonminimal_point(field: &Field, fam: &WeierstrassFamily) -> Result<Option<ClosedPoint>> {
    fam.nondegenerate(field)?;
    let (ma, mb) = (4 * fam.d as i64, 6 * fam.d as i64);
    if ord_at(field, &ClosedPoint::Infinity, &fam.a, ma)?.at_least(4)
        && ord_at(field, &ClosedPoint::Infinity, &fam.b, mb)?.at_least(6)
    {
        return Ok(Some(ClosedPoint::Infinity));
    }
    // A finite point with p^4 | a and p^6 | b divides g = gcd(a, b) (one of
    // them is nonzero since disc != 0) to order at least 4.
    let g = fam.a.gcd(&fam.b, field);
    if g.degree().unwrap_or(0) < 4 {
        return Ok(None);
    }
    let fac = g.factor(field)?;
    for (p, m) in fac.factors {
        if m < 4 {
            continue;
        }
        let v = ClosedPoint::Finite(p);
        if ord_at(field, &v, &fam.a, ma)?.at_least(4) && ord_at(field, &v, &fam.b, mb)?.at_least(6) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

pub fn is_minimal(field: &Field, fam: &WeierstrassFamily) -> Result<bool> {
    Ok(nonminimal_point(field, fam)?.is_none())
}

/// A root `r` of `x^3 + a x + b` in `F_q[t]` with `deg r <= 2d`; then
/// `x^3 + a x + b = (x - r)(x^2 + r x + v)` with `c = -r`, `v = a + r^2`.
pub fn has_rational_two_torsion(field: &Field, fam: &WeierstrassFamily) -> Result<Option<UniPoly>> {
    fam.nondegenerate(field)?;
    if fam.b.is_zero() {
        return Ok(Some(UniPoly::zero()));
    }
    let is_root = |r: &UniPoly| {
        let r2 = r.square(field);
        r2.mul(r, field).add(&fam.a.mul(r, field), field).add(&fam.b, field).is_zero()
    };
    // r divides b; enumerate monic divisors of b with degree <= 2d, then units.
    let fac = fam.b.factor(field)?;
    let mut divisors = vec![UniPoly::one()];
    for (p, m) in &fac.factors {
        let mut next = Vec::new();
        for dvs in &divisors {
            let mut cur = dvs.clone();
            next.push(cur.clone());
            for _ in 0..*m {
                cur = cur.mul(p, field);
                if cur.degree().unwrap() > 2 * fam.d as usize {
                    break;
                }
                next.push(cur.clone());
            }
        }
        divisors = next;
    }
    divisors.sort_by(|x, y| x.degree().cmp(&y.degree()).then_with(|| x.coeffs().cmp(y.coeffs())));
    for dvs in divisors {
        for u in field.units() {
            let r = dvs.scale(u, field);
            if is_root(&r) {
                return Ok(Some(r));
            }
        }
    }
    Ok(None)
}

/// The least `d'` reachable by twisting down at non-minimal points.
pub fn family_height(field: &Field, fam: &WeierstrassFamily) -> Result<u32> {
    Ok(twist_to_minimal(field, fam)?.d)
}

/// Removes `4v` from `a` and `6v` from `b` at non-minimal points `v` until
/// none remain.
pub fn twist_to_minimal(field: &Field, fam: &WeierstrassFamily) -> Result<WeierstrassFamily> {
    let mut cur = fam.clone();
    while let Some(v) = nonminimal_point(field, &cur)? {
        cur = match v {
            ClosedPoint::Infinity => WeierstrassFamily { d: cur.d - 1, a: cur.a, b: cur.b },
            ClosedPoint::Finite(p) => {
                let e = p.degree().unwrap() as u32;
                let p4 = p.pow(4, field);
                let p6 = p.pow(6, field);
                WeierstrassFamily { d: cur.d - e, a: cur.a.exact_div(&p4, field), b: cur.b.exact_div(&p6, field) }
            }
        };
    }
    Ok(cur)
}

/// Orders of `a`, `b` and the discriminant at a point, for reporting.
pub fn orders_at(field: &Field, fam: &WeierstrassFamily, v: &ClosedPoint) -> Result<[Order; 3]> {
    let d = fam.d as i64;
    Ok([
        ord_at(field, v, &fam.a, 4 * d)?,
        ord_at(field, v, &fam.b, 6 * d)?,
        ord_at(field, v, &fam.discriminant(field), 12 * d)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    #[test]
    fn discriminants() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0], &[1]).unwrap();
        assert_eq!(fam.discriminant(&f), UniPoly::from_ints(&f, &[-27]));
        assert_eq!(orders_at(&f, &fam, &ClosedPoint::Infinity).unwrap()[2], Order::Finite(12));
        let fam = WeierstrassFamily::from_ints(&f, 1, &[-1], &[0]).unwrap();
        assert_eq!(fam.discriminant(&f), UniPoly::from_ints(&f, &[4]));
        assert!(WeierstrassFamily::from_ints(&f, 1, &[0], &[0]).unwrap().is_degenerate(&f));
        assert!(WeierstrassFamily::from_ints(&f, 1, &[0, 0, 0, 0, 0, 1], &[0]).is_err());
    }

    #[test]
    fn transversality() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0], &[0, 1]).unwrap();
        assert!(!is_transversal(&f, &fam).unwrap());
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0], &[1]).unwrap();
        assert!(!is_transversal(&f, &fam).unwrap());
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0], &[0]).unwrap();
        assert!(matches!(is_transversal(&f, &fam), Err(Error::DegenerateFamily)));
    }

    #[test]
    fn minimality() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0, 0, 0, 0, 1], &[0, 0, 0, 0, 0, 0, 1]).unwrap();
        assert!(!is_minimal(&f, &fam).unwrap());
        let fam = WeierstrassFamily::from_ints(&f, 1, &[1], &[1]).unwrap();
        assert_eq!(nonminimal_point(&f, &fam).unwrap(), Some(ClosedPoint::Infinity));
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0, 1], &[1]).unwrap();
        assert!(is_minimal(&f, &fam).unwrap());
        // (t^2 + 2)^4 | a, (t^2 + 2)^6 | b at d = 2.
        let p = UniPoly::from_ints(&f, &[2, 0, 1]);
        let fam = WeierstrassFamily::new(2, p.pow(4, &f), p.pow(6, &f).scale(f.from_int(2), &f)).unwrap();
        assert_eq!(nonminimal_point(&f, &fam).unwrap(), Some(ClosedPoint::Finite(p)));
        assert_eq!(family_height(&f, &fam).unwrap(), 0);
    }

    #[test]
    fn heights() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0, 0, 0, 0, 1], &[0, 0, 0, 0, 0, 0, 1]).unwrap();
        assert_eq!(family_height(&f, &fam).unwrap(), 0);
        let fam = WeierstrassFamily::from_ints(&f, 1, &[1], &[1]).unwrap();
        assert_eq!(family_height(&f, &fam).unwrap(), 0);
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0, 1], &[1]).unwrap();
        assert_eq!(family_height(&f, &fam).unwrap(), 1);
        // At d = 2 the same data vanishes to order 7 and 12 at infinity.
        let fam = WeierstrassFamily::from_ints(&f, 2, &[0, 1], &[1]).unwrap();
        assert_eq!(family_height(&f, &fam).unwrap(), 1);
        let low = twist_to_minimal(&f, &WeierstrassFamily::from_ints(&f, 2, &[1], &[1]).unwrap()).unwrap();
        assert_eq!(family_height(&f, &low).unwrap(), low.d);
    }

    #[test]
    fn two_torsion_witnesses() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[-1], &[0]).unwrap();
        assert_eq!(has_rational_two_torsion(&f, &fam).unwrap(), Some(UniPoly::zero()));
        let fam = WeierstrassFamily::from_ints(&f, 1, &[1], &[0, 1, 0, 1]).unwrap();
        assert_eq!(has_rational_two_torsion(&f, &fam).unwrap(), Some(UniPoly::from_ints(&f, &[0, -1])));
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0], &[1]).unwrap();
        assert_eq!(has_rational_two_torsion(&f, &fam).unwrap(), Some(UniPoly::from_ints(&f, &[-1])));
    }

    #[test]
    fn json_roundtrip() {
        let f = f5();
        let fam = WeierstrassFamily::from_ints(&f, 1, &[0, 1], &[1, 2]).unwrap();
        assert_eq!(WeierstrassFamily::from_json(&f, &fam.to_json(&f)).unwrap(), fam);
    }
}
