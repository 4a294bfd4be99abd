use super::pgl2::mat_mul;
use super::{act, classify_type, invariants, BinaryQuartic, Pgl2Elem};
use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, FieldElem};

/// `h . f = y (x^3 + a x y^2 + b y^3)` with `h` defined over `field`, an
/// extension of degree `ext_degree` of the field of `f`.
#[derive(Clone, Debug)]
pub struct WeierstrassReduction {
    pub ext_degree: u32,
    pub field: Field,
    pub h: Pgl2Elem,
    pub a: FieldElem,
    pub b: FieldElem,
}

impl WeierstrassReduction {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ext_degree": self.ext_degree,
            "h": self.h.to_json(&self.field),
            "a": self.field.to_json(self.a),
            "b": self.field.to_json(self.b),
        })
    }
}

/// Moves a simple root of `f` to infinity and clears the `x^2 y^2` term.
///
/// The root used is infinity when it is simple; otherwise the smallest (in
/// packed order) simple root in `F_{q^e}`, `e` the least degree of a simple
/// irreducible factor of `f(x, 1)`.
pub fn reduce_to_weierstrass(field: &Field, f: &BinaryQuartic<FieldElem>) -> Result<WeierstrassReduction> {
    let t = classify_type(field, f);
    if !t.is_regular() {
        return Err(Error::NotStable(t.to_string()));
    }
    let (ext, e, root) = if f.c[0].is_zero() && !f.c[1].is_zero() {
        (field.clone(), 1, None)
    } else {
        let fac = f.dehomogenize().factor(field)?;
        let simple: Vec<_> = fac.factors.iter().filter(|(_, m)| *m == 1).map(|(g, _)| g).collect();
        let e = simple.iter().map(|g| g.degree().unwrap()).min().expect("regular forms have a simple root");
        let e = e as u32;
        let ext = if e == 1 { field.clone() } else { field.extension(e)? };
        let emb = Embedding::new(field, &ext)?;
        let mut r = None;
        for g in simple.iter().filter(|g| g.degree() == Some(e as usize)) {
            let s = emb.map_poly(g).roots(&ext)?[0].0;
            r = Some(r.map_or(s, |t: FieldElem| t.min(s)));
        }
        let r = r.unwrap();
        (ext, e, Some((emb, r)))
    };
    let (fe, m) = match &root {
        None => (f.clone(), [[FieldElem::ONE, FieldElem::ZERO], [FieldElem::ZERO, FieldElem::ONE]]),
        Some((emb, r)) => (f.embed(emb), [[*r, FieldElem::ONE], [FieldElem::ONE, FieldElem::ZERO]]),
    };
    let moved = act(&ext, &Pgl2Elem::from_matrix(&ext, m)?, &fe);
    debug_assert!(moved.c[0].is_zero());
    let (c0, c1) = (moved.c[1], moved.c[2]);
    let c0_inv = ext.inv(c0).expect("the root at infinity is simple");
    let d = [
        [c0_inv, FieldElem::ZERO],
        [ext.neg(ext.mul(c1, ext.mul(c0_inv, ext.ratio(1, 3)))), FieldElem::ONE],
    ];
    let h = Pgl2Elem::from_matrix(&ext, mat_mul(&ext, &d, &m))?;
    let inv = invariants(&ext, &fe);
    debug_assert_eq!(act(&ext, &h, &fe), BinaryQuartic::weierstrass(inv.a, inv.b));
    Ok(WeierstrassReduction { ext_degree: e, field: ext, h, a: inv.a, b: inv.b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::QuarticType;

    #[test]
    fn reduces_every_regular_form_over_f5() {
        let f = Field::new(5, 1).unwrap();
        let mut seen = 0;
        for i in (0..3125).step_by(7) {
            let q = BinaryQuartic::from_index(&f, i);
            match reduce_to_weierstrass(&f, &q) {
                Ok(r) => {
                    let emb = Embedding::new(&f, &r.field).unwrap();
                    let w = act(&r.field, &r.h, &q.embed(&emb));
                    assert_eq!(w, BinaryQuartic::weierstrass(r.a, r.b));
                    seen += 1;
                }
                Err(_) => assert!(!classify_type(&f, &q).is_regular()),
            }
        }
        assert!(seen > 300);
    }

    #[test]
    fn needs_an_extension_without_rational_simple_roots() {
        let f = Field::new(5, 1).unwrap();
        // x^4 + 2 = x^4 - 3 with 3 a non-square mod 5: irreducible.
        let q = BinaryQuartic::from_ints(&f, [1, 0, 0, 0, 2]);
        assert_eq!(classify_type(&f, &q), QuarticType::T1111);
        let r = reduce_to_weierstrass(&f, &q).unwrap();
        let degs = q.dehomogenize().factor(&f).unwrap().degree_multiset();
        assert_eq!(r.ext_degree as usize, degs[0]);
        assert_eq!(r.ext_degree, 4);
        let q = BinaryQuartic::from_ints(&f, [1, 0, 0, 0, 1]);
        assert_eq!(reduce_to_weierstrass(&f, &q).unwrap().ext_degree, 2);
    }

    #[test]
    fn double_root_example() {
        let f = Field::new(5, 1).unwrap();
        let q = BinaryQuartic::from_ints(&f, [0, 1, -2, 1, 0]);
        let r = reduce_to_weierstrass(&f, &q).unwrap();
        assert_eq!(r.ext_degree, 1);
        assert_eq!((r.a, r.b), (f.ratio(-1, 3), f.ratio(2, 27)));
        assert_eq!(act(&f, &r.h, &q), BinaryQuartic::weierstrass(r.a, r.b));
    }

    #[test]
    fn rejects_unstable_forms() {
        let f = Field::new(7, 1).unwrap();
        for c in [[0, 0, 1, 0, 0], [0, 0, 0, 0, 1], [0; 5]] {
            assert!(reduce_to_weierstrass(&f, &BinaryQuartic::from_ints(&f, c)).is_err());
        }
    }
}
