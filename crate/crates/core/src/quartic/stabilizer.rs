//! Stabilizers in `PGL_2(F_{q^m})` of binary quartics.
//!
//! An element fixing `f` permutes its roots on `P^1`, preserving
//! multiplicities. With at least three distinct roots it is pinned down by the
//! images of three of them, so the candidates are finitely many and are
//! computed over the splitting field. With fewer roots the candidates form a
//! torus or a Borel subgroup and are enumerated under a budget.

use std::collections::BTreeSet;

use super::pgl2::mat_mul;
use super::{act, classify_type, BinaryQuartic, Pgl2Elem};
use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, FieldElem, UniPoly};

/// Largest number of group elements any enumeration here will visit.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Clone, Debug)]
pub struct Stabilizer {
    /// `F_{q^m}`.
    pub field: Field,
    pub ext_degree: u32,
    pub elements: Vec<Pgl2Elem>,
}

impl Stabilizer {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ext_degree": self.ext_degree,
            "order": self.order(),
            "elements": self.elements.iter().map(|g| g.to_json(&self.field)).collect::<Vec<_>>(),
        })
    }
}

/// The stabilizer over the algebraic closure of a form with finite stabilizer,
/// realized in `PGL_2` of the splitting field. `degrees[i]` is the degree over
/// the base field of the field of definition of `elements[i]`.
#[derive(Clone, Debug)]
pub struct GeometricStabilizer {
    pub field: Field,
    pub elements: Vec<Pgl2Elem>,
    pub degrees: Vec<u32>,
}

impl GeometricStabilizer {
    /// Number of elements defined over `F_{q^m}`.
    pub fn rational_count(&self, m: u32) -> usize {
        self.degrees.iter().filter(|&&d| m % d == 0).count()
    }
}

/// Least `s` such that `g` splits into linear factors over `F_{q^s}`.
pub fn splitting_degree(field: &Field, g: &UniPoly) -> Result<u32> {
    if g.degree().unwrap_or(0) == 0 {
        return Ok(1);
    }
    let fac = g.factor(field)?;
    Ok(fac.factors.iter().fold(1, |acc, (h, _)| lcm(acc, h.degree().unwrap() as u32)))
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

type Point = [FieldElem; 2];

/// Distinct roots on `P^1` as `(x, 1)` or `(1, 0)`, with multiplicities.
fn projective_roots(field: &Field, f: &BinaryQuartic<FieldElem>) -> Result<Vec<(Point, u32)>> {
    let g = f.dehomogenize();
    let deg = g.degree().ok_or(Error::ZeroPolynomial)?;
    let mut out: Vec<(Point, u32)> =
        g.roots(field)?.into_iter().map(|(r, m)| ([r, FieldElem::ONE], m)).collect();
    if deg < 4 {
        out.push(([FieldElem::ONE, FieldElem::ZERO], (4 - deg) as u32));
    }
    Ok(out)
}

/// A matrix with `e1 A ~ r1`, `e2 A ~ r2`, `(1, 1) A ~ r3`.
fn frame(field: &Field, r1: Point, r2: Point, r3: Point) -> [[FieldElem; 2]; 2] {
    // Solve l1 r1 + l2 r2 = r3.
    let det = field.sub(field.mul(r1[0], r2[1]), field.mul(r1[1], r2[0]));
    let di = field.inv(det).expect("distinct points");
    let l1 = field.mul(di, field.sub(field.mul(r3[0], r2[1]), field.mul(r3[1], r2[0])));
    let l2 = field.mul(di, field.sub(field.mul(r1[0], r3[1]), field.mul(r1[1], r3[0])));
    [r1.map(|x| field.mul(l1, x)), r2.map(|x| field.mul(l2, x))]
}

fn inverse_matrix(field: &Field, m: &[[FieldElem; 2]; 2]) -> [[FieldElem; 2]; 2] {
    let [[a, b], [c, d]] = *m;
    let di = field.inv(field.sub(field.mul(a, d), field.mul(b, c))).expect("invertible");
    [[field.mul(d, di), field.neg(field.mul(b, di))], [field.neg(field.mul(c, di)), field.mul(a, di)]]
}

/// Candidates over the splitting field: every element mapping the roots to
/// the roots, as long as there are finitely many. Returns `None` when the
/// roots do not pin down a finite set.
fn finite_candidates(field: &Field, roots: &[(Point, u32)]) -> Option<Vec<Pgl2Elem>> {
    let n = roots.len();
    if n >= 3 {
        let a = frame(field, roots[0].0, roots[1].0, roots[2].0);
        let a_inv = inverse_matrix(field, &a);
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    if roots[i].1 != roots[0].1 || roots[j].1 != roots[1].1 || roots[k].1 != roots[2].1 {
                        continue;
                    }
                    let b = frame(field, roots[i].0, roots[j].0, roots[k].0);
                    out.push(Pgl2Elem::from_matrix(field, mat_mul(field, &a_inv, &b)).unwrap());
                }
            }
        }
        Some(out)
    } else if n == 2 && roots[0].1 != roots[1].1 {
        // Both roots are fixed, so in a frame with the roots at 0 and infinity
        // g = diag(mu, 1), which scales the x^(4-j) y^j coefficient by
        // mu^(2-j). For x^3 y that forces mu = 1.
        Some(vec![Pgl2Elem::identity()])
    } else {
        None
    }
}

/// Elements of `PGL_2(F_{q^m})` fixing `f`, where `f` is already defined over
/// `fm = F_{q^m}`.
pub fn stabilizer_in(fm: &Field, f: &BinaryQuartic<FieldElem>, budget: u128) -> Result<Vec<Pgl2Elem>> {
    if f.is_zero() {
        let needed = Pgl2Elem::group_order(fm.q());
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        return Ok(Pgl2Elem::enumerate(fm).collect());
    }
    let s = splitting_degree(fm, &f.dehomogenize())?;
    let big = if s == 1 { fm.clone() } else { fm.extension(s)? };
    let emb = Embedding::new(fm, &big)?;
    let f_big = f.embed(&emb);
    let roots = projective_roots(&big, &f_big)?;
    let mut found = BTreeSet::new();
    let mut keep = |g: Pgl2Elem| {
        if act(&big, &g, &f_big) == f_big {
            if let Some(h) = g.preimage(&emb) {
                found.insert(h);
            }
        }
    };
    match finite_candidates(&big, &roots) {
        Some(c) => c.into_iter().for_each(&mut keep),
        None if roots.len() == 2 => {
            // Two roots of equal multiplicity: g = A^-1 diag(mu, 1) B with
            // B's rows the roots in either order.
            let needed = 2 * (big.q() as u128 - 1);
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let (r1, r2) = (roots[0].0, roots[1].0);
            let a = [r1, r2];
            let a_inv = inverse_matrix(&big, &a);
            for b in [[r1, r2], [r2, r1]] {
                for mu in big.units() {
                    let d = [[mu, FieldElem::ZERO], [FieldElem::ZERO, FieldElem::ONE]];
                    let m = mat_mul(&big, &mat_mul(&big, &a_inv, &d), &b);
                    keep(Pgl2Elem::from_matrix(&big, m)?);
                }
            }
        }
        None => {
            // One root r, rational over fm: g = A^-1 [[alpha, 0], [beta, 1]] A
            // with e1 A = r.
            let qq = big.q() as u128;
            let needed = qq * (qq - 1);
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let r = roots[0].0;
            let a = if r[1].is_zero() {
                [[FieldElem::ONE, FieldElem::ZERO], [FieldElem::ZERO, FieldElem::ONE]]
            } else {
                [r, [FieldElem::ONE, FieldElem::ZERO]]
            };
            let a_inv = inverse_matrix(&big, &a);
            for alpha in big.units() {
                for beta in big.elements() {
                    let p = [[alpha, FieldElem::ZERO], [beta, FieldElem::ONE]];
                    let m = mat_mul(&big, &mat_mul(&big, &a_inv, &p), &a);
                    keep(Pgl2Elem::from_matrix(&big, m)?);
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

fn extension_of(field: &Field, m: u32) -> Result<(Field, Embedding)> {
    if m == 0 {
        return Err(Error::InvalidArgument("extension degree must be positive".into()));
    }
    let fm = if m == 1 { field.clone() } else { field.extension(m)? };
    let emb = Embedding::new(field, &fm)?;
    Ok((fm, emb))
}

/// `Stab(f)` in `PGL_2(F_{q^m})` for `f` over `field = F_q`.
pub fn stabilizer(field: &Field, f: &BinaryQuartic<FieldElem>, m: u32) -> Result<Stabilizer> {
    let (fm, emb) = extension_of(field, m)?;
    let elements = stabilizer_in(&fm, &f.embed(&emb), DEFAULT_BUDGET)?;
    Ok(Stabilizer { field: fm, ext_degree: m, elements })
}

/// Exhaustive search over `PGL_2(F_{q^m})`.
pub fn stabilizer_brute_force(
    field: &Field,
    f: &BinaryQuartic<FieldElem>,
    m: u32,
    budget: u128,
) -> Result<Stabilizer> {
    let (fm, emb) = extension_of(field, m)?;
    let needed = Pgl2Elem::group_order(fm.q());
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let fe = f.embed(&emb);
    let elements = Pgl2Elem::enumerate(&fm).filter(|g| act(&fm, g, &fe) == fe).collect();
    Ok(Stabilizer { field: fm, ext_degree: m, elements })
}

/// Degree over `F_q` (`q = p^k`) of the subfield generated by `x`.
fn definition_degree(big: &Field, k: u32, x: FieldElem) -> u32 {
    let n = big.k() / k;
    (1..=n).find(|e| n % e == 0 && big.frobenius_pow(x, k * e) == x).unwrap()
}

/// The stabilizer over the algebraic closure, for forms where it is finite.
pub fn geometric_stabilizer(field: &Field, f: &BinaryQuartic<FieldElem>) -> Result<GeometricStabilizer> {
    let t = classify_type(field, f);
    if !t.is_regular() {
        return Err(Error::NotStable(t.to_string()));
    }
    let s = splitting_degree(field, &f.dehomogenize())?;
    let (big, emb) = extension_of(field, s)?;
    let f_big = f.embed(&emb);
    let roots = projective_roots(&big, &f_big)?;
    let cands = finite_candidates(&big, &roots).expect("regular forms have finite stabilizers");
    let elements: Vec<Pgl2Elem> = cands
        .into_iter()
        .filter(|g| act(&big, g, &f_big) == f_big)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let degrees = elements
        .iter()
        .map(|g| {
            g.matrix()
                .iter()
                .flatten()
                .fold(1, |acc, &x| lcm(acc, definition_degree(&big, field.k(), x)))
        })
        .collect();
    Ok(GeometricStabilizer { field: big, elements, degrees })
}

/// Whether `elements` is closed under composition and inverses.
pub fn is_closed_under_composition(field: &Field, elements: &[Pgl2Elem]) -> bool {
    let set: BTreeSet<_> = elements.iter().copied().collect();
    elements.iter().all(|g| {
        set.contains(&g.inverse(field)) && elements.iter().all(|h| set.contains(&g.compose(field, h)))
    })
}

/// `#E[2](F_{q^m})` for `E: y^2 = x^3 + a x + b`: one for the origin plus the
/// roots of the cubic in `F_{q^m}`.
pub fn two_torsion_count(field: &Field, a: FieldElem, b: FieldElem, m: u32) -> Result<u64> {
    if super::discriminant(field, &a, &b).is_zero() {
        return Err(Error::SingularCurve);
    }
    Ok(1 + cubic_factor_degrees(field, a, b)?
        .into_iter()
        .filter(|e| m % e == 0)
        .map(u64::from)
        .sum::<u64>())
}

/// Degrees of the irreducible factors of `x^3 + a x + b`, ascending.
pub fn cubic_factor_degrees(field: &Field, a: FieldElem, b: FieldElem) -> Result<Vec<u32>> {
    let cubic = UniPoly::from_coeffs(vec![b, a, FieldElem::ZERO, FieldElem::ONE]);
    Ok(cubic.factor(field)?.degree_multiset().into_iter().map(|d| d as u32).collect())
}
