//! Exhaustive counts over `V(F_q)` and `V(F_q[eps]/(eps^2))`.
//!
//! Every census enumerates quartics in lexicographic order of `(c0, .., c4)`
//! and splits the work over `c0`; partial counts are merged by addition, so
//! results do not depend on the number of worker threads.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem, UniPoly};
use crate::pfield::{ord_at, ClosedPoint, Order};
use crate::quartic::{
    act, classify_type, discriminant, invariants, BinaryQuartic, CoeffRing, DualNumber, DualRing,
    Pgl2Elem, QuarticType,
};
use crate::report::{inv_pow, rational_json, Check};

/// Largest number of quartics (or quartic-group pairs) a census will visit.
pub const CENSUS_BUDGET: u128 = 1_000_000_000;
/// Largest `q^10` for the exhaustive part of the dual-number census.
pub const DUAL_V_BUDGET: u128 = 100_000_000;
/// Largest `q^4` for the `(a, b)` part of the dual-number census.
pub const DUAL_S_BUDGET: u128 = 1_000_000;

fn check_budget(needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn pow(q: u64, e: u32) -> u128 {
    (q as u128).pow(e)
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeCensusReport {
    pub q: u64,
    pub counts: BTreeMap<QuarticType, u64>,
    pub nonregular_total: u64,
    pub regular_total: u64,
    pub checks: Vec<Check>,
}

impl TypeCensusReport {
    pub fn count(&self, t: QuarticType) -> u64 {
        self.counts.get(&t).copied().unwrap_or(0)
    }

    pub fn passed(&self) -> bool {
        crate::report::all_pass(&self.checks)
    }
}

/// Classifies every `f` in `V(F_q)`.
pub fn type_census(q: u64) -> Result<TypeCensusReport> {
    let field = Field::of_order(q)?;
    check_budget(pow(q, 5), CENSUS_BUDGET)?;
    let block = q.pow(4);
    let counts = (0..q)
        .into_par_iter()
        .map(|c0| {
            let mut local = BTreeMap::new();
            for i in c0 * block..(c0 + 1) * block {
                *local.entry(classify_type(&field, &BinaryQuartic::from_index(&field, i))).or_insert(0u64) += 1;
            }
            local
        })
        .reduce(BTreeMap::new, merge_counts);
    let mut counts = counts;
    for t in QuarticType::ALL {
        counts.entry(t).or_insert(0);
    }
    let get = |t| counts[&t];
    let nonregular_total = get(QuarticType::T22) + get(QuarticType::T4) + get(QuarticType::Zero);
    let regular_total = get(QuarticType::T1111) + get(QuarticType::T112) + get(QuarticType::T13);
    let checks = vec![
        Check::exact("total = q^5", q.pow(5), nonregular_total + regular_total),
        Check::exact("nonregular = q^3", q.pow(3), nonregular_total),
        Check::exact("#(1,1,2) = q(q^2-1)(q-1)", q * (q * q - 1) * (q - 1), get(QuarticType::T112)),
        Check::exact("#(1,3) = q(q^2-1)", q * (q * q - 1), get(QuarticType::T13)),
        Check::exact("#Zero = 1", 1, get(QuarticType::Zero)),
    ];
    Ok(TypeCensusReport { q, counts, nonregular_total, regular_total, checks })
}

fn merge_counts<K: Ord>(mut a: BTreeMap<K, u64>, b: BTreeMap<K, u64>) -> BTreeMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub representative: Vec<u64>,
    pub size: u64,
    pub stabilizer_order: u64,
    pub geometric_type: QuarticType,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberCensusReport {
    pub q: u64,
    pub a: u64,
    pub b: u64,
    pub fiber_size: u64,
    pub orbits: Vec<OrbitReport>,
    pub types: BTreeSet<QuarticType>,
    pub checks: Vec<Check>,
}

impl FiberCensusReport {
    pub fn passed(&self) -> bool {
        crate::report::all_pass(&self.checks)
    }
}

/// The geometric types lying over `(a, b)`: only `(1,1,1,1)` off the
/// discriminant locus, `(1,1,2)` and `(2,2)` on it away from the origin, and
/// `(1,3)`, `(4)`, `Zero` over the origin.
pub fn expected_fiber_types(field: &Field, a: FieldElem, b: FieldElem) -> BTreeSet<QuarticType> {
    use QuarticType::*;
    let set: &[QuarticType] = if !discriminant(field, &a, &b).is_zero() {
        &[T1111]
    } else if !(a.is_zero() && b.is_zero()) {
        &[T112, T22]
    } else {
        &[T13, T4, Zero]
    };
    set.iter().copied().collect()
}

/// Rational orbits of `PGL_2(F_q)` on `{f : (a(f), b(f)) = (a, b)}`, computed by
/// applying the whole group to a representative.
pub fn fiber_census(q: u64, a: FieldElem, b: FieldElem) -> Result<FiberCensusReport> {
    let field = Field::of_order(q)?;
    check_budget(pow(q, 5), CENSUS_BUDGET)?;
    let block = q.pow(4);
    let fiber: Vec<u64> = (0..q)
        .into_par_iter()
        .flat_map_iter(|c0| {
            let field = &field;
            (c0 * block..(c0 + 1) * block).filter(move |&i| {
                let inv = invariants(field, &BinaryQuartic::from_index(field, i));
                inv.a == a && inv.b == b
            })
        })
        .collect();
    fiber_orbits(&field, a, b, fiber)
}

/// `fiber_census` for every `(a, b)` in `F_q^2`, with one pass over `V(F_q)`.
pub fn fiber_census_all(q: u64) -> Result<Vec<FiberCensusReport>> {
    let field = Field::of_order(q)?;
    check_budget(pow(q, 5) * Pgl2Elem::group_order(q), CENSUS_BUDGET)?;
    let mut fibers: BTreeMap<(FieldElem, FieldElem), Vec<u64>> = BTreeMap::new();
    for a in field.elements() {
        for b in field.elements() {
            fibers.insert((a, b), Vec::new());
        }
    }
    for i in 0..q.pow(5) {
        let inv = invariants(&field, &BinaryQuartic::from_index(&field, i));
        fibers.get_mut(&(inv.a, inv.b)).unwrap().push(i);
    }
    fibers.into_par_iter().map(|((a, b), fiber)| fiber_orbits(&field, a, b, fiber)).collect()
}

fn fiber_orbits(field: &Field, a: FieldElem, b: FieldElem, fiber: Vec<u64>) -> Result<FiberCensusReport> {
    let q = field.q();
    let order = Pgl2Elem::group_order(q);
    check_budget(fiber.len() as u128 * order, CENSUS_BUDGET)?;
    let group: Vec<Pgl2Elem> = Pgl2Elem::enumerate(field).collect();
    let mut seen: HashSet<u64> = HashSet::new();
    let mut orbits = Vec::new();
    for &i in &fiber {
        if seen.contains(&i) {
            continue;
        }
        let f = BinaryQuartic::from_index(field, i);
        let mut orbit = HashSet::new();
        let mut stab = 0u64;
        for g in &group {
            let h = act(field, g, &f);
            if h == f {
                stab += 1;
            }
            orbit.insert(h.index(field));
        }
        seen.extend(orbit.iter().copied());
        orbits.push(OrbitReport {
            representative: f.c.iter().map(|x| x.index()).collect(),
            size: orbit.len() as u64,
            stabilizer_order: stab,
            geometric_type: classify_type(field, &f),
        });
    }
    let types: BTreeSet<QuarticType> = orbits.iter().map(|o| o.geometric_type).collect();
    let mut checks = vec![
        Check::exact(
            "types match the invariant locus",
            format_types(&expected_fiber_types(field, a, b)),
            format_types(&types),
        ),
        Check::exact("orbit sizes sum to the fiber", fiber.len() as u64, orbits.iter().map(|o| o.size).sum()),
    ];
    let bad = orbits.iter().filter(|o| o.size as u128 * o.stabilizer_order as u128 != order).count();
    checks.push(Check::exact("orbits violating |orbit| |stab| = q^3 - q", 0, bad));
    Ok(FiberCensusReport {
        q,
        a: a.index(),
        b: b.index(),
        fiber_size: fiber.len() as u64,
        orbits,
        types,
        checks,
    })
}

fn format_types(s: &BTreeSet<QuarticType>) -> String {
    let v: Vec<_> = s.iter().map(|t| t.label()).collect();
    format!("{{{}}}", v.join(", "))
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCensusReport {
    pub q: u64,
    /// `None` when `q^10` is beyond the exhaustive budget.
    pub nonregular_v: Option<u64>,
    pub nontransversal_s: u64,
    pub regular_and_transversal_v: Option<u64>,
    pub checks: Vec<Check>,
}

impl DualCensusReport {
    pub fn passed(&self) -> bool {
        crate::report::all_pass(&self.checks)
    }
}

fn dual_index(field: &Field, i: u64) -> DualNumber {
    DualNumber { re: field.element(i / field.q()), eps: field.element(i % field.q()) }
}

/// Counts over `R = F_q[eps]/(eps^2)`: `f` in `V(R)` is regular when `f mod eps`
/// is, and `(a, b)` in `R^2` is transversal when `disc(a, b) != 0` in `R`.
pub fn dual_census(q: u64) -> Result<DualCensusReport> {
    let field = Field::of_order(q)?;
    let ring = DualRing::new(&field);
    let q2 = q * q;
    check_budget(pow(q, 4), DUAL_S_BUDGET)?;
    let nontransversal_s: u64 = (0..q2)
        .into_par_iter()
        .map(|ia| {
            let a = dual_index(&field, ia);
            (0..q2).filter(|&ib| ring.is_zero(&discriminant(&ring, &a, &dual_index(&field, ib)))).count() as u64
        })
        .sum();
    let mut checks = vec![Check::exact("nontransversal_S = 2q^2 - q", 2 * q2 - q, nontransversal_s)];
    let (nonregular_v, regular_and_transversal_v) = if pow(q, 10) <= DUAL_V_BUDGET {
        let q5 = q.pow(5);
        let block = q.pow(4);
        let (nonreg, good) = (0..q)
            .into_par_iter()
            .map(|c0| {
                let (mut nonreg, mut good) = (0u64, 0u64);
                for i0 in c0 * block..(c0 + 1) * block {
                    let f0 = BinaryQuartic::from_index(&field, i0);
                    if !classify_type(&field, &f0).is_regular() {
                        nonreg += q5;
                        continue;
                    }
                    for i1 in 0..q5 {
                        let f1 = BinaryQuartic::from_index(&field, i1);
                        let f = BinaryQuartic::new(std::array::from_fn(|k| DualNumber { re: f0.c[k], eps: f1.c[k] }));
                        if !ring.is_zero(&invariants(&ring, &f).disc) {
                            good += 1;
                        }
                    }
                }
                (nonreg, good)
            })
            .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
        checks.push(Check::exact("nonregular_V = q^8", q.pow(8), nonreg));
        checks.push(Check::exact(
            "regular_and_transversal_V = q^5(q^2-1)(q^3-2q+1)",
            q5 * (q2 - 1) * (q * q2 - 2 * q + 1),
            good,
        ));
        (Some(nonreg), Some(good))
    } else {
        (None, None)
    };
    Ok(DualCensusReport { q, nonregular_v, nontransversal_s, regular_and_transversal_v, checks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalCondition {
    Regular,
    Transversal,
    RegularAndTransversal,
    Minimal,
}

impl std::str::FromStr for LocalCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "regular" => Ok(LocalCondition::Regular),
            "transversal" => Ok(LocalCondition::Transversal),
            "regular_and_transversal" | "combined" => Ok(LocalCondition::RegularAndTransversal),
            "minimal" => Ok(LocalCondition::Minimal),
            other => Err(Error::Parse(format!("unknown local condition {other:?}"))),
        }
    }
}

/// The local density at a point with residue field of size `q`.
pub fn local_density(q: u64, which: LocalCondition) -> BigRational {
    let one = BigRational::one();
    let regular = &one - inv_pow(q, 2);
    let transversal = &one - inv_pow(q, 2) * BigRational::from_integer(2.into()) + inv_pow(q, 3);
    match which {
        LocalCondition::Regular => regular,
        LocalCondition::Transversal => transversal,
        LocalCondition::RegularAndTransversal => regular * transversal,
        LocalCondition::Minimal => one - inv_pow(q, 10),
    }
}

pub fn local_density_json(q: u64, which: LocalCondition) -> serde_json::Value {
    rational_json(&local_density(q, which))
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalJetReport {
    pub q: u64,
    /// Jets `a mod t^4` with `ord_t(a) >= 4`, out of `q^4`.
    pub a_divisible: u64,
    /// Jets `b mod t^6` with `ord_t(b) >= 6`, out of `q^6`.
    pub b_divisible: u64,
    pub nonminimal_density: serde_json::Value,
    pub checks: Vec<Check>,
}

/// Local non-minimality at the point `t = 0`: enumerates the 4-jets of `a` and
/// the 6-jets of `b` and counts those vanishing to order 4 and 6.
pub fn minimal_jet_census(q: u64) -> Result<MinimalJetReport> {
    let field = Field::of_order(q)?;
    check_budget(pow(q, 6), CENSUS_BUDGET)?;
    let t = ClosedPoint::finite(UniPoly::x())?;
    let count = |len: u32, need: u32| -> Result<u64> {
        let mut n = 0;
        for i in 0..q.pow(len) {
            let mut coeffs = Vec::with_capacity(len as usize);
            let mut r = i;
            for _ in 0..len {
                coeffs.push(field.element(r % q));
                r /= q;
            }
            let jet = UniPoly::from_coeffs(coeffs);
            // The jet is a section of O(len - 1); anything divisible by t^len is 0.
            let ord = ord_at(&field, &t, &jet, len as i64 - 1)?;
            if ord >= Order::Finite(need) {
                n += 1;
            }
        }
        Ok(n)
    };
    let a_divisible = count(4, 4)?;
    let b_divisible = count(6, 6)?;
    let density = crate::report::ratio(a_divisible * b_divisible, q.pow(10));
    let checks = vec![Check::exact(
        "nonminimal jet density = q^-10",
        rational_json(&inv_pow(q, 10)).to_string(),
        rational_json(&density).to_string(),
    )];
    Ok(MinimalJetReport { q, a_divisible, b_divisible, nonminimal_density: rational_json(&density), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_census_f5() {
        let r = type_census(5).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.nonregular_total, 125);
        assert_eq!(r.count(QuarticType::T112), 480);
        assert_eq!(r.count(QuarticType::T13), 120);
        let density = crate::report::ratio(r.regular_total, 3125);
        assert_eq!(density, local_density(5, LocalCondition::Regular));
    }

    #[test]
    fn origin_fiber() {
        let f = Field::new(5, 1).unwrap();
        let r = fiber_census(5, f.zero(), f.zero()).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.types, expected_fiber_types(&f, f.zero(), f.zero()));
    }

    #[test]
    fn densities() {
        assert_eq!(local_density(5, LocalCondition::Regular), crate::report::ratio(24, 25));
        assert_eq!(local_density(5, LocalCondition::Transversal), crate::report::ratio(116, 125));
        assert_eq!(local_density(5, LocalCondition::Minimal), BigRational::one() - inv_pow(5, 10));
    }

    #[test]
    fn dual_s_part() {
        for q in [7, 11, 13] {
            let r = dual_census(q).unwrap();
            assert_eq!(r.nontransversal_s, 2 * q * q - q);
            assert!(r.nonregular_v.is_none());
            assert!(r.passed());
        }
    }

    #[test]
    fn jets() {
        let r = minimal_jet_census(5).unwrap();
        assert_eq!((r.a_divisible, r.b_divisible), (1, 1));
        assert!(r.checks[0].pass);
    }
}
