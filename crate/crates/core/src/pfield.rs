//! The projective line over `F_q`: closed points, orders of sections of
//! `O(m)`, Riemann-Roch, the zeta function and Euler products.
//!
//! A section of `O(m)` is a polynomial `s(t)` of degree at most `m` in the
//! chart `t`; in the chart `u = 1/t` at infinity it is `u^m s(1/u)`, so its
//! order at infinity is `m - deg s`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{irreducible_count, is_irreducible, Field, FieldElem, UniPoly};
use crate::report::rational_json;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ClosedPoint {
    Infinity,
    /// A monic irreducible polynomial in `t`.
    Finite(UniPoly),
}

impl ClosedPoint {
    pub fn finite(p: UniPoly) -> Result<ClosedPoint> {
        if !p.is_monic() || p.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidArgument("closed points are monic of positive degree".into()));
        }
        Ok(ClosedPoint::Finite(p))
    }

    /// Like [`ClosedPoint::finite`], also checking irreducibility.
    pub fn checked(field: &Field, p: UniPoly) -> Result<ClosedPoint> {
        if !is_irreducible(&p, field) {
            return Err(Error::InvalidArgument("closed points need an irreducible polynomial".into()));
        }
        ClosedPoint::finite(p)
    }

    pub fn degree(&self) -> u32 {
        match self {
            ClosedPoint::Infinity => 1,
            ClosedPoint::Finite(p) => p.degree().unwrap() as u32,
        }
    }

    pub fn to_json(&self, field: &Field) -> serde_json::Value {
        match self {
            ClosedPoint::Infinity => serde_json::json!({ "inf": true }),
            ClosedPoint::Finite(p) => p.to_json(field),
        }
    }
}

/// `infinity`, then the monic irreducibles of degree `1..=max_deg`, each
/// degree in lexicographic order of the coefficient vector (constant term
/// first).
#[derive(Clone, Debug)]
pub struct ClosedPoints {
    field: Field,
    max_deg: u32,
    infinity_pending: bool,
    deg: u32,
    index: u64,
}

impl ClosedPoints {
    /// Resumes at the `index`-th monic polynomial of degree `deg`, skipping
    /// infinity.
    pub fn starting_at(field: &Field, max_deg: u32, deg: u32, index: u64) -> ClosedPoints {
        ClosedPoints { field: field.clone(), max_deg, infinity_pending: false, deg: deg.max(1), index }
    }

    /// The current position, for restarting.
    pub fn position(&self) -> (u32, u64) {
        (self.deg, self.index)
    }

    fn monic(&self, deg: u32, index: u64) -> UniPoly {
        let q = self.field.q();
        let mut coeffs = vec![FieldElem::ZERO; deg as usize + 1];
        let mut r = index;
        for j in (0..deg as usize).rev() {
            coeffs[j] = self.field.element(r % q);
            r /= q;
        }
        coeffs[deg as usize] = FieldElem::ONE;
        UniPoly::from_coeffs(coeffs)
    }
}

impl Iterator for ClosedPoints {
    type Item = ClosedPoint;

    fn next(&mut self) -> Option<ClosedPoint> {
        if self.infinity_pending {
            self.infinity_pending = false;
            return Some(ClosedPoint::Infinity);
        }
        while self.deg <= self.max_deg {
            let total = self.field.q().checked_pow(self.deg).expect("degree too large to enumerate");
            while self.index < total {
                let p = self.monic(self.deg, self.index);
                self.index += 1;
                if is_irreducible(&p, &self.field) {
                    return Some(ClosedPoint::Finite(p));
                }
            }
            self.deg += 1;
            self.index = 0;
        }
        None
    }
}

pub fn closed_points(field: &Field, max_deg: u32) -> ClosedPoints {
    ClosedPoints { field: field.clone(), max_deg, infinity_pending: max_deg >= 1, deg: 1, index: 0 }
}

/// Order of vanishing; the zero section vanishes to infinite order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    pub fn at_least(self, n: u32) -> bool {
        self >= Order::Finite(n)
    }
}

/// Order at `point` of `s` viewed as a section of `O(m)`.
pub fn ord_at(field: &Field, point: &ClosedPoint, s: &UniPoly, m: i64) -> Result<Order> {
    let Some(deg) = s.degree() else { return Ok(Order::Infinite) };
    if deg as i64 > m {
        return Err(Error::DegreeBound { degree: deg, bound: m });
    }
    Ok(match point {
        ClosedPoint::Infinity => Order::Finite((m - deg as i64) as u32),
        ClosedPoint::Finite(p) => {
            let mut n = 0;
            let mut cur = s.clone();
            loop {
                let (quo, rem) = cur.div_rem(p, field);
                if !rem.is_zero() {
                    break;
                }
                n += 1;
                cur = quo;
            }
            Order::Finite(n)
        }
    })
}

/// `dim H^0(P^1, O(m))`.
pub fn rr_dim(m: i64) -> u64 {
    if m < 0 {
        0
    } else {
        m as u64 + 1
    }
}

/// `zeta_{P^1}(s) = 1 / ((1 - q^-s)(1 - q^(1-s)))`.
pub fn zeta_p1(q: u64, s: u32) -> Result<BigRational> {
    if s < 2 {
        return Err(Error::InvalidArgument(format!("zeta_P1 has a pole at s = 1; need s >= 2, got {s}")));
    }
    let one = BigRational::one();
    let qs = BigRational::from_integer(BigInt::from(q).pow(s));
    let qs1 = BigRational::from_integer(BigInt::from(q).pow(s - 1));
    Ok(one.clone() / ((&one - one.clone() / qs) * (&one - one.clone() / qs1)))
}

/// A local factor `sum_i c_i x^i` in `x = 1/q_v`, with `c_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFactor {
    pub name: String,
    pub coeffs: Vec<i64>,
}

impl LocalFactor {
    pub fn new(name: &str, coeffs: Vec<i64>) -> Result<LocalFactor> {
        if coeffs.first() != Some(&1) {
            return Err(Error::InvalidArgument("local factors must have constant term 1".into()));
        }
        Ok(LocalFactor { name: name.to_string(), coeffs })
    }

    pub fn one() -> LocalFactor {
        LocalFactor { name: "one".into(), coeffs: vec![1] }
    }

    /// `1 - x^s`, the factor of `zeta(s)^-1`.
    pub fn zeta_inverse(s: u32) -> LocalFactor {
        let mut c = vec![0; s as usize + 1];
        c[0] = 1;
        c[s as usize] = -1;
        LocalFactor { name: format!("1-q_v^-{s}"), coeffs: c }
    }

    /// `1 - x^2`: regular quartics.
    pub fn regular() -> LocalFactor {
        LocalFactor { name: "regular".into(), coeffs: vec![1, 0, -1] }
    }

    /// `1 - 2 x^2 + x^3`: transversal `(a, b)`.
    pub fn transversal() -> LocalFactor {
        LocalFactor { name: "transversal".into(), coeffs: vec![1, 0, -2, 1] }
    }

    /// `(1 - x^2)(1 - 2 x^2 + x^3)`.
    pub fn regular_and_transversal() -> LocalFactor {
        LocalFactor { name: "regular_and_transversal".into(), coeffs: vec![1, 0, -3, 1, 2, -1] }
    }

    /// `1 - x^10`: minimal `(a, b)`.
    pub fn minimal() -> LocalFactor {
        LocalFactor { name: "minimal".into(), ..LocalFactor::zeta_inverse(10) }
    }

    /// Lowest `i >= 1` with `c_i != 0`; `None` for the constant factor.
    pub fn order(&self) -> Option<u32> {
        self.coeffs.iter().skip(1).position(|&c| c != 0).map(|i| i as u32 + 1)
    }

    pub fn eval_exact(&self, q: u64, deg: u32) -> BigRational {
        let x = BigRational::new(BigInt::one(), BigInt::from(q).pow(deg));
        let mut acc = BigRational::from_integer(BigInt::from(0));
        for &c in self.coeffs.iter().rev() {
            acc = acc * &x + BigRational::from_integer(BigInt::from(c));
        }
        acc
    }

    /// `ln` of the factor at a point of degree `deg`.
    pub fn ln(&self, q: u64, deg: u32) -> f64 {
        let x = (q as f64).powi(-(deg as i32));
        let mut u = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            u = (u + c as f64) * x;
        }
        // Horner leaves u = sum_{i>=1} c_i x^i.
        u.ln_1p()
    }
}

/// A truncated Euler product over the closed points of degree `<= degree`.
#[derive(Clone, Debug, Serialize)]
pub struct EulerProduct {
    pub factor: String,
    pub q: u64,
    pub degree: u32,
    pub value: f64,
    /// Present when the product was formed exactly.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<BigRational>,
    /// Bound on `|ln(full product) - ln(truncated product)|`.
    pub tail_bound: f64,
}

fn ser_opt_rational<S: serde::Serializer>(r: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => rational_json(r).serialize(s),
        None => s.serialize_none(),
    }
}

impl EulerProduct {
    /// Interval for the untruncated product implied by the tail bound.
    pub fn limit_interval(&self) -> (f64, f64) {
        (self.value * (-self.tail_bound).exp(), self.value * self.tail_bound.exp())
    }
}

/// Number of closed points of degree `n` on `P^1` (infinity counts in degree 1).
pub fn point_count(q: u64, n: u32) -> Result<num_bigint::BigUint> {
    let c = irreducible_count(q, n)?;
    Ok(if n == 1 { c + 1u32 } else { c })
}

/// Bound on the log of the tail `prod_{deg v > degree}`. With `|ln f_v| <= C
/// q_v^-s` and at most `q^n / n` points of degree `n`, the tail is at most
/// `C q^((D+1)(1-s)) / ((D+1)(1 - q^(1-s)))`.
pub fn tail_bound(q: u64, degree: u32, factor: &LocalFactor) -> f64 {
    let Some(s) = factor.order() else { return 0.0 };
    // |ln(1 + u)| <= 2|u| for |u| <= 1/2, and |u| <= sum |c_i| x^s.
    let c = 2.0 * factor.coeffs.iter().skip(1).map(|c| c.abs() as f64).sum::<f64>();
    let qf = q as f64;
    let d1 = degree as f64 + 1.0;
    let s = s as f64;
    c * qf.powf(d1 * (1.0 - s)) / (d1 * (1.0 - qf.powf(1.0 - s)))
}

/// Approximate bit size of the exact product, to decide whether to form it.
fn exact_cost_bits(q: u64, degree: u32, factor: &LocalFactor) -> f64 {
    let top = factor.coeffs.len().saturating_sub(1) as f64;
    (1..=degree)
        .map(|n| {
            let count = point_count(q, n).map(|c| c.to_f64().unwrap_or(f64::INFINITY)).unwrap_or(0.0);
            count * n as f64 * top * (q as f64).log2()
        })
        .sum()
}

const EXACT_BITS_LIMIT: f64 = 200_000.0;

/// Euler product grouped by degree: `prod_n f(q^n)^{N_n}` with `N_n` the
/// number of closed points of degree `n`. Exact when the result is small.
pub fn euler_product(q: u64, degree: u32, factor: &LocalFactor) -> Result<EulerProduct> {
    if degree == 0 {
        return Err(Error::InvalidArgument("truncation degree must be positive".into()));
    }
    let mut log = 0.0;
    for n in 1..=degree {
        let count = point_count(q, n)?.to_f64().unwrap_or(f64::INFINITY);
        let l = factor.ln(q, n);
        if l != 0.0 {
            log += count * l;
        }
    }
    let exact = if exact_cost_bits(q, degree, factor) <= EXACT_BITS_LIMIT {
        let mut acc = BigRational::one();
        for n in 1..=degree {
            let count = point_count(q, n)?.to_u32().expect("small exponent");
            acc *= pow_rational(&factor.eval_exact(q, n), count);
        }
        Some(acc)
    } else {
        None
    };
    let value = match &exact {
        Some(r) => crate::report::rational_to_f64(r),
        None => log.exp(),
    };
    Ok(EulerProduct {
        factor: factor.name.clone(),
        q,
        degree,
        value,
        exact,
        tail_bound: tail_bound(q, degree, factor),
    })
}

fn pow_rational(x: &BigRational, mut e: u32) -> BigRational {
    let mut base = x.clone();
    let mut acc = BigRational::one();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        e >>= 1;
    }
    acc
}

/// Euler product over an explicit enumeration of closed points, with a local
/// factor that may depend on the point itself.
pub fn euler_product_explicit<F>(field: &Field, degree: u32, factor: F) -> Result<BigRational>
where
    F: Fn(&ClosedPoint) -> BigRational,
{
    if degree == 0 {
        return Err(Error::InvalidArgument("truncation degree must be positive".into()));
    }
    let mut acc = BigRational::one();
    for v in closed_points(field, degree) {
        acc *= factor(&v);
    }
    Ok(acc)
}
