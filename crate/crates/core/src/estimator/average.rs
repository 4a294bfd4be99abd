//! Assembly of stratum masses into the average `|M_L| / |A_L|`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::mc::{combined_density_any, regular_density_any, sample_section, transversal_density_any, Estimate};
use super::{aut_mass, fiber_at, is_regular_section, section_space_dims, BundleStratum};
use crate::error::{Error, Result};
use crate::ff::Field;
use crate::pfield::{zeta_p1, ClosedPoint};
use crate::quartic::{act_matrix, classify_type, invariants, BinaryQuartic, CoeffRing, PolyRing};
use crate::report::{rational_json, rational_to_f64, Check};

/// `1/(q^3 - q) + sum_{n=1}^{n_max} 1/((q - 1) q^(n+1))`.
pub fn bun_mass(q: u64, n_max: u32) -> Result<BigRational> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok((0..=n_max).map(|n| aut_mass(q, n)).fold(BigRational::zero(), |acc, x| acc + x))
}

/// `q^dim |Aut|^-1 / q^(10 d + 2)`: the mass of the whole section space of a
/// stratum, relative to the number of families `(a, b)`.
fn stratum_scale(q: u64, n: u32, d: u32) -> BigRational {
    let dim = section_space_dims(n, d).1;
    let qb = BigInt::from(q);
    let num = qb.pow(dim as u32);
    let den = qb.pow(10 * d + 2);
    BigRational::new(num, den) * aut_mass(q, n)
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumEntry {
    pub n: u32,
    pub bounds: [i64; 5],
    pub dims: u64,
    /// `sampled`, `exact` (n = 2d) or `skipped` (d < n < 2d when
    /// transversal, as `Delta` is never square-free there).
    pub method: &'static str,
    pub samples: u64,
    pub regular_rate: f64,
    pub ci: [f64; 2],
    pub mass: f64,
    pub mass_ci: [f64; 2],
    /// Fewer samples than the Monte Carlo minimum.
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AverageReport {
    pub q: u64,
    pub d: u32,
    pub mode: &'static str,
    pub seed: u64,
    pub samples_per_stratum: u64,
    pub strata: Vec<StratumEntry>,
    /// Strata with `n > 2d`: no regular sections.
    pub case1: u32,
    pub case2: u32,
    /// Transversal density of `(a, b)` used to normalize in transversal mode.
    pub transversal_rate: Option<Estimate>,
    /// Strata `n < d - 1`.
    pub low_strata: f64,
    pub low_strata_ci: [f64; 2],
    /// Strata `d < n < 2d`.
    pub middle_strata: f64,
    pub total: f64,
    pub total_ci: [f64; 2],
    pub notes: Vec<String>,
}

impl AverageReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn csv_rows(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        let header =
            vec!["n", "dims", "method", "samples", "regular_rate", "ci_low", "ci_high", "mass", "mass_low", "mass_high"];
        let rows = self
            .strata
            .iter()
            .map(|s| {
                vec![
                    s.n.to_string(),
                    s.dims.to_string(),
                    s.method.to_string(),
                    s.samples.to_string(),
                    s.regular_rate.to_string(),
                    s.ci[0].to_string(),
                    s.ci[1].to_string(),
                    s.mass.to_string(),
                    s.mass_ci[0].to_string(),
                    s.mass_ci[1].to_string(),
                ]
            })
            .collect();
        (header, rows)
    }
}

/// Estimate of `|M_L| / |A_L|` (or its transversal variant) as a sum over
/// the strata `E = O(n) + O`, `0 <= n <= 2d`.
pub fn hn_average(field: &Field, d: u32, samples: u64, seed: u64, transversal_only: bool) -> Result<AverageReport> {
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample per stratum".into()));
    }
    let q = field.q();
    let rho = if transversal_only { Some(transversal_density_any(field, d, samples, seed)?) } else { None };
    let mut strata = Vec::new();
    let mut notes = Vec::new();
    for n in 0..=2 * d {
        let (bounds, dims) = section_space_dims(n, d);
        if n == 2 * d {
            strata.push(StratumEntry {
                n,
                bounds,
                dims,
                method: "exact",
                samples: 0,
                regular_rate: f64::NAN,
                ci: [f64::NAN; 2],
                mass: 1.0,
                mass_ci: [1.0, 1.0],
                flagged: false,
            });
            continue;
        }
        if transversal_only && n > d {
            strata.push(StratumEntry {
                n,
                bounds,
                dims,
                method: "skipped",
                samples: 0,
                regular_rate: 0.0,
                ci: [0.0, 0.0],
                mass: 0.0,
                mass_ci: [0.0, 0.0],
                flagged: false,
            });
            continue;
        }
        let st = BundleStratum::new(field, n, d);
        let est = if transversal_only {
            combined_density_any(&st, samples, seed)?
        } else {
            regular_density_any(&st, samples, seed)?
        };
        let scale = rational_to_f64(&stratum_scale(q, n, d));
        let (mass, mass_ci) = match &rho {
            Some(r) => {
                let lo = if r.ci[1] > 0.0 { est.ci[0] * scale / r.ci[1] } else { f64::NAN };
                let hi = if r.ci[0] > 0.0 { est.ci[1] * scale / r.ci[0] } else { f64::INFINITY };
                (est.rate * scale / r.rate, [lo, hi])
            }
            None => (est.rate * scale, [est.ci[0] * scale, est.ci[1] * scale]),
        };
        let flagged = samples < super::MIN_SAMPLES;
        if flagged {
            notes.push(format!("stratum n = {n}: only {samples} samples"));
        }
        if est.degenerate > 0 {
            notes.push(format!("stratum n = {n}: {} draws with zero discriminant counted as 0", est.degenerate));
        }
        strata.push(StratumEntry {
            n,
            bounds,
            dims,
            method: "sampled",
            samples,
            regular_rate: est.rate,
            ci: est.ci,
            mass,
            mass_ci,
            flagged,
        });
    }
    let sum = |pred: &dyn Fn(u32) -> bool, pick: &dyn Fn(&StratumEntry) -> f64| -> f64 {
        strata.iter().filter(|s| pred(s.n)).map(pick).sum()
    };
    let low = |n: u32| n + 1 < d;
    let low_strata = sum(&low, &|s| s.mass);
    let low_strata_ci = [sum(&low, &|s| s.mass_ci[0]), sum(&low, &|s| s.mass_ci[1])];
    let middle_strata = sum(&|n| n > d && n < 2 * d, &|s| s.mass);
    let all = |_: u32| true;
    let total = sum(&all, &|s| s.mass);
    let total_ci = [sum(&all, &|s| s.mass_ci[0]), sum(&all, &|s| s.mass_ci[1])];
    if transversal_only {
        notes.push("strata d < n < 2d contribute 0: the discriminant is never square-free there".into());
    } else {
        notes.push(format!(
            "middle strata d < n < 2d sampled directly: {middle_strata}; the asymptotic bound has the shape T/(q-1)^2 with T unspecified"
        ));
    }
    notes.push("strata n in [d-1, d] are sampled; their vanishing is an asymptotic statement in d".into());
    notes.push("families (a, b) are counted as raw representatives, not up to (c^4 a, c^6 b)".into());
    Ok(AverageReport {
        q,
        d,
        mode: if transversal_only { "transversal" } else { "full" },
        seed,
        samples_per_stratum: samples,
        strata,
        case1: 0,
        case2: 1,
        transversal_rate: rho,
        low_strata,
        low_strata_ci,
        middle_strata,
        total,
        total_ci,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Case1Report {
    pub q: u64,
    pub n: u32,
    pub d: u32,
    pub samples: u64,
    pub nonregular: u64,
    /// Sections with a point where `c1^2 - 4 c0 c2` vanishes and the fiber
    /// there is not stable.
    pub witnessed: u64,
    pub pass: bool,
}

/// For `n > 2d` the last two coefficients vanish, so every fiber is
/// `x^2 (c0 x^2 + c1 x y + c2 y^2)`; `c1^2 - 4 c0 c2` is a section of
/// `O(2n + 4d)` and vanishes somewhere, where the fiber has a double factor
/// twice over.
pub fn case1_witness(field: &Field, n: u32, d: u32, count: u64, seed: u64) -> Result<Case1Report> {
    if n <= 2 * d {
        return Err(Error::InvalidArgument(format!("case 1 needs n > 2d, got n = {n}, d = {d}")));
    }
    let st = BundleStratum::new(field, n, d);
    let (nonregular, witnessed) = (0..count)
        .into_par_iter()
        .map(|i| -> Result<(u64, u64)> {
            let s = sample_section(&st, seed, i);
            let nonreg = s.is_zero() || !is_regular_section(field, &s)?;
            let c = &s.c;
            let disc = c[1].square(field).sub(&c[0].mul(&c[2], field).scale(field.from_int(4), field), field);
            let bound = 2 * n as usize + 4 * d as usize;
            let point = match disc.degree() {
                Some(k) if k == bound => ClosedPoint::Finite(disc.factor(field)?.factors[0].0.clone()),
                _ => ClosedPoint::Infinity,
            };
            let (k, fib) = fiber_at(field, &s, &point)?;
            let seen = !classify_type(&k, &fib).is_regular();
            Ok((nonreg as u64, seen as u64))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(Case1Report {
        q: field.q(),
        n,
        d,
        samples: count,
        nonregular,
        witnessed,
        pass: nonregular == count && witnessed == count,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Case2Report {
    pub q: u64,
    pub d: u32,
    pub samples: u64,
    pub regular: u64,
    pub reduced: u64,
    /// Regular sections that did not reduce, as JSON.
    pub failures: Vec<serde_json::Value>,
    pub contribution: u32,
    pub pass: bool,
}

/// In stratum `n = 2d`, `c4 = 0` and `c3` is constant; a regular section has
/// `c3 != 0`, and `[[1, 0], [-c2/3, 1]] [[1/c3, 0], [0, 1]] [[0, 1], [1, 0]]`
/// over `F_q[t]` takes it to `y (x^3 + A x y^2 + B y^3)`. Sampled regular
/// sections are checked against this.
pub fn case2_contribution(field: &Field, d: u32, count: u64, seed: u64) -> Result<Case2Report> {
    let st = BundleStratum::new(field, 2 * d, d);
    let ring = PolyRing::new(field);
    let results: Vec<Option<Option<serde_json::Value>>> = (0..count)
        .into_par_iter()
        .map(|i| -> Result<Option<Option<serde_json::Value>>> {
            let s = sample_section(&st, seed, i);
            if s.is_zero() || !is_regular_section(field, &s)? {
                return Ok(None);
            }
            let ok = s.c[4].is_zero()
                && s.c[3].degree() == Some(0)
                && reduce_case2(field, &ring, &s.as_quartic()).is_some();
            Ok(Some(if ok { None } else { Some(s.to_json(field)) }))
        })
        .collect::<Result<_>>()?;
    let regular = results.iter().filter(|r| r.is_some()).count() as u64;
    let failures: Vec<_> = results.into_iter().flatten().flatten().collect();
    let reduced = regular - failures.len() as u64;
    Ok(Case2Report {
        q: field.q(),
        d,
        samples: count,
        regular,
        reduced,
        pass: failures.is_empty(),
        failures,
        contribution: 1,
    })
}

/// The explicit Case-2 matrix applied over `F_q[t]`; `Some` iff the result
/// is the Weierstrass section of the invariants.
pub(crate) fn reduce_case2(
    field: &Field,
    ring: &PolyRing,
    f: &BinaryQuartic<crate::ff::UniPoly>,
) -> Option<BinaryQuartic<crate::ff::UniPoly>> {
    let c3inv = ring.unit_inverse(&f.c[3])?;
    let m1 = [[ring.one(), ring.zero()], [f.c[2].scale(field.ratio(-1, 3), field), ring.one()]];
    let m2 = [[c3inv, ring.zero()], [ring.zero(), ring.one()]];
    let m3 = [[ring.zero(), ring.one()], [ring.one(), ring.zero()]];
    let g = poly_mat_mul(ring, &poly_mat_mul(ring, &m1, &m2), &m3);
    let w = act_matrix(ring, &g, f).ok()?;
    let inv = invariants(ring, f);
    let target = BinaryQuartic::new([ring.zero(), ring.one(), ring.zero(), inv.a, inv.b]);
    (w == target).then_some(w)
}

type PolyMat = [[crate::ff::UniPoly; 2]; 2];

fn poly_mat_mul(ring: &PolyRing, a: &PolyMat, b: &PolyMat) -> PolyMat {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| ring.add(&ring.mul(&a[i][0], &b[0][j]), &ring.mul(&a[i][1], &b[1][j])))
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SelmerBoundsReport {
    pub q: u64,
    pub d: u32,
    pub upper_surrogate: f64,
    pub upper_ci: [f64; 2],
    pub transversal_average: f64,
    pub transversal_rate: f64,
    pub lower_surrogate: f64,
    pub lower_ci: [f64; 2],
    pub floor: serde_json::Value,
    pub floor_value: f64,
    pub excess_bound: String,
    pub middle_strata: f64,
    pub checks: Vec<Check>,
}

/// Upper surrogate: the full average. Lower surrogate: the transversal
/// average times the transversal density, i.e. the square-free part of
/// `|M_L|` over all of `|A_L|`. The floor `3 zeta(10)^-1` is printed beside it.
pub fn selmer_bounds_report(field: &Field, d: u32, samples: u64, seed: u64) -> Result<SelmerBoundsReport> {
    let q = field.q();
    let full = hn_average(field, d, samples, seed, false)?;
    let trans = hn_average(field, d, samples, seed, true)?;
    let rho = trans.transversal_rate.clone().expect("transversal run has a rate");
    let lower = trans.total * rho.rate;
    let lower_ci = [trans.total_ci[0] * rho.ci[0], trans.total_ci[1] * rho.ci[1]];
    let floor = BigRational::from_integer(3.into()) / zeta_p1(q, 10)?;
    let floor_value = rational_to_f64(&floor);
    let checks = vec![Check::holds(
        "lower surrogate <= upper surrogate",
        lower <= full.total,
        format!("{lower} <= {}", full.total),
    )];
    Ok(SelmerBoundsReport {
        q,
        d,
        upper_surrogate: full.total,
        upper_ci: full.total_ci,
        transversal_average: trans.total,
        transversal_rate: rho.rate,
        lower_surrogate: lower,
        lower_ci,
        floor: rational_json(&floor),
        floor_value,
        excess_bound: format!("T/(q-1)^2 = T/{}, T unspecified", (q - 1) * (q - 1)),
        middle_strata: full.middle_strata,
        checks,
    })
}
