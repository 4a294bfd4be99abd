//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails. Tolerances are fixed here and not configurable.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selmer_core::census::{dual_census, fiber_census_all, type_census};
use selmer_core::estimator::{
    bun_mass, case1_witness, case2_contribution, combined_density_mc, hn_average, minimality_rate_mc,
    regular_density_mc, transversal_density_mc, BundleStratum,
};
use selmer_core::pfield::{euler_product, LocalFactor};
use selmer_core::quartic::{
    classify_type, invariants, lie_stabilizer_dim, splitting_degree, stabilizer, two_torsion_count, BinaryQuartic,
    QuarticType,
};
use selmer_core::{Field, FieldElem};

const SEED: u64 = 20240601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_type_census() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for q in [5u64, 7, 11] {
        let r = match type_census(q) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("q={q}: {e}")),
        };
        let expected = [
            (QuarticType::T112, q * (q * q - 1) * (q - 1)),
            (QuarticType::T13, q * (q * q - 1)),
        ];
        let ok = r.nonregular_total == q.pow(3) && expected.iter().all(|&(t, n)| r.count(t) == n) && r.passed();
        pass &= ok;
        details.push(format!(
            "q={q}: nonregular={} (1,1,2)={} (1,3)={}",
            r.nonregular_total,
            r.count(QuarticType::T112),
            r.count(QuarticType::T13)
        ));
    }
    outcome(pass, details.join("; "))
}

fn c2_dual_census() -> Outcome {
    match dual_census(5) {
        Ok(r) => {
            let pass = r.nontransversal_s == 45
                && r.nonregular_v == Some(390_625)
                && r.regular_and_transversal_v == Some(8_700_000);
            outcome(
                pass,
                format!(
                    "nontransversal_S={} nonregular_V={:?} regular_and_transversal_V={:?}",
                    r.nontransversal_s, r.nonregular_v, r.regular_and_transversal_v
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c3_orbits() -> Outcome {
    use QuarticType::*;
    let f = Field::new(5, 1).unwrap();
    let all = match fiber_census_all(5) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut bad = 0;
    let mut orbits = 0;
    for r in &all {
        let (a, b) = (f.element(r.a), f.element(r.b));
        let disc = f.neg(f.add(f.mul_int(f.pow(a, 3), 4), f.mul_int(f.square(b), 27)));
        let expected: Vec<QuarticType> = if !disc.is_zero() {
            vec![T1111]
        } else if a.is_zero() && b.is_zero() {
            vec![T13, T4, Zero]
        } else {
            vec![T112, T22]
        };
        if r.types.iter().copied().collect::<Vec<_>>() != expected {
            bad += 1;
        }
        for o in &r.orbits {
            orbits += 1;
            if o.size * o.stabilizer_order != 120 {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && all.len() == 25, format!("{} fibers, {orbits} orbits, {bad} mismatches", all.len()))
}

fn random_form(f: &Field, rng: &mut ChaCha8Rng) -> BinaryQuartic<FieldElem> {
    BinaryQuartic::new(std::array::from_fn(|_| f.random(rng)))
}

fn c4_stabilizer_orders() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = 0;
    let mut seen = BTreeMap::new();
    for q in [5u64, 7] {
        let f = Field::new(q, 1).unwrap();
        for (t, order) in [(QuarticType::T1111, 4), (QuarticType::T112, 2), (QuarticType::T13, 1)] {
            let mut n = 0;
            while n < 100 {
                let g = random_form(&f, &mut rng);
                if classify_type(&f, &g) != t {
                    continue;
                }
                n += 1;
                let m = splitting_degree(&f, &g.dehomogenize()).unwrap();
                let got = stabilizer(&f, &g, m).map(|s| s.order()).unwrap_or(0);
                *seen.entry((q, t.label(), got)).or_insert(0) += 1;
                if got != order {
                    bad += 1;
                }
            }
        }
    }
    let summary: Vec<_> = seen.iter().map(|((q, t, o), n)| format!("q={q} {t}: order {o} x{n}")).collect();
    outcome(bad == 0, format!("{}; {bad} mismatches", summary.join(", ")))
}

fn c5_two_torsion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut bad = 0;
    let mut n = 0;
    let qs = [5u64, 7, 11, 13];
    while n < 200 {
        let f = Field::new(qs[n % qs.len()], 1).unwrap();
        let (a, b) = (f.random(&mut rng), f.random(&mut rng));
        let w = BinaryQuartic::weierstrass(a, b);
        if invariants(&f, &w).disc.is_zero() {
            continue;
        }
        n += 1;
        for m in 1..=4 {
            let s = stabilizer(&f, &w, m).map(|s| s.order() as u64);
            let t = two_torsion_count(&f, a, b, m);
            if s.is_err() || t.is_err() || s.unwrap() != t.unwrap() {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{n} curves over F_5, F_7, F_11, F_13, m = 1..4: {bad} mismatches"))
}

fn c6_lie_dims() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    let mut dims: BTreeMap<&'static str, BTreeMap<u32, u64>> = BTreeMap::new();
    for i in 0..5u64.pow(5) {
        let g = BinaryQuartic::from_index(&f, i);
        let t = classify_type(&f, &g);
        let key = if t.is_regular() { "stable" } else { t.label() };
        *dims.entry(key).or_default().entry(lie_stabilizer_dim(&f, &g)).or_insert(0) += 1;
    }
    let expect = [("stable", 0u32), ("(2,2)", 1), ("(4)", 1), ("Zero", 3)];
    let pass = dims.len() == 4 && expect.iter().all(|(k, d)| dims.get(k).is_some_and(|m| m.len() == 1 && m.contains_key(d)));
    outcome(pass, format!("{dims:?}"))
}

fn c7_tamagawa() -> Outcome {
    let tol = BigRational::new(BigInt::from(1), BigInt::from(10).pow(25));
    let mut details = Vec::new();
    let mut pass = true;
    for (q, den) in [(5u64, 48), (7, 144)] {
        let m = match bun_mass(q, 40) {
            Ok(m) => m,
            Err(e) => return outcome(false, e.to_string()),
        };
        let diff = (m - BigRational::new(BigInt::from(1), BigInt::from(den))).abs();
        let ok = diff < tol;
        pass &= ok;
        let shown = selmer_core::report::rational_to_f64(&diff);
        details.push(format!("q={q}: |bun_mass - 1/{den}| = {shown:.3e}"));
    }
    outcome(pass, details.join("; "))
}

fn c8_regular_density() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    match regular_density_mc(&BundleStratum::new(&f, 0, 6), 1_000_000, SEED) {
        Ok(e) => outcome(
            (e.rate - 0.768).abs() <= 0.01,
            format!("rate {:.5} (3 sigma [{:.5}, {:.5}]) vs 96/125 = 0.768, tol 0.01", e.rate, e.ci[0], e.ci[1]),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c9_transversal() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    let run = || -> selmer_core::Result<Outcome> {
        let t = transversal_density_mc(&f, 5, 1_000_000, SEED)?;
        let t_target = euler_product(5, 60, &LocalFactor::transversal())?.value;
        let c = combined_density_mc(&BundleStratum::new(&f, 0, 5), 1_000_000, SEED)?;
        let c_target = euler_product(5, 60, &LocalFactor::regular_and_transversal())?.value;
        let pass = (t.rate - t_target).abs() <= 0.01 && (c.rate - c_target).abs() <= 0.015 && t.violations == 0;
        Ok(outcome(
            pass,
            format!(
                "families {:.5} vs {:.5} (tol 0.01); sections {:.5} vs {:.5} (tol 0.015); transversal non-minimal: {}",
                t.rate, t_target, c.rate, c_target, t.violations
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c10_cases() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    let run = || -> selmer_core::Result<Outcome> {
        let c1 = case1_witness(&f, 5, 2, 10_000, SEED)?;
        let c2 = case2_contribution(&f, 2, 10_000, SEED)?;
        let pass = c1.pass && c2.pass && c2.regular > 0 && c2.contribution == 1;
        Ok(outcome(
            pass,
            format!(
                "n=5,d=2: {}/{} not regular, {} witnessed; n=4,d=2: {}/{} regular reduced, contribution {}",
                c1.nonregular, c1.samples, c1.witnessed, c2.reduced, c2.regular, c2.contribution
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, e.to_string()))
}

fn c11_average() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    match hn_average(&f, 5, 100_000, SEED, true) {
        Ok(r) => outcome(
            (2.7..=3.3).contains(&r.total) && (1.8..=2.2).contains(&r.low_strata),
            format!(
                "total {:.4} (ci [{:.4}, {:.4}]) in [2.7, 3.3]; low strata {:.4} in [1.8, 2.2]",
                r.total, r.total_ci[0], r.total_ci[1], r.low_strata
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c12_minimality() -> Outcome {
    let f = Field::new(5, 1).unwrap();
    match minimality_rate_mc(&f, 5, 100_000, SEED) {
        Ok(e) => outcome(e.rate >= 0.9999, format!("rate {} ({} of {}), need >= 0.9999", e.rate, e.hits, e.samples)),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("exact type census, q = 5, 7, 11", c1_type_census),
        ("dual-number census, q = 5", c2_dual_census),
        ("orbit structure over every (a, b) in F_5^2", c3_orbits),
        ("stabilizer orders 4 / 2 / 1", c4_stabilizer_orders),
        ("stabilizer of the Weierstrass form = 2-torsion count", c5_two_torsion),
        ("infinitesimal stabilizer dimensions over V(F_5)", c6_lie_dims),
        ("bundle mass against 1/48 and 1/144", c7_tamagawa),
        ("regular section density, q = 5, d = 6", c8_regular_density),
        ("transversal densities, q = 5, d = 5", c9_transversal),
        ("strata n > 2d and n = 2d", c10_cases),
        ("stratified average, q = 5, d = 5, transversal", c11_average),
        ("minimality density, q = 5, d = 5", c12_minimality),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as u32;
        println!("criterion {:>2} {status} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
