//! Shared report plumbing: named checks, exact rationals in JSON, and writers.

use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Result;

/// One identity checked by a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Check {
    pub fn exact<T: PartialEq + Display>(name: &str, expected: T, actual: T) -> Check {
        Check {
            name: name.to_string(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            pass: expected == actual,
        }
    }

    pub fn within(name: &str, expected: f64, actual: f64, tol: f64) -> Check {
        Check {
            name: name.to_string(),
            expected: format!("{expected} +- {tol}"),
            actual: actual.to_string(),
            pass: (expected - actual).abs() <= tol,
        }
    }

    pub fn holds(name: &str, pass: bool, detail: impl Display) -> Check {
        Check { name: name.to_string(), expected: "true".into(), actual: detail.to_string(), pass }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// `{num, den}` with arbitrary-precision integers written as strings when
/// they do not fit in an `i64`.
pub fn rational_json(r: &BigRational) -> serde_json::Value {
    let int = |x: &BigInt| match x.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(x.to_string()),
    };
    serde_json::json!({ "num": int(r.numer()), "den": int(r.denom()) })
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Scale down both sides so that huge numerators and denominators still
    // convert.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `q^-e` exactly.
pub fn inv_pow(q: u64, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(q).pow(e))
}

pub fn is_zero(r: &BigRational) -> bool {
    r.is_zero()
}

/// Writes `value` as pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json(value: &serde_json::Value, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
        }
    }
    Ok(())
}

/// Writes a header and rows as CSV to `path`, or to stdout.
pub fn write_csv(header: &[&str], rows: &[Vec<String>], path: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
