//! Seeded sampling of sections and families, and Monte Carlo densities.
//!
//! Every draw has its own ChaCha8 stream keyed by `(seed, kind, n, d)` and
//! indexed by the sample number, so results do not depend on how rayon
//! splits the work.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{is_regular_section, BundleStratum, QuarticSection};
use crate::error::{Error, Result};
use crate::family::{is_minimal, is_transversal, WeierstrassFamily};
use crate::ff::{Field, UniPoly};

pub const MIN_SAMPLES: u64 = 1000;

const KIND_SECTION: u64 = 1;
const KIND_FAMILY: u64 = 2;

pub fn substream(seed: u64, kind: u64, n: u32, d: u32, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&kind.to_le_bytes());
    key[16..20].copy_from_slice(&n.to_le_bytes());
    key[20..24].copy_from_slice(&d.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

fn random_poly<R: Rng>(field: &Field, bound: i64, rng: &mut R) -> UniPoly {
    if bound < 0 {
        return UniPoly::zero();
    }
    UniPoly::from_coeffs((0..=bound).map(|_| field.random(rng)).collect())
}

pub(crate) fn random_section<R: Rng>(st: &BundleStratum, rng: &mut R) -> QuarticSection {
    let bounds = st.bounds();
    QuarticSection { n: st.n, d: st.d, c: std::array::from_fn(|i| random_poly(&st.field, bounds[i], rng)) }
}

/// The `index`-th uniform draw from the sections of `st`.
pub fn sample_section(st: &BundleStratum, seed: u64, index: u64) -> QuarticSection {
    random_section(st, &mut substream(seed, KIND_SECTION, st.n, st.d, index))
}

pub fn sample_sections(st: &BundleStratum, count: u64, seed: u64) -> impl Iterator<Item = QuarticSection> + '_ {
    (0..count).map(move |i| sample_section(st, seed, i))
}

/// The `index`-th uniform draw of `(a, b)` with `deg a <= 4d`, `deg b <= 6d`.
pub fn sample_family(field: &Field, d: u32, seed: u64, index: u64) -> WeierstrassFamily {
    let mut rng = substream(seed, KIND_FAMILY, 0, d, index);
    let a = random_poly(field, 4 * d as i64, &mut rng);
    let b = random_poly(field, 6 * d as i64, &mut rng);
    WeierstrassFamily { d, a, b }
}

/// A binomial proportion with a 3 sigma interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub samples: u64,
    pub hits: u64,
    /// Draws with identically vanishing discriminant, counted as misses.
    pub degenerate: u64,
    /// Draws contradicting an implication checked along the way
    /// (transversal but not minimal).
    pub violations: u64,
    pub rate: f64,
    pub ci: [f64; 2],
}

impl Estimate {
    pub fn from_counts(samples: u64, hits: u64) -> Estimate {
        let rate = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
        let half = if samples == 0 { 1.0 } else { 3.0 * (rate * (1.0 - rate) / samples as f64).sqrt() };
        Estimate {
            samples,
            hits,
            degenerate: 0,
            violations: 0,
            rate,
            ci: [(rate - half).max(0.0), (rate + half).min(1.0)],
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.ci[1] - self.ci[0]) / 2.0
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    hits: u64,
    degenerate: u64,
    violations: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            hits: self.hits + o.hits,
            degenerate: self.degenerate + o.degenerate,
            violations: self.violations + o.violations,
        }
    }
}

fn run<F>(count: u64, f: F) -> Result<Estimate>
where
    F: Fn(u64) -> Result<Tally> + Sync + Send,
{
    if count < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples, got {count}")));
    }
    run_unchecked(count, f)
}

fn run_unchecked<F>(count: u64, f: F) -> Result<Estimate>
where
    F: Fn(u64) -> Result<Tally> + Sync + Send,
{
    let t = (0..count).into_par_iter().map(f).try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    let mut e = Estimate::from_counts(count, t.hits);
    e.degenerate = t.degenerate;
    e.violations = t.violations;
    Ok(e)
}

fn regular_tally(st: &BundleStratum, seed: u64, i: u64) -> Result<Tally> {
    let s = sample_section(st, seed, i);
    let hit = !s.is_zero() && is_regular_section(&st.field, &s)?;
    Ok(Tally { hits: hit as u64, ..Tally::default() })
}

fn combined_tally(st: &BundleStratum, seed: u64, i: u64) -> Result<Tally> {
    let s = sample_section(st, seed, i);
    if s.is_zero() || !is_regular_section(&st.field, &s)? {
        return Ok(Tally::default());
    }
    Ok(transversal_tally(&st.field, &s.invariants(&st.field)?))
}

fn transversal_tally(field: &Field, fam: &WeierstrassFamily) -> Tally {
    match is_transversal(field, fam) {
        Err(_) => Tally { degenerate: 1, ..Tally::default() },
        Ok(false) => Tally::default(),
        Ok(true) => {
            let minimal = is_minimal(field, fam).unwrap_or(false);
            Tally { hits: 1, violations: !minimal as u64, ..Tally::default() }
        }
    }
}

/// Fraction of sections of `st` that are regular at every point.
pub fn regular_density_mc(st: &BundleStratum, count: u64, seed: u64) -> Result<Estimate> {
    run(count, |i| regular_tally(st, seed, i))
}

pub(crate) fn regular_density_any(st: &BundleStratum, count: u64, seed: u64) -> Result<Estimate> {
    run_unchecked(count, |i| regular_tally(st, seed, i))
}

/// Fraction of sections of `st` that are regular and whose invariants form
/// a transversal family.
pub fn combined_density_mc(st: &BundleStratum, count: u64, seed: u64) -> Result<Estimate> {
    run(count, |i| combined_tally(st, seed, i))
}

pub(crate) fn combined_density_any(st: &BundleStratum, count: u64, seed: u64) -> Result<Estimate> {
    run_unchecked(count, |i| combined_tally(st, seed, i))
}

/// Fraction of uniform families `(a, b)` of height `d` that are transversal.
/// Transversal draws are also checked for minimality; failures land in
/// `violations`.
pub fn transversal_density_mc(field: &Field, d: u32, count: u64, seed: u64) -> Result<Estimate> {
    run(count, |i| Ok(transversal_tally(field, &sample_family(field, d, seed, i))))
}

pub(crate) fn transversal_density_any(field: &Field, d: u32, count: u64, seed: u64) -> Result<Estimate> {
    run_unchecked(count, |i| Ok(transversal_tally(field, &sample_family(field, d, seed, i))))
}

/// Fraction of uniform families of height `d` that are minimal.
pub fn minimality_rate_mc(field: &Field, d: u32, count: u64, seed: u64) -> Result<Estimate> {
    run(count, |i| {
        let fam = sample_family(field, d, seed, i);
        Ok(match is_minimal(field, &fam) {
            Ok(m) => Tally { hits: m as u64, ..Tally::default() },
            Err(_) => Tally { degenerate: 1, ..Tally::default() },
        })
    })
}
