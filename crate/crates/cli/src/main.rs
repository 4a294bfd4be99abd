//! `selmer`: command-line front end for the censuses, densities, family
//! predicates and the average estimator.
//!
//! Every command prints `{config, result, checks, pass}` (or a CSV table).
//! Exit status: 0 when all checks pass, 2 when a check fails, 1 on usage or
//! resource errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use selmer_core::census::{
    dual_census, fiber_census, fiber_census_all, local_density, minimal_jet_census, type_census, LocalCondition,
};
use selmer_core::estimator::{
    bun_mass, case1_witness, case2_contribution, combined_density_mc, hn_average, minimality_rate_mc,
    regular_density_mc, selmer_bounds_report, transversal_density_mc, BundleStratum,
};
use selmer_core::family::{
    family_height, has_rational_two_torsion, is_minimal, is_transversal, nonminimal_point, orders_at,
    WeierstrassFamily,
};
use selmer_core::pfield::{euler_product, zeta_p1, LocalFactor};
use selmer_core::quartic::{
    classify_type, invariants, lie_stabilizer_dim, reduce_to_weierstrass, root_multiplicities, splitting_degree,
    stabilizer, BinaryQuartic,
};
use selmer_core::report::{all_pass, rational_json, rational_to_f64, write_csv, write_json, Check};
use selmer_core::{Error, Field, UniPoly};

#[derive(Parser, Serialize)]
#[command(name = "selmer", version, about = "Binary quartics over finite fields and Selmer averages over F_q(t)")]
struct Cli {
    #[command(flatten)]
    output: OutputOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize)]
struct OutputOpts {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "command")]
enum Command {
    /// Exhaustive counts over V(F_q) and V(F_q[eps]/(eps^2)).
    Census {
        #[command(subcommand)]
        which: CensusCmd,
    },
    /// Facts about one quartic, given as c0,c1,c2,c3,c4.
    Quartic {
        #[arg(value_enum)]
        op: QuarticOp,
        /// Coefficients of x^4, x^3 y, x^2 y^2, x y^3, y^4.
        #[arg(allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, default_value_t = 5)]
        q: u64,
        /// Stabilizer over F_{q^ext}.
        #[arg(long, default_value_t = 1)]
        ext: u32,
    },
    /// Minimality, transversality, 2-torsion and height of y^2 = x^3 + a x + b.
    Family {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        /// Coefficients of a, constant term first.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Monte Carlo densities against Euler products.
    Density {
        #[command(subcommand)]
        which: DensityCmd,
    },
    /// The stratified estimate of |M_L| / |A_L|.
    Average {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Restrict to sections with square-free discriminant.
        #[arg(long)]
        transversal: bool,
        /// Also run the other mode and print the upper/lower summary.
        #[arg(long)]
        bounds: bool,
    },
    /// Mass of PGL_2-bundles on P^1 summed over unstable degree <= n.
    Bunmass {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long, default_value_t = 40)]
        n: u32,
    },
    /// Checks on the strata n > 2d (no regular sections) and n = 2d (explicit reduction).
    Cases {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        /// Stratum for the n > 2d check (default 2d + 1).
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "which")]
enum CensusCmd {
    /// Counts of each root type in V(F_q).
    Type {
        #[arg(long, default_value_t = 5)]
        q: u64,
    },
    /// Rational orbits over (a, b); every fiber when --a and --b are omitted.
    Fiber {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long, requires = "b", allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, requires = "a", allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Tangent-level counts over the dual numbers.
    Dual {
        #[arg(long, default_value_t = 5)]
        q: u64,
    },
    /// Jets of (a, b) at a point divisible by (t^4, t^6).
    Jets {
        #[arg(long, default_value_t = 5)]
        q: u64,
    },
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum QuarticOp {
    Classify,
    Invariants,
    Reduce,
    Stabilizer,
    Liedim,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase", tag = "which")]
enum DensityCmd {
    /// Regular sections in the stratum (n, d).
    Regular {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// Allowed distance beyond the 3 sigma interval.
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// Transversal families (a, b), or with --combined, regular sections with
    /// transversal invariants.
    Transversal {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        combined: bool,
        /// Euler product truncation degree (default 12d).
        #[arg(long)]
        truncate: Option<u32>,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
    },
    /// Minimal families (a, b).
    Minimal {
        #[arg(long, default_value_t = 5)]
        q: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.001)]
        tol: f64,
    },
    /// Truncated Euler product of a local density.
    Zeta {
        #[arg(long, default_value_t = 5)]
        q: u64,
        /// regular, transversal, combined or minimal.
        #[arg(long, default_value = "regular")]
        factor: String,
        #[arg(long, default_value_t = 60)]
        truncate: u32,
    },
}

struct Outcome {
    result: Value,
    checks: Vec<Check>,
    table: Option<(Vec<String>, Vec<Vec<String>>)>,
}

impl Outcome {
    fn new(result: Value, checks: Vec<Check>) -> Outcome {
        Outcome { result, checks, table: None }
    }

    fn with_table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Outcome {
        self.table = Some((header.iter().map(|s| s.to_string()).collect(), rows));
        self
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn run(cmd: &Command) -> selmer_core::Result<Outcome> {
    match cmd {
        Command::Census { which } => run_census(which),
        Command::Quartic { op, coeffs, q, ext } => run_quartic(*op, coeffs, *q, *ext),
        Command::Family { q, d, a, b } => run_family(*q, *d, a, b),
        Command::Density { which } => run_density(which),
        Command::Average { q, d, samples, seed, transversal, bounds } => {
            let field = Field::of_order(*q)?;
            let report = hn_average(&field, *d, *samples, *seed, *transversal)?;
            let (header, rows) = report.csv_rows();
            let mut result = json!({ "average": report.to_json() });
            let mut checks = Vec::new();
            if *bounds {
                let b = selmer_bounds_report(&field, *d, *samples, *seed)?;
                checks.extend(b.checks.clone());
                result["bounds"] = to_value(&b);
            }
            Ok(Outcome::new(result, checks).with_table(&header, rows))
        }
        Command::Bunmass { q, n } => {
            let mass = bun_mass(*q, *n)?;
            let limit = zeta_p1(*q, 2)? * selmer_core::report::ratio(2, q.pow(3));
            let tail = selmer_core::report::ratio(1, (q - 1) * (q - 1)) * selmer_core::report::inv_pow(*q, n + 1);
            let checks = vec![
                Check::exact(
                    "limit = 2/((q-1)^2 (q+1))",
                    selmer_core::report::ratio(2, (q - 1) * (q - 1) * (q + 1)).to_string(),
                    limit.to_string(),
                ),
                Check::exact("limit - partial sum = q^-(n+1)/(q-1)^2", tail.to_string(), (&limit - &mass).to_string()),
            ];
            let result = json!({
                "mass": rational_json(&mass),
                "mass_value": rational_to_f64(&mass),
                "limit": rational_json(&limit),
                "limit_value": rational_to_f64(&limit),
            });
            Ok(Outcome::new(result, checks))
        }
        Command::Cases { q, d, n, samples, seed } => {
            let field = Field::of_order(*q)?;
            let c1 = case1_witness(&field, n.unwrap_or(2 * d + 1), *d, *samples, *seed)?;
            let c2 = case2_contribution(&field, *d, *samples, *seed)?;
            let checks = vec![
                Check::exact("case 1: sections that are not regular", c1.samples, c1.nonregular),
                Check::exact("case 1: sections with a witnessing point", c1.samples, c1.witnessed),
                Check::exact("case 2: regular sections reduced by the explicit matrix", c2.regular, c2.reduced),
            ];
            Ok(Outcome::new(json!({ "case1": to_value(&c1), "case2": to_value(&c2) }), checks))
        }
    }
}

fn run_census(which: &CensusCmd) -> selmer_core::Result<Outcome> {
    Ok(match which {
        CensusCmd::Type { q } => {
            let r = type_census(*q)?;
            let rows = r.counts.iter().map(|(t, c)| vec![t.label().to_string(), c.to_string()]).collect();
            Outcome::new(to_value(&r), r.checks.clone()).with_table(&["type", "count"], rows)
        }
        CensusCmd::Fiber { q, a: Some(a), b: Some(b) } => {
            let field = Field::of_order(*q)?;
            let r = fiber_census(*q, field.parse(a)?, field.parse(b)?)?;
            let rows = fiber_rows(std::slice::from_ref(&r));
            Outcome::new(to_value(&r), r.checks.clone()).with_table(FIBER_HEADER, rows)
        }
        CensusCmd::Fiber { q, .. } => {
            let all = fiber_census_all(*q)?;
            let checks = all.iter().flat_map(|r| r.checks.clone()).collect();
            let rows = fiber_rows(&all);
            Outcome::new(json!({ "q": q, "fibers": to_value(&all) }), checks).with_table(FIBER_HEADER, rows)
        }
        CensusCmd::Dual { q } => {
            let r = dual_census(*q)?;
            Outcome::new(to_value(&r), r.checks.clone())
        }
        CensusCmd::Jets { q } => {
            let r = minimal_jet_census(*q)?;
            Outcome::new(to_value(&r), r.checks.clone())
        }
    })
}

const FIBER_HEADER: &[&str] = &["a", "b", "fiber_size", "orbits", "types"];

fn fiber_rows(rs: &[selmer_core::census::FiberCensusReport]) -> Vec<Vec<String>> {
    rs.iter()
        .map(|r| {
            let types: Vec<_> = r.types.iter().map(|t| t.label()).collect();
            vec![r.a.to_string(), r.b.to_string(), r.fiber_size.to_string(), r.orbits.len().to_string(), types.join(" ")]
        })
        .collect()
}

fn run_quartic(op: QuarticOp, coeffs: &str, q: u64, ext: u32) -> selmer_core::Result<Outcome> {
    let field = Field::of_order(q)?;
    let f = BinaryQuartic::parse(&field, coeffs)?;
    let ty = classify_type(&field, &f);
    let mut result = json!({ "q": q, "quartic": f.to_json(&field), "type": ty.label() });
    match op {
        QuarticOp::Classify => {
            if !f.is_zero() {
                result["multiplicities"] = json!(root_multiplicities(&field, &f));
                result["splitting_degree"] = json!(splitting_degree(&field, &f.dehomogenize())?);
            }
        }
        QuarticOp::Invariants => {
            let inv = invariants(&field, &f);
            result["a"] = field.to_json(inv.a);
            result["b"] = field.to_json(inv.b);
            result["disc"] = field.to_json(inv.disc);
        }
        QuarticOp::Reduce => {
            result["reduction"] = reduce_to_weierstrass(&field, &f)?.to_json();
        }
        QuarticOp::Stabilizer => {
            result["stabilizer"] = stabilizer(&field, &f, ext)?.to_json();
        }
        QuarticOp::Liedim => {
            result["lie_dim"] = json!(lie_stabilizer_dim(&field, &f));
        }
    }
    Ok(Outcome::new(result, Vec::new()))
}

fn run_family(q: u64, d: u32, a: &str, b: &str) -> selmer_core::Result<Outcome> {
    let field = Field::of_order(q)?;
    let fam = WeierstrassFamily::new(d, UniPoly::parse(a, &field)?, UniPoly::parse(b, &field)?)?;
    let disc = fam.discriminant(&field);
    let mut result = json!({
        "q": q,
        "family": fam.to_json(&field),
        "discriminant": disc.to_json(&field),
        "degenerate": disc.is_zero(),
    });
    if !disc.is_zero() {
        let bad = nonminimal_point(&field, &fam)?;
        result["transversal"] = json!(is_transversal(&field, &fam)?);
        result["minimal"] = json!(is_minimal(&field, &fam)?);
        result["nonminimal_point"] = match &bad {
            Some(v) => json!({ "point": v.to_json(&field), "orders": to_value(&orders_at(&field, &fam, v)?) }),
            None => Value::Null,
        };
        let torsion = has_rational_two_torsion(&field, &fam)?;
        result["two_torsion"] = json!(torsion.is_some());
        result["two_torsion_root"] = torsion.map_or(Value::Null, |r| r.to_json(&field));
        result["height"] = json!(family_height(&field, &fam)?);
    }
    Ok(Outcome::new(result, Vec::new()))
}

fn density_check(name: &str, est: &selmer_core::estimator::Estimate, target: f64, tol: f64) -> Check {
    Check::within(name, target, est.rate, est.half_width() + tol)
}

fn run_density(which: &DensityCmd) -> selmer_core::Result<Outcome> {
    match which {
        DensityCmd::Regular { q, d, n, samples, seed, tol } => {
            let field = Field::of_order(*q)?;
            let est = regular_density_mc(&BundleStratum::new(&field, *n, *d), *samples, *seed)?;
            let target = if *n > 2 * d { 0.0 } else { 1.0 / rational_to_f64(&zeta_p1(*q, 2)?) };
            let checks = vec![density_check("regular density vs zeta(2)^-1", &est, target, *tol)];
            Ok(density_outcome(est, target, checks))
        }
        DensityCmd::Transversal { q, d, samples, seed, combined, truncate, tol } => {
            let field = Field::of_order(*q)?;
            let deg = truncate.unwrap_or(12 * d);
            let (est, factor) = if *combined {
                let st = BundleStratum::new(&field, 0, *d);
                (combined_density_mc(&st, *samples, *seed)?, LocalFactor::regular_and_transversal())
            } else {
                (transversal_density_mc(&field, *d, *samples, *seed)?, LocalFactor::transversal())
            };
            let target = euler_product(*q, deg, &factor)?.value;
            let mut checks = vec![density_check(&format!("{} density vs Euler product", factor.name), &est, target, *tol)];
            checks.push(Check::exact("transversal families that are not minimal", 0, est.violations));
            Ok(density_outcome(est, target, checks))
        }
        DensityCmd::Minimal { q, d, samples, seed, tol } => {
            let field = Field::of_order(*q)?;
            let est = minimality_rate_mc(&field, *d, *samples, *seed)?;
            let target = 1.0 / rational_to_f64(&zeta_p1(*q, 10)?);
            let checks = vec![density_check("minimal density vs zeta(10)^-1", &est, target, *tol)];
            Ok(density_outcome(est, target, checks))
        }
        DensityCmd::Zeta { q, factor, truncate } => {
            let which: LocalCondition = factor.parse()?;
            let local = match which {
                LocalCondition::Regular => LocalFactor::regular(),
                LocalCondition::Transversal => LocalFactor::transversal(),
                LocalCondition::RegularAndTransversal => LocalFactor::regular_and_transversal(),
                LocalCondition::Minimal => LocalFactor::minimal(),
            };
            let prod = euler_product(*q, *truncate, &local)?;
            let (lo, hi) = prod.limit_interval();
            let mut checks = Vec::new();
            let closed = match which {
                LocalCondition::Regular => Some(zeta_p1(*q, 2)?),
                LocalCondition::Minimal => Some(zeta_p1(*q, 10)?),
                _ => None,
            };
            if let Some(z) = &closed {
                let v = 1.0 / rational_to_f64(z);
                // Rounding slack on top of the tail bound.
                let eps = 8.0 * f64::EPSILON;
                checks.push(Check::holds(
                    "closed form lies in the truncation interval",
                    lo - eps <= v && v <= hi + eps,
                    format!("{v} in [{lo}, {hi}]"),
                ));
            }
            let result = json!({
                "product": to_value(&prod),
                "limit_interval": [lo, hi],
                "local_density_deg1": rational_json(&local_density(*q, which)),
                "closed_form": closed.map(|z| 1.0 / rational_to_f64(&z)),
            });
            Ok(Outcome::new(result, checks))
        }
    }
}

fn density_outcome(est: selmer_core::estimator::Estimate, target: f64, checks: Vec<Check>) -> Outcome {
    let row = vec![
        est.samples.to_string(),
        est.hits.to_string(),
        est.rate.to_string(),
        est.ci[0].to_string(),
        est.ci[1].to_string(),
        target.to_string(),
    ];
    Outcome::new(json!({ "estimate": to_value(&est), "target": target }), checks)
        .with_table(&["samples", "hits", "rate", "ci_low", "ci_high", "target"], vec![row])
}

fn emit(cli: &Cli, outcome: &Outcome) -> selmer_core::Result<()> {
    let out = cli.output.out.as_deref();
    match (cli.output.format, &outcome.table) {
        (Format::Csv, Some((header, rows))) => {
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            write_csv(&header, rows, out)
        }
        (Format::Csv, None) => {
            let rows = flatten(&outcome.result);
            write_csv(&["key", "value"], &rows, out)
        }
        (Format::Json, _) => {
            let doc = json!({
                "config": to_value(cli),
                "result": outcome.result,
                "checks": to_value(&outcome.checks),
                "pass": all_pass(&outcome.checks),
            });
            write_json(&doc, out)
        }
    }
}

/// Scalar leaves as `(dotted.path, value)` rows.
fn flatten(v: &Value) -> Vec<Vec<String>> {
    fn go(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    go(&p, x, rows);
                }
            }
            Value::Array(xs) if xs.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let parts: Vec<String> = xs.iter().map(scalar).collect();
                rows.push(vec![prefix.to_string(), parts.join(" ")]);
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    go(&format!("{prefix}.{i}"), x, rows);
                }
            }
            other => rows.push(vec![prefix.to_string(), scalar(other)]),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut rows = Vec::new();
    go("", v, &mut rows);
    rows
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.output.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::BudgetExceeded { .. } = e {
                eprintln!("the requested enumeration is larger than the built-in budget");
            }
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    if all_pass(&outcome.checks) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
