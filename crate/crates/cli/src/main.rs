//! Command-line surface for the canonical-height library.
//!
//! Every numeric output prints both enclosure endpoints. Exit codes:
//! 0 success, 2 domain/usage error, 3 resource or inconclusive,
//! 4 bound violation (which would falsify the underlying theorems).

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use unicrit::bounds::{
    integer_c_lower_bound, is_vacuous, remark_bound_general_d, theorem2_constants, type_ii_count,
    verify_point, Verdict,
};
use unicrit::dynamics::{decide_preperiodic, default_budget, orbit, MapParams};
use unicrit::error::Error;
use unicrit::families::{classify_integer_preperiodic, family_fixed, family_two_cycle};
use unicrit::global::canonical_height;
use unicrit::local::classify_reduction;
use unicrit::rational::{denominator_support, parse_ratio_flexible, Rational};
use unicrit::report::{
    interval_f64, survey_csv, survey_plot, BoundDoc, CatalogDoc, ClassifyDoc, FamilyScanRowDoc,
    HeightDoc, OrbitDoc, PreperiodicDoc, ReductionRowDoc, SurveyRowDoc, VerdictDoc,
};
use unicrit::survey::{family_ratio_scan, figure1_dataset};

#[derive(Parser)]
#[command(
    name = "unicrit",
    about = "Certified canonical heights, reduction types and preperiodic points for z^d + c over Q",
    version
)]
struct Cli {
    /// Working precision in bits (overrides UNICRIT_PREC_BITS; default 128).
    #[arg(long, global = true)]
    prec_bits: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurveyFormat {
    Csv,
    Json,
    Plot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Fixed,
    #[value(name = "two-cycle")]
    TwoCycle,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical height of a point as a certified enclosure.
    Height {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        eps: String,
        /// Include the per-place decomposition.
        #[arg(long)]
        decompose: bool,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Exact forward orbit.
    Orbit {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        steps: u32,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Reduction type at every bad prime, plus the Type II count.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Preperiodicity decision with witness or wandering certificate.
    Preperiodic {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Preperiodic catalogs: by c, or by family parameter m.
    Families {
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["m", "family"])]
        c: Option<i64>,
        #[arg(long, requires = "family")]
        m: Option<u64>,
        #[arg(long, value_enum, requires = "m")]
        family: Option<FamilyKind>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Lower-bound constants and values; vacuous bounds are flagged.
    Bound {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value = "1")]
        r: u32,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Checks one point against the proven lower bounds.
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Minimal wandering heights over a range of integral c.
    Survey {
        #[arg(long, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: SurveyFormat,
        /// Worker threads for the row scan (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// The c = -k^2-k+1 family: heights of k and ratios to log|c|.
    FamilyScan {
        #[arg(long)]
        k_from: u64,
        #[arg(long)]
        k_to: u64,
        #[arg(long)]
        eps: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(bits) = cli.prec_bits {
        unicrit::interval::set_default_prec_bits(bits);
    } else if let Ok(env_bits) = std::env::var("UNICRIT_PREC_BITS") {
        if let Ok(bits) = env_bits.parse::<u32>() {
            unicrit::interval::set_default_prec_bits(bits);
        }
    }
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn parse_params(c: &str, d: u32) -> Result<MapParams, Error> {
    MapParams::new(c.parse()?, d)
}

fn emit_json<T: serde::Serialize>(doc: &T) {
    println!("{}", serde_json::to_string_pretty(doc).expect("serializable"));
}

fn run(cmd: Command) -> Result<i32, Error> {
    match cmd {
        Command::Height {
            alpha,
            c,
            d,
            eps,
            decompose,
            format,
        } => {
            let params = parse_params(&c, d)?;
            let a: Rational = alpha.parse()?;
            let e = parse_ratio_flexible(&eps)?;
            let report = canonical_height(&a, &params, &e)?;
            let doc = HeightDoc::new(&alpha, &c, d, &eps, &report, decompose);
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => {
                    let (lo, hi) = interval_f64(&report.total);
                    println!("h-hat({alpha}) for z^{d} + ({c}):");
                    println!("  enclosure [{lo}, {hi}]  (width <= {eps}, method {})", doc.method);
                    if decompose {
                        for l in doc.locals.iter().flatten() {
                            let steps = l
                                .steps
                                .map(|s| format!(", {} steps", s))
                                .unwrap_or_default();
                            println!(
                                "  place {:>6}: [{}, {}]  ({}{steps})",
                                l.place, l.lo, l.hi, l.exactness
                            );
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Orbit {
            alpha,
            c,
            d,
            steps,
            format,
        } => {
            let params = parse_params(&c, d)?;
            let a: Rational = alpha.parse()?;
            let o = orbit(&a, &params, steps)?;
            let doc = OrbitDoc {
                alpha: alpha.clone(),
                c: c.clone(),
                d,
                steps,
                orbit: o.iter().map(|q| q.to_string()).collect(),
            };
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => {
                    for (k, q) in o.iter().enumerate() {
                        println!("phi^{k}({alpha}) = {q}");
                    }
                }
            }
            Ok(0)
        }
        Command::Classify { c, d, format } => {
            let cq: Rational = c.parse()?;
            if d < 2 {
                return Err(Error::domain("degree d must be at least 2"));
            }
            let bad = denominator_support(&cq)?;
            let rows: Vec<ReductionRowDoc> = bad
                .iter()
                .map(|&p| ReductionRowDoc {
                    p,
                    kind: classify_reduction(&cq, p, d).to_string(),
                })
                .collect();
            let s = type_ii_count(&cq, d)?;
            let doc = ClassifyDoc {
                c: c.clone(),
                d,
                bad_primes: rows,
                type_ii_count: s,
            };
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => {
                    if doc.bad_primes.is_empty() {
                        println!("no bad primes (c is integral): good reduction everywhere");
                    }
                    for row in &doc.bad_primes {
                        println!("{}: {}", row.p, row.kind);
                    }
                    println!("s = {s} (Type II count)");
                }
            }
            Ok(0)
        }
        Command::Preperiodic {
            alpha,
            c,
            d,
            budget,
            format,
        } => {
            let params = parse_params(&c, d)?;
            let a: Rational = alpha.parse()?;
            let b = budget.unwrap_or_else(|| default_budget(&params));
            let verdict = decide_preperiodic(&a, &params, b)?;
            let doc = PreperiodicDoc::new(&alpha, &c, d, &verdict);
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => println!("{verdict}"),
            }
            Ok(0)
        }
        Command::Families { c, m, family, format } => {
            let catalog = match (c, m, family) {
                (Some(c), None, None) => classify_integer_preperiodic(c),
                (None, Some(m), Some(FamilyKind::Fixed)) => family_fixed(m)?,
                (None, Some(m), Some(FamilyKind::TwoCycle)) => family_two_cycle(m)?,
                _ => {
                    return Err(Error::domain(
                        "families needs either --c C, or --m M --family fixed|two-cycle",
                    ))
                }
            };
            let doc = CatalogDoc::from(&catalog);
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => {
                    println!("c = {} (family: {})", doc.c, doc.family);
                    if doc.points.is_empty() {
                        println!("no rational preperiodic points");
                    }
                    for p in &doc.points {
                        println!("  {:>6}  tail {}  period {}", p.point, p.tail, p.period);
                    }
                }
            }
            Ok(0)
        }
        Command::Bound { c, d, r, s, format } => {
            let cq: Rational = c.parse()?;
            let prec = unicrit::interval::default_prec_bits();
            let s_val = match s {
                Some(s) => s,
                None => type_ii_count(&cq, d)?,
            };
            let profile = theorem2_constants(d, r, s_val)?;
            let theorem = profile.bound_value(&cq, prec);
            let integer_c = if cq.is_integer() && !cq.is_zero() && d == 2 {
                Some(integer_c_lower_bound(cq.numer(), prec)?)
            } else {
                None
            };
            let remark = if cq.is_integer() && !cq.is_zero() && d >= 3 {
                Some(remark_bound_general_d(cq.numer(), d, prec)?)
            } else {
                None
            };
            let doc = BoundDoc::new(&c, &profile, &theorem, integer_c.as_ref(), remark.as_ref());
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => {
                    println!(
                        "Theorem 2 profile: d={d} r={r} s={s_val} m={} N={}",
                        profile.m, profile.n
                    );
                    println!(
                        "  h-hat >= {} * (h(c) - {} log 2)",
                        doc.coefficient, profile.offset_log2
                    );
                    let flag = if is_vacuous(&theorem) { "  [vacuous]" } else { "" };
                    println!(
                        "  value: [{}, {}]{flag}",
                        doc.theorem_bound_lo, doc.theorem_bound_hi
                    );
                    if let Some(b) = &integer_c {
                        let (lo, hi) = interval_f64(b);
                        println!("integral-c floor (d=2): [{lo}, {hi}]");
                    }
                    if let Some(b) = &remark {
                        let (lo, hi) = interval_f64(b);
                        println!("d>=3 remark bound (phi(a) != phi^2(a)): [{lo}, {hi}]");
                    }
                }
            }
            Ok(0)
        }
        Command::Verify {
            alpha,
            c,
            d,
            eps,
            format,
        } => {
            let params = parse_params(&c, d)?;
            let a: Rational = alpha.parse()?;
            let e = parse_ratio_flexible(&eps)?;
            let verdict = verify_point(&a, &params, &e)?;
            let doc = VerdictDoc::new(&alpha, &c, d, &verdict);
            match format {
                Format::Json => emit_json(&doc),
                Format::Human => match &verdict {
                    Verdict::PreperiodicWithinN { i, j } => {
                        println!("preperiodic within the theorem budget: phi^{i} = phi^{j}")
                    }
                    Verdict::SatisfiesBound { height, bound, margin } => {
                        let (hlo, hhi) = interval_f64(height);
                        let (blo, bhi) = interval_f64(bound);
                        println!("satisfies bound: h-hat in [{hlo}, {hhi}], bound [{blo}, {bhi}], margin >= {}", margin.lo_f64());
                    }
                    Verdict::BoundViolation { height, bound } => {
                        let (hlo, hhi) = interval_f64(height);
                        let (blo, bhi) = interval_f64(bound);
                        println!("BOUND VIOLATION: h-hat in [{hlo}, {hhi}] below proven bound [{blo}, {bhi}]");
                    }
                },
            }
            if matches!(verdict, Verdict::BoundViolation { .. }) {
                return Ok(4);
            }
            Ok(0)
        }
        Command::Survey {
            from,
            to,
            eps,
            out,
            format,
            jobs,
        } => {
            if let Some(n) = jobs {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            let e = parse_ratio_flexible(&eps)?;
            let outcomes = figure1_dataset(from, to, &e)?;
            let mut rows: Vec<SurveyRowDoc> = Vec::new();
            let mut failures = 0;
            for o in &outcomes {
                match &o.row {
                    Ok(row) => rows.push(SurveyRowDoc::try_from(row)?),
                    Err(msg) => {
                        failures += 1;
                        eprintln!("c={}: {msg}", o.c);
                    }
                }
            }
            let payload = match format {
                SurveyFormat::Csv => survey_csv(&rows),
                SurveyFormat::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&rows).expect("serializable"))
                }
                SurveyFormat::Plot => survey_plot(&rows),
            };
            let mut f = std::fs::File::create(&out)
                .map_err(|e| Error::resource(format!("cannot create {}: {e}", out.display())))?;
            f.write_all(payload.as_bytes())
                .map_err(|e| Error::resource(format!("write failed: {e}")))?;
            eprintln!(
                "wrote {} rows to {}{}",
                rows.len(),
                out.display(),
                if failures > 0 {
                    format!(" ({failures} rows failed)")
                } else {
                    String::new()
                }
            );
            Ok(if failures > 0 { 3 } else { 0 })
        }
        Command::FamilyScan {
            k_from,
            k_to,
            eps,
            format,
        } => {
            let e = parse_ratio_flexible(&eps)?;
            let rows = family_ratio_scan(k_from, k_to, &e)?;
            let docs: Vec<FamilyScanRowDoc> = rows.iter().map(FamilyScanRowDoc::from).collect();
            match format {
                Format::Json => emit_json(&docs),
                Format::Human => {
                    println!("k\tc\th-hat(k) lo\th-hat(k) hi\tratio lo\tratio hi");
                    for r in &docs {
                        println!(
                            "{}\t{}\t{}\t{}\t{}\t{}",
                            r.k, r.c, r.height_lo, r.height_hi, r.ratio_lo, r.ratio_hi
                        );
                    }
                }
            }
            Ok(0)
        }
    }
}
