//! Exhaustive minimal-height searches and the family ratio scan.
//!
//! The completeness cutoff comes from |h-hat - h| <= log|2c|: once some
//! wandering candidate has h-hat <= B, no point with naive height above
//! B + log|2c| can do better, so scanning the finite ball h(alpha) <=
//! B + log|2c| is a complete search. Ties are refined by shrinking eps and
//! resolved exactly where an orbit relation phi^i(alpha) = +-phi^i(alpha')
//! forces equal heights; otherwise the tied set is reported.

use crate::dynamics::{orbit, MapParams};
use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use crate::families::classify_integer_preperiodic;
use crate::global::canonical_height;
use crate::interval::{ln_int, CertInterval};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::One;
use std::collections::{BTreeSet, HashMap};

/// Stream of all rationals a/b in lowest terms with max(|a|, b) <= H for
/// increasing shells H, ordered by shell, then denominator, then |a|, then
/// positive before negative.
pub struct RationalStream {
    shell: u64,
    max_shell: u64,
    buf: std::vec::IntoIter<Rational>,
}

fn shell_members(h: u64) -> Vec<Rational> {
    let mut out = Vec::new();
    if h == 0 {
        return out;
    }
    if h == 1 {
        return vec![
            Rational::from_int(0),
            Rational::from_int(1),
            Rational::from_int(-1),
        ];
    }
    for b in 1..=h {
        if b < h {
            if h.gcd(&b) == 1 {
                out.push(Rational::new(BigInt::from(h), BigInt::from(b)).unwrap());
                out.push(Rational::new(-BigInt::from(h), BigInt::from(b)).unwrap());
            }
        } else {
            for a in 1..h {
                if a.gcd(&h) == 1 {
                    out.push(Rational::new(BigInt::from(a), BigInt::from(h)).unwrap());
                    out.push(Rational::new(-BigInt::from(a), BigInt::from(h)).unwrap());
                }
            }
        }
    }
    out
}

impl RationalStream {
    /// All rationals with max(|a|, b) <= max_shell.
    pub fn up_to_shell(max_shell: u64) -> RationalStream {
        RationalStream {
            shell: 0,
            max_shell,
            buf: Vec::new().into_iter(),
        }
    }
}

impl Iterator for RationalStream {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        loop {
            if let Some(q) = self.buf.next() {
                return Some(q);
            }
            if self.shell >= self.max_shell {
                return None;
            }
            self.shell += 1;
            self.buf = shell_members(self.shell).into_iter();
        }
    }
}

/// Largest shell H whose naive height log H may be <= h_max (conservative:
/// includes boundary shells, so enumeration over it is complete).
pub fn shell_bound_for_height(h_max: &Dyadic, prec: u32) -> u64 {
    if h_max.is_negative() {
        return 1;
    }
    // Coarse upper estimate from the f64 exponential, then certified trim.
    let guess = h_max.to_f64(Round::Up).exp().ceil() as u64 + 2;
    let mut h = guess.max(1);
    while h > 1 {
        let l = ln_int(&BigInt::from(h), prec).expect("positive");
        if l.lo() <= h_max {
            break;
        }
        h -= 1;
    }
    h
}

/// Every a/b in lowest terms with log max(|a|, b) <= h_max (conservatively
/// including enclosure-boundary shells), in the stream order.
pub fn enumerate_rationals(h_max: &CertInterval) -> RationalStream {
    RationalStream::up_to_shell(shell_bound_for_height(h_max.hi(), 96))
}

/// One row of the minimal-height survey at a given c.
#[derive(Clone, Debug)]
pub struct SurveyRow {
    pub c: i64,
    pub min_height: CertInterval,
    pub argmin: Rational,
    /// min_height / log|c| (divisor 1 when |c| <= 1, per the theorem's
    /// max(log|c|, 1) normalizer).
    pub ratio: CertInterval,
    pub candidates_examined: u64,
    pub preperiodic_excluded: u64,
    /// Candidates whose enclosures could not be separated from the minimum
    /// (exact ties like +-alpha included). Contains argmin.
    pub tied: Vec<Rational>,
    /// Preperiodic points encountered during the scan.
    pub preperiodic_points: Vec<Rational>,
}

/// True when an orbit relation forces exactly equal heights:
/// phi^i(a) = +-phi^i(b) for some i (same index; the sign flip is free for
/// even d).
fn equal_height_by_orbit_relation(a: &Rational, b: &Rational, params: &MapParams) -> bool {
    let steps = 12;
    let (oa, ob) = match (orbit(a, params, steps), orbit(b, params, steps)) {
        (Ok(x), Ok(y)) => (x, y),
        _ => return false,
    };
    for i in 0..=steps as usize {
        if oa[i] == ob[i] || (params.d % 2 == 0 && oa[i] == ob[i].neg()) {
            return true;
        }
    }
    false
}

const SEED_SHELL: u64 = 32;

/// Complete minimal positive canonical height over wandering rationals for
/// z^2 + c, integral c != 0.
pub fn min_wandering_height(c: i64, eps: &Rational) -> Result<SurveyRow> {
    if c == 0 {
        return Err(Error::domain("survey requires c != 0"));
    }
    if eps.is_zero() || eps.is_negative() {
        return Err(Error::domain("eps must be positive"));
    }
    let params = MapParams::new(Rational::from_int(c), 2)?;
    let prec = 96;
    let catalog = classify_integer_preperiodic(c);
    let preper = catalog.point_set();
    let ln_2c = ln_int(&BigInt::from(2 * c.unsigned_abs()), prec)?;

    let mut cache: HashMap<Rational, CertInterval> = HashMap::new();
    let mut height_of = |q: &Rational, eps: &Rational| -> Result<CertInterval> {
        let key = q.abs(); // h-hat(alpha) = h-hat(-alpha) for d = 2
        if let Some(v) = cache.get(&key) {
            if v.width_leq(eps.as_ratio()) {
                return Ok(v.clone());
            }
        }
        let h = canonical_height(&key, &params, eps)?.total;
        cache.insert(key, h.clone());
        Ok(h)
    };

    // Seed phase: best wandering candidate in the fixed small pool.
    let mut best: Option<(Rational, CertInterval)> = None;
    for q in RationalStream::up_to_shell(SEED_SHELL) {
        if preper.contains(&q) {
            continue;
        }
        let h = height_of(&q, eps)?;
        if best.as_ref().map_or(true, |(_, b)| h.hi() < b.hi()) {
            best = Some((q, h));
        }
    }
    let (_, mut best_h) = best.clone().expect("seed pool contains wandering points");

    // Completion phase: every alpha with h(alpha) <= best.hi + log|2c|.
    let mut candidates_examined: u64 = 0;
    let mut preperiodic_excluded: u64 = 0;
    let mut preper_seen: BTreeSet<Rational> = BTreeSet::new();
    let mut evaluated: Vec<(Rational, CertInterval)> = Vec::new();
    let mut shell: u64 = 1;
    loop {
        let cutoff = best_h.hi().add(ln_2c.hi(), 64, Round::Up);
        let l = ln_int(&BigInt::from(shell), prec)?;
        if l.lo() > &cutoff {
            break;
        }
        for q in shell_members(shell) {
            candidates_examined += 1;
            if preper.contains(&q) {
                preperiodic_excluded += 1;
                preper_seen.insert(q);
                continue;
            }
            let h = height_of(&q, eps)?;
            if h.hi() < best_h.hi() {
                best_h = h.clone();
            }
            evaluated.push((q, h));
        }
        shell += 1;
    }

    // Keep candidates whose enclosure overlaps the current minimum, then
    // refine until separation, proven equality, or the refinement floor.
    let mut contenders: Vec<(Rational, CertInterval)> = evaluated
        .into_iter()
        .filter(|(_, h)| h.lo() <= best_h.hi())
        .collect();
    let floor = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
    let mut eps_r = eps.clone();
    loop {
        let min_hi = contenders
            .iter()
            .map(|(_, h)| h.hi().clone())
            .min()
            .expect("nonempty");
        contenders.retain(|(_, h)| h.lo() <= &min_hi);
        let all_tied = contenders.len() == 1
            || contenders.iter().skip(1).all(|(q, _)| {
                equal_height_by_orbit_relation(&contenders[0].0, q, &params)
            });
        if all_tied || eps_r.as_ratio() <= &floor {
            break;
        }
        eps_r = Rational::from_ratio(eps_r.as_ratio() / BigRational::from(BigInt::from(100)));
        for (q, h) in contenders.iter_mut() {
            *h = height_of(q, &eps_r)?;
        }
    }
    // Deterministic tie order: enumeration order is (shell, b, |a|, sign),
    // which the collection above preserved.
    let (argmin, min_height) = contenders[0].clone();
    let tied: Vec<Rational> = contenders.iter().map(|(q, _)| q.clone()).collect();

    let divisor = if c.unsigned_abs() >= 2 {
        ln_int(&BigInt::from(c.unsigned_abs()), prec)?
    } else {
        CertInterval::from_int(1)
    };
    let ratio = min_height.div_pos(&divisor, prec)?;
    Ok(SurveyRow {
        c,
        min_height,
        argmin,
        ratio,
        candidates_examined,
        preperiodic_excluded,
        tied,
        preperiodic_points: preper_seen.into_iter().collect(),
    })
}

/// Per-row outcome of a survey range; errors are recorded in-row.
#[derive(Debug)]
pub struct RowOutcome {
    pub c: i64,
    pub row: std::result::Result<SurveyRow, String>,
}

/// Survey every c in [c_from, c_to] (c_to <= -1), one row per c.
pub fn figure1_dataset(c_from: i64, c_to: i64, eps: &Rational) -> Result<Vec<RowOutcome>> {
    if c_from > c_to || c_to > -1 {
        return Err(Error::domain("figure1 range must satisfy c_from <= c_to <= -1"));
    }
    let cs: Vec<i64> = (c_from..=c_to).collect();
    let run = |&c: &i64| RowOutcome {
        c,
        row: min_wandering_height(c, eps).map_err(|e| e.to_string()),
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<RowOutcome> = {
        use rayon::prelude::*;
        cs.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<RowOutcome> = cs.iter().map(run).collect();
    Ok(rows)
}

/// One row of the c = -k^2-k+1 family scan.
#[derive(Clone, Debug)]
pub struct FamilyScanRow {
    pub k: u64,
    pub c: i64,
    pub height_of_k: CertInterval,
    pub ratio: CertInterval,
}

/// For k in [k_from, k_to]: c = -k^2-k+1, the exact check phi^2(k) = -3k+2,
/// and the enclosure of h-hat(k) with its ratio to log|c|.
pub fn family_ratio_scan(k_from: u64, k_to: u64, eps: &Rational) -> Result<Vec<FamilyScanRow>> {
    if k_from < 2 || k_from > k_to {
        return Err(Error::domain("family scan needs 2 <= k_from <= k_to"));
    }
    let ks: Vec<u64> = (k_from..=k_to).collect();
    let run = |&k: &u64| -> Result<FamilyScanRow> {
        let c: i64 = -(k as i64) * (k as i64) - (k as i64) + 1;
        let params = MapParams::new(Rational::from_int(c), 2)?;
        let o = orbit(&Rational::from_int(k as i64), &params, 2)?;
        if o[2] != Rational::from_int(-3 * (k as i64) + 2) {
            return Err(Error::domain(format!(
                "phi^2({k}) != -3k+2 at c={c}; arithmetic is broken"
            )));
        }
        let h = canonical_height(&Rational::from_int(k as i64), &params, eps)?.total;
        let divisor = ln_int(&BigInt::from(c.unsigned_abs()), 96)?;
        let ratio = h.div_pos(&divisor, 96)?;
        Ok(FamilyScanRow {
            k,
            c,
            height_of_k: h,
            ratio,
        })
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<FamilyScanRow>> = {
        use rayon::prelude::*;
        ks.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<FamilyScanRow>> = ks.iter().map(run).collect();
    rows
}
