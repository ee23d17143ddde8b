//! Global canonical heights to prescribed enclosure width.
//!
//! Integral c gets the fast schedule: iterate m steps, read off the naive
//! height of the iterate, and absorb the rest of the limit into the
//! log|2c|/(d-1) estimate, all divided by d^m. The identity
//! h(phi^m(a/b)) = lambda_inf(phi^m(a/b)) + d^m log b (denominators stay
//! exactly b^(d^m) for integral c) lets the iteration run in certified
//! interval arithmetic instead of exact integers. General rational c sums
//! certified local heights over the finitely many contributing places.

use crate::dynamics::{lambda_arch_of_interval, MapParams};
use crate::error::{Error, Result};
use crate::interval::{ln_int, CertInterval};
use crate::local::{arch_orbit_interval, eps_bits, local_height_arch, local_height_nonarch, Exactness, LocalHeight};
use crate::primes::factor;
use crate::rational::{denominator_support, naive_height, naive_local_height, Place, Rational};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

/// How a height report was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// The integral-c schedule at depth m.
    ExactSchedule { m: u32 },
    /// Sum of per-place local heights.
    PlaceSum,
}

/// Certified global height with its per-place decomposition.
#[derive(Clone, Debug)]
pub struct HeightReport {
    pub total: CertInterval,
    pub locals: Vec<LocalHeight>,
    pub method: Method,
}

/// Smallest m with (log|2c|/(d-1))/d^m <= eps, certified.
pub fn m_for_precision(eps: &Rational, c: &Rational, d: u32) -> Result<u32> {
    if c.is_zero() {
        return Err(Error::domain("m_for_precision requires c != 0"));
    }
    if !c.is_integer() {
        return Err(Error::domain(
            "the height schedule is proven for integral c only",
        ));
    }
    if eps.is_zero() || eps.is_negative() {
        return Err(Error::domain("eps must be positive"));
    }
    if d < 2 {
        return Err(Error::domain("degree d must be at least 2"));
    }
    let mut prec = crate::interval::default_prec_bits().max(eps_bits(eps) + 32);
    loop {
        let two_c = BigInt::from(2) * c.numer().abs();
        let level = ln_int(&two_c, prec)?.div_uint(&BigInt::from((d - 1) as i64), prec);
        let d_big = BigInt::from(d);
        let mut pow = BigInt::from(1);
        let mut m: u32 = 0;
        loop {
            let scaled = level.div_uint(&pow, prec);
            if scaled.hi().cmp_ratio(eps.as_ratio()).is_le() {
                return Ok(m);
            }
            if scaled.lo().cmp_ratio(eps.as_ratio()).is_gt() {
                pow *= &d_big;
                m += 1;
                if m > 10_000 {
                    return Err(Error::resource("schedule depth ran away"));
                }
                continue;
            }
            // The enclosure straddles eps: refine and restart.
            break;
        }
        prec *= 2;
        if prec > (1 << 14) {
            return Err(Error::resource(
                "could not resolve the schedule depth comparison",
            ));
        }
    }
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps.is_zero() || eps.is_negative() {
        return Err(Error::domain("eps must be positive"));
    }
    Ok(())
}

fn scale_eps(eps: &Rational, num: i64, den: i64) -> Rational {
    Rational::from_ratio(eps.as_ratio() * BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// Finite places that can contribute: bad primes of c plus primes dividing
/// the denominator of alpha. Everything else has local height exactly 0.
fn contributing_primes(alpha: &Rational, c: &Rational) -> Result<Vec<u64>> {
    let mut ps = denominator_support(c)?;
    for (p, _) in factor(alpha.denom().magnitude())? {
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    ps.sort_unstable();
    Ok(ps)
}

/// Canonical height of alpha under z^d + c, to enclosure width <= eps.
pub fn canonical_height(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<HeightReport> {
    check_eps(eps)?;
    if params.c.is_zero() {
        return height_for_pure_power(alpha, params, eps);
    }
    if params.c.is_integer() {
        return height_exact_schedule(alpha, params, eps);
    }
    let locals = height_decomposition(alpha, params, eps)?;
    Ok(report_from_locals(locals))
}

/// c = 0: phi(z) = z^d is multiplicative on absolute values, so the
/// canonical height equals the naive height exactly, place by place.
fn height_for_pure_power(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<HeightReport> {
    let prec = crate::interval::default_prec_bits().max(eps_bits(eps) + 32);
    let mut locals = vec![LocalHeight {
        place: Place::Archimedean,
        value: naive_local_height(alpha, &Place::Archimedean, prec),
        exactness: Exactness::Exact,
    }];
    for p in contributing_primes(alpha, &params.c)? {
        locals.push(LocalHeight {
            place: Place::Finite(p),
            value: naive_local_height(alpha, &Place::Finite(p), prec),
            exactness: Exactness::Exact,
        });
    }
    let mut report = report_from_locals(locals);
    debug_assert!(report.total.intersects(&naive_height(alpha, prec)));
    report.method = Method::PlaceSum;
    Ok(report)
}

fn height_exact_schedule(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<HeightReport> {
    let d_big = BigInt::from(params.d);
    let m = m_for_precision(&scale_eps(eps, 3, 8), &params.c, params.d)?;
    let two_c = BigInt::from(2) * params.c.numer().abs();
    let lam_budget = scale_eps(eps, 1, 8);

    let mut prec =
        crate::interval::default_prec_bits().max(eps_bits(eps) + 2 * m + 32);
    loop {
        if prec > (1 << 15) {
            return Err(Error::resource("schedule precision cap reached"));
        }
        let level = ln_int(&two_c, prec)?.div_uint(&BigInt::from((params.d - 1) as i64), prec);
        let tail = CertInterval::new(level.hi().neg(), level.hi().clone());
        let (z_m, _) = arch_orbit_interval(alpha, params, m, prec);
        let lam = lambda_arch_of_interval(&z_m, prec);
        let dm = d_big.pow(m);
        if !lam.div_uint(&dm, prec).width_leq(lam_budget.as_ratio()) {
            prec *= 2;
            continue;
        }
        let arch_value = lam.add(&tail, prec).div_uint(&dm, prec).max_zero();
        let mut locals = vec![LocalHeight {
            place: Place::Archimedean,
            value: arch_value,
            exactness: Exactness::TailBounded { steps: m },
        }];
        // Non-archimedean locals are exact for integral c:
        // lambda-hat_p = v_p(b) log p at each denominator prime.
        for (p, e) in factor(alpha.denom().magnitude())? {
            locals.push(LocalHeight {
                place: Place::Finite(p),
                value: ln_int(&BigInt::from(p), prec)?.mul_int(&BigInt::from(e), prec),
                exactness: Exactness::Exact,
            });
        }
        let mut report = report_from_locals(locals);
        report.method = Method::ExactSchedule { m };
        if !report.total.width_leq(eps.as_ratio()) {
            prec *= 2;
            continue;
        }
        return Ok(report);
    }
}

fn report_from_locals(locals: Vec<LocalHeight>) -> HeightReport {
    let prec = crate::interval::default_prec_bits().max(256);
    let mut total = CertInterval::zero();
    for l in &locals {
        total = total.add(&l.value, prec);
    }
    HeightReport {
        total,
        locals,
        method: Method::PlaceSum,
    }
}

/// Per-place decomposition with the place-sum route forced (also for
/// integral c, where it cross-checks the schedule).
pub fn height_decomposition(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<Vec<LocalHeight>> {
    check_eps(eps)?;
    if params.c.is_zero() {
        return Ok(height_for_pure_power(alpha, params, eps)?.locals);
    }
    let primes = contributing_primes(alpha, &params.c)?;
    let n_places = primes.len() as i64 + 1;
    let per = scale_eps(eps, 1, n_places);
    let mut locals = vec![local_height_arch(alpha, params, &per)?];
    for p in primes {
        locals.push(local_height_nonarch(alpha, params, p, &per)?);
    }
    Ok(locals)
}

/// Place-sum report (total plus locals), any rational c.
pub fn canonical_height_place_sum(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<HeightReport> {
    let locals = height_decomposition(alpha, params, eps)?;
    Ok(report_from_locals(locals))
}
