//! Explicit lower-bound constants for canonical heights of wandering points
//! and verdicts for individual points.
//!
//! The main bound is h-hat >= (h(c) - d(d+2m) log 2) / d^(N+2) with
//! N = (2/d^m)((d^m+1)^(r+s+1) - 1), where r counts archimedean places,
//! s counts Type II primes, and m = 2 for d = 2 (1 otherwise). For d = 2
//! and integral c the sharper floor (1/32) max(log|c|, 1) applies to
//! wandering points (c <= -1), and (log 2 / 4) max(log c, 1) for c >= 1.

use crate::dynamics::{decide_preperiodic, MapParams, OrbitVerdict};
use crate::error::{Error, Result};
use crate::global::canonical_height;
use crate::interval::{ln2, ln_int, CertInterval};
use crate::local::{classify_reduction, ReductionType};
use crate::rational::{denominator_support, naive_height, Rational};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The constants of the main theorem for one (d, r, s).
#[derive(Clone, Debug)]
pub struct BoundProfile {
    pub d: u32,
    pub r: u32,
    pub s: u32,
    pub m: u32,
    pub n: BigUint,
    /// 1/d^(N+2), exact.
    pub coefficient: Rational,
    /// Multiplier of log 2 in the offset: d(d+2m).
    pub offset_log2: u32,
}

impl BoundProfile {
    /// The offset d(d+2m) log 2 as an enclosure.
    pub fn offset(&self, prec: u32) -> CertInterval {
        ln2(prec).mul_int(&BigInt::from(self.offset_log2), prec)
    }

    /// Evaluates (h(c) - offset) * coefficient. May be <= 0 (vacuous);
    /// returned as-is.
    pub fn bound_value(&self, c: &Rational, prec: u32) -> CertInterval {
        let h_c = naive_height(c, prec);
        let coeff = CertInterval::from_ratio(self.coefficient.as_ratio(), prec);
        h_c.sub(&self.offset(prec), prec).mul(&coeff, prec)
    }
}

/// N = (2/d^m)((d^m+1)^(r+s+1) - 1), checked to be an exact integer.
pub fn theorem2_constants(d: u32, r: u32, s: u32) -> Result<BoundProfile> {
    if d < 2 {
        return Err(Error::domain("degree d must be at least 2"));
    }
    if r < 1 {
        return Err(Error::domain("archimedean place count r must be >= 1"));
    }
    let m: u32 = if d == 2 { 2 } else { 1 };
    let dm = BigUint::from(d).pow(m);
    let base = &dm + BigUint::one();
    let numerator = BigUint::from(2u32) * (base.pow(r + s + 1) - BigUint::one());
    if !(&numerator % &dm).is_zero() {
        return Err(Error::domain(
            "d^m must divide 2((d^m+1)^(r+s+1)-1); formula misuse",
        ));
    }
    let n = numerator / &dm;
    let exp = (&n + BigUint::from(2u32))
        .to_u32()
        .ok_or_else(|| Error::resource("N too large to exponentiate"))?;
    let coefficient = Rational::new(BigInt::one(), BigInt::from(d).pow(exp))?;
    Ok(BoundProfile {
        d,
        r,
        s,
        m,
        n,
        coefficient,
        offset_log2: d * (d + 2 * m),
    })
}

/// Number of Type II primes of z^d + c over Q.
pub fn type_ii_count(c: &Rational, d: u32) -> Result<u32> {
    let mut s = 0;
    for p in denominator_support(c)? {
        if classify_reduction(c, p, d) == ReductionType::TypeII {
            s += 1;
        }
    }
    Ok(s)
}

/// The main theorem's bound for given c (r defaults to 1 for Q; s computed
/// from the reduction types unless overridden). May be vacuous (<= 0).
pub fn theorem2_lower_bound(
    c: &Rational,
    d: u32,
    r: u32,
    s_override: Option<u32>,
    prec: u32,
) -> Result<CertInterval> {
    let s = match s_override {
        Some(s) => s,
        None => type_ii_count(c, d)?,
    };
    let profile = theorem2_constants(d, r, s)?;
    Ok(profile.bound_value(c, prec))
}

/// Sharper floors for d = 2, integral c: (1/32) max(log|c|, 1) for c <= -1
/// and (log 2 / 4) max(log c, 1) for c >= 1.
pub fn integer_c_lower_bound(c: &BigInt, prec: u32) -> Result<CertInterval> {
    if c.is_zero() {
        return Err(Error::domain("the integer-c floor needs c != 0"));
    }
    let log_abs = ln_int(&c.abs(), prec)?;
    let floor = log_abs.max(&CertInterval::from_int(1));
    if c.is_negative() {
        Ok(floor.div_uint(&BigInt::from(32), prec))
    } else {
        Ok(floor.mul(&ln2(prec), prec).div_uint(&BigInt::from(4), prec))
    }
}

/// The d >= 3 remark bound for integral c and points with phi(a) != phi^2(a):
/// max((d-2)/d^2 log|c| + (log d)/d - (d+1)/d log 2,
///     (1/d^2) log|c| + (1/d^2) log(3/2)).
pub fn remark_bound_general_d(c: &BigInt, d: u32, prec: u32) -> Result<CertInterval> {
    if d < 3 {
        return Err(Error::domain(
            "the remark bound is for d >= 3 (use the integer-c floor for d = 2)",
        ));
    }
    if c.is_zero() {
        return Err(Error::domain("the remark bound needs c != 0"));
    }
    let log_c = ln_int(&c.abs(), prec)?;
    let d2 = BigInt::from(d) * BigInt::from(d);
    let strand1 = log_c
        .mul_int(&BigInt::from(d - 2), prec)
        .div_uint(&d2, prec)
        .add(
            &ln_int(&BigInt::from(d), prec)?.div_uint(&BigInt::from(d), prec),
            prec,
        )
        .sub(
            &ln2(prec)
                .mul_int(&BigInt::from(d + 1), prec)
                .div_uint(&BigInt::from(d), prec),
            prec,
        );
    // log(3/2) = log 3 - log 2.
    let log32 = ln_int(&BigInt::from(3), prec)?.sub(&ln2(prec), prec);
    let strand2 = log_c.add(&log32, prec).div_uint(&d2, prec);
    Ok(strand1.max(&strand2))
}

/// Outcome of checking one point against the theorems.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// An exact repeat phi^i = phi^j with j < N.
    PreperiodicWithinN { i: u32, j: u32 },
    /// Wandering with certified height above every applicable bound.
    SatisfiesBound {
        height: CertInterval,
        bound: CertInterval,
        margin: CertInterval,
    },
    /// Certified wandering height strictly below a proven bound. This
    /// would falsify the theorems; it is reported, never swallowed.
    BoundViolation {
        height: CertInterval,
        bound: CertInterval,
    },
}

/// Checks one point: orbit repeat within the theorem's N-step budget, or
/// else the certified height against the strongest applicable bound.
pub fn verify_point(alpha: &Rational, params: &MapParams, eps: &Rational) -> Result<Verdict> {
    let prec = crate::interval::default_prec_bits();
    let s = type_ii_count(&params.c, params.d)?;
    let profile = theorem2_constants(params.d, 1, s)?;
    let budget = profile.n.to_u64().unwrap_or(u64::MAX).clamp(1, 1_000_000);
    let verdict = decide_preperiodic(alpha, params, budget)?;
    if let OrbitVerdict::Preperiodic { i, j } = verdict {
        return Ok(Verdict::PreperiodicWithinN { i, j });
    }

    let mut bound = profile.bound_value(&params.c, prec);
    if params.c.is_integer() && !params.c.is_zero() && params.d == 2 {
        bound = bound.max(&integer_c_lower_bound(params.c.numer(), prec)?);
    }
    let height = canonical_height(alpha, params, eps)?.total;

    let certified_wandering =
        matches!(verdict, OrbitVerdict::Wandering(_)) || height.lo().is_positive();
    if !certified_wandering {
        return Err(Error::inconclusive(format!(
            "cannot certify {alpha} as wandering at eps={eps}; retry with smaller eps"
        )));
    }
    if height.lo() >= bound.hi() {
        let margin = height.sub(&bound, prec);
        return Ok(Verdict::SatisfiesBound {
            height,
            bound,
            margin,
        });
    }
    if height.hi() < bound.lo() {
        return Ok(Verdict::BoundViolation { height, bound });
    }
    Err(Error::inconclusive(format!(
        "height enclosure {height} straddles the bound {bound}; retry with smaller eps"
    )))
}

/// Convenience: is the bound value vacuous (entirely <= 0)?
pub fn is_vacuous(bound: &CertInterval) -> bool {
    !bound.hi().is_positive()
}
