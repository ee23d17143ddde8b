//! Certified real intervals.
//!
//! Every operation returns an enclosure of the exact result: lower endpoints
//! are rounded down, upper endpoints up. Natural logarithms come from the
//! atanh series with an explicit geometric tail bound, so `ln` results are
//! enclosures too, not approximations.

use crate::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::sync::OnceLock;

/// Default working precision in bits. Adaptive loops start here and double
/// on demand; the CLI can override it (flag beats environment beats this).
static DEFAULT_PREC_BITS: AtomicU32 = AtomicU32::new(128);

pub fn default_prec_bits() -> u32 {
    DEFAULT_PREC_BITS.load(AtomicOrdering::Relaxed)
}

pub fn set_default_prec_bits(bits: u32) {
    DEFAULT_PREC_BITS.store(bits.clamp(32, 1 << 20), AtomicOrdering::Relaxed);
}

/// Closed interval `[lo, hi]` with outward-rounded endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertInterval {
    lo: Dyadic,
    hi: Dyadic,
}

impl CertInterval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> CertInterval {
        debug_assert!(lo <= hi, "inverted interval");
        CertInterval { lo, hi }
    }

    pub fn point(x: Dyadic) -> CertInterval {
        CertInterval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> CertInterval {
        CertInterval::point(Dyadic::zero())
    }

    pub fn from_int(n: i64) -> CertInterval {
        CertInterval::point(Dyadic::from_i64(n))
    }

    pub fn from_bigint(n: &BigInt) -> CertInterval {
        CertInterval::point(Dyadic::from_bigint(n))
    }

    pub fn from_ratio(q: &BigRational, prec: u32) -> CertInterval {
        let num = Dyadic::from_bigint(q.numer());
        let den = Dyadic::from_bigint(q.denom());
        CertInterval {
            lo: num.div(&den, prec, Round::Down),
            hi: num.div(&den, prec, Round::Up),
        }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64(Round::Up)
    }

    /// Upper bound on the exact width.
    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo, 64, Round::Up)
    }

    /// Certified `width() <= eps` (exact comparison against the rational).
    pub fn width_leq(&self, eps: &BigRational) -> bool {
        self.width().cmp_ratio(eps) != Ordering::Greater
    }

    pub fn mid(&self) -> Dyadic {
        self.lo
            .add(&self.hi, default_prec_bits().max(64), Round::Down)
            .mul_pow2(-1)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains_dyadic(&self, x: &Dyadic) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_ratio(&self, q: &BigRational) -> bool {
        self.lo.cmp_ratio(q) != Ordering::Greater && self.hi.cmp_ratio(q) != Ordering::Less
    }

    pub fn contains(&self, other: &CertInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &CertInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Certified strict `self > other` (true only when provably so).
    pub fn gt_certain(&self, other: &CertInterval) -> bool {
        self.lo > other.hi
    }

    pub fn lt_certain(&self, other: &CertInterval) -> bool {
        self.hi < other.lo
    }

    pub fn neg(&self) -> CertInterval {
        CertInterval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn abs(&self) -> CertInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = self.lo.neg().max(self.hi.clone());
            CertInterval {
                lo: Dyadic::zero(),
                hi: m,
            }
        }
    }

    /// Enclosure of `max(x, 0)`.
    pub fn max_zero(&self) -> CertInterval {
        CertInterval {
            lo: self.lo.clone().max(Dyadic::zero()),
            hi: self.hi.clone().max(Dyadic::zero()),
        }
    }

    /// Enclosure of `max(x, y)`.
    pub fn max(&self, other: &CertInterval) -> CertInterval {
        CertInterval {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Intersection (caller must know both enclose the same value).
    pub fn intersect(&self, other: &CertInterval) -> Option<CertInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo <= hi {
            Some(CertInterval { lo, hi })
        } else {
            None
        }
    }

    pub fn add(&self, other: &CertInterval, prec: u32) -> CertInterval {
        CertInterval {
            lo: self.lo.add(&other.lo, prec, Round::Down),
            hi: self.hi.add(&other.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, other: &CertInterval, prec: u32) -> CertInterval {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &CertInterval, prec: u32) -> CertInterval {
        // Exact candidate products, then one directed rounding each side.
        let mut candidates: Vec<Dyadic> = Vec::with_capacity(4);
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                candidates.push(a.mul(b, u32::MAX, Round::Down));
            }
        }
        let lo = candidates.iter().min().unwrap().round_to(prec, Round::Down);
        let hi = candidates.iter().max().unwrap().round_to(prec, Round::Up);
        CertInterval { lo, hi }
    }

    /// Division by an interval that is strictly positive.
    pub fn div_pos(&self, other: &CertInterval, prec: u32) -> Result<CertInterval> {
        if !other.lo.is_positive() {
            return Err(Error::domain(
                "interval division requires a strictly positive divisor",
            ));
        }
        Ok(CertInterval {
            lo: self.lo.div(
                if self.lo.is_negative() { &other.lo } else { &other.hi },
                prec,
                Round::Down,
            ),
            hi: self.hi.div(
                if self.hi.is_negative() { &other.hi } else { &other.lo },
                prec,
                Round::Up,
            ),
        })
    }

    /// Division by an exact positive integer.
    pub fn div_uint(&self, n: &BigInt, prec: u32) -> CertInterval {
        debug_assert!(n.is_positive());
        let d = Dyadic::from_bigint(n);
        CertInterval {
            lo: self.lo.div(&d, prec, Round::Down),
            hi: self.hi.div(&d, prec, Round::Up),
        }
    }

    /// Enclosure of x^n. Even powers go through |x| so zero-straddling
    /// intervals keep a nonnegative lower bound.
    pub fn pow_uint(&self, n: u32, prec: u32) -> CertInterval {
        if n == 0 {
            return CertInterval::from_int(1);
        }
        if n == 1 {
            return self.round_out(prec);
        }
        let (lo_base, hi_base) = if n % 2 == 0 {
            let a = self.abs();
            (a.lo.clone(), a.hi.clone())
        } else {
            (self.lo.clone(), self.hi.clone())
        };
        CertInterval {
            lo: lo_base.pow_exact(n).round_to(prec, Round::Down),
            hi: hi_base.pow_exact(n).round_to(prec, Round::Up),
        }
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> CertInterval {
        CertInterval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    /// Scaling by an exact integer (either sign).
    pub fn mul_int(&self, n: &BigInt, prec: u32) -> CertInterval {
        self.mul(&CertInterval::from_bigint(n), prec)
    }

    /// Natural log; requires a strictly positive interval.
    pub fn ln(&self, prec: u32) -> Result<CertInterval> {
        if !self.lo.is_positive() {
            return Err(Error::domain("ln of a non-positive interval"));
        }
        let lo = ln_dyadic(&self.lo, prec).lo;
        let hi = ln_dyadic(&self.hi, prec).hi;
        Ok(CertInterval { lo, hi })
    }

    pub fn sqrt(&self, prec: u32) -> Result<CertInterval> {
        if self.lo.is_negative() {
            return Err(Error::domain("sqrt of an interval with negative part"));
        }
        Ok(CertInterval {
            lo: self.lo.sqrt(prec, Round::Down),
            hi: self.hi.sqrt(prec, Round::Up),
        })
    }

    /// Widen both endpoints outward to `prec` bits.
    pub fn round_out(&self, prec: u32) -> CertInterval {
        CertInterval {
            lo: self.lo.round_to(prec, Round::Down),
            hi: self.hi.round_to(prec, Round::Up),
        }
    }
}

impl fmt::Display for CertInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_f64(), self.hi_f64())
    }
}

/// ln 2 as an enclosure, from 2*atanh(1/3) with exact rational partial sums.
pub fn ln2(prec: u32) -> CertInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, CertInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&prec) {
        return v.clone();
    }
    // (1/3)^(2K+3) <= 2^-(prec+8)  <=>  (2K+3) log2(3) >= prec+8.
    let terms = (prec as u64 + 8) / 3 + 2;
    let third2 = BigRational::new(BigInt::from(1), BigInt::from(9));
    let mut power = BigRational::new(BigInt::from(1), BigInt::from(3));
    let mut sum = BigRational::zero();
    let mut k: u64 = 0;
    loop {
        sum += &power / BigRational::from(BigInt::from(2 * k + 1));
        if k >= terms {
            break;
        }
        power *= &third2;
        k += 1;
    }
    // Tail of atanh(1/3) after term k: sum_{j>k} (1/3)^(2j+1)/(2j+1)
    //   <= (1/(2k+3)) * (1/3)^(2k+3) / (1 - 1/9).
    let tail = (&power * &third2) / BigRational::from(BigInt::from(2 * k + 3))
        * BigRational::new(BigInt::from(9), BigInt::from(8));
    let two = BigRational::from(BigInt::from(2));
    let lo_q = &two * &sum;
    let hi_q = &two * (&sum + &tail);
    let result = CertInterval::new(
        Dyadic::from_bigint(lo_q.numer()).div(
            &Dyadic::from_bigint(lo_q.denom()),
            prec + 8,
            Round::Down,
        ),
        Dyadic::from_bigint(hi_q.numer()).div(
            &Dyadic::from_bigint(hi_q.denom()),
            prec + 8,
            Round::Up,
        ),
    );
    cache
        .lock()
        .unwrap()
        .insert(prec, result.clone());
    result
}

/// Enclosure of ln(x) for a positive dyadic.
pub fn ln_dyadic(x: &Dyadic, prec: u32) -> CertInterval {
    assert!(x.is_positive(), "ln of non-positive dyadic");
    let work = prec + 16;
    // x = f * 2^n with f in [1, 2).
    let n = x.msb().unwrap();
    let f = x.mul_pow2(-n);
    debug_assert!(f >= Dyadic::from_i64(1) && f < Dyadic::from_i64(2));
    let ln_f = if f == Dyadic::from_i64(1) {
        CertInterval::zero()
    } else {
        // t = (f-1)/(f+1) in (0, 1/3]; ln f = 2 * sum t^(2k+1)/(2k+1).
        let one = Dyadic::from_i64(1);
        let num = f.sub(&one, u32::MAX, Round::Down); // exact: small dyadics
        let den = f.add(&one, u32::MAX, Round::Down);
        let t = CertInterval::new(
            num.div(&den, work, Round::Down),
            num.div(&den, work, Round::Up),
        );
        let t2 = t.mul(&t, work);
        let mut power = t.clone();
        let mut sum = t.clone();
        let mut odd: u64 = 1;
        loop {
            power = power.mul(&t2, work);
            odd += 2;
            let term = power.div_uint(&BigInt::from(odd), work);
            sum = sum.add(&term, work);
            match term.hi().msb() {
                Some(m) if m > -(work as i64) - 2 => continue,
                _ => break,
            }
        }
        // Remaining tail <= t^(odd+2) / ((odd+2)(1-t^2)), all factors >= 0.
        let next_power = power.mul(&t2, work);
        let one_minus_t2 = CertInterval::from_int(1).sub(&t2, work);
        let tail_hi = next_power
            .hi()
            .div(one_minus_t2.lo(), work, Round::Up)
            .div(&Dyadic::from_i64((odd + 2) as i64), work, Round::Up);
        let tail = CertInterval::new(Dyadic::zero(), tail_hi);
        sum.add(&tail, work).mul_pow2(1)
    };
    let scaled = ln2(work).mul_int(&BigInt::from(n), work);
    ln_f.add(&scaled, work).round_out(prec)
}

/// Enclosure of ln(n) for a positive integer, cached for small n.
pub fn ln_int(n: &BigInt, prec: u32) -> Result<CertInterval> {
    if !n.is_positive() {
        return Err(Error::domain("ln of a non-positive integer"));
    }
    use num_traits::ToPrimitive;
    if let Some(small) = n.to_u64() {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u32), CertInterval>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(v) = cache.lock().unwrap().get(&(small, prec)) {
            return Ok(v.clone());
        }
        let v = ln_dyadic(&Dyadic::from_bigint(n), prec);
        cache.lock().unwrap().insert((small, prec), v.clone());
        return Ok(v);
    }
    Ok(ln_dyadic(&Dyadic::from_bigint(n), prec))
}
