//! Arbitrary-precision dyadic floating-point numbers with directed rounding.
//!
//! A `Dyadic` is `mantissa * 2^exp` with a `BigInt` mantissa, so every value
//! is exact; rounding happens only where an operation asks for it, and then
//! always in a stated direction. This is the endpoint type for
//! [`CertInterval`](crate::interval::CertInterval): rounding a lower endpoint
//! `Down` and an upper endpoint `Up` keeps enclosures honest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rounding direction: toward -infinity or +infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// `mantissa * 2^exp`, normalized so the mantissa is odd (or zero with exp 0).
#[derive(Clone, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

/// `q` rounded toward `dir`, where the discarded bits are `m & ((1<<shift)-1)`.
/// Relies on `BigInt >> n` being an arithmetic (floor) shift.
fn shr_dir(m: &BigInt, shift: u64, dir: Round) -> BigInt {
    let q: BigInt = m >> shift;
    match dir {
        Round::Down => q,
        Round::Up => {
            if &(&q << shift) != m {
                q + 1
            } else {
                q
            }
        }
    }
}

impl Dyadic {
    pub fn zero() -> Dyadic {
        Dyadic {
            mantissa: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn from_bigint(n: &BigInt) -> Dyadic {
        Dyadic {
            mantissa: n.clone(),
            exp: 0,
        }
        .normalized()
    }

    pub fn from_i64(n: i64) -> Dyadic {
        Dyadic::from_bigint(&BigInt::from(n))
    }

    /// Exactly 2^k.
    pub fn pow2(k: i64) -> Dyadic {
        Dyadic {
            mantissa: BigInt::from(1),
            exp: k,
        }
    }

    fn normalized(mut self) -> Dyadic {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// Signum as -1, 0, 1.
    pub fn signum(&self) -> i32 {
        if self.mantissa.is_zero() {
            0
        } else if self.mantissa.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Mantissa width in bits (0 for zero).
    pub fn bits(&self) -> u64 {
        self.mantissa.magnitude().bits()
    }

    /// Position of the most significant bit: 2^msb <= |x| < 2^(msb+1).
    /// None for zero.
    pub fn msb(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.bits() as i64 - 1)
        }
    }

    /// Round to `prec` mantissa bits toward `dir`.
    pub fn round_to(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(prec >= 2, "precision must be at least 2 bits");
        let b = self.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let shift = b - prec as u64;
        Dyadic {
            mantissa: shr_dir(&self.mantissa, shift, dir),
            exp: self.exp + shift as i64,
        }
        .normalized()
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mantissa: -&self.mantissa,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exp: self.exp,
        }
    }

    /// Exact integer power (mantissa grows n-fold; round afterwards).
    pub fn pow_exact(&self, n: u32) -> Dyadic {
        if n == 0 {
            return Dyadic::from_i64(1);
        }
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.pow(n),
            exp: self
                .exp
                .checked_mul(n as i64)
                .expect("exponent overflow in pow"),
        }
    }

    /// Exact scaling by 2^k.
    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exp: self.exp + k,
        }
    }

    /// One unit in the last place of a `prec`-bit value of this magnitude.
    fn ulp(&self, prec: u32) -> Dyadic {
        match self.msb() {
            Some(m) => Dyadic::pow2(m - prec as i64 + 1),
            None => Dyadic::pow2(-(prec as i64)),
        }
    }

    /// `self + other`, rounded. When the operands' scales are too far apart
    /// to align affordably, the smaller one is absorbed into a one-ulp nudge.
    pub fn add(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        if self.is_zero() {
            return other.round_to(prec, dir);
        }
        if other.is_zero() {
            return self.round_to(prec, dir);
        }
        let msb_a = self.msb().unwrap();
        let msb_b = other.msb().unwrap();
        // Absorb only when the smaller operand lies strictly below one ulp
        // of the result at this precision; otherwise align exactly.
        if (msb_a - msb_b).abs() <= prec as i64 + 4 {
            let bottom = self.exp.min(other.exp);
            let ma = &self.mantissa << (self.exp - bottom) as u64;
            let mb = &other.mantissa << (other.exp - bottom) as u64;
            return Dyadic {
                mantissa: ma + mb,
                exp: bottom,
            }
            .normalized()
            .round_to(prec, dir);
        }
        let (big, small) = if msb_a >= msb_b {
            (self, other)
        } else {
            (other, self)
        };
        let r = big.round_to(prec, dir);
        let toward_dir = match dir {
            Round::Down => small.is_negative(),
            Round::Up => small.is_positive(),
        };
        if toward_dir {
            let u = r.ulp(prec);
            let nudged = match dir {
                Round::Down => r.add(&u.neg(), prec + 4, Round::Down),
                Round::Up => r.add(&u, prec + 4, Round::Up),
            };
            nudged.round_to(prec, dir)
        } else {
            r
        }
    }

    pub fn sub(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.add(&other.neg(), prec, dir)
    }

    pub fn mul(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp.checked_add(other.exp).expect("exponent overflow"),
        }
        .round_to(prec, dir)
    }

    /// `self / other` (other nonzero), rounded toward `dir`.
    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let extra = prec as u64 + 2 + other.bits().saturating_sub(self.bits());
        let num = &self.mantissa << extra;
        let (q, r) = num.div_mod_floor(&other.mantissa);
        // div_mod_floor keeps q <= exact quotient; bump for Up when inexact.
        let q = match dir {
            Round::Down => q,
            Round::Up => {
                if r.is_zero() {
                    q
                } else {
                    q + 1
                }
            }
        };
        Dyadic {
            mantissa: q,
            exp: self
                .exp
                .checked_sub(other.exp)
                .and_then(|e| e.checked_sub(extra as i64))
                .expect("exponent overflow"),
        }
        .normalized()
        .round_to(prec, dir)
    }

    /// Square root of a nonnegative dyadic, rounded toward `dir`.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(!self.is_negative(), "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = 2 * prec as u64 + 4;
        let mut shift = want.saturating_sub(self.bits());
        if (self.exp - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mantissa << shift;
        let r = m.sqrt();
        let exact = (&r * &r) == m;
        let r = match dir {
            Round::Down => r,
            Round::Up => {
                if exact {
                    r
                } else {
                    r + 1
                }
            }
        };
        Dyadic {
            mantissa: r,
            exp: (self.exp - shift as i64) / 2,
        }
        .normalized()
        .round_to(prec, dir)
    }

    /// Exact comparison.
    pub fn cmp_exact(&self, other: &Dyadic) -> Ordering {
        let sa = self.signum();
        let sb = other.signum();
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let msb_a = self.msb().unwrap();
        let msb_b = other.msb().unwrap();
        if msb_a != msb_b {
            let mag = msb_a.cmp(&msb_b);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        // Same sign and msb: alignment is bounded by the mantissa widths.
        let bottom = self.exp.min(other.exp);
        let ma = &self.mantissa << (self.exp - bottom) as u64;
        let mb = &other.mantissa << (other.exp - bottom) as u64;
        ma.cmp(&mb)
    }

    /// Exact comparison against a rational.
    pub fn cmp_ratio(&self, q: &BigRational) -> Ordering {
        let sa = self.signum();
        let sb = if q.numer().is_zero() {
            0
        } else if q.numer().is_negative() {
            -1
        } else {
            1
        };
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // msb estimate of q = numer/denom keeps cross-multiplied shifts small.
        let q_msb_lo = q.numer().magnitude().bits() as i64 - q.denom().magnitude().bits() as i64 - 1;
        let msb_a = self.msb().unwrap();
        if msb_a < q_msb_lo - 1 || msb_a > q_msb_lo + 2 {
            let mag = msb_a.cmp(&(q_msb_lo + 1));
            return if sa > 0 { mag } else { mag.reverse() };
        }
        // self = m*2^e vs n/d  <=>  m*d*2^e vs n.
        let lhs = &self.mantissa * q.denom();
        let rhs = q.numer().clone();
        if self.exp >= 0 {
            (lhs << self.exp as u64).cmp(&rhs)
        } else {
            lhs.cmp(&(rhs << (-self.exp) as u64))
        }
    }

    /// Exact conversion to a rational.
    pub fn to_ratio(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from(&self.mantissa << self.exp as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::from(1) << (-self.exp) as u64)
        }
    }

    /// Nearest-or-directed f64: the result is <= the exact value for `Down`
    /// and >= it for `Up`, saturating to MAX/INFINITY at the range ends.
    pub fn to_f64(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let neg = self.is_negative();
        let mag = self.mantissa.magnitude();
        let b = mag.bits();
        let (mut top, mut inexact, mut exp) = if b > 53 {
            let shift = b - 53;
            let t: num_bigint::BigUint = mag >> shift;
            let back: num_bigint::BigUint = &t << shift;
            (
                t.to_u64().unwrap(),
                &back != mag,
                self.exp + shift as i64,
            )
        } else {
            (mag.to_u64().unwrap(), false, self.exp)
        };
        // Outward bump when truncation moved us against the direction.
        let outward = matches!((dir, neg), (Round::Up, false) | (Round::Down, true));
        if inexact && outward {
            top += 1;
            if top == 1 << 53 {
                top >>= 1;
                exp += 1;
            }
            inexact = false;
        }
        let _ = inexact;
        if exp > 2000 {
            return saturate(neg, dir);
        }
        if exp < -2000 {
            // Underflow: keep the directed side of zero.
            return match (dir, neg) {
                (Round::Down, false) => 0.0,
                (Round::Up, true) => -0.0,
                (Round::Up, false) => f64::MIN_POSITIVE,
                (Round::Down, true) => -f64::MIN_POSITIVE,
            };
        }
        let v = (top as f64) * 2f64.powi(exp as i32);
        let v = if neg { -v } else { v };
        if v.is_infinite() {
            return saturate(neg, dir);
        }
        v
    }
}

fn saturate(neg: bool, dir: Round) -> f64 {
    match (dir, neg) {
        (Round::Up, false) => f64::INFINITY,
        (Round::Down, false) => f64::MAX,
        (Round::Down, true) => f64::NEG_INFINITY,
        (Round::Up, true) => f64::MIN,
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl Eq for Dyadic {}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64(Round::Down))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn d(n: i64) -> Dyadic {
        Dyadic::from_i64(n)
    }

    #[test]
    fn bigint_shr_is_floor() {
        // The rounding code depends on this.
        assert_eq!(BigInt::from(-5) >> 1u64, BigInt::from(-3));
        assert_eq!(BigInt::from(5) >> 1u64, BigInt::from(2));
    }

    #[test]
    fn round_directions_bracket() {
        let x = Dyadic {
            mantissa: BigInt::from(0b1011_0111i64),
            exp: -5,
        };
        let lo = x.round_to(4, Round::Down);
        let hi = x.round_to(4, Round::Up);
        assert!(lo <= x && x <= hi);
        assert!(lo < hi);
    }

    #[test]
    fn add_absorbs_far_small_operand() {
        let big = Dyadic::pow2(1000);
        let tiny = Dyadic::pow2(-1000);
        let down = big.add(&tiny, 16, Round::Down);
        let up = big.add(&tiny, 16, Round::Up);
        assert!(down <= big.add(&tiny, 4096, Round::Down));
        assert!(up > big.clone());
        let down_neg = big.add(&tiny.neg(), 16, Round::Down);
        assert!(down_neg < big);
    }

    #[test]
    fn div_brackets_exact_value() {
        let a = d(1);
        let b = d(3);
        let lo = a.div(&b, 64, Round::Down);
        let hi = a.div(&b, 64, Round::Up);
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(lo.cmp_ratio(&third) == Ordering::Less);
        assert!(hi.cmp_ratio(&third) == Ordering::Greater);
        let gap = hi.sub(&lo, 64, Round::Up);
        assert!(gap <= Dyadic::pow2(-60));
    }

    #[test]
    fn sqrt_brackets() {
        let two = d(2);
        let lo = two.sqrt(80, Round::Down);
        let hi = two.sqrt(80, Round::Up);
        assert!(lo.mul(&lo, 200, Round::Up) <= two);
        assert!(hi.mul(&hi, 200, Round::Down) >= two);
        // Exact square stays exact.
        assert_eq!(d(49).sqrt(64, Round::Down), d(7));
        assert_eq!(d(49).sqrt(64, Round::Up), d(7));
    }

    #[test]
    fn f64_conversion_directed() {
        let third_lo = d(1).div(&d(3), 120, Round::Down);
        let third_hi = d(1).div(&d(3), 120, Round::Up);
        assert!(third_lo.to_f64(Round::Down) <= 1.0 / 3.0);
        assert!(third_hi.to_f64(Round::Up) >= 1.0 / 3.0);
        assert_eq!(d(-7).to_f64(Round::Up), -7.0);
        let huge = Dyadic::pow2(5000);
        assert_eq!(huge.to_f64(Round::Up), f64::INFINITY);
        assert_eq!(huge.to_f64(Round::Down), f64::MAX);
    }

    #[test]
    fn cmp_ratio_agrees_with_exact() {
        let x = d(7).div(&d(16), 60, Round::Down); // exact: 7/16 is dyadic
        let q = BigRational::new(BigInt::from(7), BigInt::from(16));
        assert_eq!(x.cmp_ratio(&q), Ordering::Equal);
        let y = d(1).div(&d(10), 60, Round::Down);
        let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
        assert_eq!(y.cmp_ratio(&tenth), Ordering::Less);
    }
}
