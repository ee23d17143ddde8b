//! Truncated p-adic arithmetic for orbit iteration at a finite place.
//!
//! An element is `p^val * unit` with the unit known modulo `p^digits`.
//! Multiplication keeps the known digit count; addition of terms with equal
//! valuation can cancel known digits, and when every known digit cancels the
//! computation must restart at higher precision (the caller runs the retry
//! loop).

use crate::error::{Error, Result};
use crate::rational::Rational;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Outcome of a p-adic step when cancellation may have eaten the digits.
#[derive(Debug)]
pub enum PadicStep {
    Ok(PadicElem),
    /// All known digits of a sum cancelled; retry at higher precision.
    PrecisionExhausted,
}

/// `p^val * unit`, with `unit` invertible mod p and known mod p^digits.
#[derive(Clone, Debug)]
pub struct PadicElem {
    pub p: u64,
    pub val: i64,
    unit: BigUint,
    digits: u32,
}

fn pow_p(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

impl PadicElem {
    /// Converts an exact nonzero rational to `digits` known p-adic digits.
    pub fn from_rational(q: &Rational, p: u64, digits: u32) -> Result<PadicElem> {
        if q.is_zero() {
            return Err(Error::domain("p-adic embedding of zero"));
        }
        let val = q.val(p)?;
        let pb = num_bigint::BigInt::from(p);
        let mut num = q.numer().clone();
        let mut den = q.denom().clone();
        // Strip the p-parts; what remains is a unit.
        loop {
            let (qt, r) = num.div_rem(&pb);
            if r.is_zero() {
                num = qt;
            } else {
                break;
            }
        }
        loop {
            let (qt, r) = den.div_rem(&pb);
            if r.is_zero() {
                den = qt;
            } else {
                break;
            }
        }
        let modulus = pow_p(p, digits);
        let num_m = num.mod_floor(&num_bigint::BigInt::from(modulus.clone()));
        let den_m = den.mod_floor(&num_bigint::BigInt::from(modulus.clone()));
        let num_u = num_m.to_biguint().expect("mod_floor is nonnegative");
        let den_u = den_m.to_biguint().expect("mod_floor is nonnegative");
        let inv = mod_inverse(&den_u, &modulus)
            .ok_or_else(|| Error::domain("denominator not a unit mod p^k"))?;
        Ok(PadicElem {
            p,
            val,
            unit: (num_u * inv) % &modulus,
            digits,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `self^d + c` where `c` is a fixed p-adic element of the same p.
    /// Valuations combine exactly except when the two summands share a
    /// valuation, where cancellation may lose digits.
    pub fn step(&self, d: u32, c: &PadicElem) -> PadicStep {
        debug_assert_eq!(self.p, c.p);
        // z^d: valuation d*val, unit^d mod p^digits.
        let zd_val = self.val * d as i64;
        let digits = self.digits.min(c.digits);
        let modulus = pow_p(self.p, digits);
        let zd_unit = self.unit.modpow(&BigUint::from(d), &modulus);
        if zd_val < c.val {
            // Ultrametric: no cancellation possible.
            return PadicStep::Ok(PadicElem {
                p: self.p,
                val: zd_val,
                unit: zd_unit,
                digits,
            });
        }
        if zd_val > c.val {
            return PadicStep::Ok(PadicElem {
                p: self.p,
                val: c.val,
                unit: c.unit.clone() % &modulus,
                digits,
            });
        }
        // Equal valuations: add units, then renormalize by the p-part.
        let sum = (zd_unit + c.unit.clone() % &modulus) % &modulus;
        if sum.is_zero() {
            return PadicStep::PrecisionExhausted;
        }
        let mut w: u32 = 0;
        let mut u = sum;
        let pb = BigUint::from(self.p);
        while (&u % &pb).is_zero() {
            u /= &pb;
            w += 1;
        }
        if w >= digits {
            return PadicStep::PrecisionExhausted;
        }
        PadicStep::Ok(PadicElem {
            p: self.p,
            val: zd_val + w as i64,
            unit: u % pow_p(self.p, digits - w),
            digits: digits - w,
        })
    }
}

/// Modular inverse via extended Euclid; None when not coprime.
fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let a = BigInt::from(a.clone());
    let m_i = BigInt::from(m.clone());
    let e = a.extended_gcd(&m_i);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(&m_i).to_biguint().unwrap())
}
