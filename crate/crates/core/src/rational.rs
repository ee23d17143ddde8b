//! Exact rationals, places of Q, p-adic valuations and naive heights.

use crate::error::{Error, Result};
use crate::interval::{ln_int, CertInterval};
use crate::primes::{factor, is_prime_u64};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// A rational number in lowest terms with positive denominator.
/// (The inner `BigRational` maintains both invariants on construction.)
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Rational> {
        if denom.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_int(n: i64) -> Rational {
        Rational(BigRational::from(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Rational {
        Rational(BigRational::from(n))
    }

    pub fn from_ratio(q: BigRational) -> Rational {
        Rational(q)
    }

    pub fn zero() -> Rational {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.denom().is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn neg(&self) -> Rational {
        Rational(-self.0.clone())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn add(&self, other: &Rational) -> Rational {
        Rational(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Rational) -> Rational {
        Rational(&self.0 - &other.0)
    }

    pub fn mul(&self, other: &Rational) -> Rational {
        Rational(&self.0 * &other.0)
    }

    /// Larger of the numerator/denominator bit sizes; used for digit budgets.
    pub fn bit_size(&self) -> u64 {
        self.numer().magnitude().bits().max(self.denom().magnitude().bits())
    }

    /// Enclosure of this rational as a real.
    pub fn to_interval(&self, prec: u32) -> CertInterval {
        CertInterval::from_ratio(&self.0, prec)
    }

    /// p-adic valuation v_p(q). Errors on q = 0 (the valuation is +infinity;
    /// callers must branch first).
    pub fn val(&self, p: u64) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::domain("valuation of zero is +infinity"));
        }
        let pb = BigInt::from(p);
        Ok(exponent_of(self.numer(), &pb) - exponent_of(self.denom(), &pb))
    }
}

fn exponent_of(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut k = 0i64;
    let mut cur = n.clone();
    loop {
        let (q, r) = cur.div_rem(p);
        if r.is_zero() {
            k += 1;
            cur = q;
        } else {
            return k;
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a/b` or an integer literal.
    fn from_str(s: &str) -> Result<Rational> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let numer: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("bad numerator in {s:?}")))?;
            let denom: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::domain(format!("bad denominator in {s:?}")))?;
            Rational::new(numer, denom)
        } else {
            let n: BigInt = s
                .parse()
                .map_err(|_| Error::domain(format!("bad rational literal {s:?}")))?;
            Ok(Rational::from_bigint(n))
        }
    }
}

/// Parses `a/b`, integer, decimal (`0.25`) or scientific (`1e-6`, `2.5e-3`)
/// notation into an exact rational. Used for epsilon arguments.
pub fn parse_ratio_flexible(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains('/') {
        return s.parse();
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e
                .parse()
                .map_err(|_| Error::domain(format!("bad exponent in {s:?}")))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let sign = if int_part.starts_with('-') { -1i64 } else { 1 };
    let digits: String = format!(
        "{}{}",
        int_part.trim_start_matches(['+', '-']),
        frac_part
    );
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::domain(format!("bad numeric literal {s:?}")));
    }
    let num: BigInt = digits.parse().unwrap();
    let num = num * BigInt::from(sign);
    let shift = exp10 - frac_part.len() as i64;
    let q = if shift >= 0 {
        BigRational::from(num * BigInt::from(10u32).pow(shift as u32))
    } else {
        BigRational::new(num, BigInt::from(10u32).pow((-shift) as u32))
    };
    Ok(Rational(q))
}

/// A place of Q: the archimedean absolute value or a p-adic one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Archimedean,
    Finite(u64),
}

impl Place {
    /// Constructs a finite place, checking primality deterministically.
    pub fn finite(p: u64) -> Result<Place> {
        if !is_prime_u64(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        Ok(Place::Finite(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Archimedean => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// Naive local height lambda_v(q) = max(log|q|_v, 0) as an enclosure. Exact
/// (up to outward rounding of k log p) at finite places.
pub fn naive_local_height(q: &Rational, v: &Place, prec: u32) -> CertInterval {
    if q.is_zero() {
        return CertInterval::zero();
    }
    match v {
        Place::Finite(p) => {
            let k = (-q.val(*p).expect("nonzero")).max(0);
            if k == 0 {
                CertInterval::zero()
            } else {
                ln_int(&BigInt::from(*p), prec)
                    .expect("prime > 0")
                    .mul_int(&BigInt::from(k), prec)
            }
        }
        Place::Archimedean => {
            let a = q.abs().to_interval(prec + 8);
            a.ln(prec).expect("positive abs").max_zero().round_out(prec)
        }
    }
}

/// Naive (Weil) height h(q) = log max(|a|, b) for q = a/b in lowest terms.
pub fn naive_height(q: &Rational, prec: u32) -> CertInterval {
    let m = q.numer().abs().max(q.denom().clone());
    if m.is_one() {
        return CertInterval::zero();
    }
    ln_int(&m, prec).expect("max(|a|,b) >= 1")
}

/// The primes p with v_p(c) < 0, i.e. the primes of bad reduction for
/// z^d + c. Factorization failures (oversized cofactors) propagate.
pub fn denominator_support(c: &Rational) -> Result<Vec<u64>> {
    if c.denom().is_one() {
        return Ok(Vec::new());
    }
    let f = factor(c.denom().magnitude())?;
    Ok(f.into_keys().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn val_examples() {
        assert_eq!(r("1/3").val(3).unwrap(), -1);
        assert_eq!(r("12").val(2).unwrap(), 2);
        assert_eq!(r("7/10").val(5).unwrap(), -1);
        assert!(Rational::zero().val(5).is_err());
    }

    #[test]
    fn naive_local_height_examples() {
        let h = naive_local_height(&r("1/3"), &Place::Finite(3), 96);
        let ln3 = ln_int(&BigInt::from(3), 96).unwrap();
        assert!(h.intersects(&ln3));
        let z = naive_local_height(&r("5"), &Place::Finite(7), 96);
        assert_eq!(z, CertInterval::zero());
        let a = naive_local_height(&r("3"), &Place::Archimedean, 96);
        assert!((a.lo_f64() - 1.0986).abs() < 1e-3);
    }

    #[test]
    fn naive_height_examples() {
        assert_eq!(naive_height(&Rational::zero(), 96), CertInterval::zero());
        let h = naive_height(&r("-7/4"), 96);
        assert!(h.intersects(&ln_int(&BigInt::from(7), 96).unwrap()));
        let h = naive_height(&r("3/5"), 96);
        assert!(h.intersects(&ln_int(&BigInt::from(5), 96).unwrap()));
    }

    #[test]
    fn denominator_support_examples() {
        assert!(denominator_support(&r("-2")).unwrap().is_empty());
        assert_eq!(denominator_support(&r("1/3")).unwrap(), vec![3]);
        assert_eq!(denominator_support(&r("5/12")).unwrap(), vec![2, 3]);
    }

    #[test]
    fn place_requires_prime() {
        assert!(Place::finite(7).is_ok());
        assert!(Place::finite(1).is_err());
        assert!(Place::finite(561).is_err());
    }

    #[test]
    fn flexible_parsing() {
        assert_eq!(parse_ratio_flexible("1e-6").unwrap(), r("1/1000000"));
        assert_eq!(parse_ratio_flexible("0.25").unwrap(), r("1/4"));
        assert_eq!(parse_ratio_flexible("2.5e-3").unwrap(), r("1/400"));
        assert_eq!(parse_ratio_flexible("-3/4").unwrap(), r("-3/4"));
        assert_eq!(parse_ratio_flexible("10").unwrap(), r("10"));
        assert!(parse_ratio_flexible("abc").is_err());
    }

    proptest! {
        // |q|_p multiplicativity via valuations.
        #[test]
        fn valuation_is_additive(
            an in 1i64..100_000, ad in 1i64..100_000,
            bn in 1i64..100_000, bd in 1i64..100_000,
            pi in 0usize..4,
        ) {
            let p = [2u64, 3, 5, 7][pi];
            let qa = Rational::new(BigInt::from(an), BigInt::from(ad)).unwrap();
            let qb = Rational::new(BigInt::from(bn), BigInt::from(bd)).unwrap();
            let prod = qa.mul(&qb);
            prop_assert_eq!(
                prod.val(p).unwrap(),
                qa.val(p).unwrap() + qb.val(p).unwrap()
            );
        }

        // Product formula: sum_p v_p(q) log p = log |q|, checked exactly as
        // integer exponent bookkeeping (the factorizations recombine).
        #[test]
        fn product_formula_exact(n in 1u64..1_000_000, d in 1u64..1_000_000) {
            let q = Rational::new(BigInt::from(n), BigInt::from(d)).unwrap();
            let mut recombined = BigRational::one();
            for (p, _) in factor(q.numer().magnitude()).unwrap().iter().chain(
                factor(q.denom().magnitude()).unwrap().iter(),
            ) {
                let v = q.val(*p).unwrap();
                let pq = BigRational::from(BigInt::from(*p));
                if v >= 0 {
                    for _ in 0..v { recombined *= &pq; }
                } else {
                    for _ in 0..(-v) { recombined /= &pq; }
                }
            }
            // Dividing out every prime contribution leaves exactly +-1.
            let leftover = q.as_ratio() / &recombined;
            prop_assert!(leftover.abs().is_one());
        }

        // naive_height(q) = sum over places of naive_local_height(q, v),
        // verified as interval containment of the exact identity.
        #[test]
        fn height_decomposes_over_places(n in -10_000i64..10_000, d in 1i64..10_000) {
            prop_assume!(n != 0);
            let q = Rational::new(BigInt::from(n), BigInt::from(d)).unwrap();
            let prec = 128;
            let mut sum = naive_local_height(&q, &Place::Archimedean, prec);
            let mut primes = factor(q.numer().magnitude()).unwrap();
            primes.extend(factor(q.denom().magnitude()).unwrap());
            for p in primes.keys() {
                sum = sum.add(&naive_local_height(&q, &Place::Finite(*p), prec), prec);
            }
            prop_assert!(sum.intersects(&naive_height(&q, prec)));
        }
    }
}
