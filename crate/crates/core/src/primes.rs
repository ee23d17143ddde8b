//! Deterministic primality and integer factorization.
//!
//! Primality for `n < 2^64` uses Miller-Rabin with the fixed base set
//! {2,...,37}, which is deterministic for n < 3.3e24. Factorization runs
//! trial division, then Brent's variant of Pollard rho with a deterministic
//! parameter sequence. Cofactors of more than 96 bits (or ones rho cannot
//! split down to certifiable sub-2^64 primes) are reported as errors rather
//! than accepted probabilistically.

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::sync::OnceLock;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all of u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'bases: for &a in &MR_BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let limit = 10_000usize;
        let mut sieve = vec![true; limit + 1];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..=limit {
            if sieve[i] {
                for j in (i * i..=limit).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        (2..=limit).filter(|&i| sieve[i]).map(|i| i as u64).collect()
    })
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's cycle variant of Pollard rho. Returns a nontrivial factor of a
/// composite odd n, trying f(x) = x^2 + c for c = 1, 2, ...
fn brent_rho_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime_u64(n));
    for c in 1u64..64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut y: u64 = 2;
        let mut g: u64 = 1;
        let mut q: u64 = 1;
        let mut x = y;
        let mut ys = y;
        let mut r: u64 = 1;
        let m: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r <<= 1;
            if r > (1 << 24) {
                break;
            }
        }
        if g == n {
            // Backtrack one step at a time.
            g = 1;
            while g == 1 {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
            }
        }
        if g != n && g != 1 {
            return g;
        }
    }
    unreachable!("rho exhausted its parameter sequence on a u64 composite")
}

fn factor_u64_into(n: u64, out: &mut BTreeMap<u64, u32>) {
    if n <= 1 {
        return;
    }
    if is_prime_u64(n) {
        *out.entry(n).or_insert(0) += 1;
        return;
    }
    let d = brent_rho_u64(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Brent rho over BigUint for 64..96-bit cofactors, with an iteration cap.
fn brent_rho_big(n: &BigUint) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u32..32 {
        let cb = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cb) % n;
        let mut y = BigUint::from(2u32);
        let mut g = one.clone();
        let mut q = one.clone();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut r: u64 = 1;
        let m: u64 = 128;
        let mut spent: u64 = 0;
        while g == one && spent < (1 << 22) {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            spent += r;
            r <<= 1;
        }
        if g == one {
            continue;
        }
        if &g == n {
            g = one.clone();
            while g == one {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
            }
        }
        if &g != n && g != one {
            return Some(g);
        }
    }
    None
}

fn factor_cofactor(n: BigUint, out: &mut BTreeMap<u64, u32>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        factor_u64_into(small, out);
        return Ok(());
    }
    let bits = n.bits();
    if bits > 96 {
        return Err(Error::UnfactoredCofactor { bits });
    }
    // 64..96 bits: the only acceptable outcome is a split into certifiable
    // pieces; a prime this large cannot be certified deterministically here.
    match brent_rho_big(&n) {
        Some(d) => {
            let q = &n / &d;
            factor_cofactor(d, out)?;
            factor_cofactor(q, out)
        }
        None => Err(Error::UnfactoredCofactor { bits }),
    }
}

/// Full factorization of a positive integer into prime powers.
pub fn factor(n: &BigUint) -> Result<BTreeMap<u64, u32>> {
    if n.is_zero() {
        return Err(Error::domain("factorization of zero"));
    }
    let mut out = BTreeMap::new();
    let mut rest = n.clone();
    for &p in small_primes() {
        if rest.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        loop {
            let (q, r) = rest.div_rem(&pb);
            if r.is_zero() {
                *out.entry(p).or_insert(0) += 1;
                rest = q;
            } else {
                break;
            }
        }
    }
    factor_cofactor(rest, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small_and_carmichael() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(1_373_653));
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(18_446_744_073_709_551_615));
    }

    #[test]
    fn factors_recombine() {
        for n in [1u64, 2, 12, 97, 360, 1 << 40, 600_851_475_143, 99_999_999_977] {
            let f = factor(&BigUint::from(n)).unwrap();
            let mut prod = BigUint::one();
            for (&p, &e) in &f {
                assert!(is_prime_u64(p));
                prod *= BigUint::from(p).pow(e);
            }
            assert_eq!(prod, BigUint::from(n));
        }
    }

    #[test]
    fn factors_semiprime_above_u32() {
        // Two 40-bit primes.
        let p = 1_099_511_627_791u64;
        let q = 1_099_511_627_873u64;
        let n = BigUint::from(p) * BigUint::from(q);
        let f = factor(&n).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[&p], 1);
        assert_eq!(f[&q], 1);
    }

    #[test]
    fn oversized_cofactor_is_an_error() {
        // A 127-bit Mersenne prime: trial division leaves a >96-bit cofactor.
        let m127 = (BigUint::one() << 127) - BigUint::one();
        match factor(&m127) {
            Err(Error::UnfactoredCofactor { bits }) => assert!(bits > 96),
            other => panic!("expected UnfactoredCofactor, got {other:?}"),
        }
    }
}
