//! Reduction types and certified local canonical heights.
//!
//! At a finite place the basin trichotomy is exact integer arithmetic on
//! valuations, so local heights come out either exactly (basin entry, or a
//! step strictly below the boundary) or with a tail bound from lingering on
//! the boundary R_p. At the archimedean place the orbit is iterated in
//! interval arithmetic; a certified basin entry gives the telescoped
//! remainder enclosure, and otherwise a uniform one-step estimate
//! |lambda(phi(x)) - d lambda(x)| <= lambda(c) + log 2 telescopes into a
//! tail valid for every real orbit.

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::interval::{ln2, ln_int, CertInterval};
use crate::padic::{PadicElem, PadicStep};
use crate::rational::{naive_local_height, Place, Rational};
use crate::dynamics::{lambda_arch_of_interval, step, MapParams};
use num_bigint::BigInt;
use num_rational::BigRational;

use std::cmp::Ordering;

/// Good: v(c) >= 0. Type I: v(c) < 0, d does not divide v(c).
/// Type II: v(c) < 0, d | v(c).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionType {
    Good,
    TypeI,
    TypeII,
}

impl std::fmt::Display for ReductionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReductionType::Good => write!(f, "Good"),
            ReductionType::TypeI => write!(f, "TypeI"),
            ReductionType::TypeII => write!(f, "TypeII"),
        }
    }
}

pub fn classify_reduction(c: &Rational, p: u64, d: u32) -> ReductionType {
    if c.is_zero() {
        return ReductionType::Good;
    }
    let v = c.val(p).expect("nonzero");
    if v >= 0 {
        ReductionType::Good
    } else if v.rem_euclid(d as i64) == 0 {
        ReductionType::TypeII
    } else {
        ReductionType::TypeI
    }
}

/// Whether a local height value is exact (up to outward rounding of logs)
/// or carries an unresolved orbit tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    TailBounded { steps: u32 },
}

/// A certified local canonical height at one place.
#[derive(Clone, Debug)]
pub struct LocalHeight {
    pub place: Place,
    pub value: CertInterval,
    pub exactness: Exactness,
}

const PADIC_SWITCH_BITS: u64 = 1 << 13;
const PADIC_DIGIT_CAP: u32 = 1 << 14;

/// lambda-hat at a finite place, to enclosure width <= eps.
pub fn local_height_nonarch(
    alpha: &Rational,
    params: &MapParams,
    p: u64,
    eps: &Rational,
) -> Result<LocalHeight> {
    check_eps(eps)?;
    let prec = crate::interval::default_prec_bits().max(eps_bits(eps) + 32);
    let d = params.d;
    let lam_c_units: i64 = if params.c.is_zero() {
        0
    } else {
        (-params.c.val(p)?).max(0)
    };
    let ln_p = ln_int(&BigInt::from(p), prec)?;

    let lam_units = |z: &Rational| -> i64 {
        if z.is_zero() {
            0
        } else {
            (-z.val(p).expect("nonzero")).max(0)
        }
    };

    if lam_c_units == 0 {
        // Good reduction (in the lambda sense): integral points have local
        // height exactly 0; non-integral points sit in B_p from step 0.
        let u = lam_units(alpha);
        let value = if u == 0 {
            CertInterval::zero()
        } else {
            ln_p.mul_int(&BigInt::from(u), prec)
        };
        return Ok(LocalHeight {
            place: Place::Finite(p),
            value,
            exactness: Exactness::Exact,
        });
    }

    // Bad place. K = smallest k with lambda_p(c)/d^k <= eps.
    let lam_c = ln_p.mul_int(&BigInt::from(lam_c_units), prec);
    let mut pow_dk = BigInt::from(1);
    let d_big = BigInt::from(d);
    let mut cap_k: u32 = 0;
    while !lam_c
        .div_uint(&pow_dk, prec)
        .hi()
        .cmp_ratio(eps.as_ratio())
        .is_le()
    {
        pow_dk *= &d_big;
        cap_k += 1;
        if cap_k > 1_000_000 {
            return Err(Error::resource("nonarchimedean tail cutoff too deep"));
        }
    }
    let cap_k = cap_k; // orbit must stay on R_p through this many steps

    let exact_at = |units: i64, k: u32| -> LocalHeight {
        let dk = d_big.pow(k);
        LocalHeight {
            place: Place::Finite(p),
            value: ln_p.mul_int(&BigInt::from(units), prec).div_uint(&dk, prec),
            exactness: Exactness::Exact,
        }
    };

    // Exact phase: rational iteration while digits stay affordable.
    let mut z = alpha.clone();
    let mut k: u32 = 0;
    loop {
        let u = lam_units(&z);
        match (d as i64 * u).cmp(&lam_c_units) {
            Ordering::Greater => return Ok(exact_at(u, k)),
            Ordering::Less => {
                // Strictly below R_p: the next iterate has lambda = lambda(c)
                // and lives in B_p, so everything is exact from here.
                return Ok(exact_at(lam_c_units, k + 1));
            }
            Ordering::Equal => {}
        }
        if k == cap_k {
            // Stayed on R_p long enough: lambda-hat in [0, lambda(c)/d^(K+1)].
            let tail = lam_c.div_uint(&d_big.pow(cap_k + 1), prec);
            return Ok(LocalHeight {
                place: Place::Finite(p),
                value: CertInterval::new(Dyadic::zero(), tail.hi().clone()),
                exactness: Exactness::TailBounded { steps: cap_k },
            });
        }
        if z.bit_size() > PADIC_SWITCH_BITS {
            return nonarch_padic_phase(&z, params, p, k, cap_k, lam_c_units, &lam_c, &ln_p, prec);
        }
        z = step(&z, params);
        k += 1;
    }
}

/// Truncated p-adic continuation once exact digits get too large.
#[allow(clippy::too_many_arguments)]
fn nonarch_padic_phase(
    z_start: &Rational,
    params: &MapParams,
    p: u64,
    k_start: u32,
    cap_k: u32,
    lam_c_units: i64,
    lam_c: &CertInterval,
    ln_p: &CertInterval,
    prec: u32,
) -> Result<LocalHeight> {
    let d = params.d;
    let d_big = BigInt::from(d);
    let vc = params.c.val(p)?;
    let mut digits: u32 = 8u32.max(4 * vc.unsigned_abs() as u32 + 8);
    'retry: loop {
        if digits > PADIC_DIGIT_CAP {
            return Err(Error::resource(format!(
                "p-adic cancellation at p={p} exceeded {PADIC_DIGIT_CAP} digits"
            )));
        }
        let c_p = PadicElem::from_rational(&params.c, p, digits)?;
        let mut w = PadicElem::from_rational(z_start, p, digits)?;
        let mut k = k_start;
        loop {
            let u = (-w.val).max(0);
            match (d as i64 * u).cmp(&lam_c_units) {
                Ordering::Greater => {
                    let dk = d_big.pow(k);
                    return Ok(LocalHeight {
                        place: Place::Finite(p),
                        value: ln_p.mul_int(&BigInt::from(u), prec).div_uint(&dk, prec),
                        exactness: Exactness::Exact,
                    });
                }
                Ordering::Less => {
                    let dk = d_big.pow(k + 1);
                    return Ok(LocalHeight {
                        place: Place::Finite(p),
                        value: ln_p
                            .mul_int(&BigInt::from(lam_c_units), prec)
                            .div_uint(&dk, prec),
                        exactness: Exactness::Exact,
                    });
                }
                Ordering::Equal => {}
            }
            if k == cap_k {
                let tail = lam_c.div_uint(&d_big.pow(cap_k + 1), prec);
                return Ok(LocalHeight {
                    place: Place::Finite(p),
                    value: CertInterval::new(Dyadic::zero(), tail.hi().clone()),
                    exactness: Exactness::TailBounded { steps: cap_k },
                });
            }
            match w.step(d, &c_p) {
                PadicStep::Ok(next) => {
                    w = next;
                    k += 1;
                }
                PadicStep::PrecisionExhausted => {
                    digits *= 2;
                    continue 'retry;
                }
            }
        }
    }
}

/// Interval orbit of the archimedean embedding. Returns the final iterate
/// and the first step at which basin membership was certified, if any.
pub(crate) fn arch_orbit_interval(
    alpha: &Rational,
    params: &MapParams,
    steps: u32,
    prec: u32,
) -> (CertInterval, Option<u32>) {
    // Inside B_inf  <=>  |z|^d > max(|c|,1) * 2^d, tested on the power we
    // compute anyway.
    let threshold = params
        .c
        .abs()
        .to_interval(prec)
        .max(&CertInterval::from_int(1))
        .mul_pow2(params.d as i64);
    let c_int = params.c.to_interval(prec);
    let mut z = alpha.to_interval(prec);
    let mut inside_at: Option<u32> = None;
    for k in 0..steps {
        let zd = z.pow_uint(params.d, prec);
        if inside_at.is_none() && zd.abs().lo() > threshold.hi() {
            // Forward invariance of B_inf makes one certificate enough.
            inside_at = Some(k);
        }
        z = zd.add(&c_int, prec);
    }
    (z, inside_at)
}

fn check_eps(eps: &Rational) -> Result<()> {
    if eps.is_zero() || eps.is_negative() {
        return Err(Error::domain("eps must be positive"));
    }
    Ok(())
}

/// Bits needed so rounding noise stays well under eps.
pub(crate) fn eps_bits(eps: &Rational) -> u32 {
    let num_bits = eps.numer().magnitude().bits() as i64;
    let den_bits = eps.denom().magnitude().bits() as i64;
    (den_bits - num_bits + 2).max(0) as u32
}

/// The telescoped in-basin remainder [log(1-2^-d), log(1+2^-d)] / (d-1).
fn in_basin_tail(d: u32, prec: u32) -> CertInterval {
    let one = Dyadic::from_i64(1);
    let lo_arg = one.sub(&Dyadic::pow2(-(d as i64)), u32::MAX, crate::dyadic::Round::Down);
    let hi_arg = one.add(&Dyadic::pow2(-(d as i64)), u32::MAX, crate::dyadic::Round::Up);
    let lo = crate::interval::ln_dyadic(&lo_arg, prec);
    let hi = crate::interval::ln_dyadic(&hi_arg, prec);
    CertInterval::new(lo.lo().clone(), hi.hi().clone())
        .div_uint(&BigInt::from((d - 1).max(1)), prec)
}

/// Uniform archimedean tail: |lambda-hat(x) - lambda(x)| <= (lambda(c)+log 2)/(d-1)
/// for every real x (one-step bound telescoped). For integral c this is the
/// log|2c|/(d-1) estimate.
pub(crate) fn uniform_arch_tail(params: &MapParams, prec: u32) -> CertInterval {
    let lam_c = naive_local_height(&params.c, &Place::Archimedean, prec);
    let u = lam_c
        .add(&ln2(prec), prec)
        .div_uint(&BigInt::from((params.d - 1).max(1)), prec);
    CertInterval::new(u.hi().neg(), u.hi().clone())
}

/// lambda-hat at the archimedean place, to enclosure width <= eps.
pub fn local_height_arch(
    alpha: &Rational,
    params: &MapParams,
    eps: &Rational,
) -> Result<LocalHeight> {
    check_eps(eps)?;
    let d = params.d;
    let d_big = BigInt::from(d);
    let half_eps = Rational::from_ratio(eps.as_ratio() / BigRational::from(BigInt::from(2)));

    let mut prec = crate::interval::default_prec_bits().max(eps_bits(eps) + 64);
    let mut best: Option<CertInterval> = None;
    loop {
        if prec > (1 << 15) {
            return Err(match best {
                Some(b) => Error::ResourceWithEnclosure {
                    msg: "archimedean precision cap reached".into(),
                    best: b,
                },
                None => Error::resource("archimedean precision cap reached"),
            });
        }
        let tail_in = in_basin_tail(d, prec);
        let tail_uniform = uniform_arch_tail(params, prec);
        // Steps until the relevant tail, divided by d^K, is below eps/2.
        let depth = |tail: &CertInterval| -> Result<u32> {
            let w = tail.width();
            let mut k: u32 = 0;
            let mut pow = BigInt::from(1);
            while Dyadic::from_bigint(&pow)
                .mul(&Dyadic::from_bigint(half_eps.numer()), 64, crate::dyadic::Round::Down)
                < w.mul(
                    &Dyadic::from_bigint(half_eps.denom()),
                    64,
                    crate::dyadic::Round::Up,
                )
            {
                pow *= &d_big;
                k += 1;
                if k > 1_000_000 {
                    return Err(Error::resource("archimedean tail cutoff too deep"));
                }
            }
            Ok(k)
        };
        let k_uniform = depth(&tail_uniform)?;
        let k_in = depth(&tail_in)?;

        let (z, inside_at) = arch_orbit_interval(alpha, params, k_uniform.max(k_in), prec);
        // Enclosure from whichever tail applies at the depth we ran to.
        let steps = k_uniform.max(k_in);
        let lam = lambda_arch_of_interval(&z, prec);
        let tail = if inside_at.is_some() { &tail_in } else { &tail_uniform };
        let enclosure = lam
            .add(tail, prec)
            .div_uint(&d_big.pow(steps), prec)
            .max_zero();
        let enclosure = CertInterval::new(
            enclosure.lo().clone(),
            enclosure.hi().clone().max(Dyadic::zero()),
        );
        best = Some(match &best {
            Some(b) => b.intersect(&enclosure).unwrap_or(enclosure.clone()),
            None => enclosure.clone(),
        });
        if best.as_ref().unwrap().width_leq(eps.as_ratio()) {
            return Ok(LocalHeight {
                place: Place::Archimedean,
                value: best.unwrap(),
                exactness: Exactness::TailBounded { steps },
            });
        }
        prec *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn params(c: &str, d: u32) -> MapParams {
        MapParams::new(r(c), d).unwrap()
    }

    fn eps(s: &str) -> Rational {
        crate::rational::parse_ratio_flexible(s).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_reduction(&r("1/3"), 3, 2), ReductionType::TypeI);
        assert_eq!(classify_reduction(&r("1/9"), 3, 2), ReductionType::TypeII);
        assert_eq!(classify_reduction(&r("-2"), 7, 2), ReductionType::Good);
    }

    #[test]
    fn nonarch_basin_entry_is_exact() {
        // v_3(1/3) = -1 < v_3(c)/2 = 0: in B_3 at k = 0.
        let h = local_height_nonarch(&r("1/3"), &params("-2", 2), 3, &eps("1e-9")).unwrap();
        assert_eq!(h.exactness, Exactness::Exact);
        let ln3 = ln_int(&BigInt::from(3), 128).unwrap();
        assert!(h.value.intersects(&ln3));
    }

    #[test]
    fn nonarch_fixed_boundary_point_tail() {
        // 1/2 is fixed under z^2 + 1/4 and sits on R_2 forever.
        let h = local_height_nonarch(&r("1/2"), &params("1/4", 2), 2, &eps("1e-9")).unwrap();
        match h.exactness {
            Exactness::TailBounded { steps } => assert!(steps > 10),
            e => panic!("expected tail bound, got {e:?}"),
        }
        assert!(!h.value.lo().is_negative());
        assert!(h.value.width_leq(eps("1e-9").as_ratio()));
        assert!(h.value.contains_zero());
    }

    #[test]
    fn nonarch_good_reduction_integral_zero() {
        let h = local_height_nonarch(&r("5"), &params("-2", 2), 5, &eps("1e-9")).unwrap();
        assert_eq!(h.exactness, Exactness::Exact);
        assert_eq!(h.value, CertInterval::zero());
    }

    #[test]
    fn nonarch_below_boundary_is_exact() {
        // alpha = 0 at c = 1/4, p = 2: below R_2, so lambda-hat = lambda(c)/d
        // exactly = (2 log 2)/2 = log 2.
        let h = local_height_nonarch(&r("0"), &params("1/4", 2), 2, &eps("1e-9")).unwrap();
        assert_eq!(h.exactness, Exactness::Exact);
        assert!(h.value.intersects(&ln2(128)));
    }

    #[test]
    fn arch_fixed_point_height_zero() {
        let h = local_height_arch(&r("2"), &params("-2", 2), &eps("1e-8")).unwrap();
        assert!(h.value.contains_zero());
        assert!(h.value.width_leq(eps("1e-8").as_ratio()));
    }

    #[test]
    fn arch_chebyshev_point_three() {
        // c = -2 is conjugate to the Chebyshev map: lambda-hat(3) =
        // log((3+sqrt 5)/2) = 0.9624236501192069...
        let h = local_height_arch(&r("3"), &params("-2", 2), &eps("1e-8")).unwrap();
        let mid = h.value.mid().to_f64(crate::dyadic::Round::Down);
        assert!((mid - 0.96242365011920694).abs() < 1e-7, "got {mid}");
    }

    #[test]
    fn arch_julia_interval_point() {
        // 1/2 lies in [-2, 2], the filled Julia set of z^2 - 2.
        let h = local_height_arch(&r("1/2"), &params("-2", 2), &eps("1e-8")).unwrap();
        assert!(h.value.contains_zero());
        assert!(h.value.width_leq(eps("1e-8").as_ratio()));
    }

    #[test]
    fn arch_eq1_when_inside_basin() {
        // Inside B_inf, lambda-hat - lambda lands in the telescoped window.
        let p = params("-2", 2);
        for a in ["3", "4", "7/2"] {
            let alpha = r(a);
            let lam = naive_local_height(&alpha, &Place::Archimedean, 160);
            let lh = local_height_arch(&alpha, &p, &eps("1e-10")).unwrap();
            let diff = lh.value.sub(&lam, 160);
            let window = in_basin_tail(2, 160);
            assert!(
                diff.intersects(&window),
                "{a}: diff {diff} outside window {window}"
            );
        }
    }

    #[test]
    fn nested_refinement() {
        let p = params("-7", 2);
        let coarse = local_height_arch(&r("5/3"), &p, &eps("1e-4")).unwrap();
        let fine = local_height_arch(&r("5/3"), &p, &eps("1e-9")).unwrap();
        assert!(coarse.value.intersects(&fine.value));
        assert!(coarse.value.width() >= fine.value.width());
    }
}
