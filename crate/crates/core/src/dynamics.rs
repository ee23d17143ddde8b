//! Exact forward dynamics of z^d + c over Q.

use crate::error::{Error, Result};
use crate::interval::{ln2, CertInterval};
use crate::rational::{denominator_support, naive_local_height, Place, Rational};
use num_traits::{Signed, ToPrimitive};
use std::collections::HashMap;
use std::fmt;

/// Per-orbit cap on the bit size of an exact iterate. Orbit digits double
/// every step once the point escapes, so this bounds exact work.
const ORBIT_BIT_LIMIT: u64 = 1 << 21;

/// The map z^d + c together with the exponent m from the theory
/// (m = 2 when d = 2, m = 1 otherwise).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapParams {
    pub c: Rational,
    pub d: u32,
    pub m_exponent: u32,
}

impl MapParams {
    pub fn new(c: Rational, d: u32) -> Result<MapParams> {
        if d < 2 {
            return Err(Error::domain("degree d must be at least 2"));
        }
        Ok(MapParams {
            c,
            d,
            m_exponent: if d == 2 { 2 } else { 1 },
        })
    }
}

/// One exact step: alpha^d + c in lowest terms.
pub fn step(alpha: &Rational, params: &MapParams) -> Rational {
    Rational::from_ratio(alpha.as_ratio().pow(params.d as i32) + params.c.as_ratio())
}

/// The exact orbit `[alpha, phi(alpha), ..., phi^n(alpha)]`.
pub fn orbit(alpha: &Rational, params: &MapParams, n: u32) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(alpha.clone());
    for _ in 0..n {
        let next = step(out.last().unwrap(), params);
        if next.bit_size() > ORBIT_BIT_LIMIT {
            return Err(Error::resource(format!(
                "orbit iterate exceeds {ORBIT_BIT_LIMIT} bits; values grow like d^n digits"
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// Membership in the basin B_v (strictly large local height), its boundary
/// R_v (finite places only), or below. The archimedean test is certified by
/// intervals and reports `Unknown` instead of guessing near the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasinClass {
    Inside,
    Boundary,
    Below,
    Unknown,
}

/// Finite-place test, exact: compares d*max(-v(alpha),0) with max(-v(c),0).
pub fn basin_test_finite(alpha: &Rational, params: &MapParams, p: u64) -> BasinClass {
    let lam_a: i64 = if alpha.is_zero() {
        0
    } else {
        (-alpha.val(p).expect("nonzero")).max(0)
    };
    let lam_c: i64 = if params.c.is_zero() {
        0
    } else {
        (-params.c.val(p).expect("nonzero")).max(0)
    };
    match (params.d as i64 * lam_a).cmp(&lam_c) {
        std::cmp::Ordering::Greater => BasinClass::Inside,
        std::cmp::Ordering::Equal => BasinClass::Boundary,
        std::cmp::Ordering::Less => BasinClass::Below,
    }
}

/// Certified archimedean test against lambda(alpha) > lambda(c)/d + log 2.
pub fn basin_test_arch(alpha: &Rational, params: &MapParams, prec: u32) -> BasinClass {
    let lam_a = naive_local_height(alpha, &Place::Archimedean, prec);
    let lam_c = naive_local_height(&params.c, &Place::Archimedean, prec);
    let rhs = lam_c
        .div_uint(&num_bigint::BigInt::from(params.d), prec)
        .add(&ln2(prec), prec);
    if lam_a.gt_certain(&rhs) {
        BasinClass::Inside
    } else if lam_a.lt_certain(&rhs) {
        BasinClass::Below
    } else {
        BasinClass::Unknown
    }
}

/// Basin test at any place. Finite places get the exact trichotomy;
/// the archimedean place never reports `Boundary`.
pub fn basin_test(alpha: &Rational, params: &MapParams, v: &Place, prec: u32) -> BasinClass {
    match v {
        Place::Finite(p) => basin_test_finite(alpha, params, *p),
        Place::Archimedean => basin_test_arch(alpha, params, prec),
    }
}

/// Why a point is wandering, when we can say so without height computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WanderingCert {
    /// The necessary condition d*v_p(alpha) = v_p(c) fails at p.
    NonIntegral { p: u64 },
    /// v_p(c) < 0 with d not dividing it: the map has no preperiodic
    /// points over Q at all.
    TypeIObstruction { p: u64 },
    /// phi^k(alpha) certified inside B_v at the archimedean place and every
    /// bad finite place simultaneously; heights grow strictly from there.
    BasinEscape { k: u32, place: Place },
}

/// Preperiodicity decision with a re-checkable witness or certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitVerdict {
    Preperiodic { i: u32, j: u32 },
    Wandering(WanderingCert),
    Undecided { budget: u64 },
}

impl fmt::Display for OrbitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitVerdict::Preperiodic { i, j } => {
                write!(f, "preperiodic: phi^{i}(alpha) = phi^{j}(alpha)")
            }
            OrbitVerdict::Wandering(WanderingCert::NonIntegral { p }) => {
                write!(f, "wandering: d*v_{p}(alpha) != v_{p}(c)")
            }
            OrbitVerdict::Wandering(WanderingCert::TypeIObstruction { p }) => {
                write!(f, "wandering: Type I reduction at {p} forbids preperiodic points")
            }
            OrbitVerdict::Wandering(WanderingCert::BasinEscape { k, place }) => {
                write!(f, "wandering: phi^{k}(alpha) escapes into B_v (witness place {place})")
            }
            OrbitVerdict::Undecided { budget } => write!(f, "undecided after {budget} steps"),
        }
    }
}

/// Default step budget: for integral c an escape-or-repeat happens within
/// 2|c|+3 steps, so 4|c|+16 has slack; non-integral c gets a flat default.
pub fn default_budget(params: &MapParams) -> u64 {
    if params.c.is_integer() {
        params
            .c
            .numer()
            .abs()
            .to_u64()
            .map(|a| (4 * a + 16).min(10_000_000))
            .unwrap_or(10_000_000)
    } else {
        64
    }
}

/// Decides preperiodicity of `alpha` under z^d + c.
///
/// Fast obstructions first (Type I primes; the valuation condition
/// lambda_p(alpha) = lambda_p(c)/d which every preperiodic point satisfies),
/// then exact iteration with a hash of visited points. An exact repeat is a
/// preperiodic witness; a simultaneous certified basin membership at the
/// archimedean place and every bad prime is a wandering certificate. Only a
/// budget exhaustion (impossible for integral c) yields `Undecided`.
pub fn decide_preperiodic(
    alpha: &Rational,
    params: &MapParams,
    budget: u64,
) -> Result<OrbitVerdict> {
    if budget == 0 {
        return Err(Error::domain("budget must be at least 1"));
    }
    let bad = denominator_support(&params.c)?;
    for &p in &bad {
        let vc = params.c.val(p).expect("bad prime implies c nonzero");
        if vc.rem_euclid(params.d as i64) != 0 {
            return Ok(OrbitVerdict::Wandering(WanderingCert::TypeIObstruction {
                p,
            }));
        }
    }
    // Necessary condition at every finite place: lambda_p(alpha) must equal
    // lambda_p(c)/d. Only alpha's denominator primes and the bad primes can
    // break it.
    if !alpha.is_zero() {
        for &p in denominator_support(alpha)?.iter() {
            if basin_test_finite(alpha, params, p) != BasinClass::Boundary {
                return Ok(OrbitVerdict::Wandering(WanderingCert::NonIntegral { p }));
            }
        }
    }
    for &p in &bad {
        if basin_test_finite(alpha, params, p) != BasinClass::Boundary {
            return Ok(OrbitVerdict::Wandering(WanderingCert::NonIntegral { p }));
        }
    }

    let mut seen: HashMap<Rational, u32> = HashMap::new();
    let mut z = alpha.clone();
    let mut arch_prec: u32 = 96;
    for k in 0..=budget {
        if let Some(&i) = seen.get(&z) {
            return Ok(OrbitVerdict::Preperiodic {
                i,
                j: k.try_into().expect("repeat index fits u32"),
            });
        }
        let ku32: u32 = match k.try_into() {
            Ok(v) => v,
            Err(_) => return Ok(OrbitVerdict::Undecided { budget: k }),
        };
        seen.insert(z.clone(), ku32);

        let mut escaped = basin_test_arch(&z, params, arch_prec) == BasinClass::Inside;
        if !escaped && z.bit_size() > 64 {
            // Large iterates are far from the threshold; one retry at higher
            // precision settles Unknowns that matter.
            arch_prec = arch_prec.max(192);
            escaped = basin_test_arch(&z, params, arch_prec) == BasinClass::Inside;
        }
        if escaped
            && bad
                .iter()
                .all(|&p| basin_test_finite(&z, params, p) == BasinClass::Inside)
        {
            return Ok(OrbitVerdict::Wandering(WanderingCert::BasinEscape {
                k: ku32,
                place: Place::Archimedean,
            }));
        }

        let next = step(&z, params);
        if next.bit_size() > ORBIT_BIT_LIMIT {
            return Ok(OrbitVerdict::Undecided { budget: k });
        }
        z = next;
    }
    Ok(OrbitVerdict::Undecided { budget })
}

/// Decides with the default budget.
pub fn decide_preperiodic_default(alpha: &Rational, params: &MapParams) -> Result<OrbitVerdict> {
    decide_preperiodic(alpha, params, default_budget(params))
}

/// Enclosure of lambda_inf = max(log|z|, 0) for an interval iterate.
/// Zero-straddling intervals get a sound [0, ...] enclosure.
pub fn lambda_arch_of_interval(z: &CertInterval, prec: u32) -> CertInterval {
    let a = z.abs();
    if !a.hi().is_positive() {
        return CertInterval::zero();
    }
    let hi_ln = crate::interval::ln_dyadic(a.hi(), prec);
    let hi = hi_ln.hi().clone().max(crate::dyadic::Dyadic::zero());
    let lo = if a.lo().is_positive() {
        crate::interval::ln_dyadic(a.lo(), prec)
            .lo()
            .clone()
            .max(crate::dyadic::Dyadic::zero())
    } else {
        crate::dyadic::Dyadic::zero()
    };
    CertInterval::new(lo, hi)
}
