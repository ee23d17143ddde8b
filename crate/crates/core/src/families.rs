//! The two explicit preperiodic families for z^2 + c and the complete
//! classification of preperiodic points for integral c.
//!
//! Fixed family: c = (1-m^2)/4 with m odd; (1+-m)/2 are fixed and their
//! negatives map onto them. Two-cycle family: c = -(m^2+3)/4 with m odd;
//! {(m-1)/2, -(m+1)/2} is a 2-cycle entered from (m+1)/2 and -(m-1)/2.
//! Catalogs are closed under rational preimages, so preimage tails (like
//! 0 -> -2 -> 2 at c = -2) are listed too.

use crate::dynamics::{step, MapParams};
use crate::error::{Error, Result};
use crate::rational::Rational;
use num_traits::Signed;
use std::collections::{BTreeSet, HashMap};

/// Which family a parameter c belongs to, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyTag {
    FixedFamily { m: u64 },
    TwoCycleFamily { m: u64 },
    NoneMatch,
}

/// One preperiodic point with its measured tail length and period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogPoint {
    pub point: Rational,
    pub tail: u32,
    pub period: u32,
}

/// Every rational preperiodic point of z^2 + c for one integral c.
#[derive(Clone, Debug)]
pub struct PreperiodicCatalog {
    pub c: i64,
    pub points: Vec<CatalogPoint>,
    pub family_tag: FamilyTag,
}

impl PreperiodicCatalog {
    pub fn contains(&self, alpha: &Rational) -> bool {
        self.points.iter().any(|p| &p.point == alpha)
    }

    pub fn point_set(&self) -> BTreeSet<Rational> {
        self.points.iter().map(|p| p.point.clone()).collect()
    }
}

fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i64;
    for cand in r.saturating_sub(2)..=r + 2 {
        if cand >= 0 && cand * cand == n {
            return Some(cand);
        }
    }
    None
}

/// Family tag from the discriminant conditions: fixed iff 1-4c is an odd
/// perfect square, two-cycle iff -3-4c is (never both).
fn family_tag_for(c: i64) -> FamilyTag {
    if let Some(m) = exact_sqrt(1 - 4 * c) {
        if m % 2 == 1 {
            return FamilyTag::FixedFamily { m: m as u64 };
        }
    }
    if let Some(m) = exact_sqrt(-3 - 4 * c) {
        if m % 2 == 1 {
            return FamilyTag::TwoCycleFamily { m: m as u64 };
        }
    }
    FamilyTag::NoneMatch
}

/// Tail and period of a preperiodic integer point by exact iteration.
/// Returns None if the orbit escapes instead (an integer iterate with
/// |z| > |c|+1 grows strictly forever).
fn tail_period(alpha: &Rational, params: &MapParams, c_abs: i64) -> Option<(u32, u32)> {
    let mut seen: HashMap<Rational, u32> = HashMap::new();
    let mut z = alpha.clone();
    let mut k: u32 = 0;
    loop {
        if let Some(&i) = seen.get(&z) {
            return Some((i, k - i));
        }
        if !z.is_integer()
            || z.numer().magnitude().bits() > 64
            || z.numer().abs() > num_bigint::BigInt::from(c_abs + 1)
        {
            return None;
        }
        seen.insert(z.clone(), k);
        z = step(&z, params);
        k += 1;
    }
}

/// Closes a seed set under exact rational preimages and records tails.
fn catalog_from_seeds(c: i64, seeds: Vec<i64>, tag: FamilyTag) -> PreperiodicCatalog {
    let params = MapParams::new(Rational::from_int(c), 2).unwrap();
    let mut set: BTreeSet<i64> = BTreeSet::new();
    let mut queue: Vec<i64> = seeds;
    while let Some(y) = queue.pop() {
        if !set.insert(y) {
            continue;
        }
        // Preimages of y: z^2 = y - c; rational solutions are integers here.
        if let Some(r) = exact_sqrt(y - c) {
            for z in [r, -r] {
                if !set.contains(&z) {
                    queue.push(z);
                }
            }
        }
    }
    let mut points = Vec::new();
    for v in set {
        let q = Rational::from_int(v);
        let (tail, period) =
            tail_period(&q, &params, c.abs()).expect("family points are preperiodic");
        points.push(CatalogPoint {
            point: q,
            tail,
            period,
        });
    }
    PreperiodicCatalog {
        c,
        points,
        family_tag: tag,
    }
}

fn require_odd(m: u64) -> Result<i64> {
    if m % 2 == 0 || m == 0 {
        return Err(Error::domain("family parameter m must be odd and >= 1"));
    }
    i64::try_from(m).map_err(|_| Error::domain("family parameter m too large"))
}

/// Fixed-point family: c = (1-m^2)/4, m odd.
pub fn family_fixed(m: u64) -> Result<PreperiodicCatalog> {
    let m = require_odd(m)?;
    let c = (1 - m * m) / 4;
    let seeds = vec![(1 + m) / 2, (1 - m) / 2, -(1 + m) / 2, -(1 - m) / 2];
    Ok(catalog_from_seeds(
        c,
        seeds,
        FamilyTag::FixedFamily { m: m as u64 },
    ))
}

/// Two-cycle family: c = -(m^2+3)/4, m odd.
pub fn family_two_cycle(m: u64) -> Result<PreperiodicCatalog> {
    let m = require_odd(m)?;
    let c = -(m * m + 3) / 4;
    let seeds = vec![(1 + m) / 2, (1 - m) / 2, -(1 + m) / 2, -(1 - m) / 2];
    Ok(catalog_from_seeds(
        c,
        seeds,
        FamilyTag::TwoCycleFamily { m: m as u64 },
    ))
}

/// Exhaustive classification for d = 2, integral c: scans every integer
/// candidate |alpha| <= |c|+1 (a larger integer iterate strictly escapes,
/// and non-integers cannot be preperiodic for integral c).
pub fn classify_integer_preperiodic(c: i64) -> PreperiodicCatalog {
    let params = MapParams::new(Rational::from_int(c), 2).unwrap();
    let bound = c.abs() + 1;
    let mut points = Vec::new();
    for a in -bound..=bound {
        let q = Rational::from_int(a);
        if let Some((tail, period)) = tail_period(&q, &params, c.abs()) {
            points.push(CatalogPoint {
                point: q,
                tail,
                period,
            });
        }
    }
    points.sort_by(|a, b| a.point.cmp(&b.point));
    PreperiodicCatalog {
        c,
        points,
        family_tag: family_tag_for(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{decide_preperiodic_default, OrbitVerdict};
    use num_traits::ToPrimitive;

    fn pts(cat: &PreperiodicCatalog) -> Vec<i64> {
        cat.points
            .iter()
            .map(|p| p.point.numer().to_i64().unwrap())
            .collect()
    }

    #[test]
    fn family_fixed_examples() {
        let f3 = family_fixed(3).unwrap();
        assert_eq!(f3.c, -2);
        assert_eq!(pts(&f3), vec![-2, -1, 0, 1, 2]);
        let fixed: Vec<i64> = f3
            .points
            .iter()
            .filter(|p| p.period == 1 && p.tail == 0)
            .map(|p| p.point.numer().to_i64().unwrap())
            .collect();
        assert_eq!(fixed, vec![-1, 2]);

        let f1 = family_fixed(1).unwrap();
        assert_eq!(f1.c, 0);
        assert_eq!(pts(&f1), vec![-1, 0, 1]);

        let f5 = family_fixed(5).unwrap();
        assert_eq!(f5.c, -6);
        for v in [3i64, -2] {
            let p = f5
                .points
                .iter()
                .find(|p| p.point == Rational::from_int(v))
                .unwrap();
            assert_eq!((p.tail, p.period), (0, 1));
        }
        assert!(family_fixed(4).is_err());
    }

    #[test]
    fn family_two_cycle_examples() {
        let f1 = family_two_cycle(1).unwrap();
        assert_eq!(f1.c, -1);
        assert_eq!(pts(&f1), vec![-1, 0, 1]);
        let cycle: Vec<i64> = f1
            .points
            .iter()
            .filter(|p| p.period == 2 && p.tail == 0)
            .map(|p| p.point.numer().to_i64().unwrap())
            .collect();
        assert_eq!(cycle, vec![-1, 0]);

        let f3 = family_two_cycle(3).unwrap();
        assert_eq!(f3.c, -3);
        // Cycle {1, -2}, entered from 2 and -1.
        let cyc: Vec<i64> = f3
            .points
            .iter()
            .filter(|p| p.period == 2 && p.tail == 0)
            .map(|p| p.point.numer().to_i64().unwrap())
            .collect();
        assert_eq!(cyc, vec![-2, 1]);
        assert!(f3.contains(&Rational::from_int(2)));
        assert!(f3.contains(&Rational::from_int(-1)));
        assert!(family_two_cycle(2).is_err());
    }

    #[test]
    fn family_points_reverify_as_preperiodic() {
        for m in (1..=21).step_by(2) {
            for cat in [family_fixed(m).unwrap(), family_two_cycle(m).unwrap()] {
                let params = MapParams::new(Rational::from_int(cat.c), 2).unwrap();
                for p in &cat.points {
                    match decide_preperiodic_default(&p.point, &params).unwrap() {
                        OrbitVerdict::Preperiodic { .. } => {}
                        other => panic!("{} at c={} not preperiodic: {other:?}", p.point, cat.c),
                    }
                }
            }
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(pts(&classify_integer_preperiodic(-2)), vec![-2, -1, 0, 1, 2]);
        assert!(classify_integer_preperiodic(1).points.is_empty());
        assert_eq!(pts(&classify_integer_preperiodic(-1)), vec![-1, 0, 1]);
        // 0 -> -2 -> 2 at c = -2: tail length 2 is recorded as found.
        let cat = classify_integer_preperiodic(-2);
        let zero = cat.points.iter().find(|p| p.point.is_zero()).unwrap();
        assert_eq!((zero.tail, zero.period), (2, 1));
    }

    #[test]
    fn classify_tags() {
        assert_eq!(
            classify_integer_preperiodic(-2).family_tag,
            FamilyTag::FixedFamily { m: 3 }
        );
        assert_eq!(
            classify_integer_preperiodic(-1).family_tag,
            FamilyTag::TwoCycleFamily { m: 1 }
        );
        assert_eq!(
            classify_integer_preperiodic(-4).family_tag,
            FamilyTag::NoneMatch
        );
        assert!(classify_integer_preperiodic(-4).points.is_empty());
        assert_eq!(
            classify_integer_preperiodic(0).family_tag,
            FamilyTag::FixedFamily { m: 1 }
        );
    }

    #[test]
    fn families_embed_in_classification() {
        for m in (1..=33).step_by(2) {
            let f = family_fixed(m).unwrap();
            let cat = classify_integer_preperiodic(f.c);
            assert_eq!(f.point_set(), cat.point_set(), "fixed family m={m}");
            let t = family_two_cycle(m).unwrap();
            let cat = classify_integer_preperiodic(t.c);
            assert_eq!(t.point_set(), cat.point_set(), "two-cycle family m={m}");
        }
    }

    #[test]
    fn period_at_most_two_for_negative_c() {
        for c in -40..=-1 {
            for p in classify_integer_preperiodic(c).points {
                assert!(p.period <= 2, "c={c} point {} period {}", p.point, p.period);
            }
        }
    }
}
