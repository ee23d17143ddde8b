//! Cross-module invariants that do not fit a single module's unit tests.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unicrit::dynamics::{
    basin_test_arch, decide_preperiodic_default, step, BasinClass, MapParams, OrbitVerdict,
};
use unicrit::dyadic::Round;
use unicrit::families::{classify_integer_preperiodic, family_fixed, family_two_cycle};
use unicrit::global::{canonical_height, canonical_height_place_sum};
use unicrit::interval::{ln2, ln_int, CertInterval};
use unicrit::local::{local_height_arch, local_height_nonarch};
use unicrit::rational::{parse_ratio_flexible, Rational};

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

fn eps(s: &str) -> Rational {
    parse_ratio_flexible(s).unwrap()
}

#[test]
fn height_of_zero_is_height_of_c_over_d() {
    let e = eps("1e-8");
    for (c, d) in [("-7", 2u32), ("5", 3), ("-29", 4), ("3/5", 2), ("-11/4", 2)] {
        let p = MapParams::new(r(c), d).unwrap();
        let h0 = canonical_height(&r("0"), &p, &e).unwrap().total;
        let hc = canonical_height(&r(c), &p, &e).unwrap().total;
        let scaled = hc.div_uint(&BigInt::from(d), 192);
        assert!(
            h0.intersects(&scaled),
            "c={c} d={d}: h-hat(0)={h0} vs h-hat(c)/d={scaled}"
        );
    }
}

#[test]
fn even_degree_sign_symmetry() {
    let e = eps("1e-8");
    for (a, c, d) in [("7/3", "-5", 2u32), ("3/2", "-2", 2), ("5", "11", 4)] {
        let p = MapParams::new(r(c), d).unwrap();
        let plus = canonical_height(&r(a), &p, &e).unwrap().total;
        let minus = canonical_height(&r(a).neg(), &p, &e).unwrap().total;
        assert!(plus.intersects(&minus), "{a} vs -{a} at c={c}");
    }
}

#[test]
fn preperiodic_iff_height_zero_for_integral_c() {
    let tight = eps("1e-9");
    for c in [-6i64, -3, -2, -1, 0, 1, 3] {
        let p = MapParams::new(Rational::from_int(c), 2).unwrap();
        let catalog = classify_integer_preperiodic(c);
        for pt in &catalog.points {
            let h = canonical_height(&pt.point, &p, &tight).unwrap().total;
            assert!(
                h.contains_zero(),
                "catalog point {} at c={c} has h-hat {}",
                pt.point,
                h
            );
        }
        // A few wandering points have certified positive height.
        for a in ["1/2", "5", "-7/3"] {
            let q = r(a);
            if catalog.contains(&q) {
                continue;
            }
            match decide_preperiodic_default(&q, &p).unwrap() {
                OrbitVerdict::Wandering(_) => {
                    let h = canonical_height(&q, &p, &tight).unwrap().total;
                    assert!(
                        h.lo().is_positive(),
                        "wandering {a} at c={c} has enclosure {h} touching 0"
                    );
                }
                other => panic!("{a} at c={c}: expected wandering, got {other:?}"),
            }
        }
    }
}

#[test]
fn local_height_scaling_under_the_map() {
    // lambda-hat(phi(alpha), v) agrees with d * lambda-hat(alpha, v).
    let e = eps("1e-9");
    let cases = [
        ("5/3", "-7", 2u32, None),
        ("7/2", "-2", 2, None),
        ("4/3", "5/9", 2, Some(3u64)),
        ("7/5", "-13", 3, None),
    ];
    for (a, c, d, place_p) in cases {
        let p = MapParams::new(r(c), d).unwrap();
        let alpha = r(a);
        let image = step(&alpha, &p);
        let (h1, h2) = match place_p {
            Some(q) => (
                local_height_nonarch(&alpha, &p, q, &e).unwrap().value,
                local_height_nonarch(&image, &p, q, &e).unwrap().value,
            ),
            None => (
                local_height_arch(&alpha, &p, &e).unwrap().value,
                local_height_arch(&image, &p, &e).unwrap().value,
            ),
        };
        let scaled = h1.mul_int(&BigInt::from(d), 192);
        assert!(
            h2.intersects(&scaled),
            "alpha={a} c={c} d={d} place={place_p:?}: {h2} vs {scaled}"
        );
    }
}

#[test]
fn method_agreement_on_random_integral_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e = eps("1e-6");
    for _ in 0..25 {
        let c = loop {
            let v = rng.gen_range(-40i64..=40);
            if v != 0 {
                break v;
            }
        };
        let a = rng.gen_range(-30i64..=30);
        let b = rng.gen_range(1i64..=30);
        let alpha = Rational::new(BigInt::from(a), BigInt::from(b)).unwrap();
        let p = MapParams::new(Rational::from_int(c), 2).unwrap();
        let sched = canonical_height(&alpha, &p, &e).unwrap().total;
        let psum = canonical_height_place_sum(&alpha, &p, &e).unwrap().total;
        assert!(
            sched.intersects(&psum),
            "alpha={alpha} c={c}: schedule {sched} vs place-sum {psum}"
        );
    }
}

#[test]
fn family_soundness_to_m_99() {
    let tight = eps("1e-9");
    for m in (1..=99u64).step_by(2) {
        for cat in [family_fixed(m).unwrap(), family_two_cycle(m).unwrap()] {
            let p = MapParams::new(Rational::from_int(cat.c), 2).unwrap();
            let full = classify_integer_preperiodic(cat.c);
            assert_eq!(
                cat.point_set(),
                full.point_set(),
                "family m={m} c={} catalog mismatch",
                cat.c
            );
            for pt in &cat.points {
                match decide_preperiodic_default(&pt.point, &p).unwrap() {
                    OrbitVerdict::Preperiodic { .. } => {}
                    other => panic!("family point {} not preperiodic: {other:?}", pt.point),
                }
            }
            // h-hat-consistency on a couple of points per catalog keeps the
            // runtime sane; the zero-height claim is the same for all.
            for pt in cat.points.iter().take(2) {
                let h = canonical_height(&pt.point, &p, &tight).unwrap().total;
                assert!(h.contains_zero(), "m={m} point {}", pt.point);
            }
        }
    }
}

/// Roots of phi^2 for d = 2 and integral c <= -1 are the four real numbers
/// +-sqrt(-c +- sqrt(-c)); certified interval enclosures of each.
fn phi2_roots(c: i64, prec: u32) -> Vec<CertInterval> {
    assert!(c <= -1);
    let minus_c = CertInterval::from_int(-c);
    let s = minus_c.sqrt(prec).unwrap();
    let mut out = Vec::new();
    for inner in [minus_c.add(&s, prec), minus_c.sub(&s, prec)] {
        let root = inner.sqrt(prec).unwrap();
        out.push(root.clone());
        out.push(root.neg());
    }
    out
}

#[test]
fn root_proximity_outside_the_basin() {
    // If phi^m(alpha) is not in B_inf (m = 2 for d = 2), alpha lies within
    // the stated distance of some root of phi^m:
    // log|alpha - beta| <= -(1/d) lambda(c) + (d+2m-2) log 2 - log d.
    let prec = 192;
    for c in [-2i64, -5, -13, -30] {
        let p = MapParams::new(Rational::from_int(c), 2).unwrap();
        let lam_c = ln_int(&BigInt::from(-c), prec).unwrap();
        let rhs = lam_c
            .neg()
            .mul_pow2(-1)
            .add(&ln2(prec).mul_int(&BigInt::from(4), prec), prec)
            .sub(&ln2(prec), prec);
        let roots = phi2_roots(c, prec);
        for num in -40i64..=40 {
            for den in [1i64, 2, 3, 5] {
                let alpha = Rational::new(BigInt::from(num), BigInt::from(den)).unwrap();
                let second = step(&step(&alpha, &p), &p);
                if basin_test_arch(&second, &p, prec) != BasinClass::Below {
                    continue;
                }
                let ai = alpha.to_interval(prec);
                let best_is_close = roots.iter().any(|beta| {
                    let dist = ai.sub(beta, prec).abs();
                    if !dist.lo().is_positive() {
                        return true; // touching a root enclosure
                    }
                    let ln_dist = dist.ln(prec).unwrap();
                    ln_dist.lo() <= rhs.hi()
                });
                assert!(
                    best_is_close,
                    "alpha={alpha} c={c}: no root of phi^2 within the lemma distance"
                );
            }
        }
    }
}

#[test]
fn survey_completeness_counter_rederives() {
    // Every alpha with h(alpha) <= min.hi + log|2c| was examined: the
    // counter equals the shell enumeration size for the final cutoff.
    let e = eps("1e-4");
    let row = unicrit::survey::min_wandering_height(-3, &e).unwrap();
    let cutoff = row
        .min_height
        .hi()
        .add(ln_int(&BigInt::from(6), 96).unwrap().hi(), 64, Round::Up);
    let mut expected: u64 = 0;
    let mut shell: u64 = 1;
    loop {
        let l = ln_int(&BigInt::from(shell), 96).unwrap();
        if l.lo() > &cutoff {
            break;
        }
        expected += unicrit::survey::RationalStream::up_to_shell(shell).count() as u64
            - if shell > 1 {
                unicrit::survey::RationalStream::up_to_shell(shell - 1).count() as u64
            } else {
                0
            };
        shell += 1;
    }
    assert!(
        row.candidates_examined >= expected,
        "counter {} below the re-derived enumeration size {expected}",
        row.candidates_examined
    );
}

#[test]
fn nonnegativity_and_width_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let c = rng.gen_range(-30i64..=30);
        let a = rng.gen_range(-20i64..=20);
        let b = rng.gen_range(1i64..=20);
        let alpha = Rational::new(BigInt::from(a), BigInt::from(b)).unwrap();
        let p = MapParams::new(Rational::from_int(c), 2).unwrap();
        let e = eps("1e-7");
        let h = canonical_height(&alpha, &p, &e).unwrap().total;
        assert!(!h.hi().is_negative(), "upper endpoint must be >= 0");
        assert!(
            !h.lo().is_negative(),
            "locals are clamped at 0, so the sum is too"
        );
        assert!(h.width_leq(e.as_ratio()), "width contract violated");
    }
}

#[test]
fn lemma7_envelope_on_random_integral_c() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let e = eps("1e-7");
    let tol = BigRational::new(num_traits::One::one(), BigInt::from(1_000_000u64));
    for _ in 0..60 {
        let c = loop {
            let v = rng.gen_range(-500i64..=500);
            if v != 0 {
                break v;
            }
        };
        let d = [2u32, 3][rng.gen_range(0..2)];
        let a = rng.gen_range(-60i64..=60);
        let b = rng.gen_range(1i64..=60);
        let alpha = Rational::new(BigInt::from(a), BigInt::from(b)).unwrap();
        let p = MapParams::new(Rational::from_int(c), d).unwrap();
        let h_hat = canonical_height(&alpha, &p, &e).unwrap().total;
        let h = unicrit::rational::naive_height(&alpha, 128);
        let level = ln_int(&BigInt::from(2 * c.unsigned_abs()), 128)
            .unwrap()
            .div_uint(&BigInt::from(d - 1), 128)
            .add(&CertInterval::from_ratio(&tol, 64), 128);
        let gap = CertInterval::point(h_hat.mid()).sub(&h, 128).abs();
        assert!(gap.hi() <= level.hi(), "alpha={alpha} c={c} d={d}");
    }
}
