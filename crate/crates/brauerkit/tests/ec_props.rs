//! Property suites for the elliptic curve layer: group law sampling,
//! Hasse bounds, the twist trace law, invariant identities, and the
//! serialization round trip of every certificate family.

mod common;

use num_bigint::BigInt;

use brauerkit::arith;
use brauerkit::ec::{self, WeierstrassCurve};
use brauerkit::rational::Rational;
use common::Lcg;

fn random_curve(rng: &mut Lcg) -> WeierstrassCurve {
    loop {
        let a = [
            rng.int_in(0, 1),
            rng.int_in(-3, 3),
            rng.int_in(0, 1),
            rng.int_in(-8, 8),
            rng.int_in(-8, 8),
        ];
        if let Ok(e) = WeierstrassCurve::from_ints(a) {
            return e;
        }
    }
}

#[test]
fn group_law_associativity_500_triples() {
    let mut rng = Lcg(0xec_0001);
    let mut tested = 0;
    while tested < 500 {
        let e = random_curve(&mut rng);
        let p = [13u64, 17, 19, 23][(rng.next_u64() % 4) as usize];
        if !e.has_good_reduction(p).unwrap() {
            continue;
        }
        let c = match ec::reduction(&e, p) {
            Ok(c) => c,
            Err(_) => continue,
        };
        // sample points by scanning from random x
        let mut pts = Vec::new();
        let mut x = rng.next_u64() % p;
        while pts.len() < 3 {
            for y in 0..p {
                if c.is_on_curve(x, y) {
                    pts.push(ec::ModPoint::Affine(x, y));
                    break;
                }
            }
            x = (x + 1) % p;
        }
        let (a, b, d) = (pts[0], pts[1], pts[2]);
        assert_eq!(
            c.add_points(c.add_points(a, b), d),
            c.add_points(a, c.add_points(b, d)),
            "associativity on {} mod {}",
            e,
            p
        );
        assert_eq!(c.add_points(a, c.neg_point(a)), ec::ModPoint::Infinity);
        tested += 1;
    }
}

#[test]
fn hasse_bound_and_scan_consistency() {
    let mut rng = Lcg(0xec_0002);
    for _ in 0..10 {
        let e = random_curve(&mut rng);
        let recs = ec::trace_scan(&e, 200).unwrap();
        for r in &recs {
            assert!((r.ap * r.ap) as u64 <= 4 * r.p, "{} at {}", e, r.p);
            assert_eq!(r.order as i64, r.p as i64 + 1 - r.ap);
        }
    }
}

#[test]
fn twist_trace_law_at_good_primes() {
    let e = WeierstrassCurve::e67();
    for d in [2i64, 5, 10, -1, -3] {
        let t = e.quadratic_twist(&BigInt::from(d)).unwrap();
        let mut checked = 0;
        for p in arith::primes_up_to(500) {
            if p == 2
                || !t.has_good_reduction(p).unwrap()
                || !e.has_good_reduction(p).unwrap()
                || d.unsigned_abs() % p == 0
            {
                continue;
            }
            let (_, ap) = ec::count_points_mod_p(&e, p).unwrap();
            let (_, apt) = ec::count_points_mod_p(&t, p).unwrap();
            assert_eq!(apt, arith::legendre_symbol_u64(d, p) as i64 * ap);
            checked += 1;
        }
        assert!(checked >= 80, "only {} primes checked for d = {}", checked, d);
    }
}

#[test]
fn invariant_identities_on_random_curves() {
    let mut rng = Lcg(0xec_0003);
    for _ in 0..100 {
        let e = random_curve(&mut rng);
        let inv = e.invariants();
        // 4 b8 = b2 b6 - b4^2
        assert_eq!(
            &Rational::from(4) * &inv.b8,
            &(&inv.b2 * &inv.b6) - &(&inv.b4 * &inv.b4)
        );
        // 1728 disc = c4^3 - c6^2
        assert_eq!(
            &Rational::from(1728) * &inv.disc,
            &inv.c4.pow(3) - &(&inv.c6 * &inv.c6)
        );
        // the short model has the same discriminant sign
        let s = e.short_model();
        assert_eq!(
            s.discriminant().signum(),
            inv.disc.signum(),
            "sign mismatch for {}",
            e
        );
    }
}

#[test]
fn scalar_multiplication_matches_repeated_addition() {
    let mut rng = Lcg(0xec_0004);
    let mut tested = 0;
    while tested < 20 {
        let e = random_curve(&mut rng);
        let p = 31u64;
        if !e.has_good_reduction(p).unwrap() {
            continue;
        }
        let c = ec::reduction(&e, p).unwrap();
        let mut pt = None;
        'search: for x in 0..p {
            for y in 0..p {
                if c.is_on_curve(x, y) {
                    pt = Some(ec::ModPoint::Affine(x, y));
                    break 'search;
                }
            }
        }
        let pt = match pt {
            Some(pt) => pt,
            None => continue,
        };
        let mut acc = ec::ModPoint::Infinity;
        for m in 1..=20u64 {
            acc = c.add_points(acc, pt);
            assert_eq!(c.scalar_mul(m, pt), acc);
        }
        tested += 1;
    }
}

#[test]
fn certificates_roundtrip_through_json() {
    let e = WeierstrassCurve::e67();
    // torsion
    let cert = ec::torsion_trivial_certificate(&e, 200).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: ec::TorsionCertificate = serde_json::from_str(&json).unwrap();
    assert_eq!(cert, back);
    assert!(back.verify(&e));

    // non-divisibility on a curve with an explicit generator
    let g = WeierstrassCurve::from_ints([0, 0, 0, 0, 17]).unwrap();
    let pt = ec::KPoint::new(&Rational::from(2), &Rational::from(5), 1);
    let field = ec::BiquadField { c: 1, d: 1 };
    let cert = ec::nondivisibility_certificate(&g, &pt, &field, 2, 200).unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: ec::NondivisibilityCertificate = serde_json::from_str(&json).unwrap();
    assert!(back.verify(&g, &pt, &field));

    // integrality
    let short = ec::ShortModel::direct(Rational::from(0), Rational::from(17));
    let cert = ec::preimage_integrality_n2(
        &short,
        &Rational::from(2),
        &Rational::from(5),
        1,
        &field,
        500,
    )
    .unwrap();
    let json = serde_json::to_string(&cert).unwrap();
    let back: ec::IntegralityCertificate = serde_json::from_str(&json).unwrap();
    assert!(back.verify());

    // a surjectivity report survives the round trip bit for bit
    let rep = ec::mod_l_surjectivity_witnesses(&e, 5, 500).unwrap();
    let json = serde_json::to_string(&rep).unwrap();
    let back: ec::SurjectivityWitnessReport = serde_json::from_str(&json).unwrap();
    assert_eq!(rep, back);
}

#[test]
fn search_respects_height_box() {
    // every reported point has x = m/e^2 with |m|, e within the bound
    let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 17]).unwrap();
    let pts = ec::search_rational_points(&e, 6).unwrap();
    assert!(!pts.is_empty());
    for pt in &pts {
        use num_traits::Signed as _;
        assert!(pt.x.numer().abs() <= BigInt::from(6));
        let d = pt.x.denom().clone();
        let e2 = arith::sqrt_exact(&d).expect("denominator is a square");
        assert!(e2 <= BigInt::from(6));
    }
}
