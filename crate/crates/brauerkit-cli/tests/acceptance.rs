//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (visible with --nocapture). A single test
//! function keeps the criteria ordered and the timings honest.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use brauerkit::arith::{self, Place};
use brauerkit::cohomology::{
    gl2, h0, h1, h1_full_function_space, sl2, sl2_plus, FiniteMatrixGroup, ModMatrix,
    DEFAULT_GROUP_CAP,
};
use brauerkit::ec::{self, WeierstrassCurve};
use brauerkit::local::{self, DiagonalForm};
use brauerkit::pipelines::{
    pipeline_cohomology, pipeline_surface, pipeline_threefold_padic, pipeline_threefold_real,
    CohomologyParams, SurfaceParams, ThreefoldPadicParams, ThreefoldRealParams,
};
use brauerkit::quadfield::{self, LocalCertStatus, QuadFieldElement};
use brauerkit::rational::Rational;
use brauerkit::report::Status;

struct Outcome {
    name: &'static str,
    pass: bool,
    elapsed: Duration,
    detail: String,
}

fn record(
    outcomes: &mut Vec<Outcome>,
    name: &'static str,
    budget: Duration,
    f: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (pass, detail) = match result {
        Ok(d) => (elapsed <= budget, d),
        Err(d) => (false, d),
    };
    let mut detail = detail;
    if elapsed > budget {
        detail = format!("{} [exceeded budget {:?}]", detail, budget);
    }
    println!(
        "criterion {:<38} {} ({:?}) {}",
        name,
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        detail
    );
    outcomes.push(Outcome {
        name,
        pass,
        elapsed,
        detail,
    });
}

/// Deterministic congruential generator, same stream on every run.
struct Lcg(u64);

impl Lcg {
    fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }
    fn nonzero_in(&mut self, lo: i64, hi: i64) -> i64 {
        loop {
            let v = lo + (self.next_u64() % ((hi - lo + 1) as u64)) as i64;
            if v != 0 {
                return v;
            }
        }
    }
    fn rational(&mut self, num_bound: i64, den_bound: i64) -> Rational {
        Rational::new(
            BigInt::from(self.nonzero_in(-num_bound, num_bound)),
            BigInt::from(self.nonzero_in(1, den_bound)),
        )
    }
}

fn strip_runtime(json: &str) -> String {
    json.lines()
        .filter(|l| !l.trim_start().starts_with("\"runtime_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn acceptance() {
    let mut outcomes = Vec::new();

    // 1. Hilbert product formula on 300 random pairs, < 10 s
    record(
        &mut outcomes,
        "1-hilbert-product-formula",
        Duration::from_secs(10),
        || {
            let mut rng = Lcg(0xacce_0001);
            for i in 0..300 {
                let a = rng.rational(1000, 1000);
                let b = rng.rational(1000, 1000);
                let mut places = vec![Place::finite_u64(2), Place::Real];
                for x in [&a, &b] {
                    for part in [x.numer().clone(), x.denom().clone()] {
                        for (p, _) in arith::factorize(&part)
                            .map_err(|e| e.to_string())?
                            .factors
                        {
                            let pl = Place::Finite(p);
                            if !places.contains(&pl) {
                                places.push(pl);
                            }
                        }
                    }
                }
                let prod: i32 = places
                    .iter()
                    .map(|v| local::hilbert_symbol(&a, &b, v))
                    .product();
                if prod != 1 {
                    return Err(format!("pair {} ({}, {}) product {}", i, a, b, prod));
                }
            }
            Ok("300 pairs".into())
        },
    );

    // 2. anisotropy pattern of <1,1,1> and the completion certificate, < 5 s
    record(
        &mut outcomes,
        "2-sum-of-three-squares-pattern",
        Duration::from_secs(5),
        || {
            let f = DiagonalForm::from_ints(&[1, 1, 1]);
            let places = local::anisotropic_places(&f).map_err(|e| e.to_string())?;
            let expected: BTreeSet<Place> = BTreeSet::from([Place::finite_u64(2), Place::Real]);
            if places != expected {
                return Err(format!("unexpected place set {:?}", places));
            }
            let coeffs: Vec<QuadFieldElement> = (0..3)
                .map(|_| QuadFieldElement::from_rational(Rational::one(), BigInt::from(10)))
                .collect();
            let cert = quadfield::is_isotropic_quadfield_at_two(&coeffs, &BigInt::from(10), 12)
                .map_err(|e| e.to_string())?;
            if cert.status != LocalCertStatus::Isotropic {
                return Err("certificate not isotropic".into());
            }
            if !cert.verify() {
                return Err("witness failed re-verification".into());
            }
            Ok("places {2, oo}; lifting witness verified".into())
        },
    );

    // 3. the p-adic pair: conic pattern, splitting, square roots of -1,
    //    surviving symbol, < 1 s
    record(
        &mut outcomes,
        "3-padic-pair-5-17",
        Duration::from_secs(1),
        || {
            let conic = DiagonalForm::from_ints(&[1, -5, -17]);
            let places = local::anisotropic_places(&conic).map_err(|e| e.to_string())?;
            let expected: BTreeSet<Place> =
                BTreeSet::from([Place::finite_u64(5), Place::finite_u64(17)]);
            if places != expected {
                return Err(format!("conic pattern {:?}", places));
            }
            if 5 % 4 != 1 || 17 % 4 != 1 {
                return Err("congruence failure".into());
            }
            for p in [5u64, 17] {
                if !arith::is_square_in_qp(&Rational::from(-1), &Place::finite_u64(p)) {
                    return Err(format!("-1 not a square at {}", p));
                }
            }
            let h = local::hilbert_symbol(
                &Rational::from(5),
                &Rational::from(17),
                &Place::finite_u64(5),
            );
            if h != -1 {
                return Err("symbol not ramified at 5".into());
            }
            if !brauerkit::funcfield::place_splits_in_quad(&BigInt::from(5), &BigInt::from(-1)) {
                return Err("5 does not split in the imaginary field".into());
            }
            Ok("pattern {5, 17}; symbol survives".into())
        },
    );

    // 4. the real-deformation fibre data, < 1 s
    record(
        &mut outcomes,
        "4-real-deformation-fibre",
        Duration::from_secs(1),
        || {
            if !arith::is_square_in_qp(&Rational::from(-7), &Place::finite_u64(2)) {
                return Err("-7 not a 2-adic square".into());
            }
            let fibre = DiagonalForm::from_ints(&[1, 1, 1, 7]);
            let places = local::anisotropic_places(&fibre).map_err(|e| e.to_string())?;
            let expected: BTreeSet<Place> = BTreeSet::from([Place::Real]);
            if places != expected {
                return Err(format!("fibre pattern {:?}", places));
            }
            Ok("-7 square at 2; fibre fails only at oo".into())
        },
    );

    // 5. cohomology suite, < 5 min
    record(
        &mut outcomes,
        "5-cohomology-suite",
        Duration::from_secs(300),
        || {
            for n in 2..=16u64 {
                let g = sl2_plus(n, DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
                if h0(&g) != vec![(0, 0)] {
                    return Err(format!("fixed points at n = {}", n));
                }
            }
            for q in [3u64, 5, 7, 9] {
                let g = sl2(q, DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
                if !h1(&g).map_err(|e| e.to_string())?.is_trivial() {
                    return Err(format!("nonvanishing at odd level {}", q));
                }
            }
            for r in 1..=3u32 {
                let n = 1u64 << r;
                let g = sl2_plus(n, DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
                let h = h1(&g).map_err(|e| e.to_string())?;
                if (1u64 << (r - 1)) % h.exponent != 0 {
                    return Err(format!("annihilator bound fails at r = {}", r));
                }
            }
            // generator-relation H^1 equals function-space H^1 on all
            // test groups of order <= 60
            let groups: Vec<FiniteMatrixGroup> = vec![
                sl2(2, 100).map_err(|e| e.to_string())?,
                sl2_plus(2, 100).map_err(|e| e.to_string())?,
                sl2(3, 100).map_err(|e| e.to_string())?,
                sl2(4, 100).map_err(|e| e.to_string())?,
                sl2_plus(4, 100).map_err(|e| e.to_string())?,
                gl2(2, 100).map_err(|e| e.to_string())?,
                gl2(3, 100).map_err(|e| e.to_string())?,
                FiniteMatrixGroup::generate(4, vec![ModMatrix::new(4, [3, 0, 0, 3])], 10)
                    .map_err(|e| e.to_string())?,
                FiniteMatrixGroup::generate(6, vec![ModMatrix::new(6, [1, 1, 0, 1])], 10)
                    .map_err(|e| e.to_string())?,
                FiniteMatrixGroup::generate(
                    8,
                    vec![ModMatrix::new(8, [1, 1, 0, 1]), ModMatrix::new(8, [7, 0, 0, 7])],
                    40,
                )
                .map_err(|e| e.to_string())?,
            ];
            for g in &groups {
                if g.order() > 60 {
                    return Err("oracle group too large".into());
                }
                let fast = h1(g).map_err(|e| e.to_string())?;
                let slow = h1_full_function_space(g);
                if fast.invariant_factors != slow {
                    return Err(format!(
                        "oracle mismatch at order {} mod {}: {:?} vs {:?}",
                        g.order(),
                        g.n,
                        fast.invariant_factors,
                        slow
                    ));
                }
            }
            Ok(format!("{} oracle groups agreed", groups.len()))
        },
    );

    // 6. curve invariants and small traces against the enumeration oracle
    record(
        &mut outcomes,
        "6-curve-invariants-and-traces",
        Duration::from_secs(10),
        || {
            let e = WeierstrassCurve::e67();
            let inv = e.invariants();
            let want = [
                (&inv.disc, -67i64),
                (&inv.b2, 4),
                (&inv.b4, -24),
                (&inv.b6, -83),
                (&inv.b8, -227),
            ];
            for (got, expect) in want {
                if *got != Rational::from(expect) {
                    return Err(format!("invariant mismatch: {} vs {}", got, expect));
                }
            }
            // independent oracle: brute-force both affine coordinates
            let naive = |p: u64| -> u64 {
                let c = ec::reduction(&e, p).unwrap();
                let mut count = 1u64;
                for x in 0..p {
                    for y in 0..p {
                        if c.is_on_curve(x, y) {
                            count += 1;
                        }
                    }
                }
                count
            };
            for (p, want_order, want_ap) in [(2u64, 1u64, 2i64), (3, 6, -2)] {
                let (order, ap) = ec::count_points_mod_p(&e, p).map_err(|e| e.to_string())?;
                if order != want_order || ap != want_ap {
                    return Err(format!("trace at {}: ({}, {})", p, order, ap));
                }
                if naive(p) != order {
                    return Err(format!("oracle disagrees at {}", p));
                }
            }
            Ok("disc -67; b-quantities; a_2 = 2, a_3 = -2".into())
        },
    );

    // 7. torsion certificates, the biquadratic chain and rank witnesses,
    //    < 2 min
    record(
        &mut outcomes,
        "7-torsion-and-rank-witnesses",
        Duration::from_secs(120),
        || {
            let e = WeierstrassCurve::e67();
            for d in [1i64, 2, 5, 10] {
                let t = e.quadratic_twist(&BigInt::from(d)).map_err(|e| e.to_string())?;
                let cert =
                    ec::torsion_trivial_certificate(&t, 200).map_err(|e| e.to_string())?;
                if !cert.verify(&t) {
                    return Err(format!("torsion certificate failed for twist {}", d));
                }
            }
            let field = ec::BiquadField { c: 10, d: 2 };
            let chain =
                ec::biquadratic_torsion_free(&e, &field, 200).map_err(|e| e.to_string())?;
            if chain.len() != 4 {
                return Err("biquadratic chain incomplete".into());
            }
            // rank positivity witnesses on the twists by 2 and 5
            for d in [2i64, 5] {
                let t = e.quadratic_twist(&BigInt::from(d)).map_err(|e| e.to_string())?;
                let pts =
                    ec::search_rational_points(&t, 10_000).map_err(|e| e.to_string())?;
                if pts.is_empty() {
                    return Err(format!("no point on the twist by {}", d));
                }
                // torsion-free + affine point = non-torsion point
            }
            Ok("four torsion certificates; points on both twists".into())
        },
    );

    // 8. Galois image certification at the odd levels, CM control stays
    //    inconclusive, < 2 min cold
    record(
        &mut outcomes,
        "8-galois-image-witnesses",
        Duration::from_secs(120),
        || {
            let e = WeierstrassCurve::e67();
            if !ec::mod2_image_full(&e).map_err(|e| e.to_string())? {
                return Err("mod-2 image not full".into());
            }
            let traces = ec::trace_scan(&e, 10_000).map_err(|e| e.to_string())?;
            for ell in [3u64, 5, 7, 11, 13] {
                let rep = ec::mod_l_surjectivity_with_traces(ell, 10_000, &traces);
                if rep.verdict != ec::SurjectivityVerdict::SurjectiveCertified {
                    return Err(format!("level {} not certified: {:?}", ell, rep));
                }
            }
            let cm = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]).map_err(|e| e.to_string())?;
            let rep =
                ec::mod_l_surjectivity_witnesses(&cm, 5, 10_000).map_err(|e| e.to_string())?;
            if rep.verdict != ec::SurjectivityVerdict::Inconclusive {
                return Err("CM control certified unexpectedly".into());
            }
            Ok("levels 2,3,5,7,11,13 certified; CM control inconclusive".into())
        },
    );

    // 9. the surface pipeline end to end, < 10 min
    let mut surface_json: Option<String> = None;
    record(
        &mut outcomes,
        "9-surface-pipeline",
        Duration::from_secs(600),
        || {
            let report = pipeline_surface(&SurfaceParams::default(), None)
                .map_err(|e| e.to_string())?;
            for c in &report.checks {
                match (c.required, c.status) {
                    (true, Status::Pass) => {}
                    (false, Status::Pass) => {}
                    (required, status) => {
                        return Err(format!(
                            "{} ({}) ended {:?}",
                            c.check_id,
                            if required { "REQUIRED" } else { "BOUNDED" },
                            status
                        ));
                    }
                }
            }
            let rechecks = brauerkit::pipelines::recheck_report(&report);
            if let Some((id, _)) = rechecks.iter().find(|(_, ok)| !ok) {
                return Err(format!("witness recheck failed for {}", id));
            }
            surface_json = Some(report.to_json());
            Ok(format!("{} checks passed with witnesses", report.checks.len()))
        },
    );

    // 10. reports are byte-identical across runs once runtime_ms is
    //     stripped
    record(
        &mut outcomes,
        "10-report-determinism",
        Duration::from_secs(900),
        || {
            let a1 = pipeline_threefold_real(&ThreefoldRealParams::default())
                .map_err(|e| e.to_string())?;
            let a2 = pipeline_threefold_real(&ThreefoldRealParams::default())
                .map_err(|e| e.to_string())?;
            if strip_runtime(&a1.to_json()) != strip_runtime(&a2.to_json()) {
                return Err("threefold-real reports differ".into());
            }
            let b1 = pipeline_threefold_padic(&ThreefoldPadicParams::default())
                .map_err(|e| e.to_string())?;
            let b2 = pipeline_threefold_padic(&ThreefoldPadicParams::default())
                .map_err(|e| e.to_string())?;
            if strip_runtime(&b1.to_json()) != strip_runtime(&b2.to_json()) {
                return Err("threefold-padic reports differ".into());
            }
            let c1 = pipeline_cohomology(&CohomologyParams::default())
                .map_err(|e| e.to_string())?;
            let c2 = pipeline_cohomology(&CohomologyParams::default())
                .map_err(|e| e.to_string())?;
            if strip_runtime(&c1.to_json()) != strip_runtime(&c2.to_json()) {
                return Err("cohomology reports differ".into());
            }
            let first = surface_json
                .as_ref()
                .ok_or_else(|| "surface run missing".to_string())?;
            let d2 = pipeline_surface(&SurfaceParams::default(), None)
                .map_err(|e| e.to_string())?;
            if strip_runtime(first) != strip_runtime(&d2.to_json()) {
                return Err("surface reports differ".into());
            }
            Ok("all four pipelines reproduce byte-identically".into())
        },
    );

    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    let total: Duration = outcomes.iter().map(|o| o.elapsed).sum();
    println!(
        "acceptance: {}/{} criteria passed in {:?}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        total
    );
    assert!(
        failed.is_empty(),
        "failed criteria: {:?}",
        failed
            .iter()
            .map(|o| format!("{}: {}", o.name, o.detail))
            .collect::<Vec<_>>()
    );
}
