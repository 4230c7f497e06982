//! Named verification pipelines over the three constructions, emitting
//! reports with per-check provenance, plus round-trip re-verification of
//! stored reports.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{self, Place};
use crate::cohomology::{self, DEFAULT_GROUP_CAP};
use crate::ec::{self, ApCache, BiquadField, WeierstrassCurve};
use crate::funcfield::{
    self, BaseField, ClosedPoint, FibreX, QPoly, RatFunc, SymbolAlgebra,
};
use crate::local::{self, DiagonalForm};
use crate::quadfield::{self, LocalCertStatus, QuadFieldElement};
use crate::rational::Rational;
use crate::report::{CheckBuilder, HenselData, Report, Status, Witness};

#[derive(Debug)]
pub enum PipelineError {
    /// Preconditions of the construction are violated; carries the cited
    /// reason.
    Refused(String),
    Internal(String),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Refused(r) => write!(f, "pipeline refused: {}", r),
            PipelineError::Internal(r) => write!(f, "pipeline internal error: {}", r),
        }
    }
}

impl std::error::Error for PipelineError {}

fn place_str(p: &Place) -> String {
    p.to_string()
}

fn places_vec(set: &BTreeSet<Place>) -> Vec<String> {
    set.iter().map(place_str).collect()
}

fn parse_place(s: &str) -> Option<Place> {
    if s == "oo" {
        Some(Place::Real)
    } else {
        let p: BigInt = s.parse().ok()?;
        Place::finite(p).ok()
    }
}

fn form_strings(f: &DiagonalForm) -> Vec<String> {
    f.coeffs().iter().map(|c| c.to_string()).collect()
}

fn parse_form(v: &[String]) -> Option<DiagonalForm> {
    let coeffs: Option<Vec<Rational>> = v.iter().map(|s| s.parse().ok()).collect();
    Some(DiagonalForm::new(coeffs?))
}

// ---------------------------------------------------------------------
// threefold over a real field
// ---------------------------------------------------------------------

/// Data of the quadric bundle Q(x0,x1,x2) + n t(t-a) x3^2 = 0 over Q.
#[derive(Debug, Clone)]
pub struct ThreefoldRealParams {
    pub n: i64,
    pub q_form: Vec<i64>,
    pub a: Rational,
}

impl Default for ThreefoldRealParams {
    fn default() -> Self {
        ThreefoldRealParams {
            n: 7,
            q_form: vec![1, 1, 1],
            a: Rational::one(),
        }
    }
}

/// Checks for the real-deformation threefold: the rank-3 form must be
/// anisotropic exactly at {2, oo}, -n must be a 2-adic square, the smooth
/// fibre form must fail only at the real place, and the two degenerate
/// fibres carry the rank-3 form.
pub fn pipeline_threefold_real(params: &ThreefoldRealParams) -> Result<Report, PipelineError> {
    if params.a.is_zero() || !params.a.is_positive() {
        return Err(PipelineError::Refused(
            "the deformation parameter a must be positive".into(),
        ));
    }
    if params.n == 0 {
        return Err(PipelineError::Refused("n must be nonzero".into()));
    }
    let q = DiagonalForm::from_ints(&params.q_form);
    let mut checks = Vec::new();

    let expected: BTreeSet<Place> = BTreeSet::from([Place::finite_u64(2), Place::Real]);
    checks.push(
        CheckBuilder::new(
            "threefold-real.1",
            "the rank-3 form is anisotropic exactly at {2, oo}",
            "local solubility pattern of the base conic",
            true,
        )
        .param("form", format!("{}", q))
        .run(|| match local::anisotropic_places(&q) {
            Ok(set) => {
                let status = if set == expected { Status::Pass } else { Status::Fail };
                (
                    status,
                    Witness::PlaceSet {
                        form: form_strings(&q),
                        places: places_vec(&set),
                    },
                )
            }
            Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
        }),
    );

    let minus_n = Rational::from(-params.n);
    checks.push(
        CheckBuilder::new(
            "threefold-real.2",
            "-n Q(1,0,0) is a square in the 2-adic completion",
            "2-adic solubility of the special fibre",
            true,
        )
        .param("n", params.n)
        .run(|| {
            let q100 = Rational::from(params.q_form[0]);
            let x = &minus_n * &q100;
            let ok = arith::is_square_in_qp(&x, &Place::finite_u64(2));
            (
                if ok { Status::Pass } else { Status::Fail },
                Witness::SquareChecks {
                    checks: vec![(x.to_string(), "2".into(), ok)],
                },
            )
        }),
    );

    let mut fibre_coeffs = params.q_form.clone();
    fibre_coeffs.push(params.n);
    let fibre = DiagonalForm::from_ints(&fibre_coeffs);
    let expected_fibre: BTreeSet<Place> = BTreeSet::from([Place::Real]);
    checks.push(
        CheckBuilder::new(
            "threefold-real.3",
            "the smooth fibre form is anisotropic exactly at the real place",
            "everywhere-locally-soluble-but-real fibre",
            true,
        )
        .param("form", format!("{}", fibre))
        .run(|| match local::anisotropic_places(&fibre) {
            Ok(set) => {
                let status = if set == expected_fibre {
                    Status::Pass
                } else {
                    Status::Fail
                };
                (
                    status,
                    Witness::PlaceSet {
                        form: form_strings(&fibre),
                        places: places_vec(&set),
                    },
                )
            }
            Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
        }),
    );

    let a = params.a.clone();
    checks.push(
        CheckBuilder::new(
            "threefold-real.4",
            "the degeneration locus n t(t-a) has the two simple roots 0 and a, each carrying the rank-3 form",
            "degenerate-fibre bookkeeping of the quadric bundle",
            true,
        )
        .param("a", &a)
        .run(|| {
            let distinct = !a.is_zero();
            let rank3 = params.q_form.len() == 3;
            (
                if distinct && rank3 { Status::Pass } else { Status::Fail },
                Witness::DegenerateFibres {
                    roots: vec!["0".into(), a.to_string()],
                    multiplicities: vec![1, 1],
                    residual_form: params.q_form.iter().map(|c| c.to_string()).collect(),
                },
            )
        }),
    );

    Ok(Report::assemble("threefold-real", checks))
}

// ---------------------------------------------------------------------
// threefold over a p-adic pair
// ---------------------------------------------------------------------

/// Data of the conic r^2 - p1 s^2 - p2 t^2 = 0 and the imaginary
/// quadratic field where both primes split.
#[derive(Debug, Clone)]
pub struct ThreefoldPadicParams {
    pub p1: u64,
    pub p2: u64,
    pub field_disc: i64,
}

impl Default for ThreefoldPadicParams {
    fn default() -> Self {
        ThreefoldPadicParams {
            p1: 5,
            p2: 17,
            field_disc: -1,
        }
    }
}

pub fn pipeline_threefold_padic(
    params: &ThreefoldPadicParams,
) -> Result<Report, PipelineError> {
    if !arith::is_prime_u64(params.p1) || !arith::is_prime_u64(params.p2) {
        return Err(PipelineError::Refused("p1, p2 must be prime".into()));
    }
    let mut checks = Vec::new();
    let conic = DiagonalForm::new(vec![
        Rational::one(),
        Rational::from(-(params.p1 as i64)),
        Rational::from(-(params.p2 as i64)),
    ]);
    let expected: BTreeSet<Place> = BTreeSet::from([
        Place::finite_u64(params.p1),
        Place::finite_u64(params.p2),
    ]);
    checks.push(
        CheckBuilder::new(
            "threefold-padic.1",
            "the special conic is anisotropic exactly at the two chosen primes",
            "fibre conic insoluble at the chosen pair only",
            true,
        )
        .param("form", format!("{}", conic))
        .run(|| match local::anisotropic_places(&conic) {
            Ok(set) => (
                if set == expected { Status::Pass } else { Status::Fail },
                Witness::PlaceSet {
                    form: form_strings(&conic),
                    places: places_vec(&set),
                },
            ),
            Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
        }),
    );

    let disc = params.field_disc;
    checks.push(
        CheckBuilder::new(
            "threefold-padic.2",
            "both primes split in the quadratic field",
            "splitting of the chosen primes in the gluing field",
            true,
        )
        .param("field_disc", disc)
        .run(|| {
            let ok1 = funcfield::place_splits_in_quad(&BigInt::from(params.p1), &BigInt::from(disc));
            let ok2 = funcfield::place_splits_in_quad(&BigInt::from(params.p2), &BigInt::from(disc));
            (
                if ok1 && ok2 { Status::Pass } else { Status::Fail },
                Witness::SplitPrimes {
                    disc,
                    primes: vec![params.p1, params.p2],
                },
            )
        }),
    );

    checks.push(
        CheckBuilder::new(
            "threefold-padic.3",
            "-1 is a square in both chosen completions",
            "the local points u = alpha_p with alpha_p^2 = -1",
            true,
        )
        .run(|| {
            let m1 = Rational::from(-1);
            let c1 = arith::is_square_in_qp(&m1, &Place::finite_u64(params.p1));
            let c2 = arith::is_square_in_qp(&m1, &Place::finite_u64(params.p2));
            (
                if c1 && c2 { Status::Pass } else { Status::Fail },
                Witness::SquareChecks {
                    checks: vec![
                        ("-1".into(), params.p1.to_string(), c1),
                        ("-1".into(), params.p2.to_string(), c2),
                    ],
                },
            )
        }),
    );

    checks.push(
        CheckBuilder::new(
            "threefold-padic.4",
            "the quaternion symbol of the pair stays nonzero after base change, witnessed at a split place over the first prime",
            "the conic class survives in the Brauer group of the quadratic field",
            true,
        )
        .run(|| {
            let a = Rational::from(params.p1 as i64);
            let b = Rational::from(params.p2 as i64);
            let v = Place::finite_u64(params.p1);
            let h = local::hilbert_symbol(&a, &b, &v);
            let splits =
                funcfield::place_splits_in_quad(&BigInt::from(params.p1), &BigInt::from(disc));
            (
                if h == -1 && splits { Status::Pass } else { Status::Fail },
                Witness::Hilbert {
                    a: a.to_string(),
                    b: b.to_string(),
                    place: params.p1.to_string(),
                    value: h,
                },
            )
        }),
    );

    Ok(Report::assemble("threefold-padic", checks))
}

// ---------------------------------------------------------------------
// cohomology suite
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CohomologyParams {
    pub max_n: u64,
    pub max_r: u32,
    pub cap: usize,
}

impl Default for CohomologyParams {
    fn default() -> Self {
        CohomologyParams {
            max_n: 16,
            max_r: 3,
            cap: DEFAULT_GROUP_CAP,
        }
    }
}

pub fn pipeline_cohomology(params: &CohomologyParams) -> Result<Report, PipelineError> {
    let mut checks = Vec::new();
    // fixed points vanish for 2 <= n <= max_n
    for n in 2..=params.max_n {
        checks.push(
            CheckBuilder::new(
                &format!("cohomology.h0.{}", n),
                "the plus subgroup fixes only zero in its tautological module",
                "fixed points of the positive-signature subgroup",
                true,
            )
            .param("n", n)
            .run(|| match cohomology::sl2_plus(n, params.cap) {
                Ok(g) => {
                    let fixed = cohomology::h0(&g);
                    (
                        if fixed == vec![(0, 0)] { Status::Pass } else { Status::Fail },
                        Witness::CohomologyRow {
                            group: "sl2plus".into(),
                            n,
                            order: g.order() as u64,
                            h0_size: Some(fixed.len() as u64),
                            invariant_factors: None,
                            exponent: None,
                            annihilator_bound: None,
                        },
                    )
                }
                Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
            }),
        );
    }
    // H^1 vanishes for odd prime powers
    for q in [3u64, 5, 7, 9] {
        checks.push(
            CheckBuilder::new(
                &format!("cohomology.h1-odd.{}", q),
                "first cohomology of SL2 vanishes at this odd prime power",
                "vanishing at odd levels",
                true,
            )
            .param("n", q)
            .run(|| match cohomology::sl2(q, params.cap) {
                Ok(g) => match cohomology::h1(&g) {
                    Ok(h) => (
                        if h.is_trivial() { Status::Pass } else { Status::Fail },
                        Witness::CohomologyRow {
                            group: "sl2".into(),
                            n: q,
                            order: g.order() as u64,
                            h0_size: None,
                            invariant_factors: Some(h.invariant_factors.clone()),
                            exponent: Some(h.exponent),
                            annihilator_bound: Some(1),
                        },
                    ),
                    Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
                },
                Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
            }),
        );
    }
    // two-power annihilator for the plus subgroup and for GL2
    for r in 1..=params.max_r {
        let n = 1u64 << r;
        let bound = 1u64 << (r - 1);
        type GroupBuilder =
            fn(u64, usize) -> Result<cohomology::FiniteMatrixGroup, cohomology::CohomologyError>;
        for (name, builder) in [
            ("sl2plus", cohomology::sl2_plus as GroupBuilder),
            ("gl2", cohomology::gl2 as GroupBuilder),
        ] {
            checks.push(
                CheckBuilder::new(
                    &format!("cohomology.h1-two.{}.{}", name, r),
                    "first cohomology at the 2-power level is annihilated by half the level",
                    "two-power annihilator bound",
                    true,
                )
                .param("n", n)
                .param("group", name)
                .run(|| match builder(n, params.cap) {
                    Ok(g) => match cohomology::h1(&g) {
                        Ok(h) => (
                            if bound % h.exponent == 0 { Status::Pass } else { Status::Fail },
                            Witness::CohomologyRow {
                                group: name.into(),
                                n,
                                order: g.order() as u64,
                                h0_size: None,
                                invariant_factors: Some(h.invariant_factors.clone()),
                                exponent: Some(h.exponent),
                                annihilator_bound: Some(bound),
                            },
                        ),
                        Err(e) => {
                            (Status::Inconclusive, Witness::Note { text: e.to_string() })
                        }
                    },
                    Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
                }),
            );
        }
    }
    // product decomposition injectivity spot checks
    for (n, n1, n2) in [(6u64, 2u64, 3u64), (12, 4, 3)] {
        checks.push(
            CheckBuilder::new(
                &format!("cohomology.product.{}", n),
                "restriction to the coprime factors is injective on first cohomology",
                "injectivity into the product factors",
                true,
            )
            .param("n", n)
            .run(|| match cohomology::sl2_plus(n, params.cap) {
                Ok(g) => match cohomology::product_decomposition_injectivity(&g, n1, n2) {
                    Ok(ok) => (
                        if ok { Status::Pass } else { Status::Fail },
                        Witness::Note {
                            text: format!("verified over {} = {} x {}", n, n1, n2),
                        },
                    ),
                    Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
                },
                Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
            }),
        );
    }
    Ok(Report::assemble("cohomology", checks))
}

// ---------------------------------------------------------------------
// conic bundle surface over the elliptic curve
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SurfaceParams {
    /// Discriminant of the real quadratic base field.
    pub c: i64,
    /// Twist giving the point field K = Q(sqrt(c), sqrt(d)).
    pub d: i64,
    pub prime_bound: u64,
    pub height_bound: u64,
    pub torsion_bound: u64,
    /// pi-adic precision floor of the completion certificates.
    pub precision: u32,
    pub ells: Vec<u64>,
}

impl Default for SurfaceParams {
    fn default() -> Self {
        SurfaceParams {
            c: 10,
            d: 2,
            prime_bound: 10_000,
            height_bound: 10_000,
            torsion_bound: 200,
            precision: 12,
            ells: vec![2, 3, 5, 7, 11, 13],
        }
    }
}

pub fn pipeline_surface(
    params: &SurfaceParams,
    mut cache: Option<&mut ApCache>,
) -> Result<Report, PipelineError> {
    // field preconditions of the completion-at-2 argument
    if params.c <= 0 {
        return Err(PipelineError::Refused("c must be positive".into()));
    }
    if params.c.rem_euclid(8) == 1 {
        return Err(PipelineError::Refused(format!(
            "c = {} is not allowed: it is congruent to 1 modulo 8, so 2 splits in the \
             quadratic field and there is no unique prime over 2",
            params.c
        )));
    }
    let sf = |x: i64| -> Result<i64, PipelineError> {
        arith::squarefree_part(&BigInt::from(x))
            .map_err(|e| PipelineError::Internal(e.to_string()))?
            .to_i64()
            .ok_or_else(|| PipelineError::Internal("overflow".into()))
    };
    if sf(params.c)? != params.c || sf(params.d)? != params.d || params.d <= 0 {
        return Err(PipelineError::Refused(
            "c and d must be squarefree positive integers".into(),
        ));
    }

    let e = WeierstrassCurve::e67();
    let inv = e.invariants();
    let short = e.short_model();
    let base = BaseField::Quadratic(BigInt::from(params.c));
    let field = BiquadField {
        c: params.c,
        d: params.d,
    };
    let mut checks = Vec::new();

    // (1) invariants of the curve and the sign of the short discriminant
    checks.push(
        CheckBuilder::new(
            "surface.1",
            "the curve has discriminant -67 and its short model has negative discriminant",
            "invariants of the conductor-67 curve",
            true,
        )
        .run(|| {
            let ok = inv.disc == Rational::from(-67) && short.discriminant().is_negative();
            (
                if ok { Status::Pass } else { Status::Fail },
                Witness::CurveInvariants {
                    curve_id: e.id(),
                    b2: inv.b2.to_string(),
                    b4: inv.b4.to_string(),
                    b6: inv.b6.to_string(),
                    b8: inv.b8.to_string(),
                    c4: inv.c4.to_string(),
                    c6: inv.c6.to_string(),
                    disc: inv.disc.to_string(),
                    short_p: short.p.to_string(),
                    short_q: short.q.to_string(),
                },
            )
        }),
    );

    // (2) torsion certificates over the biquadratic field
    checks.push(
        CheckBuilder::new(
            "surface.2",
            "the curve and its three subfield twists all have trivial rational torsion, so the curve is torsion-free over the biquadratic field",
            "twist exact sequence applied to the torsion subgroup",
            false,
        )
        .param("prime_bound", params.torsion_bound)
        .run(|| match ec::biquadratic_torsion_free(&e, &field, params.torsion_bound) {
            Ok(entries) => (
                Status::Pass,
                Witness::TorsionChain {
                    curve_id: e.id(),
                    entries,
                },
            ),
            Err(ec::EcError::Inconclusive { bound, what }) => (
                Status::Inconclusive,
                Witness::Note {
                    text: format!("no {} below {}", what, bound),
                },
            ),
            Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
        }),
    );

    // (3) rank positivity witnesses on the twists by d and by sf(cd)
    let e3 = sf(params.c * params.d)?;
    let twist_d = e
        .quadratic_twist(&BigInt::from(params.d))
        .map_err(|er| PipelineError::Internal(er.to_string()))?;
    let twist_e3 = e
        .quadratic_twist(&BigInt::from(e3))
        .map_err(|er| PipelineError::Internal(er.to_string()))?;
    let mut found_twist_point: Option<(Rational, Rational)> = None;
    checks.push(
        CheckBuilder::new(
            "surface.3",
            "height-bounded search finds nontrivial points on the two rank-positive twists",
            "rank positivity witnesses on the subfield twists",
            false,
        )
        .param("height_bound", params.height_bound)
        .run(|| {
            let mut curves = Vec::new();
            let mut points = Vec::new();
            let mut all_found = true;
            for t in [&twist_d, &twist_e3] {
                match ec::search_rational_points(t, params.height_bound) {
                    Ok(pts) => {
                        if pts.is_empty() {
                            all_found = false;
                        }
                        if t == &twist_d {
                            if let Some(pt) = pts.first() {
                                // prefer positive y for determinism
                                let best = pts
                                    .iter()
                                    .filter(|p| p.y.is_positive() || p.y.is_zero())
                                    .min_by(|a, b| {
                                        use num_traits::Signed as _;
                                        (a.x.denom().clone(), a.x.numer().abs())
                                            .cmp(&(b.x.denom().clone(), b.x.numer().abs()))
                                    })
                                    .unwrap_or(pt);
                                found_twist_point = Some((best.x.clone(), best.y.clone()));
                            }
                        }
                        curves.push(t.id());
                        points.push(
                            pts.iter()
                                .map(|p| [p.x.to_string(), p.y.to_string()])
                                .collect(),
                        );
                    }
                    Err(e) => {
                        return (Status::Fail, Witness::Note { text: e.to_string() });
                    }
                }
            }
            (
                if all_found { Status::Pass } else { Status::Inconclusive },
                Witness::RationalPoints {
                    curves,
                    points,
                    height_bound: params.height_bound,
                },
            )
        }),
    );

    // (4a) full mod-2 image, analytically
    checks.push(
        CheckBuilder::new(
            "surface.4a",
            "the 2-division field has the full symmetric Galois group",
            "irreducible cubic with nonsquare discriminant",
            true,
        )
        .run(|| match ec::mod2_image_full(&e) {
            Ok(ok) => (
                if ok { Status::Pass } else { Status::Fail },
                Witness::Mod2Image {
                    curve_id: e.id(),
                    irreducible: ok,
                    disc_nonsquare: short.discriminant().is_negative(),
                },
            ),
            Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
        }),
    );

    // (4b) witness scans for the odd levels
    let traces = ec::trace_scan_cached(&e, params.prime_bound, cache.as_deref_mut())
        .map_err(|er| PipelineError::Internal(er.to_string()))?;
    checks.push(
        CheckBuilder::new(
            "surface.4b",
            "mod-l surjectivity witness scans reach all witness classes for every odd level up to 13",
            "maximal subgroup exclusion by Frobenius data",
            false,
        )
        .param("prime_bound", params.prime_bound)
        .run(|| {
            let mut reports = Vec::new();
            let mut all = true;
            for &ell in params.ells.iter().filter(|&&l| l >= 3) {
                let rep = ec::mod_l_surjectivity_with_traces(ell, params.prime_bound, &traces);
                all &= rep.verdict == ec::SurjectivityVerdict::SurjectiveCertified;
                reports.push(rep);
            }
            (
                if all { Status::Pass } else { Status::Inconclusive },
                Witness::GaloisReports {
                    curve_id: e.id(),
                    reports,
                },
            )
        }),
    );

    // (5) the marked point, the fibre parameter a = x(P), and b
    let (px, py) = found_twist_point.clone().ok_or_else(|| {
        PipelineError::Internal("no twist point found; rank witness missing".into())
    })?;
    // K-point on the intermediate integral model, then short coordinates
    let kp = ec::untwist_point(&px, &py, params.d);
    let bmodel = WeierstrassCurve::new(
        Rational::zero(),
        inv.b2.clone(),
        Rational::zero(),
        &Rational::from(8) * &inv.b4,
        &Rational::from(16) * &inv.b6,
    )
    .map_err(|er| PipelineError::Internal(er.to_string()))?;
    if !kp.on_curve(&bmodel) {
        return Err(PipelineError::Internal("untwisted point left the curve".into()));
    }
    // short coordinates: x_s = 9 X + 3 b2, y_s = 27 Y
    let a_s = &(&Rational::from(9) * &kp.x_rat()) + &(&Rational::from(3) * &inv.b2);
    let w_s = &Rational::from(27) * &kp.y_coeff_rat();
    // b: smallest-height rational with r(b) < 0 and b != a (0 first)
    let b_s = {
        let mut choice = None;
        for cand in 0..100i64 {
            for s in [cand, -cand] {
                let t = Rational::from(s);
                if t != a_s && short.r_eval(&t).is_negative() {
                    choice = Some(t);
                    break;
                }
            }
            if choice.is_some() {
                break;
            }
        }
        choice.ok_or_else(|| PipelineError::Internal("no b with r(b) < 0 found".into()))?
    };
    let r_a = short.r_eval(&a_s);
    let r_b = short.r_eval(&b_s);
    checks.push(
        CheckBuilder::new(
            "surface.5",
            "r(a) is totally positive and r(b) is totally negative over the real quadratic field",
            "sign conditions on the marked fibres",
            true,
        )
        .param("a", &a_s)
        .param("b", &b_s)
        .param("point_x", &px)
        .param("point_y", &py)
        .run(|| {
            let qa = QuadFieldElement::from_rational(a_s.clone(), BigInt::from(params.c));
            let qb = QuadFieldElement::from_rational(b_s.clone(), BigInt::from(params.c));
            let (sa, sb) = ec::total_positivity_checks(&short, &qa, &qb);
            let ok = sa.totally_positive && sb.totally_negative;
            (
                if ok { Status::Pass } else { Status::Fail },
                Witness::TotalSigns {
                    short_p: short.p.to_string(),
                    short_q: short.q.to_string(),
                    a: a_s.to_string(),
                    b: b_s.to_string(),
                    r_a: r_a.to_string(),
                    r_b: r_b.to_string(),
                    r_a_totally_positive: sa.totally_positive,
                    r_b_totally_negative: sb.totally_negative,
                },
            )
        }),
    );

    // (6) the Albert subform is isotropic at every place of the base field
    let unit_form = DiagonalForm::from_ints(&[1, 1, 1]);
    let phi = DiagonalForm::new(vec![
        r_b.clone(),
        Rational::one(),
        Rational::one(),
        Rational::one(),
    ]);
    checks.push(
        CheckBuilder::new(
            "surface.6",
            "the subform <r(b),1,1,1> is isotropic at every completion of the base field: both real embeddings by the sign of r(b), every odd place through the rational unit form, and the place over 2 by a lifting certificate",
            "local isotropy of the Albert subform",
            true,
        )
        .param("c", params.c)
        .run(|| {
            let q_places = match local::anisotropic_places(&unit_form) {
                Ok(s) => s,
                Err(e) => return (Status::Fail, Witness::Note { text: e.to_string() }),
            };
            let expected: BTreeSet<Place> =
                BTreeSet::from([Place::finite_u64(2), Place::Real]);
            let units_ok = q_places == expected;
            let real_ok = phi.coeffs().iter().any(|x| x.is_positive())
                && phi.coeffs().iter().any(|x| x.is_negative());
            let qcoeffs: Vec<QuadFieldElement> = [1i64, 1, 1]
                .iter()
                .map(|&u| {
                    QuadFieldElement::from_rational(Rational::from(u), BigInt::from(params.c))
                })
                .collect();
            match quadfield::is_isotropic_quadfield_at_two(
                &qcoeffs,
                &BigInt::from(params.c),
                params.precision,
            ) {
                Ok(cert) => {
                    let iso = cert.status == LocalCertStatus::Isotropic && cert.verify();
                    (
                        if units_ok && real_ok && iso { Status::Pass } else { Status::Fail },
                        Witness::SubformLocal {
                            base_disc: params.c,
                            form: form_strings(&phi),
                            q_anisotropic_places: places_vec(&q_places),
                            hensel: HenselData::from_certificate(&cert),
                            real_isotropic_both_embeddings: real_ok,
                        },
                    )
                }
                Err(e) => (Status::Inconclusive, Witness::Note { text: e.to_string() }),
            }
        }),
    );

    // the symbol algebra A = ((x-a)/(x-b), r(b)) tensor (-1,-1)
    let algebra = SymbolAlgebra::new(vec![
        (
            RatFunc::new(QPoly::linear(&a_s), QPoly::linear(&b_s)),
            RatFunc::constant(r_b.clone()),
        ),
        (
            RatFunc::constant(Rational::from(-1)),
            RatFunc::constant(Rational::from(-1)),
        ),
    ]);

    // (7) ramification locus and the pullback residues
    checks.push(
        CheckBuilder::new(
            "surface.7",
            "the algebra ramifies exactly at x = a and x = b; the residue pulled back to the curve is trivial above b and nontrivial at the marked point above a",
            "residues of the conic bundle algebra",
            true,
        )
        .run(|| {
            let locus = match funcfield::ramification_locus(&algebra, &base) {
                Ok(l) => l,
                Err(e) => return (Status::Fail, Witness::Note { text: e.to_string() }),
            };
            let expected: BTreeSet<ClosedPoint> = BTreeSet::from([
                ClosedPoint::rational(a_s.clone()),
                ClosedPoint::rational(b_s.clone()),
            ]);
            let locus_ok = locus == expected;
            let r_poly = short.r_poly();
            let at_b = funcfield::pullback_residue_to_curve(
                &algebra,
                &r_poly,
                &FibreX::Rat(b_s.clone()),
                &base,
            );
            let at_a = funcfield::pullback_residue_to_curve(
                &algebra,
                &r_poly,
                &FibreX::Rat(a_s.clone()),
                &base,
            );
            match (at_b, at_a) {
                (Ok(rb_res), Ok(ra_res)) => {
                    let ok = locus_ok && rb_res.trivial && !ra_res.trivial;
                    let locus_str: Vec<String> =
                        locus.iter().map(|p| p.to_string()).collect();
                    (
                        if ok { Status::Pass } else { Status::Fail },
                        Witness::Ramification {
                            base_disc: params.c,
                            a: a_s.to_string(),
                            b: b_s.to_string(),
                            r_b_class: r_b.to_string(),
                            locus: locus_str,
                        },
                    )
                }
                _ => (
                    Status::Fail,
                    Witness::Note {
                        text: "pullback residue computation failed".into(),
                    },
                ),
            }
        }),
    );
    checks.push(
        CheckBuilder::new(
            "surface.7b",
            "residue field degrees above the marked fibres match: degree 2 at both, trivial class above b, nontrivial class above a",
            "residue fields of the marked curve points",
            true,
        )
        .run(|| {
            let r_poly = short.r_poly();
            let at_b = funcfield::pullback_residue_to_curve(
                &algebra,
                &r_poly,
                &FibreX::Rat(b_s.clone()),
                &base,
            );
            let at_a = funcfield::pullback_residue_to_curve(
                &algebra,
                &r_poly,
                &FibreX::Rat(a_s.clone()),
                &base,
            );
            match (at_b, at_a) {
                (Ok(rb_res), Ok(ra_res)) => {
                    let ok = rb_res.trivial && !ra_res.trivial;
                    (
                        if ok { Status::Pass } else { Status::Fail },
                        Witness::PullbackResidues {
                            base_disc: params.c,
                            short_p: short.p.to_string(),
                            short_q: short.q.to_string(),
                            a: a_s.to_string(),
                            b: b_s.to_string(),
                            at_b_trivial: rb_res.trivial,
                            at_b_field_degree: rb_res.field_degree,
                            at_a_trivial: ra_res.trivial,
                            at_a_field_degree: ra_res.field_degree,
                        },
                    )
                }
                _ => (
                    Status::Fail,
                    Witness::Note {
                        text: "pullback residue computation failed".into(),
                    },
                ),
            }
        }),
    );

    // (8) value at infinity and the fibre over the origin
    checks.push(
        CheckBuilder::new(
            "surface.8",
            "the algebra specializes at infinity to the class of (-1, -1): the fibre over the origin is the sum-of-three-squares conic, insoluble exactly at the real embeddings of the base field",
            "the fibre over the origin of the curve",
            true,
        )
        .run(|| {
            let val = funcfield::value_at_point(&algebra, &ClosedPoint::Infinity, &base);
            let (u, w) = match val {
                Ok(p) => p,
                Err(e) => return (Status::Fail, Witness::Note { text: e.to_string() }),
            };
            let pair_ok = u == Rational::from(-1) && w == Rational::from(-1);
            let q_places = match local::anisotropic_places(&unit_form) {
                Ok(s) => s,
                Err(e) => return (Status::Fail, Witness::Note { text: e.to_string() }),
            };
            let expected: BTreeSet<Place> =
                BTreeSet::from([Place::finite_u64(2), Place::Real]);
            let qcoeffs: Vec<QuadFieldElement> = [1i64, 1, 1]
                .iter()
                .map(|&x| {
                    QuadFieldElement::from_rational(Rational::from(x), BigInt::from(params.c))
                })
                .collect();
            let hensel_iso = match quadfield::is_isotropic_quadfield_at_two(
                &qcoeffs,
                &BigInt::from(params.c),
                params.precision,
            ) {
                Ok(cert) => cert.status == LocalCertStatus::Isotropic,
                Err(_) => false,
            };
            let ok = pair_ok && q_places == expected && hensel_iso;
            (
                if ok { Status::Pass } else { Status::Fail },
                Witness::ValueAtInfinity {
                    base_disc: params.c,
                    a: a_s.to_string(),
                    b: b_s.to_string(),
                    r_b_class: r_b.to_string(),
                    pair: [u.to_string(), w.to_string()],
                    fibre_form: form_strings(&unit_form),
                    fibre_anisotropic_q_places: places_vec(&q_places),
                    hensel_at_two_isotropic: hensel_iso,
                },
            )
        }),
    );

    // (9a) non-divisibility of the marked point
    checks.push(
        CheckBuilder::new(
            "surface.9a",
            "the marked point is not divisible by any prime up to 13, witnessed at split primes",
            "reduction witnesses against divisibility",
            false,
        )
        .param("prime_bound", params.prime_bound)
        .run(|| {
            let mut certs = Vec::new();
            for &ell in &params.ells {
                match ec::nondivisibility_certificate(
                    &bmodel,
                    &kp,
                    &field,
                    ell,
                    params.prime_bound,
                ) {
                    Ok(cert) => certs.push(cert),
                    Err(_) => {
                        return (
                            Status::Inconclusive,
                            Witness::Note {
                                text: format!(
                                    "no witness for l = {} below {}",
                                    ell, params.prime_bound
                                ),
                            },
                        )
                    }
                }
            }
            (
                Status::Pass,
                Witness::Nondivisibility {
                    curve_id: bmodel.id(),
                    point: kp.clone(),
                    field_c: params.c,
                    field_d: params.d,
                    certs,
                },
            )
        }),
    );

    // (9b) integrality of the halving fibre
    checks.push(
        CheckBuilder::new(
            "surface.9b",
            "the halving fibre of the marked point is integral: its x-quartic is irreducible over the biquadratic field, witnessed modulo a split prime",
            "integrality of the degree-4 fibre",
            false,
        )
        .param("prime_bound", params.prime_bound)
        .run(
            || match ec::preimage_integrality_n2(
                &short,
                &a_s,
                &w_s,
                params.d,
                &field,
                params.prime_bound,
            ) {
                Ok(cert) => (Status::Pass, Witness::Integrality { cert }),
                Err(ec::EcError::Inconclusive { bound, what }) => (
                    Status::Inconclusive,
                    Witness::Note {
                        text: format!("no {} below {}", what, bound),
                    },
                ),
                Err(e) => (Status::Fail, Witness::Note { text: e.to_string() }),
            },
        ),
    );

    if let Some(c) = cache {
        c.flush()
            .map_err(|e| PipelineError::Internal(e.to_string()))?;
    }
    Ok(Report::assemble("surface", checks))
}

// ---------------------------------------------------------------------
// round-trip re-verification of stored reports
// ---------------------------------------------------------------------

fn parse_curve(id: &str) -> Option<WeierstrassCurve> {
    let parts: Vec<&str> = id.split(';').collect();
    if parts.len() != 5 {
        return None;
    }
    let q: Option<Vec<Rational>> = parts.iter().map(|s| s.parse().ok()).collect();
    let q = q?;
    WeierstrassCurve::new(
        q[0].clone(),
        q[1].clone(),
        q[2].clone(),
        q[3].clone(),
        q[4].clone(),
    )
    .ok()
}

/// Re-verifies a single passing check from its witness payload.
pub fn recheck_witness(witness: &Witness) -> bool {
    match witness {
        Witness::None | Witness::Note { .. } => true,
        Witness::PlaceSet { form, places } => {
            let f = match parse_form(form) {
                Some(f) => f,
                None => return false,
            };
            match local::anisotropic_places(&f) {
                Ok(set) => places_vec(&set) == *places,
                Err(_) => false,
            }
        }
        Witness::SquareChecks { checks } => checks.iter().all(|(x, place, expected)| {
            let xq: Option<Rational> = x.parse().ok();
            match (xq, parse_place(place)) {
                (Some(x), Some(v)) => arith::is_square_in_qp(&x, &v) == *expected,
                _ => false,
            }
        }),
        Witness::Hilbert { a, b, place, value } => {
            let (aq, bq): (Option<Rational>, Option<Rational>) = (a.parse().ok(), b.parse().ok());
            match (aq, bq, parse_place(place)) {
                (Some(a), Some(b), Some(v)) => local::hilbert_symbol(&a, &b, &v) == *value,
                _ => false,
            }
        }
        Witness::IsotropicVector { form, vector } => {
            let f = match parse_form(form) {
                Some(f) => f,
                None => return false,
            };
            let v: Option<Vec<Rational>> = vector.iter().map(|s| s.parse().ok()).collect();
            match v {
                Some(v) => {
                    v.iter().any(|x| !x.is_zero()) && f.evaluate(&v).is_zero()
                }
                None => false,
            }
        }
        Witness::DegenerateFibres {
            roots,
            multiplicities,
            residual_form,
        } => {
            let rs: Option<Vec<Rational>> = roots.iter().map(|s| s.parse().ok()).collect();
            match rs {
                Some(rs) => {
                    let distinct = rs
                        .iter()
                        .enumerate()
                        .all(|(i, a)| rs.iter().skip(i + 1).all(|b| a != b));
                    distinct
                        && multiplicities.iter().all(|&m| m == 1)
                        && residual_form.len() == 3
                }
                None => false,
            }
        }
        Witness::SplitPrimes { disc, primes } => primes.iter().all(|&p| {
            funcfield::place_splits_in_quad(&BigInt::from(p), &BigInt::from(*disc))
        }),
        Witness::CurveInvariants {
            curve_id,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            short_p,
            short_q,
        } => match parse_curve(curve_id) {
            Some(e) => {
                let inv = e.invariants();
                let s = e.short_model();
                inv.b2.to_string() == *b2
                    && inv.b4.to_string() == *b4
                    && inv.b6.to_string() == *b6
                    && inv.b8.to_string() == *b8
                    && inv.c4.to_string() == *c4
                    && inv.c6.to_string() == *c6
                    && inv.disc.to_string() == *disc
                    && s.p.to_string() == *short_p
                    && s.q.to_string() == *short_q
            }
            None => false,
        },
        Witness::TorsionChain { curve_id, entries } => match parse_curve(curve_id) {
            Some(e) => entries.iter().all(|(d, cert)| {
                match e.quadratic_twist(&BigInt::from(*d)) {
                    Ok(t) => cert.verify(&t),
                    Err(_) => false,
                }
            }),
            None => false,
        },
        Witness::RationalPoints { curves, points, .. } => {
            curves.len() == points.len()
                && curves.iter().zip(points.iter()).all(|(id, pts)| {
                    match parse_curve(id) {
                        Some(e) => {
                            !pts.is_empty()
                                && pts.iter().all(|[x, y]| {
                                    let p: (Option<Rational>, Option<Rational>) =
                                        (x.parse().ok(), y.parse().ok());
                                    match p {
                                        (Some(x), Some(y)) => {
                                            ec::AffinePoint { x, y }.on_curve(&e)
                                        }
                                        _ => false,
                                    }
                                })
                        }
                        None => false,
                    }
                })
        }
        Witness::Mod2Image {
            curve_id,
            irreducible,
            disc_nonsquare,
        } => match parse_curve(curve_id) {
            Some(e) => {
                ec::mod2_image_full(&e).map(|ok| ok == (*irreducible && *disc_nonsquare))
                    == Ok(true)
            }
            None => false,
        },
        Witness::GaloisReports { curve_id, reports } => match parse_curve(curve_id) {
            Some(e) => reports.iter().all(|rep|

                match ec::mod_l_surjectivity_witnesses(&e, rep.ell, rep.prime_bound) {
                    Ok(fresh) => fresh == *rep,
                    Err(_) => false,
                }),
            None => false,
        },
        Witness::TotalSigns {
            short_p,
            short_q,
            a,
            b,
            r_a,
            r_b,
            r_a_totally_positive,
            r_b_totally_negative,
        } => {
            let vals: Option<(Rational, Rational, Rational, Rational, Rational, Rational)> = (|| {
                Some((
                    short_p.parse().ok()?,
                    short_q.parse().ok()?,
                    a.parse().ok()?,
                    b.parse().ok()?,
                    r_a.parse().ok()?,
                    r_b.parse().ok()?,
                ))
            })();
            match vals {
                Some((p, q, a, b, ra, rb)) => {
                    let short = ec::ShortModel::direct(p, q);
                    short.r_eval(&a) == ra
                        && short.r_eval(&b) == rb
                        && (ra.is_positive() == *r_a_totally_positive)
                        && (rb.is_negative() == *r_b_totally_negative)
                }
                None => false,
            }
        }
        Witness::SubformLocal {
            base_disc,
            form,
            q_anisotropic_places,
            hensel,
            real_isotropic_both_embeddings,
        } => {
            let unit_form = DiagonalForm::from_ints(&[1, 1, 1]);
            let q_ok = match local::anisotropic_places(&unit_form) {
                Ok(s) => places_vec(&s) == *q_anisotropic_places,
                Err(_) => false,
            };
            let cert = match hensel.to_certificate() {
                Some(c) => c,
                None => return false,
            };
            let real_ok = match parse_form(form) {
                Some(f) => {
                    (f.coeffs().iter().any(|x| x.is_positive())
                        && f.coeffs().iter().any(|x| x.is_negative()))
                        == *real_isotropic_both_embeddings
                }
                None => false,
            };
            q_ok && real_ok
                && cert.c == BigInt::from(*base_disc)
                && cert.status == LocalCertStatus::Isotropic
                && cert.verify()
        }
        Witness::Ramification {
            base_disc,
            a,
            b,
            r_b_class,
            locus,
        } => {
            let vals: Option<(Rational, Rational, Rational)> =
                (|| Some((a.parse().ok()?, b.parse().ok()?, r_b_class.parse().ok()?)))();
            match vals {
                Some((a, b, rb)) => {
                    let algebra = SymbolAlgebra::new(vec![
                        (
                            RatFunc::new(QPoly::linear(&a), QPoly::linear(&b)),
                            RatFunc::constant(rb),
                        ),
                        (
                            RatFunc::constant(Rational::from(-1)),
                            RatFunc::constant(Rational::from(-1)),
                        ),
                    ]);
                    let base = BaseField::Quadratic(BigInt::from(*base_disc));
                    match funcfield::ramification_locus(&algebra, &base) {
                        Ok(l) => {
                            let got: Vec<String> = l.iter().map(|p| p.to_string()).collect();
                            got == *locus
                        }
                        Err(_) => false,
                    }
                }
                None => false,
            }
        }
        Witness::PullbackResidues {
            base_disc,
            short_p,
            short_q,
            a,
            b,
            at_b_trivial,
            at_b_field_degree,
            at_a_trivial,
            at_a_field_degree,
        } => {
            let vals: Option<(Rational, Rational, Rational, Rational)> = (|| {
                Some((
                    short_p.parse().ok()?,
                    short_q.parse().ok()?,
                    a.parse().ok()?,
                    b.parse().ok()?,
                ))
            })();
            match vals {
                Some((p, q, a, b)) => {
                    let short = ec::ShortModel::direct(p, q);
                    let rb = short.r_eval(&b);
                    let algebra = SymbolAlgebra::new(vec![
                        (
                            RatFunc::new(QPoly::linear(&a), QPoly::linear(&b)),
                            RatFunc::constant(rb),
                        ),
                        (
                            RatFunc::constant(Rational::from(-1)),
                            RatFunc::constant(Rational::from(-1)),
                        ),
                    ]);
                    let base = BaseField::Quadratic(BigInt::from(*base_disc));
                    let r_poly = short.r_poly();
                    let rb_res = funcfield::pullback_residue_to_curve(
                        &algebra,
                        &r_poly,
                        &FibreX::Rat(b),
                        &base,
                    );
                    let ra_res = funcfield::pullback_residue_to_curve(
                        &algebra,
                        &r_poly,
                        &FibreX::Rat(a),
                        &base,
                    );
                    match (rb_res, ra_res) {
                        (Ok(rb_res), Ok(ra_res)) => {
                            rb_res.trivial == *at_b_trivial
                                && rb_res.field_degree == *at_b_field_degree
                                && ra_res.trivial == *at_a_trivial
                                && ra_res.field_degree == *at_a_field_degree
                        }
                        _ => false,
                    }
                }
                None => false,
            }
        }
        Witness::ValueAtInfinity {
            base_disc,
            a,
            b,
            r_b_class,
            pair,
            fibre_form,
            fibre_anisotropic_q_places,
            hensel_at_two_isotropic,
        } => {
            let vals: Option<(Rational, Rational, Rational)> =
                (|| Some((a.parse().ok()?, b.parse().ok()?, r_b_class.parse().ok()?)))();
            match vals {
                Some((a, b, rb)) => {
                    let algebra = SymbolAlgebra::new(vec![
                        (
                            RatFunc::new(QPoly::linear(&a), QPoly::linear(&b)),
                            RatFunc::constant(rb),
                        ),
                        (
                            RatFunc::constant(Rational::from(-1)),
                            RatFunc::constant(Rational::from(-1)),
                        ),
                    ]);
                    let base = BaseField::Quadratic(BigInt::from(*base_disc));
                    let val_ok =
                        match funcfield::value_at_point(&algebra, &ClosedPoint::Infinity, &base)
                        {
                            Ok((u, w)) => u.to_string() == pair[0] && w.to_string() == pair[1],
                            Err(_) => false,
                        };
                    let f = match parse_form(fibre_form) {
                        Some(f) => f,
                        None => return false,
                    };
                    let places_ok = match local::anisotropic_places(&f) {
                        Ok(s) => places_vec(&s) == *fibre_anisotropic_q_places,
                        Err(_) => false,
                    };
                    let qcoeffs: Vec<QuadFieldElement> = f
                        .coeffs()
                        .iter()
                        .map(|x| {
                            QuadFieldElement::from_rational(x.clone(), BigInt::from(*base_disc))
                        })
                        .collect();
                    let hensel_ok = match quadfield::is_isotropic_quadfield_at_two(
                        &qcoeffs,
                        &BigInt::from(*base_disc),
                        12,
                    ) {
                        Ok(cert) => {
                            (cert.status == LocalCertStatus::Isotropic)
                                == *hensel_at_two_isotropic
                        }
                        Err(_) => false,
                    };
                    val_ok && places_ok && hensel_ok
                }
                None => false,
            }
        }
        Witness::Nondivisibility {
            curve_id,
            point,
            field_c,
            field_d,
            certs,
        } => match parse_curve(curve_id) {
            Some(e) => {
                let field = BiquadField {
                    c: *field_c,
                    d: *field_d,
                };
                certs.iter().all(|cert| cert.verify(&e, point, &field))
            }
            None => false,
        },
        Witness::Integrality { cert } => cert.verify(),
        Witness::CohomologyRow {
            group,
            n,
            order,
            h0_size,
            invariant_factors,
            exponent,
            annihilator_bound,
        } => {
            let g = match group.as_str() {
                "sl2plus" => cohomology::sl2_plus(*n, DEFAULT_GROUP_CAP),
                "sl2" => cohomology::sl2(*n, DEFAULT_GROUP_CAP),
                "gl2" => cohomology::gl2(*n, DEFAULT_GROUP_CAP),
                _ => return false,
            };
            let g = match g {
                Ok(g) => g,
                Err(_) => return false,
            };
            if g.order() as u64 != *order {
                return false;
            }
            if let Some(size) = h0_size {
                if cohomology::h0(&g).len() as u64 != *size {
                    return false;
                }
            }
            if invariant_factors.is_some() || exponent.is_some() {
                match cohomology::h1(&g) {
                    Ok(h) => {
                        if let Some(f) = invariant_factors {
                            if h.invariant_factors != *f {
                                return false;
                            }
                        }
                        if let Some(e) = exponent {
                            if h.exponent != *e {
                                return false;
                            }
                        }
                        if let Some(bound) = annihilator_bound {
                            if bound % h.exponent != 0 {
                                return false;
                            }
                        }
                    }
                    Err(_) => return false,
                }
            }
            true
        }
    }
}

/// Re-verifies every passing row of a report; returns per-check results.
pub fn recheck_report(report: &Report) -> Vec<(String, bool)> {
    report
        .checks
        .iter()
        .map(|c| {
            let ok = if c.status == Status::Pass {
                recheck_witness(&c.witness)
            } else {
                true
            };
            (c.check_id.clone(), ok)
        })
        .collect()
}
