//! Weierstrass models over Q: invariants, short models, quadratic twists,
//! naive point counting, rational point search, and the certificate
//! machinery (torsion, Galois image witnesses, divisibility, fibre
//! integrality) built on reductions at small primes.

mod cache;
mod certificates;
mod counting;
mod points;

pub use cache::{trace_scan_cached, ApCache};
pub use certificates::{
    biquadratic_torsion_free, halving_quartic, mod2_image_full,
    mod_l_surjectivity_with_traces, mod_l_surjectivity_witnesses,
    nondivisibility_certificate, preimage_integrality_n2, torsion_trivial_certificate,
    untwist_point, BiquadField, IntegralityCertificate, KPoint,
    NondivisibilityCertificate, SurjectivityVerdict, SurjectivityWitnessReport,
    TorsionCertificate,
};
pub use counting::{count_points_mod_p, trace_scan, trace_scan_seq, CurveModP, TraceRecord};
pub use points::{reduction, search_rational_points, search_rational_points_seq, AffinePoint, ModPoint};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, ArithError};
use crate::funcfield::QPoly;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EcError {
    SingularCurve,
    BadReduction { p: u64, bad_primes: Vec<BigInt> },
    PrimeTooLarge { p: u64, cap: u64 },
    NonIntegralModel,
    NotSquarefree { d: BigInt },
    /// Searches that exhausted their bound without reaching a
    /// certificate; carries the bound for the report.
    Inconclusive { bound: u64, what: String },
    Arith(ArithError),
}

impl fmt::Display for EcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EcError::SingularCurve => write!(f, "discriminant is zero"),
            EcError::BadReduction { p, bad_primes } => {
                write!(f, "bad reduction at {} (bad primes {:?})", p, bad_primes)
            }
            EcError::PrimeTooLarge { p, cap } => {
                write!(f, "prime {} above the naive counting cap {}", p, cap)
            }
            EcError::NonIntegralModel => write!(f, "operation needs integral coefficients"),
            EcError::NotSquarefree { d } => write!(f, "{} is not squarefree", d),
            EcError::Inconclusive { bound, what } => {
                write!(f, "inconclusive: no {} found below bound {}", what, bound)
            }
            EcError::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for EcError {}

impl From<ArithError> for EcError {
    fn from(e: ArithError) -> Self {
        EcError::Arith(e)
    }
}

/// Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a1: Rational,
    pub a2: Rational,
    pub a3: Rational,
    pub a4: Rational,
    pub a6: Rational,
}

/// The b-, c- and discriminant quantities of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInvariants {
    pub b2: Rational,
    pub b4: Rational,
    pub b6: Rational,
    pub b8: Rational,
    pub c4: Rational,
    pub c6: Rational,
    pub disc: Rational,
}

impl WeierstrassCurve {
    pub fn new(
        a1: Rational,
        a2: Rational,
        a3: Rational,
        a4: Rational,
        a6: Rational,
    ) -> Result<Self, EcError> {
        let curve = WeierstrassCurve { a1, a2, a3, a4, a6 };
        if curve.invariants().disc.is_zero() {
            return Err(EcError::SingularCurve);
        }
        Ok(curve)
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self, EcError> {
        Self::new(
            Rational::from(a[0]),
            Rational::from(a[1]),
            Rational::from(a[2]),
            Rational::from(a[3]),
            Rational::from(a[4]),
        )
    }

    /// The curve y^2 + y = x^3 + x^2 - 12x - 21 of conductor 67.
    pub fn e67() -> Self {
        Self::from_ints([0, 1, 1, -12, -21]).expect("nonsingular")
    }

    /// Standard formulas; the b8 and 1728 disc identities are asserted.
    pub fn invariants(&self) -> CurveInvariants {
        let two = Rational::from(2);
        let three = Rational::from(3);
        let four = Rational::from(4);
        let a1 = &self.a1;
        let a2 = &self.a2;
        let a3 = &self.a3;
        let a4 = &self.a4;
        let a6 = &self.a6;
        let b2 = &(a1 * a1) + &(&four * a2);
        let b4 = &(&two * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&four * a6);
        let b8 = &(&(&(&(a1 * a1) * a6) + &(&(&four * a2) * a6)) - &(&(a1 * a3) * a4))
            + &(&(a2 * &(a3 * a3)) - &(a4 * a4));
        let c4 = &(&b2 * &b2) - &(&Rational::from(24) * &b4);
        let c6 = &(&(-&(&b2 * &b2) * &b2) + &(&(&Rational::from(36) * &b2) * &b4))
            - &(&Rational::from(216) * &b6);
        let b4cubed = b4.pow(3);
        let disc = &(&(&(-&(&b2 * &b2) * &b8) - &(&Rational::from(8) * &b4cubed))
            - &(&Rational::from(27) * &(&b6 * &b6)))
            + &(&(&(&Rational::from(9) * &b2) * &b4) * &b6);
        // consistency of the standard identities
        debug_assert_eq!(&four * &b8, &(&b2 * &b6) - &(&b4 * &b4));
        debug_assert_eq!(
            &Rational::from(1728) * &disc,
            &c4.pow(3) - &(&c6 * &c6)
        );
        let _ = three;
        CurveInvariants {
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
        }
    }

    pub fn discriminant(&self) -> Rational {
        self.invariants().disc
    }

    /// True when all five coefficients are integers.
    pub fn is_integral(&self) -> bool {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
            .iter()
            .all(|a| a.is_integer())
    }

    /// Canonical id string used by the trace cache: the five coefficients
    /// separated by semicolons.
    pub fn id(&self) -> String {
        format!(
            "{};{};{};{};{}",
            self.a1, self.a2, self.a3, self.a4, self.a6
        )
    }

    /// Short model y^2 = x^3 + p x + q with p = -27 c4, q = -54 c6 and
    /// substitution x_s = 36 x + 3 b2, y_s = 216 y + 108(a1 x + a3).
    pub fn short_model(&self) -> ShortModel {
        let inv = self.invariants();
        let p = &Rational::from(-27) * &inv.c4;
        let q = &Rational::from(-54) * &inv.c6;
        ShortModel {
            p,
            q,
            b2: inv.b2,
            a1: self.a1.clone(),
            a3: self.a3.clone(),
        }
    }

    /// The quadratic twist by squarefree d, as the integral model
    /// y^2 = x^3 + b2 d x^2 + 8 b4 d^2 x + 16 b6 d^3 (the curve itself
    /// when d = 1).
    pub fn quadratic_twist(&self, d: &BigInt) -> Result<WeierstrassCurve, EcError> {
        if d.is_zero() {
            return Err(EcError::NotSquarefree { d: d.clone() });
        }
        if arith::squarefree_part(d)? != *d {
            return Err(EcError::NotSquarefree { d: d.clone() });
        }
        if d.is_one() {
            return Ok(self.clone());
        }
        let inv = self.invariants();
        let dq = Rational::from_int(d.clone());
        WeierstrassCurve::new(
            Rational::zero(),
            &inv.b2 * &dq,
            Rational::zero(),
            &(&Rational::from(8) * &inv.b4) * &dq.pow(2),
            &(&Rational::from(16) * &inv.b6) * &dq.pow(3),
        )
    }

    /// Odd primes dividing the discriminant numerator or any coefficient
    /// denominator, plus 2 and denominator primes: the places where this
    /// model cannot be reduced.
    pub fn bad_primes(&self) -> Result<Vec<BigInt>, EcError> {
        let mut bad: Vec<BigInt> = Vec::new();
        let disc = self.discriminant();
        for (p, _) in arith::factorize(disc.numer())?.factors {
            bad.push(p);
        }
        for a in [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6] {
            if !a.is_integer() {
                for (p, _) in arith::factorize(a.denom())?.factors {
                    if !bad.contains(&p) {
                        bad.push(p);
                    }
                }
            }
        }
        bad.sort();
        Ok(bad)
    }

    /// Good reduction test for this model at p.
    pub fn has_good_reduction(&self, p: u64) -> Result<bool, EcError> {
        let pb = BigInt::from(p);
        for a in [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6] {
            if arith::int_valuation(a.denom(), &pb) > 0 {
                return Ok(false);
            }
        }
        let disc = self.discriminant();
        Ok(arith::int_valuation(disc.numer(), &pb) == 0)
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y^2 + {}xy + {}y = x^3 + {}x^2 + {}x + {}",
            self.a1, self.a3, self.a2, self.a4, self.a6
        )
    }
}

/// Short model y^2 = r(x) = x^3 + p x + q, with the substitution data
/// linking it to the long model it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortModel {
    pub p: Rational,
    pub q: Rational,
    b2: Rational,
    a1: Rational,
    a3: Rational,
}

impl ShortModel {
    pub fn direct(p: Rational, q: Rational) -> Self {
        ShortModel {
            p,
            q,
            b2: Rational::zero(),
            a1: Rational::zero(),
            a3: Rational::zero(),
        }
    }

    /// r(x) as a polynomial.
    pub fn r_poly(&self) -> QPoly {
        QPoly::new(vec![
            self.q.clone(),
            self.p.clone(),
            Rational::zero(),
            Rational::one(),
        ])
    }

    pub fn r_eval(&self, x: &Rational) -> Rational {
        &(&x.pow(3) + &(&self.p * x)) + &self.q
    }

    /// -4p^3 - 27q^2; same sign as the long-model discriminant.
    pub fn discriminant(&self) -> Rational {
        &(&Rational::from(-4) * &self.p.pow(3)) - &(&Rational::from(27) * &self.q.pow(2))
    }

    /// Short-model coordinates of a long-model point.
    pub fn to_short(&self, x: &Rational, y: &Rational) -> (Rational, Rational) {
        let xs = &(&Rational::from(36) * x) + &(&Rational::from(3) * &self.b2);
        let ys = &(&Rational::from(216) * y)
            + &(&Rational::from(108) * &(&(&self.a1 * x) + &self.a3));
        (xs, ys)
    }

    /// On-curve test in short coordinates.
    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        (y * y) == self.r_eval(x)
    }
}

/// Sign data of r at a rational argument under every real embedding of
/// the (totally real) base field; rational arguments embed identically,
/// so the two embeddings agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalSign {
    pub totally_positive: bool,
    pub totally_negative: bool,
}

/// Signs of r(a) and r(b) under every real embedding.
pub fn total_positivity_checks(
    short: &ShortModel,
    a: &crate::quadfield::QuadFieldElement,
    b: &crate::quadfield::QuadFieldElement,
) -> (TotalSign, TotalSign) {
    let sign_of = |v: &crate::quadfield::QuadFieldElement| -> TotalSign {
        let val = short.r_poly().eval_quad(v);
        assert!(!val.is_zero(), "r vanishes at the argument");
        if v.c.is_positive() {
            TotalSign {
                totally_positive: val.is_totally_positive(),
                totally_negative: val.is_totally_negative(),
            }
        } else {
            // imaginary quadratic: no real embeddings of the field; use
            // the rational part convention only for rational inputs
            let s = val.a.signum();
            TotalSign {
                totally_positive: s > 0 && val.b.is_zero(),
                totally_negative: s < 0 && val.b.is_zero(),
            }
        }
    };
    (sign_of(a), sign_of(b))
}

/// Convenience for rational arguments: one embedding.
pub fn total_sign_rational(short: &ShortModel, t: &Rational) -> TotalSign {
    let v = short.r_eval(t);
    assert!(!v.is_zero());
    TotalSign {
        totally_positive: v.is_positive(),
        totally_negative: v.is_negative(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn e67_invariants() {
        let e = WeierstrassCurve::e67();
        let inv = e.invariants();
        assert_eq!(inv.b2, q("4"));
        assert_eq!(inv.b4, q("-24"));
        assert_eq!(inv.b6, q("-83"));
        assert_eq!(inv.b8, q("-227"));
        assert_eq!(inv.c4, q("592"));
        assert_eq!(inv.c6, q("14408"));
        assert_eq!(inv.disc, q("-67"));
    }

    #[test]
    fn mordell_curve_discriminant() {
        // y^2 = x^3 + 1: disc = -16(27) = -432
        let e = WeierstrassCurve::from_ints([0, 0, 0, 0, 1]).unwrap();
        assert_eq!(e.discriminant(), q("-432"));
    }

    #[test]
    fn singular_rejected() {
        // y^2 = x^3: disc 0
        assert!(matches!(
            WeierstrassCurve::from_ints([0, 0, 0, 0, 0]),
            Err(EcError::SingularCurve)
        ));
    }

    #[test]
    fn short_model_of_e67() {
        let e = WeierstrassCurve::e67();
        let s = e.short_model();
        assert_eq!(s.p, q("-15984"));
        assert_eq!(s.q, q("-778032"));
        assert!(s.discriminant().is_negative());
        // the substitution maps curve points to curve points: use the
        // 2-adic. .. no rational points are known on E67, so verify the
        // transformation on the generic identity instead:
        // (216 y + 108(a1 x + a3))^2 = (36x + 3b2)^3 + p(36x+3b2) + q
        // whenever y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6;
        // spot-check with a synthetic curve that has a point
        let c = WeierstrassCurve::from_ints([1, 0, 1, 0, -1]).unwrap();
        // (x, y) = (1, 0): 0 + 0 + 0 = 1 + 0 + 0 - 1 = 0
        let sm = c.short_model();
        let (xs, ys) = sm.to_short(&q("1"), &q("0"));
        assert!(sm.contains(&xs, &ys));
    }

    #[test]
    fn short_model_fixed_point() {
        // for y^2 = x^3 + px + q the rescaled model has p' = 6^4 p and
        // q' = 6^6 q; -4p^3 - 27q^2 equals disc/16, so the short-model
        // discriminant is 6^12 / 16 times the long one
        let e = WeierstrassCurve::from_ints([0, 0, 0, -1, 1]).unwrap();
        let s = e.short_model();
        assert_eq!(s.p, &q("-1") * &q("6").pow(4));
        assert_eq!(s.q, &q("1") * &q("6").pow(6));
        let want = &(&e.discriminant() * &q("6").pow(12)) / &q("16");
        assert_eq!(s.discriminant(), want);
    }

    #[test]
    fn scaling_multiplies_disc_by_u12() {
        // (x, y) -> (u^2 x, u^3 y): coefficients scale as u^2, u^4, u^6
        // on a short model; disc gains u^12
        let e = WeierstrassCurve::from_ints([0, 0, 0, -1, 1]).unwrap();
        let u = q("3");
        let scaled = WeierstrassCurve::new(
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            &q("-1") * &u.pow(4),
            &q("1") * &u.pow(6),
        )
        .unwrap();
        assert_eq!(scaled.discriminant(), &e.discriminant() * &u.pow(12));
    }

    #[test]
    fn twist_models() {
        let e = WeierstrassCurve::e67();
        // d = 1 returns the curve unchanged
        assert_eq!(e.quadratic_twist(&BigInt::from(1)).unwrap(), e);
        let t10 = e.quadratic_twist(&BigInt::from(10)).unwrap();
        // bad primes of the twist model stay within {2, 3, 5, 67}: the
        // model's disc is 10^6 * 2^12 * (-67)
        let bad = t10.bad_primes().unwrap();
        for p in &bad {
            assert!(
                [2u64, 3, 5, 67].iter().any(|&q| BigInt::from(q) == *p),
                "unexpected bad prime {}",
                p
            );
        }
        assert!(e.quadratic_twist(&BigInt::from(12)).is_err());
        assert!(e.quadratic_twist(&BigInt::from(0)).is_err());
    }

    #[test]
    fn good_reduction_detection() {
        let e = WeierstrassCurve::e67();
        assert!(e.has_good_reduction(2).unwrap());
        assert!(e.has_good_reduction(3).unwrap());
        assert!(!e.has_good_reduction(67).unwrap());
    }

    #[test]
    fn total_positivity_of_r() {
        let e = WeierstrassCurve::e67();
        let s = e.short_model();
        assert_eq!(s.r_eval(&q("0")), q("-778032"));
        let at0 = total_sign_rational(&s, &q("0"));
        assert!(at0.totally_negative && !at0.totally_positive);
        // beyond the real root the cubic is positive
        let at300 = total_sign_rational(&s, &q("300"));
        assert!(at300.totally_positive);
        // quadratic argument in Q(sqrt(10))
        let a = crate::quadfield::QuadFieldElement::new(q("300"), q("1"), BigInt::from(10));
        let b = crate::quadfield::QuadFieldElement::from_rational(q("0"), BigInt::from(10));
        let (ra, rb) = total_positivity_checks(&s, &a, &b);
        assert!(ra.totally_positive);
        assert!(rb.totally_negative);
    }
}
