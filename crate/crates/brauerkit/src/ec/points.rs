//! Point arithmetic on reductions (affine group law on the long model
//! over F_p) and the bounded search for rational points x = m/e^2.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::counting::{addmod, curve_mod_p, mod_inv_u64, mulmod, submod, CurveModP};
use super::{EcError, WeierstrassCurve};
use crate::arith;
use crate::par;
use crate::rational::Rational;

/// Point of E(F_p) in affine coordinates, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModPoint {
    Infinity,
    Affine(u64, u64),
}

impl CurveModP {
    pub fn neg_point(&self, pt: ModPoint) -> ModPoint {
        match pt {
            ModPoint::Infinity => ModPoint::Infinity,
            ModPoint::Affine(x, y) => {
                // -(x, y) = (x, -y - a1 x - a3)
                let p = self.p;
                ModPoint::Affine(x, submod(0, addmod(y, self.ylin(x), p), p))
            }
        }
    }

    pub fn add_points(&self, a: ModPoint, b: ModPoint) -> ModPoint {
        let p = self.p;
        let (x1, y1) = match a {
            ModPoint::Infinity => return b,
            ModPoint::Affine(x, y) => (x, y),
        };
        let (x2, y2) = match b {
            ModPoint::Infinity => return a,
            ModPoint::Affine(x, y) => (x, y),
        };
        let lambda = if x1 != x2 {
            let dy = submod(y2, y1, p);
            let dx = submod(x2, x1, p);
            mulmod(dy, mod_inv_u64(dx, p).expect("prime field"), p)
        } else {
            // same x: either negatives of each other or a doubling
            if addmod(addmod(y1, y2, p), self.ylin(x1), p) == 0 {
                return ModPoint::Infinity;
            }
            // lambda = (3x^2 + 2 a2 x + a4 - a1 y) / (2y + a1 x + a3)
            let num = submod(
                addmod(
                    addmod(mulmod(3 % p, mulmod(x1, x1, p), p), mulmod(2 % p, mulmod(self.a2, x1, p), p), p),
                    self.a4,
                    p,
                ),
                mulmod(self.a1, y1, p),
                p,
            );
            let den = addmod(mulmod(2 % p, y1, p), self.ylin(x1), p);
            mulmod(num, mod_inv_u64(den, p).expect("nonzero denominator"), p)
        };
        // x3 = lambda^2 + a1 lambda - a2 - x1 - x2
        let x3 = submod(
            submod(
                submod(
                    addmod(mulmod(lambda, lambda, p), mulmod(self.a1, lambda, p), p),
                    self.a2,
                    p,
                ),
                x1,
                p,
            ),
            x2,
            p,
        );
        // y3 = lambda (x1 - x3) - y1 - a1 x3 - a3
        let y3 = submod(
            submod(mulmod(lambda, submod(x1, x3, p), p), y1, p),
            self.ylin(x3),
            p,
        );
        ModPoint::Affine(x3, y3)
    }

    pub fn scalar_mul(&self, mut k: u64, pt: ModPoint) -> ModPoint {
        let mut acc = ModPoint::Infinity;
        let mut base = pt;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_points(acc, base);
            }
            base = self.add_points(base, base);
            k >>= 1;
        }
        acc
    }
}

/// Group law access for a curve reduced at p.
pub fn reduction(curve: &WeierstrassCurve, p: u64) -> Result<CurveModP, EcError> {
    curve_mod_p(curve, p)
}

/// Affine rational point, exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffinePoint {
    pub x: Rational,
    pub y: Rational,
}

impl AffinePoint {
    pub fn on_curve(&self, curve: &WeierstrassCurve) -> bool {
        let lhs = &(&self.y * &self.y)
            + &(&(&(&curve.a1 * &self.x) + &curve.a3) * &self.y);
        let rhs = &(&(&self.x.pow(3) + &(&curve.a2 * &self.x.pow(2)))
            + &(&curve.a4 * &self.x))
            + &curve.a6;
        lhs == rhs
    }
}

/// All affine points with x = m/e^2, |m| <= bound, 1 <= e <= bound, on an
/// integral model. Complete within the box: every rational point of an
/// integral Weierstrass model has x of this shape.
///
/// n = e^3 (2y + a1 x + a3) satisfies
/// n^2 = 4(m^3 + a2 m^2 e^2 + a4 m e^4 + a6 e^6) + (a1 m e + a3 e^3)^2,
/// so each candidate is a single perfect-square test.
pub fn search_rational_points(
    curve: &WeierstrassCurve,
    bound: u64,
) -> Result<Vec<AffinePoint>, EcError> {
    let coeffs = integral_coeffs(curve)?;
    let es: Vec<u64> = (1..=bound).collect();
    let per_e: Vec<Vec<AffinePoint>> = par::map_collect(&es, |&e| {
        search_for_denominator(curve, &coeffs, e, bound)
    });
    let mut out = Vec::new();
    for v in per_e {
        out.extend(v);
    }
    Ok(out)
}

/// Sequential twin of `search_rational_points` for the benchmarks.
pub fn search_rational_points_seq(
    curve: &WeierstrassCurve,
    bound: u64,
) -> Result<Vec<AffinePoint>, EcError> {
    let coeffs = integral_coeffs(curve)?;
    let mut out = Vec::new();
    for e in 1..=bound {
        out.extend(search_for_denominator(curve, &coeffs, e, bound));
    }
    Ok(out)
}

fn integral_coeffs(curve: &WeierstrassCurve) -> Result<[BigInt; 5], EcError> {
    let as_int = |a: &Rational| -> Result<BigInt, EcError> {
        if a.is_integer() {
            Ok(a.numer().clone())
        } else {
            Err(EcError::NonIntegralModel)
        }
    };
    Ok([
        as_int(&curve.a1)?,
        as_int(&curve.a2)?,
        as_int(&curve.a3)?,
        as_int(&curve.a4)?,
        as_int(&curve.a6)?,
    ])
}

fn search_for_denominator(
    curve: &WeierstrassCurve,
    coeffs: &[BigInt; 5],
    e: u64,
    bound: u64,
) -> Vec<AffinePoint> {
    // i128 fast path when every term fits comfortably; otherwise exact
    let small: Option<[i128; 5]> = {
        let c: Vec<Option<i128>> = coeffs.iter().map(|c| c.to_i128()).collect();
        match (c[0], c[1], c[2], c[3], c[4]) {
            (Some(a1), Some(a2), Some(a3), Some(a4), Some(a6)) => {
                let m = bound as i128;
                let e6 = (e as i128).pow(6);
                let worst = 4
                    * (m.pow(3).abs()
                        + a2.abs() * m.pow(2) * (e as i128).pow(2)
                        + a4.abs() * m * (e as i128).pow(4)
                        + a6.abs() * e6)
                    + (a1.abs() * m * e as i128 + a3.abs() * (e as i128).pow(3)).pow(2);
                if worst < i128::MAX / 4 {
                    Some([a1, a2, a3, a4, a6])
                } else {
                    None
                }
            }
            _ => None,
        }
    };
    let mut out = Vec::new();
    match small {
        Some([a1, a2, a3, a4, a6]) => {
            let ei = e as i128;
            let e2 = ei * ei;
            let e3 = e2 * ei;
            let e4 = e2 * e2;
            let e6 = e4 * e2;
            for m in -(bound as i128)..=(bound as i128) {
                if num_integer::gcd(m.unsigned_abs() as u64, e) != 1 {
                    continue;
                }
                let t = 4 * (m * m * m + a2 * m * m * e2 + a4 * m * e4 + a6 * e6)
                    + (a1 * m * ei + a3 * e3) * (a1 * m * ei + a3 * e3);
                if let Some(n) = arith::square_root_i128(t) {
                    for nn in [n, -n] {
                        // y = (n/e^3 - a1 x - a3) / 2
                        let x = Rational::new(BigInt::from(m), BigInt::from(e2));
                        let y = &(&(&Rational::new(BigInt::from(nn), BigInt::from(e3))
                            - &(&curve.a1 * &x))
                            - &curve.a3)
                            / &Rational::from(2);
                        let pt = AffinePoint { x, y };
                        debug_assert!(pt.on_curve(curve));
                        if !out.contains(&pt) {
                            out.push(pt);
                        }
                        if n == 0 {
                            break;
                        }
                    }
                }
            }
        }
        None => {
            let ei = BigInt::from(e);
            let e2 = &ei * &ei;
            let e3 = &e2 * &ei;
            let e4 = &e2 * &e2;
            let e6 = &e4 * &e2;
            let [a1, a2, a3, a4, a6] = coeffs;
            for m in -(bound as i64)..=(bound as i64) {
                if num_integer::gcd(m.unsigned_abs(), e) != 1 {
                    continue;
                }
                let mb = BigInt::from(m);
                let lin = a1 * &mb * &ei + a3 * &e3;
                let t = BigInt::from(4)
                    * (&mb * &mb * &mb + a2 * &mb * &mb * &e2 + a4 * &mb * &e4 + a6 * &e6)
                    + &lin * &lin;
                if t.is_negative() {
                    continue;
                }
                if let Some(n) = arith::sqrt_exact(&t) {
                    for nn in [n.clone(), -&n] {
                        let x = Rational::new(mb.clone(), e2.clone());
                        let y = &(&(&Rational::new(nn, e3.clone()) - &(&curve.a1 * &x))
                            - &curve.a3)
                            / &Rational::from(2);
                        let pt = AffinePoint { x, y };
                        debug_assert!(pt.on_curve(curve));
                        if !out.contains(&pt) {
                            out.push(pt);
                        }
                        if n == BigInt::from(0) {
                            break;
                        }
                    }
                }
            }
        }
    }
    out
}
