//! Naive point counting over prime fields by quadratic-character sums,
//! and the (optionally rayon-parallel) scan of traces over prime ranges.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::ToPrimitive;

use super::{EcError, WeierstrassCurve};
use crate::arith;
use crate::par;
use crate::rational::Rational;

/// Naive counting cap: every verification in scope needs small primes only.
pub const COUNT_CAP: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRecord {
    pub p: u64,
    pub order: u64,
    pub ap: i64,
}

/// Coefficients reduced mod p, carrying the affine group law.
pub struct CurveModP {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    pub a4: u64,
    pub a6: u64,
}

pub(crate) fn reduce_coeff(a: &Rational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = a.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = a.numer().mod_floor(&pb).to_u64()?;
    let inv = mod_inv_u64(den, p)?;
    Some(mulmod(num, inv, p))
}

pub(crate) fn curve_mod_p(curve: &WeierstrassCurve, p: u64) -> Result<CurveModP, EcError> {
    if p > COUNT_CAP {
        return Err(EcError::PrimeTooLarge { p, cap: COUNT_CAP });
    }
    if !curve.has_good_reduction(p)? {
        return Err(EcError::BadReduction {
            p,
            bad_primes: curve.bad_primes()?,
        });
    }
    let r = |a: &Rational| reduce_coeff(a, p).ok_or(EcError::NonIntegralModel);
    Ok(CurveModP {
        p,
        a1: r(&curve.a1)?,
        a2: r(&curve.a2)?,
        a3: r(&curve.a3)?,
        a4: r(&curve.a4)?,
        a6: r(&curve.a6)?,
    })
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub(crate) fn submod(a: u64, b: u64, p: u64) -> u64 {
    (a + p - b % p) % p
}

pub(crate) fn mod_inv_u64(a: u64, p: u64) -> Option<u64> {
    fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, u, v) = egcd(b, a % b);
            (g, v, u - (a / b) * v)
        }
    }
    let (g, u, _) = egcd(a as i128 % p as i128, p as i128);
    if g != 1 {
        None
    } else {
        Some(u.rem_euclid(p as i128) as u64)
    }
}

impl CurveModP {
    pub fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mulmod(x, x, p);
        let x3 = mulmod(x2, x, p);
        addmod(
            addmod(x3, mulmod(self.a2, x2, p), p),
            addmod(mulmod(self.a4, x, p), self.a6, p),
            p,
        )
    }

    /// y-coefficient a1 x + a3 of the general model.
    pub fn ylin(&self, x: u64) -> u64 {
        addmod(mulmod(self.a1, x, self.p), self.a3, self.p)
    }

    pub fn is_on_curve(&self, x: u64, y: u64) -> bool {
        let p = self.p;
        let lhs = addmod(mulmod(y, y, p), mulmod(self.ylin(x), y, p), p);
        lhs == self.rhs(x)
    }
}

/// Exact order of E(F_p) and the trace a_p = p + 1 - order.
///
/// p = 2, 3: direct enumeration of the affine plane. Odd p: complete the
/// square and count with a quadratic residue table, one pass over x.
pub fn count_points_mod_p(curve: &WeierstrassCurve, p: u64) -> Result<(u64, i64), EcError> {
    let c = curve_mod_p(curve, p)?;
    let order = if p <= 3 {
        let mut count = 1u64; // infinity
        for x in 0..p {
            for y in 0..p {
                if c.is_on_curve(x, y) {
                    count += 1;
                }
            }
        }
        count
    } else {
        // (2y + a1 x + a3)^2 = 4 rhs(x) + (a1 x + a3)^2
        let mut squares = vec![false; p as usize];
        let mut y = 0u64;
        while y <= p / 2 {
            squares[mulmod(y, y, p) as usize] = true;
            y += 1;
        }
        let mut count = 1u64 + p; // infinity plus one per x
        for x in 0..p {
            let l = c.ylin(x);
            let d = addmod(mulmod(4 % p, c.rhs(x), p), mulmod(l, l, p), p);
            if d == 0 {
                // one solution: chi contributes -1 + 1... adjust from the
                // baseline of 1 per x: zero discriminant keeps exactly 1
            } else if squares[d as usize] {
                count += 1;
            } else {
                count -= 1;
            }
        }
        count
    };
    let ap = (p as i64) + 1 - order as i64;
    debug_assert!(
        (ap * ap) as u64 <= 4 * p,
        "Hasse bound violated: p={} ap={}",
        p,
        ap
    );
    Ok((order, ap))
}

/// Traces over every good prime up to the bound, ascending; primes of bad
/// reduction are skipped. Runs the per-prime counts through the parallel
/// dispatcher and merges in prime order.
pub fn trace_scan(curve: &WeierstrassCurve, bound: u64) -> Result<Vec<TraceRecord>, EcError> {
    let primes: Vec<u64> = arith::primes_up_to(bound.min(COUNT_CAP));
    let results: Vec<Option<Result<TraceRecord, EcError>>> = par::map_collect(&primes, |&p| {
        match curve.has_good_reduction(p) {
            Ok(false) => None,
            Err(e) => Some(Err(e)),
            Ok(true) => Some(count_points_mod_p(curve, p).map(|(order, ap)| TraceRecord {
                p,
                order,
                ap,
            })),
        }
    });
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            None => {}
            Some(Ok(rec)) => out.push(rec),
            Some(Err(e)) => return Err(e),
        }
    }
    Ok(out)
}

/// Sequential twin of `trace_scan`, kept for the benchmark comparison.
pub fn trace_scan_seq(curve: &WeierstrassCurve, bound: u64) -> Result<Vec<TraceRecord>, EcError> {
    let primes: Vec<u64> = arith::primes_up_to(bound.min(COUNT_CAP));
    let mut out = Vec::new();
    for &p in &primes {
        if curve.has_good_reduction(p)? {
            let (order, ap) = count_points_mod_p(curve, p)?;
            out.push(TraceRecord { p, order, ap });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e67_small_traces() {
        let e = WeierstrassCurve::e67();
        assert_eq!(count_points_mod_p(&e, 2).unwrap(), (1, 2));
        assert_eq!(count_points_mod_p(&e, 3).unwrap(), (6, -2));
    }

    #[test]
    fn bad_reduction_refused() {
        let e = WeierstrassCurve::e67();
        match count_points_mod_p(&e, 67) {
            Err(EcError::BadReduction { p: 67, bad_primes }) => {
                assert_eq!(bad_primes, vec![BigInt::from(67)]);
            }
            other => panic!("expected bad reduction, got {:?}", other),
        }
    }

    #[test]
    fn counting_cap() {
        let e = WeierstrassCurve::e67();
        assert!(matches!(
            count_points_mod_p(&e, 100_003),
            Err(EcError::PrimeTooLarge { .. })
        ));
    }

    #[test]
    fn char_sum_matches_naive_enumeration() {
        // independent oracle: brute-force both coordinates
        let curves = [
            WeierstrassCurve::e67(),
            WeierstrassCurve::from_ints([0, 0, 0, 0, 1]).unwrap(),
            WeierstrassCurve::from_ints([1, 0, 1, 0, -1]).unwrap(),
            WeierstrassCurve::from_ints([0, 0, 0, -1, 0]).unwrap(),
        ];
        for e in &curves {
            for p in [5u64, 7, 11, 13, 17, 19, 23] {
                if !e.has_good_reduction(p).unwrap() {
                    continue;
                }
                let c = curve_mod_p(e, p).unwrap();
                let mut naive = 1u64;
                for x in 0..p {
                    for y in 0..p {
                        if c.is_on_curve(x, y) {
                            naive += 1;
                        }
                    }
                }
                let (order, _) = count_points_mod_p(e, p).unwrap();
                assert_eq!(order, naive, "curve {} at p={}", e, p);
            }
        }
    }

    #[test]
    fn hasse_bound_on_scan() {
        let e = WeierstrassCurve::e67();
        let recs = trace_scan(&e, 500).unwrap();
        for r in &recs {
            assert!((r.ap * r.ap) as u64 <= 4 * r.p);
        }
        // 67 skipped
        assert!(recs.iter().all(|r| r.p != 67));
        // deterministic merge equals the sequential scan
        assert_eq!(recs, trace_scan_seq(&e, 500).unwrap());
    }

    #[test]
    fn twist_trace_law() {
        // a_p(E^d) = (d|p) a_p(E) for good odd p away from d
        let e = WeierstrassCurve::e67();
        for d in [2i64, 5, 10, -1] {
            let t = e.quadratic_twist(&BigInt::from(d)).unwrap();
            let mut checked = 0;
            for p in arith::primes_up_to(120) {
                if p == 2 || !t.has_good_reduction(p).unwrap() || !e.has_good_reduction(p).unwrap()
                {
                    continue;
                }
                if d.unsigned_abs() % p == 0 {
                    continue;
                }
                let (_, ap) = count_points_mod_p(&e, p).unwrap();
                let (_, apt) = count_points_mod_p(&t, p).unwrap();
                let chi = arith::legendre_symbol_u64(d, p) as i64;
                assert_eq!(apt, chi * ap, "d={} p={}", d, p);
                checked += 1;
            }
            assert!(checked >= 20, "need at least 20 primes checked");
        }
    }
}
