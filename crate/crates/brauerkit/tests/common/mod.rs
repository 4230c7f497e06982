//! Shared independent oracles for the property suites. These deliberately
//! avoid the library's own decision paths: squares are found by search,
//! local isotropy by lifting approximate solutions digit by digit.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Zero};

use brauerkit::local::DiagonalForm;
use brauerkit::rational::Rational;

/// Brute-force p-adic square test: strip the valuation, then search for a
/// square root of the unit part modulo p^k with k = 3 + 2 [p = 2].
pub fn is_square_in_qp_oracle(x: &Rational, p: u64) -> bool {
    let pb = BigInt::from(p);
    let v = brauerkit::arith::padic_valuation(x, &pb);
    if v % 2 != 0 {
        return false;
    }
    let unit = {
        let pow = Rational::from_int(pb.clone()).pow(v);
        x / &pow
    };
    let k: u32 = if p == 2 { 5 } else { 3 };
    let modulus = pb.pow(k);
    // unit as an integer residue: num * den^{-1} mod p^k
    let num = unit.numer().mod_floor(&modulus);
    let den = unit.denom().mod_floor(&modulus);
    let den_inv = mod_inverse(&den, &modulus).expect("denominator is a unit");
    let target = (num * den_inv).mod_floor(&modulus);
    let mut y = BigInt::one();
    while y < modulus {
        if (&y * &y).mod_floor(&modulus) == target {
            return true;
        }
        y += 1;
    }
    false
}

fn mod_inverse(a: &BigInt, n: &BigInt) -> Option<BigInt> {
    fn egcd(a: BigInt, b: BigInt) -> (BigInt, BigInt, BigInt) {
        if b.is_zero() {
            (a, BigInt::one(), BigInt::zero())
        } else {
            let (q, r) = a.div_rem(&b);
            let (g, u, v) = egcd(b, r);
            (g, v.clone(), u - q * v)
        }
    }
    let (g, u, _) = egcd(a.mod_floor(n), n.clone());
    if g.is_one() {
        Some(u.mod_floor(n))
    } else {
        None
    }
}

/// Independent local isotropy oracle over Q_p: depth-first lifting of
/// primitive approximate zeros with the strict Hensel inequality, with
/// the search depth past which exhaustion is conclusive.
pub fn is_isotropic_qp_oracle(form: &DiagonalForm, p: u64) -> bool {
    let pb = BigInt::from(p);
    // integer square-class representatives with small p-valuation
    let coeffs: Vec<BigInt> = form
        .coeffs()
        .iter()
        .map(|c| {
            let mut n = c.square_class_int();
            let p2 = &pb * &pb;
            while (&n % &p2).is_zero() {
                n /= &p2;
            }
            n
        })
        .collect();
    let w2 = brauerkit::arith::int_valuation(&BigInt::from(2), &pb);
    let smax = w2
        + coeffs
            .iter()
            .map(|c| brauerkit::arith::int_valuation(c, &pb))
            .max()
            .unwrap();
    let depth = (2 * smax + 2) as u32;
    let mut stack: Vec<(Vec<BigInt>, u32)> = Vec::new();
    // level-1 seeds: nonzero residue vectors with f(x) = 0 mod p
    enumerate(&pb, coeffs.len(), &mut |v| {
        if v.iter().any(|x| !x.is_zero()) {
            stack.push((v.to_vec(), 1));
        }
    });
    let pk = |m: u32| pb.pow(m);
    while let Some((x, level)) = stack.pop() {
        let val: BigInt = coeffs.iter().zip(x.iter()).map(|(c, xi)| c * xi * xi).sum();
        if val.is_zero() {
            return true;
        }
        let wf = brauerkit::arith::int_valuation(&val, &pb);
        if wf < level as i64 {
            continue;
        }
        for (c, xi) in coeffs.iter().zip(x.iter()) {
            if xi.is_zero() {
                continue;
            }
            let g: BigInt = BigInt::from(2) * c * xi;
            let wg = brauerkit::arith::int_valuation(&g, &pb);
            if wf > 2 * wg {
                return true;
            }
        }
        if level >= depth {
            // unreachable at the conclusive depth: every survivor fires
            panic!("oracle depth exhausted below the conclusive threshold");
        }
        let step = pk(level);
        enumerate(&pb, x.len(), &mut |delta| {
            let child: Vec<BigInt> = x
                .iter()
                .zip(delta.iter())
                .map(|(xi, d)| xi + &step * d)
                .collect();
            stack.push((child, level + 1));
        });
    }
    false
}

fn enumerate(p: &BigInt, len: usize, f: &mut impl FnMut(&[BigInt])) {
    let pu = p.to_string().parse::<u64>().unwrap();
    let mut idx = vec![0u64; len];
    loop {
        let v: Vec<BigInt> = idx.iter().map(|&i| BigInt::from(i)).collect();
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            idx[i] += 1;
            if idx[i] < pu {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Deterministic pseudo-random sequence for sampling tests.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % ((hi - lo + 1) as u64)) as i64
    }

    pub fn nonzero_in(&mut self, lo: i64, hi: i64) -> i64 {
        loop {
            let v = self.int_in(lo, hi);
            if v != 0 {
                return v;
            }
        }
    }

    pub fn rational(&mut self, num_bound: i64, den_bound: i64) -> Rational {
        let n = self.nonzero_in(-num_bound, num_bound);
        let d = self.nonzero_in(1, den_bound);
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
}
