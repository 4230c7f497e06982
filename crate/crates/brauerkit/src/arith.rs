//! Integer primitives: deterministic primality, factorization with an
//! explicit effort bound, residue symbols and p-adic square detection.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

/// Largest magnitude for which the fixed Miller-Rabin witness set below is
/// a deterministic primality test (3.317e24, Sorenson-Webster bound).
const MR_DETERMINISTIC_BOUND: &str = "3317044064679887385961981";

const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    /// Input was zero where a nonzero value is required.
    ZeroInput,
    /// A cofactor survived the configured factorization effort bound.
    FactorBoundExceeded { cofactor: BigInt },
    /// Primality cannot be decided deterministically at this magnitude.
    PrimalityRangeExceeded { n: BigInt },
    /// A prime was required.
    NotPrime { n: BigInt },
}

impl fmt::Display for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::ZeroInput => write!(f, "input must be nonzero"),
            ArithError::FactorBoundExceeded { cofactor } => write!(
                f,
                "factorization effort bound exhausted, unsplit cofactor {} (increase the bound)",
                cofactor
            ),
            ArithError::PrimalityRangeExceeded { n } => write!(
                f,
                "{} exceeds the deterministic primality witness range",
                n
            ),
            ArithError::NotPrime { n } => write!(f, "{} is not prime", n),
        }
    }
}

impl std::error::Error for ArithError {}

/// Effort bounds for `factorize`. All constants appearing in the target
/// constructions factor instantly; the bounds exist so arbitrary CLI input
/// fails loudly instead of spinning.
#[derive(Debug, Clone, Copy)]
pub struct FactorConfig {
    /// Trial division by every prime below this bound.
    pub trial_bound: u64,
    /// Total Brent-rho iterations allowed per composite cofactor.
    pub rho_iterations: u64,
}

impl Default for FactorConfig {
    fn default() -> Self {
        FactorConfig {
            trial_bound: 1_000_000,
            rho_iterations: 10_000_000,
        }
    }
}

/// Sign and prime-power decomposition of a nonzero integer.
/// Primes are strictly increasing and every exponent is at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInteger {
    pub negative: bool,
    pub factors: Vec<(BigInt, u32)>,
}

impl FactoredInteger {
    /// Multiplies the factorization back out.
    pub fn reconstruct(&self) -> BigInt {
        let mut n = BigInt::one();
        for (p, e) in &self.factors {
            n *= p.pow(*e);
        }
        if self.negative {
            -n
        } else {
            n
        }
    }

    /// Product of primes with odd exponent, with the sign of the integer.
    pub fn squarefree_part(&self) -> BigInt {
        let mut d = BigInt::one();
        for (p, e) in &self.factors {
            if e % 2 == 1 {
                d *= p;
            }
        }
        if self.negative {
            -d
        } else {
            d
        }
    }
}

impl fmt::Display for FactoredInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-1")?;
            if !self.factors.is_empty() {
                write!(f, " * ")?;
            }
        } else if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(p, e)| {
                if *e == 1 {
                    p.to_string()
                } else {
                    format!("{}^{}", p, e)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

/// A place of Q: a finite prime or the real absolute value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(BigInt),
    Real,
}

impl Place {
    /// Builds a finite place, certifying primality first.
    pub fn finite(p: impl Into<BigInt>) -> Result<Self, ArithError> {
        let p = p.into();
        if !is_prime(&p)? {
            return Err(ArithError::NotPrime { n: p });
        }
        Ok(Place::Finite(p))
    }

    pub fn finite_u64(p: u64) -> Self {
        Place::finite(BigInt::from(p)).expect("not a prime")
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Place::Real)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{}", p),
            Place::Real => write!(f, "oo"),
        }
    }
}

/// Places sort finite primes ascending, with the real place last.
impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Place {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Place::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Real) => std::cmp::Ordering::Less,
            (Real, Finite(_)) => std::cmp::Ordering::Greater,
            (Real, Real) => std::cmp::Ordering::Equal,
        }
    }
}

pub fn modpow(base: &BigInt, exp: &BigInt, modulus: &BigInt) -> BigInt {
    base.modpow(exp, modulus)
}

/// Deterministic Miller-Rabin below 3.317e24; errors above that bound.
pub fn is_prime(n: &BigInt) -> Result<bool, ArithError> {
    if n.is_negative() {
        return Ok(false);
    }
    let bound: BigInt = MR_DETERMINISTIC_BOUND.parse().unwrap();
    if *n >= bound {
        return Err(ArithError::PrimalityRangeExceeded { n: n.clone() });
    }
    let two = BigInt::from(2);
    if *n < two {
        return Ok(false);
    }
    for &w in &MR_WITNESSES {
        if *n == BigInt::from(w) {
            return Ok(true);
        }
        if (n % w).is_zero() {
            return Ok(false);
        }
    }
    // n - 1 = d * 2^s with d odd
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap();
    let d = &n_minus_1 >> s;
    'witness: for &w in &MR_WITNESSES {
        let mut x = modpow(&BigInt::from(w), &d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = &x * &x % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

pub fn is_prime_u64(p: u64) -> bool {
    is_prime(&BigInt::from(p)).expect("u64 is within the deterministic range")
}

fn rho_split(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    // Brent's cycle variant of Pollard rho, deterministic constants.
    let one = BigInt::one();
    for c in 1u64..=20 {
        let c = BigInt::from(c);
        let mut y = BigInt::from(2u64);
        let mut r: u64 = 1;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = (&y * &y + &c) % n;
            }
            let m: u64 = 128;
            let mut k: u64 = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min(r - k);
                if *budget < steps {
                    return None;
                }
                *budget -= steps;
                for _ in 0..steps {
                    y = (&y * &y + &c) % n;
                    q = &q * (&x - &y).abs() % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if g == *n {
            // backtrack
            loop {
                if *budget == 0 {
                    return None;
                }
                *budget -= 1;
                ys = (&ys * &ys + &c) % n;
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if g != *n {
            return Some(g);
        }
    }
    None
}

/// Exact factorization of a nonzero integer: trial division up to the
/// configured bound, then Brent rho on what remains, with every reported
/// prime certified by the deterministic Miller-Rabin test.
pub fn factorize_with(n: &BigInt, cfg: &FactorConfig) -> Result<FactoredInteger, ArithError> {
    if n.is_zero() {
        return Err(ArithError::ZeroInput);
    }
    let negative = n.is_negative();
    let mut m = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();

    let push = |p: BigInt, e: u32, factors: &mut Vec<(BigInt, u32)>| {
        factors.push((p, e));
    };

    for p in TrialPrimes::new(cfg.trial_bound) {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut e = 0u32;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            push(pb, e, &mut factors);
        }
        if m.is_one() {
            break;
        }
    }

    if !m.is_one() {
        let mut budget = cfg.rho_iterations;
        let mut stack = vec![m];
        let mut found: Vec<BigInt> = Vec::new();
        while let Some(c) = stack.pop() {
            if c.is_one() {
                continue;
            }
            if is_prime(&c)? {
                found.push(c);
                continue;
            }
            // perfect powers fall to rho slowly; peel exact squares first
            if let Some(r) = sqrt_exact(&c) {
                stack.push(r.clone());
                stack.push(r);
                continue;
            }
            match rho_split(&c, &mut budget) {
                Some(d) => {
                    stack.push(&c / &d);
                    stack.push(d);
                }
                None => return Err(ArithError::FactorBoundExceeded { cofactor: c }),
            }
        }
        found.sort();
        let mut i = 0;
        while i < found.len() {
            let mut e = 1u32;
            while i + 1 < found.len() && found[i + 1] == found[i] {
                e += 1;
                found.remove(i + 1);
            }
            push(found[i].clone(), e, &mut factors);
            i += 1;
        }
    }

    factors.sort_by(|a, b| a.0.cmp(&b.0));
    // merge any duplicate primes straddling the trial/rho boundary
    let mut merged: Vec<(BigInt, u32)> = Vec::new();
    for (p, e) in factors {
        match merged.last_mut() {
            Some((q, f)) if *q == p => *f += e,
            _ => merged.push((p, e)),
        }
    }
    Ok(FactoredInteger {
        negative,
        factors: merged,
    })
}

pub fn factorize(n: &BigInt) -> Result<FactoredInteger, ArithError> {
    factorize_with(n, &FactorConfig::default())
}

/// Squarefree d with n/d a positive square.
pub fn squarefree_part(n: &BigInt) -> Result<BigInt, ArithError> {
    Ok(factorize(n)?.squarefree_part())
}

/// Iterator over 2, 3, 5, ... below a bound (incremental sieve-free trial).
struct TrialPrimes {
    current: u64,
    bound: u64,
}

impl TrialPrimes {
    fn new(bound: u64) -> Self {
        TrialPrimes { current: 1, bound }
    }
}

impl Iterator for TrialPrimes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        loop {
            self.current += if self.current <= 2 { 1 } else { 2 };
            if self.current > self.bound {
                return None;
            }
            let c = self.current;
            if c == 2 || c == 3 {
                return Some(c);
            }
            let mut d = 3;
            let mut composite = c % 2 == 0;
            while !composite && d * d <= c {
                composite = c % d == 0;
                d += 2;
            }
            if !composite {
                return Some(c);
            }
        }
    }
}

/// Ascending primes up to `bound` inclusive (simple sieve).
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

/// Standard quadratic residue symbol (a|p) for an odd prime p.
pub fn legendre_symbol(a: &BigInt, p: &BigInt) -> i32 {
    debug_assert!(p > &BigInt::from(2));
    let a = a.mod_floor(p);
    if a.is_zero() {
        return 0;
    }
    let e = (p - 1) >> 1;
    let r = modpow(&a, &e, p);
    if r.is_one() {
        1
    } else {
        -1
    }
}

pub fn legendre_symbol_u64(a: i64, p: u64) -> i32 {
    legendre_symbol(&BigInt::from(a), &BigInt::from(p))
}

/// v with x = p^v * unit; additive under multiplication.
pub fn padic_valuation(x: &Rational, p: &BigInt) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    int_valuation(x.numer(), p) - int_valuation(x.denom(), p)
}

pub fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    assert!(!n.is_zero());
    let mut v = 0i64;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// The unit part x / p^{v_p(x)} as a rational.
pub fn unit_part(x: &Rational, p: &BigInt) -> Rational {
    let v = padic_valuation(x, p);
    let pw = Rational::from_int(p.clone()).pow(v);
    x / &pw
}

/// Decides whether x is a square in the completion of Q at v.
///
/// Odd p: even valuation and unit part a quadratic residue. p = 2: even
/// valuation and unit part congruent to 1 mod 8. Real place: x > 0.
pub fn is_square_in_qp(x: &Rational, v: &Place) -> bool {
    assert!(!x.is_zero());
    match v {
        Place::Real => x.is_positive(),
        Place::Finite(p) => {
            let val = padic_valuation(x, p);
            if val % 2 != 0 {
                return false;
            }
            let u = unit_part(x, p);
            // unit numerator times unit denominator is the square class
            let cls = u.square_class_int();
            if *p == BigInt::from(2) {
                cls.mod_floor(&BigInt::from(8)).is_one()
            } else {
                legendre_symbol(&cls, p) == 1
            }
        }
    }
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    sqrt_exact(n).is_some()
}

/// Floor square root that must be exact; None otherwise (or for negatives).
pub fn sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// u64 integer square root.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= n) {
        x += 1;
    }
    x
}

/// i128 perfect-square test with a fast residue prefilter.
pub fn square_root_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    // squares mod 64 prefilter
    const OK64: [bool; 64] = {
        let mut t = [false; 64];
        let mut i = 0;
        while i < 64 {
            t[(i * i) % 64] = true;
            i += 1;
        }
        t
    };
    if !OK64[(n % 64) as usize] {
        return None;
    }
    let u = n as u128;
    let mut x = (u as f64).sqrt() as u128;
    while x > 0 && x.checked_mul(x).map_or(true, |s| s > u) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |s| s <= u) {
        x += 1;
    }
    if x * x == u {
        Some(x as i128)
    } else {
        None
    }
}

pub fn to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}
