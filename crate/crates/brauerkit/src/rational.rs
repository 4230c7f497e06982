//! Exact rational numbers over arbitrary-precision integers.
//!
//! Always stored in lowest terms with a positive denominator; zero is 0/1.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "denominator must be nonzero");
        let mut r = Rational { num, den };
        r.reduce();
        r
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    fn reduce(&mut self) {
        if self.den.is_negative() {
            self.num = -std::mem::take(&mut self.num);
            self.den = -std::mem::take(&mut self.den);
        }
        let g = self.num.gcd(&self.den);
        if !g.is_one() {
            self.num /= &g;
            self.den /= &g;
        }
        if self.num.is_zero() {
            self.den = BigInt::one();
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i32 {
        if self.num.is_negative() {
            -1
        } else if self.num.is_zero() {
            0
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Rational {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Rational::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        if e == 0 {
            return Rational::one();
        }
        let (base, k) = if e < 0 {
            (self.recip(), (-e) as u32)
        } else {
            (self.clone(), e as u32)
        };
        Rational {
            num: base.num.pow(k),
            den: base.den.pow(k),
        }
    }

    /// The integer `num * den`, a square-class representative of `self`.
    pub fn square_class_int(&self) -> BigInt {
        &self.num * &self.den
    }

    /// True iff `self` is the square of a rational.
    pub fn is_square(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.is_negative() {
            return false;
        }
        crate::arith::is_perfect_square(&self.num) && crate::arith::is_perfect_square(&self.den)
    }

    /// Exact square root when `self` is a perfect square.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = crate::arith::sqrt_exact(&self.num)?;
        let d = crate::arith::sqrt_exact(&self.den)?;
        Some(Rational { num: n, den: d })
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational: {}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(n).map_err(|_| ParseRationalError(s.to_string()))?;
        let den = BigInt::from_str(d).map_err(|_| ParseRationalError(s.to_string()))?;
        if den.is_zero() {
            return Err(ParseRationalError(s.to_string()));
        }
        Ok(Rational::new(num, den))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_int(n)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

impl<'a, 'b> Add<&'b Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'b Rational) -> Rational {
        Rational::new(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}
forward_binop!(Add, add);

impl<'a, 'b> Sub<&'b Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'b Rational) -> Rational {
        Rational::new(
            &self.num * &rhs.den - &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }
}
forward_binop!(Sub, sub);

impl<'a, 'b> Mul<&'b Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'b Rational) -> Rational {
        Rational::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}
forward_binop!(Mul, mul);

impl<'a, 'b> Div<&'b Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'b Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num.clone(),
            den: self.den.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rational::new(BigInt::from(6), BigInt::from(-4));
        assert_eq!(r, q("-3/2"));
        assert!(r.denom().is_positive());
        assert_eq!(Rational::new(BigInt::from(0), BigInt::from(-7)), q("0"));
        assert!(q("0").denom().is_one());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        assert_eq!(q("1/2") - q("1/3"), q("1/6"));
        assert_eq!(q("7/4") * q("2/7"), q("1/2"));
        assert_eq!(q("7/4") / q("7/2"), q("1/2"));
        assert_eq!(-q("3/5"), q("-3/5"));
        assert_eq!(q("-2/3").pow(-2), q("9/4"));
    }

    #[test]
    fn ordering() {
        assert!(q("-1/2") < q("1/3"));
        assert!(q("2/3") < q("3/4"));
    }

    #[test]
    fn squares() {
        assert!(q("4/9").is_square());
        assert!(!q("-4/9").is_square());
        assert!(!q("2").is_square());
        assert_eq!(q("4/9").sqrt_exact().unwrap(), q("2/3"));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0", "5", "-5", "3/7", "-22/7"] {
            assert_eq!(q(s).to_string(), s);
        }
    }
}
