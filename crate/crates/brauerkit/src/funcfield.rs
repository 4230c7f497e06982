//! Quaternion symbol algebras over the rational function field: tame
//! residues at closed points of the projective line, ramification loci,
//! evaluation at unramified points, and the pullback of residues to the
//! double cover y^2 = r(x).
//!
//! Polynomials carry rational coefficients; closed points of the line are
//! monic irreducible polynomials (certified on construction) or the point
//! at infinity. Residue fields of degree at most 2 over the base cover
//! everything these constructions need.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, ArithError};
use crate::local;
use crate::quadfield::QuadFieldElement;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FuncFieldError {
    ZeroPolynomial,
    /// Irreducibility certification is implemented for factors of degree
    /// at most 4 (after root extraction); larger blocks are out of scope.
    UnsupportedDegree(usize),
    Reducible(String),
    /// Evaluation requested at a point where an entry has a zero or pole.
    RamifiedPoint(String),
    NotDegreeOne(String),
    TwoTorsion(String),
    /// More than one nonsplit symbol survived specialization; the value
    /// is not presented by a single quaternion symbol at desk scale.
    MultipleNonsplitSymbols,
    Arith(ArithError),
}

impl fmt::Display for FuncFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncFieldError::ZeroPolynomial => write!(f, "zero polynomial"),
            FuncFieldError::UnsupportedDegree(d) => {
                write!(f, "irreducibility certification unsupported at degree {}", d)
            }
            FuncFieldError::Reducible(p) => write!(f, "{} is reducible over Q", p),
            FuncFieldError::RamifiedPoint(p) => {
                write!(f, "entry has a zero or pole at {}", p)
            }
            FuncFieldError::NotDegreeOne(p) => write!(f, "{} is not a degree-1 point", p),
            FuncFieldError::TwoTorsion(p) => {
                write!(f, "r({}) = 0: the fibre is a two-torsion point", p)
            }
            FuncFieldError::MultipleNonsplitSymbols => {
                write!(f, "value is not a single quaternion symbol")
            }
            FuncFieldError::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for FuncFieldError {}

impl From<ArithError> for FuncFieldError {
    fn from(e: ArithError) -> Self {
        FuncFieldError::Arith(e)
    }
}

/// Dense polynomial over Q, highest coefficient last, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// x - t
    pub fn linear(t: &Rational) -> Self {
        Self::new(vec![-t, Rational::one()])
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.coeffs.len() - 1
    }

    fn degree_or_zero(&self) -> usize {
        if self.is_zero() {
            0
        } else {
            self.degree()
        }
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().expect("zero polynomial")
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn monic(&self) -> Self {
        let lc = self.leading();
        if lc.is_one() {
            return self.clone();
        }
        QPoly::new(self.coeffs.iter().map(|c| c / &lc).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QPoly::constant(Rational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by zero polynomial");
        if self.is_zero() || self.coeffs.len() < div.coeffs.len() {
            return (QPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dlen = div.coeffs.len();
        let dlc = div.leading();
        let qlen = rem.len() - dlen + 1;
        let mut quot = vec![Rational::zero(); qlen];
        for i in (0..qlen).rev() {
            let c = &rem[i + dlen - 1] / &dlc;
            if c.is_zero() {
                continue;
            }
            for (j, d) in div.coeffs.iter().enumerate() {
                rem[i + j] = &rem[i + j] - &(&c * d);
            }
            quot[i] = c;
        }
        (QPoly::new(quot), QPoly::new(rem))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return QPoly::zero();
        }
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rational::from(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_quad(&self, x: &QuadFieldElement) -> QuadFieldElement {
        let mut acc = QuadFieldElement::from_rational(Rational::zero(), x.c.clone());
        for c in self.coeffs.iter().rev() {
            acc = acc
                .mul(x)
                .add(&QuadFieldElement::from_rational(c.clone(), x.c.clone()));
        }
        acc
    }

    /// Multiplicity of the monic factor m, and the cofactor.
    pub fn strip_factor(&self, m: &Self) -> (u32, Self) {
        let mut e = 0u32;
        let mut f = self.clone();
        loop {
            if f.is_zero() {
                return (e, f);
            }
            let (q, r) = f.divrem(m);
            if r.is_zero() && !(q.is_zero() && !f.is_zero()) {
                e += 1;
                f = q;
            } else {
                return (e, f);
            }
        }
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => {
                    if c.is_one() {
                        write!(f, "x")?
                    } else {
                        write!(f, "{}*x", c)?
                    }
                }
                _ => {
                    if c.is_one() {
                        write!(f, "x^{}", i)?
                    } else {
                        write!(f, "{}*x^{}", c, i)?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Rational function num/den with monic denominator and coprime parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: QPoly,
    den: QPoly,
}

impl RatFunc {
    pub fn new(num: QPoly, den: QPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc {
                num,
                den: QPoly::constant(Rational::one()),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.divrem(&g).0, den.divrem(&g).0)
        };
        let lc = den.leading();
        RatFunc {
            num: num.scale(&lc.recip()),
            den: den.monic(),
        }
    }

    pub fn from_poly(p: QPoly) -> Self {
        Self::new(p, QPoly::constant(Rational::one()))
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero());
        RatFunc::new(self.den.clone(), self.num.clone())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Closed point of the projective line over Q.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClosedPoint {
    Affine(QPoly),
    Infinity,
}

impl ClosedPoint {
    /// Builds an affine closed point, certifying the minimal polynomial
    /// monic irreducible over Q.
    pub fn affine(minpoly: QPoly) -> Result<Self, FuncFieldError> {
        if minpoly.is_zero() || minpoly.is_constant() {
            return Err(FuncFieldError::ZeroPolynomial);
        }
        let m = minpoly.monic();
        let factors = factor_monic(&m)?;
        if factors.len() != 1 || factors[0].1 != 1 {
            return Err(FuncFieldError::Reducible(m.to_string()));
        }
        Ok(ClosedPoint::Affine(m))
    }

    pub fn rational(t: impl Into<Rational>) -> Self {
        ClosedPoint::Affine(QPoly::linear(&t.into()))
    }

    pub fn degree(&self) -> usize {
        match self {
            ClosedPoint::Affine(m) => m.degree(),
            ClosedPoint::Infinity => 1,
        }
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosedPoint::Affine(m) => {
                if m.degree() == 1 {
                    write!(f, "x = {}", -&m.coeff(0))
                } else {
                    write!(f, "({} = 0)", m)
                }
            }
            ClosedPoint::Infinity => write!(f, "x = oo"),
        }
    }
}

/// Formal tensor product of quaternion symbols (f, g) over Q(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolAlgebra {
    symbols: Vec<(RatFunc, RatFunc)>,
}

impl SymbolAlgebra {
    pub fn new(symbols: Vec<(RatFunc, RatFunc)>) -> Self {
        assert!(
            symbols.iter().all(|(f, g)| !f.is_zero() && !g.is_zero()),
            "symbol entries must be nonzero"
        );
        SymbolAlgebra { symbols }
    }

    pub fn symbols(&self) -> &[(RatFunc, RatFunc)] {
        &self.symbols
    }
}

/// Base field of the construction: Q itself or a quadratic field Q(sqrt(c)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseField {
    Rationals,
    Quadratic(BigInt),
}

impl BaseField {
    /// Decides e in k*^2 for a rational e viewed inside the base field.
    pub fn rational_is_square(&self, e: &Rational) -> bool {
        match self {
            BaseField::Rationals => e.is_square(),
            BaseField::Quadratic(c) => {
                e.is_square() || (e * &Rational::from_int(c.clone())).is_square()
            }
        }
    }
}

/// Residue field of a closed point: the base field itself or a quadratic
/// extension described by a squarefree rational discriminant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidueField {
    Base,
    QuadExt(BigInt),
}

/// Square class in the residue field of a closed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClass {
    pub field: ResidueField,
    pub rep: ResidueRep,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidueRep {
    Rat(Rational),
    Quad(QuadFieldElement),
}

impl ResidueClass {
    /// Whether the representative is a square in the residue field, with
    /// the base field taken into account.
    pub fn is_trivial(&self, base: &BaseField) -> bool {
        match (&self.field, &self.rep) {
            (ResidueField::Base, ResidueRep::Rat(e)) => base.rational_is_square(e),
            (ResidueField::QuadExt(d), ResidueRep::Rat(e)) => {
                // e square in k(sqrt(d)) iff e or e*d is a square in k
                base.rational_is_square(e)
                    || base.rational_is_square(&(e * &Rational::from_int(d.clone())))
            }
            // a genuine element of the quadratic residue field Q(sqrt(d))
            (ResidueField::QuadExt(d), ResidueRep::Quad(e)) => {
                assert_eq!(&e.c, d, "rep lives in the wrong field");
                assert_eq!(
                    base,
                    &BaseField::Rationals,
                    "nested quadratic extensions are out of scope"
                );
                e.is_square_in_field()
            }
            (ResidueField::Base, ResidueRep::Quad(_)) => {
                unreachable!("quadratic rep in a degree-1 residue field")
            }
        }
    }

    fn multiply(&self, other: &ResidueClass) -> ResidueClass {
        assert_eq!(self.field, other.field, "classes in different fields");
        let rep = match (&self.rep, &other.rep) {
            (ResidueRep::Rat(a), ResidueRep::Rat(b)) => ResidueRep::Rat(a * b),
            (ResidueRep::Quad(a), ResidueRep::Quad(b)) => ResidueRep::Quad(a.mul(b)),
            (ResidueRep::Rat(a), ResidueRep::Quad(b))
            | (ResidueRep::Quad(b), ResidueRep::Rat(a)) => {
                ResidueRep::Quad(b.mul(&QuadFieldElement::from_rational(a.clone(), b.c.clone())))
            }
        };
        ResidueClass {
            field: self.field.clone(),
            rep,
        }
    }

    /// Canonical squarefree form for rational representatives.
    pub fn canonicalize(&self) -> Result<ResidueClass, FuncFieldError> {
        match &self.rep {
            ResidueRep::Rat(e) => {
                let cls = arith::squarefree_part(&e.square_class_int())?;
                Ok(ResidueClass {
                    field: self.field.clone(),
                    rep: ResidueRep::Rat(Rational::from_int(cls)),
                })
            }
            ResidueRep::Quad(_) => Ok(self.clone()),
        }
    }
}

/// Valuation of a rational function at a closed point.
pub fn valuation(f: &RatFunc, pt: &ClosedPoint) -> i64 {
    assert!(!f.is_zero(), "valuation of zero");
    match pt {
        ClosedPoint::Infinity => f.den().degree_or_zero() as i64 - f.num().degree_or_zero() as i64,
        ClosedPoint::Affine(m) => {
            let (en, _) = f.num().strip_factor(m);
            let (ed, _) = f.den().strip_factor(m);
            en as i64 - ed as i64
        }
    }
}

/// Value of the unit part of f at pt after the point's factor is stripped.
fn unit_value(f: &RatFunc, pt: &ClosedPoint) -> Result<ResidueRep, FuncFieldError> {
    match pt {
        ClosedPoint::Infinity => {
            if f.num().degree_or_zero() != f.den().degree_or_zero() {
                return Err(FuncFieldError::RamifiedPoint(pt.to_string()));
            }
            Ok(ResidueRep::Rat(&f.num().leading() / &f.den().leading()))
        }
        ClosedPoint::Affine(m) => {
            let (_, n0) = f.num().strip_factor(m);
            let (_, d0) = f.den().strip_factor(m);
            match m.degree() {
                1 => {
                    let t = -&m.coeff(0);
                    let nv = n0.eval(&t);
                    let dv = d0.eval(&t);
                    if nv.is_zero() || dv.is_zero() {
                        return Err(FuncFieldError::RamifiedPoint(pt.to_string()));
                    }
                    Ok(ResidueRep::Rat(&nv / &dv))
                }
                2 => {
                    // Q[x]/(m) = Q(sqrt(D0)): x maps to (-b + s sqrt(D0))/2
                    let b = m.coeff(1);
                    let c0 = m.coeff(0);
                    let disc = &(&b * &b) - &(&Rational::from(4) * &c0);
                    let cls = arith::squarefree_part(&disc.square_class_int())?;
                    let s2 = &disc / &Rational::from_int(cls.clone());
                    let s = s2.sqrt_exact().expect("square by construction");
                    let root = QuadFieldElement::new(
                        &(-&b) / &Rational::from(2),
                        &s / &Rational::from(2),
                        cls,
                    );
                    let nv = n0.eval_quad(&root);
                    let dv = d0.eval_quad(&root);
                    if nv.is_zero() || dv.is_zero() {
                        return Err(FuncFieldError::RamifiedPoint(pt.to_string()));
                    }
                    Ok(ResidueRep::Quad(nv.mul(&dv.inverse())))
                }
                d => Err(FuncFieldError::UnsupportedDegree(d)),
            }
        }
    }
}

fn rep_pow(rep: &ResidueRep, e: i64) -> ResidueRep {
    match rep {
        ResidueRep::Rat(r) => ResidueRep::Rat(r.pow(e)),
        ResidueRep::Quad(q) => {
            let mut acc = QuadFieldElement::from_rational(Rational::one(), q.c.clone());
            let base = if e < 0 { q.inverse() } else { q.clone() };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(&base);
            }
            ResidueRep::Quad(acc)
        }
    }
}

fn rep_mul(a: ResidueRep, b: ResidueRep) -> ResidueRep {
    match (a, b) {
        (ResidueRep::Rat(a), ResidueRep::Rat(b)) => ResidueRep::Rat(a * b),
        (ResidueRep::Quad(a), ResidueRep::Quad(b)) => ResidueRep::Quad(a.mul(&b)),
        (ResidueRep::Rat(a), ResidueRep::Quad(b)) | (ResidueRep::Quad(b), ResidueRep::Rat(a)) => {
            ResidueRep::Quad(b.mul(&QuadFieldElement::from_rational(a, b.c.clone())))
        }
    }
}

fn rep_neg_if(rep: ResidueRep, flip: bool) -> ResidueRep {
    if !flip {
        return rep;
    }
    match rep {
        ResidueRep::Rat(r) => ResidueRep::Rat(-r),
        ResidueRep::Quad(q) => ResidueRep::Quad(q.neg()),
    }
}

fn residue_field_of(pt: &ClosedPoint) -> Result<ResidueField, FuncFieldError> {
    match pt {
        ClosedPoint::Infinity => Ok(ResidueField::Base),
        ClosedPoint::Affine(m) => match m.degree() {
            1 => Ok(ResidueField::Base),
            2 => {
                let b = m.coeff(1);
                let c0 = m.coeff(0);
                let disc = &(&b * &b) - &(&Rational::from(4) * &c0);
                let cls = arith::squarefree_part(&disc.square_class_int())?;
                Ok(ResidueField::QuadExt(cls))
            }
            d => Err(FuncFieldError::UnsupportedDegree(d)),
        },
    }
}

/// Tame residue of a single symbol (f, g) at a closed point: the class of
/// (-1)^{v(f) v(g)} f^{v(g)} g^{-v(f)} in the residue field modulo squares.
pub fn tame_residue(
    sym: &(RatFunc, RatFunc),
    pt: &ClosedPoint,
) -> Result<ResidueClass, FuncFieldError> {
    let (f, g) = sym;
    let m = valuation(f, pt);
    let n = valuation(g, pt);
    let field = residue_field_of(pt)?;
    if m == 0 && n == 0 {
        return Ok(ResidueClass {
            field,
            rep: ResidueRep::Rat(Rational::one()),
        });
    }
    let f0 = strip_point(f, pt, m);
    let g0 = strip_point(g, pt, n);
    let fv = unit_value(&f0, pt)?;
    let gv = unit_value(&g0, pt)?;
    let rep = rep_mul(rep_pow(&fv, n), rep_pow(&gv, -m));
    let rep = rep_neg_if(rep, (m * n) % 2 != 0);
    ResidueClass { field, rep }.canonicalize()
}

/// Multiplies or divides out the point's uniformizer to valuation zero.
fn strip_point(f: &RatFunc, pt: &ClosedPoint, v: i64) -> RatFunc {
    if v == 0 {
        return f.clone();
    }
    match pt {
        ClosedPoint::Infinity => {
            let xv = QPoly::x().pow(v.unsigned_abs() as u32);
            if v > 0 {
                RatFunc::new(f.num().mul(&xv), f.den().clone())
            } else {
                RatFunc::new(f.num().clone(), f.den().mul(&xv))
            }
        }
        ClosedPoint::Affine(m) => {
            let mv = m.pow(v.unsigned_abs() as u32);
            if v > 0 {
                RatFunc::new(f.num().clone(), f.den().mul(&mv))
            } else {
                RatFunc::new(f.num().mul(&mv), f.den().clone())
            }
        }
    }
}

/// Accumulated residue class of the whole algebra at a point.
pub fn algebra_residue(
    algebra: &SymbolAlgebra,
    pt: &ClosedPoint,
) -> Result<ResidueClass, FuncFieldError> {
    let field = residue_field_of(pt)?;
    let mut acc = ResidueClass {
        field,
        rep: ResidueRep::Rat(Rational::one()),
    };
    for sym in algebra.symbols() {
        let r = tame_residue(sym, pt)?;
        acc = acc.multiply(&r);
    }
    acc.canonicalize()
}

/// All closed points (including infinity) where the accumulated residue
/// class of the algebra is nontrivial over the given base field. The
/// candidate set is the zeros and poles of all entries, which is complete
/// because the tame residue at any other point is the trivial class.
pub fn ramification_locus(
    algebra: &SymbolAlgebra,
    base: &BaseField,
) -> Result<BTreeSet<ClosedPoint>, FuncFieldError> {
    let mut candidates: BTreeSet<ClosedPoint> = BTreeSet::new();
    candidates.insert(ClosedPoint::Infinity);
    for (f, g) in algebra.symbols() {
        for part in [f.num(), f.den(), g.num(), g.den()] {
            if part.is_constant() {
                continue;
            }
            for (m, _) in factor_monic(part)? {
                candidates.insert(ClosedPoint::Affine(m));
            }
        }
    }
    let mut out = BTreeSet::new();
    for pt in candidates {
        let cls = algebra_residue(algebra, &pt)?;
        if !cls.is_trivial(base) {
            out.insert(pt);
        }
    }
    Ok(out)
}

/// Specializes the algebra at an unramified degree-1 point, returning the
/// surviving quaternion symbol as a pair of squarefree square classes.
/// Entries with a zero or pole at the point are refused.
pub fn value_at_point(
    algebra: &SymbolAlgebra,
    pt: &ClosedPoint,
    base: &BaseField,
) -> Result<(Rational, Rational), FuncFieldError> {
    if pt.degree() != 1 {
        return Err(FuncFieldError::NotDegreeOne(pt.to_string()));
    }
    let mut specialized: Vec<(Rational, Rational)> = Vec::new();
    for (f, g) in algebra.symbols() {
        if valuation(f, pt) != 0 || valuation(g, pt) != 0 {
            return Err(FuncFieldError::RamifiedPoint(pt.to_string()));
        }
        let fv = match unit_value(f, pt)? {
            ResidueRep::Rat(r) => r,
            ResidueRep::Quad(_) => unreachable!("degree-1 point"),
        };
        let gv = match unit_value(g, pt)? {
            ResidueRep::Rat(r) => r,
            ResidueRep::Quad(_) => unreachable!("degree-1 point"),
        };
        let fc = arith::squarefree_part(&fv.square_class_int())?;
        let gc = arith::squarefree_part(&gv.square_class_int())?;
        specialized.push((Rational::from_int(fc), Rational::from_int(gc)));
    }
    // drop the split symbols; the class of the tensor product is carried
    // by whatever remains
    let mut nonsplit: Vec<(Rational, Rational)> = Vec::new();
    for (u, w) in specialized {
        if !symbol_splits_over(&u, &w, base)? {
            nonsplit.push((u, w));
        }
    }
    match nonsplit.len() {
        0 => Ok((Rational::one(), Rational::one())),
        1 => Ok(nonsplit.pop().unwrap()),
        _ => Err(FuncFieldError::MultipleNonsplitSymbols),
    }
}

/// Real-place obstruction of the specialized algebra at a rational point:
/// the product over the symbols of the real Hilbert symbols of their
/// values. -1 means the specialized conic has no real points.
pub fn real_obstruction_at(
    algebra: &SymbolAlgebra,
    t: &Rational,
) -> Result<i32, FuncFieldError> {
    let pt = ClosedPoint::rational(t.clone());
    let mut acc = 1i32;
    for (f, g) in algebra.symbols() {
        if valuation(f, &pt) != 0 || valuation(g, &pt) != 0 {
            return Err(FuncFieldError::RamifiedPoint(pt.to_string()));
        }
        let fv = match unit_value(f, &pt)? {
            ResidueRep::Rat(r) => r,
            ResidueRep::Quad(_) => unreachable!("degree-1 point"),
        };
        let gv = match unit_value(g, &pt)? {
            ResidueRep::Rat(r) => r,
            ResidueRep::Quad(_) => unreachable!("degree-1 point"),
        };
        acc *= local::hilbert_symbol(&fv, &gv, &crate::arith::Place::Real);
    }
    Ok(acc)
}

/// Splitting of a rational quaternion symbol over the base field: every
/// place of Q where the symbol is -1 must acquire even local degree.
pub fn symbol_splits_over(
    u: &Rational,
    w: &Rational,
    base: &BaseField,
) -> Result<bool, FuncFieldError> {
    let ram = local::symbol_ramification(u, w)?;
    match base {
        BaseField::Rationals => Ok(ram.is_empty()),
        BaseField::Quadratic(c) => {
            for v in ram {
                match v {
                    crate::arith::Place::Real => {
                        if c.is_positive() {
                            // real embeddings remain, the obstruction stays
                            return Ok(false);
                        }
                    }
                    crate::arith::Place::Finite(p) => {
                        if place_splits_in_quad(&p, c) {
                            return Ok(false);
                        }
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Whether the rational prime p splits in Q(sqrt(c)), c squarefree.
pub fn place_splits_in_quad(p: &BigInt, c: &BigInt) -> bool {
    let two = BigInt::from(2);
    if *p == two {
        return c.mod_floor(&BigInt::from(8)).is_one();
    }
    if (c % p).is_zero() {
        return false; // ramified
    }
    arith::legendre_symbol(c, p) == 1
}

/// The x-coordinate of a fibre point: rational or quadratic over Q.
#[derive(Debug, Clone)]
pub enum FibreX {
    Rat(Rational),
    Quad(QuadFieldElement),
}

/// Element of the base field, carried by pullback results.
#[derive(Debug, Clone)]
pub enum KElem {
    Rat(Rational),
    Quad(QuadFieldElement),
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KElem::Rat(r) => write!(f, "{}", r),
            KElem::Quad(q) => write!(f, "{}", q),
        }
    }
}

/// Residue data of the conic bundle at the curve point above x = pt_x.
#[derive(Debug, Clone)]
pub struct PullbackResidue {
    /// Degree of the residue field over the base: 1 when r(pt_x) is a
    /// square in the base field, else 2 (field generated by sqrt(r(pt_x))).
    pub field_degree: u8,
    /// r(pt_x), the element whose square root generates the residue field.
    pub field_gen: KElem,
    /// Residue class of the algebra at x = pt_x, as a base field element.
    pub class: KElem,
    pub trivial: bool,
}

/// Residue of the conic bundle on the curve point above x = pt_x on the
/// double cover y^2 = r(x).
///
/// The residue field is k(sqrt(r(pt_x))); the class is the residue of the
/// algebra at the point of the line below; triviality is decided by: e is
/// a square in k(sqrt(d)) iff e or e*d is a square in k.
pub fn pullback_residue_to_curve(
    algebra: &SymbolAlgebra,
    r: &QPoly,
    pt_x: &FibreX,
    base: &BaseField,
) -> Result<PullbackResidue, FuncFieldError> {
    match pt_x {
        FibreX::Rat(t) => {
            let rt = r.eval(t);
            if rt.is_zero() {
                return Err(FuncFieldError::TwoTorsion(t.to_string()));
            }
            let pt = ClosedPoint::rational(t.clone());
            let cls = algebra_residue(algebra, &pt)?;
            let e = match cls.rep {
                ResidueRep::Rat(e) => e,
                ResidueRep::Quad(_) => unreachable!("degree-1 point"),
            };
            let trivial =
                base.rational_is_square(&e) || base.rational_is_square(&(&e * &rt));
            Ok(PullbackResidue {
                field_degree: if base.rational_is_square(&rt) { 1 } else { 2 },
                field_gen: KElem::Rat(rt),
                class: KElem::Rat(e),
                trivial,
            })
        }
        FibreX::Quad(t) => {
            if let BaseField::Quadratic(c) = base {
                assert_eq!(&t.c, c, "fibre x-coordinate must live in the base field");
            }
            let rt = r.eval_quad(t);
            if rt.is_zero() {
                return Err(FuncFieldError::TwoTorsion(t.to_string()));
            }
            let minpoly = quad_minpoly(t);
            let mut class = QuadFieldElement::from_rational(Rational::one(), t.c.clone());
            for (f, g) in algebra.symbols() {
                let vf = quad_point_valuation(f, &minpoly);
                let vg = quad_point_valuation(g, &minpoly);
                if vf == 0 && vg == 0 {
                    continue;
                }
                let f0 = quad_unit_value(f, &minpoly, t);
                let g0 = quad_unit_value(g, &minpoly, t);
                let mut term = quad_pow(&f0, vg).mul(&quad_pow(&g0, -vf));
                if (vf * vg) % 2 != 0 {
                    term = term.neg();
                }
                class = class.mul(&term);
            }
            let trivial = class.is_square_in_field() || class.mul(&rt).is_square_in_field();
            Ok(PullbackResidue {
                field_degree: if rt.is_square_in_field() { 1 } else { 2 },
                field_gen: KElem::Quad(rt),
                class: KElem::Quad(class),
                trivial,
            })
        }
    }
}

fn quad_minpoly(t: &QuadFieldElement) -> QPoly {
    if t.is_rational() {
        QPoly::linear(&t.a)
    } else {
        // (x - t)(x - conj t) = x^2 - 2a x + norm
        QPoly::new(vec![
            t.norm(),
            -&(&t.a * &Rational::from(2)),
            Rational::one(),
        ])
    }
}

/// Multiplicity of (x - t) over k[x] in f: the minimal polynomial of t is
/// squarefree over Q, so over k it splits into distinct conjugate linear
/// factors, and the (x - t)-multiplicity equals the minpoly multiplicity.
fn quad_point_valuation(f: &RatFunc, minpoly: &QPoly) -> i64 {
    let (en, _) = f.num().strip_factor(minpoly);
    let (ed, _) = f.den().strip_factor(minpoly);
    en as i64 - ed as i64
}

fn quad_unit_value(f: &RatFunc, minpoly: &QPoly, t: &QuadFieldElement) -> QuadFieldElement {
    let (_, n0) = f.num().strip_factor(minpoly);
    let (_, d0) = f.den().strip_factor(minpoly);
    n0.eval_quad(t).mul(&d0.eval_quad(t).inverse())
}

fn quad_pow(x: &QuadFieldElement, e: i64) -> QuadFieldElement {
    let mut acc = QuadFieldElement::from_rational(Rational::one(), x.c.clone());
    let base = if e < 0 { x.inverse() } else { x.clone() };
    for _ in 0..e.unsigned_abs() {
        acc = acc.mul(&base);
    }
    acc
}

/// Monic irreducible factors with multiplicities. Complete for
/// polynomials whose irreducible factors have degree at most 4.
pub fn factor_monic(p: &QPoly) -> Result<Vec<(QPoly, u32)>, FuncFieldError> {
    if p.is_zero() {
        return Err(FuncFieldError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Ok(vec![]);
    }
    let f = p.monic();
    let d = f.derivative();
    let g = f.gcd(&d);
    let radical = if g.is_constant() {
        f.clone()
    } else {
        f.divrem(&g).0.monic()
    };
    let mut irreducibles = factor_squarefree(&radical)?;
    irreducibles.sort();
    irreducibles.dedup();
    let mut out = Vec::new();
    for q in irreducibles {
        let (e, _) = f.strip_factor(&q);
        debug_assert!(e >= 1);
        out.push((q, e));
    }
    Ok(out)
}

fn factor_squarefree(f: &QPoly) -> Result<Vec<QPoly>, FuncFieldError> {
    let mut out = Vec::new();
    let mut rest = f.monic();
    loop {
        if rest.is_constant() {
            return Ok(out);
        }
        if rest.degree() == 1 {
            out.push(rest.monic());
            return Ok(out);
        }
        match find_rational_root(&rest)? {
            Some(t) => {
                let lin = QPoly::linear(&t);
                out.push(lin.clone());
                rest = rest.divrem(&lin).0.monic();
            }
            None => break,
        }
    }
    match rest.degree() {
        2 | 3 => {
            out.push(rest);
            Ok(out)
        }
        4 => {
            match split_quartic(&rest)? {
                Some((q1, q2)) => {
                    out.push(q1);
                    out.push(q2);
                }
                None => out.push(rest),
            }
            Ok(out)
        }
        d => Err(FuncFieldError::UnsupportedDegree(d)),
    }
}

/// Smallest-height rational root, if any, of a nonconstant polynomial.
pub fn find_rational_root(f: &QPoly) -> Result<Option<Rational>, FuncFieldError> {
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let k = ints.iter().position(|c| !c.is_zero()).unwrap();
    if k > 0 {
        return Ok(Some(Rational::zero()));
    }
    let a0 = &ints[0];
    let an = ints.last().unwrap();
    let dnum = divisors(a0)?;
    let dden = divisors(an)?;
    let mut candidates: Vec<Rational> = Vec::new();
    for n in &dnum {
        for d in &dden {
            let r = Rational::new(n.clone(), d.clone());
            candidates.push(r.clone());
            candidates.push(-r);
        }
    }
    candidates.sort_by(|a, b| {
        (a.numer().abs() * b.denom())
            .cmp(&(b.numer().abs() * a.denom()))
            .then_with(|| b.cmp(a))
    });
    candidates.dedup();
    for t in candidates {
        if f.eval(&t).is_zero() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>, FuncFieldError> {
    let f = arith::factorize(n)?;
    let mut out = vec![BigInt::one()];
    for (p, e) in &f.factors {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

/// Splits a monic quartic with no rational roots into two monic rational
/// quadratics via the resolvent cubic, or proves it irreducible.
fn split_quartic(f: &QPoly) -> Result<Option<(QPoly, QPoly)>, FuncFieldError> {
    debug_assert_eq!(f.degree(), 4);
    debug_assert!(f.leading().is_one());
    let a = f.coeff(3);
    let shift = -&(&a / &Rational::from(4));
    let dep = compose_linear(f, &shift); // f(y + shift) in y
    let p = dep.coeff(2);
    let q = dep.coeff(1);
    let r = dep.coeff(0);
    debug_assert!(dep.coeff(3).is_zero());

    let reassemble = |v: &Rational, u: &Rational, w: &Rational| -> (QPoly, QPoly) {
        // (y^2 + u y + v)(y^2 - u y + w), then y = x - shift
        let q1 = QPoly::new(vec![v.clone(), u.clone(), Rational::one()]);
        let q2 = QPoly::new(vec![w.clone(), -u, Rational::one()]);
        let back = -&shift;
        (compose_linear(&q1, &back), compose_linear(&q2, &back))
    };

    if q.is_zero() {
        let disc = &(&p * &p) - &(&Rational::from(4) * &r);
        if let Some(s) = disc.sqrt_exact() {
            let v = &(&p + &s) / &Rational::from(2);
            let w = &(&p - &s) / &Rational::from(2);
            return Ok(Some(reassemble(&v, &Rational::zero(), &w)));
        }
        if let Some(v) = r.sqrt_exact() {
            for vv in [v.clone(), -&v] {
                let u2 = &(&vv * &Rational::from(2)) - &p;
                if let Some(u) = u2.sqrt_exact() {
                    if !u.is_zero() {
                        return Ok(Some(reassemble(&vv, &u, &vv)));
                    }
                }
            }
        }
        return Ok(None);
    }

    // resolvent cubic z^3 + 2p z^2 + (p^2 - 4r) z - q^2 with z = u^2
    let resolvent = QPoly::new(vec![
        -&(&q * &q),
        &(&p * &p) - &(&Rational::from(4) * &r),
        &p * &Rational::from(2),
        Rational::one(),
    ]);
    let roots = all_rational_roots(&resolvent)?;
    for z in roots {
        if z.is_zero() {
            continue;
        }
        if let Some(u) = z.sqrt_exact() {
            let sum = &p + &z;
            let diff = &q / &u;
            let w = &(&sum + &diff) / &Rational::from(2);
            let v = &(&sum - &diff) / &Rational::from(2);
            let (f1, f2) = reassemble(&v, &u, &w);
            if f1.mul(&f2) == *f {
                return Ok(Some((f1, f2)));
            }
        }
    }
    Ok(None)
}

fn all_rational_roots(f: &QPoly) -> Result<Vec<Rational>, FuncFieldError> {
    let mut out = Vec::new();
    let mut rest = f.monic();
    while !rest.is_constant() {
        if rest.degree() == 1 {
            out.push(-&rest.coeff(0));
            break;
        }
        match find_rational_root(&rest)? {
            Some(t) => {
                out.push(t.clone());
                rest = rest.divrem(&QPoly::linear(&t)).0.monic();
            }
            None => break,
        }
    }
    out.dedup();
    Ok(out)
}

/// f(x + shift) by Horner composition.
fn compose_linear(f: &QPoly, shift: &Rational) -> QPoly {
    let lin = QPoly::new(vec![shift.clone(), Rational::one()]);
    let mut acc = QPoly::zero();
    for c in f.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&QPoly::constant(c.clone()));
    }
    acc
}
