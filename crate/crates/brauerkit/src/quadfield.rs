//! Elements of quadratic fields Q(sqrt(c)) and certified isotropy of
//! diagonal forms over the completion at the prime above 2.
//!
//! The completion model keeps everything exact: candidate solutions are
//! honest elements of the order written on an integral basis (1, theta),
//! values are evaluated in the ring, and valuations are computed from
//! norms. Isotropy is certified by a one-variable Hensel criterion
//! (val f(x) > 2 val of a partial derivative); anisotropy is certified by
//! exhausting all primitive approximate solutions past the depth at which
//! any truncation of a genuine zero must fire the criterion.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::arith::{int_valuation, squarefree_part, ArithError};
use crate::rational::Rational;

/// a + b*sqrt(c) with c squarefree, c != 0, 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadFieldElement {
    pub a: Rational,
    pub b: Rational,
    pub c: BigInt,
}

impl QuadFieldElement {
    pub fn new(a: Rational, b: Rational, c: BigInt) -> Self {
        assert!(!c.is_zero() && !c.is_one(), "c must be squarefree, not 0 or 1");
        QuadFieldElement { a, b, c }
    }

    pub fn from_rational(a: Rational, c: BigInt) -> Self {
        Self::new(a, Rational::zero(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadFieldElement::new(self.a.clone(), -&self.b, self.c.clone())
    }

    /// a^2 - c b^2, the norm to Q.
    pub fn norm(&self) -> Rational {
        &(&self.a * &self.a) - &(&Rational::from_int(self.c.clone()) * &(&self.b * &self.b))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.c, other.c);
        let c = Rational::from_int(self.c.clone());
        QuadFieldElement::new(
            &(&self.a * &other.a) + &(&c * &(&self.b * &other.b)),
            &(&self.a * &other.b) + &(&self.b * &other.a),
            self.c.clone(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.c, other.c);
        QuadFieldElement::new(&self.a + &other.a, &self.b + &other.b, self.c.clone())
    }

    pub fn neg(&self) -> Self {
        QuadFieldElement::new(-&self.a, -&self.b, self.c.clone())
    }

    pub fn inverse(&self) -> Self {
        assert!(!self.is_zero());
        let n = self.norm();
        let conj = self.conjugate();
        QuadFieldElement::new(&conj.a / &n, &conj.b / &n, self.c.clone())
    }

    /// Sign of the image under the embedding sending sqrt(c) to the
    /// positive root (requires c > 0).
    pub fn sign_principal(&self) -> i32 {
        self.sign_embedding(true)
    }

    /// Sign under the embedding with sqrt(c) -> +sqrt(c) (plus = true)
    /// or sqrt(c) -> -sqrt(c) (plus = false). Requires c > 0.
    pub fn sign_embedding(&self, plus: bool) -> i32 {
        assert!(self.c.is_positive(), "real embeddings need c > 0");
        let b = if plus { self.b.clone() } else { -&self.b };
        let (sa, sb) = (self.a.signum(), b.signum());
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // mixed signs: compare a^2 against c b^2
        let diff = &(&self.a * &self.a)
            - &(&Rational::from_int(self.c.clone()) * &(&b * &b));
        sa * diff.signum()
    }

    /// Negative under every real embedding (c > 0).
    pub fn is_totally_negative(&self) -> bool {
        self.sign_embedding(true) < 0 && self.sign_embedding(false) < 0
    }

    /// Positive under every real embedding (c > 0).
    pub fn is_totally_positive(&self) -> bool {
        self.sign_embedding(true) > 0 && self.sign_embedding(false) > 0
    }

    /// Exact test for membership in the square class of Q(sqrt(c)).
    ///
    /// For rational e: e is a square iff e or e*c is a rational square.
    /// Otherwise e = a + b sqrt(c) is a square iff its norm is a rational
    /// square s^2 and (a + s)/2 or (a - s)/2 is a rational square.
    pub fn is_square_in_field(&self) -> bool {
        if self.is_zero() {
            return true;
        }
        if self.c.is_positive() && self.sign_embedding(true) < 0 {
            // totally real shortcut half: any square is nonneg everywhere
            if self.sign_embedding(false) < 0 {
                return false;
            }
        }
        if self.b.is_zero() {
            let e = &self.a;
            if e.is_square() {
                return true;
            }
            return (e * &Rational::from_int(self.c.clone())).is_square();
        }
        let n = self.norm();
        let s = match n.sqrt_exact() {
            Some(s) => s,
            None => return false,
        };
        let half = Rational::from(2);
        let cand1 = &(&self.a + &s) / &half;
        let cand2 = &(&self.a - &s) / &half;
        // u^2 = (a +- s)/2 and v = b/(2u) reconstructs the square root
        cand1.is_square() || cand2.is_square()
    }
}

impl fmt::Display for QuadFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.c);
        }
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadFieldError {
    /// c = 1 mod 8: the prime 2 splits, there is no unique place above it.
    SplitAtTwo { c: BigInt },
    NotSquarefree { c: BigInt },
    /// Search exhausted the configured precision without either
    /// certificate (cannot occur at the automatic threshold).
    PrecisionExhausted { level: u32 },
    Arith(ArithError),
}

impl fmt::Display for QuadFieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadFieldError::SplitAtTwo { c } => {
                write!(f, "2 splits in Q(sqrt({})): c = 1 mod 8 is excluded", c)
            }
            QuadFieldError::NotSquarefree { c } => write!(f, "{} is not squarefree", c),
            QuadFieldError::PrecisionExhausted { level } => {
                write!(f, "inconclusive at pi-adic precision {}", level)
            }
            QuadFieldError::Arith(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for QuadFieldError {}

impl From<ArithError> for QuadFieldError {
    fn from(e: ArithError) -> Self {
        QuadFieldError::Arith(e)
    }
}

/// How 2 behaves in Q(sqrt(c)) for squarefree c, c != 1 mod 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoAdicShape {
    /// c = 2 mod 4 or c = 3 mod 4: one prime with e = 2, uniformizer
    /// sqrt(c) resp. 1 + sqrt(c).
    Ramified,
    /// c = 5 mod 8: one prime with f = 2, uniformizer 2.
    Inert,
}

/// Exact arithmetic in the order Z[theta] of Q(sqrt(c)) localized at 2,
/// with theta^2 = t*theta + n.
struct RingAtTwo {
    t: BigInt,
    n: BigInt,
    shape: TwoAdicShape,
    pi: (BigInt, BigInt),
}

type Elt = (BigInt, BigInt); // x + y*theta

impl RingAtTwo {
    fn new(c: &BigInt) -> Result<Self, QuadFieldError> {
        let c4 = c.mod_floor(&BigInt::from(4));
        let c8 = c.mod_floor(&BigInt::from(8));
        if c8.is_one() {
            return Err(QuadFieldError::SplitAtTwo { c: c.clone() });
        }
        if c4 == BigInt::from(2) {
            // theta = sqrt(c), pi = theta
            Ok(RingAtTwo {
                t: BigInt::zero(),
                n: c.clone(),
                shape: TwoAdicShape::Ramified,
                pi: (BigInt::zero(), BigInt::one()),
            })
        } else if c4 == BigInt::from(3) {
            // theta = sqrt(c), pi = 1 + theta (norm 1 - c, valuation 1)
            Ok(RingAtTwo {
                t: BigInt::zero(),
                n: c.clone(),
                shape: TwoAdicShape::Ramified,
                pi: (BigInt::one(), BigInt::one()),
            })
        } else {
            // c = 5 mod 8: theta = (1 + sqrt(c))/2, theta^2 = theta + (c-1)/4
            Ok(RingAtTwo {
                t: BigInt::one(),
                n: (c - 1) / 4,
                shape: TwoAdicShape::Inert,
                pi: (BigInt::from(2), BigInt::zero()),
            })
        }
    }

    fn mul(&self, x: &Elt, y: &Elt) -> Elt {
        let lin = &x.0 * &y.1 + &x.1 * &y.0 + &self.t * &x.1 * &y.1;
        let cst = &x.0 * &y.0 + &self.n * &x.1 * &y.1;
        (cst, lin)
    }

    fn add(&self, x: &Elt, y: &Elt) -> Elt {
        (&x.0 + &y.0, &x.1 + &y.1)
    }

    fn is_zero(&self, x: &Elt) -> bool {
        x.0.is_zero() && x.1.is_zero()
    }

    fn norm(&self, x: &Elt) -> BigInt {
        // N(x + y theta) = x^2 + t x y - n y^2
        &x.0 * &x.0 + &self.t * &x.0 * &x.1 - &self.n * &x.1 * &x.1
    }

    /// Valuation normalized by w(pi) = 1 (so w(2) = 2 ramified, 1 inert).
    fn valuation(&self, x: &Elt) -> i64 {
        assert!(!self.is_zero(x), "valuation of zero");
        match self.shape {
            TwoAdicShape::Ramified => int_valuation(&self.norm(x), &BigInt::from(2)),
            TwoAdicShape::Inert => {
                let two = BigInt::from(2);
                let vx = if x.0.is_zero() {
                    i64::MAX
                } else {
                    int_valuation(&x.0, &two)
                };
                let vy = if x.1.is_zero() {
                    i64::MAX
                } else {
                    int_valuation(&x.1, &two)
                };
                vx.min(vy)
            }
        }
    }

    fn w2(&self) -> i64 {
        match self.shape {
            TwoAdicShape::Ramified => 2,
            TwoAdicShape::Inert => 1,
        }
    }

    /// Exact division by pi^2 inside the global order, when possible.
    /// The local valuation may allow a division the global ring does not
    /// (pi^2 can involve odd primes of c), so this is fallible.
    fn try_div_pi2(&self, x: &Elt) -> Option<Elt> {
        let pi2 = self.mul(&self.pi, &self.pi);
        // q = x * conj(pi2) / N(pi2), conj(a + b theta) = (a + t b) - b theta
        let conj = (&pi2.0 + &self.t * &pi2.1, -&pi2.1);
        let num = self.mul(x, &conj);
        let den = self.norm(&pi2);
        let (q0, r0) = num.0.div_rem(&den);
        let (q1, r1) = num.1.div_rem(&den);
        if r0.is_zero() && r1.is_zero() {
            Some((q0, q1))
        } else {
            None
        }
    }

    fn residues(&self) -> Vec<Elt> {
        match self.shape {
            TwoAdicShape::Ramified => vec![
                (BigInt::zero(), BigInt::zero()),
                (BigInt::one(), BigInt::zero()),
            ],
            TwoAdicShape::Inert => vec![
                (BigInt::zero(), BigInt::zero()),
                (BigInt::one(), BigInt::zero()),
                (BigInt::zero(), BigInt::one()),
                (BigInt::one(), BigInt::one()),
            ],
        }
    }

    /// Converts a + b sqrt(c) (integral a, b) to the (1, theta) basis.
    fn from_sqrt_basis(&self, a: &BigInt, b: &BigInt) -> Elt {
        match self.shape {
            TwoAdicShape::Ramified => (a.clone(), b.clone()),
            // sqrt(c) = 2 theta - 1
            TwoAdicShape::Inert => (a - b, BigInt::from(2) * b),
        }
    }
}

/// Isotropy verdict for the completion at the prime over 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalCertStatus {
    Isotropic,
    Anisotropic,
}

/// A liftable approximate zero: either exact (value zero in the order) or
/// satisfying the strict Hensel inequality at the stated coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HenselWitness {
    /// Solution vector in the (1, theta) basis of the completion's order.
    pub vector: Vec<(BigInt, BigInt)>,
    /// pi-adic level at which the vector was produced.
    pub level: u32,
    /// Coordinate whose partial derivative certifies the lift.
    pub coordinate: usize,
    /// w(f(x)); None when f(x) = 0 exactly.
    pub value_valuation: Option<i64>,
    pub gradient_valuation: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalCertificate {
    pub status: LocalCertStatus,
    pub witness: Option<HenselWitness>,
    /// Depth certified (witness level, or the exhausted search depth).
    pub precision: u32,
    /// Field discriminant parameter c.
    pub c: BigInt,
    /// The square-scaled integral coefficients actually searched, in the
    /// (1, theta) basis. Witness verification re-evaluates against these.
    pub coefficients: Vec<(BigInt, BigInt)>,
}

impl LocalCertificate {
    /// Recomputes the Hensel inequality from the embedded raw data.
    pub fn verify(&self) -> bool {
        let ring = match RingAtTwo::new(&self.c) {
            Ok(r) => r,
            Err(_) => return false,
        };
        match (&self.status, &self.witness) {
            (LocalCertStatus::Isotropic, Some(w)) => {
                if w.vector.len() != self.coefficients.len() {
                    return false;
                }
                // primitivity
                if !w.vector.iter().any(|x| !ring.is_zero(x) && ring.valuation(x) == 0) {
                    return false;
                }
                let mut val = (BigInt::zero(), BigInt::zero());
                for (a, x) in self.coefficients.iter().zip(w.vector.iter()) {
                    let sq = ring.mul(x, x);
                    val = ring.add(&val, &ring.mul(a, &sq));
                }
                if ring.is_zero(&val) {
                    return w.value_valuation.is_none();
                }
                let wf = ring.valuation(&val);
                if w.value_valuation != Some(wf) {
                    return false;
                }
                let i = w.coordinate;
                if i >= w.vector.len() {
                    return false;
                }
                let two = (BigInt::from(2), BigInt::zero());
                let g = ring.mul(&two, &ring.mul(&self.coefficients[i], &w.vector[i]));
                if ring.is_zero(&g) {
                    return false;
                }
                let wg = ring.valuation(&g);
                wg == w.gradient_valuation && wf > 2 * wg
            }
            (LocalCertStatus::Anisotropic, None) => true,
            _ => false,
        }
    }
}

/// Decides isotropy of a diagonal form with Q(sqrt(c)) coefficients over
/// the completion at the unique prime above 2.
///
/// Preconditions: c squarefree, positive or negative but not 0, 1, and
/// c != 1 mod 8 (so the prime is unique). `precision` is a floor; the
/// search depth is raised automatically to the sound threshold
/// 2*(w(2) + max coefficient valuation) + 2, past which exhaustion proves
/// anisotropy outright.
pub fn is_isotropic_quadfield_at_two(
    coeffs: &[QuadFieldElement],
    c: &BigInt,
    precision: u32,
) -> Result<LocalCertificate, QuadFieldError> {
    assert!(!coeffs.is_empty());
    if squarefree_part(c)? != *c {
        return Err(QuadFieldError::NotSquarefree { c: c.clone() });
    }
    let ring = RingAtTwo::new(c)?;

    // integral, square-reduced coefficients in the theta basis
    let mut acoef: Vec<Elt> = Vec::with_capacity(coeffs.len());
    for q in coeffs {
        assert_eq!(q.c, *c, "mixed fields");
        assert!(!q.is_zero(), "zero coefficient");
        // clear denominators by the square of the lcm
        let d = q.a.denom().lcm(q.b.denom());
        let a_int = q.a.numer() * (&d / q.a.denom()) * &d;
        let b_int = q.b.numer() * (&d / q.b.denom()) * &d;
        let mut e = ring.from_sqrt_basis(&a_int, &b_int);
        // strip even powers of pi where the global ring allows it: square
        // scaling preserves isotropy and keeps the Hensel threshold small;
        // anything left raises the automatic search depth instead
        while ring.valuation(&e) >= 2 {
            match ring.try_div_pi2(&e) {
                Some(q) => e = q,
                None => break,
            }
        }
        acoef.push(e);
    }

    let s_star = ring.w2() + acoef.iter().map(|a| ring.valuation(a)).max().unwrap();
    let depth = precision.max((2 * s_star + 2) as u32);

    let mut survivor = false;
    let witness = search(
        &ring,
        &acoef,
        depth,
        s_star,
        &mut survivor,
    );

    match witness {
        Some(w) => Ok(LocalCertificate {
            precision: w.level,
            status: LocalCertStatus::Isotropic,
            witness: Some(w),
            c: c.clone(),
            coefficients: acoef,
        }),
        None if survivor => Err(QuadFieldError::PrecisionExhausted { level: depth }),
        None => Ok(LocalCertificate {
            status: LocalCertStatus::Anisotropic,
            witness: None,
            precision: depth,
            c: c.clone(),
            coefficients: acoef,
        }),
    }
}

/// Depth-first lift of primitive approximate zeros. A node at level m is a
/// vector with w(f(x)) >= m; it fires as soon as the Hensel inequality
/// holds at some coordinate; children refine each coordinate by pi^m times
/// a residue. Any truncation of a genuine primitive zero survives every
/// level and must fire by level 2 s* + 1, so die-out certifies anisotropy.
fn search(
    ring: &RingAtTwo,
    coeffs: &[Elt],
    depth: u32,
    _s_star: i64,
    survivor: &mut bool,
) -> Option<HenselWitness> {
    let r = coeffs.len();
    let residues = ring.residues();
    // level-1 seeds: all residue vectors that are not identically zero
    let mut seeds: Vec<Vec<Elt>> = Vec::new();
    enumerate_vectors(&residues, r, &mut |v| {
        if v.iter().any(|x| !ring.is_zero(x)) {
            seeds.push(v.to_vec());
        }
    });
    let pi_pows = {
        let mut pows = vec![(BigInt::one(), BigInt::zero())];
        for _ in 0..depth {
            let last = pows.last().unwrap().clone();
            pows.push(ring.mul(&last, &ring.pi));
        }
        pows
    };
    for seed in seeds {
        if let Some(w) = dfs(ring, coeffs, &seed, 1, depth, &pi_pows, &residues, survivor) {
            return Some(w);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ring: &RingAtTwo,
    coeffs: &[Elt],
    x: &[Elt],
    level: u32,
    depth: u32,
    pi_pows: &[Elt],
    residues: &[Elt],
    survivor: &mut bool,
) -> Option<HenselWitness> {
    // f(x) exactly
    let mut val = (BigInt::zero(), BigInt::zero());
    for (a, xi) in coeffs.iter().zip(x.iter()) {
        let sq = ring.mul(xi, xi);
        val = ring.add(&val, &ring.mul(a, &sq));
    }
    if ring.is_zero(&val) {
        // exact zero of the form in the order
        let i = x
            .iter()
            .position(|xi| !ring.is_zero(xi) && ring.valuation(xi) == 0)?;
        let two = (BigInt::from(2), BigInt::zero());
        let g = ring.mul(&two, &ring.mul(&coeffs[i], &x[i]));
        return Some(HenselWitness {
            vector: x.to_vec(),
            level,
            coordinate: i,
            value_valuation: None,
            gradient_valuation: ring.valuation(&g),
        });
    }
    let wf = ring.valuation(&val);
    if (wf as u32) < level {
        return None; // not an approximate zero at this level
    }
    // Hensel test at each coordinate with nonzero gradient
    let two = (BigInt::from(2), BigInt::zero());
    for (i, xi) in x.iter().enumerate() {
        if ring.is_zero(xi) {
            continue;
        }
        let g = ring.mul(&two, &ring.mul(&coeffs[i], xi));
        if ring.is_zero(&g) {
            continue;
        }
        let wg = ring.valuation(&g);
        if wf > 2 * wg {
            return Some(HenselWitness {
                vector: x.to_vec(),
                level,
                coordinate: i,
                value_valuation: Some(wf),
                gradient_valuation: wg,
            });
        }
    }
    if level >= depth {
        *survivor = true;
        return None;
    }
    // refine: x + pi^level * delta
    let step = &pi_pows[level as usize];
    let mut result = None;
    enumerate_vectors(residues, x.len(), &mut |delta| {
        if result.is_some() {
            return;
        }
        let child: Vec<Elt> = x
            .iter()
            .zip(delta.iter())
            .map(|(xi, d)| ring.add(xi, &ring.mul(step, d)))
            .collect();
        if let Some(w) = dfs(
            ring,
            coeffs,
            &child,
            level + 1,
            depth,
            pi_pows,
            residues,
            survivor,
        ) {
            result = Some(w);
        }
    });
    result
}

fn enumerate_vectors(residues: &[Elt], len: usize, f: &mut impl FnMut(&[Elt])) {
    let mut idx = vec![0usize; len];
    loop {
        let v: Vec<Elt> = idx.iter().map(|&i| residues[i].clone()).collect();
        f(&v);
        let mut i = 0;
        loop {
            if i == len {
                return;
            }
            idx[i] += 1;
            if idx[i] < residues.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}
