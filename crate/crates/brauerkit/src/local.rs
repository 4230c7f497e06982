//! Hilbert symbols, Hasse invariants and isotropy of diagonal quadratic
//! forms over the completions of Q, plus the Hasse-Minkowski global test
//! and the Albert-form criterion for biquaternion algebras.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed};

use crate::arith::{
    self, factorize, int_valuation, legendre_symbol, ArithError, Place,
};
use crate::rational::Rational;

/// A diagonal quadratic form <a_1, ..., a_r> with nonzero rational entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    coeffs: Vec<Rational>,
}

impl DiagonalForm {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "rank must be at least 1");
        assert!(
            coeffs.iter().all(|c| !c.is_zero()),
            "coefficients must be nonzero"
        );
        DiagonalForm { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn discriminant(&self) -> Rational {
        let mut d = Rational::one();
        for c in &self.coeffs {
            d = d * c;
        }
        d
    }

    /// f(x) = sum a_i x_i^2, evaluated exactly.
    pub fn evaluate(&self, x: &[Rational]) -> Rational {
        assert_eq!(x.len(), self.rank());
        let mut acc = Rational::zero();
        for (c, xi) in self.coeffs.iter().zip(x.iter()) {
            acc = acc + c * &(xi * xi);
        }
        acc
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "<{}>", parts.join(","))
    }
}

fn eps_mod2(u: &BigInt) -> u32 {
    // (u - 1)/2 mod 2 for odd u
    let m = u.mod_floor(&BigInt::from(4));
    if m == BigInt::from(3) {
        1
    } else {
        0
    }
}

fn omega_mod2(u: &BigInt) -> u32 {
    // (u^2 - 1)/8 mod 2 for odd u
    let m = u.mod_floor(&BigInt::from(8));
    let m = arith::to_i64(&m).unwrap();
    if m == 1 || m == 7 {
        0
    } else {
        1
    }
}

/// Hilbert symbol (a, b)_v of Q: +1 iff z^2 = a x^2 + b y^2 has a
/// nontrivial solution in the completion at v. Symmetric, bimultiplicative,
/// invariant under square scaling of either slot.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: &Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero());
    // square classes as integers
    let a = a.square_class_int();
    let b = b.square_class_int();
    match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(p) => {
            let alpha = int_valuation(&a, p);
            let beta = int_valuation(&b, p);
            let u = &a / p.pow(alpha as u32);
            let w = &b / p.pow(beta as u32);
            if *p == BigInt::from(2) {
                let e = eps_mod2(&u) * eps_mod2(&w)
                    + (alpha as u32 % 2) * omega_mod2(&w)
                    + (beta as u32 % 2) * omega_mod2(&u);
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                let mut s = 1i32;
                if alpha % 2 == 1 && beta % 2 == 1 && eps_mod2(p) == 1 {
                    s = -s;
                }
                if beta % 2 == 1 {
                    s *= legendre_symbol(&u, p);
                }
                if alpha % 2 == 1 {
                    s *= legendre_symbol(&w, p);
                }
                s
            }
        }
    }
}

/// Product of the pairwise Hilbert symbols (a_i, a_j)_v over i < j.
pub fn hasse_invariant(f: &DiagonalForm, v: &Place) -> i32 {
    let cs = f.coeffs();
    let mut s = 1i32;
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            s *= hilbert_symbol(&cs[i], &cs[j], v);
        }
    }
    s
}

/// Classical local isotropy criteria for a diagonal form at a place of Q.
pub fn is_isotropic_local(f: &DiagonalForm, v: &Place) -> bool {
    let rank = f.rank();
    if rank == 1 {
        return false;
    }
    if v.is_real() {
        let has_pos = f.coeffs().iter().any(|c| c.is_positive());
        let has_neg = f.coeffs().iter().any(|c| c.is_negative());
        return has_pos && has_neg;
    }
    let d = f.discriminant();
    match rank {
        2 => {
            let m = -&d; // -a1*a2 up to squares
            arith::is_square_in_qp(&m, v)
        }
        3 => {
            // anisotropic iff Hasse invariant differs from (-1, -d)_v
            let target = hilbert_symbol(&Rational::from(-1), &(-&d), v);
            hasse_invariant(f, v) == target
        }
        4 => {
            if !arith::is_square_in_qp(&d, v) {
                true
            } else {
                hasse_invariant(f, v)
                    == hilbert_symbol(&Rational::from(-1), &Rational::from(-1), v)
            }
        }
        _ => true, // rank >= 5 is always isotropic over a p-adic field
    }
}

/// The finite set of places where f is anisotropic. Only 2, the real place
/// and the primes meeting the coefficients' numerators or denominators can
/// carry a nontrivial symbol, so the search is complete.
pub fn anisotropic_places(f: &DiagonalForm) -> Result<BTreeSet<Place>, ArithError> {
    assert!(f.rank() >= 2);
    let mut candidates: BTreeSet<Place> = BTreeSet::new();
    candidates.insert(Place::Real);
    candidates.insert(Place::Finite(BigInt::from(2)));
    for c in f.coeffs() {
        for part in [c.numer(), c.denom()] {
            if part.is_one() || *part == -BigInt::one() {
                continue;
            }
            for (p, _) in factorize(part)?.factors {
                candidates.insert(Place::Finite(p));
            }
        }
    }
    Ok(candidates
        .into_iter()
        .filter(|v| !is_isotropic_local(f, v))
        .collect())
}

/// Hasse-Minkowski: isotropic over Q iff isotropic at every place.
pub fn is_isotropic_over_q(f: &DiagonalForm) -> Result<bool, ArithError> {
    Ok(anisotropic_places(f)?.is_empty())
}

/// Bounded search for a nonzero rational zero of the form. Entries of the
/// returned vector are integers of magnitude at most `height_bound`, with
/// content 1 and first nonzero entry positive. Absence of a result is not
/// a proof of anisotropy.
pub fn find_isotropic_vector(f: &DiagonalForm, height_bound: u64) -> Option<Vec<Rational>> {
    assert!(f.rank() >= 2);
    // cheap analytic rejection: a form anisotropic over Q has no zero at all
    if let Ok(false) = is_isotropic_over_q(f) {
        return None;
    }
    let rank = f.rank();
    // clear denominators: integer coefficients define the same zero set
    let mut lcm = BigInt::one();
    for c in f.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let coeffs: Vec<BigInt> = f
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();

    let h = height_bound as i64;
    let split = rank / 2;
    let (left, right) = coeffs.split_at(split);

    // meet in the middle: hash partial sums of the left half
    use std::collections::HashMap;
    let mut table: HashMap<BigInt, Vec<i64>> = HashMap::new();
    let mut left_vec = vec![0i64; left.len()];
    loop {
        let s: BigInt = left
            .iter()
            .zip(left_vec.iter())
            .map(|(c, &x)| c * BigInt::from(x) * BigInt::from(x))
            .sum();
        table.entry(s).or_insert_with(|| left_vec.clone());
        if !increment(&mut left_vec, h) {
            break;
        }
    }

    let mut right_vec = vec![0i64; right.len()];
    loop {
        let s: BigInt = right
            .iter()
            .zip(right_vec.iter())
            .map(|(c, &x)| c * BigInt::from(x) * BigInt::from(x))
            .sum();
        if let Some(lv) = table.get(&(-s)) {
            let mut full: Vec<i64> = lv.iter().chain(right_vec.iter()).copied().collect();
            if full.iter().any(|&x| x != 0) {
                normalize_vector(&mut full);
                let out: Vec<Rational> = full.iter().map(|&x| Rational::from(x)).collect();
                debug_assert!(f.evaluate(&out).is_zero());
                return Some(out);
            }
        }
        if !increment(&mut right_vec, h) {
            break;
        }
    }
    None
}

/// Odometer over [-h, h]^k starting from 0, visiting small magnitudes
/// first per coordinate: 0, 1, -1, 2, -2, ...
fn increment(v: &mut [i64], h: i64) -> bool {
    fn next_val(x: i64, h: i64) -> Option<i64> {
        // 0 -> 1 -> -1 -> 2 -> -2 -> ...
        if x == 0 {
            if h >= 1 {
                Some(1)
            } else {
                None
            }
        } else if x > 0 {
            Some(-x)
        } else if -x < h {
            Some(-x + 1)
        } else {
            None
        }
    }
    for i in 0..v.len() {
        match next_val(v[i], h) {
            Some(nx) => {
                v[i] = nx;
                return true;
            }
            None => v[i] = 0,
        }
    }
    false
}

fn normalize_vector(v: &mut [i64]) {
    let mut g: i64 = 0;
    for &x in v.iter() {
        g = num_integer::gcd(g, x.abs());
    }
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
    if let Some(first) = v.iter().find(|&&x| x != 0) {
        if *first < 0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

/// Albert criterion: the biquaternion algebra (alpha,beta) x (gamma,delta)
/// is a division algebra iff the rank-6 form
/// <alpha, beta, -alpha*beta, -gamma, -delta, gamma*delta> is anisotropic
/// over Q; otherwise it is similar to a quaternion algebra.
pub fn albert_is_division(
    alpha: &Rational,
    beta: &Rational,
    gamma: &Rational,
    delta: &Rational,
) -> Result<bool, ArithError> {
    assert!(
        !alpha.is_zero() && !beta.is_zero() && !gamma.is_zero() && !delta.is_zero(),
        "Albert parameters must be nonzero"
    );
    let form = albert_form(alpha, beta, gamma, delta);
    Ok(!is_isotropic_over_q(&form)?)
}

pub fn albert_form(
    alpha: &Rational,
    beta: &Rational,
    gamma: &Rational,
    delta: &Rational,
) -> DiagonalForm {
    DiagonalForm::new(vec![
        alpha.clone(),
        beta.clone(),
        -&(alpha * beta),
        -gamma,
        -delta,
        gamma * delta,
    ])
}

/// True iff the quaternion symbol (a, b) splits over Q, i.e. is +1 at
/// every place.
pub fn symbol_splits_over_q(a: &Rational, b: &Rational) -> Result<bool, ArithError> {
    Ok(symbol_ramification(a, b)?.is_empty())
}

/// Set of places of Q where (a, b) is -1.
pub fn symbol_ramification(a: &Rational, b: &Rational) -> Result<BTreeSet<Place>, ArithError> {
    let mut candidates: BTreeSet<Place> = BTreeSet::new();
    candidates.insert(Place::Real);
    candidates.insert(Place::Finite(BigInt::from(2)));
    for x in [a, b] {
        for part in [x.numer(), x.denom()] {
            if part.is_one() || *part == -BigInt::one() {
                continue;
            }
            for (p, _) in factorize(part)?.factors {
                candidates.insert(Place::Finite(p));
            }
        }
    }
    Ok(candidates
        .into_iter()
        .filter(|v| hilbert_symbol(a, b, v) == -1)
        .collect())
}
