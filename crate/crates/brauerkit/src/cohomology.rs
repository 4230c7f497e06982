//! Explicit finite subgroups of GL2(Z/n) and exact H^0 / H^1 with
//! coefficients in the tautological module (Z/n)^2.
//!
//! Cocycles are pinned down by their values on a generating set: the
//! relation c(s h) = c(s) + s c(h) over all pairs (generator s, element h)
//! forces c(e) = 0 and propagates along any positive word, so the solution
//! set of that relation system is exactly Z^1. The computation expresses
//! every c(g) as a linear function of the generator values, collects the
//! non-tree relations as a small linear system over Z/n, and reads the
//! quotient by coboundaries off a Smith normal form of integer lattices.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::howell::{self, ModMat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    CapExceeded { size: usize, cap: usize },
    NotInvertible { modulus: u64 },
    NotSubgroup,
    NotNormal,
    FixedPointsNonzero,
    /// The relation system returned by the solver failed the full cocycle
    /// verification; this indicates an internal inconsistency.
    Inconsistent,
}

impl fmt::Display for CohomologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohomologyError::CapExceeded { size, cap } => {
                write!(f, "group closure reached {} elements, cap {}", size, cap)
            }
            CohomologyError::NotInvertible { modulus } => {
                write!(f, "generator is not invertible mod {}", modulus)
            }
            CohomologyError::NotSubgroup => write!(f, "not a subgroup of the ambient group"),
            CohomologyError::NotNormal => write!(f, "subgroup is not normal"),
            CohomologyError::FixedPointsNonzero => {
                write!(f, "subgroup has nonzero fixed vectors")
            }
            CohomologyError::Inconsistent => write!(f, "internal cocycle verification failed"),
        }
    }
}

impl std::error::Error for CohomologyError {}

/// 2x2 matrix over Z/n, entries [a, b; c, d] reduced mod n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    pub n: u64,
    pub e: [u64; 4],
}

impl ModMatrix {
    pub fn new(n: u64, e: [u64; 4]) -> Self {
        assert!(n >= 1);
        ModMatrix {
            n,
            e: [e[0] % n, e[1] % n, e[2] % n, e[3] % n],
        }
    }

    pub fn identity(n: u64) -> Self {
        ModMatrix::new(n, [1, 0, 0, 1])
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n as u128;
        let a = &self.e;
        let b = &other.e;
        ModMatrix {
            n: self.n,
            e: [
                ((a[0] as u128 * b[0] as u128 + a[1] as u128 * b[2] as u128) % n) as u64,
                ((a[0] as u128 * b[1] as u128 + a[1] as u128 * b[3] as u128) % n) as u64,
                ((a[2] as u128 * b[0] as u128 + a[3] as u128 * b[2] as u128) % n) as u64,
                ((a[2] as u128 * b[1] as u128 + a[3] as u128 * b[3] as u128) % n) as u64,
            ],
        }
    }

    pub fn det(&self) -> u64 {
        let n = self.n as i128;
        let d = (self.e[0] as i128 * self.e[3] as i128 - self.e[1] as i128 * self.e[2] as i128)
            .rem_euclid(n);
        d as u64
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.n as i128;
        let det = self.det() as i128;
        let inv = mod_inverse(det, n)?;
        let r = |x: i128| (x.rem_euclid(n)) as u64;
        Some(ModMatrix {
            n: self.n,
            e: [
                r(self.e[3] as i128 * inv),
                r(-(self.e[1] as i128) * inv),
                r(-(self.e[2] as i128) * inv),
                r(self.e[0] as i128 * inv),
            ],
        })
    }

    /// Matrix action on a column vector.
    pub fn apply(&self, v: (u64, u64)) -> (u64, u64) {
        let n = self.n as u128;
        (
            ((self.e[0] as u128 * v.0 as u128 + self.e[1] as u128 * v.1 as u128) % n) as u64,
            ((self.e[2] as u128 * v.0 as u128 + self.e[3] as u128 * v.1 as u128) % n) as u64,
        )
    }

    pub fn reduce_mod(&self, m: u64) -> ModMatrix {
        ModMatrix::new(m, [self.e[0], self.e[1], self.e[2], self.e[3]])
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{};{},{}]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
        if b == 0 {
            (a, 1, 0)
        } else {
            let (g, u, v) = egcd(b, a % b);
            (g, v, u - (a / b) * v)
        }
    }
    let (g, u, _) = egcd(a.rem_euclid(n), n);
    if g != 1 {
        None
    } else {
        Some(u.rem_euclid(n))
    }
}

/// An explicit subgroup of GL2(Z/n): generators, the full element list
/// (sorted lexicographically on entries) and an index for fast lookup.
#[derive(Debug, Clone)]
pub struct FiniteMatrixGroup {
    pub n: u64,
    pub gens: Vec<ModMatrix>,
    pub elements: Vec<ModMatrix>,
    index: HashMap<[u64; 4], usize>,
}

pub const DEFAULT_GROUP_CAP: usize = 5000;

impl FiniteMatrixGroup {
    /// Closure of the generators under multiplication (breadth-first),
    /// sorted lexicographically for reproducible reports.
    pub fn generate(
        n: u64,
        gens: Vec<ModMatrix>,
        cap: usize,
    ) -> Result<Self, CohomologyError> {
        for g in &gens {
            if g.inverse().is_none() {
                return Err(CohomologyError::NotInvertible { modulus: n });
            }
        }
        let id = ModMatrix::identity(n);
        let mut seen: HashMap<[u64; 4], usize> = HashMap::new();
        let mut elements = vec![id];
        seen.insert(id.e, 0);
        let mut head = 0usize;
        while head < elements.len() {
            let cur = elements[head];
            head += 1;
            for g in &gens {
                let next = cur.mul(g);
                if !seen.contains_key(&next.e) {
                    if elements.len() >= cap {
                        return Err(CohomologyError::CapExceeded {
                            size: elements.len() + 1,
                            cap,
                        });
                    }
                    seen.insert(next.e, elements.len());
                    elements.push(next);
                }
            }
        }
        elements.sort();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.e, i))
            .collect();
        Ok(FiniteMatrixGroup {
            n,
            gens,
            elements,
            index,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &ModMatrix) -> bool {
        self.index.contains_key(&m.e)
    }

    pub fn position(&self, m: &ModMatrix) -> Option<usize> {
        self.index.get(&m.e).copied()
    }

    /// Subgroup cut out by a predicate, with Schreier generators taken
    /// along a right-coset transversal.
    pub fn subgroup_where(
        &self,
        pred: impl Fn(&ModMatrix) -> bool,
    ) -> Result<Self, CohomologyError> {
        let id = ModMatrix::identity(self.n);
        if !pred(&id) {
            return Err(CohomologyError::NotSubgroup);
        }
        // right-coset representatives: x in H r iff x * r^{-1} in H
        let mut reps: Vec<ModMatrix> = vec![id];
        let mut rep_invs: Vec<ModMatrix> = vec![id];
        for g in &self.elements {
            let covered = rep_invs.iter().any(|ri| pred(&g.mul(ri)));
            if !covered {
                reps.push(*g);
                rep_invs.push(g.inverse().unwrap());
            }
        }
        let rep_of = |x: &ModMatrix| -> usize {
            rep_invs
                .iter()
                .position(|ri| pred(&x.mul(ri)))
                .expect("coset cover")
        };
        let mut schreier: Vec<ModMatrix> = Vec::new();
        for r in &reps {
            for s in &self.gens {
                let rs = r.mul(s);
                let rbar = rep_of(&rs);
                let h = rs.mul(&rep_invs[rbar]);
                debug_assert!(pred(&h));
                if h != id && !schreier.contains(&h) {
                    schreier.push(h);
                }
            }
        }
        let elements: Vec<ModMatrix> = self
            .elements
            .iter()
            .filter(|g| pred(g))
            .copied()
            .collect();
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, m)| (m.e, i))
            .collect();
        let sub = FiniteMatrixGroup {
            n: self.n,
            gens: schreier,
            elements,
            index,
        };
        // the Schreier set must regenerate exactly the predicate subgroup
        debug_assert_eq!(
            FiniteMatrixGroup::generate(self.n, sub.gens.clone(), self.order() + 1)
                .map(|g| g.order()),
            Ok(sub.order())
        );
        Ok(sub)
    }

    pub fn is_normal_in(&self, ambient: &FiniteMatrixGroup) -> bool {
        for g in &ambient.gens {
            let gi = g.inverse().unwrap();
            for h in &self.elements {
                if !self.contains(&g.mul(h).mul(&gi)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Sign of the permutation a matrix in GL2(Z/2) induces on the three
/// nonzero vectors of (Z/2)^2.
pub fn signature_character(m: &ModMatrix) -> i32 {
    let m2 = m.reduce_mod(2);
    let vecs = [(1u64, 0u64), (0, 1), (1, 1)];
    let pos = |v: (u64, u64)| vecs.iter().position(|&w| w == v).unwrap();
    let perm: Vec<usize> = vecs.iter().map(|&v| pos(m2.apply(v))).collect();
    // parity by explicit inversion count on 3 points
    let mut inversions = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// SL2(Z/n), generated by the two elementary matrices.
pub fn sl2(n: u64, cap: usize) -> Result<FiniteMatrixGroup, CohomologyError> {
    let gens = vec![
        ModMatrix::new(n, [1, 1, 0, 1]),
        ModMatrix::new(n, [1, 0, 1, 1]),
    ];
    FiniteMatrixGroup::generate(n, gens, cap)
}

/// GL2(Z/n): elementary matrices plus diag(u, 1) over the units.
pub fn gl2(n: u64, cap: usize) -> Result<FiniteMatrixGroup, CohomologyError> {
    let mut gens = vec![
        ModMatrix::new(n, [1, 1, 0, 1]),
        ModMatrix::new(n, [1, 0, 1, 1]),
    ];
    for u in 2..n {
        if num_integer::gcd(u, n) == 1 {
            gens.push(ModMatrix::new(n, [u, 0, 0, 1]));
        }
    }
    FiniteMatrixGroup::generate(n, gens, cap)
}

/// SL2+(Z/n): all of SL2 for odd n; for even n the index-2 kernel of the
/// signature character composed with reduction mod 2.
pub fn sl2_plus(n: u64, cap: usize) -> Result<FiniteMatrixGroup, CohomologyError> {
    let full = sl2(n, cap)?;
    if n % 2 == 1 {
        return Ok(full);
    }
    full.subgroup_where(|m| signature_character(m) == 1)
}

/// Exact fixed-point submodule of (Z/n)^2 under the group action.
pub fn h0(group: &FiniteMatrixGroup) -> Vec<(u64, u64)> {
    let n = group.n;
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let v = (x, y);
            if group.gens.iter().all(|g| g.apply(v) == v) {
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// A 1-cocycle, stored by its values on every group element (indexed as
/// in `FiniteMatrixGroup::elements`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub values: Vec<(u64, u64)>,
}

impl Cocycle {
    /// Full check of c(gh) = c(g) + g c(h) over every pair.
    pub fn satisfies_all_relations(&self, group: &FiniteMatrixGroup) -> bool {
        let n = group.n;
        for (gi, g) in group.elements.iter().enumerate() {
            for (hi, h) in group.elements.iter().enumerate() {
                let gh = g.mul(h);
                let ghi = group.position(&gh).expect("closed group");
                let lhs = self.values[ghi];
                let gch = g.apply(self.values[hi]);
                let rhs = (
                    (self.values[gi].0 + gch.0) % n,
                    (self.values[gi].1 + gch.1) % n,
                );
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// H^1 presented by invariant factors d1 | d2 | ... (each > 1) together
/// with representative cocycles generating the corresponding factors.
#[derive(Debug, Clone)]
pub struct CohomologyGroup {
    pub invariant_factors: Vec<u64>,
    pub exponent: u64,
    pub representatives: Vec<Cocycle>,
}

impl CohomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }
}

/// Linear expression of a cocycle value in terms of the generator values:
/// a 2 x 2|S| matrix over Z/n.
#[derive(Clone)]
struct LinExpr {
    rows: [Vec<u64>; 2],
}

impl LinExpr {
    fn zeros(width: usize) -> Self {
        LinExpr {
            rows: [vec![0; width], vec![0; width]],
        }
    }

    fn selector(width: usize, s_idx: usize) -> Self {
        let mut e = Self::zeros(width);
        e.rows[0][2 * s_idx] = 1;
        e.rows[1][2 * s_idx + 1] = 1;
        e
    }

    /// selector(s) + M_s * self
    fn advance(&self, n: u64, s: &ModMatrix, s_idx: usize) -> Self {
        let width = self.rows[0].len();
        let mut out = Self::selector(width, s_idx);
        for col in 0..width {
            let (x, y) = (self.rows[0][col], self.rows[1][col]);
            let m = &s.e;
            let nx = (m[0] as u128 * x as u128 + m[1] as u128 * y as u128) % n as u128;
            let ny = (m[2] as u128 * x as u128 + m[3] as u128 * y as u128) % n as u128;
            out.rows[0][col] = ((out.rows[0][col] as u128 + nx) % n as u128) as u64;
            out.rows[1][col] = ((out.rows[1][col] as u128 + ny) % n as u128) as u64;
        }
        out
    }

    fn eval(&self, n: u64, u: &[u64]) -> (u64, u64) {
        let mut x: u128 = 0;
        let mut y: u128 = 0;
        for (col, &uc) in u.iter().enumerate() {
            x += self.rows[0][col] as u128 * uc as u128;
            y += self.rows[1][col] as u128 * uc as u128;
        }
        ((x % n as u128) as u64, (y % n as u128) as u64)
    }
}

/// Exact H^1(G, (Z/n)^2) with representative cocycles.
pub fn h1(group: &FiniteMatrixGroup) -> Result<CohomologyGroup, CohomologyError> {
    let n = group.n;
    if n == 1 || group.order() == 1 || group.gens.is_empty() {
        return Ok(CohomologyGroup {
            invariant_factors: vec![],
            exponent: 1,
            representatives: vec![],
        });
    }
    let gens = &group.gens;
    let width = 2 * gens.len();
    let id_idx = group
        .position(&ModMatrix::identity(n))
        .expect("identity in group");

    // breadth-first propagation of c(s h) = c(s) + s c(h); non-tree edges
    // become relations among the generator values
    let mut exprs: Vec<Option<LinExpr>> = vec![None; group.order()];
    exprs[id_idx] = Some(LinExpr::zeros(width));
    let mut queue = vec![id_idx];
    let mut head = 0;
    let mut constraints = ModMat::new(n, width);
    while head < queue.len() {
        let hi = queue[head];
        head += 1;
        let h = group.elements[hi];
        for (si, s) in gens.iter().enumerate() {
            let sh = s.mul(&h);
            let shi = group.position(&sh).expect("closed group");
            let expr = exprs[hi].as_ref().unwrap().advance(n, s, si);
            match &exprs[shi] {
                None => {
                    exprs[shi] = Some(expr);
                    queue.push(shi);
                }
                Some(existing) => {
                    // c(sh) already expressed: difference must vanish
                    for r in 0..2 {
                        let mut row = vec![0u64; width];
                        let mut nonzero = false;
                        for col in 0..width {
                            let val =
                                (existing.rows[r][col] + n - expr.rows[r][col] % n) % n;
                            row[col] = val;
                            nonzero |= val != 0;
                        }
                        if nonzero {
                            constraints.push_row(row);
                        }
                    }
                }
            }
        }
    }
    debug_assert!(exprs.iter().all(|e| e.is_some()), "group not connected");

    // Z^1 as a submodule of the generator-value space
    let kernel = constraints.right_kernel();

    // coboundaries: u_b(m) = (s m - m)_s for the module basis vectors
    let mut coboundaries: Vec<Vec<u64>> = Vec::new();
    for m in [(1u64, 0u64), (0, 1)] {
        let mut v = vec![0u64; width];
        for (si, s) in gens.iter().enumerate() {
            let sm = s.apply(m);
            v[2 * si] = (sm.0 + n - m.0) % n;
            v[2 * si + 1] = (sm.1 + n - m.1) % n;
        }
        coboundaries.push(v);
    }

    // integral lattices: L = lift(Z^1) + nZ^w, B = lift(B^1) + nZ^w
    let big = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&x| BigInt::from(x)).collect() };
    let mut l_rows: Vec<Vec<BigInt>> = kernel.iter().map(|v| big(v)).collect();
    for i in 0..width {
        let mut row = vec![BigInt::zero(); width];
        row[i] = BigInt::from(n);
        l_rows.push(row);
    }
    let l_basis = howell::hnf(&l_rows, width);

    let mut b_rows: Vec<Vec<BigInt>> = coboundaries.iter().map(|v| big(v)).collect();
    for i in 0..width {
        let mut row = vec![BigInt::zero(); width];
        row[i] = BigInt::from(n);
        b_rows.push(row);
    }
    // express B generators in the L basis
    let b_in_l: Vec<Vec<BigInt>> = b_rows
        .iter()
        .map(|v| howell::solve_in_lattice(&l_basis, v))
        .collect();
    let (diag, w) = howell::smith_normal_form(&b_in_l);

    let mut factors = Vec::new();
    let mut reps = Vec::new();
    for (k, d) in diag.iter().enumerate() {
        let dk = d
            .to_string()
            .parse::<u64>()
            .expect("invariant factor fits u64");
        assert!(dk != 0, "quotient of full-rank lattices is finite");
        if dk == 1 {
            continue;
        }
        factors.push(dk);
        // generator in u-coordinates: w_k expressed through the L basis
        let mut u = vec![0u64; width];
        for (coef, row) in w[k].iter().zip(l_basis.iter()) {
            for (uc, x) in u.iter_mut().zip(row.iter()) {
                let add = coef * x;
                let add = ((add % BigInt::from(n)) + BigInt::from(n)) % BigInt::from(n);
                *uc = (*uc + add.to_string().parse::<u64>().unwrap()) % n;
            }
        }
        let values: Vec<(u64, u64)> = exprs
            .iter()
            .map(|e| e.as_ref().unwrap().eval(n, &u))
            .collect();
        reps.push(Cocycle { values });
    }
    factors.sort();
    let exponent = factors.last().copied().unwrap_or(1);

    // full-pair verification of every representative
    for rep in &reps {
        if !rep.satisfies_all_relations(group) {
            return Err(CohomologyError::Inconsistent);
        }
    }

    Ok(CohomologyGroup {
        invariant_factors: factors,
        exponent,
        representatives: reps,
    })
}

/// Independent oracle: H^1 from the full function space Maps(G, M), with
/// unknowns c(g) for every g and the cocycle relation over every pair.
/// Exponential in nothing but quadratic in |G|; intended for |G| <= 60.
pub fn h1_full_function_space(group: &FiniteMatrixGroup) -> Vec<u64> {
    let n = group.n;
    let size = group.order();
    if n == 1 || size == 1 {
        return vec![];
    }
    let width = 2 * size;
    let mut constraints = ModMat::new(n, width);
    for (gi, g) in group.elements.iter().enumerate() {
        for (hi, h) in group.elements.iter().enumerate() {
            let gh = g.mul(h);
            let ghi = group.position(&gh).expect("closed");
            // c(gh) - c(g) - g c(h) = 0, two scalar rows
            let mut row0 = vec![0u64; width];
            let mut row1 = vec![0u64; width];
            add_at(&mut row0, &mut row1, n, ghi, [1, 0, 0, 1], false);
            add_at(&mut row0, &mut row1, n, gi, [1, 0, 0, 1], true);
            add_at(&mut row0, &mut row1, n, hi, g.e, true);
            if row0.iter().any(|&x| x != 0) {
                constraints.push_row(row0);
            }
            if row1.iter().any(|&x| x != 0) {
                constraints.push_row(row1);
            }
        }
    }
    let kernel = constraints.right_kernel();

    let mut coboundaries: Vec<Vec<u64>> = Vec::new();
    for m in [(1u64, 0u64), (0, 1)] {
        let mut v = vec![0u64; width];
        for (gi, g) in group.elements.iter().enumerate() {
            let gm = g.apply(m);
            v[2 * gi] = (gm.0 + n - m.0) % n;
            v[2 * gi + 1] = (gm.1 + n - m.1) % n;
        }
        coboundaries.push(v);
    }

    let big = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&x| BigInt::from(x)).collect() };
    let mut l_rows: Vec<Vec<BigInt>> = kernel.iter().map(|v| big(v)).collect();
    for i in 0..width {
        let mut row = vec![BigInt::zero(); width];
        row[i] = BigInt::from(n);
        l_rows.push(row);
    }
    let l_basis = howell::hnf(&l_rows, width);
    let mut b_rows: Vec<Vec<BigInt>> = coboundaries.iter().map(|v| big(v)).collect();
    for i in 0..width {
        let mut row = vec![BigInt::zero(); width];
        row[i] = BigInt::from(n);
        b_rows.push(row);
    }
    let b_in_l: Vec<Vec<BigInt>> = b_rows
        .iter()
        .map(|v| howell::solve_in_lattice(&l_basis, v))
        .collect();
    let (diag, _) = howell::smith_normal_form(&b_in_l);
    let mut factors: Vec<u64> = diag
        .iter()
        .map(|d| d.to_string().parse::<u64>().expect("fits u64"))
        .filter(|&d| d > 1)
        .collect();
    factors.sort();
    factors
}

fn add_at(row0: &mut [u64], row1: &mut [u64], n: u64, idx: usize, m: [u64; 4], negate: bool) {
    // adds (or subtracts) the 2x2 block m acting on unknown c(idx)
    let sgn = |x: u64| if negate { (n - x % n) % n } else { x % n };
    row0[2 * idx] = (row0[2 * idx] + sgn(m[0])) % n;
    row0[2 * idx + 1] = (row0[2 * idx + 1] + sgn(m[1])) % n;
    row1[2 * idx] = (row1[2 * idx] + sgn(m[2])) % n;
    row1[2 * idx + 1] = (row1[2 * idx + 1] + sgn(m[3])) % n;
}

/// Is the restriction of the cocycle to the subgroup a coboundary there?
/// Tested on the subgroup generators (values on generators pin down a
/// cocycle), by brute force over the n^2 candidate module elements.
pub fn restriction_is_coboundary(
    cocycle: &Cocycle,
    group: &FiniteMatrixGroup,
    sub: &FiniteMatrixGroup,
) -> bool {
    let n = group.n;
    let sub_gens: Vec<(ModMatrix, (u64, u64))> = sub
        .gens
        .iter()
        .map(|s| {
            let idx = group.position(s).expect("subgroup element in group");
            (*s, cocycle.values[idx])
        })
        .collect();
    for mx in 0..n {
        for my in 0..n {
            let m = (mx, my);
            let ok = sub_gens.iter().all(|(s, c)| {
                let sm = s.apply(m);
                let b = ((sm.0 + n - m.0) % n, (sm.1 + n - m.1) % n);
                *c == b
            });
            if ok {
                return true;
            }
        }
    }
    false
}

/// Verifies that the restriction map H^1(G) -> H^1(H) has trivial kernel
/// by transporting every nonzero class of the computed H^1(G) to H and
/// testing it against all coboundaries.
pub fn h1_restriction_injectivity(
    group: &FiniteMatrixGroup,
    sub: &FiniteMatrixGroup,
) -> Result<bool, CohomologyError> {
    if !sub.elements.iter().all(|h| group.contains(h)) {
        return Err(CohomologyError::NotSubgroup);
    }
    if !sub.is_normal_in(group) {
        return Err(CohomologyError::NotNormal);
    }
    if h0(sub) != vec![(0, 0)] {
        return Err(CohomologyError::FixedPointsNonzero);
    }
    let h1g = h1(group)?;
    if h1g.is_trivial() {
        return Ok(true);
    }
    for combo in nonzero_combinations(&h1g.invariant_factors) {
        let c = combine(group, &h1g.representatives, &combo);
        if restriction_is_coboundary(&c, group, sub) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For G = G1 x G2 acting on (Z/n1)^2 + (Z/n2)^2 via the splitting
/// n = n1 n2 (coprime): the map H^1(G, M) -> H^1(H1, M1) + H^1(H2, M2) is
/// injective when both factors have no fixed vectors. H_i is the subgroup
/// congruent to the identity mod the complementary factor and M_i is the
/// CRT component of the module.
pub fn product_decomposition_injectivity(
    group: &FiniteMatrixGroup,
    n1: u64,
    n2: u64,
) -> Result<bool, CohomologyError> {
    let n = group.n;
    assert_eq!(n1 * n2, n);
    assert_eq!(num_integer::gcd(n1, n2), 1);
    let id_mod = |m: &ModMatrix, q: u64| -> bool {
        m.e[0] % q == 1 % q && m.e[1] % q == 0 && m.e[2] % q == 0 && m.e[3] % q == 1 % q
    };
    let h1sub = group.subgroup_where(|m| id_mod(m, n2))?;
    let h2sub = group.subgroup_where(|m| id_mod(m, n1))?;
    // CRT idempotents: e1 = 1 mod n1, 0 mod n2
    let e1 = crt_idempotent(n1, n2, n);
    let e2 = crt_idempotent(n2, n1, n);

    let h1g = h1(group)?;
    if h1g.is_trivial() {
        return Ok(true);
    }
    for combo in nonzero_combinations(&h1g.invariant_factors) {
        let c = combine(group, &h1g.representatives, &combo);
        let proj = |cv: &Cocycle, e: u64| -> Cocycle {
            Cocycle {
                values: cv
                    .values
                    .iter()
                    .map(|&(a, b)| {
                        (
                            ((a as u128 * e as u128) % n as u128) as u64,
                            ((b as u128 * e as u128) % n as u128) as u64,
                        )
                    })
                    .collect(),
            }
        };
        let p1_cob = restriction_is_coboundary(&proj(&c, e1), group, &h1sub);
        let p2_cob = restriction_is_coboundary(&proj(&c, e2), group, &h2sub);
        if p1_cob && p2_cob {
            return Ok(false);
        }
    }
    Ok(true)
}

fn crt_idempotent(keep: u64, kill: u64, n: u64) -> u64 {
    // e = 1 mod keep, 0 mod kill
    let inv = mod_inverse(kill as i128, keep as i128).expect("coprime");
    ((kill as u128 * inv as u128) % n as u128) as u64
}

fn nonzero_combinations(factors: &[u64]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let total: u64 = factors.iter().product();
    for mut idx in 1..total {
        let mut combo = Vec::with_capacity(factors.len());
        for &d in factors {
            combo.push(idx % d);
            idx /= d;
        }
        out.push(combo);
    }
    out
}

fn combine(group: &FiniteMatrixGroup, reps: &[Cocycle], combo: &[u64]) -> Cocycle {
    let n = group.n;
    let mut values = vec![(0u64, 0u64); group.order()];
    for (rep, &a) in reps.iter().zip(combo.iter()) {
        for (v, rv) in values.iter_mut().zip(rep.values.iter()) {
            v.0 = ((v.0 as u128 + a as u128 * rv.0 as u128) % n as u128) as u64;
            v.1 = ((v.1 as u128 + a as u128 * rv.1 as u128) % n as u128) as u64;
        }
    }
    Cocycle { values }
}
