//! Linear algebra over Z/n and Z: Howell normal form, kernels mod n,
//! Hermite and Smith normal forms for the small integer lattices behind
//! cohomology quotients.
//!
//! Z/n is not a field, so echelon forms alone do not span every row of a
//! submodule; the Howell completion (appending (n/gcd)-multiples of pivot
//! rows) restores that property and makes kernels exact.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

/// Extended gcd: g = gcd(a, b) with u*a + v*b = g.
fn egcd_i128(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a.abs(), if a < 0 { -1 } else { 1 }, 0)
    } else {
        let (g, u, v) = egcd_i128(b, a % b);
        (g, v, u - (a / b) * v)
    }
}

/// Matrix over Z/n with u64 entries reduced mod n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModMat {
    pub n: u64,
    pub cols: usize,
    pub rows: Vec<Vec<u64>>,
}

impl ModMat {
    pub fn new(n: u64, cols: usize) -> Self {
        assert!(n >= 1);
        ModMat {
            n,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<u64>) {
        assert_eq!(row.len(), self.cols);
        let n = self.n;
        self.rows.push(row.into_iter().map(|x| x % n).collect());
    }

    fn addmul_row(n: u64, dst: &mut [u64], src: &[u64], c: u64) {
        if c == 0 {
            return;
        }
        for (d, s) in dst.iter_mut().zip(src.iter()) {
            *d = ((*d as u128 + c as u128 * *s as u128) % n as u128) as u64;
        }
    }

    fn scale_row(n: u64, row: &mut [u64], c: u64) {
        for x in row.iter_mut() {
            *x = ((*x as u128 * c as u128) % n as u128) as u64;
        }
    }

    /// In-place Howell normal form. Afterwards the rows are in echelon
    /// order and every element of the row span whose leading coordinates
    /// vanish lies in the span of the later rows.
    pub fn howell(&mut self) {
        let n = self.n;
        if n == 1 {
            self.rows.clear();
            return;
        }
        let cols = self.cols;
        let mut work: Vec<Vec<u64>> = std::mem::take(&mut self.rows);
        let mut done: Vec<Vec<u64>> = Vec::new();

        let mut col = 0usize;
        while col < cols && !work.is_empty() {
            // combine all rows with support starting at `col`
            let mut pivot: Option<Vec<u64>> = None;
            let mut rest: Vec<Vec<u64>> = Vec::new();
            for row in work.drain(..) {
                if row[col] == 0 {
                    if row.iter().any(|&x| x != 0) {
                        rest.push(row);
                    }
                    continue;
                }
                match pivot {
                    None => pivot = Some(row),
                    Some(ref mut pv) => {
                        let a = pv[col] as i128;
                        let b = row[col] as i128;
                        let (g, u, v) = egcd_i128(a, b);
                        let nn = n as i128;
                        let um = u.rem_euclid(nn) as u64;
                        let vm = v.rem_euclid(nn) as u64;
                        // new pivot = u*pv + v*row  (leading entry g)
                        let mut newp = vec![0u64; cols];
                        Self::addmul_row(n, &mut newp, pv, um);
                        Self::addmul_row(n, &mut newp, &row, vm);
                        // eliminated = (b/g)*pv - (a/g)*row (leading entry 0)
                        let bg = ((b / g).rem_euclid(nn)) as u64;
                        let ag = ((nn - (a / g).rem_euclid(nn)) % nn) as u64;
                        let mut elim = vec![0u64; cols];
                        Self::addmul_row(n, &mut elim, pv, bg);
                        Self::addmul_row(n, &mut elim, &row, ag);
                        debug_assert_eq!(elim[col], 0);
                        *pv = newp;
                        if elim.iter().any(|&x| x != 0) {
                            rest.push(elim);
                        }
                    }
                }
            }
            if let Some(pv) = pivot {
                // Howell completion: the (n/gcd)-multiple of the pivot row
                // has leading zero but may add new content further right.
                let g = gcd_u64(pv[col], n);
                let mult = n / g;
                if mult > 1 {
                    let mut extra = pv.clone();
                    Self::scale_row(n, &mut extra, mult);
                    debug_assert_eq!(extra[col], 0);
                    if extra.iter().any(|&x| x != 0) {
                        rest.push(extra);
                    }
                }
                done.push(pv);
            }
            work = rest;
            col += 1;
        }

        // normalize pivots to divisors of n and reduce the entries above
        let mut rows = done;
        for i in 0..rows.len() {
            let col = rows[i].iter().position(|&x| x != 0).unwrap();
            let a = rows[i][col];
            let g = gcd_u64(a, n);
            let u = unit_scaling(a, g, n);
            Self::scale_row(n, &mut rows[i], u);
            debug_assert_eq!(rows[i][col], g);
            for j in 0..i {
                let q = rows[j][col] / g;
                if q != 0 {
                    let mult = n - (q % n);
                    let r = rows[i].clone();
                    Self::addmul_row(n, &mut rows[j], &r, mult % n);
                }
            }
        }
        self.rows = rows;
    }

    /// Howell basis of the right kernel { x : M x = 0 } of this matrix,
    /// returned as rows of length `cols`.
    pub fn right_kernel(&self) -> Vec<Vec<u64>> {
        let n = self.n;
        let m = self.cols;
        if n == 1 {
            return Vec::new();
        }
        let r = self.rows.len();
        // rows of [M^T | I_m]; reducing exposes left-kernel rows of M^T,
        // which are right-kernel vectors of M
        let mut aug = ModMat::new(n, r + m);
        for i in 0..m {
            let mut row = vec![0u64; r + m];
            for (j, mrow) in self.rows.iter().enumerate() {
                row[j] = mrow[i];
            }
            row[r + i] = 1;
            aug.push_row(row);
        }
        aug.howell();
        let mut kernel = Vec::new();
        for row in aug.rows {
            if row[..r].iter().all(|&x| x == 0) {
                let v: Vec<u64> = row[r..].to_vec();
                if v.iter().any(|&x| x != 0) {
                    kernel.push(v);
                }
            }
        }
        kernel
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    let mut a = a;
    let mut b = b;
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// A unit u mod n with u*a = gcd(a, n) mod n.
fn unit_scaling(a: u64, g: u64, n: u64) -> u64 {
    let ag = (a / g) as i128;
    let ng = (n / g) as i128;
    if ng == 1 {
        return 1;
    }
    let (gg, inv, _) = egcd_i128(ag, ng);
    debug_assert_eq!(gg, 1);
    let mut u = inv.rem_euclid(ng) as u64;
    if u == 0 {
        u = ng as u64;
    }
    while gcd_u64(u, n) != 1 {
        u += ng as u64;
    }
    u % n
}

/// Hermite normal form (row style) of an integer matrix: an echelon basis
/// of the row lattice, pivots positive, entries above pivots reduced.
pub fn hnf(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut work: Vec<Vec<BigInt>> = rows
        .iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    for col in 0..cols {
        loop {
            let mut idxs: Vec<usize> = (0..work.len())
                .filter(|&i| !work[i][col].is_zero())
                .collect();
            if idxs.len() <= 1 {
                break;
            }
            idxs.sort_by_key(|&i| work[i][col].abs());
            let (i, j) = (idxs[0], idxs[1]);
            let q = (&work[j][col]).div_floor(&work[i][col]);
            let wi = work[i].clone();
            for (x, y) in work[j].iter_mut().zip(wi.iter()) {
                *x -= &q * y;
            }
            if work[j].iter().all(|x| x.is_zero()) {
                work.remove(j);
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][col].is_zero()) {
            let mut row = work.remove(i);
            if row[col].is_negative() {
                for x in row.iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            out.push(row);
        }
    }
    // reduce above pivots
    for i in (0..out.len()).rev() {
        let lead = out[i].iter().position(|x| !x.is_zero()).unwrap();
        let pivot = out[i][lead].clone();
        for j in 0..i {
            let q = (&out[j][lead]).div_floor(&pivot);
            if !q.is_zero() {
                let ri = out[i].clone();
                for (x, y) in out[j].iter_mut().zip(ri.iter()) {
                    *x -= &q * y;
                }
            }
        }
    }
    out
}

/// Solves x * T = v over Z for an echelon basis T (rows). Panics if v is
/// not in the lattice; callers only pass lattice members.
pub fn solve_in_lattice(basis: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
    let cols = v.len();
    let mut rem: Vec<BigInt> = v.to_vec();
    let mut coeffs = vec![BigInt::zero(); basis.len()];
    for (i, row) in basis.iter().enumerate() {
        let lead = row
            .iter()
            .position(|x| !x.is_zero())
            .expect("zero basis row");
        let (q, r) = rem[lead].div_rem(&row[lead]);
        assert!(r.is_zero(), "vector not in lattice");
        coeffs[i] = q.clone();
        for c in 0..cols {
            rem[c] -= &q * &row[c];
        }
    }
    assert!(rem.iter().all(|x| x.is_zero()), "vector not in lattice");
    coeffs
}

/// Smith normal form of an integer matrix A (s rows, t cols), tracking the
/// inverse of the column transform only.
///
/// Returns (d, w) where d is the diagonal with d1 | d2 | ... and the rows
/// of w express, in the original coordinates, the basis in which the row
/// lattice of A is spanned by d_k * w_k. Viewing A's rows as relations on
/// Z^t, the cokernel is the direct sum of Z/d_k generated by the classes
/// of the w_k.
pub fn smith_normal_form(a: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let s = a.len();
    let t = if s == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let mut w: Vec<Vec<BigInt>> = (0..t)
        .map(|i| {
            (0..t)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();

    // column ops on m and their inverse effect on w:
    //   swap cols i,j            -> swap rows i,j of w
    //   col_j -= q * col_i       -> row_i += q * row_j
    let lim = s.min(t);
    for k in 0..lim {
        'pivot: loop {
            // smallest nonzero entry in the trailing submatrix
            let mut piv: Option<(usize, usize)> = None;
            let mut best: Option<BigInt> = None;
            for i in k..s {
                for j in k..t {
                    if !m[i][j].is_zero() {
                        let v = m[i][j].abs();
                        if best.as_ref().map_or(true, |b| v < *b) {
                            best = Some(v);
                            piv = Some((i, j));
                        }
                    }
                }
            }
            let (pi, pj) = match piv {
                Some(p) => p,
                None => break 'pivot,
            };
            if pi != k {
                m.swap(pi, k);
            }
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(pj, k);
                }
                w.swap(pj, k);
            }
            if m[k][k].is_negative() {
                for x in m[k].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            // clear column k
            let mut again = false;
            for i in 0..s {
                if i != k && !m[i][k].is_zero() {
                    let q = (&m[i][k]).div_floor(&m[k][k]);
                    if !q.is_zero() {
                        let mk = m[k].clone();
                        for (x, y) in m[i].iter_mut().zip(mk.iter()) {
                            *x -= &q * y;
                        }
                    }
                    if !m[i][k].is_zero() {
                        again = true;
                    }
                }
            }
            if again {
                continue 'pivot;
            }
            // clear row k
            for j in 0..t {
                if j != k && !m[k][j].is_zero() {
                    let q = (&m[k][j]).div_floor(&m[k][k]);
                    if !q.is_zero() {
                        for i in 0..s {
                            let sub = &q * &m[i][k];
                            m[i][j] -= sub;
                        }
                        let wj = w[j].clone();
                        for (x, y) in w[k].iter_mut().zip(wj.iter()) {
                            *x += &q * y;
                        }
                    }
                    if !m[k][j].is_zero() {
                        again = true;
                    }
                }
            }
            if again {
                continue 'pivot;
            }
            // divisibility: pivot must divide every remaining entry
            for i in k + 1..s {
                for j in k + 1..t {
                    if !(&m[i][j] % &m[k][k]).is_zero() {
                        // pull the offending row into row k and restart
                        let mi = m[i].clone();
                        for (x, y) in m[k].iter_mut().zip(mi.iter()) {
                            *x += y;
                        }
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }
    let diag: Vec<BigInt> = (0..lim).map(|k| m[k][k].abs()).collect();
    (diag, w)
}
