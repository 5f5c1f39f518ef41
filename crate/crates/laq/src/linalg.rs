//! Exact linear algebra over arbitrary-precision integers and Laurent
//! polynomials: determinants, minors, Smith normal form, and mod-p kernels.
//!
//! Determinants over `Z` use fraction-free Bareiss elimination; determinants
//! over `LaurentPoly` use cofactor expansion memoized on column subsets,
//! which keeps the arithmetic division-free. Both are exact.

use crate::laurent::LaurentPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::ops::{Mul, Neg, Sub};
use thiserror::Error;

/// Commutative-ring bound for matrix entries, satisfied by `BigInt`,
/// `LaurentPoly`, and the machine integers via `num-traits`.
pub trait Ring:
    Clone + PartialEq + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl<R> Ring for R where
    R: Clone + PartialEq + Zero + One + Neg<Output = R> + Sub<Output = R> + Mul<Output = R>
{
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("index ({row},{col}) out of range for {rows}x{cols} matrix")]
    IndexOutOfRange { row: usize, col: usize, rows: usize, cols: usize },
    #[error("rows have unequal lengths")]
    RaggedRows,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Dense row-major matrix over a commutative ring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

/// Arbitrary-precision integer matrix.
pub type IntMatrix = Matrix<BigInt>;
/// Matrix over `Z[T, T^-1]`.
pub type PolyMatrix = Matrix<LaurentPoly>;

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = R::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LinalgError::RaggedRows);
        }
        Ok(Matrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &R {
        assert!(row < self.rows && col < self.cols, "matrix index out of range");
        &self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: R) {
        assert!(row < self.rows && col < self.cols, "matrix index out of range");
        self.data[row * self.cols + col] = value;
    }

    /// Adds `value` into the entry, accumulating coefficients that land on
    /// the same column (shared arcs at a crossing).
    pub fn add_assign_entry(&mut self, row: usize, col: usize, value: R) {
        let cur = self.get(row, col).clone();
        self.set(row, col, cur + value);
    }

    pub fn row_slice(&self, row: usize) -> &[R] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    /// The matrix with `drop_row` and `drop_col` removed.
    pub fn minor(&self, drop_row: usize, drop_col: usize) -> Result<Self, LinalgError> {
        if drop_row >= self.rows || drop_col >= self.cols {
            return Err(LinalgError::IndexOutOfRange {
                row: drop_row,
                col: drop_col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            if i == drop_row {
                continue;
            }
            for j in 0..self.cols {
                if j != drop_col {
                    data.push(self.data[i * self.cols + j].clone());
                }
            }
        }
        Ok(Matrix { rows: self.rows - 1, cols: self.cols - 1, data })
    }

    /// The matrix with only `drop_col` removed (palette-graph minors `A_j`).
    pub fn drop_column(&self, drop_col: usize) -> Result<Self, LinalgError> {
        if drop_col >= self.cols {
            return Err(LinalgError::IndexOutOfRange {
                row: 0,
                col: drop_col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols - 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j != drop_col {
                    data.push(self.data[i * self.cols + j].clone());
                }
            }
        }
        Ok(Matrix { rows: self.rows, cols: self.cols - 1, data })
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl PolyMatrix {
    /// Entry-wise evaluation at the integer `t`; panics if an entry retains
    /// negative powers of `T` (never the case for Alexander matrices).
    pub fn eval_int(&self, t: &BigInt) -> IntMatrix {
        self.map(|p| p.eval_int(t).expect("entry has negative T-powers"))
    }
}

/// Exact determinant of an integer matrix by fraction-free Bareiss
/// elimination. All intermediate divisions are exact.
pub fn det_int(m: &IntMatrix) -> Result<BigInt, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row_slice(i).to_vec()).collect();
    let mut sign = 1i8;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign < 0 { -d } else { d })
}

/// Exact determinant over any ring by cofactor expansion, memoized on the
/// set of not-yet-used columns. Intended for desk-scale matrices (side
/// up to ~20), e.g. Alexander matrices.
pub fn det_cofactor<R: Ring>(m: &Matrix<R>) -> Result<R, LinalgError> {
    if m.rows != m.cols {
        return Err(LinalgError::NonSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    assert!(n <= 63, "cofactor expansion limited to desk-scale matrices");
    if n == 0 {
        return Ok(R::one());
    }
    let mut memo: HashMap<u64, R> = HashMap::new();
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(det_rec(m, full, &mut memo))
}

fn det_rec<R: Ring>(m: &Matrix<R>, colmask: u64, memo: &mut HashMap<u64, R>) -> R {
    if colmask == 0 {
        return R::one();
    }
    if let Some(v) = memo.get(&colmask) {
        return v.clone();
    }
    // Expand along the row determined by how many columns were consumed.
    let row = m.rows() - colmask.count_ones() as usize;
    let mut acc = R::zero();
    let mut parity = false;
    for col in 0..m.cols() {
        if colmask & (1 << col) == 0 {
            continue;
        }
        let entry = m.get(row, col);
        if !entry.is_zero() {
            let sub = det_rec(m, colmask & !(1 << col), memo);
            let term = entry.clone() * sub;
            acc = if parity { acc - term } else { acc + term };
        }
        parity = !parity;
    }
    memo.insert(colmask, acc.clone());
    acc
}

/// Diagonal of the Smith normal form of an integer matrix: nonnegative
/// invariant factors `d1 | d2 | ...`, padded with zeros up to
/// `min(rows, cols)`.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let (rows, cols) = (m.rows(), m.cols());
    let n = rows.min(cols);
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| m.row_slice(i).to_vec()).collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        'pivot: loop {
            // Deterministic pivot: minimal nonzero |entry|, ties by position.
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // Remaining block is zero.
                for _ in k..n {
                    diag.push(BigInt::zero());
                }
                return diag;
            };
            a.swap(k, pi);
            for row in &mut a {
                row.swap(k, pj);
            }
            // Reduce column k below the pivot.
            for i in k + 1..rows {
                if !a[i][k].is_zero() {
                    let q = a[i][k].div_floor(&a[k][k]);
                    if !q.is_zero() {
                        for j in k..cols {
                            let t = &a[k][j] * &q;
                            a[i][j] -= t;
                        }
                    }
                    if !a[i][k].is_zero() {
                        continue 'pivot; // remainder became the smaller pivot candidate
                    }
                }
            }
            // Reduce row k to the right of the pivot.
            let mut dirty = false;
            for j in k + 1..cols {
                if !a[k][j].is_zero() {
                    let q = a[k][j].div_floor(&a[k][k]);
                    if !q.is_zero() {
                        for i in k..rows {
                            let t = &a[i][k] * &q;
                            a[i][j] -= t;
                        }
                    }
                    if !a[k][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Enforce divisibility: pivot must divide every remaining entry.
            for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&a[i][j] % &a[k][k]).is_zero() {
                        // Fold the offending row into the pivot row; the next
                        // row reduction then shrinks the pivot via gcd steps.
                        let row_i = a[i].clone();
                        for (x, y) in a[k].iter_mut().zip(row_i) {
                            *x += y;
                        }
                        continue 'pivot;
                    }
                }
            }
            break;
        }
        diag.push(a[k][k].abs());
    }
    diag
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("mod_floor result fits u64")
}

fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

fn mod_inv(x: u64, p: u64) -> u64 {
    mod_pow(x, p - 2, p)
}

/// Row-reduces `m` mod `p`, returning `(reduced rows, pivot columns)`.
fn rref_mod_p(m: &IntMatrix, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut rows: Vec<Vec<u64>> =
        (0..m.rows()).map(|i| m.row_slice(i).iter().map(|x| mod_reduce(x, p)).collect()).collect();
    let cols = m.cols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(pi) = (r..rows.len()).find(|&i| rows[i][col] % p != 0) else {
            continue;
        };
        rows.swap(r, pi);
        let inv = mod_inv(rows[r][col], p);
        for x in &mut rows[r] {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for j in 0..cols {
                    let sub = (f as u128 * rows[r][j] as u128) % p as u128;
                    rows[i][j] = ((rows[i][j] as u128 + p as u128 - sub) % p as u128) as u64;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    (rows, pivots)
}

/// Echelon basis of the kernel of `m` mod the prime `p`, one basis vector
/// per free column in ascending column order.
pub fn nullspace_mod_p(m: &IntMatrix, p: u64) -> Result<Vec<Vec<u64>>, LinalgError> {
    if !is_prime(p) {
        return Err(LinalgError::NotPrime(p));
    }
    let (rows, pivots) = rref_mod_p(m, p);
    let cols = m.cols();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = (p - rows[ri][free] % p) % p;
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Rank of `m` over the field with `p` elements.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize, LinalgError> {
    if !is_prime(p) {
        return Err(LinalgError::NotPrime(p));
    }
    Ok(rref_mod_p(m, p).1.len())
}

/// Basis of the integer kernel `{v in Z^cols : Mv = 0}` as primitive
/// vectors, one per free column of the rational reduction, each with its
/// free coordinate positive. Exact (fraction-free cross-multiplication).
pub fn integer_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let cols = m.cols();
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| m.row_slice(i).to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(pi) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, pi);
        // Eliminate col from every other row by cross-multiplication, then
        // re-primitivize to keep entries small.
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let (pa, pb) = (rows[r][col].clone(), rows[i][col].clone());
            for j in 0..cols {
                let t = &rows[i][j] * &pa - &rows[r][j] * &pb;
                rows[i][j] = t;
            }
            primitivize(&mut rows[i]);
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(pivots.len());
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        // x[free] = L, x[pivot_r] = -L * rows[r][free] / rows[r][pivot_r].
        let mut lcm = BigInt::one();
        for (ri, &pc) in pivots.iter().enumerate() {
            lcm = lcm.lcm(&rows[ri][pc]);
        }
        let mut v = vec![BigInt::zero(); cols];
        v[free] = lcm.clone();
        for (ri, &pc) in pivots.iter().enumerate() {
            v[pc] = -(&lcm * &rows[ri][free]) / &rows[ri][pc];
        }
        primitivize(&mut v);
        if v[free].is_negative() {
            for x in &mut v {
                *x = -std::mem::take(x);
            }
        }
        basis.push(v);
    }
    basis
}

fn primitivize(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g > BigInt::one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}
