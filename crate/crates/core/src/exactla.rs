//! Dense linear algebra over prime fields.
//!
//! Everything downstream (graded pieces, Koszul kernels, lifting systems,
//! Hilbert probes) reduces to rank, kernel and solve computations on dense
//! matrices over `F_p`. Elimination is Gauss-Jordan with the first nonzero
//! entry of each column as pivot, so reduced echelon forms are canonical and
//! outputs are reproducible byte for byte.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_p` for a word-sized prime `p < 2^32`.
///
/// Elements are stored as `u64` values in `[0, p)`; products of two elements
/// fit in a `u64` without overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !(2..(1u64 << 32)).contains(&p) {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    /// Symmetric representative in `(-p/2, p/2]`.
    pub fn to_signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }
}

/// Deterministic Miller-Rabin; the witness set is exact for all `n < 3.3e24`.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A dense row-major matrix over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major data already reduced into `[0, p)`.
    pub fn from_vec(field: PrimeField, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entries length must be rows x cols");
        debug_assert!(data.iter().all(|&x| x < field.p()));
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from signed integer rows, reducing mod p.
    pub fn from_i64_rows(field: PrimeField, cols: usize, rows: &[Vec<i64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend(r.iter().map(|&v| field.from_i64(v)));
        }
        Self::from_vec(field, rows.len(), cols, data)
    }

    pub fn from_rows(field: PrimeField, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Self::from_vec(field, rows.len(), cols, data)
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        Self::from_vec(field, rows, cols, data)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn data(&self) -> &[u64] {
        &self.data
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }
    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: u64) {
        let idx = i * self.cols + j;
        self.data[idx] = self.field.add(self.data[idx], v);
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let f = self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    if b != 0 {
                        *d = (*d + a * b) % f.p();
                    }
                }
            }
        }
        out
    }

    /// `v * self` for a row vector `v`.
    pub fn left_apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let f = self.field;
        let mut out = vec![0u64; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (d, &b) in out.iter_mut().zip(self.row(i)) {
                if b != 0 {
                    *d = (*d + a * b) % f.p();
                }
            }
        }
        out
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &b)| (acc + a * b) % f.p())
            })
            .collect()
    }

    pub fn scale(&self, c: u64) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&x| f.mul(x, c)).collect();
        Matrix::from_vec(f, self.rows, self.cols, data)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix::from_vec(self.field, self.rows + other.rows, self.cols, data)
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Matrix::from_vec(self.field, self.rows, cols, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix::from_vec(self.field, idx.len(), self.cols, data)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                out.data[i * idx.len() + jj] = self.get(i, j);
            }
        }
        out
    }

    /// In-place Gauss-Jordan reduction; returns the pivot columns.
    ///
    /// Only columns `< col_limit` are eligible as pivots, which lets `solve`
    /// reduce an augmented system without pivoting on the right-hand side.
    fn rref_in_place_limited(&mut self, col_limit: usize) -> Vec<usize> {
        let p = self.field.p();
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        let mut pivot_nz: Vec<(usize, u64)> = Vec::new();
        for c in 0..col_limit.min(cols) {
            if r == self.rows {
                break;
            }
            let Some(piv) = (r..self.rows).find(|&i| self.data[i * cols + c] != 0) else {
                continue;
            };
            if piv != r {
                for k in 0..cols {
                    self.data.swap(piv * cols + k, r * cols + k);
                }
            }
            let inv = self.field.inv(self.data[r * cols + c]);
            pivot_nz.clear();
            for k in c..cols {
                let v = self.data[r * cols + k];
                if v != 0 {
                    let nv = v * inv % p;
                    self.data[r * cols + k] = nv;
                    pivot_nz.push((k, nv));
                }
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self.data[i * cols + c];
                if f == 0 {
                    continue;
                }
                let nf = p - f;
                let row = &mut self.data[i * cols..(i + 1) * cols];
                for &(k, v) in &pivot_nz {
                    row[k] = (row[k] + nf * v) % p;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Determinant of a square matrix.
    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let f = self.field;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = 1u64;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| a[i * n + c] != 0) else {
                return 0;
            };
            if piv != c {
                for k in 0..n {
                    a.swap(piv * n + k, c * n + k);
                }
                det = f.neg(det);
            }
            let d = a[c * n + c];
            det = f.mul(det, d);
            let inv = f.inv(d);
            for i in c + 1..n {
                let m = f.mul(a[i * n + c], inv);
                if m == 0 {
                    continue;
                }
                for k in c..n {
                    a[i * n + k] = f.sub(a[i * n + k], f.mul(m, a[c * n + k]));
                }
            }
        }
        det
    }

    /// Reduced row echelon form (zero rows dropped) and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place_limited(m.cols);
        m.data.truncate(pivots.len() * m.cols);
        m.rows = pivots.len();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        // Eliminate on the shorter side.
        if self.rows > self.cols {
            self.transpose().rref().1.len()
        } else {
            self.rref().1.len()
        }
    }

    /// Rank and a canonical basis of the right kernel `{x : self * x = 0}`.
    ///
    /// The kernel basis has `cols - rank` rows, each of length `cols`, and is
    /// in reduced row echelon form.
    pub fn rank_kernel(&self) -> (usize, Matrix) {
        let (r, pivots) = self.rref();
        let rank = pivots.len();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut ker = Matrix::zeros(self.field, free.len(), n);
        for (t, &fc) in free.iter().enumerate() {
            ker.data[t * n + fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let v = r.get(i, fc);
                if v != 0 {
                    ker.data[t * n + pc] = self.field.neg(v);
                }
            }
        }
        let (ker, _) = ker.rref();
        (rank, ker)
    }

    /// One solution `x` of `self * x = b` (column-wise), with free variables
    /// set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: matrix has {} rows, right-hand side {}",
                self.rows, b.rows
            )));
        }
        let mut aug = self.hstack(b);
        let pivots = aug.rref_in_place_limited(self.cols);
        let rank = pivots.len();
        // Rows below the pivots must vanish on the right-hand side.
        for i in rank..aug.rows {
            if aug.row(i)[self.cols..].iter().any(|&x| x != 0) {
                return Err(Error::NoSolution);
            }
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.data[pc * b.cols + j] = aug.get(i, self.cols + j);
            }
        }
        Ok(x)
    }
}

/// A linear subspace of `F_p^dim`, held as a reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: PrimeField, dim: usize) -> Self {
        Self {
            basis: Matrix::zeros(field, 0, dim),
            pivots: Vec::new(),
        }
    }

    /// The span of the rows of `m`.
    pub fn span(m: &Matrix) -> Self {
        let (basis, pivots) = m.rref();
        Self { basis, pivots }
    }

    pub fn full(field: PrimeField, dim: usize) -> Self {
        Self {
            basis: Matrix::identity(field, dim),
            pivots: (0..dim).collect(),
        }
    }

    #[inline]
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }
    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }
    pub fn field(&self) -> PrimeField {
        self.basis.field()
    }

    /// Coordinates of `v` over the echelon basis, or `None` if `v` is not in
    /// the span. The coordinates are read off at the pivot columns.
    pub fn coordinates(&self, v: &[u64]) -> Option<Vec<u64>> {
        let coords: Vec<u64> = self.pivots.iter().map(|&c| v[c]).collect();
        let back = self.basis.left_apply(&coords);
        (back == v).then_some(coords)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(&self.basis.vstack(&other.basis))
    }
}
