//! Exterior powers `Λ^p V` and Koszul differentials.
//!
//! Basis vectors `e_I` of `Λ^p V` are indexed by strictly increasing index
//! sequences in lexicographic order. The Koszul differential is
//!
//! `d(e_{i_0 .. i_{p-1}} ⊗ f) = Σ_k (-1)^k e_{I \ i_k} ⊗ x_{i_k} f`
//!
//! (0-based `k`, i.e. the usual `(-1)^{j+1}` for 1-based `j`). Every module
//! that talks about Koszul coordinates uses this convention.

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};
use crate::polyring::binomial;

/// All `p`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, p));
    if p > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..p).collect();
    loop {
        out.push(cur.clone());
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - p + i {
                break;
            }
        }
        cur[i] += 1;
        for j in i + 1..p {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The lexicographic basis of `Λ^p` of an `n`-dimensional space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeBasis {
    n: usize,
    p: usize,
    subsets: Vec<Vec<usize>>,
}

impl WedgeBasis {
    pub fn new(n: usize, p: usize) -> Self {
        Self {
            n,
            p,
            subsets: subsets(n, p),
        }
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn len(&self) -> usize {
        self.subsets.len()
    }
    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i]
    }
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }
    /// Index of a strictly increasing sequence.
    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.subsets
            .binary_search_by(|probe| probe.as_slice().cmp(s))
            .ok()
    }
}

/// Sign of the permutation sorting `seq`; `None` if an entry repeats.
pub fn sort_sign(seq: &[usize]) -> Option<i64> {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            match seq[i].cmp(&seq[j]) {
                std::cmp::Ordering::Greater => inversions += 1,
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    Some(if inversions.is_multiple_of(2) { 1 } else { -1 })
}

/// The sign `ε(I, J)` with `e_I ∧ e_J = ε(I, J) e_{I ∪ J}` for disjoint
/// increasing `I`, `J`.
pub fn shuffle_sign(i: &[usize], j: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for &a in i {
        inversions += j.iter().filter(|&&b| b < a).count();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Complement of an increasing subset of `0..n`.
pub fn complement(n: usize, s: &[usize]) -> Vec<usize> {
    (0..n).filter(|x| !s.contains(x)).collect()
}

#[inline]
pub(crate) fn signed(f: PrimeField, sign: i64, v: u64) -> u64 {
    if sign >= 0 {
        v
    } else {
        f.neg(v)
    }
}

/// Coordinate matrix of `d: Λ^p V ⊗ P → Λ^{p-1} V ⊗ P'`.
///
/// `mult[i]` is the matrix (raised dim x payload dim) of multiplication by
/// `x_i` from the payload space `P` to `P'`. Columns are indexed by
/// `I * payload_dim + a`, rows by `J * raised_dim + b`.
pub fn koszul_matrix(n: usize, p: usize, payload_dim: usize, mult: &[Matrix]) -> Result<Matrix> {
    if p == 0 || p > n {
        return Err(Error::InvalidInput(format!(
            "Koszul differential needs 1 <= p <= n, got p = {p}, n = {n}"
        )));
    }
    if mult.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} multiplication maps for {n} variables",
            mult.len()
        )));
    }
    let raised = mult[0].rows();
    for m in mult {
        if m.cols() != payload_dim || m.rows() != raised {
            return Err(Error::DimensionMismatch(format!(
                "multiplication map is {}x{}, expected {raised}x{payload_dim}",
                m.rows(),
                m.cols()
            )));
        }
    }
    let f = mult[0].field();
    let src = WedgeBasis::new(n, p);
    let dst = WedgeBasis::new(n, p - 1);
    let mut out = Matrix::zeros(f, dst.len() * raised, src.len() * payload_dim);
    let mut rest = Vec::with_capacity(p);
    for (ii, set) in src.subsets().iter().enumerate() {
        for k in 0..p {
            rest.clear();
            rest.extend(set.iter().enumerate().filter(|&(t, _)| t != k).map(|(_, &x)| x));
            let jj = dst.index_of(&rest).expect("face of a wedge basis element");
            let m = &mult[set[k]];
            let sign = if k % 2 == 0 { 1 } else { -1 };
            for a in 0..payload_dim {
                for b in 0..raised {
                    let v = m.get(b, a);
                    if v != 0 {
                        out.set(jj * raised + b, ii * payload_dim + a, signed(f, sign, v));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `Λ^p` of the linear substitution `x_i ↦ Σ_j a[i][j] y_j`: the matrix with
/// rows indexed by `p`-subsets of the old variables and columns by `p`-subsets
/// of the new ones, entries the `p x p` minors of `a`.
pub fn wedge_power(a: &Matrix, p: usize) -> Matrix {
    let f = a.field();
    let src = WedgeBasis::new(a.rows(), p);
    let dst = WedgeBasis::new(a.cols(), p);
    let mut out = Matrix::zeros(f, src.len(), dst.len());
    if p == 0 {
        out.set(0, 0, 1);
        return out;
    }
    for (i, rs) in src.subsets().iter().enumerate() {
        let rows = a.select_rows(rs);
        if rows.is_zero() {
            continue;
        }
        for (j, cs) in dst.subsets().iter().enumerate() {
            let d = rows.select_cols(cs).det();
            if d != 0 {
                out.set(i, j, d);
            }
        }
    }
    out
}
