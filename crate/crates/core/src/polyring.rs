//! Graded pieces of `S = F_p[x_0, ..., x_{n-1}]`, ideals generated in a
//! single degree, hyperplane restriction and Hilbert-function probes.
//!
//! Monomials of a fixed degree are ordered lexicographically with `x_0`
//! largest, so `x_0^d` has index 0 and `x_{n-1}^d` is last. Polynomials used
//! in linear algebra are dense coefficient vectors over that basis.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};

/// Binomial coefficient; panics if the result does not fit in `usize`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial overflow")
}

/// `dim S_d = C(d + n - 1, d)`.
pub fn graded_dim(n_vars: usize, d: usize) -> usize {
    if n_vars == 0 {
        return usize::from(d == 0);
    }
    binomial(d + n_vars - 1, d)
}

/// The canonical monomial basis of `S_d`.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    n_vars: usize,
    degree: usize,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(n_vars: usize, degree: usize) -> Self {
        let mut monomials = Vec::with_capacity(graded_dim(n_vars, degree));
        let mut cur = vec![0u32; n_vars];
        fill_monomials(&mut cur, 0, degree as u32, &mut monomials);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            n_vars,
            degree,
            monomials,
            index,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn len(&self) -> usize {
        self.monomials.len()
    }
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.monomials[i]
    }
    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }
    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Table `t[m * n_vars + i]` = index of `x_i * monomial(m)` in `next`.
    pub fn var_mult_table(&self, next: &MonomialBasis) -> Vec<usize> {
        assert_eq!(next.degree, self.degree + 1);
        assert_eq!(next.n_vars, self.n_vars);
        let mut table = Vec::with_capacity(self.len() * self.n_vars);
        let mut e = vec![0u32; self.n_vars];
        for m in &self.monomials {
            for i in 0..self.n_vars {
                e.copy_from_slice(m);
                e[i] += 1;
                table.push(next.index[&e]);
            }
        }
        table
    }
}

fn fill_monomials(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e;
        fill_monomials(cur, pos + 1, left - e, out);
    }
    cur[pos] = 0;
}

/// Index of the quadratic monomial `x_i x_j` in the degree-2 basis.
///
/// With the lex order the monomials `x_i x_j`, `i <= j`, appear as
/// `(0,0), (0,1), ..., (0,n-1), (1,1), ...`.
#[inline]
pub fn quad_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * i.saturating_sub(1) / 2 + (j - i)
}

/// A sparse polynomial: exponent vector to nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub n_vars: usize,
    pub terms: BTreeMap<Vec<u32>, u64>,
}

impl Poly {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(f: PrimeField, n_vars: usize, c: u64) -> Self {
        let mut p = Self::zero(n_vars);
        p.add_term(f, vec![0; n_vars], c);
        p
    }

    pub fn var(n_vars: usize, i: usize) -> Self {
        let mut e = vec![0; n_vars];
        e[i] = 1;
        let mut p = Self::zero(n_vars);
        p.terms.insert(e, 1);
        p
    }

    /// Linear form `sum_i coeffs[i] x_i`.
    pub fn linear(f: PrimeField, coeffs: &[u64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(f, e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: PrimeField, exps: Vec<u32>, c: u64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, f: PrimeField, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(f, e.clone(), c);
        }
        out
    }

    pub fn scale(&self, f: PrimeField, c: u64) -> Poly {
        let mut out = Poly::zero(self.n_vars);
        if c == 0 {
            return out;
        }
        for (e, &v) in &self.terms {
            out.terms.insert(e.clone(), f.mul(v, c));
        }
        out
    }

    pub fn mul(&self, f: PrimeField, other: &Poly) -> Poly {
        let mut acc: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let v = acc.entry(e).or_insert(0);
                *v = f.add(*v, f.mul(ca, cb));
            }
        }
        acc.retain(|_, v| *v != 0);
        Poly {
            n_vars: self.n_vars,
            terms: acc,
        }
    }

    /// Degree of a homogeneous polynomial (`None` for zero).
    pub fn degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .next()
            .map(|e| e.iter().map(|&x| x as usize).sum())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self
            .terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum::<usize>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn eval(&self, f: PrimeField, point: &[u64]) -> u64 {
        let mut acc = 0;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = f.mul(t, f.pow(point[i], k as u64));
                }
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// Dense coefficient vector over `basis`; panics on a degree mismatch.
    pub fn to_dense(&self, basis: &MonomialBasis) -> Vec<u64> {
        let mut v = vec![0; basis.len()];
        for (e, &c) in &self.terms {
            let i = basis
                .index_of(e)
                .expect("monomial outside the basis degree");
            v[i] = c;
        }
        v
    }

    pub fn from_dense(basis: &MonomialBasis, coeffs: &[u64]) -> Poly {
        let mut p = Poly::zero(basis.n_vars());
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.terms.insert(basis.monomial(i).to_vec(), c);
            }
        }
        p
    }
}

/// A subspace of `S_d` held as a canonical echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSubspace {
    n_vars: usize,
    degree: usize,
    space: Subspace,
}

impl GradedSubspace {
    /// Span of the given coefficient rows (not necessarily independent).
    pub fn from_rows(n_vars: usize, degree: usize, rows: &Matrix) -> Self {
        assert_eq!(rows.cols(), graded_dim(n_vars, degree));
        Self {
            n_vars,
            degree,
            space: Subspace::span(rows),
        }
    }

    pub fn zero(field: PrimeField, n_vars: usize, degree: usize) -> Self {
        Self {
            n_vars,
            degree,
            space: Subspace::zero(field, graded_dim(n_vars, degree)),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn space(&self) -> &Subspace {
        &self.space
    }
    pub fn basis_rows(&self) -> &Matrix {
        self.space.basis()
    }
    pub fn field(&self) -> PrimeField {
        self.space.field()
    }

    /// `span{x_i * b}` over all variables and basis rows, one degree up.
    pub fn times_variables(&self) -> GradedSubspace {
        let f = self.field();
        let src = MonomialBasis::new(self.n_vars, self.degree);
        let dst = MonomialBasis::new(self.n_vars, self.degree + 1);
        let table = src.var_mult_table(&dst);
        let n = self.n_vars;
        let mut m = Matrix::zeros(f, self.dim() * n, dst.len());
        for b in 0..self.dim() {
            let row = self.basis_rows().row(b);
            for (mi, &c) in row.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for i in 0..n {
                    m.set(b * n + i, table[mi * n + i], c);
                }
            }
        }
        GradedSubspace::from_rows(n, self.degree + 1, &m)
    }
}

/// An ideal generated by quadrics, stored through its degree-2 piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricIdeal {
    field: PrimeField,
    quadrics: GradedSubspace,
    variables: Option<Vec<String>>,
}

impl QuadricIdeal {
    pub fn new(quadrics: GradedSubspace) -> Result<Self> {
        if quadrics.degree() != 2 {
            return Err(Error::InvalidInput(format!(
                "generators must be quadrics, got degree {}",
                quadrics.degree()
            )));
        }
        Ok(Self {
            field: quadrics.field(),
            quadrics,
            variables: None,
        })
    }

    /// Ideal spanned by dense quadric rows over the degree-2 monomial basis.
    pub fn from_rows(n_vars: usize, rows: &Matrix) -> Self {
        Self::new(GradedSubspace::from_rows(n_vars, 2, rows)).expect("degree 2")
    }

    pub fn from_polys(field: PrimeField, n_vars: usize, polys: &[Poly]) -> Result<Self> {
        let basis = MonomialBasis::new(n_vars, 2);
        let mut m = Matrix::zeros(field, polys.len(), basis.len());
        for (r, p) in polys.iter().enumerate() {
            if p.n_vars != n_vars {
                return Err(Error::DimensionMismatch(format!(
                    "polynomial has {} variables, ideal has {}",
                    p.n_vars, n_vars
                )));
            }
            if !p.is_zero() && p.degree() != Some(2) || !p.is_homogeneous() {
                return Err(Error::InvalidInput(
                    "every generator must be a homogeneous quadric".into(),
                ));
            }
            m.row_mut(r).copy_from_slice(&p.to_dense(&basis));
        }
        Ok(Self::from_rows(n_vars, &m))
    }

    pub fn with_variables(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_vars() {
            return Err(Error::DimensionMismatch(format!(
                "{} variable names for {} variables",
                names.len(),
                self.n_vars()
            )));
        }
        self.variables = Some(names);
        Ok(self)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn n_vars(&self) -> usize {
        self.quadrics.n_vars()
    }
    pub fn quadrics(&self) -> &GradedSubspace {
        &self.quadrics
    }
    /// Canonical quadric basis, one row per generator.
    pub fn basis_rows(&self) -> &Matrix {
        self.quadrics.basis_rows()
    }
    pub fn num_quadrics(&self) -> usize {
        self.quadrics.dim()
    }
    pub fn variables(&self) -> Option<&[String]> {
        self.variables.as_deref()
    }

    pub fn variable_names(&self) -> Vec<String> {
        match &self.variables {
            Some(v) => v.clone(),
            None => (0..self.n_vars()).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn generator_polys(&self) -> Vec<Poly> {
        let basis = MonomialBasis::new(self.n_vars(), 2);
        (0..self.num_quadrics())
            .map(|r| Poly::from_dense(&basis, self.basis_rows().row(r)))
            .collect()
    }

    /// The degree-`d` piece `S_{d-2} * I_2`, for `d >= 2`.
    pub fn degree_piece(&self, d: usize) -> GradedSubspace {
        ideal_degree_piece(&self.quadrics, d)
    }

    pub fn hilbert_probe(&self, d_max: usize) -> HilbertReport {
        hilbert_probe(&self.quadrics, d_max)
    }

    /// Substitutes `x_i = sum_j sub[i][j] y_j` into every generator.
    pub fn restrict_to_subspace(&self, sub: &Matrix) -> Result<QuadricIdeal> {
        check_substitution(sub, self.n_vars())?;
        let rows = substitute_quadrics(self.basis_rows(), sub);
        Ok(QuadricIdeal::from_rows(sub.cols(), &rows))
    }

    /// Adds the given quadric rows to the generators.
    pub fn extend(&self, extra: &Matrix) -> QuadricIdeal {
        let rows = self.basis_rows().vstack(extra);
        QuadricIdeal::from_rows(self.n_vars(), &rows)
    }

    /// Whether a dense quadric lies in the ideal's degree-2 piece.
    pub fn contains_quadric(&self, q: &[u64]) -> bool {
        self.quadrics.space().contains(q)
    }
}

/// Validates an `n_old x m` substitution of full column rank with `m <= n_old`.
pub fn check_substitution(sub: &Matrix, n_old: usize) -> Result<()> {
    if sub.rows() != n_old {
        return Err(Error::DimensionMismatch(format!(
            "substitution has {} rows, ideal has {} variables",
            sub.rows(),
            n_old
        )));
    }
    if sub.cols() > n_old || sub.cols() == 0 {
        return Err(Error::InvalidInput(format!(
            "substitution must map onto between 1 and {n_old} new variables, got {}",
            sub.cols()
        )));
    }
    let rank = sub.rank();
    if rank != sub.cols() {
        return Err(Error::RankDeficient {
            rank,
            expected: sub.cols(),
        });
    }
    Ok(())
}

/// Substitutes `x_i = sum_j sub[i][j] y_j` into dense quadric rows.
pub fn substitute_quadrics(rows: &Matrix, sub: &Matrix) -> Matrix {
    let f = rows.field();
    let n = sub.rows();
    let m = sub.cols();
    let src = MonomialBasis::new(n, 2);
    let dst_dim = graded_dim(m, 2);
    assert_eq!(rows.cols(), src.len());
    // image of each source monomial x_i x_j
    let mut images: Vec<Vec<u64>> = Vec::with_capacity(src.len());
    for e in src.monomials() {
        let mut idx = Vec::with_capacity(2);
        for (v, &k) in e.iter().enumerate() {
            for _ in 0..k {
                idx.push(v);
            }
        }
        let (i, j) = (idx[0], idx[1]);
        let mut img = vec![0u64; dst_dim];
        for a in 0..m {
            let sia = sub.get(i, a);
            if sia == 0 {
                continue;
            }
            for b in 0..m {
                let sjb = sub.get(j, b);
                if sjb == 0 {
                    continue;
                }
                let t = quad_index(m, a, b);
                img[t] = f.add(img[t], f.mul(sia, sjb));
            }
        }
        images.push(img);
    }
    let mut out = Matrix::zeros(f, rows.rows(), dst_dim);
    for r in 0..rows.rows() {
        for (mi, &c) in rows.row(r).iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (t, &v) in images[mi].iter().enumerate() {
                if v != 0 {
                    out.add_to(r, t, f.mul(c, v));
                }
            }
        }
    }
    out
}

/// The degree-`d` piece of the ideal generated by `gens`, for `d >= gens.degree()`.
/// Below the generator degree the piece is zero.
pub fn ideal_degree_piece(gens: &GradedSubspace, d: usize) -> GradedSubspace {
    if d < gens.degree() {
        return GradedSubspace::zero(gens.field(), gens.n_vars(), d);
    }
    let mut cur = gens.clone();
    while cur.degree() < d {
        cur = cur.times_variables();
    }
    cur
}

/// Quotient dimensions `dim (S/I)_d` for `d = 0..=d_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertReport {
    pub values: Vec<usize>,
    /// The ideal contains all of `S_d` at this degree (empty zero locus).
    pub empty_from: Option<usize>,
    /// The probe ends on a constant run `h(d) = .. = h(d_max)` of length at
    /// least two; records the first `d` of the run and the value.
    pub stabilized: Option<(usize, usize)>,
    /// Linear fit `h(d) = a d + b` through the last three values, if exact
    /// and the quotient never vanished.
    pub linear_fit: Option<(i64, i64)>,
}

impl HilbertReport {
    fn from_values(values: Vec<usize>) -> Self {
        let empty_from = values.iter().position(|&v| v == 0);
        let stabilized = match (empty_from, values.last()) {
            (None, Some(&last)) if values.len() >= 2 && values[values.len() - 2] == last => {
                let mut d = values.len() - 1;
                while d > 0 && values[d - 1] == last {
                    d -= 1;
                }
                Some((d, last))
            }
            _ => None,
        };
        let linear_fit = if empty_from.is_none() && values.len() >= 3 {
            let k = values.len();
            let (a, b, c) = (
                values[k - 3] as i64,
                values[k - 2] as i64,
                values[k - 1] as i64,
            );
            (c - b == b - a).then(|| {
                let slope = b - a;
                (slope, c - slope * (k as i64 - 1))
            })
        } else {
            None
        };
        Self {
            values,
            empty_from,
            stabilized,
            linear_fit,
        }
    }

    /// The stabilized value, i.e. the degree of a finite scheme.
    pub fn stable_value(&self) -> Option<usize> {
        self.stabilized.map(|(_, h)| h)
    }
}

/// Hilbert function of `S / (gens)` up to `d_max`.
///
/// Probing stops early once the quotient vanishes, since it then stays zero.
pub fn hilbert_probe(gens: &GradedSubspace, d_max: usize) -> HilbertReport {
    let n = gens.n_vars();
    let mut values = Vec::with_capacity(d_max + 1);
    let mut cur: Option<GradedSubspace> = None;
    for d in 0..=d_max {
        let idim = if d < gens.degree() {
            0
        } else {
            let next = match cur.take() {
                None => gens.clone(),
                Some(c) => c.times_variables(),
            };
            let dim = next.dim();
            cur = Some(next);
            dim
        };
        let h = graded_dim(n, d) - idim;
        values.push(h);
        if h == 0 {
            break;
        }
    }
    HilbertReport::from_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn graded_dims() {
        assert_eq!(graded_dim(3, 2), 6);
        assert_eq!(graded_dim(8, 2), 36);
        assert_eq!(graded_dim(5, 4), 70);
        assert_eq!(graded_dim(4, 0), 1);
    }

    #[test]
    fn monomial_order_is_lex_descending() {
        let b = MonomialBasis::new(3, 2);
        let m: Vec<Vec<u32>> = b.monomials().to_vec();
        assert_eq!(
            m,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
    }

    #[test]
    fn quad_index_matches_basis() {
        for n in 1..9 {
            let b = MonomialBasis::new(n, 2);
            for i in 0..n {
                for j in 0..n {
                    let mut e = vec![0u32; n];
                    e[i] += 1;
                    e[j] += 1;
                    assert_eq!(quad_index(n, i, j), b.index_of(&e).unwrap());
                }
            }
        }
    }

    #[test]
    fn monomial_ideal_cubic_piece() {
        let f = f101();
        let q = Poly::var(2, 0).mul(f, &Poly::var(2, 1));
        let ideal = QuadricIdeal::from_polys(f, 2, &[q]).unwrap();
        assert_eq!(ideal.degree_piece(3).dim(), 2);
    }

    #[test]
    fn substitution_of_monomial() {
        let f = f101();
        let q = Poly::var(2, 0).mul(f, &Poly::var(2, 1));
        let ideal = QuadricIdeal::from_polys(f, 2, &[q]).unwrap();
        // x0 -> y0, x1 -> y0
        let sub = Matrix::from_i64_rows(f, 1, &[vec![1], vec![1]]);
        let r = ideal.restrict_to_subspace(&sub).unwrap();
        assert_eq!(r.n_vars(), 1);
        assert_eq!(r.generator_polys(), vec![Poly::var(1, 0).mul(f, &Poly::var(1, 0))]);
    }

    #[test]
    fn rank_deficient_substitution_rejected() {
        let f = f101();
        let ideal = QuadricIdeal::from_polys(f, 3, &[Poly::var(3, 0).mul(f, &Poly::var(3, 1))]).unwrap();
        let sub = Matrix::from_i64_rows(f, 2, &[vec![1, 2], vec![2, 4], vec![3, 6]]);
        assert!(matches!(
            ideal.restrict_to_subspace(&sub),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
    }

    #[test]
    fn full_quadric_space_has_empty_locus() {
        let f = f101();
        let rows = Matrix::identity(f, 6);
        let ideal = QuadricIdeal::from_rows(3, &rows);
        let h = ideal.hilbert_probe(5);
        assert_eq!(h.values, vec![1, 3, 0]);
        assert_eq!(h.empty_from, Some(2));
    }

    #[test]
    fn complete_intersection_of_two_conics_has_degree_four() {
        let f = f101();
        let x = |i| Poly::var(3, i);
        let q1 = x(0).mul(f, &x(0)).add(f, &x(1).mul(f, &x(1)).scale(f, f.neg(1)));
        let q2 = x(0).mul(f, &x(1)).add(f, &x(2).mul(f, &x(2)).scale(f, f.neg(1)));
        let ideal = QuadricIdeal::from_polys(f, 3, &[q1, q2]).unwrap();
        let h = ideal.hilbert_probe(6);
        assert_eq!(h.values, vec![1, 3, 4, 4, 4, 4, 4]);
        assert_eq!(h.stable_value(), Some(4));
        assert_eq!(h.linear_fit, Some((0, 4)));
    }
}
