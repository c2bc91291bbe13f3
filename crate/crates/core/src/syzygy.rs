//! Linear strands, syzygy ranks, syzygy schemes, restriction to linear
//! sections and determinantal rank loci.
//!
//! The strand is computed level by level: `V_1 = ker(V_0 ⊗ V → S_3)` and
//! `V_p = ker(V_{p-1} ⊗ V → V_{p-2} ⊗ S_2)`, where the maps are the strand
//! differentials `φ_p` stored as rows of `V_p` in `V_{p-1} ⊗ V` coordinates
//! (index `b * n + i`). Each basis element is then transported to its Koszul
//! representative in `Λ^p V ⊗ (I_X)_2` (index `I * dim V_0 + a`) by a zigzag
//! through `V_{p-j} ⊗ Λ^j V`. The Koszul representatives are the canonical
//! coordinates of syzygies everywhere else in the crate; `koszul_cycles`
//! computes the same space directly as a kernel and serves as a check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};
use crate::exterior::{koszul_matrix, signed, wedge_power, WedgeBasis};
use crate::polyring::{
    binomial, check_substitution, graded_dim, hilbert_probe, quad_index, substitute_quadrics,
    GradedSubspace, HilbertReport, MonomialBasis, QuadricIdeal,
};

/// Default cap on `#minors x dim S_{r+1}` for rank-locus probes.
pub const DEFAULT_MINOR_BUDGET: u128 = 10_000_000;

/// The linear strand `V_0, V_1, ...` of a quadric ideal.
#[derive(Clone, Debug)]
pub struct LinearStrand {
    ideal: QuadricIdeal,
    dims: Vec<usize>,
    /// `phi[p]` for `p >= 1`; `phi[0]` is the identity on `V_0`.
    phi: Vec<Matrix>,
    koszul: Vec<Matrix>,
}

/// A `p`-th linear syzygy, held by its Koszul representative
/// `Σ_{I,a} c_{I,a} e_I ⊗ q_a` over the canonical quadric basis `q_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Syzygy {
    p: usize,
    n_vars: usize,
    dim_v0: usize,
    koszul: Vec<u64>,
}

/// The space `L_s ⊂ V` of linear forms involved in a syzygy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormSpace {
    pub space: Subspace,
}

impl LinearFormSpace {
    pub fn rank(&self) -> usize {
        self.space.dim()
    }
    pub fn basis(&self) -> &Matrix {
        self.space.basis()
    }
}

/// Rank of a syzygy and its linear-form space.
#[derive(Clone, Debug)]
pub struct RankInfo {
    pub rank: usize,
    pub forms: LinearFormSpace,
    /// Set for `p = 0`, where rank means the rank of the quadric itself
    /// (dimension of the span of its partial derivatives).
    pub quadric_rank_convention: bool,
}

/// Multiplication `x_i · (-)` from `(I_X)_2` (canonical basis coordinates)
/// into `S_3` monomial coordinates, one matrix per variable.
fn quadric_to_cubic_maps(ideal: &QuadricIdeal) -> Vec<Matrix> {
    let f = ideal.field();
    let n = ideal.n_vars();
    let s2 = MonomialBasis::new(n, 2);
    let s3 = MonomialBasis::new(n, 3);
    let t = s2.var_mult_table(&s3);
    let q = ideal.basis_rows();
    (0..n)
        .map(|i| {
            let mut m = Matrix::zeros(f, s3.len(), q.rows());
            for a in 0..q.rows() {
                for (mi, &c) in q.row(a).iter().enumerate() {
                    if c != 0 {
                        m.set(t[mi * n + i], a, c);
                    }
                }
            }
            m
        })
        .collect()
}

/// Multiplication maps `(I_X)_2 → (I_X)_3`, both in canonical basis
/// coordinates (the payload of the Koszul complex of the ideal).
pub fn ideal_mult_maps(ideal: &QuadricIdeal) -> Vec<Matrix> {
    let i3 = ideal.degree_piece(3);
    quadric_to_cubic_maps(ideal)
        .into_iter()
        .map(|m| {
            let mut out = Matrix::zeros(ideal.field(), i3.dim(), m.cols());
            let mt = m.transpose();
            for a in 0..mt.rows() {
                let coords = i3
                    .space()
                    .coordinates(mt.row(a))
                    .expect("x_i * q lies in I_3");
                for (b, &v) in coords.iter().enumerate() {
                    out.set(b, a, v);
                }
            }
            out
        })
        .collect()
}

/// Kernel of `Λ^p V ⊗ (I_X)_2 → Λ^{p-1} V ⊗ (I_X)_3`, computed directly.
/// Feasible only for small cases; used to cross-check the strand.
pub fn koszul_cycles(ideal: &QuadricIdeal, p: usize) -> Matrix {
    let dim0 = ideal.num_quadrics();
    if p == 0 {
        return Matrix::identity(ideal.field(), dim0);
    }
    let maps = ideal_mult_maps(ideal);
    let m = koszul_matrix(ideal.n_vars(), p, dim0, &maps).expect("consistent maps");
    m.rank_kernel().1
}

/// Image of a Koszul vector under the differential into `Λ^{p-1} V ⊗ S_3`
/// (monomial coordinates). Zero exactly for syzygies.
fn koszul_residual(ideal: &QuadricIdeal, p: usize, koszul: &[u64]) -> Vec<u64> {
    let f = ideal.field();
    let n = ideal.n_vars();
    if p == 0 {
        return Vec::new();
    }
    let dim0 = ideal.num_quadrics();
    let src = WedgeBasis::new(n, p);
    let dst = WedgeBasis::new(n, p - 1);
    let s2 = MonomialBasis::new(n, 2);
    let s3 = MonomialBasis::new(n, 3);
    let t = s2.var_mult_table(&s3);
    let q = ideal.basis_rows();
    let mut out = vec![0u64; dst.len() * s3.len()];
    let mut quad = vec![0u64; s2.len()];
    let mut rest = Vec::with_capacity(p);
    for (ii, set) in src.subsets().iter().enumerate() {
        let coeffs = &koszul[ii * dim0..(ii + 1) * dim0];
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        quad.iter_mut().for_each(|x| *x = 0);
        for (a, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (mi, &v) in q.row(a).iter().enumerate() {
                if v != 0 {
                    quad[mi] = f.add(quad[mi], f.mul(c, v));
                }
            }
        }
        for k in 0..p {
            rest.clear();
            rest.extend(set.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x));
            let jj = dst.index_of(&rest).expect("face");
            let var = set[k];
            for (mi, &v) in quad.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let idx = jj * s3.len() + t[mi * n + var];
                let v = if k % 2 == 0 { v } else { f.neg(v) };
                out[idx] = f.add(out[idx], v);
            }
        }
    }
    out
}

impl Syzygy {
    /// Wraps a Koszul vector after checking that it is a cycle.
    pub fn from_koszul(ideal: &QuadricIdeal, p: usize, koszul: Vec<u64>) -> Result<Syzygy> {
        let n = ideal.n_vars();
        let dim0 = ideal.num_quadrics();
        if koszul.len() != binomial(n, p) * dim0 {
            return Err(Error::DimensionMismatch(format!(
                "Koszul vector has length {}, expected C({n},{p}) x {dim0}",
                koszul.len()
            )));
        }
        if koszul_residual(ideal, p, &koszul).iter().any(|&x| x != 0) {
            return Err(Error::NotASyzygy(format!(
                "the {p}-th Koszul differential does not vanish on it"
            )));
        }
        Ok(Syzygy {
            p,
            n_vars: n,
            dim_v0: dim0,
            koszul,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }
    pub fn koszul(&self) -> &[u64] {
        &self.koszul
    }
    pub fn is_zero(&self) -> bool {
        self.koszul.iter().all(|&x| x == 0)
    }

    /// The decomposition `s = Σ_I e_I ⊗ Q_I` as (wedge index, dense quadric)
    /// pairs with `Q_I ≠ 0`.
    pub fn decomposition(&self, ideal: &QuadricIdeal) -> Vec<(Vec<usize>, Vec<u64>)> {
        let basis = WedgeBasis::new(self.n_vars, self.p);
        let q = ideal.basis_rows();
        let mut out = Vec::new();
        for (ii, set) in basis.subsets().iter().enumerate() {
            let coeffs = &self.koszul[ii * self.dim_v0..(ii + 1) * self.dim_v0];
            if coeffs.iter().all(|&c| c == 0) {
                continue;
            }
            let quad = q.left_apply(coeffs);
            if quad.iter().any(|&x| x != 0) {
                out.push((set.clone(), quad));
            }
        }
        out
    }
}

/// Rank and linear-form space of a syzygy, by contracting its Koszul
/// representative one exterior step down: `L_s` is the span of the
/// contractions `⟨e_J^* ⊗ q_a^*, s⟩ ∈ V`.
pub fn syzygy_rank(ideal: &QuadricIdeal, s: &Syzygy) -> RankInfo {
    let f = ideal.field();
    let n = s.n_vars;
    if s.p == 0 {
        // rank of the quadric Q: span of its partial derivatives
        let quad = ideal.basis_rows().left_apply(&s.koszul);
        let mut m = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                let c = quad[quad_index(n, i, j)];
                let v = if i == j { f.mul(2, c) } else { c };
                m.set(i, j, v);
            }
        }
        let space = Subspace::span(&m);
        return RankInfo {
            rank: space.dim(),
            forms: LinearFormSpace { space },
            quadric_rank_convention: true,
        };
    }
    let dim0 = s.dim_v0;
    let low = WedgeBasis::new(n, s.p - 1);
    let high = WedgeBasis::new(n, s.p);
    let mut m = Matrix::zeros(f, low.len() * dim0, n);
    let mut merged = Vec::with_capacity(s.p);
    for (jj, set) in low.subsets().iter().enumerate() {
        for i in 0..n {
            if set.contains(&i) {
                continue;
            }
            merged.clear();
            merged.extend_from_slice(set);
            let pos = merged.partition_point(|&x| x < i);
            merged.insert(pos, i);
            let kk = high.index_of(&merged).expect("subset");
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            for a in 0..dim0 {
                let c = s.koszul[kk * dim0 + a];
                if c != 0 {
                    m.set(jj * dim0 + a, i, signed(f, sign, c));
                }
            }
        }
    }
    let space = Subspace::span(&m);
    RankInfo {
        rank: space.dim(),
        forms: LinearFormSpace { space },
        quadric_rank_convention: false,
    }
}

/// Span of the quadrics `Q_I` in `s = Σ e_I ⊗ Q_I`: the degree-2 generators
/// of the syzygy scheme.
pub fn syzygy_scheme_ideal(ideal: &QuadricIdeal, s: &Syzygy) -> Result<GradedSubspace> {
    if s.is_zero() {
        return Err(Error::InvalidInput("the zero syzygy has no syzygy scheme".into()));
    }
    let parts = s.decomposition(ideal);
    let rows: Vec<Vec<u64>> = parts.into_iter().map(|(_, q)| q).collect();
    let m = Matrix::from_rows(ideal.field(), graded_dim(s.n_vars, 2), &rows);
    Ok(GradedSubspace::from_rows(s.n_vars, 2, &m))
}

impl LinearStrand {
    /// Computes `V_0, ..., V_{p_max}`, stopping after the first zero space.
    pub fn compute(ideal: &QuadricIdeal, p_max: usize) -> Result<LinearStrand> {
        let f = ideal.field();
        let n = ideal.n_vars();
        let dim0 = ideal.num_quadrics();
        if dim0 == 0 {
            return Err(Error::InvalidInput("the ideal has no quadrics".into()));
        }
        let mut strand = LinearStrand {
            ideal: ideal.clone(),
            dims: vec![dim0],
            phi: vec![Matrix::identity(f, dim0)],
            koszul: vec![Matrix::identity(f, dim0)],
        };
        for p in 1..=p_max {
            let m = if p == 1 {
                first_syzygy_matrix(ideal)
            } else {
                strand_matrix(f, n, &strand.phi[p - 1], strand.dims[p - 2])
            };
            let (_, ker) = m.rank_kernel();
            strand.dims.push(ker.rows());
            strand.phi.push(ker);
            let kz = strand.transfer_to_koszul(p)?;
            strand.koszul.push(kz);
            strand.verify_level(p)?;
            if strand.dims[p] == 0 {
                break;
            }
        }
        Ok(strand)
    }

    pub fn ideal(&self) -> &QuadricIdeal {
        &self.ideal
    }
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn dim(&self, p: usize) -> usize {
        self.dims.get(p).copied().unwrap_or(0)
    }
    /// Highest computed level.
    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }
    pub fn field(&self) -> PrimeField {
        self.ideal.field()
    }
    pub fn n_vars(&self) -> usize {
        self.ideal.n_vars()
    }
    /// The differential `φ_p` as rows of `V_p` in `V_{p-1} ⊗ V` coordinates.
    pub fn phi(&self, p: usize) -> &Matrix {
        &self.phi[p]
    }
    /// Koszul representatives of the `V_p` basis.
    pub fn koszul_basis(&self, p: usize) -> &Matrix {
        &self.koszul[p]
    }

    fn level(&self, p: usize) -> Result<()> {
        if p > self.top() {
            return Err(Error::InvalidInput(format!(
                "strand computed only up to p = {}",
                self.top()
            )));
        }
        Ok(())
    }

    /// The syzygy with the given coordinates over the `V_p` basis.
    pub fn syzygy(&self, p: usize, coords: &[u64]) -> Result<Syzygy> {
        self.level(p)?;
        if coords.len() != self.dims[p] {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for dim V_{p} = {}",
                coords.len(),
                self.dims[p]
            )));
        }
        Ok(Syzygy {
            p,
            n_vars: self.n_vars(),
            dim_v0: self.dims[0],
            koszul: self.koszul[p].left_apply(coords),
        })
    }

    /// Coordinates of a syzygy over the `V_p` basis.
    pub fn coordinates(&self, s: &Syzygy) -> Result<Vec<u64>> {
        self.level(s.p)?;
        let k = &self.koszul[s.p];
        let b = Matrix::from_vec(self.field(), k.cols(), 1, s.koszul.clone());
        let x = k
            .transpose()
            .solve(&b)
            .map_err(|_| Error::NotASyzygy(format!("not in the span of V_{}", s.p)))?;
        Ok(x.data().to_vec())
    }

    /// Rank of `φ̃(s) : V_{p-1}^* → V` from strand coordinates, together
    /// with its image. Agrees with [`syzygy_rank`].
    pub fn phi_rank(&self, p: usize, coords: &[u64]) -> Result<LinearFormSpace> {
        self.level(p)?;
        if p == 0 {
            return Err(Error::InvalidInput("φ̃ is defined for p >= 1".into()));
        }
        let n = self.n_vars();
        let flat = self.phi[p].left_apply(coords);
        let m = Matrix::from_vec(self.field(), self.dims[p - 1], n, flat);
        Ok(LinearFormSpace {
            space: Subspace::span(&m),
        })
    }

    /// Zigzag from `V_p` to `Λ^p V ⊗ V_0`: lifts `e_t` through
    /// `V_{p-j} ⊗ Λ^j V` using `φ` and the comultiplication
    /// `Δ(e_K) = Σ_k (-1)^k e_{K_k} ⊗ e_{K \ K_k}`.
    fn transfer_to_koszul(&self, p: usize) -> Result<Matrix> {
        let f = self.field();
        let n = self.n_vars();
        let dp = self.dims[p];
        // w: rows t, columns (a, J) with a in V_{p-j}, J a j-subset
        let mut w = Matrix::identity(f, dp);
        for j in 0..p {
            let cur_dim = self.dims[p - j];
            let next_dim = self.dims[p - j - 1];
            let lam_j = WedgeBasis::new(n, j);
            let lam_next = WedgeBasis::new(n, j + 1);
            let phi = &self.phi[p - j];
            let mut next = Matrix::zeros(f, dp, next_dim * lam_next.len());
            // y[c][i][J] = Σ_b w[b][J] φ[b][c n + i]
            let ylen = next_dim * n * lam_j.len();
            let mut y = vec![0u64; ylen];
            let mut rest = Vec::with_capacity(j + 1);
            for t in 0..dp {
                y.iter_mut().for_each(|x| *x = 0);
                let wr = w.row(t);
                for b in 0..cur_dim {
                    for jj in 0..lam_j.len() {
                        let wv = wr[b * lam_j.len() + jj];
                        if wv == 0 {
                            continue;
                        }
                        for (ci, &pv) in phi.row(b).iter().enumerate() {
                            if pv != 0 {
                                let idx = ci * lam_j.len() + jj;
                                y[idx] = f.add(y[idx], f.mul(wv, pv));
                            }
                        }
                    }
                }
                // w'[c][K] = y[c][K_0][K \ K_0]
                for c in 0..next_dim {
                    for (kk, set) in lam_next.subsets().iter().enumerate() {
                        let jj = lam_j.index_of(&set[1..]).expect("face");
                        let v = y[(c * n + set[0]) * lam_j.len() + jj];
                        next.set(t, c * lam_next.len() + kk, v);
                    }
                }
                // check Δ(w') = y
                let nr = next.row(t);
                for c in 0..next_dim {
                    for i in 0..n {
                        for (jj, set) in lam_j.subsets().iter().enumerate() {
                            let yv = y[(c * n + i) * lam_j.len() + jj];
                            let expect = if set.contains(&i) {
                                0
                            } else {
                                rest.clear();
                                rest.extend_from_slice(set);
                                let pos = rest.partition_point(|&x| x < i);
                                rest.insert(pos, i);
                                let kk = lam_next.index_of(&rest).expect("subset");
                                let v = nr[c * lam_next.len() + kk];
                                if pos % 2 == 0 {
                                    v
                                } else {
                                    f.neg(v)
                                }
                            };
                            if expect != yv {
                                return Err(Error::Internal(format!(
                                    "strand zigzag at p = {p}, step {j} is not alternating"
                                )));
                            }
                        }
                    }
                }
            }
            w = next;
        }
        // reorder (a, J) -> (J, a)
        let dim0 = self.dims[0];
        let lam = WedgeBasis::new(n, p);
        let mut out = Matrix::zeros(f, dp, lam.len() * dim0);
        for t in 0..dp {
            for a in 0..dim0 {
                for jj in 0..lam.len() {
                    out.set(t, jj * dim0 + a, w.get(t, a * lam.len() + jj));
                }
            }
        }
        Ok(out)
    }

    fn verify_level(&self, p: usize) -> Result<()> {
        let k = &self.koszul[p];
        for t in 0..k.rows() {
            if koszul_residual(&self.ideal, p, k.row(t)).iter().any(|&x| x != 0) {
                return Err(Error::Internal(format!(
                    "basis element {t} of V_{p} is not a Koszul cycle"
                )));
            }
        }
        if k.rank() != k.rows() {
            return Err(Error::Internal(format!(
                "Koszul representatives of V_{p} are dependent"
            )));
        }
        Ok(())
    }
}

/// Matrix of `V_0 ⊗ V → S_3`, columns `a * n + i`.
fn first_syzygy_matrix(ideal: &QuadricIdeal) -> Matrix {
    let f = ideal.field();
    let n = ideal.n_vars();
    let s2 = MonomialBasis::new(n, 2);
    let s3 = MonomialBasis::new(n, 3);
    let t = s2.var_mult_table(&s3);
    let q = ideal.basis_rows();
    let mut m = Matrix::zeros(f, s3.len(), q.rows() * n);
    for a in 0..q.rows() {
        for (mi, &c) in q.row(a).iter().enumerate() {
            if c == 0 {
                continue;
            }
            for i in 0..n {
                m.add_to(t[mi * n + i], a * n + i, c);
            }
        }
    }
    m
}

/// Matrix of `V_{p-1} ⊗ V → V_{p-2} ⊗ S_2`, columns `b * n + i`,
/// rows `c * dim S_2 + monomial`.
fn strand_matrix(f: PrimeField, n: usize, phi_prev: &Matrix, dim_pp: usize) -> Matrix {
    let s2 = graded_dim(n, 2);
    let dim_prev = phi_prev.rows();
    let mut m = Matrix::zeros(f, dim_pp * s2, dim_prev * n);
    for b in 0..dim_prev {
        for (cj, &v) in phi_prev.row(b).iter().enumerate() {
            if v == 0 {
                continue;
            }
            let (c, j) = (cj / n, cj % n);
            for i in 0..n {
                m.add_to(c * s2 + quad_index(n, i, j), b * n + i, v);
            }
        }
    }
    m
}

/// Computes the linear strand up to `p_max`.
pub fn linear_strand(ideal: &QuadricIdeal, p_max: usize) -> Result<LinearStrand> {
    LinearStrand::compute(ideal, p_max)
}

/// Restricts a Koszul vector of `ideal` along `x_i = Σ_j sub[i][j] y_j`,
/// producing a Koszul vector over the restricted ideal's quadric basis.
pub fn restrict_koszul(
    ideal: &QuadricIdeal,
    restricted: &QuadricIdeal,
    sub: &Matrix,
    p: usize,
    koszul: &[u64],
) -> Result<Vec<u64>> {
    let qmap = quadric_restriction_map(ideal, restricted, sub)?;
    let wedge = wedge_power(sub, p);
    Ok(apply_restriction(&wedge, &qmap, koszul))
}

/// `dim V_0 x dim V_0'` matrix sending each quadric basis element to the
/// coordinates of its restriction.
fn quadric_restriction_map(
    ideal: &QuadricIdeal,
    restricted: &QuadricIdeal,
    sub: &Matrix,
) -> Result<Matrix> {
    let images = substitute_quadrics(ideal.basis_rows(), sub);
    let mut out = Matrix::zeros(ideal.field(), images.rows(), restricted.num_quadrics());
    for a in 0..images.rows() {
        let c = restricted
            .quadrics()
            .space()
            .coordinates(images.row(a))
            .ok_or_else(|| {
                Error::Internal("restricted quadric outside the restricted ideal".into())
            })?;
        out.row_mut(a).copy_from_slice(&c);
    }
    Ok(out)
}

fn apply_restriction(wedge: &Matrix, qmap: &Matrix, koszul: &[u64]) -> Vec<u64> {
    let f = wedge.field();
    let (d0, d0r) = (qmap.rows(), qmap.cols());
    let mut out = vec![0u64; wedge.cols() * d0r];
    for ii in 0..wedge.rows() {
        let coeffs = &koszul[ii * d0..(ii + 1) * d0];
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let q = qmap.left_apply(coeffs);
        for (jj, &w) in wedge.row(ii).iter().enumerate() {
            if w == 0 {
                continue;
            }
            for (b, &v) in q.iter().enumerate() {
                if v != 0 {
                    let idx = jj * d0r + b;
                    out[idx] = f.add(out[idx], f.mul(w, v));
                }
            }
        }
    }
    out
}

/// Restriction of a syzygy to the linear section given by `sub`.
pub fn restrict_syzygy(
    ideal: &QuadricIdeal,
    restricted: &QuadricIdeal,
    sub: &Matrix,
    s: &Syzygy,
) -> Result<Syzygy> {
    let k = restrict_koszul(ideal, restricted, sub, s.p, &s.koszul)?;
    Syzygy::from_koszul(restricted, s.p, k).map_err(|e| {
        Error::Internal(format!("restriction of a syzygy is not a syzygy: {e}"))
    })
}

/// The restriction map `α_p : V_p(X) → V_p(X ∩ P)` and its restricted strand.
#[derive(Clone, Debug)]
pub struct RestrictionMap {
    /// `dim V_p(restricted) x dim V_p(ambient)`.
    pub matrix: Matrix,
    pub injective: bool,
    pub restricted: LinearStrand,
}

pub fn restrict_syzygies(strand: &LinearStrand, sub: &Matrix, p: usize) -> Result<RestrictionMap> {
    strand.level(p)?;
    let ideal = strand.ideal();
    check_substitution(sub, ideal.n_vars())?;
    let restricted_ideal = ideal.restrict_to_subspace(sub)?;
    let restricted = LinearStrand::compute(&restricted_ideal, p)?;
    let f = ideal.field();
    let qmap = quadric_restriction_map(ideal, &restricted_ideal, sub)?;
    let wedge = wedge_power(sub, p);
    let src = strand.koszul_basis(p);
    let target_dim = restricted.dim(p);
    let rows = wedge.cols() * restricted_ideal.num_quadrics();
    let mut images = Matrix::zeros(f, rows, src.rows());
    for t in 0..src.rows() {
        let img = apply_restriction(&wedge, &qmap, src.row(t));
        for (r, &v) in img.iter().enumerate() {
            images.set(r, t, v);
        }
    }
    let matrix = if target_dim == 0 || p > restricted.top() {
        if !images.is_zero() {
            return Err(Error::Internal(
                "restricted syzygies are nonzero but the restricted strand vanishes".into(),
            ));
        }
        Matrix::zeros(f, 0, src.rows())
    } else {
        restricted
            .koszul_basis(p)
            .transpose()
            .solve(&images)
            .map_err(|_| {
                Error::Internal("restricted syzygy outside the restricted strand".into())
            })?
    };
    let injective = matrix.rank() == src.rows();
    Ok(RestrictionMap {
        matrix,
        injective,
        restricted,
    })
}

/// Ranks before and after a hyperplane section.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankDrop {
    pub old_rank: usize,
    pub new_rank: usize,
    pub hyperplane_in_ls: bool,
}

/// Compares `rank s` with the rank of its restriction to the hyperplane
/// `{x = sub · y}`, whose equation `l` spans the left kernel of `sub`.
pub fn rank_drop_check(ideal: &QuadricIdeal, s: &Syzygy, sub: &Matrix) -> Result<RankDrop> {
    let n = ideal.n_vars();
    check_substitution(sub, n)?;
    if sub.cols() + 1 != n {
        return Err(Error::InvalidInput(format!(
            "a hyperplane section needs {} new variables, got {}",
            n - 1,
            sub.cols()
        )));
    }
    let old = syzygy_rank(ideal, s);
    let (_, l) = sub.transpose().rank_kernel();
    let in_ls = old.forms.space.contains(l.row(0));
    let restricted = ideal.restrict_to_subspace(sub)?;
    let rs = restrict_syzygy(ideal, &restricted, sub, s)?;
    let new = syzygy_rank(&restricted, &rs);
    Ok(RankDrop {
        old_rank: old.rank,
        new_rank: new.rank,
        hyperplane_in_ls: in_ls,
    })
}

/// Result of a determinantal rank-locus probe.
#[derive(Clone, Debug, Serialize)]
pub struct RankLocusReport {
    pub p: usize,
    pub r: usize,
    pub psi_shape: (usize, usize),
    pub minors: usize,
    pub minor_span: usize,
    pub hilbert: HilbertReport,
}

/// The ideal of `(r+1)`-minors of `ψ`, the `n x dim V_{p-1}` matrix of linear
/// forms on `P(V_p^*)` with entries `ψ[i][b] = Σ_t z_t φ_p[t][b n + i]`,
/// followed by a Hilbert probe.
///
/// For `p = 0`, `ψ` is the symmetric `n x n` Hessian of the generic quadric
/// `Σ_t z_t Q_t` of `I_2`, so the locus is the set of quadrics in the ideal of
/// rank at most `r` (odd characteristic only).
pub fn rank_locus_probe(
    strand: &LinearStrand,
    p: usize,
    r: usize,
    d_max: usize,
    budget: u128,
) -> Result<RankLocusReport> {
    strand.level(p)?;
    let f = strand.field();
    if p == 0 && f.p() == 2 {
        return Err(Error::InvalidInput("quadric ranks need odd characteristic".into()));
    }
    let n = strand.n_vars();
    let nz = strand.dim(p);
    let cols = if p == 0 { n } else { strand.dim(p - 1) };
    if nz == 0 {
        return Err(Error::InvalidInput(format!("V_{p} is zero")));
    }
    let k = r + 1;
    if k > n.min(cols) {
        return Err(Error::InvalidInput(format!(
            "r = {r} is not below the size of the {n}x{cols} matrix ψ"
        )));
    }
    let minors = binomial(n, k) as u128 * binomial(cols, k) as u128;
    let gdim = graded_dim(nz, k) as u128;
    if minors.saturating_mul(gdim) > budget {
        return Err(Error::BudgetExceeded {
            minors,
            graded_dim: gdim,
            budget,
        });
    }
    // ψ entries as linear forms in z (dense over S_1 = z coordinates)
    let entries: Vec<Vec<Vec<u64>>> = if p == 0 {
        let quads: Vec<Vec<u64>> = (0..nz)
            .map(|t| {
                let coords = strand.koszul_basis(0).row(t);
                strand.ideal().basis_rows().left_apply(coords)
            })
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        quads
                            .iter()
                            .map(|q| {
                                let c = q[quad_index(n, i, j)];
                                if i == j { f.mul(2, c) } else { c }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    } else {
        let phi = strand.phi(p);
        (0..n)
            .map(|i| (0..cols).map(|b| (0..nz).map(|t| phi.get(t, b * n + i)).collect()).collect())
            .collect()
    };
    let entry = |i: usize, b: usize| -> Vec<u64> { entries[i][b].clone() };
    let bases: Vec<MonomialBasis> = (0..=k).map(|d| MonomialBasis::new(nz, d)).collect();
    let tables: Vec<Vec<usize>> = (0..k).map(|d| bases[d].var_mult_table(&bases[d + 1])).collect();
    let col_sets: Vec<WedgeBasis> = (0..=k).map(|d| WedgeBasis::new(cols, d)).collect();
    let mut rows_out: Vec<Vec<u64>> = Vec::new();
    let row_sets = WedgeBasis::new(n, k);
    for rs in row_sets.subsets() {
        // dets[T] for T in col_sets[d]: minor on rows rs[..d] x T
        let mut dets: Vec<Vec<u64>> = vec![vec![1]];
        for d in 0..k {
            let row = rs[d];
            let lin: Vec<Vec<u64>> = (0..cols).map(|b| entry(row, b)).collect();
            let dst = &col_sets[d + 1];
            let src = &col_sets[d];
            let mut next: Vec<Vec<u64>> = Vec::with_capacity(dst.len());
            let mut rest = Vec::with_capacity(d + 1);
            for set in dst.subsets() {
                let mut acc = vec![0u64; bases[d + 1].len()];
                for (pos, &c) in set.iter().enumerate() {
                    rest.clear();
                    rest.extend(set.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &x)| x));
                    let sub_det = &dets[src.index_of(&rest).expect("subset")];
                    let sign = (d + pos) % 2 == 0;
                    for (mi, &a) in sub_det.iter().enumerate() {
                        if a == 0 {
                            continue;
                        }
                        for (t, &l) in lin[c].iter().enumerate() {
                            if l == 0 {
                                continue;
                            }
                            let idx = tables[d][mi * nz + t];
                            let v = f.mul(a, l);
                            acc[idx] = if sign { f.add(acc[idx], v) } else { f.sub(acc[idx], v) };
                        }
                    }
                }
                next.push(acc);
            }
            dets = next;
        }
        for m in dets {
            if m.iter().any(|&x| x != 0) {
                rows_out.push(m);
            }
        }
    }
    let m = Matrix::from_rows(f, bases[k].len(), &rows_out);
    let gens = GradedSubspace::from_rows(nz, k, &m);
    Ok(RankLocusReport {
        p,
        r,
        psi_shape: (n, cols),
        minors: minors as usize,
        minor_span: gens.dim(),
        hilbert: hilbert_probe(&gens, d_max),
    })
}

/// Serialized syzygy, referencing its ideal by hash.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SyzygyJson {
    pub p: usize,
    pub coeffs: Vec<i64>,
    pub basis: String,
    pub ideal_hash: String,
}

pub const SYZYGY_BASIS_LABEL: &str = "wedge×quadric canonical";

pub fn syzygy_to_json(ideal: &QuadricIdeal, s: &Syzygy) -> SyzygyJson {
    let f = ideal.field();
    SyzygyJson {
        p: s.p,
        coeffs: s.koszul.iter().map(|&c| f.to_signed(c)).collect(),
        basis: SYZYGY_BASIS_LABEL.to_string(),
        ideal_hash: crate::ideal_io::ideal_hash(ideal),
    }
}

pub fn syzygy_from_json(ideal: &QuadricIdeal, j: &SyzygyJson) -> Result<Syzygy> {
    if j.basis != SYZYGY_BASIS_LABEL {
        return Err(Error::Parse(format!("unknown syzygy basis '{}'", j.basis)));
    }
    if j.ideal_hash != crate::ideal_io::ideal_hash(ideal) {
        return Err(Error::InvalidInput(
            "syzygy was computed for a different ideal (hash mismatch)".into(),
        ));
    }
    let f = ideal.field();
    Syzygy::from_koszul(ideal, j.p, j.coeffs.iter().map(|&c| f.from_i64(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Poly;

    fn f101() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn two_planes() -> QuadricIdeal {
        let f = f101();
        let x = |i| Poly::var(4, i);
        QuadricIdeal::from_polys(f, 4, &[x(0).mul(f, &x(1)), x(0).mul(f, &x(2))]).unwrap()
    }

    #[test]
    fn single_monomial_has_no_linear_syzygy() {
        let f = f101();
        let q = Poly::var(2, 0).mul(f, &Poly::var(2, 1));
        let ideal = QuadricIdeal::from_polys(f, 2, &[q]).unwrap();
        let s = linear_strand(&ideal, 3).unwrap();
        assert_eq!(s.dims(), &[1, 0]);
    }

    #[test]
    fn two_planes_syzygy() {
        let ideal = two_planes();
        let strand = linear_strand(&ideal, 2).unwrap();
        assert_eq!(strand.dims(), &[2, 1, 0]);
        let s = strand.syzygy(1, &[1]).unwrap();
        let info = syzygy_rank(&ideal, &s);
        assert_eq!(info.rank, 2);
        // L_s = <x1, x2>
        let f = f101();
        let expect = Subspace::span(&Matrix::from_i64_rows(f, 4, &[vec![0, 1, 0, 0], vec![0, 0, 1, 0]]));
        assert_eq!(info.forms.space, expect);
        let scheme = syzygy_scheme_ideal(&ideal, &s).unwrap();
        assert_eq!(scheme.space(), ideal.quadrics().space());
        assert_eq!(strand.phi_rank(1, &[1]).unwrap().space, expect);
    }

    #[test]
    fn zero_syzygy_has_rank_zero() {
        let ideal = two_planes();
        let strand = linear_strand(&ideal, 1).unwrap();
        let s = strand.syzygy(1, &[0]).unwrap();
        assert_eq!(syzygy_rank(&ideal, &s).rank, 0);
        assert!(syzygy_scheme_ideal(&ideal, &s).is_err());
    }

    #[test]
    fn quadric_rank_convention() {
        let f = f101();
        let x = |i| Poly::var(4, i);
        let q = x(0).mul(f, &x(1)).add(f, &x(2).mul(f, &x(3)));
        let ideal = QuadricIdeal::from_polys(f, 4, &[q]).unwrap();
        let strand = linear_strand(&ideal, 0).unwrap();
        let s = strand.syzygy(0, &[1]).unwrap();
        let info = syzygy_rank(&ideal, &s);
        assert!(info.quadric_rank_convention);
        assert_eq!(info.rank, 4);
    }

    #[test]
    fn non_cycle_is_rejected() {
        let ideal = two_planes();
        let n = 4;
        let mut v = vec![0u64; n * 2];
        v[0] = 1; // e_0 ⊗ x0x1
        assert!(matches!(Syzygy::from_koszul(&ideal, 1, v), Err(Error::NotASyzygy(_))));
    }

    #[test]
    fn identity_restriction() {
        let ideal = two_planes();
        let strand = linear_strand(&ideal, 1).unwrap();
        let id = Matrix::identity(f101(), 4);
        let r = restrict_syzygies(&strand, &id, 1).unwrap();
        assert_eq!(r.matrix, Matrix::identity(f101(), 1));
        assert!(r.injective);
    }

    #[test]
    fn syzygy_json_round_trip() {
        let ideal = two_planes();
        let strand = linear_strand(&ideal, 1).unwrap();
        let s = strand.syzygy(1, &[3]).unwrap();
        let j = syzygy_to_json(&ideal, &s);
        assert_eq!(syzygy_from_json(&ideal, &j).unwrap(), s);
        assert_eq!(strand.coordinates(&s).unwrap(), vec![3]);
    }
}
