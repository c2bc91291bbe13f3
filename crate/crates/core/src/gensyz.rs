//! Generic syzygy schemes `Gensyz_p(L)` for `dim L = r`, the generic syzygy
//! `s_gen`, point classification in the Grassmannian regime and the lifting
//! of a syzygy to a linear map `π^*: L_s ⊕ Λ^{r-p-1} L_s → V`.
//!
//! Model coordinates are `l_0 .. l_{r-1}` followed by `a_J` for the
//! `(r-p-1)`-subsets `J` of `0..r` in lexicographic order. The equations are
//! `Q_K = Σ_k (-1)^k l_{K_k} a_{K \ K_k}` for the `(r-p)`-subsets `K`, and
//! `s_gen = Σ_I ε(I, I^c) e_I ⊗ Q_{I^c}` with `e_I ∧ e_{I^c} = ε(I, I^c) e_{0..r}`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField};
use crate::exterior::{complement, shuffle_sign, signed, subsets, wedge_power, WedgeBasis};
use crate::polyring::{binomial, graded_dim, quad_index, substitute_quadrics, QuadricIdeal};
use crate::syzygy::{syzygy_rank, Syzygy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `r = p + 1`: a hyperplane union a point.
    Reducible,
    /// `r = p + 2`: the Segre variety `P^1 x P^{p+1}`.
    Scrollar,
    /// `r = p + 3`: `Gr(p+4, 2)` union a linear space.
    Grassmannian,
    General,
}

impl Regime {
    pub fn of(p: usize, r: usize) -> Regime {
        match r - p {
            1 => Regime::Reducible,
            2 => Regime::Scrollar,
            3 => Regime::Grassmannian,
            _ => Regime::General,
        }
    }
}

/// Structural description of the equations in the special regimes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// Variable indices of a `2 x (p+2)` matrix whose 2x2 minors are the equations.
    Scroll { rows: [Vec<usize>; 2] },
    /// Upper-triangular variable indices of a `(p+4) x (p+4)` skew matrix;
    /// the equations are its 4x4 Pfaffians through the first row.
    Skew { size: usize, entries: Vec<(usize, usize, usize)> },
}

#[derive(Clone, Debug)]
pub struct GensyzModel {
    pub p: usize,
    pub r: usize,
    pub regime: Regime,
    /// Dense quadrics `Q_K`, in lexicographic order of `K`.
    pub equations: Matrix,
    pub ideal: QuadricIdeal,
    pub witness: Option<Witness>,
}

impl GensyzModel {
    pub fn n_vars(&self) -> usize {
        self.r + binomial(self.r, self.r - self.p - 1)
    }

    /// Index of `a_J` among the model variables.
    pub fn a_index(&self, j: &[usize]) -> usize {
        self.r
            + WedgeBasis::new(self.r, self.r - self.p - 1)
                .index_of(j)
                .expect("(r-p-1)-subset")
    }

    /// Quadrics generated by the witness (minors or Pfaffians).
    pub fn witness_quadrics(&self) -> Option<Matrix> {
        let f = self.equations.field();
        let n = self.n_vars();
        let rows: Vec<Vec<u64>> = match self.witness.as_ref()? {
            Witness::Scroll { rows } => {
                let mut out = Vec::new();
                for c in subsets(rows[0].len(), 2) {
                    let mut q = vec![0u64; graded_dim(n, 2)];
                    let (i, j) = (c[0], c[1]);
                    let t = quad_index(n, rows[0][i], rows[1][j]);
                    q[t] = f.add(q[t], 1);
                    let t = quad_index(n, rows[0][j], rows[1][i]);
                    q[t] = f.sub(q[t], 1);
                    out.push(q);
                }
                out
            }
            Witness::Skew { size, entries } => {
                let var = |a: usize, b: usize| {
                    entries
                        .iter()
                        .find(|&&(x, y, _)| x == a && y == b)
                        .map(|&(_, _, v)| v)
                        .expect("entry")
                };
                subsets(*size, 4)
                    .into_iter()
                    .filter(|k| k[0] == 0)
                    .map(|k| pfaffian_quadric(f, n, &k, &var))
                    .collect()
            }
        };
        Some(Matrix::from_rows(f, graded_dim(n, 2), &rows))
    }
}

/// `u_ab u_cd - u_ac u_bd + u_ad u_bc` for sorted `k = (a, b, c, d)` with
/// `var(i, j)` the variable of entry `(i, j)`, `i < j`.
pub(crate) fn pfaffian_quadric(
    f: PrimeField,
    n_vars: usize,
    k: &[usize],
    var: &dyn Fn(usize, usize) -> usize,
) -> Vec<u64> {
    let (a, b, c, d) = (k[0], k[1], k[2], k[3]);
    let mut q = vec![0u64; graded_dim(n_vars, 2)];
    for (x, y, sign) in [((a, b), (c, d), 1i64), ((a, c), (b, d), -1), ((a, d), (b, c), 1)] {
        let t = quad_index(n_vars, var(x.0, x.1), var(y.0, y.1));
        q[t] = f.add(q[t], f.from_i64(sign));
    }
    q
}

/// The equations of `Gensyz_p(L)` for `dim L = r`.
pub fn gensyz_equations(field: PrimeField, p: usize, r: usize) -> Result<GensyzModel> {
    if r < p + 1 {
        return Err(Error::InvalidInput(format!("need r >= p + 1, got p = {p}, r = {r}")));
    }
    let m = r - p - 1;
    let a_basis = WedgeBasis::new(r, m);
    let n = r + a_basis.len();
    let ks = subsets(r, r - p);
    let mut eq = Matrix::zeros(field, ks.len(), graded_dim(n, 2));
    let mut rest = Vec::with_capacity(r - p);
    for (row, k) in ks.iter().enumerate() {
        for t in 0..k.len() {
            rest.clear();
            rest.extend(k.iter().enumerate().filter(|&(q, _)| q != t).map(|(_, &x)| x));
            let a = r + a_basis.index_of(&rest).expect("subset");
            let sign = if t % 2 == 0 { 1 } else { -1 };
            eq.add_to(row, quad_index(n, k[t], a), signed(field, sign, 1));
        }
    }
    let regime = Regime::of(p, r);
    let witness = match regime {
        Regime::Scrollar => Some(Witness::Scroll {
            rows: [(0..r).collect(), (0..r).map(|i| r + i).collect()],
        }),
        Regime::Grassmannian => {
            let mut entries = Vec::new();
            for k in 0..r {
                entries.push((0, k + 1, k));
            }
            for (idx, j) in a_basis.subsets().iter().enumerate() {
                entries.push((j[0] + 1, j[1] + 1, r + idx));
            }
            Some(Witness::Skew {
                size: r + 1,
                entries,
            })
        }
        _ => None,
    };
    let ideal = QuadricIdeal::from_rows(n, &eq);
    if ideal.num_quadrics() != ks.len() {
        return Err(Error::Internal("Gensyz equations are dependent".into()));
    }
    Ok(GensyzModel {
        p,
        r,
        regime,
        equations: eq,
        ideal,
        witness,
    })
}

/// `s_gen` as pairs `(I, ε(I, I^c) Q_{I^c})` over the `p`-subsets `I` of `0..r`.
pub fn generic_syzygy_parts(model: &GensyzModel) -> Vec<(Vec<usize>, Vec<u64>)> {
    let f = model.equations.field();
    let r = model.r;
    let ks = WedgeBasis::new(r, r - model.p);
    subsets(r, model.p)
        .into_iter()
        .map(|i| {
            let k = complement(r, &i);
            let sign = shuffle_sign(&i, &k);
            let row = model.equations.row(ks.index_of(&k).expect("subset"));
            let q = row.iter().map(|&v| signed(f, sign, v)).collect();
            (i, q)
        })
        .collect()
}

/// Koszul vector (over `ideal`'s quadric basis, in `n_vars` variables) of
/// `Σ_I e_{map(I)} ⊗ Q_I` where the `Q_I` are dense quadrics in the ideal and
/// `map` sends the wedge indices to variable indices preserving order.
pub(crate) fn koszul_from_parts(
    ideal: &QuadricIdeal,
    p: usize,
    parts: &[(Vec<usize>, Vec<u64>)],
) -> Result<Vec<u64>> {
    let n = ideal.n_vars();
    let dim0 = ideal.num_quadrics();
    let wb = WedgeBasis::new(n, p);
    let f = ideal.field();
    let mut out = vec![0u64; wb.len() * dim0];
    for (i, q) in parts {
        let ii = wb
            .index_of(i)
            .ok_or_else(|| Error::Internal("wedge index out of range".into()))?;
        let c = ideal
            .quadrics()
            .space()
            .coordinates(q)
            .ok_or_else(|| Error::Internal("quadric outside the ideal".into()))?;
        for (a, &v) in c.iter().enumerate() {
            let idx = ii * dim0 + a;
            out[idx] = f.add(out[idx], v);
        }
    }
    Ok(out)
}

/// The generic syzygy of the model, verified to be a Koszul cycle.
pub fn make_generic_syzygy(model: &GensyzModel) -> Result<Syzygy> {
    let parts = generic_syzygy_parts(model);
    let k = koszul_from_parts(&model.ideal, model.p, &parts)?;
    Syzygy::from_koszul(&model.ideal, model.p, k)
        .map_err(|e| Error::Internal(format!("s_gen failed the cycle check: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    OnLinearPart,
    OnGrassmannianPart,
    Both,
    Outside,
}

fn eval_quadric(f: PrimeField, n: usize, q: &[u64], x: &[u64]) -> u64 {
    let mut acc = 0;
    let mut t = 0;
    for i in 0..n {
        for j in i..n {
            if q[t] != 0 {
                acc = f.add(acc, f.mul(q[t], f.mul(x[i], x[j])));
            }
            t += 1;
        }
    }
    acc
}

/// Full skew matrix `[[0, l], [-l^T, A]]` at a point of the Grassmannian model.
fn skew_at(model: &GensyzModel, point: &[u64]) -> Matrix {
    let f = model.equations.field();
    let r = model.r;
    let mut m = Matrix::zeros(f, r + 1, r + 1);
    for k in 0..r {
        m.set(0, k + 1, point[k]);
        m.set(k + 1, 0, f.neg(point[k]));
    }
    for (idx, j) in subsets(r, 2).iter().enumerate() {
        let v = point[r + idx];
        m.set(j[0] + 1, j[1] + 1, v);
        m.set(j[1] + 1, j[0] + 1, f.neg(v));
    }
    m
}

/// Decides which component of `Gr ∪ P^{N-p-3}` a point lies on.
pub fn classify_point(model: &GensyzModel, point: &[u64]) -> Result<PointClass> {
    if model.regime != Regime::Grassmannian {
        return Err(Error::InvalidInput(
            "point classification needs the Grassmannian regime r = p + 3".into(),
        ));
    }
    let n = model.n_vars();
    if point.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, model has {n}",
            point.len()
        )));
    }
    let f = model.equations.field();
    if point.iter().all(|&x| x == 0) {
        return Err(Error::InvalidInput("the zero vector is not a point".into()));
    }
    for row in 0..model.equations.rows() {
        if eval_quadric(f, n, model.equations.row(row), point) != 0 {
            return Ok(PointClass::Outside);
        }
    }
    let rank = skew_at(model, point).rank();
    let l_zero = point[..model.r].iter().all(|&x| x == 0);
    Ok(match (l_zero, rank <= 2) {
        (true, true) => PointClass::Both,
        (true, false) => PointClass::OnLinearPart,
        (false, true) => PointClass::OnGrassmannianPart,
        // satisfies the equations but is in neither component
        (false, false) => PointClass::Outside,
    })
}

/// A random point on the model's zero set with `l ≠ 0`: a random `l`, then
/// a random solution of the (linear in `a`) equations.
pub fn random_solution_point<R: Rng + ?Sized>(model: &GensyzModel, rng: &mut R) -> Vec<u64> {
    let f = model.equations.field();
    let r = model.r;
    let n = model.n_vars();
    loop {
        let l: Vec<u64> = (0..r).map(|_| f.random(rng)).collect();
        if l.iter().all(|&x| x == 0) {
            continue;
        }
        // coefficient of a_j in Q_K at this l
        let na = n - r;
        let mut sys = Matrix::zeros(f, model.equations.rows(), na);
        for row in 0..model.equations.rows() {
            let q = model.equations.row(row);
            for k in 0..r {
                for a in 0..na {
                    let c = q[quad_index(n, k, r + a)];
                    if c != 0 {
                        sys.add_to(row, a, f.mul(c, l[k]));
                    }
                }
            }
        }
        let (_, ker) = sys.rank_kernel();
        let coeffs: Vec<u64> = (0..ker.rows()).map(|_| f.random(rng)).collect();
        let a = ker.left_apply(&coeffs);
        let mut point = l;
        point.extend(a);
        return point;
    }
}

/// The linear map `π^*` together with the checks performed on it.
#[derive(Clone, Debug)]
pub struct ProjectionMap {
    pub p: usize,
    pub r: usize,
    pub regime: Regime,
    /// Rows: model coordinates `l_0.., a_J..`; columns: coordinates of `V`.
    pub matrix: Matrix,
    /// Pullbacks `π^*(Q_K)` of the model equations (dense quadrics).
    pub pullbacks: Matrix,
    pub pullbacks_in_ideal: bool,
    pub nonzero_pullbacks: usize,
    /// Dimension of the space of lifts; equals `C(r, p+2)`.
    pub gauge_dim: usize,
    /// Grassmannian regime: all 4x4 Pfaffians of the full skew matrix pull
    /// back into the ideal.
    pub pfaffian_pullbacks_in_ideal: Option<bool>,
    /// Number of independent Pfaffian pullbacks (Grassmannian regime).
    pub pfaffian_pullback_rank: Option<usize>,
    /// `π^*` is surjective, i.e. `π` is a linear embedding.
    pub embedding: bool,
}

/// Finds `π^* = ι ⊕ α` with `s = π^*(s_gen)`.
///
/// `ι` is the inclusion of the echelon basis of `L_s`. Writing out
/// `π^*(s_gen) = Σ_I ε(I, I^c) e_I ⊗ Σ_k (-1)^k l_{K_k} α_{K \ K_k}` shows it is
/// linear in the unknown linear forms `α_J`, so the lift is one linear system.
/// Its solutions form a coset of a `C(r, p+2)`-dimensional space
/// (`α_J ↦ α_J + Σ_{j ∈ J} ± γ_{J∖j} l_j`), which leaves every pulled-back
/// equation unchanged; the canonical solution (free variables zero) is used.
pub fn lift_projection(ideal: &QuadricIdeal, s: &Syzygy) -> Result<ProjectionMap> {
    let f = ideal.field();
    let n = ideal.n_vars();
    let p = s.p();
    if p == 0 {
        return Err(Error::InvalidInput("lifting needs p >= 1".into()));
    }
    if s.is_zero() {
        return Err(Error::InvalidInput("cannot lift the zero syzygy".into()));
    }
    let info = syzygy_rank(ideal, s);
    let r = info.rank;
    if r < p + 1 {
        return Err(Error::Internal(format!(
            "a nonzero {p}-th syzygy of rank {r} < p + 1"
        )));
    }
    let b = info.forms.basis().clone();
    let model = gensyz_equations(f, p, r)?;
    let m = r - p - 1;
    let a_basis = WedgeBasis::new(r, m);
    let na = a_basis.len();
    let wedge = wedge_power(&b, p);
    let lam_v = WedgeBasis::new(n, p);
    let s2 = graded_dim(n, 2);

    // target: Λ^p V ⊗ S_2 coordinates of s
    let mut target = Matrix::zeros(f, lam_v.len() * s2, 1);
    for (i, q) in s.decomposition(ideal) {
        let ii = lam_v.index_of(&i).expect("subset");
        for (t, &v) in q.iter().enumerate() {
            target.set(ii * s2 + t, 0, v);
        }
    }

    let mut sys = Matrix::zeros(f, lam_v.len() * s2, na * n);
    let mut rest = Vec::with_capacity(r - p);
    for (il, i) in subsets(r, p).iter().enumerate() {
        let k = complement(r, i);
        let eps = shuffle_sign(i, &k);
        for t in 0..k.len() {
            rest.clear();
            rest.extend(k.iter().enumerate().filter(|&(q, _)| q != t).map(|(_, &x)| x));
            let j = a_basis.index_of(&rest).expect("subset");
            let sign = if t % 2 == 0 { eps } else { -eps };
            let lrow = b.row(k[t]);
            for (iv, &w) in wedge.row(il).iter().enumerate() {
                if w == 0 {
                    continue;
                }
                let ws = signed(f, sign, w);
                for (u, &lu) in lrow.iter().enumerate() {
                    if lu == 0 {
                        continue;
                    }
                    let c = f.mul(ws, lu);
                    for v in 0..n {
                        sys.add_to(iv * s2 + quad_index(n, u, v), j * n + v, c);
                    }
                }
            }
        }
    }
    let alpha = sys.solve(&target).map_err(|_| {
        Error::NotASyzygy("no linear map pulls the generic syzygy back to it".into())
    })?;
    let (_, ker) = sys.rank_kernel();
    let gauge_dim = ker.rows();
    let expected_gauge = binomial(r, p + 2);
    if gauge_dim != expected_gauge {
        return Err(Error::Internal(format!(
            "space of lifts has dimension {gauge_dim}, expected {expected_gauge}"
        )));
    }

    let mut matrix = Matrix::zeros(f, r + na, n);
    for k in 0..r {
        matrix.row_mut(k).copy_from_slice(b.row(k));
    }
    for j in 0..na {
        for v in 0..n {
            matrix.set(r + j, v, alpha.get(j * n + v, 0));
        }
    }

    // π^*(s_gen) must reproduce s exactly
    let pullbacks = substitute_quadrics(&model.equations, &matrix);
    let mut check = vec![0u64; lam_v.len() * s2];
    let ks = WedgeBasis::new(r, r - p);
    for (il, i) in subsets(r, p).iter().enumerate() {
        let k = complement(r, i);
        let eps = shuffle_sign(i, &k);
        let q = pullbacks.row(ks.index_of(&k).expect("subset"));
        for (iv, &w) in wedge.row(il).iter().enumerate() {
            if w == 0 {
                continue;
            }
            let ws = signed(f, eps, w);
            for (t, &v) in q.iter().enumerate() {
                if v != 0 {
                    let idx = iv * s2 + t;
                    check[idx] = f.add(check[idx], f.mul(ws, v));
                }
            }
        }
    }
    if check != target.data() {
        return Err(Error::Internal("π^*(s_gen) differs from s".into()));
    }

    let pullbacks_in_ideal = (0..pullbacks.rows()).all(|i| ideal.contains_quadric(pullbacks.row(i)));
    let nonzero_pullbacks = (0..pullbacks.rows())
        .filter(|&i| pullbacks.row(i).iter().any(|&x| x != 0))
        .count();
    let (pf_in, pf_rank) = if model.regime == Regime::Grassmannian {
        let all = full_pfaffians(&model);
        let pulled = substitute_quadrics(&all, &matrix);
        let inside = (0..pulled.rows()).all(|i| ideal.contains_quadric(pulled.row(i)));
        (Some(inside), Some(pulled.rank()))
    } else {
        (None, None)
    };
    let embedding = matrix.rank() == n;
    Ok(ProjectionMap {
        p,
        r,
        regime: model.regime,
        matrix,
        pullbacks,
        pullbacks_in_ideal,
        nonzero_pullbacks,
        gauge_dim,
        pfaffian_pullbacks_in_ideal: pf_in,
        pfaffian_pullback_rank: pf_rank,
        embedding,
    })
}

/// All `C(r+1, 4)` Pfaffians of the model's skew matrix (Grassmannian regime).
pub fn full_pfaffians(model: &GensyzModel) -> Matrix {
    let f = model.equations.field();
    let n = model.n_vars();
    let r = model.r;
    let a_basis = WedgeBasis::new(r, 2);
    let var = |i: usize, j: usize| {
        if i == 0 {
            j - 1
        } else {
            r + a_basis.index_of(&[i - 1, j - 1]).expect("pair")
        }
    };
    let rows: Vec<Vec<u64>> = subsets(r + 1, 4)
        .iter()
        .map(|k| pfaffian_quadric(f, n, k, &var))
        .collect();
    Matrix::from_rows(f, graded_dim(n, 2), &rows)
}
