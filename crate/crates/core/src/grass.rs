//! Plücker/Pfaffian geometry of `Gr(n, 2)`: Pfaffian quadrics, generalized
//! Pfaffians, minimal-rank syzygies, Mukai-type linear sections and the
//! intersection of the dual Grassmannian with orthogonal spaces.
//!
//! Plücker coordinates `u_ij` (`i < j`) are ordered lexicographically, which
//! matches the wedge basis of `Λ^2 U`. With this order the first row
//! `u_01 .. u_0(n-1)` followed by the remaining pairs coincides with the
//! coordinates of the Grassmannian generic syzygy model for `p = n - 4`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, PrimeField, Subspace};
use crate::exterior::{sort_sign, subsets, WedgeBasis};
use crate::gensyz::{generic_syzygy_parts, gensyz_equations, koszul_from_parts, pfaffian_quadric};
use crate::polyring::{binomial, graded_dim, hilbert_probe, HilbertReport, QuadricIdeal};
use crate::syzygy::{restrict_koszul, Syzygy};

/// Index map of the skew Plücker matrix `M_U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewPlueckerMatrix {
    n: usize,
    pairs: WedgeBasis,
}

impl SkewPlueckerMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            pairs: WedgeBasis::new(n, 2),
        }
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn n_coords(&self) -> usize {
        self.pairs.len()
    }
    /// Variable index of `u_ij` for `i < j`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        assert!(i < j && j < self.n);
        self.pairs.index_of(&[i, j]).expect("pair")
    }
    /// Names `u12, u13, ...` (1-based, separated by `_` beyond 9).
    pub fn names(&self) -> Vec<String> {
        self.pairs
            .subsets()
            .iter()
            .map(|s| {
                if self.n <= 9 {
                    format!("u{}{}", s[0] + 1, s[1] + 1)
                } else {
                    format!("u{}_{}", s[0] + 1, s[1] + 1)
                }
            })
            .collect()
    }
}

/// The Pfaffian `u_ab u_cd - u_ac u_bd + u_ad u_bc` of rows/columns `rows`
/// (0-based, any order) as a dense quadric in the Plücker coordinates.
pub fn pfaffian4(field: PrimeField, m: &SkewPlueckerMatrix, rows: [usize; 4]) -> Result<Vec<u64>> {
    if sort_sign(&rows).is_none() {
        return Err(Error::InvalidInput(format!("repeated index in {rows:?}")));
    }
    if rows.iter().any(|&x| x >= m.n()) {
        return Err(Error::InvalidInput(format!("index out of range in {rows:?}")));
    }
    let mut k = rows;
    k.sort_unstable();
    Ok(pfaffian_quadric(field, m.n_coords(), &k, &|i, j| m.index(i, j)))
}

/// All Pfaffian generators, one row per 4-subset in lexicographic order.
pub fn pfaffian_rows(field: PrimeField, n: usize) -> Matrix {
    let m = SkewPlueckerMatrix::new(n);
    let rows: Vec<Vec<u64>> = subsets(n, 4)
        .iter()
        .map(|k| pfaffian4(field, &m, [k[0], k[1], k[2], k[3]]).expect("distinct"))
        .collect();
    Matrix::from_rows(field, graded_dim(m.n_coords(), 2), &rows)
}

/// The Plücker ideal of `Gr(n, 2)`, generated by the `C(n, 4)` Pfaffians.
pub fn pluecker_ideal(field: PrimeField, n: usize) -> Result<QuadricIdeal> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("need n >= 4, got {n}")));
    }
    let rows = pfaffian_rows(field, n);
    let ideal = QuadricIdeal::from_rows(SkewPlueckerMatrix::new(n).n_coords(), &rows);
    if ideal.num_quadrics() != binomial(n, 4) {
        return Err(Error::Internal("Pfaffians are dependent".into()));
    }
    ideal.with_variables(SkewPlueckerMatrix::new(n).names())
}

/// Plücker coordinates of `a ∧ b`.
pub fn pluecker_point(field: PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    subsets(n, 2)
        .iter()
        .map(|s| field.sub(field.mul(a[s[0]], b[s[1]]), field.mul(a[s[1]], b[s[0]])))
        .collect()
}

/// Plücker coordinates of `u ∧ e_j` for every `j`, as rows spanning `u ∧ U`.
pub fn wedge_with_u(field: PrimeField, u: &[u64]) -> Matrix {
    let n = u.len();
    let rows: Vec<Vec<u64>> = (0..n)
        .map(|j| {
            let mut e = vec![0u64; n];
            e[j] = 1;
            pluecker_point(field, u, &e)
        })
        .collect();
    Matrix::from_rows(field, binomial(n, 2), &rows)
}

/// Whether `q` (a dense quadric in the Pfaffian span) is a generalized
/// Pfaffian, i.e. corresponds to a decomposable `ω ∈ Λ^4 U`. Decomposability
/// is tested by the rank of the contraction `U^* → Λ^3 U`, `ξ ↦ ξ ⌟ ω`,
/// which is 4 exactly for nonzero decomposable `ω`.
pub fn is_generalized_pfaffian(field: PrimeField, q: &[u64], n: usize) -> Result<bool> {
    let rows = pfaffian_rows(field, n);
    if q.len() != rows.cols() {
        return Err(Error::DimensionMismatch(format!(
            "quadric has {} coefficients, expected {}",
            q.len(),
            rows.cols()
        )));
    }
    let b = Matrix::from_vec(field, q.len(), 1, q.to_vec());
    let omega = rows
        .transpose()
        .solve(&b)
        .map_err(|_| Error::InvalidInput("quadric is not in the Pfaffian span".into()))?;
    let omega = omega.data();
    if omega.iter().all(|&x| x == 0) {
        return Ok(false);
    }
    let four = WedgeBasis::new(n, 4);
    let three = WedgeBasis::new(n, 3);
    let mut contraction = Matrix::zeros(field, n, three.len());
    for (kk, k) in four.subsets().iter().enumerate() {
        let w = omega[kk];
        if w == 0 {
            continue;
        }
        for (pos, &i) in k.iter().enumerate() {
            let rest: Vec<usize> = k.iter().copied().filter(|&x| x != i).collect();
            let v = if pos % 2 == 0 { w } else { field.neg(w) };
            contraction.set(i, three.index_of(&rest).expect("subset"), v);
        }
    }
    Ok(contraction.rank() <= 4)
}

/// Matrix of `Λ^2 g` acting on Plücker coordinates, as a substitution
/// `u_ab ↦ Σ_cd sub[ab][cd] u_cd` with `sub[ab][cd] = g_ca g_db - g_da g_cb`.
fn wedge2_substitution(g: &Matrix) -> Matrix {
    let f = g.field();
    let n = g.rows();
    let pairs = subsets(n, 2);
    let mut sub = Matrix::zeros(f, pairs.len(), pairs.len());
    for (x, ab) in pairs.iter().enumerate() {
        for (y, cd) in pairs.iter().enumerate() {
            let (a, b, c, d) = (ab[0], ab[1], cd[0], cd[1]);
            let v = f.sub(f.mul(g.get(c, a), g.get(d, b)), f.mul(g.get(d, a), g.get(c, b)));
            sub.set(x, y, v);
        }
    }
    sub
}

/// The minimal-rank `(n-4)`-th syzygy of `Gr(n, 2)` attached to `u ∈ U`.
///
/// For `u = e_0` this is the generic syzygy of the Grassmannian model in
/// Plücker coordinates; its involved quadrics are the Pfaffians through the
/// first row. General `u` is reached by transporting along `g = [u, e_j..]`
/// and dividing by `det g`, which makes the coordinates homogeneous of degree
/// `n - 4` in `u`.
pub fn minimal_syzygy(ideal: &QuadricIdeal, n: usize, u: &[u64]) -> Result<Syzygy> {
    let f = ideal.field();
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!("u has length {}, expected {n}", u.len())));
    }
    if ideal.n_vars() != binomial(n, 2) {
        return Err(Error::DimensionMismatch("ideal is not a Plücker ideal of this size".into()));
    }
    let Some(m) = u.iter().position(|&x| x != 0) else {
        return Err(Error::InvalidInput("u must be nonzero".into()));
    };
    let p = n - 4;
    let model = gensyz_equations(f, p, n - 1)?;
    let parts = generic_syzygy_parts(&model);
    let base = koszul_from_parts(ideal, p, &parts)?;
    // g: first column u, then e_j for j != m
    let mut g = Matrix::zeros(f, n, n);
    for (i, &v) in u.iter().enumerate() {
        g.set(i, 0, v);
    }
    let mut col = 1;
    for j in (0..n).filter(|&j| j != m) {
        g.set(j, col, 1);
        col += 1;
    }
    let det = g.det();
    let sub = wedge2_substitution(&g);
    let moved = restrict_koszul(ideal, ideal, &sub, p, &base)?;
    let inv = f.inv(det);
    let scaled = moved.iter().map(|&x| f.mul(x, inv)).collect();
    Syzygy::from_koszul(ideal, p, scaled)
        .map_err(|e| Error::Internal(format!("transported syzygy failed the cycle check: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionKind {
    K3,
    Curve,
}

impl std::str::FromStr for SectionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k3" => Ok(SectionKind::K3),
            "curve" => Ok(SectionKind::Curve),
            _ => Err(Error::Parse(format!("unknown section kind '{s}' (k3 or curve)"))),
        }
    }
}

/// A K3 surface or canonical curve of genus `2k` cut from `Gr(k+2, 2)`.
#[derive(Clone, Debug)]
pub struct MukaiSection {
    pub k: usize,
    pub kind: SectionKind,
    pub ambient: QuadricIdeal,
    /// Plücker coordinates in terms of the section's coordinates.
    pub substitution: Matrix,
    /// Extra quadric (k = 3 only), in the section's coordinates.
    pub extra_quadrics: Option<Matrix>,
    pub result: QuadricIdeal,
    pub seed: u64,
    /// Seed offset that produced a nondegenerate section.
    pub attempt: u64,
    pub cubic_dim: usize,
}

pub const MUKAI_MAX_ATTEMPTS: u64 = 8;

/// Expected `(number of quadrics, dim I_3)` of the section.
pub fn expected_section_dims(k: usize, kind: SectionKind) -> (usize, usize) {
    match (k, kind) {
        // dim S_3 - h^0(O(3)): curve 56 - 25, K3 84 - 47
        (3, SectionKind::Curve) => (6, 31),
        (3, SectionKind::K3) => (6, 37),
        // curve 120 - 35, K3 165 - 65
        (4, SectionKind::Curve) => (15, 85),
        (4, SectionKind::K3) => (15, 100),
        _ => unreachable!("k is 3 or 4"),
    }
}

/// Builds the section with seeded randomness. The K3 is a random linear
/// section of the Grassmannian (plus a random quadric when `k = 3`, where
/// the linear section is a threefold); the curve is a random hyperplane
/// section of that K3. Degenerate draws are retried with `seed + attempt`.
pub fn mukai_section(field: PrimeField, k: usize, kind: SectionKind, seed: u64) -> Result<MukaiSection> {
    if !(3..=4).contains(&k) {
        return Err(Error::InvalidInput(format!("k must be 3 or 4, got {k}")));
    }
    let n = k + 2;
    let ambient = pluecker_ideal(field, n)?;
    let npl = binomial(n, 2);
    let g = 2 * k;
    let (want_q, want_c) = expected_section_dims(k, kind);
    let mut last_reason = String::new();
    for attempt in 0..MUKAI_MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        // K3 spans P^g
        let s_k3 = Matrix::random(field, npl, g + 1, &mut rng);
        let extra_k3 = (k == 3).then(|| Matrix::random(field, 1, graded_dim(g + 1, 2), &mut rng));
        let hyper = Matrix::random(field, g + 1, g, &mut rng);
        let (sub, extra) = match kind {
            SectionKind::K3 => (s_k3, extra_k3),
            SectionKind::Curve => {
                let extra = extra_k3.map(|q| crate::polyring::substitute_quadrics(&q, &hyper));
                (s_k3.mul(&hyper), extra)
            }
        };
        if sub.rank() != sub.cols() {
            last_reason = "substitution is rank deficient".into();
            continue;
        }
        let mut result = ambient.restrict_to_subspace(&sub)?;
        if let Some(q) = &extra {
            result = result.extend(q);
        }
        if result.num_quadrics() != want_q {
            last_reason = format!("{} quadrics instead of {want_q}", result.num_quadrics());
            continue;
        }
        let cubic_dim = result.degree_piece(3).dim();
        if cubic_dim != want_c {
            last_reason = format!("dim I_3 = {cubic_dim} instead of {want_c}");
            continue;
        }
        return Ok(MukaiSection {
            k,
            kind,
            ambient,
            substitution: sub,
            extra_quadrics: extra,
            result,
            seed,
            attempt,
            cubic_dim,
        });
    }
    Err(Error::DegenerateSection {
        attempts: MUKAI_MAX_ATTEMPTS as usize,
        reason: last_reason,
    })
}

/// Intersection of the dual Grassmannian with the orthogonal space `P^⊥`
/// of the section's linear span.
#[derive(Clone, Debug, Serialize)]
pub struct DualDegreeReport {
    pub k: usize,
    pub kind: SectionKind,
    pub perp_dim: usize,
    pub hilbert: HilbertReport,
}

impl DualDegreeReport {
    pub fn degree(&self) -> Option<usize> {
        self.hilbert.stable_value()
    }
    pub fn is_empty(&self) -> bool {
        self.hilbert.empty_from.is_some()
    }
}

pub fn dual_orthogonal_degree(section: &MukaiSection, d_max: usize) -> Result<DualDegreeReport> {
    let field = section.ambient.field();
    let n = section.k + 2;
    // P^⊥: linear forms vanishing on the span, i.e. the left kernel of the substitution
    let (_, perp) = section.substitution.transpose().rank_kernel();
    let dual = pluecker_ideal(field, n)?;
    let restricted = dual.restrict_to_subspace(&perp.transpose())?;
    Ok(DualDegreeReport {
        k: section.k,
        kind: section.kind,
        perp_dim: perp.rows(),
        hilbert: hilbert_probe(restricted.quadrics(), d_max),
    })
}

/// `u ∧ U` as a subspace of the Plücker coordinate space.
pub fn lu_space(field: PrimeField, u: &[u64]) -> Subspace {
    Subspace::span(&wedge_with_u(field, u))
}
