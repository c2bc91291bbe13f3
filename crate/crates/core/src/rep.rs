//! Dimensions of Schur functors and the closed-form counts around the
//! syzygies of `Gr(k+2, 2)` and its Mukai sections. All arithmetic is exact.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("{parts:?} is not weakly decreasing")));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("{parts:?} has an interior zero")));
        }
        Ok(Self { parts })
    }

    /// The hook `(a, 1^b)`.
    pub fn hook(arm_plus_one: usize, leg: usize) -> Self {
        let mut parts = vec![arm_plus_one];
        parts.extend(std::iter::repeat_n(1, leg));
        Self::new(parts).expect("hook is a partition")
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }
    pub fn len(&self) -> usize {
        self.parts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }
    /// Column lengths of the Young diagram.
    pub fn conjugate(&self) -> Vec<usize> {
        let width = self.parts.first().copied().unwrap_or(0);
        (0..width)
            .map(|c| self.parts.iter().filter(|&&r| r > c).count())
            .collect()
    }
}

pub fn binom(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// `dim S_λ(C^n)` by the hook content formula; zero when `λ` has more than
/// `n` rows.
pub fn schur_dim(lambda: &Partition, n: usize) -> BigUint {
    if lambda.len() > n {
        return BigUint::zero();
    }
    let cols = lambda.conjugate();
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (i, &row) in lambda.parts().iter().enumerate() {
        for j in 0..row {
            // content j - i, hook arm + leg + 1
            num *= BigUint::from(n + j - i);
            den *= BigUint::from((row - j - 1) + (cols[j] - i - 1) + 1);
        }
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// Linear strand Betti numbers of `Gr(n, 2)`: `dim Λ_{p+4,1^p} U`, i.e. the
/// Schur functor of the partition `(p+1, 1^{p+3})`, for `p = 0..=n-4`.
pub fn grass_strand_dims(n: usize) -> Result<Vec<BigUint>> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("need n >= 4, got {n}")));
    }
    Ok((0..=n - 4)
        .map(|p| schur_dim(&Partition::hook(p + 1, p + 3), n))
        .collect())
}

fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

/// Closed-form counts for genus `g = 2k` curves on `Gr(k+2, 2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CountTable {
    pub k: usize,
    /// `dim V_{k-2}`, agreed by both formulas.
    #[serde(rename = "dimV", serialize_with = "serialize_big")]
    pub dim_v: BigUint,
    /// `(k-1) C(2k-2, k) - k C(2k-2, k+1)`.
    #[serde(rename = "dimVViaBetti", serialize_with = "serialize_big")]
    pub dim_v_via_betti: BigUint,
    /// `C(2k-1, k+1)`, which also equals `C(2k-1, k-2) = dim S^{k-2} C^{k+2}`.
    #[serde(rename = "dimVViaBinomial", serialize_with = "serialize_big")]
    pub dim_v_via_binomial: BigUint,
    /// `deg Gr(k+2, 2) = (2k)! / (k! (k+1)!)`.
    #[serde(serialize_with = "serialize_big")]
    pub deg_dual_grass: BigUint,
    /// Castelnuovo count `g! ∏_{i=0}^{r} i! / (g - d + r + i)!` with `r = 1`, `d = k + 1`.
    #[serde(rename = "degW1", serialize_with = "serialize_big")]
    pub deg_w1: BigUint,
    /// `C(2k, k) / (k + 1)`.
    #[serde(serialize_with = "serialize_big")]
    pub scrollar_lines: BigUint,
}

pub fn count_table(k: usize) -> Result<CountTable> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("need k >= 2, got {k}")));
    }
    let betti = BigInt::from(k - 1) * BigInt::from(binom(2 * k - 2, k))
        - BigInt::from(k) * BigInt::from(binom(2 * k - 2, k + 1));
    let dim_v_via_betti = betti
        .to_biguint()
        .ok_or_else(|| Error::Internal(format!("negative Betti count at k = {k}")))?;
    let dim_v_via_binomial = binom(2 * k - 1, k + 1);
    if dim_v_via_binomial != binom(2 * k - 1, k - 2) {
        return Err(Error::Internal(format!("binomial symmetry fails at k = {k}")));
    }
    if dim_v_via_betti != dim_v_via_binomial {
        return Err(Error::Internal(format!("dim V formulas disagree at k = {k}")));
    }
    let g = 2 * k;
    let deg_dual_grass = factorial(g) / (factorial(k) * factorial(k + 1));
    let (r, d) = (1usize, k + 1);
    let mut deg_w1 = factorial(g);
    let mut den = BigUint::one();
    for i in 0..=r {
        deg_w1 *= factorial(i);
        den *= factorial(g - d + r + i);
    }
    if (&deg_w1 % &den) != BigUint::zero() {
        return Err(Error::Internal(format!("Castelnuovo count is not integral at k = {k}")));
    }
    let deg_w1 = deg_w1 / den;
    let scrollar_lines = binom(2 * k, k) / BigUint::from(k + 1);
    if deg_dual_grass != deg_w1 || deg_w1 != scrollar_lines {
        return Err(Error::Internal(format!("degree counts disagree at k = {k}")));
    }
    Ok(CountTable {
        k,
        dim_v: dim_v_via_binomial.clone(),
        dim_v_via_betti,
        dim_v_via_binomial,
        deg_dual_grass,
        deg_w1,
        scrollar_lines,
    })
}

/// `max(0, (p+1) C(g-2, p+2) - (g-p-2) C(g-2, g-p-1))`: the dimension of
/// `V_p` for a general canonical curve of genus `g` once `β_{p,p+2} = 0`.
pub fn expected_strand_dim(g: usize, p: usize) -> Result<BigUint> {
    if g < 4 || p + 3 > g {
        return Err(Error::InvalidInput(format!("need g >= 4 and p <= g - 3, got g = {g}, p = {p}")));
    }
    let v = BigInt::from(p + 1) * BigInt::from(binom(g - 2, p + 2))
        - BigInt::from(g - p - 2) * BigInt::from(binom(g - 2, g - p - 1));
    Ok(v.to_biguint().unwrap_or_default())
}
