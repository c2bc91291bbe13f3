//! Bott's theorem for homogeneous bundles `E(λ)` on `P^{n-1}`.
//!
//! Weights are integer vectors in the `L_i` basis of the general linear
//! group, with `δ = (n, n-1, .., 1)`. The pairing of a positive root
//! `L_i - L_j` with `μ` is `μ_i - μ_j`. `O(d)` is `E(d, 0, .., 0)`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Weight = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum BottResult {
    /// Some positive root pairs to zero with `δ + λ`: all cohomology vanishes.
    AllVanish,
    /// Cohomology is concentrated in degree `i0`, where it is the
    /// representation with highest weight `dominant`.
    Single {
        i0: usize,
        dominant: Weight,
        #[serde(serialize_with = "serialize_big")]
        dim: BigUint,
    },
}

fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    match v.to_u64() {
        Some(x) => s.serialize_u64(x),
        None => s.serialize_str(&v.to_string()),
    }
}

impl BottResult {
    pub fn i0(&self) -> Option<usize> {
        match self {
            BottResult::AllVanish => None,
            BottResult::Single { i0, .. } => Some(*i0),
        }
    }
}

pub fn delta(n: usize) -> Weight {
    (1..=n as i64).rev().collect()
}

/// Weyl dimension `∏_{i<j} (ν_i - ν_j + j - i) / (j - i)` of the irreducible
/// representation with dominant highest weight `ν`.
pub fn weyl_dim(nu: &[i64]) -> BigUint {
    let n = nu.len();
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..n {
        for j in i + 1..n {
            num *= BigInt::from(nu[i] - nu[j] + (j - i) as i64);
            den *= BigInt::from((j - i) as i64);
        }
    }
    (num / den).to_biguint().expect("dominant weight has positive dimension")
}

pub fn bott_cohomology(lambda: &[i64]) -> Result<BottResult> {
    let n = lambda.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("weight needs length >= 2, got {n}")));
    }
    let mu: Vec<i64> = lambda.iter().zip(delta(n)).map(|(&l, d)| l + d).collect();
    let mut inversions = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mu[i] == mu[j] {
                return Ok(BottResult::AllVanish);
            }
            if mu[i] < mu[j] {
                inversions += 1;
            }
        }
    }
    let mut sorted = mu;
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let dominant: Weight = sorted.iter().zip(delta(n)).map(|(&m, d)| m - d).collect();
    let dim = weyl_dim(&dominant);
    Ok(BottResult::Single {
        i0: inversions,
        dominant,
        dim,
    })
}

/// Weight of `E(λ)^* ⊗ O(-n)` for a weight `λ` with `λ_2 >= .. >= λ_n`.
pub fn serre_dual_weight(lambda: &[i64]) -> Weight {
    let n = lambda.len() as i64;
    let mut out = vec![-lambda[0] - n];
    out.extend(lambda[1..].iter().rev().map(|&x| -x));
    out
}

/// The weight `(-j-2, 0, .., 0, -j)` of length `k + 2` of the `j`-th term of
/// the Eagon–Northcott complex resolving the scrollar line configuration.
pub fn en_term_weight(k: usize, j: usize) -> Result<Weight> {
    if k < 2 || j + 1 > k {
        return Err(Error::InvalidInput(format!("need k >= 2 and 0 <= j <= k - 1, got k = {k}, j = {j}")));
    }
    let mut w = vec![0i64; k + 2];
    w[0] = -(j as i64) - 2;
    w[k + 1] = -(j as i64);
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryRow {
    pub j: usize,
    pub weight: Weight,
    pub result: BottResult,
}

/// Cohomology of every Eagon–Northcott term for the given `k`.
pub fn corollary_table(k: usize) -> Result<Vec<CorollaryRow>> {
    (0..k)
        .map(|j| {
            let weight = en_term_weight(k, j)?;
            let result = bott_cohomology(&weight)?;
            Ok(CorollaryRow { j, weight, result })
        })
        .collect()
}
