//! The estimate `p̂` and the moment quantities every variance estimator and
//! degrees-of-freedom formula consumes.
//!
//! Internally everything is counted in units of `2c ∈ {0, 1, 2}`, so all sums
//! are exact integers and each reported field carries a single rounding.
//! With `A_i = Σ_j 2c(X2j, X1i)` and `B_j = Σ_i 2c(X2j, X1i)`:
//!
//! * `p̂ = P / (2 n1 n2)` with `P = Σ A_i`,
//! * `β̂ = T / (n1 n2)` with `T` the number of tied cross pairs,
//! * `τ̂1 = Σ A_i² / (4 n2² n1)` and `τ̂2 = Σ B_j² / (4 n1² n2)`.
//!
//! Two routes produce the integers: the pairwise definition, and a rank route
//! using `A_i = 2 n2 − (2R_1i − 2R_1i^(1))` where `R^(1)` are internal ranks.
//! They agree exactly; the rank route is used above [`RANK_PATH_MIN_N`].

use alloc::vec::Vec;

use crate::error::{require_min, Result};
use crate::ranks::{cmp_f64, count2, doubled_mid_ranks, mid_ranks, TwoSamples};

/// Pooled sizes above this use the `O(N log N)` rank route.
pub const RANK_PATH_MIN_N: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EffectSummary {
    pub n1: usize,
    pub n2: usize,
    pub p_hat: f64,
    /// Fraction of exactly tied cross pairs.
    pub beta_hat: f64,
    pub tau0_hat: f64,
    pub tau1_hat: f64,
    pub tau2_hat: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    /// Box-type split of the unbiased variance, arm 1 share.
    pub sigma1_given_n_sq: f64,
    /// Box-type split of the unbiased variance, arm 2 share.
    pub sigma2_given_n_sq: f64,
}

impl EffectSummary {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Every cross pair is tied, which forces all values to be equal.
    pub fn all_tied(&self) -> bool {
        self.beta_hat == 1.0
    }

    /// One arm lies entirely below the other.
    pub fn separated(&self) -> bool {
        self.p_hat == 0.0 || self.p_hat == 1.0
    }

    /// `p̂` moved one pair away from complete separation, as if one
    /// observation had fallen on the other side.
    pub fn adjusted_p_hat(&self) -> f64 {
        let step = 1.0 / (self.n1 as f64 * self.n2 as f64);
        if self.p_hat == 1.0 {
            1.0 - step
        } else if self.p_hat == 0.0 {
            step
        } else {
            self.p_hat
        }
    }
}

/// Exact integer sufficient statistics, all in units of `2c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PairCounts {
    pub n1: u64,
    pub n2: u64,
    pub p: u128,
    pub ties: u128,
    pub q1: u128,
    pub q2: u128,
}

pub fn estimate_effect(data: &TwoSamples) -> Result<EffectSummary> {
    require_min(data.n1(), data.n2(), 2)?;
    let counts = if data.n1() + data.n2() > RANK_PATH_MIN_N {
        counts_by_ranks(&data.s1, &data.s2)
    } else {
        counts_pairwise(&data.s1, &data.s2)
    };
    Ok(summarize(&counts))
}

/// [`estimate_effect`] forced through the pairwise definition.
pub fn estimate_effect_pairwise(data: &TwoSamples) -> Result<EffectSummary> {
    require_min(data.n1(), data.n2(), 2)?;
    Ok(summarize(&counts_pairwise(&data.s1, &data.s2)))
}

/// [`estimate_effect`] forced through the internal-rank route.
pub fn estimate_effect_ranks(data: &TwoSamples) -> Result<EffectSummary> {
    require_min(data.n1(), data.n2(), 2)?;
    Ok(summarize(&counts_by_ranks(&data.s1, &data.s2)))
}

/// `p̂ = (R̄2 − R̄1) / N + 1/2` from pooled mid-rank means.
pub fn p_hat_via_ranks(data: &TwoSamples) -> f64 {
    let (n1, n2) = (data.n1(), data.n2());
    let r = mid_ranks(&data.pooled());
    let r1 = r[..n1].iter().sum::<f64>() / n1 as f64;
    let r2 = r[n1..].iter().sum::<f64>() / n2 as f64;
    (r2 - r1) / (n1 + n2) as f64 + 0.5
}

pub(crate) fn counts_pairwise(s1: &[f64], s2: &[f64]) -> PairCounts {
    let mut b = alloc::vec![0u64; s2.len()];
    let (mut p, mut ties, mut q1) = (0u128, 0u128, 0u128);
    for &x in s1 {
        let mut a = 0u64;
        for (j, &y) in s2.iter().enumerate() {
            let c = count2(y, x) as u64;
            a += c;
            b[j] += c;
            ties += (c == 1) as u128;
        }
        p += a as u128;
        q1 += (a as u128) * (a as u128);
    }
    let q2 = b.iter().map(|&v| (v as u128) * (v as u128)).sum();
    PairCounts {
        n1: s1.len() as u64,
        n2: s2.len() as u64,
        p,
        ties,
        q1,
        q2,
    }
}

pub(crate) fn counts_by_ranks(s1: &[f64], s2: &[f64]) -> PairCounts {
    let (n1, n2) = (s1.len(), s2.len());
    let mut pooled = Vec::with_capacity(n1 + n2);
    pooled.extend_from_slice(s1);
    pooled.extend_from_slice(s2);
    let r = doubled_mid_ranks(&pooled);
    let r1 = doubled_mid_ranks(s1);
    let r2 = doubled_mid_ranks(s2);

    let (mut p, mut q1, mut q2) = (0u128, 0u128, 0u128);
    for i in 0..n1 {
        // 2 n2 F̂2(X1i), so A_i is its complement
        let a = (2 * n2 as u64 - (r[i] - r1[i])) as u128;
        q1 += a * a;
    }
    for j in 0..n2 {
        let b = (r[n1 + j] - r2[j]) as u128;
        p += b;
        q2 += b * b;
    }
    PairCounts {
        n1: n1 as u64,
        n2: n2 as u64,
        p,
        ties: cross_ties(s1, s2),
        q1,
        q2,
    }
}

/// Number of exactly tied cross pairs, by a merge of the sorted arms.
fn cross_ties(s1: &[f64], s2: &[f64]) -> u128 {
    let mut a = s1.to_vec();
    let mut b = s2.to_vec();
    a.sort_unstable_by(|x, y| cmp_f64(*x, *y));
    b.sort_unstable_by(|x, y| cmp_f64(*x, *y));
    let (mut i, mut j, mut ties) = (0, 0, 0u128);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            i += 1;
        } else if a[i] > b[j] {
            j += 1;
        } else {
            let v = a[i];
            let i0 = i;
            while i < a.len() && a[i] == v {
                i += 1;
            }
            let j0 = j;
            while j < b.len() && b[j] == v {
                j += 1;
            }
            ties += ((i - i0) * (j - j0)) as u128;
        }
    }
    ties
}

pub(crate) fn summarize(c: &PairCounts) -> EffectSummary {
    let (n1, n2) = (c.n1 as i128, c.n2 as i128);
    let (p, t, q1, q2) = (c.p as i128, c.ties as i128, c.q1 as i128, c.q2 as i128);
    let (f1, f2) = (n1 as f64, n2 as f64);
    let nn = n1 * n2;
    let p_hat = ratio(p, 2 * nn);
    let beta_hat = ratio(t, nn);
    let tau0_hat = p_hat - beta_hat / 4.0;
    let tau1_hat = ratio(q1, 4 * n2 * n2 * n1);
    let tau2_hat = ratio(q2, 4 * n1 * n1 * n2);
    let sigma1_sq = ratio(n1 * q1 - p * p, 4 * n1 * n2 * n2 * (n1 - 1));
    let sigma2_sq = ratio(n2 * q2 - p * p, 4 * n1 * n1 * n2 * (n2 - 1));
    // 8 n1² n2² (n1−1)(n2−1) σ̂²_{g|N}, kept as integers until the last step
    let box_den = 8.0 * f1 * f1 * f2 * f2 * (f1 - 1.0) * (f2 - 1.0);
    let common = (2 * p - t) * nn;
    let s1n = 2 * nn * q1 - common - (2 * n2 - 1) * p * p;
    let s2n = 2 * nn * q2 - common - (2 * n1 - 1) * p * p;
    EffectSummary {
        n1: c.n1 as usize,
        n2: c.n2 as usize,
        p_hat,
        beta_hat,
        tau0_hat,
        tau1_hat,
        tau2_hat,
        sigma1_sq,
        sigma2_sq,
        sigma1_given_n_sq: s1n as f64 / box_den,
        sigma2_given_n_sq: s2n as f64 / box_den,
    }
}

#[inline]
fn ratio(num: i128, den: i128) -> f64 {
    num as f64 / den as f64
}
