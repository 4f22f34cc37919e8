//! Tie-aware count functions, empirical distribution functions and mid-ranks.
//!
//! Equality is exact bit equality of the `f64` values. Ordinal categories must
//! therefore be encoded as exactly representable reals (small integers).

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A non-empty sample of finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Sample(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Sample {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

/// Two independent arms. Size requirements are checked by each estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSamples {
    pub s1: Sample,
    pub s2: Sample,
}

impl TwoSamples {
    pub fn new(s1: Sample, s2: Sample) -> Self {
        TwoSamples { s1, s2 }
    }

    pub fn from_slices(s1: &[f64], s2: &[f64]) -> Result<Self> {
        Ok(TwoSamples {
            s1: Sample::from_slice(s1)?,
            s2: Sample::from_slice(s2)?,
        })
    }

    pub fn n1(&self) -> usize {
        self.s1.len()
    }

    pub fn n2(&self) -> usize {
        self.s2.len()
    }

    /// Arm 1 followed by arm 2.
    pub fn pooled(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n1() + self.n2());
        v.extend_from_slice(&self.s1);
        v.extend_from_slice(&self.s2);
        v
    }

    pub fn swapped(&self) -> TwoSamples {
        TwoSamples {
            s1: self.s2.clone(),
            s2: self.s1.clone(),
        }
    }
}

/// `c(x, y)`: 0 if `x < y`, 1/2 if `x == y`, 1 if `x > y`.
#[inline]
pub fn count(x: f64, y: f64) -> f64 {
    0.5 * count2(x, y) as f64
}

/// Twice [`count`], as an integer in {0, 1, 2}.
#[inline]
pub(crate) fn count2(x: f64, y: f64) -> u32 {
    (x >= y) as u32 + (x > y) as u32
}

/// `c⁺(x, y) = 1` iff `x >= y`.
#[inline]
pub fn count_plus(x: f64, y: f64) -> f64 {
    if x >= y {
        1.0
    } else {
        0.0
    }
}

/// `c⁻(x, y) = 1` iff `x > y`.
#[inline]
pub fn count_minus(x: f64, y: f64) -> f64 {
    if x > y {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcdfFlavor {
    /// `F̂(x)`, the mean of `c(x, Xj)`.
    Normalized,
    /// `F̂⁻(x)`, the fraction of values strictly below `x`.
    Left,
    /// `F̂⁺(x)`, the fraction of values at or below `x`.
    Right,
}

pub fn ecdf(sample: &[f64], x: f64, flavor: EcdfFlavor) -> f64 {
    let f: fn(f64, f64) -> f64 = match flavor {
        EcdfFlavor::Normalized => count,
        EcdfFlavor::Left => count_minus,
        EcdfFlavor::Right => count_plus,
    };
    sample.iter().map(|&y| f(x, y)).sum::<f64>() / sample.len() as f64
}

/// Mid-ranks `R_i = 1/2 + Σ_j c(X_i, X_j)`: tied values share the average of
/// their integer rank positions. Runs in `O(N log N)`.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut ranks = alloc::vec![0.0; values.len()];
    for (idx, twice) in doubled_mid_ranks(values).into_iter().enumerate() {
        ranks[idx] = 0.5 * twice as f64;
    }
    ranks
}

/// Mid-ranks of a sample among itself only.
pub fn internal_ranks(sample: &[f64]) -> Vec<f64> {
    mid_ranks(sample)
}

/// Twice the mid-ranks, which are always integers.
pub(crate) fn doubled_mid_ranks(values: &[f64]) -> Vec<u64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| cmp_f64(values[a], values[b]));
    let mut out = alloc::vec![0u64; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share the rank (start + 1 + end) / 2
        let twice = (start + 1 + end) as u64;
        for &idx in &order[start..end] {
            out[idx] = twice;
        }
        start = end;
    }
    out
}

#[inline]
pub(crate) fn cmp_f64(a: f64, b: f64) -> Ordering {
    // inputs are finite; -0.0 and 0.0 must compare equal
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}
