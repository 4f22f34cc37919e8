//! Studentized permutation tests.
//!
//! Draw `k` shuffles the pooled sample with its own generator
//! `stream(seed, k)`; the first `n1` values form arm 1. With `T` the observed
//! statistic and `T̃_k` the permuted ones,
//! `p1 = #{T̃_k <= T}/n_perm`, `p2 = #{T̃_k >= T}/n_perm` and the two-sided
//! p-value is `min(1, 2 min(p1, p2))`. Ties with `T` count in both tallies.
//! The observed statistic is not added to the reference set.
//!
//! Because each draw owns its stream, tallies over any partition of the draw
//! range add up to the sequential result ([`tally_draws`]).

use alloc::vec::Vec;
use core::ops::Range;

use rand::RngCore;

use crate::effect::{counts_pairwise, summarize};
use crate::error::{require_min, Error, Result};
use crate::hypothesis::{run_tests, statistic_from_summary, TestKind, TestResult};
use crate::ranks::TwoSamples;
use crate::rng::{below, stream};

pub const DEFAULT_N_PERM: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PermutationResult {
    pub observed: TestResult,
    pub p1: f64,
    pub p2: f64,
    pub p_value: f64,
    pub n_perm: u64,
    pub seed: u64,
}

impl PermutationResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

/// Counts of permuted statistics at or below (`le`) and at or above (`ge`)
/// the observed one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub le: u64,
    pub ge: u64,
}

impl Tally {
    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            le: self.le + other.le,
            ge: self.ge + other.ge,
        }
    }
}

/// Fisher-Yates shuffle.
pub fn shuffle<T, R: RngCore + ?Sized>(values: &mut [T], rng: &mut R) {
    for i in (1..values.len()).rev() {
        let j = below(rng, i as u64 + 1) as usize;
        values.swap(i, j);
    }
}

pub fn permutation_test(data: &TwoSamples, kind: TestKind, n_perm: u64, seed: u64) -> Result<PermutationResult> {
    Ok(permutation_test_multi(data, &[kind], n_perm, seed)?[0])
}

/// Several kinds evaluated on one shared set of permutations.
pub fn permutation_test_multi(
    data: &TwoSamples,
    kinds: &[TestKind],
    n_perm: u64,
    seed: u64,
) -> Result<Vec<PermutationResult>> {
    let observed = observed_results(data, kinds, n_perm)?;
    let stats: Vec<f64> = observed.iter().map(|r| r.statistic).collect();
    let tallies = tally_draws(data, kinds, &stats, seed, 0..n_perm)?;
    Ok(finish(&observed, &tallies, n_perm, seed))
}

/// Validates the request and computes the observed test results.
pub fn observed_results(data: &TwoSamples, kinds: &[TestKind], n_perm: u64) -> Result<Vec<TestResult>> {
    if kinds.contains(&TestKind::Wmw) {
        return Err(Error::InvalidKind("WMW has no studentized permutation version"));
    }
    if n_perm == 0 {
        return Err(Error::Domain("n_perm must be at least 1"));
    }
    require_min(data.n1(), data.n2(), 2)?;
    run_tests(data, kinds)
}

/// Tallies the draws with indices in `draws` for each kind.
pub fn tally_draws(
    data: &TwoSamples,
    kinds: &[TestKind],
    observed: &[f64],
    seed: u64,
    draws: Range<u64>,
) -> Result<Vec<Tally>> {
    let n1 = data.n1();
    let pooled = data.pooled();
    let mut buf = pooled.clone();
    let mut tallies = alloc::vec![Tally::default(); kinds.len()];
    for k in draws {
        buf.copy_from_slice(&pooled);
        let mut rng = stream(seed, k);
        shuffle(&mut buf, &mut rng);
        let es = summarize(&counts_pairwise(&buf[..n1], &buf[n1..]));
        for ((kind, t), tally) in kinds.iter().zip(observed).zip(tallies.iter_mut()) {
            let (stat, _, _) = statistic_from_summary(&es, *kind)?;
            tally.le += (stat <= *t) as u64;
            tally.ge += (stat >= *t) as u64;
        }
    }
    Ok(tallies)
}

pub fn finish(observed: &[TestResult], tallies: &[Tally], n_perm: u64, seed: u64) -> Vec<PermutationResult> {
    observed
        .iter()
        .zip(tallies)
        .map(|(obs, t)| {
            let p1 = t.le as f64 / n_perm as f64;
            let p2 = t.ge as f64 / n_perm as f64;
            PermutationResult {
                observed: *obs,
                p1,
                p2,
                p_value: (2.0 * p1.min(p2)).min(1.0),
                n_perm,
                seed,
            }
        })
        .collect()
}
