//! Parallel execution on a rayon pool.
//!
//! Work is split exactly as in the sequential engine (chunks of
//! replications, blocks of permutation draws) and partial results are folded
//! in index order, so output does not depend on the number of threads.

use rayon::prelude::*;
use rayon::ThreadPool;
use wmw_core::permutation::{finish, observed_results, tally_draws, Tally};
use wmw_core::simulate::{finalize, run_chunk, Accumulator, Scenario, SimulationSummary};
use wmw_core::{PermutationResult, TestKind, TwoSamples};

use crate::error::CliError;

const PERM_BLOCK: u64 = 512;

/// `threads = 0` lets rayon pick.
pub fn build_pool(threads: usize) -> Result<ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))
}

pub fn run_scenario(sc: &Scenario, pool: &ThreadPool) -> Result<SimulationSummary, CliError> {
    sc.validate()?;
    let chunks: Vec<Accumulator> = pool.install(|| (0..sc.n_chunks()).into_par_iter().map(|c| run_chunk(sc, c)).collect());
    let mut acc = Accumulator::new(sc);
    for c in &chunks {
        acc.merge(c);
    }
    Ok(finalize(sc, &acc))
}

pub fn permutation_tests(
    data: &TwoSamples,
    kinds: &[TestKind],
    n_perm: u64,
    seed: u64,
    pool: &ThreadPool,
) -> Result<Vec<PermutationResult>, CliError> {
    let observed = observed_results(data, kinds, n_perm)?;
    let stats: Vec<f64> = observed.iter().map(|r| r.statistic).collect();
    let blocks = n_perm.div_ceil(PERM_BLOCK);
    let parts: Vec<Vec<Tally>> = pool.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| tally_draws(data, kinds, &stats, seed, b * PERM_BLOCK..((b + 1) * PERM_BLOCK).min(n_perm)))
            .collect::<Result<_, _>>()
    })?;
    let mut total = vec![Tally::default(); kinds.len()];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
    }
    Ok(finish(&observed, &total, n_perm, seed))
}
