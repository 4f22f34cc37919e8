//! Monte Carlo engine.
//!
//! Replication `r` draws both samples from `stream(master_seed, r)`; when
//! permutation tests are requested the next 64-bit word of that stream seeds
//! the permutation draws. Replications are grouped into fixed-size chunks
//! whose accumulators are folded in chunk order, so the result depends only
//! on the scenario and never on how chunks are scheduled.

use alloc::vec::Vec;

use rand::RngCore;

use crate::effect::estimate_effect;
use crate::error::{require_min, Error, Result};
use crate::hypothesis::{evaluate, Alternative, TestKind};
use crate::permutation::{finish, tally_draws};
use crate::ranks::{Sample, TwoSamples};
use crate::rng::stream;
use crate::simulate::dist::DistSpec;
use crate::simulate::population::true_variance;
use crate::variance::{var_bm, var_pm, var_unbiased, var_wmw, VarianceKind};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Estimators whose raw values are averaged over replications.
pub const TRACKED_VARIANCES: [VarianceKind; 4] = [VarianceKind::N, VarianceKind::Wmw, VarianceKind::Bm, VarianceKind::Pm];

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    pub dist1: DistSpec,
    pub dist2: DistSpec,
    pub n1: usize,
    pub n2: usize,
    pub n_reps: u64,
    pub alpha: f64,
    pub tests: Vec<TestKind>,
    /// Number of permutations per replication, if permutation tests run.
    pub permutation: Option<u64>,
    pub master_seed: u64,
}

impl Scenario {
    pub fn new(dist1: DistSpec, dist2: DistSpec, n1: usize, n2: usize, n_reps: u64, master_seed: u64) -> Self {
        Scenario {
            dist1,
            dist2,
            n1,
            n2,
            n_reps,
            alpha: DEFAULT_ALPHA,
            tests: TestKind::DEFAULT_BATTERY.to_vec(),
            permutation: None,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.dist1.validate()?;
        self.dist2.validate()?;
        if self.n_reps == 0 {
            return Err(Error::Domain("n_reps must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain("alpha must lie in (0, 1)"));
        }
        if self.tests.is_empty() {
            return Err(Error::Domain("a scenario needs at least one test"));
        }
        if self.permutation == Some(0) {
            return Err(Error::Domain("n_perm must be at least 1"));
        }
        let required = self
            .tests
            .iter()
            .map(|k| k.df_kind().map_or(2, |d| d.min_size()))
            .max()
            .unwrap_or(2);
        require_min(self.n1, self.n2, required)
    }

    /// Kinds run as permutation tests: every requested kind except WMW.
    pub fn permutation_kinds(&self) -> Vec<TestKind> {
        match self.permutation {
            Some(_) => self.tests.iter().copied().filter(|&k| k != TestKind::Wmw).collect(),
            None => Vec::new(),
        }
    }

    /// Replications per chunk. Permutation scenarios use short chunks so
    /// that a few thousand expensive replications still spread over workers.
    pub fn chunk_len(&self) -> u64 {
        if self.permutation.is_some() {
            8
        } else {
            1024
        }
    }

    pub fn n_chunks(&self) -> u64 {
        self.n_reps.div_ceil(self.chunk_len())
    }
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Accumulator {
    pub reps: u64,
    pub rejections: Vec<u64>,
    pub permutation_rejections: Vec<u64>,
    pub variance_sum: [CompensatedSum; 4],
    pub variance_sq_sum: [CompensatedSum; 4],
    pub separated: u64,
    pub all_tied: u64,
    /// Replications in which some test could not be evaluated.
    pub failures: u64,
}

impl Accumulator {
    pub fn new(sc: &Scenario) -> Self {
        Accumulator {
            rejections: alloc::vec![0; sc.tests.len()],
            permutation_rejections: alloc::vec![0; sc.permutation_kinds().len()],
            ..Default::default()
        }
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.reps += other.reps;
        for (a, b) in self.rejections.iter_mut().zip(&other.rejections) {
            *a += b;
        }
        for (a, b) in self.permutation_rejections.iter_mut().zip(&other.permutation_rejections) {
            *a += b;
        }
        for i in 0..4 {
            self.variance_sum[i].merge(&other.variance_sum[i]);
            self.variance_sq_sum[i].merge(&other.variance_sq_sum[i]);
        }
        self.separated += other.separated;
        self.all_tied += other.all_tied;
        self.failures += other.failures;
    }
}

/// Draws the two samples of replication `r` and returns them with the
/// generator positioned after the draws.
pub fn replication_data(sc: &Scenario, r: u64) -> (TwoSamples, crate::rng::StreamRng) {
    let mut rng = stream(sc.master_seed, r);
    let s1 = sc.dist1.sample(sc.n1, &mut rng);
    let s2 = sc.dist2.sample(sc.n2, &mut rng);
    // generated values are always finite
    let data = TwoSamples::new(Sample::new(s1).expect("finite draws"), Sample::new(s2).expect("finite draws"));
    (data, rng)
}

fn run_replication(sc: &Scenario, perm_kinds: &[TestKind], r: u64, acc: &mut Accumulator) -> Result<()> {
    let (data, mut rng) = replication_data(sc, r);
    let es = estimate_effect(&data)?;
    let wmw = var_wmw(&data)?;
    acc.separated += es.separated() as u64;
    acc.all_tied += es.all_tied() as u64;

    let raws = [var_unbiased(&es)?.raw, wmw.raw, var_bm(&es)?.raw, var_pm(&es)?.raw];
    for (i, v) in raws.into_iter().enumerate() {
        acc.variance_sum[i].add(v);
        acc.variance_sq_sum[i].add(v * v);
    }

    for (count, &kind) in acc.rejections.iter_mut().zip(&sc.tests) {
        let res = evaluate(&es, Some(&wmw), kind, Alternative::TwoSided)?;
        *count += res.rejects(sc.alpha) as u64;
    }

    if let Some(n_perm) = sc.permutation {
        let seed = rng.next_u64();
        let observed = perm_kinds
            .iter()
            .map(|&k| evaluate(&es, None, k, Alternative::TwoSided))
            .collect::<Result<Vec<_>>>()?;
        let stats: Vec<f64> = observed.iter().map(|o| o.statistic).collect();
        let tallies = tally_draws(&data, perm_kinds, &stats, seed, 0..n_perm)?;
        for (count, res) in acc.permutation_rejections.iter_mut().zip(finish(&observed, &tallies, n_perm, seed)) {
            *count += res.rejects(sc.alpha) as u64;
        }
    }
    Ok(())
}

/// Runs the replications of chunk `chunk` (see [`Scenario::chunk_len`]).
pub fn run_chunk(sc: &Scenario, chunk: u64) -> Accumulator {
    let perm_kinds = sc.permutation_kinds();
    let mut acc = Accumulator::new(sc);
    let start = chunk * sc.chunk_len();
    let end = (start + sc.chunk_len()).min(sc.n_reps);
    for r in start..end {
        acc.reps += 1;
        // a failing replication is counted and the run continues
        let mut local = Accumulator::new(sc);
        match run_replication(sc, &perm_kinds, r, &mut local) {
            Ok(()) => {
                local.reps = 0;
                acc.merge(&local);
            }
            Err(_) => acc.failures += 1,
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RejectionRate {
    pub kind: TestKind,
    pub permutation: bool,
    pub rejections: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanVariance {
    pub kind: VarianceKind,
    pub mean: f64,
    /// Standard error of the mean over replications.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationSummary {
    pub scenario: Scenario,
    pub rates: Vec<RejectionRate>,
    pub mean_variance: Vec<MeanVariance>,
    /// Exact variance of `p̂`, when the distribution pair allows it.
    pub true_variance: Option<f64>,
    pub separation_frequency: f64,
    pub all_tied_frequency: f64,
    /// `√(α(1−α)/n_reps)`.
    pub mc_standard_error: f64,
    pub failures: u64,
}

impl SimulationSummary {
    pub fn rate(&self, kind: TestKind, permutation: bool) -> Option<f64> {
        self.rates
            .iter()
            .find(|r| r.kind == kind && r.permutation == permutation)
            .map(|r| r.rate)
    }

    pub fn mean_variance(&self, kind: VarianceKind) -> Option<f64> {
        self.mean_variance.iter().find(|m| m.kind == kind).map(|m| m.mean)
    }
}

pub fn finalize(sc: &Scenario, acc: &Accumulator) -> SimulationSummary {
    let reps = acc.reps as f64;
    let mut rates: Vec<RejectionRate> = sc
        .tests
        .iter()
        .zip(&acc.rejections)
        .map(|(&kind, &rejections)| RejectionRate {
            kind,
            permutation: false,
            rejections,
            rate: rejections as f64 / reps,
        })
        .collect();
    rates.extend(
        sc.permutation_kinds()
            .into_iter()
            .zip(&acc.permutation_rejections)
            .map(|(kind, &rejections)| RejectionRate {
                kind,
                permutation: true,
                rejections,
                rate: rejections as f64 / reps,
            }),
    );
    let ok = (acc.reps - acc.failures) as f64;
    let mean_variance = TRACKED_VARIANCES
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let mean = acc.variance_sum[i].value() / ok;
            let var = if ok > 1.0 {
                ((acc.variance_sq_sum[i].value() - ok * mean * mean) / (ok - 1.0)).max(0.0)
            } else {
                0.0
            };
            MeanVariance {
                kind,
                mean,
                std_error: libm::sqrt(var / ok),
            }
        })
        .collect();
    SimulationSummary {
        scenario: sc.clone(),
        rates,
        mean_variance,
        true_variance: true_variance(&sc.dist1, &sc.dist2, sc.n1, sc.n2).ok(),
        separation_frequency: acc.separated as f64 / reps,
        all_tied_frequency: acc.all_tied as f64 / reps,
        mc_standard_error: libm::sqrt(sc.alpha * (1.0 - sc.alpha) / reps),
        failures: acc.failures,
    }
}

/// Runs a scenario on the calling thread.
pub fn run_scenario(sc: &Scenario) -> Result<SimulationSummary> {
    sc.validate()?;
    let mut acc = Accumulator::new(sc);
    for c in 0..sc.n_chunks() {
        acc.merge(&run_chunk(sc, c));
    }
    Ok(finalize(sc, &acc))
}
