//! Layouts of the published simulation tables.
//!
//! | id | content | rows | base replications |
//! |---|---|---|---|
//! | `t1` | type I error, normal arms, 7 tests | 42 | 100 000 |
//! | `t2` | type I error, latent Beta 5-point arms, 7 tests | 28 | 100 000 |
//! | `perm1` | permutation type I error, normal arms | 20 | 10 000 |
//! | `perm2` | permutation type I error, latent Beta arms | 20 | 10 000 |
//! | `app_var` | mean variance estimates and separation rate | 70 | 100 000 |
//! | `power_p07` | permutation power at `p = 0.7` | 60 | 10 000 |
//!
//! `scale` multiplies the replication counts. Permutation tables draw
//! `--n-perm` permutations per replication, or `10 000 · scale` (at least
//! 100) when no count is given.

use rayon::ThreadPool;
use wmw_core::simulate::{solve_target_effect, DistSpec, FreeParam, Scenario, SimulationSummary};
use wmw_core::variance::VarianceKind;
use wmw_core::TestKind;

use crate::error::CliError;
use crate::report::{test_label, Table};
use crate::runner::run_scenario;

pub const TABLE_IDS: [&str; 6] = ["t1", "t2", "perm1", "perm2", "app_var", "power_p07"];

const SIZES_14: [(usize, usize); 14] = [
    (7, 7),
    (10, 7),
    (7, 10),
    (10, 10),
    (15, 15),
    (30, 15),
    (15, 30),
    (30, 30),
    (15, 45),
    (15, 60),
    (15, 75),
    (45, 15),
    (60, 15),
    (75, 15),
];

const SIZES_10: [(usize, usize); 10] = [
    (7, 7),
    (7, 10),
    (10, 7),
    (10, 10),
    (15, 15),
    (15, 30),
    (30, 15),
    (30, 30),
    (15, 45),
    (45, 15),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Rates,
    Permutation,
    Variance,
}

/// Row labels, the two arms and the sample sizes.
type RowSpec = (Vec<String>, DistSpec, DistSpec, (usize, usize));

#[derive(Debug, Clone)]
pub struct TablePlan {
    pub id: &'static str,
    layout: Layout,
    pub label_headers: Vec<&'static str>,
    pub rows: Vec<(Vec<String>, Scenario)>,
}

/// Fixed-point with trailing zeros removed: `1.20710 → 1.2071`, `3.0 → 3`.
pub fn short_num(x: f64) -> String {
    let s = format!("{x:.5}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

pub fn short_label(d: &DistSpec) -> String {
    match *d {
        DistSpec::Normal { mean, sd } => format!("N({},{})", short_num(mean), short_num(sd)),
        DistSpec::Exponential { rate } => format!("E({})", short_num(rate)),
        DistSpec::Binomial { trials, prob } => format!("B({trials},{})", short_num(prob)),
        DistSpec::BetaLatent { alpha, beta, k } => format!("Beta{k}({},{})", short_num(alpha), short_num(beta)),
    }
}

fn scaled(base: u64, scale: f64) -> u64 {
    ((base as f64 * scale).round() as u64).max(1)
}

pub fn plan(id: &str, scale: f64, seed: u64, n_perm: Option<u64>) -> Result<TablePlan, CliError> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(CliError::Usage(format!("--scale must lie in (0, 1], got {scale}")));
    }
    let id = TABLE_IDS
        .into_iter()
        .find(|t| *t == id)
        .ok_or_else(|| CliError::UnknownTable(id.to_string()))?;
    let n_perm = n_perm.unwrap_or_else(|| scaled(10_000, scale).max(100));
    let latent = |a: f64, b: f64| DistSpec::beta_latent(a, b, 5);
    let reference = latent(5.0, 4.0);

    let mut rows: Vec<RowSpec> = Vec::new();
    let (layout, label_headers, reps) = match id {
        "t1" | "perm1" => {
            let (sds, sizes): (&[f64], &[(usize, usize)]) = if id == "t1" {
                (&[1.0, 3.0, 5.0], &SIZES_14)
            } else {
                (&[1.0, 3.0], &SIZES_10)
            };
            for &sd in sds {
                for &(n1, n2) in sizes {
                    let labels = vec![n1.to_string(), n2.to_string(), "1".into(), short_num(sd)];
                    rows.push((labels, DistSpec::normal(0.0, 1.0), DistSpec::normal(0.0, sd), (n1, n2)));
                }
            }
            let layout = if id == "t1" { Layout::Rates } else { Layout::Permutation };
            (layout, vec!["n1", "n2", "sigma1", "sigma2"], if id == "t1" { 100_000 } else { 10_000 })
        }
        "t2" | "perm2" => {
            let sizes: &[(usize, usize)] = if id == "t2" { &SIZES_14 } else { &SIZES_10 };
            for (a, b) in [(5.0, 4.0), (1.2071, 1.0)] {
                for &(n1, n2) in sizes {
                    let labels = vec![n1.to_string(), n2.to_string(), short_num(a), short_num(b)];
                    rows.push((labels, latent(a, b), reference, (n1, n2)));
                }
            }
            let layout = if id == "t2" { Layout::Rates } else { Layout::Permutation };
            (layout, vec!["n1", "n2", "alpha1", "beta1"], if id == "t2" { 100_000 } else { 10_000 })
        }
        "app_var" => {
            let mut pairs: Vec<(DistSpec, DistSpec)> =
                [1.0, 3.0, 5.0].iter().map(|&sd| (DistSpec::normal(0.0, 1.0), DistSpec::normal(0.0, sd))).collect();
            pairs.push((reference, reference));
            pairs.push((latent(1.2071, 1.0), reference));
            for (d1, d2) in pairs {
                for &(n1, n2) in &SIZES_14 {
                    let labels = vec![n1.to_string(), n2.to_string(), short_label(&d1), short_label(&d2)];
                    rows.push((labels, d1, d2, (n1, n2)));
                }
            }
            (Layout::Variance, vec!["n1", "n2", "dist1", "dist2"], 100_000)
        }
        "power_p07" => {
            for (d1, d2) in power_pairs()? {
                for &(n1, n2) in &SIZES_10 {
                    let labels = vec![n1.to_string(), n2.to_string(), short_label(&d1), short_label(&d2)];
                    rows.push((labels, d1, d2, (n1, n2)));
                }
            }
            (Layout::Permutation, vec!["n1", "n2", "dist1", "dist2"], 10_000)
        }
        _ => unreachable!(),
    };

    let n_reps = scaled(reps, scale);
    let rows = rows
        .into_iter()
        .enumerate()
        .map(|(i, (labels, d1, d2, (n1, n2)))| {
            let mut sc = Scenario::new(d1, d2, n1, n2, n_reps, seed.wrapping_add(i as u64));
            match layout {
                Layout::Permutation => {
                    sc.tests = TestKind::PERMUTATION_BATTERY.to_vec();
                    sc.permutation = Some(n_perm);
                }
                Layout::Variance => sc.tests = vec![TestKind::Wmw],
                Layout::Rates => {}
            }
            (labels, sc)
        })
        .collect();
    Ok(TablePlan {
        id,
        layout,
        label_headers,
        rows,
    })
}

/// Distribution pairs with `p = 0.7`, each calibrated by the effect solver.
pub fn power_pairs() -> Result<Vec<(DistSpec, DistSpec)>, CliError> {
    let target = 0.7;
    let mut out = Vec::new();
    for sd in [1.0, 3.0] {
        let reference = DistSpec::normal(0.0, sd);
        let mu = solve_target_effect(&DistSpec::normal(0.0, 1.0), FreeParam::NormalMean, &reference, target)?;
        out.push((DistSpec::normal(mu, 1.0), reference));
    }
    let reference = DistSpec::beta_latent(5.0, 4.0, 5);
    for beta in [4.0, 1.0] {
        let a = solve_target_effect(&DistSpec::beta_latent(1.0, beta, 5), FreeParam::BetaAlpha, &reference, target)?;
        out.push((DistSpec::beta_latent(a, beta, 5), reference));
    }
    let reference = DistSpec::exponential(1.0);
    let rate = solve_target_effect(&reference, FreeParam::ExponentialRate, &reference, target)?;
    out.push((DistSpec::exponential(rate), reference));
    let reference = DistSpec::binomial(5, 0.6);
    let q = solve_target_effect(&DistSpec::binomial(5, 0.5), FreeParam::BinomialProb, &reference, target)?;
    out.push((DistSpec::binomial(5, q), reference));
    Ok(out)
}

impl TablePlan {
    pub fn value_headers(&self) -> Vec<String> {
        let mut h: Vec<String> = match self.layout {
            Layout::Rates => TestKind::DEFAULT_BATTERY.iter().map(|k| k.name().to_string()).collect(),
            Layout::Permutation => TestKind::PERMUTATION_BATTERY
                .iter()
                .map(|k| test_label(k.name(), true))
                .collect(),
            Layout::Variance => ["V", "N", "WMW", "BM", "PM", "sep"].map(String::from).to_vec(),
        };
        h.push("n_reps".into());
        if self.layout == Layout::Permutation {
            h.push("n_perm".into());
        }
        h
    }

    fn values(&self, s: &SimulationSummary) -> Vec<String> {
        let mut v: Vec<String> = match self.layout {
            Layout::Rates | Layout::Permutation => {
                let perm = self.layout == Layout::Permutation;
                s.rates
                    .iter()
                    .filter(|r| r.permutation == perm)
                    .map(|r| format!("{:.5}", r.rate))
                    .collect()
            }
            Layout::Variance => {
                let mean = |k| format!("{:.8}", s.mean_variance(k).unwrap_or(f64::NAN));
                vec![
                    s.true_variance.map_or(String::new(), |v| format!("{v:.8}")),
                    mean(VarianceKind::N),
                    mean(VarianceKind::Wmw),
                    mean(VarianceKind::Bm),
                    mean(VarianceKind::Pm),
                    format!("{:.5}", s.separation_frequency),
                ]
            }
        };
        v.push(s.scenario.n_reps.to_string());
        if let Some(n) = s.scenario.permutation {
            v.push(n.to_string());
        }
        v
    }

    pub fn run(&self, pool: &ThreadPool) -> Result<Table, CliError> {
        let mut t = Table::new(self.label_headers.iter().map(|s| s.to_string()).chain(self.value_headers()));
        for (labels, sc) in &self.rows {
            let summary = run_scenario(sc, pool)?;
            let mut row = labels.clone();
            row.extend(self.values(&summary));
            t.push(row);
        }
        Ok(t)
    }
}
