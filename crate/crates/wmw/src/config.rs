//! TOML scenario files.
//!
//! ```toml
//! [[scenario]]
//! dist1 = { family = "normal", mean = 0.0, sd = 1.0 }
//! dist2 = { family = "normal", mean = 0.0, sd = 3.0 }
//! n1 = 15
//! n2 = 15
//! n_reps = 20000
//! alpha = 0.05                      # optional
//! tests = ["wmw", "pm", "bm(df)"]   # optional, default battery otherwise
//! df = "df2"                        # optional, for tests written without one
//! permutation = { n_perm = 2000 }   # optional
//! master_seed = 7                   # optional, falls back to --seed
//! ```

use std::path::Path;

use serde::Deserialize;
use wmw_core::simulate::{DistSpec, Scenario, DEFAULT_ALPHA};
use wmw_core::{DfKind, TestKind};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    scenario: Vec<ScenarioEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioEntry {
    dist1: DistSpec,
    dist2: DistSpec,
    n1: usize,
    n2: usize,
    n_reps: u64,
    #[serde(default = "default_alpha")]
    alpha: f64,
    tests: Option<Vec<String>>,
    df: Option<String>,
    permutation: Option<PermutationEntry>,
    master_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermutationEntry {
    n_perm: u64,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

pub fn load_scenarios(path: &Path, default_seed: u64) -> Result<Vec<Scenario>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenarios(&text, default_seed)
}

pub fn parse_scenarios(text: &str, default_seed: u64) -> Result<Vec<Scenario>, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if file.scenario.is_empty() {
        return Err(CliError::Config("no [[scenario]] entries".into()));
    }
    file.scenario
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let df = match &e.df {
                Some(s) => parse_df(s)?,
                None => DfKind::default(),
            };
            let tests = match &e.tests {
                Some(names) => names.iter().map(|n| parse_test(n, df)).collect::<Result<Vec<_>, _>>()?,
                None => default_battery(df),
            };
            let sc = Scenario {
                dist1: e.dist1,
                dist2: e.dist2,
                n1: e.n1,
                n2: e.n2,
                n_reps: e.n_reps,
                alpha: e.alpha,
                tests,
                permutation: e.permutation.map(|p| p.n_perm),
                master_seed: e.master_seed.unwrap_or(default_seed),
            };
            sc.validate()
                .map_err(|err| CliError::Config(format!("scenario {}: {err}", i + 1)))?;
            Ok(sc)
        })
        .collect()
}

pub fn parse_df(s: &str) -> Result<DfKind, CliError> {
    DfKind::parse(s.trim()).ok_or_else(|| CliError::Usage(format!("unknown degrees of freedom `{s}`")))
}

/// Parses `pm`, `PM(df1)` and the like; `df` applies when none is written.
pub fn parse_test(s: &str, df: DfKind) -> Result<TestKind, CliError> {
    let s = s.trim();
    let unknown = || CliError::Usage(format!("unknown test `{s}`"));
    let (name, df) = match s.split_once('(') {
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(unknown)?;
            (name, parse_df(inner)?)
        }
        None => (s, df),
    };
    let kind = TestKind::parse(name.trim(), df).ok_or_else(unknown)?;
    if s.contains('(') && kind.df_kind().is_none() {
        return Err(unknown());
    }
    Ok(kind)
}

pub fn parse_test_list(list: &str, df: DfKind) -> Result<Vec<TestKind>, CliError> {
    list.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_test(t, df)).collect()
}

pub fn default_battery(df: DfKind) -> Vec<TestKind> {
    TestKind::DEFAULT_BATTERY
        .iter()
        .map(|k| match k {
            TestKind::N(_) => TestKind::N(df),
            TestKind::Bm(_) => TestKind::Bm(df),
            TestKind::Pm(_) => TestKind::Pm(df),
            k => *k,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[[scenario]]
dist1 = { family = "normal", mean = 0.0, sd = 1.0 }
dist2 = { family = "beta_latent", alpha = 5.0, beta = 4.0, k = 5 }
n1 = 10
n2 = 12
n_reps = 100
tests = ["wmw", "PM(df1)", "bm_logit"]
permutation = { n_perm = 50 }

[[scenario]]
dist1 = { family = "binomial", trials = 5, prob = 0.4 }
dist2 = { family = "exponential", rate = 2.0 }
n1 = 7
n2 = 7
n_reps = 10
df = "df"
master_seed = 9
"#;

    #[test]
    fn parses_entries() {
        let s = parse_scenarios(SAMPLE, 123).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].tests, vec![TestKind::Wmw, TestKind::Pm(DfKind::Df1), TestKind::BmLogit]);
        assert_eq!(s[0].permutation, Some(50));
        assert_eq!(s[0].master_seed, 123);
        assert_eq!(s[0].dist2, DistSpec::beta_latent(5.0, 4.0, 5));
        assert_eq!(s[1].alpha, 0.05);
        assert_eq!(s[1].master_seed, 9);
        assert_eq!(s[1].tests[1], TestKind::N(DfKind::Df));
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(parse_scenarios("[[scenario]]\nn1 = 3\n", 1).is_err());
        let bad_family = SAMPLE.replace("exponential", "cauchy");
        assert!(parse_scenarios(&bad_family, 1).is_err());
        let bad_test = SAMPLE.replace("bm_logit", "bm_logit(df2)");
        assert!(parse_scenarios(&bad_test, 1).is_err());
        let small = SAMPLE.replace("n1 = 7", "n1 = 1");
        assert!(matches!(parse_scenarios(&small, 1), Err(CliError::Config(_))));
        assert!(parse_scenarios("", 1).is_err());
    }

    #[test]
    fn test_names() {
        assert_eq!(parse_test("bm", DfKind::Df).unwrap(), TestKind::Bm(DfKind::Df));
        assert_eq!(parse_test(" N(DF3) ", DfKind::Df).unwrap(), TestKind::N(DfKind::Df3));
        assert!(parse_test("xx", DfKind::Df).is_err());
        assert_eq!(parse_test_list("wmw, pm_logit", DfKind::Df2).unwrap().len(), 2);
    }
}
