//! Test statistics for `H0: p = 1/2`.
//!
//! Plain statistics are `(p̂ − 1/2)/σ̂`; logit statistics are
//! `p̂(1−p̂) ln(p̂/(1−p̂))/σ̂`. WMW and the logit kinds are referred to the
//! standard normal, N, BM and PM to a central t with the chosen degrees of
//! freedom.
//!
//! In completely separated samples the N, BM and PM based statistics use
//! `p̂ = 1 − 1/(n1 n2)` (or `1/(n1 n2)`) together with the floored variance,
//! which keeps every statistic finite. WMW keeps the unadjusted `p̂`.

use alloc::vec::Vec;
use core::fmt;

use crate::dist::{normal_sf, t_two_sided_tail};
use crate::dof::{degrees_of_freedom, DfKind};
use crate::effect::{estimate_effect, EffectSummary};
use crate::error::{require_min, Result};
use crate::ranks::TwoSamples;
use crate::variance::{var_bm, var_pm, var_unbiased, var_wmw, Degeneracy, VarianceEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TestKind {
    Wmw,
    N(DfKind),
    Bm(DfKind),
    Pm(DfKind),
    NLogit,
    BmLogit,
    PmLogit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Alternative {
    #[default]
    TwoSided,
    /// `p > 1/2`: arm 2 tends to larger values.
    Greater,
    /// `p < 1/2`.
    Less,
}

/// The variance estimator behind a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Base {
    Wmw,
    N,
    Bm,
    Pm,
}

impl TestKind {
    /// WMW, the three t-tests at `df2` and the three logit tests.
    pub const DEFAULT_BATTERY: [TestKind; 7] = [
        TestKind::Wmw,
        TestKind::N(DfKind::Df2),
        TestKind::Bm(DfKind::Df2),
        TestKind::Pm(DfKind::Df2),
        TestKind::NLogit,
        TestKind::BmLogit,
        TestKind::PmLogit,
    ];

    /// The six kinds with a studentized permutation version.
    pub const PERMUTATION_BATTERY: [TestKind; 6] = [
        TestKind::N(DfKind::Df2),
        TestKind::Bm(DfKind::Df2),
        TestKind::Pm(DfKind::Df2),
        TestKind::NLogit,
        TestKind::BmLogit,
        TestKind::PmLogit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Wmw => "WMW",
            TestKind::N(_) => "N",
            TestKind::Bm(_) => "BM",
            TestKind::Pm(_) => "PM",
            TestKind::NLogit => "N_LOGIT",
            TestKind::BmLogit => "BM_LOGIT",
            TestKind::PmLogit => "PM_LOGIT",
        }
    }

    pub fn df_kind(self) -> Option<DfKind> {
        match self {
            TestKind::N(d) | TestKind::Bm(d) | TestKind::Pm(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_logit(self) -> bool {
        matches!(self, TestKind::NLogit | TestKind::BmLogit | TestKind::PmLogit)
    }

    /// Parses `wmw`, `n`, `bm`, `pm`, `n_logit`, `bm_logit`, `pm_logit`
    /// (case-insensitive, `-` accepted for `_`). `df` is attached to the
    /// t-test kinds.
    pub fn parse(name: &str, df: DfKind) -> Option<TestKind> {
        let mut buf = [0u8; 16];
        let bytes = name.as_bytes();
        if bytes.len() > buf.len() {
            return None;
        }
        for (dst, &b) in buf.iter_mut().zip(bytes) {
            *dst = if b == b'-' { b'_' } else { b.to_ascii_lowercase() };
        }
        Some(match &buf[..bytes.len()] {
            b"wmw" => TestKind::Wmw,
            b"n" => TestKind::N(df),
            b"bm" => TestKind::Bm(df),
            b"pm" => TestKind::Pm(df),
            b"n_logit" => TestKind::NLogit,
            b"bm_logit" => TestKind::BmLogit,
            b"pm_logit" => TestKind::PmLogit,
            _ => return None,
        })
    }

    fn base(self) -> Base {
        match self {
            TestKind::Wmw => Base::Wmw,
            TestKind::N(_) | TestKind::NLogit => Base::N,
            TestKind::Bm(_) | TestKind::BmLogit => Base::Bm,
            TestKind::Pm(_) | TestKind::PmLogit => Base::Pm,
        }
    }

    fn min_size(self) -> usize {
        self.df_kind().map_or(2, DfKind::min_size)
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.df_kind() {
            Some(d) => write!(f, "{}({})", self.name(), d.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TestResult {
    pub kind: TestKind,
    pub alternative: Alternative,
    pub statistic: f64,
    /// Present exactly for the N, BM and PM t-tests.
    pub df: Option<f64>,
    pub p_value: f64,
    /// The `p̂` entering the statistic, adjusted in separated samples.
    pub p_used: f64,
    pub degenerate: Degeneracy,
    pub variance: VarianceEstimate,
    pub effect: EffectSummary,
}

impl TestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

pub fn run_test(data: &TwoSamples, kind: TestKind) -> Result<TestResult> {
    run_test_with(data, kind, Alternative::TwoSided)
}

pub fn run_test_with(data: &TwoSamples, kind: TestKind, alternative: Alternative) -> Result<TestResult> {
    require_min(data.n1(), data.n2(), kind.min_size())?;
    let es = estimate_effect(data)?;
    let wmw = match kind {
        TestKind::Wmw => Some(var_wmw(data)?),
        _ => None,
    };
    evaluate(&es, wmw.as_ref(), kind, alternative)
}

/// Runs several kinds on the same data, sharing the effect summary.
pub fn run_tests(data: &TwoSamples, kinds: &[TestKind]) -> Result<Vec<TestResult>> {
    let min = kinds.iter().map(|k| k.min_size()).max().unwrap_or(2);
    require_min(data.n1(), data.n2(), min)?;
    let es = estimate_effect(data)?;
    let wmw = if kinds.contains(&TestKind::Wmw) {
        Some(var_wmw(data)?)
    } else {
        None
    };
    kinds
        .iter()
        .map(|&k| evaluate(&es, wmw.as_ref(), k, Alternative::TwoSided))
        .collect()
}

/// Variance estimate and statistic of a non-WMW kind from a summary alone.
pub(crate) fn statistic_from_summary(es: &EffectSummary, kind: TestKind) -> Result<(f64, f64, VarianceEstimate)> {
    let variance = match kind.base() {
        Base::N => var_unbiased(es)?,
        Base::Bm => var_bm(es)?,
        Base::Pm => var_pm(es)?,
        Base::Wmw => return Err(crate::Error::InvalidKind("WMW needs the pooled ranks")),
    };
    let p = es.adjusted_p_hat();
    let sd = libm::sqrt(variance.value);
    let statistic = if kind.is_logit() {
        p * (1.0 - p) * libm::log(p / (1.0 - p)) / sd
    } else {
        (p - 0.5) / sd
    };
    Ok((statistic, p, variance))
}

pub(crate) fn evaluate(
    es: &EffectSummary,
    wmw: Option<&VarianceEstimate>,
    kind: TestKind,
    alternative: Alternative,
) -> Result<TestResult> {
    let (statistic, p_used, variance) = match kind {
        TestKind::Wmw => {
            let v = *wmw.ok_or(crate::Error::InvalidKind("WMW needs the pooled ranks"))?;
            ((es.p_hat - 0.5) / libm::sqrt(v.value), es.p_hat, v)
        }
        _ => statistic_from_summary(es, kind)?,
    };
    let df = match kind.df_kind() {
        Some(d) => Some(degrees_of_freedom(es, d)?),
        None => None,
    };
    let p_value = p_value(statistic, df, alternative);
    Ok(TestResult {
        kind,
        alternative,
        statistic,
        df,
        p_value,
        p_used,
        degenerate: variance.degenerate,
        variance,
        effect: *es,
    })
}

/// p-value of a statistic against the standard normal (`df = None`) or a
/// central t.
pub fn p_value(statistic: f64, df: Option<f64>, alternative: Alternative) -> f64 {
    let two_sided = match df {
        Some(df) => t_two_sided_tail(statistic.abs(), df),
        None => 2.0 * normal_sf(statistic.abs()),
    };
    let two_sided = two_sided.clamp(0.0, 1.0);
    let upper = if statistic >= 0.0 {
        0.5 * two_sided
    } else {
        1.0 - 0.5 * two_sided
    };
    match alternative {
        Alternative::TwoSided => two_sided,
        Alternative::Greater => upper,
        Alternative::Less => 1.0 - upper,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::dist::{normal_cdf, t_cdf};
    use proptest::prelude::*;

    const ALL: [TestKind; 7] = TestKind::DEFAULT_BATTERY;

    fn toy() -> TwoSamples {
        TwoSamples::from_slices(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn toy_statistics() {
        let bm = run_test(&toy(), TestKind::Bm(DfKind::Df)).unwrap();
        let want = (5.0 / 18.0) / libm::sqrt(7.0 / 162.0);
        assert!((bm.statistic - want).abs() < 1e-14);
        assert!((bm.statistic - 1.336306).abs() < 1e-6);
        assert!((bm.df.unwrap() - 4.0).abs() < 1e-14);
        let expect_p = 2.0 * (1.0 - t_cdf(want, 4.0).unwrap());
        assert!((bm.p_value - expect_p).abs() < 1e-14);
        assert!((bm.p_value - 0.2524006).abs() < 1e-6);

        let w = run_test(&toy(), TestKind::Wmw).unwrap();
        let want = (5.0 / 18.0) / libm::sqrt(3.3 / 54.0);
        assert!((w.statistic - want).abs() < 1e-14);
        assert!((w.statistic - 1.1236664).abs() < 1e-6);
        assert!(w.df.is_none());
        assert!((w.p_value - 2.0 * (1.0 - normal_cdf(want))).abs() < 1e-14);

        let l = run_test(&toy(), TestKind::BmLogit).unwrap();
        let want = (14.0 / 81.0) * libm::log(3.5) / libm::sqrt(7.0 / 162.0);
        assert!((l.statistic - want).abs() < 1e-14);
        assert!((l.statistic - 1.04165).abs() < 1e-4);
    }

    #[test]
    fn identical_samples() {
        let d = TwoSamples::from_slices(&[1.0, 4.0, 2.5, 8.0], &[1.0, 4.0, 2.5, 8.0]).unwrap();
        for k in ALL {
            let r = run_test(&d, k).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p_value, 1.0);
        }
    }

    #[test]
    fn all_tied_and_separated() {
        let tied = TwoSamples::from_slices(&[2.0; 7], &[2.0; 7]).unwrap();
        for k in ALL {
            let r = run_test(&tied, k).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p_value, 1.0);
            assert_eq!(r.degenerate, Degeneracy::AllTied);
        }
        let lo: Vec<f64> = (0..7).map(f64::from).collect();
        let hi: Vec<f64> = (10..17).map(f64::from).collect();
        let sep = TwoSamples::from_slices(&lo, &hi).unwrap();
        for k in ALL {
            let r = run_test(&sep, k).unwrap();
            assert!(r.statistic.is_finite() && r.statistic > 0.0);
            assert!((0.0..=1.0).contains(&r.p_value));
            if k != TestKind::Wmw {
                assert_eq!(r.degenerate, Degeneracy::Separated);
                assert_eq!(r.p_used, 1.0 - 1.0 / 49.0);
                assert_eq!(r.variance.value, 1.0 / 2401.0);
            }
        }
        let r = run_test(&sep, TestKind::N(DfKind::Df)).unwrap();
        assert_eq!(r.df, Some(12.0));
        // (48/49 − 1/2) / (1/49)
        assert!((r.statistic - 23.5).abs() < 1e-12);
    }

    #[test]
    fn size_checks() {
        let d = TwoSamples::from_slices(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        assert!(run_test(&d, TestKind::Pm(DfKind::Df2)).is_err());
        assert!(run_test(&d, TestKind::Pm(DfKind::Df1)).is_ok());
        assert!(run_tests(&d, &ALL).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(TestKind::parse("BM", DfKind::Df), Some(TestKind::Bm(DfKind::Df)));
        assert_eq!(TestKind::parse("pm-logit", DfKind::Df), Some(TestKind::PmLogit));
        assert_eq!(TestKind::parse("xx", DfKind::Df), None);
        assert_eq!(TestKind::Pm(DfKind::Df2).to_string(), "PM(df2)");
    }

    #[test]
    fn one_sided() {
        let r = run_test_with(&toy(), TestKind::Bm(DfKind::Df), Alternative::Greater).unwrap();
        let two = run_test(&toy(), TestKind::Bm(DfKind::Df)).unwrap();
        assert!((r.p_value - two.p_value / 2.0).abs() < 1e-15);
        let l = run_test_with(&toy(), TestKind::Bm(DfKind::Df), Alternative::Less).unwrap();
        assert!((l.p_value + r.p_value - 1.0).abs() < 1e-15);
    }

    fn arms() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        let arm = prop::collection::vec((0i32..6).prop_map(f64::from), 4..20);
        (arm.clone(), arm)
    }

    proptest! {
        #[test]
        fn swap_antisymmetry((a, b) in arms()) {
            let d = TwoSamples::from_slices(&a, &b).unwrap();
            let fwd = run_tests(&d, &ALL).unwrap();
            let bwd = run_tests(&d.swapped(), &ALL).unwrap();
            for (x, y) in fwd.iter().zip(&bwd) {
                prop_assert!((x.statistic + y.statistic).abs() < 1e-9 * (1.0 + x.statistic.abs()));
                prop_assert!((x.p_value - y.p_value).abs() < 1e-9);
            }
        }

        #[test]
        fn logit_sign_agrees((a, b) in arms()) {
            let d = TwoSamples::from_slices(&a, &b).unwrap();
            let r = run_tests(&d, &ALL).unwrap();
            for (plain, logit) in [(1, 4), (2, 5), (3, 6)] {
                if r[plain].effect.p_hat != 0.5 {
                    prop_assert_eq!(r[plain].statistic.signum(), r[logit].statistic.signum());
                }
            }
            for x in &r {
                prop_assert!(x.statistic.is_finite());
                prop_assert!((0.0..=1.0).contains(&x.p_value));
            }
        }

        #[test]
        fn p_value_decreasing(t in 0.0f64..10.0, dt in 1e-3f64..1.0, df in 1.0f64..100.0) {
            let a = p_value(t, Some(df), Alternative::TwoSided);
            let b = p_value(t + dt, Some(df), Alternative::TwoSided);
            prop_assert!(b < a);
            let a = p_value(t, None, Alternative::TwoSided);
            let b = p_value(t + dt, None, Alternative::TwoSided);
            prop_assert!(b <= a);
        }
    }
}
