//! Degrees of freedom for the t-approximation.
//!
//! `Df`, `Df1` and `Df2` are Satterthwaite-type formulas on the
//! Brunner-Munzel group variances, with `n_g` reduced by 0, 1 and 2.
//! `Df3` is data free and `Df4` is a Box-type formula on the split of the
//! unbiased variance. When the data make a formula's denominator vanish
//! (separated or all-tied samples), the two group variances are taken to be
//! equal and positive instead.

use crate::effect::EffectSummary;
use crate::error::{require_min, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DfKind {
    Df,
    Df1,
    #[default]
    Df2,
    Df3,
    Df4,
}

impl DfKind {
    pub const ALL: [DfKind; 5] = [DfKind::Df, DfKind::Df1, DfKind::Df2, DfKind::Df3, DfKind::Df4];

    /// Smallest per-arm size for which the formula is defined.
    pub fn min_size(self) -> usize {
        match self {
            DfKind::Df1 => 3,
            DfKind::Df2 => 4,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DfKind::Df => "df",
            DfKind::Df1 => "df1",
            DfKind::Df2 => "df2",
            DfKind::Df3 => "df3",
            DfKind::Df4 => "df4",
        }
    }

    pub fn parse(s: &str) -> Option<DfKind> {
        DfKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

pub fn degrees_of_freedom(es: &EffectSummary, kind: DfKind) -> Result<f64> {
    require_min(es.n1, es.n2, kind.min_size())?;
    let (n1, n2) = (es.n1 as f64, es.n2 as f64);
    let df = match kind {
        DfKind::Df | DfKind::Df1 | DfKind::Df2 => {
            let shift = match kind {
                DfKind::Df => 0.0,
                DfKind::Df1 => 1.0,
                _ => 2.0,
            };
            let v = satterthwaite(es.sigma1_sq, es.sigma2_sq, n1, n2, shift);
            if usable(v) {
                v
            } else {
                satterthwaite_equal(es.n1, es.n2, shift as u64)
            }
        }
        DfKind::Df3 => 2.0 / (1.0 / (n1 - 1.0) + 1.0 / (n2 - 1.0)),
        DfKind::Df4 => {
            let v = box_type(es.sigma1_given_n_sq, es.sigma2_given_n_sq, n1, n2);
            if usable(v) {
                v
            } else {
                let (a, b) = (es.n1 as u128 - 1, es.n2 as u128 - 1);
                (4 * a * b) as f64 / (a + b) as f64
            }
        }
    };
    Ok(df)
}

fn usable(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

/// Satterthwaite form with effective sizes `n_g − shift`:
/// `(s1/m1 + s2/m2)² / (s1²/(m1²(m1−1)) + s2²/(m2²(m2−1)))`.
fn satterthwaite(s1: f64, s2: f64, n1: f64, n2: f64, shift: f64) -> f64 {
    let (m1, m2) = (n1 - shift, n2 - shift);
    let num = s1 / m1 + s2 / m2;
    let den = s1 * s1 / (m1 * m1 * (m1 - 1.0)) + s2 * s2 / (m2 * m2 * (m2 - 1.0));
    num * num / den
}

/// [`satterthwaite`] with `s1 = s2 > 0`, as an exact integer ratio:
/// `(m1+m2)² (m1−1)(m2−1) / (m1²(m1−1) + m2²(m2−1))`.
fn satterthwaite_equal(n1: usize, n2: usize, shift: u64) -> f64 {
    let (m1, m2) = (n1 as u128 - shift as u128, n2 as u128 - shift as u128);
    let num = (m1 + m2) * (m1 + m2) * (m1 - 1) * (m2 - 1);
    let den = m1 * m1 * (m1 - 1) + m2 * m2 * (m2 - 1);
    num as f64 / den as f64
}

/// `σ̂⁴_N / (σ̂⁴_{1|N}/(n1−1) + σ̂⁴_{2|N}/(n2−1))` with `σ̂²_N` the sum of
/// the two parts.
fn box_type(s1: f64, s2: f64, n1: f64, n2: f64) -> f64 {
    let total = s1 + s2;
    total * total / (s1 * s1 / (n1 - 1.0) + s2 * s2 / (n2 - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effect::estimate_effect;
    use crate::ranks::TwoSamples;
    use proptest::prelude::*;

    fn summary(n1: usize, n2: usize, s1: f64, s2: f64) -> EffectSummary {
        EffectSummary {
            n1,
            n2,
            p_hat: 0.5,
            beta_hat: 0.0,
            tau0_hat: 0.5,
            tau1_hat: 0.3,
            tau2_hat: 0.3,
            sigma1_sq: s1,
            sigma2_sq: s2,
            sigma1_given_n_sq: s1,
            sigma2_given_n_sq: s2,
        }
    }

    #[test]
    fn df3_and_toy() {
        assert_eq!(degrees_of_freedom(&summary(7, 7, 0.1, 0.2), DfKind::Df3).unwrap(), 6.0);
        let d = TwoSamples::from_slices(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
        let es = estimate_effect(&d).unwrap();
        assert!((degrees_of_freedom(&es, DfKind::Df).unwrap() - 4.0).abs() < 1e-14);
        assert!((degrees_of_freedom(&es, DfKind::Df4).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn fallbacks() {
        let es = summary(7, 7, 0.0, 0.0);
        assert_eq!(degrees_of_freedom(&es, DfKind::Df).unwrap(), 12.0);
        assert_eq!(degrees_of_freedom(&es, DfKind::Df1).unwrap(), 10.0);
        assert_eq!(degrees_of_freedom(&es, DfKind::Df2).unwrap(), 8.0);
        assert_eq!(degrees_of_freedom(&es, DfKind::Df4).unwrap(), 12.0);
        // N²(n1−1)(n2−1)/(n1²(n1−1)+n2²(n2−1)) for unequal sizes
        let es = summary(5, 9, 0.0, 0.0);
        let expect = 196.0 * 4.0 * 8.0 / (25.0 * 4.0 + 81.0 * 8.0);
        assert!((degrees_of_freedom(&es, DfKind::Df).unwrap() - expect).abs() < 1e-12);
        let expect4 = 4.0 * 4.0 * 8.0 / 12.0;
        assert!((degrees_of_freedom(&es, DfKind::Df4).unwrap() - expect4).abs() < 1e-12);
    }

    #[test]
    fn size_requirements() {
        assert!(degrees_of_freedom(&summary(3, 10, 0.1, 0.1), DfKind::Df2).is_err());
        assert!(degrees_of_freedom(&summary(3, 10, 0.1, 0.1), DfKind::Df1).is_ok());
        assert!(degrees_of_freedom(&summary(2, 10, 0.1, 0.1), DfKind::Df1).is_err());
        assert!(degrees_of_freedom(&summary(2, 2, 0.1, 0.1), DfKind::Df).is_ok());
    }

    #[test]
    fn symmetric_closed_forms() {
        for n in 4..=50usize {
            let es = summary(n, n, 0.07, 0.07);
            let m = n as f64;
            let cases = [
                (DfKind::Df, 2.0 * (m - 1.0)),
                (DfKind::Df1, 2.0 * (m - 2.0)),
                (DfKind::Df2, 2.0 * (m - 3.0)),
                (DfKind::Df3, m - 1.0),
                (DfKind::Df4, 2.0 * (m - 1.0)),
            ];
            for (k, want) in cases {
                assert!((degrees_of_freedom(&es, k).unwrap() - want).abs() < 1e-10, "{k:?} n={n}");
            }
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!(DfKind::parse("DF2"), Some(DfKind::Df2));
        assert_eq!(DfKind::parse("df"), Some(DfKind::Df));
        assert_eq!(DfKind::parse("df5"), None);
    }

    proptest! {
        #[test]
        fn scale_invariance(n1 in 4usize..60, n2 in 4usize..60, s1 in 1e-4f64..1.0, s2 in 1e-4f64..1.0, lam in 1e-3f64..1e3) {
            for k in [DfKind::Df, DfKind::Df1, DfKind::Df2] {
                let a = degrees_of_freedom(&summary(n1, n2, s1, s2), k).unwrap();
                let b = degrees_of_freedom(&summary(n1, n2, lam * s1, lam * s2), k).unwrap();
                prop_assert!((a - b).abs() < 1e-9 * a);
            }
        }

        #[test]
        fn df_bounds(n1 in 2usize..80, n2 in 2usize..80, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
            let df = degrees_of_freedom(&summary(n1, n2, s1, s2), DfKind::Df).unwrap();
            let lo = (n1.min(n2) - 1) as f64;
            let hi = (n1 + n2 - 2) as f64;
            prop_assert!(df >= lo - 1e-9 && df <= hi + 1e-9);
        }
    }
}
