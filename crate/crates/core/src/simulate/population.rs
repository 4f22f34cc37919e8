//! Exact population values of the effect and of `σ²_N`.
//!
//! With normalized CDFs `F1`, `F2`:
//! `p = ∫F1 dF2`, `β = P(X1 = X2)`, `τ0 = p − β/4`,
//! `τ1 = ∫(1 − F2)² dF1` and `τ2 = ∫F1² dF2`.

use alloc::vec::Vec;

use crate::dist::normal_cdf;
use crate::error::{Error, Result};
use crate::simulate::dist::DistSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PopulationMoments {
    pub p: f64,
    pub beta: f64,
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl PopulationMoments {
    /// Variance of `p̂` at sizes `n1`, `n2`:
    /// `(τ0 + (n2−1)τ1 + (n1−1)τ2 − (N−1)p²) / (n1 n2)`.
    pub fn variance(&self, n1: usize, n2: usize) -> f64 {
        let (a, b) = (n1 as f64, n2 as f64);
        (self.tau0 + (b - 1.0) * self.tau1 + (a - 1.0) * self.tau2 - (a + b - 1.0) * self.p * self.p) / (a * b)
    }
}

pub fn exact_mw_parameter(d1: &DistSpec, d2: &DistSpec) -> Result<f64> {
    d1.validate()?;
    d2.validate()?;
    match (*d1, *d2) {
        (DistSpec::Normal { mean: m1, sd: s1 }, DistSpec::Normal { mean: m2, sd: s2 }) => {
            Ok(normal_cdf((m2 - m1) / libm::sqrt(s1 * s1 + s2 * s2)))
        }
        (DistSpec::Exponential { rate: l1 }, DistSpec::Exponential { rate: l2 }) => Ok(l1 / (l1 + l2)),
        _ => Ok(population_moments(d1, d2)?.p),
    }
}

pub fn population_moments(d1: &DistSpec, d2: &DistSpec) -> Result<PopulationMoments> {
    d1.validate()?;
    d2.validate()?;
    match (*d1, *d2) {
        (DistSpec::Normal { mean: m1, sd: s1 }, DistSpec::Normal { mean: m2, sd: s2 }) => {
            let p = normal_cdf((m2 - m1) / libm::sqrt(s1 * s1 + s2 * s2));
            // X1 = m1 + s1 z: 1 − F2(X1) = Φ((m2 − m1 − s1 z)/s2)
            let tau1 = normal_expectation(|z| {
                let v = normal_cdf((m2 - m1 - s1 * z) / s2);
                v * v
            });
            let tau2 = normal_expectation(|z| {
                let v = normal_cdf((m2 + s2 * z - m1) / s1);
                v * v
            });
            Ok(PopulationMoments { p, beta: 0.0, tau0: p, tau1, tau2 })
        }
        (DistSpec::Exponential { rate: l1 }, DistSpec::Exponential { rate: l2 }) => {
            let p = l1 / (l1 + l2);
            let tau1 = l1 / (l1 + 2.0 * l2);
            let tau2 = 1.0 - 2.0 * l2 / (l1 + l2) + l2 / (2.0 * l1 + l2);
            Ok(PopulationMoments { p, beta: 0.0, tau0: p, tau1, tau2 })
        }
        _ => match (d1.pmf(), d2.pmf()) {
            (Some(a), Some(b)) => Ok(discrete_moments(&a, &b)),
            _ => Err(Error::Unsupported("exact moments need two normal, two exponential or two discrete specs")),
        },
    }
}

/// Variance of `p̂` for the given pair and sizes.
pub fn true_variance(d1: &DistSpec, d2: &DistSpec, n1: usize, n2: usize) -> Result<f64> {
    Ok(population_moments(d1, d2)?.variance(n1, n2))
}

fn discrete_moments(a: &[(f64, f64)], b: &[(f64, f64)]) -> PopulationMoments {
    let mut support: Vec<f64> = a.iter().chain(b).map(|&(x, _)| x).collect();
    support.sort_by(f64::total_cmp);
    support.dedup();
    let mass = |pmf: &[(f64, f64)], x: f64| pmf.iter().find(|&&(y, _)| y == x).map_or(0.0, |&(_, m)| m);

    let (mut below1, mut below2) = (0.0, 0.0);
    let (mut p, mut beta, mut tau1, mut tau2) = (0.0, 0.0, 0.0, 0.0);
    for &x in &support {
        let (m1, m2) = (mass(a, x), mass(b, x));
        let f1 = below1 + 0.5 * m1;
        let f2 = below2 + 0.5 * m2;
        p += m2 * f1;
        beta += m1 * m2;
        tau1 += m1 * (1.0 - f2) * (1.0 - f2);
        tau2 += m2 * f1 * f1;
        below1 += m1;
        below2 += m2;
    }
    PopulationMoments { p, beta, tau0: p - beta / 4.0, tau1, tau2 }
}

/// `E[g(Z)]` for standard normal `Z`, by adaptive Simpson on `[−12, 12]`.
fn normal_expectation(g: impl Fn(f64) -> f64) -> f64 {
    let inv_sqrt_2pi = 0.398_942_280_401_432_7;
    let f = |z: f64| g(z) * inv_sqrt_2pi * libm::exp(-0.5 * z * z);
    // split at 0 so the peak is never skipped by the first coarse estimate
    adaptive_simpson(&f, -12.0, 0.0, 1e-12) + adaptive_simpson(&f, 0.0, 12.0, 1e-12)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let p = exact_mw_parameter(&DistSpec::normal(-0.7416, 1.0), &DistSpec::normal(0.0, 1.0)).unwrap();
        assert!((p - 0.7).abs() < 5e-5);
        let p = exact_mw_parameter(&DistSpec::exponential(2.33333), &DistSpec::exponential(1.0)).unwrap();
        assert!((p - 0.7).abs() < 1e-5);
        for d in [
            DistSpec::normal(1.0, 2.0),
            DistSpec::exponential(0.3),
            DistSpec::binomial(5, 0.4),
            DistSpec::beta_latent(5.0, 4.0, 5),
        ] {
            assert!((exact_mw_parameter(&d, &d).unwrap() - 0.5).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn uniform_three_point() {
        // uniform on {1,2,3} is a latent Beta(1,1) cut into 3 categories
        let d = DistSpec::beta_latent(1.0, 1.0, 3);
        let m = population_moments(&d, &d).unwrap();
        assert!((m.p - 0.5).abs() < 1e-15);
        assert!((m.beta - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.tau1 - 35.0 / 108.0).abs() < 1e-15);
        assert!((m.tau2 - 35.0 / 108.0).abs() < 1e-15);
        assert!((m.variance(3, 3) - 25.0 / 486.0).abs() < 1e-15);
    }

    #[test]
    fn variance_values() {
        let n = DistSpec::normal(0.0, 1.0);
        let v = true_variance(&n, &n, 7, 7).unwrap();
        assert!((v - 15.0 / 588.0).abs() < 1e-10);
        let v = true_variance(&n, &DistSpec::normal(0.0, 3.0), 7, 7).unwrap();
        assert!((v - 0.02887661).abs() < 1e-8, "{v}");
        let b = DistSpec::beta_latent(5.0, 4.0, 5);
        let v = true_variance(&b, &b, 7, 7).unwrap();
        assert!((v - 0.02135081).abs() < 1e-8, "{v}");
    }

    #[test]
    fn continuous_equal_case() {
        // (N+1)/(12 n1 n2) for identical continuous distributions
        let e = DistSpec::exponential(1.7);
        for (n1, n2) in [(7, 7), (15, 45), (30, 10)] {
            let v = true_variance(&e, &e, n1, n2).unwrap();
            let want = (n1 + n2 + 1) as f64 / (12 * n1 * n2) as f64;
            assert!((v - want).abs() < 1e-14);
        }
        let m = population_moments(&DistSpec::normal(0.3, 2.0), &DistSpec::normal(0.3, 2.0)).unwrap();
        assert!((m.tau1 - 1.0 / 3.0).abs() < 1e-10);
        assert!((m.tau2 - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn mixed_pairs_unsupported() {
        let r = population_moments(&DistSpec::normal(0.0, 1.0), &DistSpec::binomial(3, 0.5));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
