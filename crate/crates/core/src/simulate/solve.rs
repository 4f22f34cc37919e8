//! Calibrating one distribution parameter to a target effect.

use crate::error::{Error, Result};
use crate::simulate::dist::DistSpec;
use crate::simulate::population::exact_mw_parameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(rename_all = "snake_case"))]
pub enum FreeParam {
    NormalMean,
    ExponentialRate,
    BinomialProb,
    BetaAlpha,
    BetaBeta,
}

impl FreeParam {
    /// Search interval used when none is given.
    pub fn default_bracket(self) -> (f64, f64) {
        match self {
            FreeParam::NormalMean => (-50.0, 50.0),
            FreeParam::ExponentialRate => (1e-6, 1e6),
            FreeParam::BinomialProb => (1e-9, 1.0 - 1e-9),
            FreeParam::BetaAlpha | FreeParam::BetaBeta => (1e-3, 1e3),
        }
    }

    /// Positive-scale parameters are bisected on the log scale.
    fn log_scale(self) -> bool {
        matches!(self, FreeParam::ExponentialRate | FreeParam::BetaAlpha | FreeParam::BetaBeta)
    }

    fn apply(self, template: &DistSpec, value: f64) -> Result<DistSpec> {
        let mut d = *template;
        match (self, &mut d) {
            (FreeParam::NormalMean, DistSpec::Normal { mean, .. }) => *mean = value,
            (FreeParam::ExponentialRate, DistSpec::Exponential { rate }) => *rate = value,
            (FreeParam::BinomialProb, DistSpec::Binomial { prob, .. }) => *prob = value,
            (FreeParam::BetaAlpha, DistSpec::BetaLatent { alpha, .. }) => *alpha = value,
            (FreeParam::BetaBeta, DistSpec::BetaLatent { beta, .. }) => *beta = value,
            _ => return Err(Error::InvalidSpec("free parameter does not belong to the template family")),
        }
        Ok(d)
    }
}

/// Finds the value of `free` in `template` that makes
/// `exact_mw_parameter(template, reference)` equal `target`.
pub fn solve_target_effect(template: &DistSpec, free: FreeParam, reference: &DistSpec, target: f64) -> Result<f64> {
    let (lo, hi) = free.default_bracket();
    solve_in_bracket(template, free, reference, target, lo, hi)
}

pub fn solve_in_bracket(
    template: &DistSpec,
    free: FreeParam,
    reference: &DistSpec,
    target: f64,
    low: f64,
    high: f64,
) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::Domain("target effect must lie in (0, 1)"));
    }
    let to_x = |v: f64| if free.log_scale() { libm::log(v) } else { v };
    let from_x = |x: f64| if free.log_scale() { libm::exp(x) } else { x };
    let gap = |x: f64| -> Result<f64> {
        Ok(exact_mw_parameter(&free.apply(template, from_x(x))?, reference)? - target)
    };

    let (mut a, mut b) = (to_x(low), to_x(high));
    let (ga, gb) = (gap(a)?, gap(b)?);
    if ga == 0.0 {
        return Ok(low);
    }
    if gb == 0.0 {
        return Ok(high);
    }
    if (ga > 0.0) == (gb > 0.0) {
        return Err(Error::NoBracket { target, low, high });
    }
    let a_positive = ga > 0.0;
    // run to the resolution of the parameter, well past the 1e-6 effect tolerance
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let gm = gap(m)?;
        if gm == 0.0 {
            return Ok(from_x(m));
        }
        if (gm > 0.0) == a_positive {
            a = m;
        } else {
            b = m;
        }
    }
    let root = from_x(0.5 * (a + b));
    debug_assert!(libm::fabs(gap(to_x(root))?) < 1e-6);
    Ok(root)
}
