//! Distribution families and samplers.

use alloc::vec::Vec;
use core::fmt;

use rand::RngCore;

use crate::dist::{normal_quantile, reg_inc_beta};
use crate::error::{Error, Result};
use crate::rng::open_uniform;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(tag = "family", rename_all = "snake_case")
)]
pub enum DistSpec {
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    /// Bernoulli is `trials = 1`.
    Binomial { trials: u32, prob: f64 },
    /// A `Beta(alpha, beta)` variate cut at `j/k` into categories `1..=k`:
    /// category `j` collects `[(j−1)/k, j/k)`.
    BetaLatent { alpha: f64, beta: f64, k: u32 },
}

impl DistSpec {
    pub fn normal(mean: f64, sd: f64) -> Self {
        DistSpec::Normal { mean, sd }
    }

    pub fn exponential(rate: f64) -> Self {
        DistSpec::Exponential { rate }
    }

    pub fn binomial(trials: u32, prob: f64) -> Self {
        DistSpec::Binomial { trials, prob }
    }

    pub fn beta_latent(alpha: f64, beta: f64, k: u32) -> Self {
        DistSpec::BetaLatent { alpha, beta, k }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            DistSpec::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            DistSpec::Exponential { rate } => rate.is_finite() && rate > 0.0,
            DistSpec::Binomial { trials, prob } => trials >= 1 && prob > 0.0 && prob < 1.0,
            DistSpec::BetaLatent { alpha, beta, k } => {
                alpha.is_finite() && beta.is_finite() && alpha > 0.0 && beta > 0.0 && k >= 2
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(match self {
                DistSpec::Normal { .. } => "normal needs a finite mean and sd > 0",
                DistSpec::Exponential { .. } => "exponential needs rate > 0",
                DistSpec::Binomial { .. } => "binomial needs trials >= 1 and 0 < prob < 1",
                DistSpec::BetaLatent { .. } => "latent beta needs alpha, beta > 0 and k >= 2",
            }))
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, DistSpec::Binomial { .. } | DistSpec::BetaLatent { .. })
    }

    /// Support points and masses of a discrete spec, in increasing order.
    pub fn pmf(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            DistSpec::Binomial { trials, prob } => {
                let n = trials as f64;
                let ln_p = libm::log(prob);
                let ln_q = libm::log1p(-prob);
                Some(
                    (0..=trials)
                        .map(|j| {
                            let x = j as f64;
                            let ln_c = crate::dist::ln_gamma(n + 1.0)
                                - crate::dist::ln_gamma(x + 1.0)
                                - crate::dist::ln_gamma(n - x + 1.0);
                            (x, libm::exp(ln_c + x * ln_p + (n - x) * ln_q))
                        })
                        .collect(),
                )
            }
            DistSpec::BetaLatent { alpha, beta, k } => {
                let kf = k as f64;
                let mut prev = 0.0;
                Some(
                    (1..=k)
                        .map(|j| {
                            let cdf = if j == k {
                                1.0
                            } else {
                                reg_inc_beta(j as f64 / kf, alpha, beta)
                            };
                            let m = cdf - prev;
                            prev = cdf;
                            (j as f64, m)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    pub fn sample_one<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistSpec::Normal { mean, sd } => {
                // inverse CDF: exactly one uniform per draw
                let z = normal_quantile(open_uniform(rng)).unwrap_or(0.0);
                mean + sd * z
            }
            DistSpec::Exponential { rate } => -libm::log(open_uniform(rng)) / rate,
            DistSpec::Binomial { trials, prob } => binomial_inverse(trials, prob, open_uniform(rng)),
            DistSpec::BetaLatent { alpha, beta, k } => {
                let y = sample_beta(alpha, beta, rng);
                let j = libm::floor(y * k as f64) as u32 + 1;
                j.min(k) as f64
            }
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DistSpec::Normal { mean, sd } => write!(f, "N({mean},{sd})"),
            DistSpec::Exponential { rate } => write!(f, "E({rate})"),
            DistSpec::Binomial { trials, prob } => write!(f, "B({trials},{prob})"),
            DistSpec::BetaLatent { alpha, beta, k } => write!(f, "Beta{k}({alpha},{beta})"),
        }
    }
}

fn binomial_inverse(trials: u32, prob: f64, u: f64) -> f64 {
    // walk the CDF with the pmf recurrence
    let q = 1.0 - prob;
    let ratio = prob / q;
    let mut pmf = libm::exp(trials as f64 * libm::log1p(-prob));
    let mut cdf = pmf;
    let mut j = 0u32;
    while u > cdf && j < trials {
        pmf *= ratio * (trials - j) as f64 / (j + 1) as f64;
        j += 1;
        cdf += pmf;
    }
    j as f64
}

/// Beta variate: Jöhnk's method when both shapes are at most 1, otherwise
/// Cheng's BB (both above 1) or BC.
pub fn sample_beta<R: RngCore + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    if a <= 1.0 && b <= 1.0 {
        johnk(a, b, rng)
    } else if a.min(b) > 1.0 {
        cheng_bb(a, b, rng)
    } else {
        cheng_bc(a, b, rng)
    }
}

fn johnk<R: RngCore + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    loop {
        // log space avoids underflow of u^(1/a) for small shapes
        let lx = libm::log(open_uniform(rng)) / a;
        let ly = libm::log(open_uniform(rng)) / b;
        let m = lx.max(ly);
        let (ex, ey) = (libm::exp(lx - m), libm::exp(ly - m));
        if m + libm::log(ex + ey) <= 0.0 {
            return ex / (ex + ey);
        }
    }
}

const LN4: f64 = 1.386_294_361_119_890_6;

fn cheng_bb<R: RngCore + ?Sized>(aa: f64, bb: f64, rng: &mut R) -> f64 {
    let a = aa.min(bb);
    let b = aa.max(bb);
    let alpha = a + b;
    let beta = libm::sqrt((alpha - 2.0) / (2.0 * a * b - alpha));
    let gamma = a + 1.0 / beta;
    let w = loop {
        let u1 = open_uniform(rng);
        let u2 = open_uniform(rng);
        let v = beta * libm::log(u1 / (1.0 - u1));
        let w = a * libm::exp(v);
        let z = u1 * u1 * u2;
        let r = gamma * v - LN4;
        let s = a + r - w;
        if s + 2.609438 >= 5.0 * z {
            break w;
        }
        let t = libm::log(z);
        if s > t {
            break w;
        }
        if r + alpha * libm::log(alpha / (b + w)) >= t {
            break w;
        }
    };
    if aa == a {
        w / (b + w)
    } else {
        b / (b + w)
    }
}

fn cheng_bc<R: RngCore + ?Sized>(aa: f64, bb: f64, rng: &mut R) -> f64 {
    let a = aa.max(bb);
    let b = aa.min(bb);
    let alpha = a + b;
    let beta = 1.0 / b;
    let delta = 1.0 + a - b;
    let k1 = delta * (0.0138889 + 0.0416667 * b) / (a * beta - 0.777778);
    let k2 = 0.25 + (0.5 + 0.25 / delta) * b;
    let w = loop {
        let u1 = open_uniform(rng);
        let u2 = open_uniform(rng);
        let z;
        if u1 < 0.5 {
            let y = u1 * u2;
            z = u1 * y;
            if 0.25 * u2 + z - y >= k1 {
                continue;
            }
        } else {
            z = u1 * u1 * u2;
            if z <= 0.25 {
                let v = beta * libm::log(u1 / (1.0 - u1));
                break a * libm::exp(v);
            }
            if z >= k2 {
                continue;
            }
        }
        let v = beta * libm::log(u1 / (1.0 - u1));
        let w = a * libm::exp(v);
        if alpha * (libm::log(alpha / (b + w)) + v) - LN4 >= libm::log(z) {
            break w;
        }
    };
    let w = if w.is_finite() { w } else { f64::MAX };
    if aa == a {
        w / (b + w)
    } else {
        b / (b + w)
    }
}
