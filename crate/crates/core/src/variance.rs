//! Variance estimators of `p̂`.
//!
//! Every estimator returns both the formula value (`raw`) and a strictly
//! positive `value` for studentization. Degenerate samples are handled as
//! follows:
//!
//! * all values tied: WMW uses `1/(4 n1 n2)`, PM's formula already gives that
//!   value, every other estimator is floored;
//! * one arm entirely above the other: floored;
//! * any other raw value below the floor `1/(n1² n2²)`: floored.
//!
//! WMW is only adjusted in the all-tied case.

use crate::effect::EffectSummary;
use crate::error::{require_min, Result};
use crate::ranks::{count2, doubled_mid_ranks, ecdf, EcdfFlavor, TwoSamples};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum VarianceKind {
    Wmw,
    N,
    Bm,
    Pm,
    ShU,
    ShB,
    ShFp,
    ShJ,
}

impl VarianceKind {
    pub fn name(self) -> &'static str {
        match self {
            VarianceKind::Wmw => "WMW",
            VarianceKind::N => "N",
            VarianceKind::Bm => "BM",
            VarianceKind::Pm => "PM",
            VarianceKind::ShU => "SH_U",
            VarianceKind::ShB => "SH_B",
            VarianceKind::ShFp => "SH_FP",
            VarianceKind::ShJ => "SH_J",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Degeneracy {
    #[default]
    None,
    AllTied,
    Separated,
    Floored,
}

impl Degeneracy {
    pub fn name(self) -> &'static str {
        match self {
            Degeneracy::None => "none",
            Degeneracy::AllTied => "all_tied",
            Degeneracy::Separated => "separated",
            Degeneracy::Floored => "floored",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Warning {
    /// A continuity-reduced Shirahata form was evaluated on data with
    /// cross-arm ties, where it no longer equals the general form.
    TiesInReducedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarianceEstimate {
    pub kind: VarianceKind,
    pub raw: f64,
    pub value: f64,
    pub degenerate: Degeneracy,
    pub warning: Option<Warning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShirahataKind {
    U,
    B,
    Fp,
    J,
}

impl ShirahataKind {
    fn variance_kind(self) -> VarianceKind {
        match self {
            ShirahataKind::U => VarianceKind::ShU,
            ShirahataKind::B => VarianceKind::ShB,
            ShirahataKind::Fp => VarianceKind::ShFp,
            ShirahataKind::J => VarianceKind::ShJ,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShirahataForm {
    /// Plus/minus empirical distribution functions, valid with ties.
    General,
    /// The `τ̂` expressions, equal to the general form without cross ties.
    ContinuousReduced,
}

/// `1/(n1² n2²)`.
pub fn variance_floor(n1: usize, n2: usize) -> f64 {
    let nn = n1 as f64 * n2 as f64;
    1.0 / (nn * nn)
}

fn floored(
    kind: VarianceKind,
    raw: f64,
    n1: usize,
    n2: usize,
    all_tied: bool,
    separated: bool,
) -> VarianceEstimate {
    let floor = variance_floor(n1, n2);
    let value = if raw < floor { floor } else { raw };
    let degenerate = if all_tied {
        Degeneracy::AllTied
    } else if separated {
        Degeneracy::Separated
    } else if raw < floor {
        Degeneracy::Floored
    } else {
        Degeneracy::None
    };
    VarianceEstimate {
        kind,
        raw,
        value,
        degenerate,
        warning: None,
    }
}

/// Pooled-rank variance, valid under `F1 = F2`:
/// `Σ (R_k − (N+1)/2)² / (N − 1) / (N n1 n2)`.
pub fn var_wmw(data: &TwoSamples) -> Result<VarianceEstimate> {
    let (n1, n2) = (data.n1(), data.n2());
    require_min(n1, n2, 2)?;
    let n = (n1 + n2) as i128;
    // doubled ranks keep the sum of squares an exact integer
    let ss: i128 = doubled_mid_ranks(&data.pooled())
        .into_iter()
        .map(|r| {
            let d = r as i128 - (n + 1);
            d * d
        })
        .sum();
    let den = 4.0 * (n - 1) as f64 * n as f64 * n1 as f64 * n2 as f64;
    let raw = ss as f64 / den;
    Ok(if ss == 0 {
        VarianceEstimate {
            kind: VarianceKind::Wmw,
            raw,
            value: 1.0 / (4.0 * n1 as f64 * n2 as f64),
            degenerate: Degeneracy::AllTied,
            warning: None,
        }
    } else {
        VarianceEstimate {
            kind: VarianceKind::Wmw,
            raw,
            value: raw,
            degenerate: Degeneracy::None,
            warning: None,
        }
    })
}

/// The WMW variance through `N³/(N−1) (∫F̂² dF̂ − 1/4) / (N n1 n2)` with the
/// pooled normalized distribution function. `O(N²)`, returns the raw value.
pub fn var_wmw_integral(data: &TwoSamples) -> Result<f64> {
    let (n1, n2) = (data.n1(), data.n2());
    require_min(n1, n2, 2)?;
    let pooled = data.pooled();
    let n = pooled.len() as f64;
    let int_f2 = pooled
        .iter()
        .map(|&x| {
            let f = ecdf(&pooled, x, EcdfFlavor::Normalized);
            f * f
        })
        .sum::<f64>()
        / n;
    let sigma_r = n * n * n / (n - 1.0) * (int_f2 - 0.25);
    Ok(sigma_r / (n * n1 as f64 * n2 as f64))
}

/// Unbiased estimator
/// `[n2 τ̂1 + n1 τ̂2 − τ̂0 − (N−1) p̂²] / ((n1−1)(n2−1))`.
pub fn var_unbiased(es: &EffectSummary) -> Result<VarianceEstimate> {
    require_min(es.n1, es.n2, 2)?;
    let (n1, n2) = (es.n1 as f64, es.n2 as f64);
    let raw = (n2 * es.tau1_hat + n1 * es.tau2_hat
        - es.tau0_hat
        - (n1 + n2 - 1.0) * es.p_hat * es.p_hat)
        / ((n1 - 1.0) * (n2 - 1.0));
    Ok(floored(VarianceKind::N, raw, es.n1, es.n2, es.all_tied(), es.separated()))
}

/// Brunner-Munzel estimator `σ̂1²/n1 + σ̂2²/n2`.
pub fn var_bm(es: &EffectSummary) -> Result<VarianceEstimate> {
    require_min(es.n1, es.n2, 2)?;
    let raw = es.sigma1_sq / es.n1 as f64 + es.sigma2_sq / es.n2 as f64;
    Ok(floored(VarianceKind::Bm, raw, es.n1, es.n2, es.all_tied(), es.separated()))
}

/// Perme-Manevski estimator
/// `[p̂(1−p̂) + (n2−1) σ̂1² + (n1−1) σ̂2²] / (n1 n2)`.
pub fn var_pm(es: &EffectSummary) -> Result<VarianceEstimate> {
    require_min(es.n1, es.n2, 2)?;
    let (n1, n2) = (es.n1 as f64, es.n2 as f64);
    let raw = (es.p_hat * (1.0 - es.p_hat) + (n2 - 1.0) * es.sigma1_sq + (n1 - 1.0) * es.sigma2_sq)
        / (n1 * n2);
    Ok(floored(VarianceKind::Pm, raw, es.n1, es.n2, es.all_tied(), es.separated()))
}

/// The three integrals the general Shirahata forms are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PlusIntegrals {
    /// `∫ F̂1⁺ dF̂2`
    lin: f64,
    /// `∫ (1 − F̂2⁻)² dF̂1`
    sq1: f64,
    /// `∫ (F̂1⁺)² dF̂2`
    sq2: f64,
    cross_ties: bool,
    all_tied: bool,
    separated: bool,
}

fn plus_integrals(data: &TwoSamples) -> PlusIntegrals {
    let (s1, s2) = (&data.s1, &data.s2);
    let (n1, n2) = (s1.len(), s2.len());
    // a_i = #{X2 >= X1i}, b_j = #{X1 <= X2j}
    let mut b = alloc::vec![0u64; n2];
    let (mut k, mut q1, mut ties, mut twice_p) = (0u128, 0u128, 0u128, 0u128);
    for &x in s1.iter() {
        let mut a = 0u64;
        for (j, &y) in s2.iter().enumerate() {
            let c = count2(y, x);
            let plus = (c > 0) as u64;
            a += plus;
            b[j] += plus;
            ties += (c == 1) as u128;
            twice_p += c as u128;
        }
        k += a as u128;
        q1 += (a as u128) * (a as u128);
    }
    let q2: u128 = b.iter().map(|&v| (v as u128) * (v as u128)).sum();
    let (f1, f2) = (n1 as f64, n2 as f64);
    let pairs = (n1 * n2) as u128;
    PlusIntegrals {
        lin: k as f64 / (f1 * f2),
        sq1: q1 as f64 / (f1 * f2 * f2),
        sq2: q2 as f64 / (f2 * f1 * f1),
        cross_ties: ties > 0,
        all_tied: ties == pairs,
        separated: twice_p == 0 || twice_p == 2 * pairs,
    }
}

fn shirahata_formula(kind: ShirahataKind, n1: f64, n2: f64, lin: f64, sq: f64, s1: f64, s2: f64) -> f64 {
    // `lin` is the linear term, `sq` the squared one; they coincide with
    // tied data only in the general form
    let n = n1 + n2;
    match kind {
        ShirahataKind::U => (n2 * s1 + n1 * s2 - lin - (n - 1.0) * sq) / ((n1 - 1.0) * (n2 - 1.0)),
        ShirahataKind::B => ((n2 - 1.0) * s1 + (n1 - 1.0) * s2 + lin - (n - 1.0) * sq) / (n1 * n2),
        ShirahataKind::Fp => s1 / n1 + s2 / n2 - (lin + (n + 1.0) * sq) / (n1 * n2),
        ShirahataKind::J => {
            s1 / (n1 - 1.0) + s2 / (n2 - 1.0) - (n - 2.0) * sq / ((n1 - 1.0) * (n2 - 1.0))
        }
    }
}

/// Shirahata's unbiased (U), bootstrap (B), Fligner-Policello (FP) and
/// jackknife (J) estimators.
pub fn var_shirahata(
    data: &TwoSamples,
    kind: ShirahataKind,
    form: ShirahataForm,
) -> Result<VarianceEstimate> {
    let (n1, n2) = (data.n1(), data.n2());
    require_min(n1, n2, 2)?;
    let (f1, f2) = (n1 as f64, n2 as f64);
    let ints = plus_integrals(data);
    let (raw, warning) = match form {
        ShirahataForm::General => (
            shirahata_formula(kind, f1, f2, ints.lin, ints.lin * ints.lin, ints.sq1, ints.sq2),
            None,
        ),
        ShirahataForm::ContinuousReduced => {
            let es = crate::effect::estimate_effect(data)?;
            let raw = shirahata_formula(
                kind,
                f1,
                f2,
                es.tau0_hat,
                es.p_hat * es.p_hat,
                es.tau1_hat,
                es.tau2_hat,
            );
            (raw, ints.cross_ties.then_some(Warning::TiesInReducedForm))
        }
    };
    let mut est = floored(kind.variance_kind(), raw, n1, n2, ints.all_tied, ints.separated);
    est.warning = warning;
    Ok(est)
}
