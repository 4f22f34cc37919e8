//! Estimators and tests for the Mann-Whitney parameter
//! `p = P(X1 < X2) + P(X1 = X2) / 2`.
//!
//! The crate covers the whole chain from tie-aware ranks to test decisions:
//!
//! * [`ranks`]: count functions, normalized/left/right empirical CDFs and mid-ranks.
//! * [`effect`]: the estimate `p̂` together with every moment quantity the
//!   variance estimators and degrees of freedom consume ([`EffectSummary`]).
//! * [`variance`]: the WMW, unbiased, Brunner-Munzel, Perme-Manevski and
//!   Shirahata variance estimators, with floors for degenerate samples.
//! * [`dof`]: Satterthwaite-type and Box-type degrees of freedom.
//! * [`hypothesis`]: the plain and logit test statistics with normal or
//!   Student t reference distributions.
//! * [`permutation`]: studentized permutation versions of the tests.
//! * [`simulate`]: distribution generators, exact population quantities,
//!   effect-targeting solvers and a deterministic Monte Carlo engine.
//!
//! The crate is `no_std` and only needs `alloc`. All transcendental functions
//! go through `libm`, so results are bit-identical across platforms.
//!
//! ```
//! use wmw_core::{run_test, DfKind, TestKind, TwoSamples};
//!
//! let data = TwoSamples::from_slices(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
//! let res = run_test(&data, TestKind::Bm(DfKind::Df)).unwrap();
//! assert!((res.statistic - 1.336306).abs() < 1e-6);
//! assert_eq!(res.df, Some(4.0));
//! ```

#![no_std]

extern crate alloc;

pub mod dist;
pub mod dof;
pub mod effect;
mod error;
pub mod hypothesis;
pub mod permutation;
pub mod ranks;
pub mod rng;
pub mod simulate;
pub mod variance;

pub use dof::{degrees_of_freedom, DfKind};
pub use effect::{estimate_effect, p_hat_via_ranks, EffectSummary};
pub use error::{Error, Result};
pub use hypothesis::{run_test, run_tests, Alternative, TestKind, TestResult};
pub use permutation::{permutation_test, PermutationResult};
pub use ranks::{Sample, TwoSamples};
pub use variance::{Degeneracy, VarianceEstimate, VarianceKind};
