//! Data generators, exact population quantities, effect calibration and the
//! Monte Carlo engine.

pub mod dist;
pub mod engine;
pub mod population;
pub mod solve;

pub use dist::{sample_beta, DistSpec};
pub use engine::{
    finalize, run_chunk, run_scenario, Accumulator, MeanVariance, RejectionRate, Scenario, SimulationSummary,
    DEFAULT_ALPHA,
};
pub use population::{exact_mw_parameter, population_moments, true_variance, PopulationMoments};
pub use solve::{solve_in_bracket, solve_target_effect, FreeParam};
