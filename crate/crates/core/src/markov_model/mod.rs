//! Pairwise-interaction Markov densities, conditional intensities and a
//! birth–death sampler.
//!
//! A model interacts only through pairs related by the chosen relation; the
//! empty-set term is fixed to 1.

mod density;
mod interaction;
mod sampler;

pub use density::{log_density, log_papangelou, papangelou};
pub use interaction::{InteractionModel, ModelError, PairInteraction};
pub use sampler::{
    batch_means_se, birth_death_step, run_sampler, Acceptance, Move, SamplerError, SamplerState,
    Schedule, Trace, TraceRecord,
};
