//! Parameter draws, corruption, perturbation and graph sampling.

mod graph;
mod parameters;
mod seed;

pub use graph::{edge_cell, sample_block_summary, sample_conditional_sbm, GraphSample};
pub use parameters::{
    corrupt_parameters, draw_model_parameters, perturb_parameters, signal_to_noise, BetaPrior,
    CorruptedModel, PerturbationMode, PerturbedModel, SignalToNoise, DRAW_MAX, DRAW_MIN,
    EFFECTIVE_MAX, EFFECTIVE_MIN,
};
pub use seed::Seed;
