//! Fixtures shared by the benchmarks.

use rmhsbm::estimation::summarize;
use rmhsbm::hierarchy::{build_parameter_groups, presets};
use rmhsbm::sampling::{draw_model_parameters, sample_conditional_sbm, BetaPrior};
use rmhsbm::{BlockSummary, FlatModel, Membership, ParameterGroups, Seed};

pub struct Fixture {
    pub groups: ParameterGroups,
    pub model: FlatModel,
    pub membership: Membership,
    pub population: Vec<BlockSummary>,
}

/// The 14-block two-hemisphere model with `graphs` sampled graphs.
pub fn desk(block_size: usize, graphs: usize, seed: u64) -> Fixture {
    let spec = presets::bnu1_desk(block_size);
    let groups = build_parameter_groups(&spec);
    let seed = Seed::new(seed);
    let model = draw_model_parameters(&groups, BetaPrior::default(), seed).expect("model draws");
    let membership = Membership::contiguous(spec.block_sizes());
    let population = (0..graphs)
        .map(|s| {
            let g = sample_conditional_sbm(&model, &membership, seed.derive("graph", s as u64)).expect("graph samples");
            summarize(&g).expect("graph summarizes")
        })
        .collect();
    Fixture {
        groups,
        model,
        membership,
        population,
    }
}
