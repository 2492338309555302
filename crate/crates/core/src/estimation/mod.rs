//! Sufficient statistics, maximum-likelihood estimates, likelihood ratios and BIC.

mod likelihood;
mod summary;

pub use likelihood::{
    bic_delta, group_null_estimate, kl_bernoulli, llr_global, llr_local, mle_alt, mle_null,
    BicReport, GroupLlr, LlrReport, PreferredModel,
};
pub use summary::{aggregate_summaries, summarize, BlockSummary};
