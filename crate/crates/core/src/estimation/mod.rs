//! Constrained maximum-likelihood fitting, information criteria and ranking.

mod criteria;
mod fit;
mod likelihood;
mod sample;
mod simplex;

pub use criteria::{criteria, rank_models, rank_values, Criteria, Criterion, RankedModel, TIE_TOLERANCE};
pub use fit::{compare_families, fit, rank_groups, FitConfig, FitResult, GroupRanking, ValidityPolicy};
pub use likelihood::{log_likelihood, log_likelihood_delta, log_likelihood_unchecked, pareto_alpha_closed_form};
pub use sample::Sample;
pub use simplex::{NelderMead, SimplexOutcome};
