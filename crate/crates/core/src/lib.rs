//! Cubic-transmuted Pareto (CTP) distributions.
//!
//! The core object is [`CtpDistribution`]: a Pareto baseline `(x₀, α)` mixed
//! through a cubic `F = δ₁G + δ₂G² + δ₃G³`. On top of it sit the named
//! parameter families ([`families`]), closed-form moments ([`moments`]) and
//! constrained maximum-likelihood fitting with model ranking
//! ([`estimation`]).
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the fitting code is tuned
//! for.

pub mod ctp;
pub mod error;
pub mod estimation;
pub mod families;
pub mod moments;
pub mod scalar;

pub use ctp::{
    mixing_cdf, mixing_pdf, validity_check, CtpDistribution, DeltaCoefficients, ParetoBase, ValidityCertificate,
    VALIDITY_EPS,
};
pub use error::{CtpError, Result};
pub use estimation::{
    compare_families, criteria, fit, log_likelihood, log_likelihood_unchecked, pareto_alpha_closed_form, rank_groups,
    rank_models, rank_values, Criteria, Criterion, FitConfig, FitResult, GroupRanking, RankedModel, Sample,
    ValidityPolicy,
};
pub use families::{FamilyId, FamilyParams, ParamRegion, Preimage};
pub use moments::{cf_partial, mean, mgf_partial, raw_moment, variance, MomentOrder};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Ctp = CtpDistribution<f64>;
pub type Ctp32 = CtpDistribution<f32>;
pub type Delta = DeltaCoefficients<f64>;
pub type Delta32 = DeltaCoefficients<f32>;
pub type Pareto = ParetoBase<f64>;
pub type Params = FamilyParams<f64>;
pub type Observations = Sample<f64>;
pub type Fit = FitResult<f64>;
pub type Certificate = ValidityCertificate<f64>;
