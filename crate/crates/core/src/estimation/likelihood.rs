use crate::ctp::{validity_check, DeltaCoefficients};
use crate::error::{CtpError, Result};
use crate::families::{FamilyId, FamilyParams};
use crate::scalar::Real;

use super::sample::Sample;

/// Log-likelihood in δ-form with `x₀ = x̂₀`:
///
/// `ℓ = n ln α − α Σ ln(xᵢ/x₀) − Σ ln xᵢ + Σ ln[b₀ + b₁uᵢ + b₂uᵢ²]`, `uᵢ = (x₀/xᵢ)^α`.
///
/// Returns `−∞` as soon as a density term is non-positive or `α` is not a
/// positive finite number. The validity of δ is not checked here.
pub fn log_likelihood_delta<T: Real>(delta: &DeltaCoefficients<T>, alpha: T, sample: &Sample<T>) -> T {
    if !(alpha.is_finite() && alpha > T::zero()) {
        return T::neg_infinity();
    }
    let [b0, b1, b2] = delta.density_coefficients();
    let mut log_bracket = T::zero();
    for &w in sample.log_excess() {
        let u = (-alpha * w).exp();
        let bracket = b0 + u * (b1 + u * b2);
        // NaN brackets are rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(bracket > T::zero()) {
            return T::neg_infinity();
        }
        log_bracket = log_bracket + bracket.ln();
    }
    let n = T::lit(sample.len() as f64);
    n * alpha.ln() - alpha * sample.sum_log_excess() - sample.sum_log() + log_bracket
}

/// Log-likelihood of a family at `(α, params)`; `−∞` if the implied δ fails
/// the validity check or any density term is non-positive.
pub fn log_likelihood<T: Real>(family: FamilyId, alpha: T, params: &FamilyParams<T>, sample: &Sample<T>) -> Result<T> {
    let delta = family.to_delta(params)?;
    if !validity_check(&delta).is_valid {
        return Ok(T::neg_infinity());
    }
    Ok(log_likelihood_delta(&delta, alpha, sample))
}

/// As [`log_likelihood`] but without the validity check: only the signs of
/// the density at the observations matter.
pub fn log_likelihood_unchecked<T: Real>(
    family: FamilyId,
    alpha: T,
    params: &FamilyParams<T>,
    sample: &Sample<T>,
) -> Result<T> {
    let delta = family.to_delta(params)?;
    Ok(log_likelihood_delta(&delta, alpha, sample))
}

/// Pareto maximum-likelihood shape `α̂ = n / Σ ln(xᵢ/x̂₀)`.
pub fn pareto_alpha_closed_form<T: Real>(sample: &Sample<T>) -> Result<T> {
    let total = sample.sum_log_excess();
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(total > T::zero()) {
        return Err(CtpError::DegenerateSample("all observations equal the sample minimum"));
    }
    Ok(T::lit(sample.len() as f64) / total)
}
