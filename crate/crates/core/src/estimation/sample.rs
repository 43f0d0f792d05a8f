use serde::Serialize;

use crate::error::{CtpError, Result};
use crate::scalar::Real;

/// Observations with the scale estimate `x̂₀ = min xᵢ` and cached logs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample<T> {
    values: Vec<T>,
    x0_hat: T,
    #[serde(skip)]
    log_excess: Vec<T>,
    #[serde(skip)]
    sum_log: T,
    #[serde(skip)]
    sum_log_excess: T,
}

impl<T: Real> Sample<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(CtpError::InvalidSample(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > T::zero()))
        {
            return Err(CtpError::InvalidSample(format!(
                "observation {} = {} is not a finite positive value",
                i + 1,
                v
            )));
        }
        let x0_hat = values.iter().copied().fold(T::infinity(), T::min);
        let ln_x0 = x0_hat.ln();
        let log_excess: Vec<T> = values.iter().map(|v| v.ln() - ln_x0).collect();
        let sum_log = values.iter().map(|v| v.ln()).sum();
        let sum_log_excess = log_excess.iter().copied().sum();
        Ok(Self {
            values,
            x0_hat,
            log_excess,
            sum_log,
            sum_log_excess,
        })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Maximum-likelihood scale estimate, the sample minimum.
    pub fn x0_hat(&self) -> T {
        self.x0_hat
    }

    /// `ln(xᵢ/x̂₀)` per observation.
    pub fn log_excess(&self) -> &[T] {
        &self.log_excess
    }

    /// `Σ ln xᵢ`.
    pub fn sum_log(&self) -> T {
        self.sum_log
    }

    /// `Σ ln(xᵢ/x̂₀)`.
    pub fn sum_log_excess(&self) -> T {
        self.sum_log_excess
    }
}
