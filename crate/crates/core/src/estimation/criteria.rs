use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CtpError, Result};
use crate::families::FamilyId;
use crate::scalar::Real;

use super::fit::FitResult;

/// Criterion values closer than this share a rank.
pub const TIE_TOLERANCE: f64 = 1e-6;

/// Information criteria; smaller is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria<T> {
    pub aic: T,
    pub aicc: T,
    pub bic: T,
}

/// `AIC = −2ℓ + 2p`, `AICC = AIC + 2p(p+1)/(n−p−1)`, `BIC = −2ℓ + p ln n`.
///
/// `p` counts the fitted shape and transmutation parameters, not `x̂₀`.
pub fn criteria<T: Real>(loglik: T, p: usize, n: usize) -> Result<Criteria<T>> {
    if n <= p + 1 {
        return Err(CtpError::TooFewObservations { n, p });
    }
    let pf = T::lit(p as f64);
    let nf = T::lit(n as f64);
    let two = T::lit(2.0);
    let aic = -two * loglik + two * pf;
    let aicc = aic + two * pf * (pf + T::one()) / (nf - pf - T::one());
    let bic = -two * loglik + pf * nf.ln();
    Ok(Criteria { aic, aicc, bic })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    NegLogLik,
    Aic,
    Aicc,
    Bic,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::NegLogLik, Criterion::Aic, Criterion::Aicc, Criterion::Bic];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::NegLogLik => "negloglik",
            Criterion::Aic => "aic",
            Criterion::Aicc => "aicc",
            Criterion::Bic => "bic",
        }
    }

    pub fn of<T: Real>(self, fit: &FitResult<T>) -> T {
        match self {
            Criterion::NegLogLik => -fit.loglik,
            Criterion::Aic => fit.aic,
            Criterion::Aicc => fit.aicc,
            Criterion::Bic => fit.bic,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown criterion '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedModel<T> {
    pub family: FamilyId,
    pub value: T,
    pub rank: usize,
}

/// Competition ranks ("1, 1, 1, 4") of `values`, ascending. A value within
/// [`TIE_TOLERANCE`] of the first value of the current tie group joins it.
pub fn rank_values<T: Real>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0; values.len()];
    let mut leader: Option<(T, usize)> = None;
    for (pos, &i) in order.iter().enumerate() {
        let rank = match leader {
            Some((v, r)) if values[i] - v <= T::lit(TIE_TOLERANCE) => r,
            _ => {
                leader = Some((values[i], pos + 1));
                pos + 1
            }
        };
        ranks[i] = rank;
    }
    ranks
}

/// Orders fits by `criterion`, ascending, with shared minimum ranks for ties.
pub fn rank_models<T: Real>(fits: &[FitResult<T>], criterion: Criterion) -> Vec<RankedModel<T>> {
    let values: Vec<T> = fits.iter().map(|f| criterion.of(f)).collect();
    let ranks = rank_values(&values);
    let mut out: Vec<RankedModel<T>> = fits
        .iter()
        .zip(values)
        .zip(ranks)
        .map(|((f, value), rank)| RankedModel {
            family: f.family,
            value,
            rank,
        })
        .collect();
    out.sort_by(|a, b| {
        a.rank
            .cmp(&b.rank)
            .then(a.value.partial_cmp(&b.value).unwrap_or(std::cmp::Ordering::Equal))
    });
    out
}
