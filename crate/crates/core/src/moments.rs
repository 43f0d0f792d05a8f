//! Closed-form raw moments and truncated MGF / characteristic-function series.

use num_complex::Complex;

use crate::ctp::CtpDistribution;
use crate::error::{CtpError, Result};
use crate::scalar::Real;

/// Order `k ≥ 1` of a raw moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct MomentOrder(u32);

impl MomentOrder {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(CtpError::Domain {
                name: "k",
                value: 0.0,
                reason: "moment order must be at least 1",
            });
        }
        Ok(Self(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for MomentOrder {
    type Error = CtpError;

    fn try_from(k: u32) -> Result<Self> {
        Self::new(k)
    }
}

/// `E[X^k] = α·x₀ᵏ·[−δ₁k² + (5δ₁+2δ₂)kα − 6α²] / [(k−α)(k−2α)(k−3α)]`,
/// finite only for `α > k`.
pub fn raw_moment<T: Real>(dist: &CtpDistribution<T>, k: MomentOrder) -> Result<T> {
    let alpha = dist.alpha();
    let kf = T::lit(k.0 as f64);
    if alpha <= kf {
        return Err(CtpError::MomentDoesNotExist {
            order: k.0,
            alpha: alpha.as_f64(),
        });
    }
    Ok(moment_unchecked(dist, kf))
}

fn moment_unchecked<T: Real>(dist: &CtpDistribution<T>, k: T) -> T {
    let alpha = dist.alpha();
    let d1 = dist.delta().delta1();
    let d2 = dist.delta().delta2();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let numerator = -d1 * k * k + (T::lit(5.0) * d1 + two * d2) * k * alpha - T::lit(6.0) * alpha * alpha;
    let denominator = (k - alpha) * (k - two * alpha) * (k - three * alpha);
    alpha * dist.x0().powf(k) * numerator / denominator
}

pub fn mean<T: Real>(dist: &CtpDistribution<T>) -> Result<T> {
    raw_moment(dist, MomentOrder(1))
}

pub fn variance<T: Real>(dist: &CtpDistribution<T>) -> Result<T> {
    let m2 = raw_moment(dist, MomentOrder(2))?;
    let m1 = raw_moment(dist, MomentOrder(1))?;
    Ok(m2 - m1 * m1)
}

fn check_truncation<T: Real>(dist: &CtpDistribution<T>, terms: u32) -> Result<()> {
    if T::lit(terms as f64) >= dist.alpha() {
        return Err(CtpError::MomentDoesNotExist {
            order: terms,
            alpha: dist.alpha().as_f64(),
        });
    }
    Ok(())
}

/// `tᵏ/k! · E[Xᵏ]` for `k = 0..=max_order`, with `E[X⁰] = 1`.
fn series_terms<T: Real>(dist: &CtpDistribution<T>, t: T, max_order: u32) -> impl Iterator<Item = T> + '_ {
    let mut coeff = T::one();
    (0..=max_order).map(move |k| {
        if k == 0 {
            return T::one();
        }
        coeff = coeff * t / T::lit(k as f64);
        coeff * moment_unchecked(dist, T::lit(k as f64))
    })
}

/// Partial sum `Σ_{k=0}^{K} tᵏ E[Xᵏ]/k!` of the moment generating series.
///
/// Only orders `K < α` have finite moments, so the series is always
/// truncated; its remainder is not bounded here.
pub fn mgf_partial<T: Real>(dist: &CtpDistribution<T>, t: T, max_order: u32) -> Result<T> {
    check_truncation(dist, max_order)?;
    Ok(series_terms(dist, t, max_order).sum())
}

/// Partial sum of the characteristic-function series, `t` replaced by `it`.
pub fn cf_partial<T: Real>(dist: &CtpDistribution<T>, t: T, max_order: u32) -> Result<Complex<T>> {
    check_truncation(dist, max_order)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (k, term) in series_terms(dist, t, max_order).enumerate() {
        // i^k cycles through 1, i, -1, -i
        acc = acc
            + match k % 4 {
                0 => Complex::new(term, T::zero()),
                1 => Complex::new(T::zero(), term),
                2 => Complex::new(-term, T::zero()),
                _ => Complex::new(T::zero(), -term),
            };
    }
    Ok(acc)
}
