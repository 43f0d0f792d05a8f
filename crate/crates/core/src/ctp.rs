//! The δ-form cubic-transmuted Pareto distribution.
//!
//! A cubic transmutation of a baseline cdf `G` is `F = δ₁G + δ₂G² + δ₃G³`
//! with `δ₃ = 1 − δ₁ − δ₂`. Equivalently `F = R ∘ G` where
//! `R(t) = δ₁t + δ₂t² + δ₃t³` is the mixing cdf on `[0, 1]` and
//! `r = R'` the mixing density. `F` is a distribution exactly when
//! `r ≥ 0` on `[0, 1]`.
//!
//! Every evaluation below is written in `u = (x₀/x)^α = 1 − G(x)`, the
//! baseline survival, which keeps the right tail accurate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CtpError, Result};
use crate::scalar::Real;

/// Slack allowed on `min r(t) ≥ 0` so that optima sitting on a region
/// boundary are not rejected for rounding noise.
pub const VALIDITY_EPS: f64 = 1e-12;

/// Unified transmutation coefficients `(δ₁, δ₂)`; `δ₃` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaCoefficients<T> {
    delta1: T,
    delta2: T,
}

impl<T: Real> DeltaCoefficients<T> {
    pub fn new(delta1: T, delta2: T) -> Result<Self> {
        if !delta1.is_finite() {
            return Err(CtpError::InvalidParameter {
                name: "delta1",
                value: delta1.as_f64(),
                reason: "must be finite",
            });
        }
        if !delta2.is_finite() {
            return Err(CtpError::InvalidParameter {
                name: "delta2",
                value: delta2.as_f64(),
                reason: "must be finite",
            });
        }
        Ok(Self { delta1, delta2 })
    }

    /// `δ = (1, 0)`: the untransformed baseline.
    pub fn identity() -> Self {
        Self {
            delta1: T::one(),
            delta2: T::zero(),
        }
    }

    #[inline]
    pub fn delta1(&self) -> T {
        self.delta1
    }

    #[inline]
    pub fn delta2(&self) -> T {
        self.delta2
    }

    #[inline]
    pub fn delta3(&self) -> T {
        T::one() - self.delta1 - self.delta2
    }

    /// Mixing density `r(t) = δ₁ + 2δ₂t + 3δ₃t²` without a domain check.
    #[inline]
    pub(crate) fn r(&self, t: T) -> T {
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        self.delta1 + t * (two * self.delta2 + t * three * self.delta3())
    }

    /// Coefficients `(s₀, s₁, s₂)` with `S(x) = u(s₀ + s₁u + s₂u²)`.
    #[inline]
    pub fn survival_coefficients(&self) -> [T; 3] {
        let (d1, d2) = (self.delta1, self.delta2);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        [three - two * d1 - d2, three * d1 + two * d2 - three, T::one() - d1 - d2]
    }

    /// Coefficients `(b₀, b₁, b₂)` of the density bracket
    /// `f(x) = (α/x)·u·(b₀ + b₁u + b₂u²)`. Note `b₀ + b₁u + b₂u² = r(1 − u)`.
    #[inline]
    pub fn density_coefficients(&self) -> [T; 3] {
        let [s0, s1, s2] = self.survival_coefficients();
        [s0, T::lit(2.0) * s1, T::lit(3.0) * s2]
    }
}

/// Mixing density `r(t) = δ₁ + 2δ₂t + 3(1 − δ₁ − δ₂)t²` for `t ∈ [0, 1]`.
pub fn mixing_pdf<T: Real>(delta: &DeltaCoefficients<T>, t: T) -> Result<T> {
    check_unit(t, "t")?;
    Ok(delta.r(t))
}

/// Mixing cdf `R(t) = δ₁t + δ₂t² + δ₃t³` for `t ∈ [0, 1]`.
pub fn mixing_cdf<T: Real>(delta: &DeltaCoefficients<T>, t: T) -> Result<T> {
    check_unit(t, "t")?;
    Ok(t * (delta.delta1() + t * (delta.delta2() + t * delta.delta3())))
}

fn check_unit<T: Real>(t: T, name: &'static str) -> Result<()> {
    if t >= T::zero() && t <= T::one() {
        Ok(())
    } else {
        Err(CtpError::Domain {
            name,
            value: t.as_f64(),
            reason: "must lie in [0, 1]",
        })
    }
}

/// Exact minimum of the mixing density over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityCertificate<T> {
    pub min_value: T,
    pub argmin_t: T,
    pub is_valid: bool,
}

/// Closed-form minimum of the quadratic `r` on `[0, 1]`.
///
/// When `δ₃ > 0` and the vertex `t* = −δ₂/(3δ₃)` falls inside the interval
/// the minimum is `δ₁ − δ₂²/(3δ₃)`; otherwise it is attained at an endpoint.
pub fn validity_check<T: Real>(delta: &DeltaCoefficients<T>) -> ValidityCertificate<T> {
    let three = T::lit(3.0);
    let d3 = delta.delta3();
    let at_zero = delta.delta1();
    let at_one = three - T::lit(2.0) * delta.delta1() - delta.delta2();
    let (mut min_value, mut argmin_t) = if at_one < at_zero {
        (at_one, T::one())
    } else {
        (at_zero, T::zero())
    };
    if d3 > T::zero() {
        let vertex = -delta.delta2() / (three * d3);
        if vertex >= T::zero() && vertex <= T::one() {
            let v = delta.delta1() - delta.delta2() * delta.delta2() / (three * d3);
            if v <= min_value {
                min_value = v;
                argmin_t = vertex;
            }
        }
    }
    ValidityCertificate {
        min_value,
        argmin_t,
        is_valid: min_value >= -T::tol(VALIDITY_EPS),
    }
}

/// Baseline Pareto parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoBase<T> {
    x0: T,
    alpha: T,
}

impl<T: Real> ParetoBase<T> {
    pub fn new(x0: T, alpha: T) -> Result<Self> {
        if !(x0.is_finite() && x0 > T::zero()) {
            return Err(CtpError::InvalidParameter {
                name: "x0",
                value: x0.as_f64(),
                reason: "must be finite and strictly positive",
            });
        }
        if !(alpha.is_finite() && alpha > T::zero()) {
            return Err(CtpError::InvalidParameter {
                name: "alpha",
                value: alpha.as_f64(),
                reason: "must be finite and strictly positive",
            });
        }
        Ok(Self { x0, alpha })
    }

    #[inline]
    pub fn x0(&self) -> T {
        self.x0
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Baseline survival `u = (x₀/x)^α`, clamped to 1 at and below `x₀`.
    #[inline]
    pub fn tail_ratio(&self, x: T) -> T {
        if x <= self.x0 {
            return T::one();
        }
        (self.alpha * (self.x0.ln() - x.ln())).exp().min(T::one())
    }
}

/// A cubic-transmuted Pareto distribution.
///
/// Values built with [`CtpDistribution::new`] are certified valid. The
/// [`CtpDistribution::new_unchecked`] constructor keeps invalid coefficients
/// so the raw polynomials can be inspected; quantiles and sampling refuse
/// such values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CtpDistribution<T> {
    base: ParetoBase<T>,
    delta: DeltaCoefficients<T>,
    validity: ValidityCertificate<T>,
}

impl<T: Real> CtpDistribution<T> {
    pub fn new(base: ParetoBase<T>, delta: DeltaCoefficients<T>) -> Result<Self> {
        let dist = Self::new_unchecked(base, delta);
        if dist.validity.is_valid {
            Ok(dist)
        } else {
            Err(dist.invalid_error())
        }
    }

    pub fn new_unchecked(base: ParetoBase<T>, delta: DeltaCoefficients<T>) -> Self {
        Self {
            base,
            delta,
            validity: validity_check(&delta),
        }
    }

    /// Plain Pareto distribution.
    pub fn pareto(x0: T, alpha: T) -> Result<Self> {
        Self::new(ParetoBase::new(x0, alpha)?, DeltaCoefficients::identity())
    }

    #[inline]
    pub fn base(&self) -> &ParetoBase<T> {
        &self.base
    }

    #[inline]
    pub fn delta(&self) -> &DeltaCoefficients<T> {
        &self.delta
    }

    #[inline]
    pub fn certificate(&self) -> &ValidityCertificate<T> {
        &self.validity
    }

    #[inline]
    pub fn is_valid(&self) -> bool {
        self.validity.is_valid
    }

    #[inline]
    pub fn x0(&self) -> T {
        self.base.x0
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.base.alpha
    }

    fn invalid_error(&self) -> CtpError {
        CtpError::InvalidDistribution {
            min_value: self.validity.min_value.as_f64(),
            argmin_t: self.validity.argmin_t.as_f64(),
        }
    }

    fn require_valid(&self) -> Result<()> {
        if self.validity.is_valid {
            Ok(())
        } else {
            Err(self.invalid_error())
        }
    }

    #[inline]
    fn survival_poly(&self, u: T) -> T {
        let [s0, s1, s2] = self.delta.survival_coefficients();
        u * (s0 + u * (s1 + u * s2))
    }

    #[inline]
    fn density_bracket(&self, u: T) -> T {
        let [b0, b1, b2] = self.delta.density_coefficients();
        b0 + u * (b1 + u * b2)
    }

    /// `F(x) = 1 + (2δ₁+δ₂−3)u + (3−3δ₁−2δ₂)u² + (δ₁+δ₂−1)u³`, zero below `x₀`.
    pub fn cdf(&self, x: T) -> T {
        if x < self.base.x0 {
            return T::zero();
        }
        T::one() - self.survival_poly(self.base.tail_ratio(x))
    }

    pub fn pdf(&self, x: T) -> T {
        if x < self.base.x0 {
            return T::zero();
        }
        let u = self.base.tail_ratio(x);
        self.base.alpha / x * u * self.density_bracket(u)
    }

    /// Reliability `1 − F(x)`.
    pub fn survival(&self, x: T) -> T {
        if x < self.base.x0 {
            return T::one();
        }
        self.survival_poly(self.base.tail_ratio(x))
    }

    /// `f(x)/S(x)`, evaluated in the ratio form `(α/x)·B(u)/(S(u)/u)`.
    pub fn hazard(&self, x: T) -> Result<T> {
        if x < self.base.x0 {
            return Err(CtpError::Domain {
                name: "x",
                value: x.as_f64(),
                reason: "hazard is defined for x >= x0",
            });
        }
        let u = self.base.tail_ratio(x);
        let [s0, s1, s2] = self.delta.survival_coefficients();
        let reduced = s0 + u * (s1 + u * s2);
        if u == T::zero() || reduced * u == T::zero() {
            return Err(CtpError::SurvivalUnderflow { x: x.as_f64() });
        }
        Ok(self.base.alpha / x * self.density_bracket(u) / reduced)
    }

    /// Inverse cdf for `p ∈ [0, 1)`.
    pub fn quantile(&self, p: T) -> Result<T> {
        self.require_valid()?;
        if !(p >= T::zero() && p < T::one()) {
            return Err(CtpError::Domain {
                name: "p",
                value: p.as_f64(),
                reason: "must lie in [0, 1)",
            });
        }
        if p == T::zero() {
            return Ok(self.base.x0);
        }
        self.survival_quantile(T::one() - p)
    }

    /// Inverse survival function for `s ∈ (0, 1]`. More accurate than
    /// [`quantile`](Self::quantile) deep in the right tail.
    pub fn inverse_survival(&self, s: T) -> Result<T> {
        self.require_valid()?;
        if !(s > T::zero() && s <= T::one()) {
            return Err(CtpError::Domain {
                name: "s",
                value: s.as_f64(),
                reason: "must lie in (0, 1]",
            });
        }
        self.survival_quantile(s)
    }

    fn survival_quantile(&self, s: T) -> Result<T> {
        if s == T::one() {
            return Ok(self.base.x0);
        }
        let u = self.solve_tail_ratio(s)?;
        Ok(self.base.x0 * (-u.ln() / self.base.alpha).exp())
    }

    /// Solves `S(u) = s` on `(0, 1]`. `S` is increasing there with
    /// `S'(u) = r(1 − u) ≥ 0`, so `[0, 1]` always brackets the root.
    fn solve_tail_ratio(&self, s: T) -> Result<T> {
        const MAX_ITER: usize = 400;
        let [s0, _, _] = self.delta.survival_coefficients();
        let (mut lo, mut hi) = (T::zero(), T::one());
        let mut u = if s0 > T::zero() {
            (s / s0).min(T::one())
        } else {
            s.sqrt()
        };
        let rel = T::epsilon() * T::lit(4.0);
        for _ in 0..MAX_ITER {
            let g = self.survival_poly(u) - s;
            if g == T::zero() {
                return Ok(u);
            }
            if g < T::zero() {
                lo = u;
            } else {
                hi = u;
            }
            let slope = self.density_bracket(u);
            let newton = u - g / slope;
            let next = if slope > T::zero() && newton > lo && newton < hi {
                newton
            } else if lo > T::zero() && hi > T::lit(4.0) * lo {
                (lo * hi).sqrt()
            } else {
                T::lit(0.5) * (lo + hi)
            };
            if (next - u).abs() <= rel * u || hi - lo <= rel * hi {
                return Ok(next);
            }
            u = next;
        }
        Err(CtpError::NonConvergence { iterations: MAX_ITER })
    }

    /// `n` independent draws by inverse transform, reproducible per `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<T>> {
        self.require_valid()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                // 1 - U lies in (0, 1]
                let s: f64 = 1.0 - rng.random::<f64>();
                self.survival_quantile(T::lit(s))
            })
            .collect()
    }
}
