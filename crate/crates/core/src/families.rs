//! Named parameterizations of the cubic transmutation.
//!
//! Each family is an affine (or, for R23, bilinear) map from its own
//! λ-coordinates into δ-space together with a feasible region written as a
//! system of closed linear inequalities. The "modified" regions (MG, MA,
//! MR18a, MR18b, MR19) are the enlarged sets on which every point yields a
//! valid distribution; the original G region is not.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ctp::{CtpDistribution, DeltaCoefficients, ParetoBase};
use crate::error::{CtpError, Result};
use crate::scalar::Real;

/// Inclusion slack for region inequalities.
pub const REGION_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    G,
    Mg,
    A,
    Ma,
    R18a,
    Mr18a,
    R18b,
    Mr18b,
    R19,
    Mr19,
    R23,
    Tp,
    Pareto,
}

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::G,
        FamilyId::Mg,
        FamilyId::A,
        FamilyId::Ma,
        FamilyId::R18a,
        FamilyId::Mr18a,
        FamilyId::R18b,
        FamilyId::Mr18b,
        FamilyId::R19,
        FamilyId::Mr19,
        FamilyId::R23,
        FamilyId::Tp,
        FamilyId::Pareto,
    ];

    /// Families with their original parameter ranges.
    pub const ORIGINAL: [FamilyId; 8] = [
        FamilyId::G,
        FamilyId::A,
        FamilyId::R18a,
        FamilyId::R18b,
        FamilyId::R19,
        FamilyId::R23,
        FamilyId::Tp,
        FamilyId::Pareto,
    ];

    /// Families with the enlarged, always-valid ranges.
    pub const MODIFIED: [FamilyId; 8] = [
        FamilyId::Mg,
        FamilyId::Ma,
        FamilyId::Mr18a,
        FamilyId::Mr18b,
        FamilyId::Mr19,
        FamilyId::R23,
        FamilyId::Tp,
        FamilyId::Pareto,
    ];

    /// Stable lowercase id used on the command line and in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::G => "g",
            FamilyId::Mg => "mg",
            FamilyId::A => "a",
            FamilyId::Ma => "ma",
            FamilyId::R18a => "r18a",
            FamilyId::Mr18a => "mr18a",
            FamilyId::R18b => "r18b",
            FamilyId::Mr18b => "mr18b",
            FamilyId::R19 => "r19",
            FamilyId::Mr19 => "mr19",
            FamilyId::R23 => "r23",
            FamilyId::Tp => "tp",
            FamilyId::Pareto => "pareto",
        }
    }

    /// Table label, e.g. `CTP_MR18a`.
    pub fn label(self) -> &'static str {
        match self {
            FamilyId::G => "CTP_G",
            FamilyId::Mg => "CTP_MG",
            FamilyId::A => "CTP_A",
            FamilyId::Ma => "CTP_MA",
            FamilyId::R18a => "CTP_R18a",
            FamilyId::Mr18a => "CTP_MR18a",
            FamilyId::R18b => "CTP_R18b",
            FamilyId::Mr18b => "CTP_MR18b",
            FamilyId::R19 => "CTP_R19",
            FamilyId::Mr19 => "CTP_MR19",
            FamilyId::R23 => "CTP_R23",
            FamilyId::Tp => "TP",
            FamilyId::Pareto => "Pareto",
        }
    }

    /// Number of λ-coordinates (excludes α and x₀).
    pub fn dimension(self) -> usize {
        match self {
            FamilyId::Pareto => 0,
            FamilyId::A | FamilyId::Ma | FamilyId::R19 | FamilyId::Mr19 | FamilyId::Tp => 1,
            _ => 2,
        }
    }

    /// Names of the λ-coordinates, for display.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyId::Pareto => &[],
            FamilyId::A | FamilyId::Ma | FamilyId::R19 | FamilyId::Mr19 | FamilyId::Tp => &["lambda"],
            FamilyId::R23 => &["lambda", "eta"],
            _ => &["lambda1", "lambda2"],
        }
    }

    fn check_dim<T: Copy>(self, params: &FamilyParams<T>) -> Result<()> {
        if params.len() == self.dimension() {
            Ok(())
        } else {
            Err(CtpError::DimensionMismatch {
                family: self.as_str(),
                expected: self.dimension(),
                got: params.len(),
            })
        }
    }

    /// Maps λ-coordinates to δ.
    pub fn to_delta<T: Real>(self, params: &FamilyParams<T>) -> Result<DeltaCoefficients<T>> {
        self.check_dim(params)?;
        self.delta_of(params.values())
    }

    /// [`to_delta`](Self::to_delta) on a raw slice whose length is already known to match.
    pub(crate) fn delta_of<T: Real>(self, p: &[T]) -> Result<DeltaCoefficients<T>> {
        debug_assert_eq!(p.len(), self.dimension());
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let (d1, d2) = match self {
            FamilyId::G | FamilyId::Mg => (p[0], p[1] - p[0]),
            FamilyId::A | FamilyId::Ma => (one + p[0], -two * p[0]),
            FamilyId::R18a | FamilyId::Mr18a => (one + p[0], p[1] - p[0]),
            FamilyId::R18b | FamilyId::Mr18b => (one + p[0] + p[1], -p[0] - two * p[1]),
            FamilyId::R19 | FamilyId::Mr19 => (one - p[0], three * p[0]),
            FamilyId::R23 => {
                let (lambda, eta) = (p[0], p[1]);
                (one + lambda - lambda * eta, two * lambda * eta - lambda)
            }
            FamilyId::Tp => (one + p[0], -p[0]),
            FamilyId::Pareto => (one, T::zero()),
        };
        DeltaCoefficients::new(d1, d2)
    }

    /// Inverse of [`to_delta`](Self::to_delta). `None` when δ lies off the
    /// family's image (one-parameter families cover only a line in δ-space).
    pub fn from_delta<T: Real>(self, delta: &DeltaCoefficients<T>) -> Option<Preimage<T>> {
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let (d1, d2, d3) = (delta.delta1(), delta.delta2(), delta.delta3());
        let on_line = |lhs: T, rhs: T| {
            let scale = one + d1.abs() + d2.abs();
            (lhs - rhs).abs() <= T::tol(REGION_EPS) * scale
        };
        let unique = |values: Vec<T>| {
            Some(Preimage {
                params: FamilyParams::new(values),
                unique: true,
            })
        };
        match self {
            FamilyId::G | FamilyId::Mg => unique(vec![d1, d1 + d2]),
            FamilyId::R18a | FamilyId::Mr18a => unique(vec![d1 - one, d1 + d2 - one]),
            FamilyId::R18b | FamilyId::Mr18b => unique(vec![d1 - one - d3, d3]),
            FamilyId::A | FamilyId::Ma => {
                let lambda = d1 - one;
                on_line(d2, -two * lambda).then(|| Preimage {
                    params: FamilyParams::new(vec![lambda]),
                    unique: true,
                })
            }
            FamilyId::R19 | FamilyId::Mr19 => {
                let lambda = one - d1;
                on_line(d2, three * lambda).then(|| Preimage {
                    params: FamilyParams::new(vec![lambda]),
                    unique: true,
                })
            }
            FamilyId::Tp => on_line(d3, T::zero()).then(|| Preimage {
                params: FamilyParams::new(vec![d1 - one]),
                unique: true,
            }),
            FamilyId::Pareto => (on_line(d1, one) && on_line(d2, T::zero())).then(|| Preimage {
                params: FamilyParams::new(vec![]),
                unique: true,
            }),
            FamilyId::R23 => {
                let lambda = two * d1 + d2 - two;
                let lambda_eta = d1 + d2 - one;
                if lambda.abs() <= T::tol(REGION_EPS) {
                    // η is not identified at λ = 0; report η = 0.
                    on_line(lambda_eta, T::zero()).then(|| Preimage {
                        params: FamilyParams::new(vec![T::zero(), T::zero()]),
                        unique: false,
                    })
                } else {
                    unique(vec![lambda, lambda_eta / lambda])
                }
            }
        }
    }

    /// Feasible region as closed linear inequalities.
    pub fn region<T: Real>(self) -> ParamRegion<T> {
        let mut r = ParamRegion::new(self.dimension());
        match self {
            FamilyId::G => {
                r.interval(&[1.0, 0.0], 0.0, 1.0);
                r.interval(&[0.0, 1.0], -1.0, 1.0);
            }
            FamilyId::Mg => {
                r.interval(&[1.0, 0.0], 0.0, 3.0);
                r.interval(&[0.0, 1.0], 0.0, 3.0);
                r.interval(&[1.0, 1.0], 0.0, 3.0);
            }
            FamilyId::A | FamilyId::R19 | FamilyId::Tp => r.interval(&[1.0], -1.0, 1.0),
            FamilyId::Ma => r.interval(&[1.0], -1.0, 3.0),
            FamilyId::Mr19 => r.interval(&[1.0], -2.0, 1.0),
            FamilyId::R18a => {
                r.interval(&[1.0, 0.0], -1.0, 1.0);
                r.interval(&[0.0, 1.0], -1.0, 1.0);
                r.interval(&[1.0, 1.0], -2.0, 1.0);
            }
            FamilyId::Mr18a => {
                r.interval(&[1.0, 0.0], -1.0, 2.0);
                r.interval(&[0.0, 1.0], -1.0, 2.0);
                r.interval(&[1.0, 1.0], -2.0, 1.0);
            }
            FamilyId::R18b => {
                r.interval(&[1.0, 0.0], -1.0, 1.0);
                r.interval(&[0.0, 1.0], 0.0, 1.0);
            }
            FamilyId::Mr18b => {
                r.interval(&[1.0, 0.0], -2.0, 1.0);
                r.interval(&[0.0, 1.0], -2.0, 1.0);
                r.interval(&[1.0, 1.0], -1.0, 2.0);
            }
            FamilyId::R23 => {
                r.interval(&[1.0, 0.0], -1.0, 1.0);
                r.interval(&[0.0, 1.0], 0.0, 2.0);
            }
            FamilyId::Pareto => {}
        }
        r
    }

    pub fn region_contains<T: Real>(self, params: &FamilyParams<T>) -> Result<bool> {
        self.check_dim(params)?;
        Ok(self.region().contains(params.values()))
    }

    /// `n` points drawn uniformly from the region by rejection against its
    /// bounding box; deterministic per `seed`.
    pub fn region_sample<T: Real>(self, n: usize, seed: u64) -> Vec<FamilyParams<T>> {
        let region = self.region::<T>();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| FamilyParams::new(region.draw(&mut rng))).collect()
    }

    /// λ-coordinates at which the family reduces to the plain Pareto law.
    pub fn identity_params<T: Real>(self) -> FamilyParams<T> {
        self.from_delta(&DeltaCoefficients::identity())
            .expect("every family contains the baseline")
            .params
    }

    /// Builds a checked distribution from family coordinates.
    pub fn distribution<T: Real>(self, x0: T, alpha: T, params: &FamilyParams<T>) -> Result<CtpDistribution<T>> {
        CtpDistribution::new(ParetoBase::new(x0, alpha)?, self.to_delta(params)?)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = CtpError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == key)
            .ok_or_else(|| CtpError::UnknownFamily(s.to_string()))
    }
}

/// λ-coordinates of a family: empty, `λ`, `(λ₁, λ₂)` or `(λ, η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FamilyParams<T>(Vec<T>);

impl<T: Copy> FamilyParams<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<T: Copy> From<Vec<T>> for FamilyParams<T> {
    fn from(values: Vec<T>) -> Self {
        Self(values)
    }
}

/// Result of [`FamilyId::from_delta`]. `unique` is false only for R23 at
/// `λ = 0`, where any η maps to the same δ.
#[derive(Debug, Clone, PartialEq)]
pub struct Preimage<T> {
    pub params: FamilyParams<T>,
    pub unique: bool,
}

/// One row `coeffs · θ ≥ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub coeffs: Vec<T>,
    pub bound: T,
}

impl<T: Real> LinearConstraint<T> {
    /// `coeffs · θ − bound`; non-negative inside.
    pub fn slack(&self, theta: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(theta)
            .fold(T::zero(), |acc, (&c, &v)| acc + c * v)
            - self.bound
    }
}

/// Closed polyhedral region `A·θ ≥ b` with its bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRegion<T> {
    constraints: Vec<LinearConstraint<T>>,
    bounds: Vec<(T, T)>,
}

impl<T: Real> ParamRegion<T> {
    fn new(dim: usize) -> Self {
        Self {
            constraints: Vec::new(),
            bounds: vec![(T::neg_infinity(), T::infinity()); dim],
        }
    }

    /// Adds `lo ≤ coeffs·θ ≤ hi`, tightening the box when `coeffs` is a unit vector.
    fn interval(&mut self, coeffs: &[f64], lo: f64, hi: f64) {
        let c: Vec<T> = coeffs.iter().map(|&v| T::lit(v)).collect();
        self.constraints.push(LinearConstraint {
            coeffs: c.clone(),
            bound: T::lit(lo),
        });
        self.constraints.push(LinearConstraint {
            coeffs: c.iter().map(|&v| -v).collect(),
            bound: -T::lit(hi),
        });
        let nonzero: Vec<usize> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, _)| i)
            .collect();
        if let [axis] = nonzero[..] {
            if coeffs[axis] == 1.0 {
                let (blo, bhi) = self.bounds[axis];
                self.bounds[axis] = (blo.max(T::lit(lo)), bhi.min(T::lit(hi)));
            }
        }
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn constraints(&self) -> &[LinearConstraint<T>] {
        &self.constraints
    }

    /// Axis-aligned bounding box, one `(lo, hi)` pair per coordinate.
    pub fn bounds(&self) -> &[(T, T)] {
        &self.bounds
    }

    pub fn contains(&self, theta: &[T]) -> bool {
        theta.len() == self.dimension()
            && theta.iter().all(|v| v.is_finite())
            && self.constraints.iter().all(|c| c.slack(theta) >= -T::tol(REGION_EPS))
    }

    /// Total amount by which `theta` violates the inequalities.
    pub fn violation(&self, theta: &[T]) -> T {
        self.constraints.iter().map(|c| (-c.slack(theta)).max(T::zero())).sum()
    }

    /// True when some inequality holds with slack at most `tol`.
    pub fn is_tight(&self, theta: &[T], tol: T) -> bool {
        self.constraints.iter().any(|c| c.slack(theta).abs() <= tol)
    }

    pub(crate) fn draw<R: Rng>(&self, rng: &mut R) -> Vec<T> {
        loop {
            let point: Vec<T> = self
                .bounds
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * T::lit(rng.random::<f64>()))
                .collect();
            if self.contains(&point) {
                return point;
            }
        }
    }
}
