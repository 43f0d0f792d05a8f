use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ctp::validity_check;
use crate::error::{CtpError, Result};
use crate::families::{FamilyId, FamilyParams, ParamRegion};
use crate::scalar::Real;

use super::criteria::{criteria, rank_values, Criterion};
use super::likelihood::{log_likelihood_delta, pareto_alpha_closed_form};
use super::sample::Sample;
use super::simplex::{NelderMead, SimplexOutcome};

/// Slack below which a region inequality counts as active at the optimum.
const BOUNDARY_TOL: f64 = 1e-6;
/// Redraws allowed when looking for a valid random start.
const START_ATTEMPTS: usize = 1000;
const POLISH_ROUNDS: usize = 5;

/// Whether fitted coefficients must define a genuine distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidityPolicy {
    /// Reject any δ whose mixing density dips below zero on `[0, 1]`.
    #[default]
    Checked,
    /// Only require a positive density at the observations. Reproduces fits
    /// that ignore the validity condition.
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n_starts: usize,
    pub max_iterations: usize,
    pub tol_objective: f64,
    pub tol_params: f64,
    pub seed: u64,
    pub penalty_scale: f64,
    pub validity: ValidityPolicy,
    /// Run starts on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            n_starts: 200,
            max_iterations: 2000,
            tol_objective: 1e-10,
            tol_params: 1e-9,
            seed: 42,
            penalty_scale: 1e8,
            validity: ValidityPolicy::Checked,
            parallel: true,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(CtpError::InvalidConfig("n_starts must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(CtpError::InvalidConfig("max_iterations must be positive"));
        }
        if !(self.tol_objective > 0.0 && self.tol_params > 0.0) {
            return Err(CtpError::InvalidConfig("tolerances must be positive"));
        }
        if !(self.penalty_scale > 0.0 && self.penalty_scale.is_finite()) {
            return Err(CtpError::InvalidConfig("penalty_scale must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub family: FamilyId,
    pub alpha_hat: T,
    pub params_hat: FamilyParams<T>,
    pub x0_hat: T,
    pub loglik: T,
    /// Free parameters: α plus the family's λ-coordinates.
    pub p: usize,
    pub n: usize,
    pub aic: T,
    pub aicc: T,
    pub bic: T,
    pub converged: bool,
    pub n_starts_used: usize,
    pub boundary_active: bool,
    /// Minimum of the mixing density at the estimate.
    pub validity_min: T,
}

impl<T: Real> FitResult<T> {
    pub fn neg_loglik(&self) -> T {
        -self.loglik
    }
}

struct Objective<'a, T> {
    family: FamilyId,
    region: ParamRegion<T>,
    sample: &'a Sample<T>,
    policy: ValidityPolicy,
    penalty: T,
}

impl<T: Real> Objective<'_, T> {
    /// Negative log-likelihood over `θ = (ln α, λ…)`, or a penalty of at
    /// least `penalty_scale` outside the feasible set.
    fn eval(&self, theta: &[T]) -> T {
        let lambda = &theta[1..];
        if theta.iter().any(|v| !v.is_finite()) {
            return self.penalty * T::lit(2.0);
        }
        let violation = self.region.violation(lambda);
        if violation > T::zero() {
            return self.penalty * (T::one() + violation);
        }
        let Ok(delta) = self.family.delta_of(lambda) else {
            return self.penalty * T::lit(2.0);
        };
        if self.policy == ValidityPolicy::Checked {
            let cert = validity_check(&delta);
            if !cert.is_valid {
                return self.penalty * (T::one() - cert.min_value);
            }
        }
        let ll = log_likelihood_delta(&delta, theta[0].exp(), self.sample);
        if ll.is_finite() {
            -ll
        } else {
            self.penalty
        }
    }

    fn feasible(&self, theta: &[T]) -> bool {
        self.eval(theta) < self.penalty
    }
}

/// Maximum-likelihood fit of `family` with `x₀ = x̂₀`.
///
/// Multi-start Nelder-Mead over `(ln α, λ…)`: one deterministic start at the
/// Pareto estimate and the family's identity point plus `n_starts − 1`
/// seeded draws from the region. The best terminal point is polished by
/// restarting the simplex. Infeasible points are never returned.
pub fn fit<T: Real>(family: FamilyId, sample: &Sample<T>, config: &FitConfig) -> Result<FitResult<T>> {
    config.validate()?;
    let p = family.dimension() + 1;
    let n = sample.len();
    if n <= p + 1 {
        return Err(CtpError::TooFewObservations { n, p });
    }
    let alpha0 = pareto_alpha_closed_form(sample)?;
    let objective = Objective {
        family,
        region: family.region::<T>(),
        sample,
        policy: config.validity,
        penalty: T::lit(config.penalty_scale),
    };

    let starts = start_points(family, &objective, alpha0, config);
    let nm = NelderMead {
        max_iterations: config.max_iterations,
        tol_objective: T::lit(config.tol_objective),
        tol_params: T::lit(config.tol_params),
        ..NelderMead::default()
    };
    let steps = initial_steps(&objective.region);
    let run = |start: &Vec<T>| nm.minimize(|x| objective.eval(x), start, &steps);
    let outcomes: Vec<SimplexOutcome<T>> = if config.parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    };

    // fixed-order reduction keeps the result independent of scheduling
    let mut best = outcomes
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("the deterministic start is always feasible");

    let fine_steps: Vec<T> = steps.iter().map(|&s| s * T::lit(0.1)).collect();
    for _ in 0..POLISH_ROUNDS {
        let again = nm.minimize(|x| objective.eval(x), &best.point, &fine_steps);
        let gain = best.value - again.value;
        let converged = again.converged;
        if again.value <= best.value {
            best = again;
        }
        if gain <= T::lit(config.tol_objective) && converged {
            best.converged = true;
            break;
        }
    }

    assert!(objective.feasible(&best.point), "fit returned an infeasible point");
    let alpha_hat = best.point[0].exp();
    let lambda = best.point[1..].to_vec();
    let delta = family.delta_of(&lambda)?;
    let loglik = -best.value;
    let crit = criteria(loglik, p, n)?;
    Ok(FitResult {
        family,
        alpha_hat,
        x0_hat: sample.x0_hat(),
        loglik,
        p,
        n,
        aic: crit.aic,
        aicc: crit.aicc,
        bic: crit.bic,
        converged: best.converged,
        n_starts_used: starts.len(),
        boundary_active: objective.region.is_tight(&lambda, T::lit(BOUNDARY_TOL)),
        validity_min: validity_check(&delta).min_value,
        params_hat: FamilyParams::new(lambda),
    })
}

fn start_points<T: Real>(family: FamilyId, objective: &Objective<'_, T>, alpha0: T, config: &FitConfig) -> Vec<Vec<T>> {
    let mut starts = Vec::with_capacity(config.n_starts);
    let mut first = vec![alpha0.ln()];
    first.extend_from_slice(family.identity_params::<T>().values());
    starts.push(first);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 1..config.n_starts {
        for _ in 0..START_ATTEMPTS {
            let spread = T::lit(rng.random_range(-1.0..1.0));
            let mut theta = vec![alpha0.ln() + spread];
            theta.extend(objective.region.draw(&mut rng));
            if objective.feasible(&theta) {
                starts.push(theta);
                break;
            }
        }
    }
    starts
}

fn initial_steps<T: Real>(region: &ParamRegion<T>) -> Vec<T> {
    let mut steps = vec![T::lit(0.2)];
    steps.extend(region.bounds().iter().map(|&(lo, hi)| {
        let width = hi - lo;
        if width.is_finite() {
            width * T::lit(0.1)
        } else {
            T::lit(0.1)
        }
    }));
    steps
}

/// Fits each family in turn; a failure is reported in place without
/// aborting the others.
pub fn compare_families<T: Real>(
    sample: &Sample<T>,
    families: &[FamilyId],
    config: &FitConfig,
) -> Vec<(FamilyId, Result<FitResult<T>>)> {
    families.iter().map(|&f| (f, fit(f, sample, config))).collect()
}

/// Per-group ranking of families by one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRanking {
    pub label: String,
    /// Ranks in the order of the requested families; `None` for failed fits.
    pub ranks: Vec<(FamilyId, Option<usize>)>,
}

/// Fits every family on every group and ranks them within each group.
pub fn rank_groups<T: Real>(
    groups: &[(String, Sample<T>)],
    families: &[FamilyId],
    config: &FitConfig,
    criterion: Criterion,
) -> Vec<GroupRanking> {
    groups
        .iter()
        .map(|(label, sample)| {
            let fits = compare_families(sample, families, config);
            let ok: Vec<(usize, T)> = fits
                .iter()
                .enumerate()
                .filter_map(|(i, (_, r))| r.as_ref().ok().map(|f| (i, criterion.of(f))))
                .collect();
            let values: Vec<T> = ok.iter().map(|&(_, v)| v).collect();
            let ranks = rank_values(&values);
            let mut out: Vec<(FamilyId, Option<usize>)> = fits.iter().map(|(f, _)| (*f, None)).collect();
            for (&(i, _), rank) in ok.iter().zip(ranks) {
                out[i].1 = Some(rank);
            }
            GroupRanking {
                label: label.clone(),
                ranks: out,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctp::{CtpDistribution, DeltaCoefficients, ParetoBase};

    fn pareto_sample(n: usize, alpha: f64, seed: u64) -> Sample<f64> {
        let d = CtpDistribution::new(ParetoBase::new(1.0, alpha).unwrap(), DeltaCoefficients::identity()).unwrap();
        Sample::new(d.sample(n, seed).unwrap()).unwrap()
    }

    fn quick() -> FitConfig {
        FitConfig {
            n_starts: 8,
            ..FitConfig::default()
        }
    }

    #[test]
    fn pareto_fit_matches_closed_form() {
        let s = pareto_sample(500, 2.0, 3);
        let r = fit(FamilyId::Pareto, &s, &quick()).unwrap();
        let closed = pareto_alpha_closed_form(&s).unwrap();
        assert!((r.alpha_hat - closed).abs() < 1e-6 * closed);
        assert_eq!(r.p, 1);
        assert!(r.params_hat.is_empty());
        assert!(r.converged);
    }

    #[test]
    fn config_validation() {
        let s = pareto_sample(20, 2.0, 3);
        for bad in [
            FitConfig {
                n_starts: 0,
                ..FitConfig::default()
            },
            FitConfig {
                max_iterations: 0,
                ..FitConfig::default()
            },
            FitConfig {
                tol_params: 0.0,
                ..FitConfig::default()
            },
            FitConfig {
                penalty_scale: -1.0,
                ..FitConfig::default()
            },
        ] {
            assert!(matches!(fit(FamilyId::Ma, &s, &bad), Err(CtpError::InvalidConfig(_))));
        }
    }

    #[test]
    fn too_few_observations() {
        let s = Sample::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            fit(FamilyId::Mg, &s, &quick()),
            Err(CtpError::TooFewObservations { .. })
        ));
        assert!(fit(FamilyId::Pareto, &s, &quick()).is_ok());
    }

    #[test]
    fn parallel_and_serial_agree() {
        let s = pareto_sample(200, 1.5, 9);
        let par = fit(FamilyId::Mr18b, &s, &quick()).unwrap();
        let ser = fit(
            FamilyId::Mr18b,
            &s,
            &FitConfig {
                parallel: false,
                ..quick()
            },
        )
        .unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn group_ranking_is_min_rank_permutation() {
        let groups: Vec<(String, Sample<f64>)> = (0..2)
            .map(|g| (format!("g{g}"), pareto_sample(60, 1.0 + g as f64, g)))
            .collect();
        let fams = [FamilyId::Mg, FamilyId::Mr18a, FamilyId::Tp, FamilyId::Pareto];
        let out = rank_groups(&groups, &fams, &quick(), Criterion::NegLogLik);
        assert_eq!(out.len(), 2);
        for g in out {
            let ranks: Vec<usize> = g.ranks.iter().map(|r| r.1.unwrap()).collect();
            assert!(ranks.iter().all(|&r| (1..=4).contains(&r)));
            assert!(ranks.contains(&1));
        }
    }
}
