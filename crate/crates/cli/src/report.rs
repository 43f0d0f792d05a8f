//! Machine-readable fit reports and their plain-text tables.

use ctp_core::{rank_models, Criterion, FamilyId, Fit, FitConfig, RankedModel};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::summary::{describe, Summary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub dataset: DatasetInfo,
    pub fits: Vec<FitEntry>,
    pub rankings: Rankings,
    pub config: FitConfig,
    pub tool: ToolInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub name: String,
    pub n: usize,
    pub x0_hat: f64,
    pub summary: Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStatus {
    Ok,
    Failed,
}

/// One family's outcome. Estimate fields are absent for failed fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitEntry {
    pub family: FamilyId,
    pub label: String,
    pub status: FitStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub param_names: Vec<String>,
    pub alpha_hat: Option<f64>,
    pub params_hat: Option<Vec<f64>>,
    pub loglik: Option<f64>,
    pub p: usize,
    pub aic: Option<f64>,
    pub aicc: Option<f64>,
    pub bic: Option<f64>,
    pub converged: bool,
    pub boundary_active: bool,
    pub validity_min: Option<f64>,
    pub n_starts_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<DisplayStrings>,
}

/// The numbers as they appear in the tables, three decimals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayStrings {
    pub alpha_hat: String,
    pub params_hat: Vec<String>,
    pub neg_loglik: String,
    pub aic: String,
    pub aicc: String,
    pub bic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rankings {
    pub negloglik: Vec<RankedModel<f64>>,
    pub aic: Vec<RankedModel<f64>>,
    pub aicc: Vec<RankedModel<f64>>,
    pub bic: Vec<RankedModel<f64>>,
}

impl Rankings {
    pub fn get(&self, criterion: Criterion) -> &[RankedModel<f64>] {
        match criterion {
            Criterion::NegLogLik => &self.negloglik,
            Criterion::Aic => &self.aic,
            Criterion::Aicc => &self.aicc,
            Criterion::Bic => &self.bic,
        }
    }

    fn rank_of(&self, criterion: Criterion, family: FamilyId) -> Option<usize> {
        self.get(criterion).iter().find(|r| r.family == family).map(|r| r.rank)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

impl FitEntry {
    pub fn from_outcome(family: FamilyId, outcome: &ctp_core::Result<Fit>) -> Self {
        let names = family.param_names().iter().map(|s| s.to_string()).collect();
        match outcome {
            Ok(f) => FitEntry {
                family,
                label: family.label().to_string(),
                status: FitStatus::Ok,
                error: None,
                param_names: names,
                alpha_hat: Some(f.alpha_hat),
                params_hat: Some(f.params_hat.values().to_vec()),
                loglik: Some(f.loglik),
                p: f.p,
                aic: Some(f.aic),
                aicc: Some(f.aicc),
                bic: Some(f.bic),
                converged: f.converged,
                boundary_active: f.boundary_active,
                validity_min: Some(f.validity_min),
                n_starts_used: f.n_starts_used,
                display: Some(DisplayStrings {
                    alpha_hat: fmt3(f.alpha_hat),
                    params_hat: f.params_hat.values().iter().map(|&v| fmt3(v)).collect(),
                    neg_loglik: fmt3(-f.loglik),
                    aic: fmt3(f.aic),
                    aicc: fmt3(f.aicc),
                    bic: fmt3(f.bic),
                }),
            },
            Err(e) => FitEntry {
                family,
                label: family.label().to_string(),
                status: FitStatus::Failed,
                error: Some(e.to_string()),
                param_names: names,
                alpha_hat: None,
                params_hat: None,
                loglik: None,
                p: family.dimension() + 1,
                aic: None,
                aicc: None,
                bic: None,
                converged: false,
                boundary_active: false,
                validity_min: None,
                n_starts_used: 0,
                display: None,
            },
        }
    }
}

impl FitReport {
    /// Assembles a report; entries keep the order of `outcomes`.
    pub fn new(
        dataset: &Dataset,
        outcomes: &[(FamilyId, ctp_core::Result<Fit>)],
        config: &FitConfig,
        timestamp: Option<String>,
    ) -> Result<Self> {
        let summary = describe(&dataset.values)?;
        let ok: Vec<Fit> = outcomes.iter().filter_map(|(_, r)| r.as_ref().ok().cloned()).collect();
        Ok(Self {
            dataset: DatasetInfo {
                name: dataset.name.clone(),
                n: summary.n,
                x0_hat: summary.min,
                summary,
            },
            fits: outcomes.iter().map(|(f, r)| FitEntry::from_outcome(*f, r)).collect(),
            rankings: Rankings {
                negloglik: rank_models(&ok, Criterion::NegLogLik),
                aic: rank_models(&ok, Criterion::Aic),
                aicc: rank_models(&ok, Criterion::Aicc),
                bic: rank_models(&ok, Criterion::Bic),
            },
            config: config.clone(),
            tool: ToolInfo::default(),
            timestamp,
        })
    }

    pub fn all_converged(&self) -> bool {
        self.fits.iter().all(|f| f.status == FitStatus::Failed || f.converged)
    }

    /// Criteria with ranks in parentheses, one row per family, best
    /// `−logL` first.
    pub fn criteria_table(&self) -> String {
        let mut rows: Vec<&FitEntry> = self.fits.iter().collect();
        rows.sort_by_key(|f| {
            self.rankings
                .rank_of(Criterion::NegLogLik, f.family)
                .unwrap_or(usize::MAX)
        });
        let mut out = format!(
            "{:<14}{:>15}{:>15}{:>15}{:>15}\n",
            "Distribution", "-logL", "AIC", "AICC", "BIC"
        );
        for f in rows {
            out.push_str(&format!("{:<14}", f.label));
            match f.status {
                FitStatus::Ok => {
                    for c in Criterion::ALL {
                        let value = match c {
                            Criterion::NegLogLik => -f.loglik.unwrap_or(f64::NAN),
                            Criterion::Aic => f.aic.unwrap_or(f64::NAN),
                            Criterion::Aicc => f.aicc.unwrap_or(f64::NAN),
                            Criterion::Bic => f.bic.unwrap_or(f64::NAN),
                        };
                        let rank = self.rankings.rank_of(c, f.family).map_or("-".into(), |r| r.to_string());
                        out.push_str(&format!("{:>15}", format!("{value:.3} ({rank})")));
                    }
                }
                FitStatus::Failed => {
                    out.push_str(&format!("  failed: {}", f.error.as_deref().unwrap_or("unknown error")));
                }
            }
            out.push('\n');
        }
        out
    }

    /// Estimated parameters, in the order the families were requested.
    pub fn estimates_table(&self) -> String {
        let mut out = String::new();
        for f in &self.fits {
            out.push_str(&format!("{:<14}x0 = {:<10}", f.label, fmt3(self.dataset.x0_hat)));
            if let (Some(alpha), Some(params)) = (f.alpha_hat, &f.params_hat) {
                out.push_str(&format!("alpha = {:<10}", fmt3(alpha)));
                for (name, v) in f.param_names.iter().zip(params) {
                    out.push_str(&format!("{name} = {:<10}", fmt3(*v)));
                }
                let mut flags = Vec::new();
                if !f.converged {
                    flags.push("not converged");
                }
                if f.boundary_active {
                    flags.push("boundary");
                }
                if !flags.is_empty() {
                    out.push_str(&format!("[{}]", flags.join(", ")));
                }
            } else {
                out.push_str("failed");
            }
            out.push('\n');
        }
        out
    }
}
