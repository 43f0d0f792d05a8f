//! Subcommand implementations. Each returns the text destined for standard
//! output so it can be exercised without spawning the binary.

use chrono::{SecondsFormat, Utc};
use clap::ValueEnum;
use ctp_core::{
    compare_families, rank_groups, validity_check, Criterion, Ctp, CtpDistribution, CtpError, Delta, FamilyId,
    FitConfig, Observations, Params, ParetoBase,
};
use serde::Serialize;

use crate::dataset::DatasetSource;
use crate::error::{CliError, Result};
use crate::report::FitReport;
use crate::summary::describe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Pdf,
    Cdf,
    Survival,
    Hazard,
}

/// Text for standard output plus whether every fit converged.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    pub text: String,
    pub converged: bool,
}

/// Parses `original`, `modified` or a comma-separated list of family names.
pub fn parse_family_set(spec: &str) -> Result<Vec<FamilyId>> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "original" => Ok(FamilyId::ORIGINAL.to_vec()),
        "modified" => Ok(FamilyId::MODIFIED.to_vec()),
        "all" => Ok(FamilyId::ALL.to_vec()),
        list => list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse::<FamilyId>().map_err(CliError::from))
            .collect(),
    }
}

fn timestamp(enabled: bool) -> Option<String> {
    enabled.then(|| Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn describe_cmd(source: &DatasetSource, format: Format) -> Result<String> {
    let data = source.load()?;
    let summary = describe(&data.values)?;
    match format {
        Format::Table => Ok(format!("dataset {}\n{}", data.name, summary.to_table())),
        Format::Json => to_json(&summary),
    }
}

pub fn fit_cmd(
    source: &DatasetSource,
    families: &[FamilyId],
    config: &FitConfig,
    format: Format,
    with_timestamp: bool,
) -> Result<FitOutput> {
    if families.is_empty() {
        return Err(CliError::Usage("no families requested".into()));
    }
    let data = source.load()?;
    let sample = Observations::new(data.values.clone())?;
    let outcomes = compare_families(&sample, families, config);
    if let [(_, Err(e))] = &outcomes[..] {
        return Err(e.clone().into());
    }
    let report = FitReport::new(&data, &outcomes, config, timestamp(with_timestamp))?;
    let text = match format {
        Format::Json => to_json(&report)?,
        Format::Table => {
            let mut t = format!("dataset {} (n = {})\n\n", report.dataset.name, report.dataset.n);
            t.push_str(&report.estimates_table());
            t.push('\n');
            t.push_str(&report.criteria_table());
            t
        }
    };
    Ok(FitOutput {
        text,
        converged: report.all_converged(),
    })
}

#[derive(Debug, Serialize)]
struct GroupReport<'a> {
    criterion: Criterion,
    families: &'a [FamilyId],
    groups: Vec<ctp_core::GroupRanking>,
}

/// Fits every family within each group of `group_column` and ranks them.
pub fn compare_groups_cmd(
    source: &DatasetSource,
    group_column: usize,
    families: &[FamilyId],
    config: &FitConfig,
    criterion: Criterion,
    format: Format,
) -> Result<String> {
    let groups = source
        .load_groups(group_column)?
        .into_iter()
        .map(|g| Ok((g.name, Observations::new(g.values)?)))
        .collect::<Result<Vec<_>>>()?;
    let ranked = rank_groups(&groups, families, config, criterion);
    match format {
        Format::Json => to_json(&GroupReport {
            criterion,
            families,
            groups: ranked,
        }),
        Format::Table => {
            let mut out = format!("{:<10}", "group");
            for f in families {
                out.push_str(&format!("{:>10}", f.label()));
            }
            out.push('\n');
            for g in ranked {
                out.push_str(&format!("{:<10}", g.label));
                for (_, rank) in g.ranks {
                    out.push_str(&format!("{:>10}", rank.map_or("-".to_string(), |r| r.to_string())));
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Serialize)]
struct ValidityReport {
    delta1: f64,
    delta2: f64,
    delta3: f64,
    valid: bool,
    min_value: f64,
    argmin_t: f64,
}

pub fn validate_cmd(delta1: f64, delta2: f64, format: Format) -> Result<String> {
    let delta = Delta::new(delta1, delta2)?;
    let cert = validity_check(&delta);
    let report = ValidityReport {
        delta1,
        delta2,
        delta3: delta.delta3(),
        valid: cert.is_valid,
        min_value: cert.min_value,
        argmin_t: cert.argmin_t,
    };
    match format {
        Format::Json => to_json(&report),
        Format::Table => Ok(format!(
            "delta = ({delta1}, {delta2}, {})\nvalid: {}\nmin r(t) = {} at t = {}\n",
            report.delta3,
            if cert.is_valid { "yes" } else { "no" },
            cert.min_value,
            cert.argmin_t
        )),
    }
}

/// A distribution given explicitly on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub family: FamilyId,
    pub params: Vec<f64>,
    pub alpha: f64,
    pub x0: f64,
    /// Keep coefficients that fail the validity check (curves only).
    pub unchecked: bool,
}

impl DistSpec {
    pub fn build(&self) -> Result<Ctp> {
        let params = Params::new(self.params.clone());
        let base = ParetoBase::new(self.x0, self.alpha)?;
        let delta = self.family.to_delta(&params)?;
        if !self.family.region_contains(&params)? {
            return Err(CliError::Usage(format!(
                "parameters {:?} lie outside the {} region",
                self.params, self.family
            )));
        }
        if self.unchecked {
            Ok(CtpDistribution::new_unchecked(base, delta))
        } else {
            Ok(CtpDistribution::new(base, delta)?)
        }
    }
}

pub fn sample_cmd(spec: &DistSpec, n: usize, seed: u64) -> Result<String> {
    let dist = DistSpec {
        unchecked: false,
        ..spec.clone()
    }
    .build()?;
    let values = dist.sample(n, seed)?;
    Ok(values.iter().map(|v| format!("{v}\n")).collect())
}

/// `steps + 1` evenly spaced points of `kind` on `[from, to]`, as TSV.
pub fn curve_cmd(dist: &Ctp, kind: CurveKind, from: f64, to: f64, steps: usize) -> Result<String> {
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(CliError::Usage(format!("invalid range [{from}, {to}]")));
    }
    let mut out = String::with_capacity(steps * 40);
    for i in 0..=steps {
        let x = if i == steps {
            to
        } else {
            from + (to - from) * i as f64 / steps as f64
        };
        let y = match kind {
            CurveKind::Pdf => dist.pdf(x),
            CurveKind::Cdf => dist.cdf(x),
            CurveKind::Survival => dist.survival(x),
            CurveKind::Hazard => dist.hazard(x)?,
        };
        out.push_str(&format!("{x}\t{y}\n"));
    }
    Ok(out)
}

/// The distribution at the maximum-likelihood estimate of `family`.
pub fn fitted_distribution(source: &DatasetSource, family: FamilyId, config: &FitConfig) -> Result<Ctp> {
    let data = source.load()?;
    let sample = Observations::new(data.values)?;
    let r = ctp_core::fit(family, &sample, config)?;
    let base = ParetoBase::new(r.x0_hat, r.alpha_hat)?;
    let delta = family.to_delta(&r.params_hat)?;
    // an unchecked fit may legitimately land on invalid coefficients
    Ok(CtpDistribution::new_unchecked(base, delta))
}

/// Formats an invalid-coefficient error together with its certificate.
pub fn describe_error(e: &CliError) -> String {
    match e {
        CliError::Model(CtpError::InvalidDistribution { min_value, argmin_t }) => {
            format!("error: {e}\nvalid: no\nmin r(t) = {min_value} at t = {argmin_t}")
        }
        _ => format!("error: {e}"),
    }
}
