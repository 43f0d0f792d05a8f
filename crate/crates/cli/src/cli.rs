use std::io::Write;

use clap::{Args, Parser, Subcommand};
use ctp_core::{Criterion, FamilyId, FitConfig, ValidityPolicy};

use crate::commands::{
    compare_groups_cmd, curve_cmd, describe_cmd, describe_error, fit_cmd, fitted_distribution, parse_family_set,
    sample_cmd, validate_cmd, CurveKind, DistSpec, Format,
};
use crate::dataset::{DatasetSource, FileSource, YearFilter};
use crate::error::{CliError, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;

/// Fit, compare and inspect cubic-transmuted Pareto models.
#[derive(Debug, Parser)]
#[command(name = "ctp", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Six-number summary of a dataset.
    Describe {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Maximum-likelihood fit of one family.
    Fit {
        #[arg(long)]
        family: FamilyId,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit several families and rank them by information criteria.
    Compare {
        /// `original` or `modified`.
        #[arg(long, conflicts_with = "families")]
        set: Option<String>,
        /// Comma-separated family names.
        #[arg(long)]
        families: Option<String>,
        /// Rank within each distinct value of this 0-based column.
        #[arg(long)]
        group_column: Option<usize>,
        /// Criterion used for per-group ranks.
        #[arg(long, default_value = "negloglik", requires = "group_column")]
        criterion: Criterion,
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        fit: FitArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check whether (δ₁, δ₂) defines a distribution.
    #[command(allow_negative_numbers = true)]
    Validate {
        delta1: f64,
        delta2: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Draw a seeded sample, one value per line.
    Sample {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Tabulate pdf, cdf, survival or hazard on a grid as TSV.
    Curve {
        #[arg(long, value_enum)]
        what: CurveKind,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 500)]
        steps: usize,
        /// Evaluate the fitted distribution on this dataset instead of explicit parameters.
        #[arg(long, conflicts_with_all = ["alpha", "params"])]
        data: Option<String>,
        #[command(flatten)]
        dist: DistArgs,
        #[command(flatten)]
        fit: FitArgs,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Embedded dataset name (`wheaton`) or path to a delimited file.
    #[arg(long)]
    pub data: String,
    /// 0-based column holding the observations.
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    /// Field delimiter; `tab` for tab-separated files.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// The first row is a header.
    #[arg(long)]
    pub header: bool,
    /// Keep only rows whose year column equals this value.
    #[arg(long)]
    pub filter_year: Option<i64>,
    #[arg(long, default_value_t = 0, requires = "filter_year")]
    pub year_column: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 200)]
    pub starts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_objective: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_params: f64,
    #[arg(long, default_value_t = 1e8)]
    pub penalty_scale: f64,
    /// Accept coefficients whose density is negative away from the data.
    #[arg(long)]
    pub unchecked: bool,
    /// Run the starts on one thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[arg(long)]
    pub family: FamilyId,
    /// Comma-separated family parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub x0: f64,
}

impl DataArgs {
    pub fn source(&self) -> Result<DatasetSource> {
        let source = DatasetSource::from_arg(&self.data);
        let DatasetSource::File(file) = source else {
            return Ok(source);
        };
        Ok(DatasetSource::File(FileSource {
            column: self.column,
            delimiter: parse_delimiter(&self.delimiter)?,
            has_header: self.header,
            filter: self.filter_year.map(|year| YearFilter {
                column: self.year_column,
                year,
            }),
            ..file
        }))
    }
}

fn parse_delimiter(s: &str) -> Result<u8> {
    match s {
        "tab" | "\\t" | "\t" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(CliError::Usage(format!(
            "delimiter must be a single ASCII character, got '{s}'"
        ))),
    }
}

impl FitArgs {
    pub fn config(&self) -> FitConfig {
        FitConfig {
            n_starts: self.starts,
            max_iterations: self.max_iter,
            tol_objective: self.tol_objective,
            tol_params: self.tol_params,
            seed: self.seed,
            penalty_scale: self.penalty_scale,
            validity: if self.unchecked {
                ValidityPolicy::Unchecked
            } else {
                ValidityPolicy::Checked
            },
            parallel: !self.serial,
        }
    }
}

impl DistArgs {
    fn spec(&self, unchecked: bool) -> Result<DistSpec> {
        let alpha = self
            .alpha
            .ok_or_else(|| CliError::Usage("--alpha is required for an explicit distribution".into()))?;
        Ok(DistSpec {
            family: self.family,
            params: self.params.clone(),
            alpha,
            x0: self.x0,
            unchecked,
        })
    }
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
/// Returns the process exit code.
pub fn run<O: Write, E: Write>(cli: Cli, out: &mut O, err: &mut E) -> u8 {
    match dispatch(cli) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            if code == EXIT_NOT_CONVERGED {
                let _ = writeln!(err, "warning: at least one fit did not converge");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "{}", describe_error(&e));
            EXIT_INPUT
        }
    }
}

fn converged_code(converged: bool) -> u8 {
    if converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn dispatch(cli: Cli) -> Result<(String, u8)> {
    match cli.command {
        Command::Describe { data, format } => Ok((describe_cmd(&data.source()?, format)?, EXIT_OK)),
        Command::Fit {
            family,
            data,
            fit,
            output,
        } => {
            let r = fit_cmd(
                &data.source()?,
                &[family],
                &fit.config(),
                output.format,
                !output.no_timestamp,
            )?;
            Ok((r.text, converged_code(r.converged)))
        }
        Command::Compare {
            set,
            families,
            group_column,
            criterion,
            data,
            fit,
            output,
        } => {
            let spec = families.or(set).unwrap_or_else(|| "modified".to_string());
            let families = parse_family_set(&spec)?;
            if families.len() < 2 {
                return Err(CliError::Usage("compare needs at least two families".into()));
            }
            let source = data.source()?;
            match group_column {
                Some(column) => Ok((
                    compare_groups_cmd(&source, column, &families, &fit.config(), criterion, output.format)?,
                    EXIT_OK,
                )),
                None => {
                    let r = fit_cmd(&source, &families, &fit.config(), output.format, !output.no_timestamp)?;
                    Ok((r.text, converged_code(r.converged)))
                }
            }
        }
        Command::Validate { delta1, delta2, format } => Ok((validate_cmd(delta1, delta2, format)?, EXIT_OK)),
        Command::Sample { dist, n, seed } => Ok((sample_cmd(&dist.spec(false)?, n, seed)?, EXIT_OK)),
        Command::Curve {
            what,
            from,
            to,
            steps,
            data,
            dist,
            fit,
        } => {
            let d = match data {
                Some(data) => fitted_distribution(&DatasetSource::from_arg(&data), dist.family, &fit.config())?,
                None => dist.spec(fit.unchecked)?.build()?,
            };
            Ok((curve_cmd(&d, what, from, to, steps)?, EXIT_OK))
        }
    }
}
