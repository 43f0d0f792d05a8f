use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Six-number summary of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quartiles interpolate linearly between order statistics at position
/// `1 + (n − 1)q`.
pub fn describe(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(CliError::Usage("cannot summarize an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(Summary {
        n,
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        mean: sorted.iter().sum::<f64>() / n as f64,
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Summary {
    /// One row per statistic, values to three decimals.
    pub fn to_table(&self) -> String {
        let rows = [
            ("n", self.n.to_string()),
            ("min", format!("{:.3}", self.min)),
            ("Q1", format!("{:.3}", self.q1)),
            ("median", format!("{:.3}", self.median)),
            ("mean", format!("{:.3}", self.mean)),
            ("Q3", format!("{:.3}", self.q3)),
            ("max", format!("{:.3}", self.max)),
        ];
        rows.iter().map(|(k, v)| format!("{k:<8}{v:>12}\n")).collect()
    }
}
