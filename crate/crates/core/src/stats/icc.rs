use serde::{Deserialize, Serialize};

use super::{f_quantile, StatsError};
use crate::model::{Dimension, Technique};

pub const ICC_CONFIDENCE: f64 = 0.95;

/// Targets (coding units) by observed subscale scores. Rows are ragged because
/// each rater scores only a subset of units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingMatrix {
    pub technique: Technique,
    pub dimension: Dimension,
    pub targets: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl RatingMatrix {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.targets.len() != self.values.len() {
            return Err(StatsError::InvalidParameter(format!(
                "{} targets but {} value rows",
                self.targets.len(),
                self.values.len()
            )));
        }
        for (t, row) in self.targets.iter().zip(&self.values) {
            if row.is_empty() {
                return Err(StatsError::InsufficientData(format!("target {t} has no observations")));
            }
            if row.iter().any(|v| !(1.0..=5.0).contains(v)) {
                return Err(StatsError::InvalidParameter(format!("target {t} has a score outside [1, 5]")));
            }
        }
        Ok(())
    }

    pub fn observation_count(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IccResult {
    pub icc: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    /// Between-target over within-target mean square.
    pub f: f64,
    pub df1: f64,
    pub df2: f64,
    /// Effective number of ratings per target.
    pub k0: f64,
}

/// One-way random-effects, average-measures intraclass correlation, ICC(1,k).
///
/// Unequal row sizes are handled by the one-way ANOVA with unequal group
/// sizes; `k0 = (N − Σnᵢ²/N)/(n − 1)` sets the error degrees of freedom
/// `n(k0 − 1)` used for the F-based confidence interval.
pub fn icc_one_way_average(rows: &[Vec<f64>]) -> Result<IccResult, StatsError> {
    let n = rows.len();
    if n < 2 {
        return Err(StatsError::InsufficientData(format!("need at least 2 targets, got {n}")));
    }
    if rows.iter().any(Vec::is_empty) {
        return Err(StatsError::InsufficientData("a target has no observations".into()));
    }
    if rows.iter().all(|r| r.len() < 2) {
        return Err(StatsError::InsufficientData(
            "every target has a single observation".into(),
        ));
    }
    let total: usize = rows.iter().map(Vec::len).sum();
    let nf = n as f64;
    let nt = total as f64;
    let grand = rows.iter().flatten().sum::<f64>() / nt;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for r in rows {
        let m = r.iter().sum::<f64>() / r.len() as f64;
        ss_between += r.len() as f64 * (m - grand).powi(2);
        ss_within += r.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let msb = ss_between / (nf - 1.0);
    let msw = ss_within / (nt - nf);
    let sum_sq: f64 = rows.iter().map(|r| (r.len() as f64).powi(2)).sum();
    let k0 = (nt - sum_sq / nt) / (nf - 1.0);
    let df1 = nf - 1.0;
    let df2 = nf * (k0 - 1.0);

    const TINY: f64 = 1e-12;
    if msb <= TINY && msw <= TINY {
        return Err(StatsError::Degenerate("zero variance: all scores identical".into()));
    }
    if msw <= TINY {
        return Ok(IccResult {
            icc: 1.0,
            ci_low: 1.0,
            ci_high: 1.0,
            confidence: ICC_CONFIDENCE,
            f: f64::INFINITY,
            df1,
            df2,
            k0,
        });
    }
    if msb <= TINY {
        return Err(StatsError::Degenerate("zero between-target variance".into()));
    }
    let f = msb / msw;
    let alpha = 1.0 - ICC_CONFIDENCE;
    let upper_q = f_quantile(1.0 - alpha / 2.0, df1, df2)?;
    let lower_q = f_quantile(alpha / 2.0, df1, df2)?;
    let f_low = f / upper_q;
    let f_high = f / lower_q;
    Ok(IccResult {
        icc: 1.0 - 1.0 / f,
        ci_low: 1.0 - 1.0 / f_low,
        ci_high: 1.0 - 1.0 / f_high,
        confidence: ICC_CONFIDENCE,
        f,
        df1,
        df2,
        k0,
    })
}
