//! Homogeneity-of-variance tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{describe, one_way_anova, require_groups, tail_probability, Distribution, StatsError, TestResult};

/// Which Brown–Forsythe statistic to compute on the median-centered spreads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BrownForsytheVariant {
    /// Classic ANOVA on `|x − median|` (df2 = N − g).
    #[default]
    Spread,
    /// Brown–Forsythe robust-means F* on `|x − median|` (fractional df2).
    Means,
}

impl fmt::Display for BrownForsytheVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BrownForsytheVariant::Spread => "spread",
            BrownForsytheVariant::Means => "means",
        })
    }
}

impl FromStr for BrownForsytheVariant {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spread" => Ok(BrownForsytheVariant::Spread),
            "means" => Ok(BrownForsytheVariant::Means),
            other => Err(StatsError::InvalidParameter(format!(
                "unknown Brown-Forsythe variant {other:?} (expected spread or means)"
            ))),
        }
    }
}

fn median_deviations(groups: &[Vec<f64>]) -> Vec<Vec<f64>> {
    groups
        .iter()
        .map(|g| {
            let med = describe::median(g);
            g.iter().map(|x| (x - med).abs()).collect()
        })
        .collect()
}

pub fn brown_forsythe(groups: &[Vec<f64>], variant: BrownForsytheVariant) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 2)?;
    let z = median_deviations(groups);
    if z.iter().flatten().all(|&v| v == 0.0) {
        return Err(StatsError::Degenerate("all median deviations are zero".into()));
    }
    match variant {
        BrownForsytheVariant::Spread => one_way_anova(&z),
        BrownForsytheVariant::Means => robust_means_f(&z),
    }
}

/// Brown–Forsythe (1974) F* for equality of means under unequal variances.
pub fn robust_means_f(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 2)?;
    let total: usize = groups.iter().map(Vec::len).sum();
    let nt = total as f64;
    let grand = groups.iter().flatten().sum::<f64>() / nt;
    let mut numerator = 0.0;
    let mut weighted_var = Vec::with_capacity(groups.len());
    for g in groups {
        let ni = g.len() as f64;
        numerator += ni * (describe::mean(g) - grand).powi(2);
        weighted_var.push((1.0 - ni / nt) * describe::sample_variance(g));
    }
    let denominator: f64 = weighted_var.iter().sum();
    if denominator <= 0.0 {
        return Err(StatsError::Degenerate("all group variances are zero".into()));
    }
    let inv_df2: f64 = groups
        .iter()
        .zip(&weighted_var)
        .map(|(g, wv)| (wv / denominator).powi(2) / (g.len() as f64 - 1.0))
        .sum();
    let df1 = groups.len() as f64 - 1.0;
    let df2 = 1.0 / inv_df2;
    let statistic = numerator / denominator;
    let p = tail_probability(Distribution::F { df1, df2 }, statistic)?;
    Ok(TestResult {
        statistic,
        df1,
        df2: Some(df2),
        p,
    })
}

pub fn bartlett(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 2)?;
    let g = groups.len() as f64;
    let total: usize = groups.iter().map(Vec::len).sum();
    let dof_within = total as f64 - g;
    let mut pooled = 0.0;
    let mut sum_log = 0.0;
    let mut sum_inv = 0.0;
    for (i, grp) in groups.iter().enumerate() {
        let v = describe::sample_variance(grp);
        if v <= 0.0 {
            return Err(StatsError::Degenerate(format!("group {i} has zero variance")));
        }
        let dof = grp.len() as f64 - 1.0;
        pooled += dof * v;
        sum_log += dof * v.ln();
        sum_inv += 1.0 / dof;
    }
    pooled /= dof_within;
    let correction = 1.0 + (sum_inv - 1.0 / dof_within) / (3.0 * (g - 1.0));
    let statistic = ((dof_within * pooled.ln() - sum_log) / correction).max(0.0);
    let df = g - 1.0;
    let p = tail_probability(Distribution::ChiSquare { df }, statistic)?;
    Ok(TestResult {
        statistic,
        df1: df,
        df2: None,
        p,
    })
}
