//! Statistical tests for agreement, variance, information loss and ranking.
//!
//! Every function is pure and deterministic. Tests return a [`TestResult`];
//! all tail probabilities come from [`tail_probability`].

mod anova;
mod describe;
mod dist;
mod icc;
mod nonparametric;
mod normality;
mod posthoc;
mod ranking;
pub mod special;
mod variance;

use serde::Serialize;

pub use anova::{one_way_anova, welch_anova};
pub use describe::{mean, median, population_variance, sample_sd, sample_variance};
pub use dist::{f_quantile, studentized_range_cdf, tail_probability, Distribution};
pub use icc::{icc_one_way_average, IccResult, RatingMatrix, ICC_CONFIDENCE};
pub use nonparametric::kruskal_wallis;
pub use normality::{shapiro_wilk, ShapiroWilk};
pub use posthoc::{bonferroni, games_howell, PairwiseComparison};
pub use ranking::{ranking_analysis, RankingCurve, RankingPoint, UnitSpread, PERCENTILE_GRID};
pub use variance::{bartlett, brown_forsythe, robust_means_f, BrownForsytheVariant};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Outcome of a hypothesis test. `df2` is absent for chi-square-type tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df1: f64,
    pub df2: Option<f64>,
    pub p: f64,
}

/// Mean of (unit score − expert score)² over the units of one interaction.
pub fn mse_vs_expert(unit_scores: &[f64], expert_score: f64) -> Result<f64, StatsError> {
    if unit_scores.is_empty() {
        return Err(StatsError::InsufficientData("no unit scores for interaction".into()));
    }
    Ok(unit_scores.iter().map(|s| (s - expert_score).powi(2)).sum::<f64>() / unit_scores.len() as f64)
}

pub(crate) fn require_groups(groups: &[Vec<f64>], min_groups: usize, min_size: usize) -> Result<(), StatsError> {
    if groups.len() < min_groups {
        return Err(StatsError::InsufficientData(format!(
            "need at least {min_groups} groups, got {}",
            groups.len()
        )));
    }
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() < min_size) {
        return Err(StatsError::InsufficientData(format!(
            "group {i} has {} values, need at least {min_size}",
            g.len()
        )));
    }
    if groups.iter().flatten().any(|v| !v.is_finite()) {
        return Err(StatsError::InvalidParameter("non-finite value in input".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mse_examples() {
        assert_eq!(mse_vs_expert(&[3.0, 3.0, 3.0], 3.0).unwrap(), 0.0);
        assert_eq!(mse_vs_expert(&[2.0, 4.0], 3.0).unwrap(), 1.0);
        assert_eq!(mse_vs_expert(&[5.0], 1.0).unwrap(), 16.0);
        assert!(mse_vs_expert(&[], 1.0).is_err());
    }
}
