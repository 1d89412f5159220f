use serde::Serialize;

use super::{describe, require_groups, tail_probability, Distribution, StatsError};

/// One Games–Howell pairwise comparison between groups `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseComparison {
    pub i: usize,
    pub j: usize,
    /// `mean(i) − mean(j)`.
    pub mean_diff: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
}

pub fn games_howell(groups: &[Vec<f64>]) -> Result<Vec<PairwiseComparison>, StatsError> {
    require_groups(groups, 2, 2)?;
    let k = groups.len();
    let mut summaries = Vec::with_capacity(k);
    for (i, g) in groups.iter().enumerate() {
        let var = describe::sample_variance(g);
        if var <= 0.0 {
            return Err(StatsError::Degenerate(format!("group {i} has zero variance")));
        }
        let n = g.len() as f64;
        summaries.push((describe::mean(g), var / n, n));
    }
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let (mi, vi, ni) = summaries[i];
            let (mj, vj, nj) = summaries[j];
            let se = (vi + vj).sqrt();
            let mean_diff = mi - mj;
            let t = mean_diff.abs() / se;
            let df = (vi + vj).powi(2) / (vi * vi / (ni - 1.0) + vj * vj / (nj - 1.0));
            let p = tail_probability(Distribution::StudentizedRange { k, df }, t * std::f64::consts::SQRT_2)?;
            out.push(PairwiseComparison {
                i,
                j,
                mean_diff,
                t,
                df,
                p,
            });
        }
    }
    Ok(out)
}

/// `min(1, m·p)` for each p-value.
pub fn bonferroni(p_values: &[f64], m: usize) -> Vec<f64> {
    p_values.iter().map(|p| (p * m as f64).min(1.0)).collect()
}
