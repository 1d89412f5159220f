use super::{require_groups, tail_probability, Distribution, StatsError, TestResult};

/// Midranks (1-based) of the pooled values, returned per group.
fn pooled_midranks(groups: &[Vec<f64>]) -> (Vec<Vec<f64>>, f64) {
    let mut pooled: Vec<(f64, usize, usize)> = groups
        .iter()
        .enumerate()
        .flat_map(|(g, vals)| vals.iter().enumerate().map(move |(i, &v)| (v, g, i)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ranks: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; g.len()]).collect();
    let mut tie_sum = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let midrank = (start + end + 1) as f64 / 2.0;
        for &(_, g, i) in &pooled[start..end] {
            ranks[g][i] = midrank;
        }
        let t = (end - start) as f64;
        tie_sum += t * t * t - t;
        start = end;
    }
    (ranks, tie_sum)
}

/// Kruskal–Wallis H with the correction for ties.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 1)?;
    let total: usize = groups.iter().map(Vec::len).sum();
    if total < 3 {
        return Err(StatsError::InsufficientData(format!("need at least 3 values, got {total}")));
    }
    let n = total as f64;
    let (ranks, tie_sum) = pooled_midranks(groups);
    let correction = 1.0 - tie_sum / (n * n * n - n);
    if correction <= 0.0 {
        return Err(StatsError::Degenerate("degenerate ties: all values equal".into()));
    }
    let rank_term: f64 = ranks
        .iter()
        .map(|r| r.iter().sum::<f64>().powi(2) / r.len() as f64)
        .sum();
    let h = (12.0 / (n * (n + 1.0)) * rank_term - 3.0 * (n + 1.0)) / correction;
    let statistic = h.max(0.0);
    let df = groups.len() as f64 - 1.0;
    let p = tail_probability(Distribution::ChiSquare { df }, statistic)?;
    Ok(TestResult {
        statistic,
        df1: df,
        df2: None,
        p,
    })
}
