use super::{describe, require_groups, tail_probability, Distribution, StatsError, TestResult};

/// Classic one-way ANOVA F test.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 1)?;
    let g = groups.len() as f64;
    let total: usize = groups.iter().map(Vec::len).sum();
    let nt = total as f64;
    if nt <= g {
        return Err(StatsError::InsufficientData("no within-group degrees of freedom".into()));
    }
    let grand = groups.iter().flatten().sum::<f64>() / nt;
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for grp in groups {
        let m = describe::mean(grp);
        ssb += grp.len() as f64 * (m - grand).powi(2);
        ssw += grp.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df1 = g - 1.0;
    let df2 = nt - g;
    if ssw == 0.0 && ssb == 0.0 {
        return Err(StatsError::Degenerate("all values identical".into()));
    }
    let statistic = if ssw == 0.0 {
        f64::INFINITY
    } else {
        (ssb / df1) / (ssw / df2)
    };
    let p = tail_probability(Distribution::F { df1, df2 }, statistic)?;
    Ok(TestResult {
        statistic,
        df1,
        df2: Some(df2),
        p,
    })
}

/// Welch's heteroscedastic one-way ANOVA.
pub fn welch_anova(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    require_groups(groups, 2, 2)?;
    let k = groups.len() as f64;
    let mut weights = Vec::with_capacity(groups.len());
    let mut means = Vec::with_capacity(groups.len());
    for (i, grp) in groups.iter().enumerate() {
        let var = describe::sample_variance(grp);
        if var <= 0.0 {
            return Err(StatsError::Degenerate(format!("group {i} has zero variance")));
        }
        weights.push(grp.len() as f64 / var);
        means.push(describe::mean(grp));
    }
    let w_sum: f64 = weights.iter().sum();
    let weighted_mean = weights.iter().zip(&means).map(|(w, m)| w * m).sum::<f64>() / w_sum;
    let between = weights
        .iter()
        .zip(&means)
        .map(|(w, m)| w * (m - weighted_mean).powi(2))
        .sum::<f64>()
        / (k - 1.0);
    let lambda: f64 = groups
        .iter()
        .zip(&weights)
        .map(|(grp, w)| (1.0 - w / w_sum).powi(2) / (grp.len() as f64 - 1.0))
        .sum();
    let denom = 1.0 + 2.0 * (k - 2.0) * lambda / (k * k - 1.0);
    let statistic = between / denom;
    let df1 = k - 1.0;
    let df2 = (k * k - 1.0) / (3.0 * lambda);
    let p = tail_probability(Distribution::F { df1, df2 }, statistic)?;
    Ok(TestResult {
        statistic,
        df1,
        df2: Some(df2),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_groups() {
        let g = vec![vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0]];
        let r = welch_anova(&g).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn welch_hand_values() {
        // Means 2, 4, 20; variances 1, 4, 100; n = 3 → weights 3, 0.75, 0.03.
        let g = vec![vec![1., 2., 3.], vec![2., 4., 6.], vec![10., 20., 30.]];
        let r = welch_anova(&g).unwrap();
        let w = [3.0, 0.75, 0.03];
        let m = [2.0, 4.0, 20.0];
        let ws: f64 = w.iter().sum();
        let mw = (0..3).map(|i| w[i] * m[i]).sum::<f64>() / ws;
        let a = (0..3).map(|i| w[i] * (m[i] - mw).powi(2)).sum::<f64>() / 2.0;
        let lam = (0..3).map(|i| (1.0 - w[i] / ws).powi(2) / 2.0).sum::<f64>();
        let f = a / (1.0 + 2.0 * lam / 8.0);
        assert!((r.statistic - f).abs() < 1e-12);
        assert!((r.df2.unwrap() - 8.0 / (3.0 * lam)).abs() < 1e-12);
        assert_eq!(r.df1, 2.0);
    }

    #[test]
    fn zero_variance_rejected() {
        assert!(welch_anova(&[vec![1.0, 1.0], vec![2.0, 3.0]]).is_err());
    }

    #[test]
    fn classic_anova() {
        let r = one_way_anova(&[vec![1., 2., 3.], vec![4., 5., 6.]]).unwrap();
        // SSB = 13.5, SSW = 4 → F = 13.5 / 1.
        assert!((r.statistic - 13.5).abs() < 1e-12);
        assert_eq!(r.df2, Some(4.0));
    }
}
