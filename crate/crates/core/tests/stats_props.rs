use cohesion_core::model::Technique;
use cohesion_core::stats::{
    bartlett, brown_forsythe, icc_one_way_average, kruskal_wallis, ranking_analysis, welch_anova,
    BrownForsytheVariant, UnitSpread, PERCENTILE_GRID,
};
use cohesion_core::Seconds;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

/// Shrout–Fleiss ICC(1,k) for a balanced n × k table.
fn shrout_fleiss(rows: &[Vec<f64>]) -> (f64, f64, f64) {
    let n = rows.len() as f64;
    let k = rows[0].len() as f64;
    let grand: f64 = rows.iter().flatten().sum::<f64>() / (n * k);
    let bms = rows
        .iter()
        .map(|r| k * (r.iter().sum::<f64>() / k - grand).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let wms = rows
        .iter()
        .map(|r| {
            let m = r.iter().sum::<f64>() / k;
            r.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        })
        .sum::<f64>()
        / (n * (k - 1.0));
    let f = bms / wms;
    let dist = FisherSnedecor::new(n - 1.0, n * (k - 1.0)).unwrap();
    let fl = f / dist.inverse_cdf(0.975);
    let fu = f / dist.inverse_cdf(0.025);
    ((bms - wms) / bms, 1.0 - 1.0 / fl, 1.0 - 1.0 / fu)
}

fn icc_fixture() -> Vec<Vec<f64>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/icc_6x3.csv");
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records()
        .map(|r| r.unwrap().iter().skip(1).map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn icc_fixture_matches_shrout_fleiss() {
    let rows = icc_fixture();
    let got = icc_one_way_average(&rows).unwrap();
    let (icc, lo, hi) = shrout_fleiss(&rows);
    assert!((got.icc - icc).abs() < 1e-9);
    assert!((got.ci_low - lo).abs() < 1e-9, "{} {}", got.ci_low, lo);
    assert!((got.ci_high - hi).abs() < 1e-9);
    assert!(got.icc > 0.9);
}

fn group_strategy(min_groups: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3..12), min_groups..5)
}

fn distinct(groups: &[Vec<f64>]) -> bool {
    groups.iter().all(|g| g.iter().any(|&x| (x - g[0]).abs() > 1e-3))
}

proptest! {
    #[test]
    fn p_values_are_probabilities(groups in group_strategy(2)) {
        prop_assume!(distinct(&groups));
        for r in [
            brown_forsythe(&groups, BrownForsytheVariant::Spread),
            brown_forsythe(&groups, BrownForsytheVariant::Means),
            welch_anova(&groups),
            bartlett(&groups),
            kruskal_wallis(&groups),
        ] {
            let r = r.unwrap();
            prop_assert!((0.0..=1.0).contains(&r.p));
            prop_assert!(r.df1 > 0.0 && r.df2.is_none_or(|d| d > 0.0));
        }
    }

    #[test]
    fn statistics_are_scale_invariant(groups in group_strategy(2), c in 0.01f64..100.0) {
        prop_assume!(distinct(&groups));
        let scaled: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|x| x * c).collect()).collect();
        let pairs = [
            (brown_forsythe(&groups, BrownForsytheVariant::Spread), brown_forsythe(&scaled, BrownForsytheVariant::Spread)),
            (welch_anova(&groups), welch_anova(&scaled)),
            (bartlett(&groups), bartlett(&scaled)),
        ];
        for (a, b) in pairs {
            let (a, b) = (a.unwrap().statistic, b.unwrap().statistic);
            prop_assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn kruskal_invariant_under_monotone_maps(groups in group_strategy(2)) {
        let mapped: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|x| (x / 10.0).exp() + x.powi(3)).collect()).collect();
        let a = kruskal_wallis(&groups).unwrap();
        let b = kruskal_wallis(&mapped).unwrap();
        prop_assert!((a.statistic - b.statistic).abs() < 1e-9);
    }

    #[test]
    fn perfect_agreement_gives_unit_icc(targets in prop::collection::vec(1u8..=5, 2..10), k in 2usize..6) {
        prop_assume!(targets.iter().any(|&t| t != targets[0]));
        let rows: Vec<Vec<f64>> = targets.iter().map(|&t| vec![t as f64; k]).collect();
        prop_assert_eq!(icc_one_way_average(&rows).unwrap().icc, 1.0);
    }

    #[test]
    fn icc_interval_brackets_estimate(rows in prop::collection::vec(prop::collection::vec(1.0f64..5.0, 2..6), 3..15)) {
        if let Ok(r) = icc_one_way_average(&rows) {
            prop_assert!(r.ci_low <= r.icc && r.icc <= r.ci_high && r.ci_high <= 1.0);
        }
    }

    #[test]
    fn ranking_counts_are_conserved(sds in prop::collection::vec((0u8..4, 0u8..8), 1..60)) {
        let techniques = [Technique::Aut(Seconds::from_secs(8)), Technique::Aut(Seconds::from_secs(21)), Technique::Act, Technique::Est];
        let pool: Vec<UnitSpread> = sds
            .iter()
            .enumerate()
            .map(|(i, &(t, sd))| UnitSpread { unit_id: format!("u{i:03}"), technique: techniques[t as usize], sd: sd as f64 / 4.0 })
            .collect();
        let Ok(curves) = ranking_analysis(&pool) else {
            prop_assume!(false);
            unreachable!()
        };
        for (idx, &n) in PERCENTILE_GRID.iter().enumerate() {
            let total: usize = curves.iter().map(|c| c.points[idx].count).sum();
            prop_assert_eq!(total, (n as usize * pool.len()).div_ceil(100));
        }
        for c in &curves {
            prop_assert!(c.auc_ratio > 0.0 && c.auc_ratio <= 1.0);
        }
    }
}
