mod common;

use std::collections::BTreeMap;

use cohesion_core::analysis::{analyze, information_loss_gate, AnalysisConfig, LossTest, ScoreTable};
use cohesion_core::model::{Questionnaire, Technique};
use cohesion_core::simulate::{simulate_ratings, SimulationConfig};
use cohesion_core::stats::icc_one_way_average;
use common::suites::{fixtures_dir, synthetic_units};

fn mse_fixture() -> Vec<(Technique, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(fixtures_dir().join("mse_samples.csv")).unwrap();
    let mut by: BTreeMap<Technique, Vec<f64>> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        by.entry(rec[0].parse().unwrap()).or_default().push(rec[2].parse().unwrap());
    }
    by.into_iter().collect()
}

#[test]
fn skewed_aut21_sample_routes_to_kruskal_wallis() {
    let out = information_loss_gate(&mse_fixture(), 0.05).unwrap();
    assert_eq!(out.gate.chosen, LossTest::KruskalWallis);
    assert!(out.gate.reason.contains("AUT21"), "{}", out.gate.reason);
    assert!(!out.gate.reason.contains("ACT") && !out.gate.reason.contains("EST"));
    assert_eq!(out.test.df1, 2.0);
    assert!(out.posthoc.is_empty());
}

#[test]
fn normal_samples_go_through_bartlett() {
    let z = [-1.5, -1.0, -0.6, -0.3, -0.1, 0.0, 0.1, 0.3, 0.6, 1.0, 1.5, 0.05];
    let make = |m: f64, s: f64| z.iter().map(|v| m + s * v).collect::<Vec<_>>();
    let equal = vec![(Technique::Act, make(1.0, 0.2)), (Technique::Est, make(1.1, 0.2))];
    assert_eq!(information_loss_gate(&equal, 0.05).unwrap().gate.chosen, LossTest::OneWayAnova);
    let unequal = vec![
        (Technique::Act, make(1.0, 0.05)),
        (Technique::Est, make(1.1, 0.5)),
        (Technique::Aut(cohesion_core::Seconds::from_secs(21)), make(0.9, 0.1)),
    ];
    let out = information_loss_gate(&unequal, 0.05).unwrap();
    assert_eq!(out.gate.chosen, LossTest::WelchAnova);
    assert_eq!(out.posthoc.len(), 3);
}

#[test]
fn simulated_study_end_to_end() {
    let units = synthetic_units();
    let q = Questionnaire::default();
    let sim = simulate_ratings(&units, &q, &SimulationConfig::default(), 42).unwrap();
    let cfg = AnalysisConfig::default();
    let a = analyze(&units, &sim.ratings, &q, &sim.expert, &cfg).unwrap();
    let b = analyze(&units, &sim.ratings, &q, &sim.expert, &cfg).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_text(), b.to_text());
    assert_eq!(a.icc.len(), 10);
    for cell in &a.icc {
        let r = cell.result.ok().unwrap();
        assert!(r.icc > 0.9, "{} {}: {}", cell.technique, cell.dimension, r.icc);
    }
    // Library ICC equals the oracle ICC on the exported matrices.
    let table = ScoreTable::build(&units, &sim.ratings, &q).unwrap();
    for m in table.matrices() {
        assert_eq!(m.values.iter().map(Vec::len).min(), Some(20));
        icc_one_way_average(&m.values).unwrap();
    }
    let text = a.to_text();
    assert!(text.contains("AUT21") && text.contains("Task") && text.contains("Social"));
    for v in &a.variance {
        assert!(v.winner.is_some_and(|w| w.is_interval()));
        assert_eq!(v.final_stage.as_ref().unwrap().pairwise.len(), 3);
    }
}

#[test]
fn noiseless_raters_lose_no_information() {
    let units = synthetic_units();
    let q = Questionnaire::default();
    let cfg = SimulationConfig {
        noise_sd: 0.0,
        unit_sd: 0.0,
        ..Default::default()
    };
    let sim = simulate_ratings(&units, &q, &cfg, 9).unwrap();
    let report = analyze(&units, &sim.ratings, &q, &sim.expert, &AnalysisConfig::default()).unwrap();
    for il in &report.information_loss {
        assert!(il.missing_expert.is_empty());
        for (t, m) in &il.mse {
            assert!(m.values().all(|&v| v == 0.0), "{t}");
        }
    }
    for cell in &report.icc {
        if let Some(r) = cell.result.ok() {
            assert_eq!(r.icc, 1.0);
        }
    }
}

#[test]
fn invalid_ratings_are_excluded() {
    let units = synthetic_units();
    let q = Questionnaire::default();
    let mut sim = simulate_ratings(&units, &q, &SimulationConfig::default(), 5).unwrap();
    for r in sim.ratings.iter_mut().take(30) {
        r.valid = false;
    }
    let report = analyze(&units, &sim.ratings, &q, &sim.expert, &AnalysisConfig::default()).unwrap();
    assert_eq!(report.meta.ratings_discarded, 30);
    for r in sim.ratings.iter_mut() {
        r.valid = false;
    }
    assert!(analyze(&units, &sim.ratings, &q, &sim.expert, &AnalysisConfig::default()).is_err());
}
