//! Comparison of the stats module against reference values from
//! `fixtures/oracle/stats_oracle.json` (scipy/statsmodels, 100 cases per test).

use std::path::PathBuf;

use cohesion_core::stats::{
    bartlett, brown_forsythe, games_howell, icc_one_way_average, kruskal_wallis, shapiro_wilk, welch_anova,
    BrownForsytheVariant, TestResult,
};
use serde_json::Value;

pub struct OracleCheck {
    pub name: &'static str,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
}

impl OracleCheck {
    pub fn passed(&self) -> bool {
        self.cases == 100 && self.max_error <= self.tolerance
    }
}

pub fn fixture() -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/oracle/stats_oracle.json");
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).expect("oracle fixture is valid JSON")
}

fn f64s(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn groups(case: &Value) -> Vec<Vec<f64>> {
    case["groups"].as_array().unwrap().iter().map(f64s).collect()
}

fn num(case: &Value, key: &str) -> f64 {
    case[key].as_f64().unwrap_or_else(|| panic!("missing {key}"))
}

/// Relative error for large magnitudes, absolute otherwise.
fn err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

fn test_error(r: &TestResult, case: &Value) -> f64 {
    let mut e = err(r.statistic, num(case, "statistic")).max((r.p - num(case, "p")).abs());
    if let Some(df1) = case.get("df1").and_then(Value::as_f64) {
        e = e.max(err(r.df1, df1));
    }
    if let (Some(want), Some(got)) = (case.get("df2").and_then(Value::as_f64), r.df2) {
        e = e.max(err(got, want));
    }
    e
}

fn run(
    name: &'static str,
    tolerance: f64,
    cases: &Value,
    mut f: impl FnMut(&Value) -> f64,
) -> OracleCheck {
    let cases = cases.as_array().unwrap();
    let max_error = cases.iter().map(&mut f).fold(0.0, f64::max);
    OracleCheck {
        name,
        cases: cases.len(),
        max_error,
        tolerance,
    }
}

pub fn check_all(fx: &Value) -> Vec<OracleCheck> {
    vec![
        run("icc_one_way_average", 1e-6, &fx["icc"], |c| {
            let rows: Vec<Vec<f64>> = c["rows"].as_array().unwrap().iter().map(f64s).collect();
            let r = icc_one_way_average(&rows).unwrap();
            err(r.icc, num(c, "icc"))
                .max(err(r.ci_low, num(c, "ci_low")))
                .max(err(r.ci_high, num(c, "ci_high")))
                .max(err(r.k0, num(c, "k0")))
        }),
        run("brown_forsythe (spread)", 1e-6, &fx["bf_spread"], |c| {
            test_error(&brown_forsythe(&groups(c), BrownForsytheVariant::Spread).unwrap(), c)
        }),
        run("brown_forsythe (means)", 1e-6, &fx["bf_means"], |c| {
            test_error(&brown_forsythe(&groups(c), BrownForsytheVariant::Means).unwrap(), c)
        }),
        run("welch_anova", 1e-6, &fx["welch"], |c| test_error(&welch_anova(&groups(c)).unwrap(), c)),
        run("games_howell", 1e-4, &fx["games_howell"], |c| {
            let got = games_howell(&groups(c)).unwrap();
            let want = c["pairs"].as_array().unwrap();
            assert_eq!(got.len(), want.len());
            got.iter()
                .zip(want)
                .map(|(g, w)| {
                    assert_eq!((g.i as u64, g.j as u64), (w["i"].as_u64().unwrap(), w["j"].as_u64().unwrap()));
                    (g.p - num(w, "p"))
                        .abs()
                        .max(err(g.mean_diff, num(w, "mean_diff")) * 1e2)
                        .max(err(g.df, num(w, "df")) * 1e2)
                })
                .fold(0.0, f64::max)
        }),
        run("kruskal_wallis", 1e-6, &fx["kruskal"], |c| {
            test_error(&kruskal_wallis(&groups(c)).unwrap(), c)
        }),
        run("shapiro_wilk", 1e-6, &fx["shapiro"], |c| {
            let r = shapiro_wilk(&f64s(&c["sample"])).unwrap();
            err(r.w, num(c, "w")).max((r.p - num(c, "p")).abs())
        }),
        run("bartlett", 1e-6, &fx["bartlett"], |c| test_error(&bartlett(&groups(c)).unwrap(), c)),
    ]
}
