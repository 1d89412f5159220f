use std::collections::BTreeMap;
use std::fmt::Write;

use super::{GateStep, Outcome, Report, VarianceStage};
use crate::model::{Dimension, Technique};
use crate::stats::TestResult;

struct Fmt(u32);

impl Fmt {
    fn num(&self, v: f64) -> String {
        if v.is_infinite() {
            if v > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            let s = format!("{:.*}", self.0 as usize, v);
            // Avoid "-0.000".
            if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                s.trim_start_matches('-').to_string()
            } else {
                s
            }
        }
    }

    /// Whole degrees of freedom print without decimals; Welch-type ones keep them.
    fn df(&self, v: f64) -> String {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            format!("{v:.0}")
        } else {
            self.num(v)
        }
    }

    fn test(&self, name: &str, t: &TestResult) -> String {
        let df = match t.df2 {
            Some(d2) => format!("{}({}, {})", name, self.df(t.df1), self.df(d2)),
            None => format!("{}(df={})", name, self.df(t.df1)),
        };
        format!("{df} = {}, p = {}", self.num(t.statistic), self.num(t.p))
    }
}

fn outcome_test(f: &Fmt, name: &str, o: &Outcome<TestResult>) -> String {
    match o {
        Outcome::Ok(t) => f.test(name, t),
        Outcome::Error(e) => format!("{name}: not computed ({e})"),
    }
}

fn stage(out: &mut String, f: &Fmt, title: &str, s: &VarianceStage) {
    let names: Vec<String> = s.techniques.iter().map(Technique::to_string).collect();
    let _ = writeln!(out, "  {title}: {}", names.join(", "));
    for (t, sd) in &s.sd {
        let _ = writeln!(out, "    SD {t:<6} {}", f.num(*sd));
    }
    let _ = writeln!(out, "    Brown-Forsythe {}", outcome_test(f, "F", &s.omnibus));
    for pw in &s.pairwise {
        let line = match (&pw.test, pw.p_adjusted) {
            (Outcome::Ok(t), Some(adj)) => format!(
                "{}, p_bonf = {}{}",
                f.test("F", t),
                f.num(adj),
                if pw.significant == Some(true) { " *" } else { "" }
            ),
            (o, _) => outcome_test(f, "F", o),
        };
        let _ = writeln!(out, "    {} vs {}: {line}", pw.a, pw.b);
    }
}

pub fn render_text(report: &Report) -> String {
    let f = Fmt(report.meta.decimals);
    let mut out = String::new();
    let m = &report.meta;
    let _ = writeln!(out, "Cohesion unitizing analysis");
    let _ = writeln!(
        out,
        "alpha = {}; ICC CI: {} ({}%); ranking ideal: {}; Brown-Forsythe variant: {}",
        m.alpha,
        m.ci_method,
        m.ci_confidence * 100.0,
        m.ranking_ideal_rounding,
        m.brown_forsythe_variant
    );
    let _ = writeln!(out, "ratings used: {}; discarded: {}", m.ratings_used, m.ratings_discarded);

    let _ = writeln!(out, "\nICC (one-way, average measures) with {}% CI", m.ci_confidence * 100.0);
    let mut grid: BTreeMap<Technique, BTreeMap<Dimension, String>> = BTreeMap::new();
    for cell in &report.icc {
        let text = match &cell.result {
            Outcome::Ok(r) => format!("{} [{}, {}]", f.num(r.icc), f.num(r.ci_low), f.num(r.ci_high)),
            Outcome::Error(e) => format!("n/a ({e})"),
        };
        grid.entry(cell.technique).or_default().insert(cell.dimension, text);
    }
    let _ = writeln!(out, "  {:<8} {:<28} {:<28}", "", "Task", "Social");
    for (t, row) in &grid {
        let get = |d| row.get(&d).map(String::as_str).unwrap_or("-");
        let _ = writeln!(out, "  {:<8} {:<28} {:<28}", t.to_string(), get(Dimension::Task), get(Dimension::Social));
    }

    for v in &report.variance {
        let _ = writeln!(out, "\nVariance of unit scores ({})", v.dimension);
        stage(&mut out, &f, "interval windows", &v.intra_interval);
        match (&v.winner, &v.final_stage) {
            (Some(w), Some(s)) => {
                let _ = writeln!(out, "  largest interval spread: {w}");
                stage(&mut out, &f, "final comparison", s);
            }
            (_, Some(s)) => stage(&mut out, &f, "final comparison", s),
            _ => {
                let _ = writeln!(out, "  final comparison: not enough techniques");
            }
        }
    }

    for il in &report.information_loss {
        let _ = writeln!(out, "\nInformation loss: MSE against expert scores ({})", il.dimension);
        for (t, mse) in &il.mean_mse {
            let _ = writeln!(out, "  mean MSE {t:<6} {} (n = {})", f.num(*mse), il.mse[t].len());
        }
        if !il.missing_expert.is_empty() {
            let _ = writeln!(out, "  no expert score for: {}", il.missing_expert.join(", "));
        }
        match &il.comparison {
            Outcome::Ok(c) => {
                for step in &c.gate.steps {
                    let line = match step {
                        GateStep::ShapiroWilk {
                            technique,
                            result: Some(r),
                            normal,
                            ..
                        } => format!(
                            "Shapiro-Wilk {technique}: W = {}, p = {}{}",
                            f.num(r.w),
                            f.num(r.p),
                            if *normal { "" } else { " (non-normal)" }
                        ),
                        GateStep::ShapiroWilk { technique, error, .. } => {
                            format!("Shapiro-Wilk {technique}: {}", error.as_deref().unwrap_or("not computed"))
                        }
                        GateStep::Bartlett { result, .. } => f.test("Bartlett chi2", result),
                    };
                    let _ = writeln!(out, "  gate: {line}");
                }
                let name = match c.gate.chosen {
                    super::LossTest::KruskalWallis => "Kruskal-Wallis chi2",
                    super::LossTest::WelchAnova => "Welch F",
                    super::LossTest::OneWayAnova => "ANOVA F",
                };
                let _ = writeln!(out, "  chosen: {} ({})", name, c.gate.reason);
                let _ = writeln!(out, "  {}", f.test(name, &c.test));
                for p in &c.posthoc {
                    let _ = writeln!(
                        out,
                        "  Games-Howell {} vs {}: diff = {}, p = {}",
                        c.techniques[p.i],
                        c.techniques[p.j],
                        f.num(p.mean_diff),
                        f.num(p.p)
                    );
                }
            }
            Outcome::Error(e) => {
                let _ = writeln!(out, "  comparison not computed: {e}");
            }
        }
    }

    for r in &report.ranking {
        let _ = writeln!(out, "\nRanking by rater SD ({}, {} units)", r.dimension, r.units);
        match &r.curves {
            Outcome::Ok(curves) => {
                for c in curves {
                    let counts: Vec<String> = c.points.iter().map(|p| p.count.to_string()).collect();
                    let _ = writeln!(
                        out,
                        "  {:<6} auc_ratio = {} (units {}); counts {}",
                        c.technique.to_string(),
                        f.num(c.auc_ratio),
                        c.units,
                        counts.join(" ")
                    );
                }
            }
            Outcome::Error(e) => {
                let _ = writeln!(out, "  not computed: {e}");
            }
        }
    }
    out
}
