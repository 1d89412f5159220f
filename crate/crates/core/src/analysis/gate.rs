//! Test selection for comparing MSE samples: normality, then homoscedasticity.

use serde::Serialize;

use crate::model::Technique;
use crate::stats::{
    bartlett, games_howell, kruskal_wallis, one_way_anova, shapiro_wilk, welch_anova, PairwiseComparison,
    ShapiroWilk, StatsError, TestResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossTest {
    KruskalWallis,
    WelchAnova,
    OneWayAnova,
}

/// One logged step of the gate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum GateStep {
    ShapiroWilk {
        technique: Technique,
        result: Option<ShapiroWilk>,
        error: Option<String>,
        normal: bool,
    },
    Bartlett {
        result: TestResult,
        homoscedastic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateDecision {
    pub steps: Vec<GateStep>,
    pub chosen: LossTest,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformationLossTest {
    pub techniques: Vec<Technique>,
    pub gate: GateDecision,
    pub test: TestResult,
    /// Games–Howell pairs, computed after a Welch ANOVA.
    pub posthoc: Vec<PairwiseComparison>,
}

/// Shapiro–Wilk on every sample; any departure from normality selects
/// Kruskal–Wallis. Otherwise Bartlett decides between Welch's ANOVA (with
/// Games–Howell post hocs) and the classic ANOVA.
pub fn information_loss_gate(samples: &[(Technique, Vec<f64>)], alpha: f64) -> Result<InformationLossTest, StatsError> {
    let techniques: Vec<Technique> = samples.iter().map(|(t, _)| *t).collect();
    let groups: Vec<Vec<f64>> = samples.iter().map(|(_, s)| s.clone()).collect();
    let mut steps = Vec::new();
    let mut non_normal = Vec::new();
    for (t, s) in samples {
        let step = match shapiro_wilk(s) {
            Ok(r) => {
                let normal = r.p >= alpha;
                if !normal {
                    non_normal.push(format!("{t} (W={:.3}, p={:.3})", r.w, r.p));
                }
                GateStep::ShapiroWilk {
                    technique: *t,
                    result: Some(r),
                    error: None,
                    normal,
                }
            }
            Err(e) => {
                non_normal.push(format!("{t} (normality untestable: {e})"));
                GateStep::ShapiroWilk {
                    technique: *t,
                    result: None,
                    error: Some(e.to_string()),
                    normal: false,
                }
            }
        };
        steps.push(step);
    }
    if !non_normal.is_empty() {
        let test = kruskal_wallis(&groups)?;
        return Ok(InformationLossTest {
            techniques,
            gate: GateDecision {
                steps,
                chosen: LossTest::KruskalWallis,
                reason: format!("non-normal: {}", non_normal.join(", ")),
            },
            test,
            posthoc: Vec::new(),
        });
    }
    let b = bartlett(&groups)?;
    let homoscedastic = b.p >= alpha;
    steps.push(GateStep::Bartlett {
        result: b,
        homoscedastic,
    });
    let (chosen, test, posthoc, reason) = if homoscedastic {
        (
            LossTest::OneWayAnova,
            one_way_anova(&groups)?,
            Vec::new(),
            format!("all samples normal; equal variances (Bartlett p={:.3})", b.p),
        )
    } else {
        (
            LossTest::WelchAnova,
            welch_anova(&groups)?,
            games_howell(&groups)?,
            format!("all samples normal; unequal variances (Bartlett p={:.3})", b.p),
        )
    };
    Ok(InformationLossTest {
        techniques,
        gate: GateDecision { steps, chosen, reason },
        test,
        posthoc,
    })
}
