//! The full inter-rater analysis: agreement, variance comparison, information
//! loss against expert scores, and SD ranking.

mod gate;
mod render;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{subscale_score, CodingUnit, Dimension, ExpertScore, ModelError, Questionnaire, Rating, Technique};
use crate::stats::{
    self, bonferroni, brown_forsythe, icc_one_way_average, mse_vs_expert, ranking_analysis, BrownForsytheVariant,
    IccResult, RankingCurve, RatingMatrix, StatsError, TestResult, UnitSpread,
};

pub use gate::{information_loss_gate, GateDecision, GateStep, InformationLossTest, LossTest};
pub use render::render_text;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("no valid ratings")]
    NoValidRatings,
    #[error("rating references unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("duplicate rating for rater {rater_id:?} on unit {unit_id:?}")]
    DuplicateRating { rater_id: String, unit_id: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl AnalysisError {
    /// Whether the failure lies in the inputs rather than the environment.
    pub fn is_validation(&self) -> bool {
        match self {
            AnalysisError::Model(e) => e.is_validation(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub alpha: f64,
    /// Decimal places in the text report.
    pub decimals: u32,
    pub variant: BrownForsytheVariant,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            alpha: 0.05,
            decimals: 3,
            variant: BrownForsytheVariant::Spread,
        }
    }
}

/// Either a computed value or the reason it could not be computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome<T> {
    Ok(T),
    Error(String),
}

impl<T> Outcome<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(v) => Some(v),
            Outcome::Error(_) => None,
        }
    }
}

impl<T, E: std::fmt::Display> From<Result<T, E>> for Outcome<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

/// Valid ratings aggregated to subscale scores, indexed by unit.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    units: BTreeMap<String, CodingUnit>,
    /// (dimension, unit_id) → (rater_id → subscale score).
    scores: BTreeMap<(Dimension, String), BTreeMap<String, f64>>,
}

impl ScoreTable {
    pub fn build(units: &[CodingUnit], ratings: &[Rating], questionnaire: &Questionnaire) -> Result<Self, AnalysisError> {
        let by_id: BTreeMap<String, CodingUnit> = units.iter().map(|u| (u.unit_id.clone(), u.clone())).collect();
        let mut scores: BTreeMap<(Dimension, String), BTreeMap<String, f64>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for r in ratings.iter().filter(|r| r.valid) {
            if !by_id.contains_key(&r.unit_id) {
                return Err(AnalysisError::UnknownUnit(r.unit_id.clone()));
            }
            if !seen.insert((&r.rater_id, &r.unit_id)) {
                return Err(AnalysisError::DuplicateRating {
                    rater_id: r.rater_id.clone(),
                    unit_id: r.unit_id.clone(),
                });
            }
            for dim in Dimension::ALL {
                let s = subscale_score(r, questionnaire, dim)?;
                scores
                    .entry((dim, r.unit_id.clone()))
                    .or_default()
                    .insert(r.rater_id.clone(), s);
            }
        }
        if scores.is_empty() {
            return Err(AnalysisError::NoValidRatings);
        }
        Ok(ScoreTable { units: by_id, scores })
    }

    pub fn techniques(&self) -> BTreeSet<Technique> {
        self.scores
            .keys()
            .map(|(_, id)| self.units[id].technique)
            .collect()
    }

    fn rated_units(&self, dimension: Dimension, technique: Technique) -> impl Iterator<Item = (&CodingUnit, &BTreeMap<String, f64>)> {
        self.scores
            .range((dimension, String::new())..)
            .take_while(move |((d, _), _)| *d == dimension)
            .map(|((_, id), s)| (&self.units[id], s))
            .filter(move |(u, _)| u.technique == technique)
    }

    /// Targets ordered by unit id, observations by rater id.
    pub fn matrix(&self, technique: Technique, dimension: Dimension) -> RatingMatrix {
        let (targets, values) = self
            .rated_units(dimension, technique)
            .map(|(u, s)| (u.unit_id.clone(), s.values().copied().collect()))
            .unzip();
        RatingMatrix {
            technique,
            dimension,
            targets,
            values,
        }
    }

    pub fn matrices(&self) -> Vec<RatingMatrix> {
        let techniques = self.techniques();
        techniques
            .iter()
            .flat_map(|&t| Dimension::ALL.map(|d| self.matrix(t, d)))
            .filter(|m| !m.targets.is_empty())
            .collect()
    }

    /// Mean subscale score of every rated unit of `technique`, by unit id.
    pub fn unit_means(&self, technique: Technique, dimension: Dimension) -> BTreeMap<String, f64> {
        self.rated_units(dimension, technique)
            .map(|(u, s)| (u.unit_id.clone(), s.values().sum::<f64>() / s.len() as f64))
            .collect()
    }

    /// Per-unit SD of the raters' subscale scores; units with one rating are skipped.
    pub fn unit_spreads(&self, technique: Technique, dimension: Dimension) -> Vec<UnitSpread> {
        self.rated_units(dimension, technique)
            .filter(|(_, s)| s.len() >= 2)
            .map(|(u, s)| UnitSpread {
                unit_id: u.unit_id.clone(),
                technique,
                sd: stats::sample_sd(&s.values().copied().collect::<Vec<_>>()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub alpha: f64,
    pub decimals: u32,
    pub brown_forsythe_variant: BrownForsytheVariant,
    pub icc_model: &'static str,
    pub ci_method: &'static str,
    pub ci_confidence: f64,
    pub ranking_ideal_rounding: &'static str,
    pub ranking_tie_break: &'static str,
    pub expert_scale: &'static str,
    pub ratings_used: usize,
    pub ratings_discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IccCell {
    pub technique: Technique,
    pub dimension: Dimension,
    pub targets: usize,
    pub observations: usize,
    pub result: Outcome<IccResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseVariance {
    pub a: Technique,
    pub b: Technique,
    pub test: Outcome<TestResult>,
    /// Bonferroni-adjusted p over the comparisons of this stage.
    pub p_adjusted: Option<f64>,
    pub significant: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceStage {
    pub techniques: Vec<Technique>,
    pub sd: BTreeMap<Technique, f64>,
    pub omnibus: Outcome<TestResult>,
    pub pairwise: Vec<PairwiseVariance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceComparison {
    pub dimension: Dimension,
    pub intra_interval: VarianceStage,
    /// Interval technique with the largest spread of unit scores.
    pub winner: Option<Technique>,
    pub final_stage: Option<VarianceStage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformationLoss {
    pub dimension: Dimension,
    /// Technique → interaction → MSE of unit mean scores against the expert score.
    pub mse: BTreeMap<Technique, BTreeMap<String, f64>>,
    pub mean_mse: BTreeMap<Technique, f64>,
    pub missing_expert: Vec<String>,
    pub comparison: Outcome<InformationLossTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub dimension: Dimension,
    pub units: usize,
    pub curves: Outcome<Vec<RankingCurve>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: ReportMeta,
    pub icc: Vec<IccCell>,
    pub unit_means: BTreeMap<Dimension, BTreeMap<String, f64>>,
    pub variance: Vec<VarianceComparison>,
    pub information_loss: Vec<InformationLoss>,
    pub ranking: Vec<RankingResult>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        render_text(self)
    }
}

fn variance_stage(
    samples: &BTreeMap<Technique, BTreeMap<String, f64>>,
    techniques: &[Technique],
    cfg: &AnalysisConfig,
) -> VarianceStage {
    let groups: Vec<Vec<f64>> = techniques
        .iter()
        .map(|t| samples.get(t).map(|m| m.values().copied().collect()).unwrap_or_default())
        .collect();
    let sd = techniques
        .iter()
        .zip(&groups)
        .filter(|(_, g)| g.len() >= 2)
        .map(|(&t, g)| (t, stats::sample_sd(g)))
        .collect();
    let omnibus = brown_forsythe(&groups, cfg.variant).into();
    let mut pairwise = Vec::new();
    for i in 0..techniques.len() {
        for j in i + 1..techniques.len() {
            let test: Outcome<TestResult> = brown_forsythe(&[groups[i].clone(), groups[j].clone()], cfg.variant).into();
            pairwise.push(PairwiseVariance {
                a: techniques[i],
                b: techniques[j],
                test,
                p_adjusted: None,
                significant: None,
            });
        }
    }
    let m = pairwise.len();
    for pw in &mut pairwise {
        if let Outcome::Ok(t) = &pw.test {
            let adj = bonferroni(&[t.p], m)[0];
            pw.p_adjusted = Some(adj);
            pw.significant = Some(adj < cfg.alpha);
        }
    }
    VarianceStage {
        techniques: techniques.to_vec(),
        sd,
        omnibus,
        pairwise,
    }
}

/// The interval technique whose unit scores spread the most (ties go to the
/// narrower window).
fn widest_spread(stage: &VarianceStage) -> Option<Technique> {
    stage
        .sd
        .iter()
        .filter(|(t, sd)| t.is_interval() && sd.is_finite())
        .fold(None, |best: Option<(Technique, f64)>, (&t, &sd)| match best {
            Some((_, b)) if b >= sd => best,
            _ => Some((t, sd)),
        })
        .map(|(t, _)| t)
}

/// Techniques entering the final comparisons: the interval winner, ACT and EST.
fn final_techniques(all: &BTreeSet<Technique>, winner: Option<Technique>) -> Vec<Technique> {
    let mut out: Vec<Technique> = winner.into_iter().collect();
    out.extend(all.iter().copied().filter(|t| !t.is_interval()));
    out
}

pub fn analyze(
    units: &[CodingUnit],
    ratings: &[Rating],
    questionnaire: &Questionnaire,
    expert: &[ExpertScore],
    cfg: &AnalysisConfig,
) -> Result<Report, AnalysisError> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(StatsError::InvalidParameter(format!("alpha {} not in (0, 1)", cfg.alpha)).into());
    }
    let table = ScoreTable::build(units, ratings, questionnaire)?;
    let techniques = table.techniques();
    let ratings_used = ratings.iter().filter(|r| r.valid).count();

    let icc = table
        .matrices()
        .into_iter()
        .map(|m| IccCell {
            technique: m.technique,
            dimension: m.dimension,
            targets: m.targets.len(),
            observations: m.observation_count(),
            result: m.validate().and_then(|_| icc_one_way_average(&m.values)).into(),
        })
        .collect();

    let mut unit_means = BTreeMap::new();
    let mut variance = Vec::new();
    let mut information_loss = Vec::new();
    let mut ranking = Vec::new();
    let expert_by_key: BTreeMap<(&str, Dimension), f64> = expert
        .iter()
        .map(|e| ((e.interaction_id.as_str(), e.dimension), e.score))
        .collect();

    for dim in Dimension::ALL {
        let means: BTreeMap<Technique, BTreeMap<String, f64>> =
            techniques.iter().map(|&t| (t, table.unit_means(t, dim))).collect();
        unit_means.insert(dim, means.values().flatten().map(|(k, v)| (k.clone(), *v)).collect());

        let intervals: Vec<Technique> = techniques.iter().copied().filter(Technique::is_interval).collect();
        let intra_interval = variance_stage(&means, &intervals, cfg);
        let winner = widest_spread(&intra_interval);
        let finalists = final_techniques(&techniques, winner);
        let final_stage = (finalists.len() >= 2).then(|| variance_stage(&means, &finalists, cfg));
        variance.push(VarianceComparison {
            dimension: dim,
            intra_interval,
            winner,
            final_stage,
        });

        // Information loss of the unit-level view against the whole-interaction expert score.
        let mut mse: BTreeMap<Technique, BTreeMap<String, f64>> = BTreeMap::new();
        let mut missing = BTreeSet::new();
        for &t in &finalists {
            let mut per_interaction: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for (id, m) in &means[&t] {
                per_interaction.entry(table.units[id].interaction_id.as_str()).or_default().push(*m);
            }
            let row = mse.entry(t).or_default();
            for (interaction, scores) in per_interaction {
                match expert_by_key.get(&(interaction, dim)) {
                    Some(&e) => {
                        row.insert(interaction.to_string(), mse_vs_expert(&scores, e)?);
                    }
                    None => {
                        missing.insert(interaction.to_string());
                    }
                }
            }
        }
        let mean_mse = mse
            .iter()
            .filter(|(_, m)| !m.is_empty())
            .map(|(&t, m)| (t, m.values().sum::<f64>() / m.len() as f64))
            .collect();
        let samples: Vec<(Technique, Vec<f64>)> = mse.iter().map(|(&t, m)| (t, m.values().copied().collect())).collect();
        information_loss.push(InformationLoss {
            dimension: dim,
            comparison: information_loss_gate(&samples, cfg.alpha).into(),
            mse,
            mean_mse,
            missing_expert: missing.into_iter().collect(),
        });

        let pool: Vec<UnitSpread> = finalists.iter().flat_map(|&t| table.unit_spreads(t, dim)).collect();
        ranking.push(RankingResult {
            dimension: dim,
            units: pool.len(),
            curves: ranking_analysis(&pool).into(),
        });
    }

    Ok(Report {
        meta: ReportMeta {
            alpha: cfg.alpha,
            decimals: cfg.decimals,
            brown_forsythe_variant: cfg.variant,
            icc_model: "one-way random, average measures (unequal group sizes via k0)",
            ci_method: "exact F",
            ci_confidence: stats::ICC_CONFIDENCE,
            ranking_ideal_rounding: "ceil",
            ranking_tie_break: "sd, then technique tag, then unit_id",
            expert_scale: "1-5 subscale mean",
            ratings_used,
            ratings_discarded: ratings.len() - ratings_used,
        },
        icc,
        unit_means,
        variance,
        information_loss,
        ranking,
    })
}
