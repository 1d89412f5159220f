use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ModelError, Rating};

/// Lowest and highest point of the Likert scale ("Not at all" .. "Yes, definitely").
pub const SCALE_MIN: u8 = 1;
pub const SCALE_MAX: u8 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Task,
    Social,
}

impl Dimension {
    pub const ALL: [Dimension; 2] = [Dimension::Task, Dimension::Social];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Task => "task",
            Dimension::Social => "social",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "task" => Ok(Dimension::Task),
            "social" => Ok(Dimension::Social),
            other => Err(ModelError::invalid(
                "dimension",
                format!("expected \"task\" or \"social\", got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionnaireItem {
    pub item_id: String,
    pub text: String,
    pub dimension: Dimension,
    pub inverted: bool,
    pub active: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Questionnaire {
    pub items: Vec<QuestionnaireItem>,
}

/// Reverse-codes a score on the 1..5 scale.
pub fn invert_score(score: u8) -> u8 {
    (SCALE_MIN + SCALE_MAX) - score
}

fn item(id: &str, text: &str, dimension: Dimension, inverted: bool, active: bool) -> QuestionnaireItem {
    QuestionnaireItem {
        item_id: id.to_string(),
        text: text.to_string(),
        dimension,
        inverted,
        active,
    }
}

impl Default for Questionnaire {
    /// The ten-item cohesion questionnaire. `T4` is reverse-coded; `T5` and
    /// `S5` are collected but excluded from analysis.
    fn default() -> Self {
        use Dimension::{Social, Task};
        Questionnaire {
            items: vec![
                item("T1", "Do you feel that group members share the same purpose, goal, intentions?", Task, false, true),
                item("T2", "Do group members give each other a lot of feedback?", Task, false, true),
                item("T3", "Do group members seem to have sufficient time to make their contribution?", Task, false, true),
                item("T4", "Do group members have conflicting aspirations for the team's performance?", Task, true, true),
                item("T5", "Do group members respect individual differences and contributions?", Task, false, false),
                item("S1", "Were group members open and frank in expressing ideas/feelings?", Social, false, true),
                item("S2", "How engaged in the discussion do group members seem?", Social, false, true),
                item("S3", "Do group members appear to be in tune/in sync with each other?", Social, false, true),
                item("S4", "Do group members listen attentively to each other?", Social, false, true),
                item("S5", "Does the group seem to share responsibility for the task?", Social, false, false),
            ],
        }
    }
}

impl Questionnaire {
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut seen = BTreeSet::new();
        for (i, it) in self.items.iter().enumerate() {
            if it.item_id.trim().is_empty() {
                return Err(ModelError::invalid(format!("items[{i}].item_id"), "must not be empty"));
            }
            if !seen.insert(it.item_id.as_str()) {
                return Err(ModelError::invalid(
                    format!("items[{i}].item_id"),
                    format!("duplicate item id {:?}", it.item_id),
                ));
            }
        }
        Ok(())
    }

    pub fn get(&self, item_id: &str) -> Option<&QuestionnaireItem> {
        self.items.iter().find(|i| i.item_id == item_id)
    }

    pub fn active_items(&self, dimension: Dimension) -> impl Iterator<Item = &QuestionnaireItem> {
        self.items
            .iter()
            .filter(move |i| i.active && i.dimension == dimension)
    }

    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let q: Questionnaire = serde_json::from_str(text).map_err(|source| ModelError::Json {
            context: "questionnaire".to_string(),
            source,
        })?;
        q.validate()?;
        Ok(q)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|e| e.with_path(path))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("questionnaire serializes")
    }
}

/// Mean of the active items of `dimension`, with reverse-coded items mapped
/// through [`invert_score`]. Inactive items are ignored even when scored.
pub fn subscale_score(
    rating: &Rating,
    questionnaire: &Questionnaire,
    dimension: Dimension,
) -> Result<f64, ModelError> {
    let mut sum = 0u32;
    let mut count = 0u32;
    for it in questionnaire.active_items(dimension) {
        let raw = *rating
            .scores
            .get(&it.item_id)
            .ok_or_else(|| ModelError::MissingScore {
                rater_id: rating.rater_id.clone(),
                unit_id: rating.unit_id.clone(),
                item_id: it.item_id.clone(),
            })?;
        check_score(&it.item_id, raw)?;
        sum += u32::from(if it.inverted { invert_score(raw) } else { raw });
        count += 1;
    }
    if count == 0 {
        return Err(ModelError::invalid(
            "questionnaire",
            format!("no active items for dimension {dimension}"),
        ));
    }
    Ok(f64::from(sum) / f64::from(count))
}

pub fn check_score(item_id: &str, score: u8) -> Result<(), ModelError> {
    if (SCALE_MIN..=SCALE_MAX).contains(&score) {
        Ok(())
    } else {
        Err(ModelError::invalid(
            format!("scores.{item_id}"),
            format!("score {score} outside {SCALE_MIN}..={SCALE_MAX}"),
        ))
    }
}
