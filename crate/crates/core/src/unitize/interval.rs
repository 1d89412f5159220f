//! Fixed-window (thin slice) unitizer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::UnitizeError;
use crate::model::{CodingUnit, InteractionTimeline, Technique};
use crate::time::Seconds;

/// What to do with the final partial window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailPolicy {
    #[default]
    Drop,
    Keep,
    #[serde(rename = "merge")]
    MergeIntoLast,
}

impl fmt::Display for TailPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TailPolicy::Drop => "drop",
            TailPolicy::Keep => "keep",
            TailPolicy::MergeIntoLast => "merge",
        })
    }
}

impl FromStr for TailPolicy {
    type Err = UnitizeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drop" => Ok(TailPolicy::Drop),
            "keep" => Ok(TailPolicy::Keep),
            "merge" => Ok(TailPolicy::MergeIntoLast),
            other => Err(UnitizeError::InvalidConfig(format!(
                "unknown tail policy {other:?} (expected drop, keep or merge)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalConfig {
    pub window: Seconds,
    #[serde(default)]
    pub tail_policy: TailPolicy,
}

impl IntervalConfig {
    pub fn new(window: Seconds, tail_policy: TailPolicy) -> Self {
        IntervalConfig { window, tail_policy }
    }
}

pub fn unitize_interval(
    timeline: &InteractionTimeline,
    cfg: &IntervalConfig,
) -> Result<Vec<CodingUnit>, UnitizeError> {
    if !cfg.window.is_positive() {
        return Err(UnitizeError::InvalidConfig("window must be > 0".into()));
    }
    timeline.validate()?;
    let w = cfg.window.millis();
    let d = timeline.duration.millis();
    let full = d / w;
    let residue = d % w;
    let technique = Technique::Aut(cfg.window);
    let unit = |k: i64, end: i64| {
        CodingUnit::new(
            &timeline.id,
            technique,
            k as u32,
            Seconds::from_millis(k * w),
            Seconds::from_millis(end),
        )
    };

    let mut units: Vec<CodingUnit> = (0..full).map(|k| unit(k, (k + 1) * w)).collect();
    if residue > 0 {
        match cfg.tail_policy {
            TailPolicy::Drop => {}
            TailPolicy::Keep => units.push(unit(full, d)),
            TailPolicy::MergeIntoLast => match units.last_mut() {
                Some(last) => last.end = timeline.duration,
                None => units.push(unit(0, d)),
            },
        }
    }
    if units.is_empty() {
        return Err(UnitizeError::NoUnits {
            interaction_id: timeline.id.clone(),
            window: cfg.window,
            duration: timeline.duration,
        });
    }
    Ok(units)
}
