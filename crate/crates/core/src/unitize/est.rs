//! Event-segmentation unitizer: cut the scene once enough distinct kinds of
//! situational change have accumulated since the previous cut.

use serde::{Deserialize, Serialize};

use super::{units_from_boundaries, UnitizeError};
use crate::model::{ChangeCategory, ChangeEvent, CodingUnit, InteractionTimeline, Technique};
use crate::time::Seconds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstConfig {
    /// Accumulated distinct-category weight that places a boundary.
    pub threshold: u32,
    pub goal_weight: u32,
    pub other_weight: u32,
    /// Units shorter than this merge into their predecessor. Zero disables merging.
    pub min_unit_duration: Seconds,
}

impl Default for EstConfig {
    fn default() -> Self {
        EstConfig {
            threshold: 3,
            goal_weight: 2,
            other_weight: 1,
            min_unit_duration: Seconds::ZERO,
        }
    }
}

impl EstConfig {
    pub fn validate(&self) -> Result<(), UnitizeError> {
        if self.threshold < 1 {
            return Err(UnitizeError::InvalidConfig("threshold must be >= 1".into()));
        }
        if self.other_weight < 1 || self.goal_weight < self.other_weight {
            return Err(UnitizeError::InvalidConfig(
                "weights must satisfy goal_weight >= other_weight >= 1".into(),
            ));
        }
        if self.min_unit_duration < Seconds::ZERO {
            return Err(UnitizeError::InvalidConfig("min_unit_duration must be >= 0".into()));
        }
        Ok(())
    }

    pub fn weight(&self, category: ChangeCategory) -> u32 {
        match category {
            ChangeCategory::Goals => self.goal_weight,
            _ => self.other_weight,
        }
    }
}

/// Boundary instants, strictly inside `(0, duration)`, in increasing order.
///
/// All changes sharing a timestamp are absorbed before the threshold is
/// checked. A category already seen since the last boundary adds nothing.
/// When the threshold is met at `t = 0` or `t = duration` no boundary is
/// emitted but the accumulated set still resets.
pub fn est_boundaries(changes: &[ChangeEvent], duration: Seconds, cfg: &EstConfig) -> Vec<Seconds> {
    let mut boundaries = Vec::new();
    let mut seen = 0u8;
    let mut weight = 0u32;
    let mut i = 0;
    while i < changes.len() {
        let t = changes[i].t;
        while i < changes.len() && changes[i].t == t {
            let bit = 1u8 << changes[i].category.ordinal();
            if seen & bit == 0 {
                seen |= bit;
                weight += cfg.weight(changes[i].category);
            }
            i += 1;
        }
        if weight >= cfg.threshold {
            if t > Seconds::ZERO && t < duration {
                boundaries.push(t);
            }
            seen = 0;
            weight = 0;
        }
    }
    boundaries
}

fn merge_short_units(boundaries: Vec<Seconds>, duration: Seconds, min: Seconds) -> Vec<Seconds> {
    if min <= Seconds::ZERO || boundaries.is_empty() {
        return boundaries;
    }
    let mut kept: Vec<Seconds> = Vec::with_capacity(boundaries.len());
    let mut unit_start = Seconds::ZERO;
    for b in boundaries.iter().copied().chain(std::iter::once(duration)) {
        // A short unit absorbs into its predecessor by dropping its start cut.
        if b - unit_start < min && !kept.is_empty() && kept.last() == Some(&unit_start) {
            kept.pop();
        }
        if b < duration {
            kept.push(b);
        }
        unit_start = b;
    }
    // The first unit has no predecessor: fold it into its successor.
    if let Some(&first) = kept.first() {
        if first < min {
            kept.remove(0);
        }
    }
    kept
}

pub fn unitize_est(timeline: &InteractionTimeline, cfg: &EstConfig) -> Result<Vec<CodingUnit>, UnitizeError> {
    cfg.validate()?;
    timeline.validate()?;
    let boundaries = est_boundaries(&timeline.changes, timeline.duration, cfg);
    let boundaries = merge_short_units(boundaries, timeline.duration, cfg.min_unit_duration);
    Ok(units_from_boundaries(
        &timeline.id,
        Technique::Est,
        &boundaries,
        timeline.duration,
    ))
}
