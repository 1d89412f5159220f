//! Continuous-coding unitizer following the ACT4Teams thought-unit rules.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{units_from_boundaries, UnitizeError};
use crate::model::{CodingUnit, InteractionTimeline, Technique, UtteranceEvent};
use crate::time::Seconds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActConfig {
    pub max_turn_duration: Seconds,
}

impl Default for ActConfig {
    fn default() -> Self {
        ActConfig {
            max_turn_duration: Seconds::from_secs(20),
        }
    }
}

/// A maximal run of consecutive utterances by one speaker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerSpan {
    pub speaker: String,
    pub start: Seconds,
    pub end: Seconds,
}

pub fn speaker_spans(utterances: &[UtteranceEvent]) -> Vec<SpeakerSpan> {
    let mut spans: Vec<SpeakerSpan> = Vec::new();
    for u in utterances {
        match spans.last_mut() {
            Some(last) if last.speaker == u.speaker => last.end = last.end.max(u.end),
            _ => spans.push(SpeakerSpan {
                speaker: u.speaker.clone(),
                start: u.start,
                end: u.end,
            }),
        }
    }
    spans
}

/// Boundaries at speaker changes, annotated thought boundaries, argument
/// changes, and every `max_turn_duration` inside an overlong same-speaker span.
pub fn act_boundaries(timeline: &InteractionTimeline, cfg: &ActConfig) -> BTreeSet<Seconds> {
    let mut cuts = BTreeSet::new();
    let utts = &timeline.utterances;
    for (i, u) in utts.iter().enumerate() {
        if i > 0 && utts[i - 1].speaker != u.speaker {
            cuts.insert(u.start);
        }
        if u.argument_change {
            cuts.insert(u.start);
        }
        cuts.extend(u.thought_boundaries.iter().copied());
    }
    let cap = cfg.max_turn_duration;
    for span in speaker_spans(utts) {
        if span.end - span.start > cap {
            let mut t = span.start + cap;
            while t < span.end {
                cuts.insert(t);
                t = t + cap;
            }
        }
    }
    cuts.retain(|&t| t > Seconds::ZERO && t < timeline.duration);
    cuts
}

pub fn unitize_act(timeline: &InteractionTimeline, cfg: &ActConfig) -> Result<Vec<CodingUnit>, UnitizeError> {
    if !cfg.max_turn_duration.is_positive() {
        return Err(UnitizeError::InvalidConfig("max_turn_duration must be > 0".into()));
    }
    timeline.validate()?;
    let cuts: Vec<Seconds> = act_boundaries(timeline, cfg).into_iter().collect();
    Ok(units_from_boundaries(&timeline.id, Technique::Act, &cuts, timeline.duration))
}
