use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::time::Seconds;

/// Situational dimension whose change can drive a perceived event boundary.
///
/// Serialized as the tags `C1`..`C7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChangeCategory {
    /// Timing and rhythm of the interaction.
    #[serde(rename = "C1")]
    Time,
    /// Motion direction.
    #[serde(rename = "C2")]
    Space,
    /// Interaction with objects.
    #[serde(rename = "C3")]
    Objects,
    /// Character location.
    #[serde(rename = "C4")]
    Characters,
    /// Interaction patterns.
    #[serde(rename = "C5")]
    CharacterInteraction,
    /// Causes and appraisal.
    #[serde(rename = "C6")]
    Causes,
    /// Goals fulfilled, dismissed, or replaced.
    #[serde(rename = "C7")]
    Goals,
}

impl ChangeCategory {
    pub const ALL: [ChangeCategory; 7] = [
        ChangeCategory::Time,
        ChangeCategory::Space,
        ChangeCategory::Objects,
        ChangeCategory::Characters,
        ChangeCategory::CharacterInteraction,
        ChangeCategory::Causes,
        ChangeCategory::Goals,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ChangeCategory::Time => "C1",
            ChangeCategory::Space => "C2",
            ChangeCategory::Objects => "C3",
            ChangeCategory::Characters => "C4",
            ChangeCategory::CharacterInteraction => "C5",
            ChangeCategory::Causes => "C6",
            ChangeCategory::Goals => "C7",
        }
    }

    /// Zero-based position, usable as a bit index.
    pub fn ordinal(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ChangeCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ChangeCategory {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ChangeCategory::ALL
            .into_iter()
            .find(|c| c.tag() == s)
            .ok_or_else(|| ModelError::invalid("category", format!("unknown change category {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChangeEvent {
    pub t: Seconds,
    pub category: ChangeCategory,
    #[serde(default)]
    pub note: String,
}

impl ChangeEvent {
    pub fn new(t: Seconds, category: ChangeCategory) -> Self {
        ChangeEvent {
            t,
            category,
            note: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtteranceEvent {
    pub speaker: String,
    pub start: Seconds,
    pub end: Seconds,
    #[serde(default)]
    pub thought_boundaries: Vec<Seconds>,
    #[serde(default)]
    pub argument_change: bool,
}

impl UtteranceEvent {
    pub fn new(speaker: impl Into<String>, start: Seconds, end: Seconds) -> Self {
        UtteranceEvent {
            speaker: speaker.into(),
            start,
            end,
            thought_boundaries: Vec::new(),
            argument_change: false,
        }
    }
}

/// One recorded group interaction with its human-annotated events.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionTimeline {
    pub id: String,
    pub duration: Seconds,
    pub players: u32,
    pub clip_uri: String,
    pub focus_image_uri: String,
    pub changes: Vec<ChangeEvent>,
    pub utterances: Vec<UtteranceEvent>,
}

/// On-disk shape. Identity and media fields may be omitted by hand-written
/// annotation files; `duration` and both event lists may not.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimelineFile {
    id: Option<String>,
    duration: Seconds,
    players: Option<u32>,
    #[serde(default)]
    clip_uri: String,
    #[serde(default)]
    focus_image_uri: String,
    changes: Vec<ChangeEvent>,
    utterances: Vec<UtteranceEvent>,
}

const MIN_PLAYERS: u32 = 2;

impl InteractionTimeline {
    /// Builds a timeline, sorting both event lists and checking every invariant.
    pub fn new(
        id: impl Into<String>,
        duration: Seconds,
        mut changes: Vec<ChangeEvent>,
        mut utterances: Vec<UtteranceEvent>,
    ) -> Result<Self, ModelError> {
        changes.sort_by_key(|c| c.t);
        utterances.sort_by_key(|u| u.start);
        let timeline = InteractionTimeline {
            id: id.into(),
            duration,
            players: MIN_PLAYERS,
            clip_uri: String::new(),
            focus_image_uri: String::new(),
            changes,
            utterances,
        };
        timeline.validate()?;
        Ok(timeline)
    }

    pub fn from_json_str(text: &str, default_id: &str) -> Result<Self, ModelError> {
        let raw: TimelineFile = serde_json::from_str(text).map_err(|source| ModelError::Json {
            context: default_id.to_string(),
            source,
        })?;
        let mut timeline = InteractionTimeline {
            id: raw.id.unwrap_or_else(|| default_id.to_string()),
            duration: raw.duration,
            players: raw.players.unwrap_or(MIN_PLAYERS),
            clip_uri: raw.clip_uri,
            focus_image_uri: raw.focus_image_uri,
            changes: raw.changes,
            utterances: raw.utterances,
        };
        timeline.changes.sort_by_key(|c| c.t);
        timeline.utterances.sort_by_key(|u| u.start);
        timeline.validate()?;
        Ok(timeline)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("timeline serializes")
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.id.trim().is_empty() {
            return Err(ModelError::invalid("id", "must not be empty"));
        }
        if !self.duration.is_positive() {
            return Err(ModelError::invalid("duration", "must be > 0"));
        }
        if self.players < MIN_PLAYERS {
            return Err(ModelError::invalid(
                "players",
                format!("must be at least {MIN_PLAYERS}, got {}", self.players),
            ));
        }
        let in_range = |t: Seconds| t >= Seconds::ZERO && t <= self.duration;
        for (i, change) in self.changes.iter().enumerate() {
            if !in_range(change.t) {
                return Err(ModelError::invalid(
                    format!("changes[{i}].t"),
                    format!(
                        "event out of range: {} not in [0, {}]",
                        change.t, self.duration
                    ),
                ));
            }
        }
        if self.changes.windows(2).any(|w| w[0].t > w[1].t) {
            return Err(ModelError::invalid("changes", "not sorted by t"));
        }
        for (i, u) in self.utterances.iter().enumerate() {
            if u.speaker.trim().is_empty() {
                return Err(ModelError::invalid(
                    format!("utterances[{i}].speaker"),
                    "must not be empty",
                ));
            }
            if !in_range(u.start) || !in_range(u.end) {
                return Err(ModelError::invalid(
                    format!("utterances[{i}]"),
                    format!(
                        "event out of range: [{}, {}] not within [0, {}]",
                        u.start, u.end, self.duration
                    ),
                ));
            }
            if u.start >= u.end {
                return Err(ModelError::invalid(
                    format!("utterances[{i}]"),
                    format!("start {} must be before end {}", u.start, u.end),
                ));
            }
            let mut prev = u.start;
            for (j, &b) in u.thought_boundaries.iter().enumerate() {
                if b <= prev || b >= u.end {
                    return Err(ModelError::invalid(
                        format!("utterances[{i}].thought_boundaries[{j}]"),
                        format!(
                            "{b} must be strictly increasing and inside ({}, {})",
                            u.start, u.end
                        ),
                    ));
                }
                prev = b;
            }
        }
        if self.utterances.windows(2).any(|w| w[0].start > w[1].start) {
            return Err(ModelError::invalid("utterances", "not sorted by start"));
        }
        Ok(())
    }
}

/// Reads and validates one timeline document. A missing `id` falls back to
/// the file stem.
pub fn load_timeline(path: impl AsRef<Path>) -> Result<InteractionTimeline, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "interaction".to_string());
    InteractionTimeline::from_json_str(&text, &stem).map_err(|e| e.with_path(path))
}

pub fn save_timeline(path: impl AsRef<Path>, timeline: &InteractionTimeline) -> Result<(), ModelError> {
    let path = path.as_ref();
    std::fs::write(path, timeline.to_json_string()).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })
}
