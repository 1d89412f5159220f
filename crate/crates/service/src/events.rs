use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demographics {
    pub age_band: String,
    /// Free text; absent or "prefer not to say" are both accepted.
    #[serde(default)]
    pub gender: Option<String>,
}

/// Which ratings a failed honey pot invalidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardScope {
    /// The ten served positions ending at the failed check.
    #[default]
    Block,
    /// Every rating of the rater.
    Rater,
    /// Only the unit that carried the check.
    Unit,
}

impl std::str::FromStr for DiscardScope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "block" => Ok(DiscardScope::Block),
            "rater" | "all-of-rater" => Ok(DiscardScope::Rater),
            "unit" | "single-unit" => Ok(DiscardScope::Unit),
            other => Err(format!("unknown discard scope {other:?} (expected block, rater or unit)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServedHoneyPot {
    pub item_id: String,
    /// Index of the honey pot within the served item list.
    pub slot: usize,
}

/// One line of the study event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    SessionOpened {
        session_id: String,
        rater_id: String,
        seed: u64,
        balanced: bool,
        demographics: Demographics,
    },
    UnitServed {
        session_id: String,
        /// 1-based served position within the session.
        position: usize,
        unit_id: String,
        honey_pot: Option<ServedHoneyPot>,
    },
    RatingSubmitted {
        session_id: String,
        submission_token: String,
        unit_id: String,
        scores: BTreeMap<String, u8>,
        honey_pot_answer: Option<u8>,
        submitted_at: DateTime<Utc>,
    },
    ValidityApplied {
        scope: DiscardScope,
        /// (rater_id, unit_id) pairs marked invalid.
        invalid: Vec<(String, String)>,
    },
}
