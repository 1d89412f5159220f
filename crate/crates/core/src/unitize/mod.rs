//! Unitizing techniques: map an [`InteractionTimeline`] to ordered coding units.
//!
//! Every technique is a pure function of its timeline and configuration.

mod act;
mod est;
mod interval;
mod summary;

pub use act::{act_boundaries, speaker_spans, unitize_act, ActConfig, SpeakerSpan};
pub use est::{est_boundaries, unitize_est, EstConfig};
pub use interval::{unitize_interval, IntervalConfig, TailPolicy};
pub use summary::{group_by_technique, unit_summary, TechniqueSummary};

use crate::model::{CodingUnit, InteractionTimeline, ModelError, Technique};
use crate::time::Seconds;

#[derive(Debug, thiserror::Error)]
pub enum UnitizeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{interaction_id}: no units produced (window {window}s >= duration {duration}s with tail policy drop)")]
    NoUnits {
        interaction_id: String,
        window: Seconds,
        duration: Seconds,
    },
    #[error("summary requested for empty unit group {0}")]
    EmptyGroup(String),
    #[error(transparent)]
    Timeline(#[from] ModelError),
}

/// A fully specified unitizing technique.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unitizer {
    Est(EstConfig),
    Act(ActConfig),
    Interval(IntervalConfig),
}

impl Unitizer {
    pub fn technique(&self) -> Technique {
        match self {
            Unitizer::Est(_) => Technique::Est,
            Unitizer::Act(_) => Technique::Act,
            Unitizer::Interval(c) => Technique::Aut(c.window),
        }
    }

    pub fn apply(&self, timeline: &InteractionTimeline) -> Result<Vec<CodingUnit>, UnitizeError> {
        match self {
            Unitizer::Est(c) => unitize_est(timeline, c),
            Unitizer::Act(c) => unitize_act(timeline, c),
            Unitizer::Interval(c) => unitize_interval(timeline, c),
        }
    }

    /// The five techniques compared in a cohesion study: AUT8, AUT15, AUT21, ACT and EST.
    pub fn study_set() -> Vec<Unitizer> {
        let mut set: Vec<Unitizer> = [8, 15, 21]
            .into_iter()
            .map(|w| Unitizer::Interval(IntervalConfig::new(Seconds::from_secs(w), TailPolicy::Drop)))
            .collect();
        set.push(Unitizer::Act(ActConfig::default()));
        set.push(Unitizer::Est(EstConfig::default()));
        set
    }
}

/// Tiles `[0, duration)` at the given interior cut points.
pub(crate) fn units_from_boundaries(
    interaction_id: &str,
    technique: Technique,
    cuts: &[Seconds],
    duration: Seconds,
) -> Vec<CodingUnit> {
    debug_assert!(cuts.windows(2).all(|w| w[0] < w[1]));
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(Seconds::ZERO);
    edges.extend(cuts.iter().copied().filter(|&c| c > Seconds::ZERO && c < duration));
    edges.push(duration);
    edges
        .windows(2)
        .enumerate()
        .map(|(i, w)| CodingUnit::new(interaction_id, technique, i as u32, w[0], w[1]))
        .collect()
}
