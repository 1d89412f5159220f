//! Seeded random timelines and a naive re-scan oracle for the EST rule.

use std::collections::BTreeSet;

use cohesion_core::model::{ChangeCategory, ChangeEvent, CodingUnit, InteractionTimeline, UtteranceEvent};
use cohesion_core::unitize::EstConfig;
use cohesion_core::Seconds;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Change stream on a coarse grid so simultaneous events are common. Every
/// fourth stream is goal-heavy.
pub fn random_changes(rng: &mut ChaCha8Rng, duration: Seconds) -> Vec<ChangeEvent> {
    let n = rng.random_range(0..40);
    let step = *[100i64, 500, 1000].choose(rng).unwrap();
    let slots = duration.millis() / step;
    let goal_heavy = rng.random_ratio(1, 4);
    let mut changes: Vec<ChangeEvent> = (0..n)
        .map(|_| {
            let t = Seconds::from_millis(rng.random_range(0..=slots) * step);
            let category = if goal_heavy && rng.random_bool(0.6) {
                ChangeCategory::Goals
            } else {
                *ChangeCategory::ALL.choose(rng).unwrap()
            };
            ChangeEvent::new(t, category)
        })
        .collect();
    changes.sort_by_key(|c| c.t);
    changes
}

pub fn random_utterances(rng: &mut ChaCha8Rng, duration: Seconds) -> Vec<UtteranceEvent> {
    let speakers = ["A", "B", "C"];
    let mut out = Vec::new();
    let mut t = rng.random_range(0..3000);
    let mut prev: Option<&str> = None;
    while t + 500 < duration.millis() {
        // Long same-speaker runs exercise the turn cap.
        let speaker = match prev {
            Some(p) if rng.random_bool(0.4) => p,
            _ => speakers.choose(rng).unwrap(),
        };
        let len = rng.random_range(500..45_000).min(duration.millis() - t);
        let (start, end) = (t, t + len);
        let mut u = UtteranceEvent::new(speaker, Seconds::from_millis(start), Seconds::from_millis(end));
        if len > 2 && rng.random_bool(0.4) {
            let k = rng.random_range(1..4);
            let tbs: BTreeSet<i64> = (0..k).map(|_| rng.random_range(start + 1..end)).collect();
            u.thought_boundaries = tbs.into_iter().map(Seconds::from_millis).collect();
        }
        u.argument_change = rng.random_bool(0.15);
        out.push(u);
        prev = Some(speaker);
        t = end + rng.random_range(0..2000);
    }
    out
}

pub fn random_timeline(seed: u64) -> InteractionTimeline {
    let mut r = rng(seed);
    let duration = Seconds::from_millis(r.random_range(5_000..120_000) / 100 * 100);
    let changes = random_changes(&mut r, duration);
    let utterances = random_utterances(&mut r, duration);
    InteractionTimeline::new(format!("rt{seed:04}"), duration, changes, utterances).expect("generated timeline is valid")
}

pub fn random_est_config(rng: &mut ChaCha8Rng) -> EstConfig {
    let other = rng.random_range(1..=2);
    EstConfig {
        threshold: rng.random_range(1..=5),
        goal_weight: rng.random_range(other..=3),
        other_weight: other,
        ..EstConfig::default()
    }
}

/// For every distinct timestamp, recomputes the distinct-category weight of
/// all changes after the last boundary up to and including that timestamp.
pub fn naive_est_boundaries(changes: &[ChangeEvent], duration: Seconds, cfg: &EstConfig) -> Vec<Seconds> {
    let stamps: BTreeSet<Seconds> = changes.iter().map(|c| c.t).collect();
    let mut last: Option<Seconds> = None;
    let mut out = Vec::new();
    for &t in &stamps {
        let cats: BTreeSet<ChangeCategory> = changes
            .iter()
            .filter(|c| last.is_none_or(|l| c.t > l) && c.t <= t)
            .map(|c| c.category)
            .collect();
        let weight: u32 = cats
            .iter()
            .map(|&c| if c == ChangeCategory::Goals { cfg.goal_weight } else { cfg.other_weight })
            .sum();
        if weight >= cfg.threshold {
            last = Some(t);
            if t > Seconds::ZERO && t < duration {
                out.push(t);
            }
        }
    }
    out
}

/// Checks that units are contiguous, start at 0 and end at `end`.
pub fn tiles(units: &[CodingUnit], end: Seconds) -> Result<(), String> {
    let mut cursor = Seconds::ZERO;
    for (i, u) in units.iter().enumerate() {
        if u.start != cursor {
            return Err(format!("unit {i} starts at {} expected {cursor}", u.start));
        }
        if u.end <= u.start {
            return Err(format!("unit {i} is empty"));
        }
        if u.index as usize != i {
            return Err(format!("unit {i} has index {}", u.index));
        }
        cursor = u.end;
    }
    if cursor != end {
        return Err(format!("units end at {cursor}, expected {end}"));
    }
    Ok(())
}
