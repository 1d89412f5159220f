//! Sessions, serving order, honey pots and validity filtering over an event log.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Utc};
use cohesion_core::analysis::ScoreTable;
use cohesion_core::bundle::{HoneyPot, StudyBundle};
use cohesion_core::model::{check_score, CodingUnit, Dimension, ExpertScore, Rating};
use cohesion_core::stats::RatingMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::events::{Demographics, DiscardScope, Event, ServedHoneyPot};
use crate::store::EventLog;
use crate::ServiceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StudyOptions {
    /// Served positions that are multiples of this carry a honey pot.
    pub honey_pot_every: usize,
    pub discard_scope: DiscardScope,
    /// Serve the globally least-served unit first instead of a pure permutation.
    pub balanced: bool,
    /// Seeds session identifiers and orders; entropy when absent.
    pub master_seed: Option<u64>,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            honey_pot_every: 10,
            discard_scope: DiscardScope::Block,
            balanced: false,
            master_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Served {
    pub position: usize,
    pub unit_id: String,
    pub honey_pot: Option<ServedHoneyPot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredRating {
    pub submission_token: String,
    pub position: usize,
    pub scores: BTreeMap<String, u8>,
    pub honey_pot_answer: Option<u8>,
    pub submitted_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub session_id: String,
    pub rater_id: String,
    pub seed: u64,
    pub balanced: bool,
    pub demographics: Demographics,
    /// Seeded permutation of the unit pool (sorted by id before shuffling).
    pub order: Vec<String>,
    pub administered: Vec<Served>,
    pub ratings: BTreeMap<String, StoredRating>,
    tokens: BTreeMap<String, String>,
}

impl Session {
    pub fn cursor(&self) -> usize {
        self.administered.len()
    }

    fn served(&self, unit_id: &str) -> Option<&Served> {
        self.administered.iter().find(|s| s.unit_id == unit_id)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub rater_id: String,
    pub instructions: String,
    pub pool_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Item,
    HoneyPot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ServedItem {
    pub item_id: String,
    pub text: String,
    pub kind: ItemKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitPayload {
    pub position: usize,
    pub unit: CodingUnit,
    pub clip_uri: String,
    pub focus_image_uri: String,
    pub items: Vec<ServedItem>,
    pub honey_pot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NextUnit {
    Unit(Box<UnitPayload>),
    Complete { served: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ack {
    pub stored: bool,
    pub unit_id: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub scope: DiscardScope,
    pub total_ratings: usize,
    pub discarded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixExport {
    pub matrices: Vec<RatingMatrix>,
    pub expert: Vec<ExpertScore>,
}

pub struct Study {
    bundle: Arc<StudyBundle>,
    options: StudyOptions,
    master_seed: u64,
    pool: Vec<String>,
    sessions: BTreeMap<String, Session>,
    served_counts: BTreeMap<String, usize>,
    invalid: BTreeSet<(String, String)>,
    log: Option<EventLog>,
}

impl Study {
    /// A study without persistence.
    pub fn in_memory(bundle: Arc<StudyBundle>, options: StudyOptions) -> Self {
        let master_seed = options.master_seed.unwrap_or_else(|| rand::rng().next_u64());
        let mut pool: Vec<String> = bundle.units.iter().map(|u| u.unit_id.clone()).collect();
        pool.sort();
        Study {
            served_counts: pool.iter().map(|id| (id.clone(), 0)).collect(),
            bundle,
            options,
            master_seed,
            pool,
            sessions: BTreeMap::new(),
            invalid: BTreeSet::new(),
            log: None,
        }
    }

    /// Opens the event log at `path` and replays it.
    pub fn open(bundle: Arc<StudyBundle>, options: StudyOptions, path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let (log, events) = EventLog::open(path)?;
        let mut study = Study::from_events(bundle, options, &events)?;
        tracing::info!(events = events.len(), sessions = study.sessions.len(), "replayed event log");
        study.log = Some(log);
        Ok(study)
    }

    /// An in-memory study rebuilt from recorded events; nothing is written back.
    pub fn from_events(bundle: Arc<StudyBundle>, options: StudyOptions, events: &[Event]) -> Result<Self, ServiceError> {
        let mut study = Study::in_memory(bundle, options);
        for ev in events {
            study.apply(ev)?;
        }
        Ok(study)
    }

    pub fn bundle(&self) -> &StudyBundle {
        &self.bundle
    }

    pub fn options(&self) -> &StudyOptions {
        &self.options
    }

    pub fn session(&self, id: &str) -> Option<&Session> {
        self.sessions.get(id)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &Session> {
        self.sessions.values()
    }

    fn commit(&mut self, event: Event) -> Result<(), ServiceError> {
        if let Some(log) = self.log.as_mut() {
            log.append(&event)?;
        }
        self.apply(&event)
    }

    fn apply(&mut self, event: &Event) -> Result<(), ServiceError> {
        match event {
            Event::SessionOpened {
                session_id,
                rater_id,
                seed,
                balanced,
                demographics,
            } => {
                let mut order = self.pool.clone();
                order.shuffle(&mut ChaCha20Rng::seed_from_u64(*seed));
                self.sessions.insert(
                    session_id.clone(),
                    Session {
                        session_id: session_id.clone(),
                        rater_id: rater_id.clone(),
                        seed: *seed,
                        balanced: *balanced,
                        demographics: demographics.clone(),
                        order,
                        administered: Vec::new(),
                        ratings: BTreeMap::new(),
                        tokens: BTreeMap::new(),
                    },
                );
            }
            Event::UnitServed {
                session_id,
                position,
                unit_id,
                honey_pot,
            } => {
                let s = self.sessions.get_mut(session_id).ok_or_else(|| replay_error(event))?;
                if *position != s.administered.len() + 1 {
                    return Err(replay_error(event));
                }
                s.administered.push(Served {
                    position: *position,
                    unit_id: unit_id.clone(),
                    honey_pot: honey_pot.clone(),
                });
                *self.served_counts.entry(unit_id.clone()).or_default() += 1;
            }
            Event::RatingSubmitted {
                session_id,
                submission_token,
                unit_id,
                scores,
                honey_pot_answer,
                submitted_at,
            } => {
                let s = self.sessions.get_mut(session_id).ok_or_else(|| replay_error(event))?;
                let position = s.served(unit_id).ok_or_else(|| replay_error(event))?.position;
                s.tokens.insert(submission_token.clone(), unit_id.clone());
                s.ratings.insert(
                    unit_id.clone(),
                    StoredRating {
                        submission_token: submission_token.clone(),
                        position,
                        scores: scores.clone(),
                        honey_pot_answer: *honey_pot_answer,
                        submitted_at: *submitted_at,
                    },
                );
            }
            Event::ValidityApplied { invalid, .. } => {
                self.invalid = invalid.iter().cloned().collect();
            }
        }
        Ok(())
    }

    pub fn open_session(&mut self, demographics: Demographics) -> Result<SessionInfo, ServiceError> {
        if demographics.age_band.trim().is_empty() {
            return Err(ServiceError::Validation("age_band is required".into()));
        }
        if demographics.gender.as_deref().is_some_and(|g| g.len() > 64) {
            return Err(ServiceError::Validation("gender is longer than 64 characters".into()));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.sessions.len() as u64);
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        let session_id = hex::encode(id);
        let rater_id = format!("R{}", &session_id[..10]);
        let seed = rng.random();
        self.commit(Event::SessionOpened {
            session_id: session_id.clone(),
            rater_id: rater_id.clone(),
            seed,
            balanced: self.options.balanced,
            demographics,
        })?;
        Ok(SessionInfo {
            session_id,
            rater_id,
            instructions: self.bundle.instructions.clone(),
            pool_size: self.pool.len(),
        })
    }

    fn pick_next(&self, s: &Session) -> Option<String> {
        let served: BTreeSet<&str> = s.administered.iter().map(|x| x.unit_id.as_str()).collect();
        let mut remaining = s.order.iter().filter(|id| !served.contains(id.as_str()));
        if s.balanced {
            // Least served across all sessions; ties follow the session's own order.
            remaining.min_by_key(|id| self.served_counts.get(*id).copied().unwrap_or(0)).cloned()
        } else {
            remaining.next().cloned()
        }
    }

    fn honey_pot_for(&self, s: &Session, position: usize) -> Option<ServedHoneyPot> {
        let every = self.options.honey_pot_every;
        if every == 0 || !position.is_multiple_of(every) || self.bundle.honey_pots.is_empty() {
            return None;
        }
        let mut rng = ChaCha20Rng::seed_from_u64(s.seed);
        rng.set_stream(position as u64);
        let hp = &self.bundle.honey_pots[rng.random_range(0..self.bundle.honey_pots.len())];
        Some(ServedHoneyPot {
            item_id: hp.item_id.clone(),
            slot: rng.random_range(0..=self.bundle.questionnaire.items.len()),
        })
    }

    fn honey_pot(&self, item_id: &str) -> Option<&HoneyPot> {
        self.bundle.honey_pots.iter().find(|h| h.item_id == item_id)
    }

    fn payload(&self, served: &Served) -> UnitPayload {
        let unit = self.bundle.unit(&served.unit_id).expect("served units exist").clone();
        let tl = &self.bundle.timelines[&unit.interaction_id];
        let mut items: Vec<ServedItem> = self
            .bundle
            .questionnaire
            .items
            .iter()
            .map(|it| ServedItem {
                item_id: it.item_id.clone(),
                text: it.text.clone(),
                kind: ItemKind::Item,
            })
            .collect();
        if let Some(hp) = &served.honey_pot {
            let pot = self.honey_pot(&hp.item_id).expect("served honey pots exist");
            items.insert(
                hp.slot.min(items.len()),
                ServedItem {
                    item_id: pot.item_id.clone(),
                    text: pot.text.clone(),
                    kind: ItemKind::HoneyPot,
                },
            );
        }
        UnitPayload {
            position: served.position,
            clip_uri: tl.clip_uri.clone(),
            focus_image_uri: tl.focus_image_uri.clone(),
            unit,
            items,
            honey_pot: served.honey_pot.is_some(),
        }
    }

    /// Serves the next unit of the session's order. Every call advances.
    pub fn next_unit(&mut self, session_id: &str) -> Result<NextUnit, ServiceError> {
        let s = self.sessions.get(session_id).ok_or(ServiceError::UnknownSession)?;
        let Some(unit_id) = self.pick_next(s) else {
            return Ok(NextUnit::Complete {
                served: s.administered.len(),
            });
        };
        let position = s.administered.len() + 1;
        let honey_pot = self.honey_pot_for(s, position);
        let served = Served {
            position,
            unit_id: unit_id.clone(),
            honey_pot: honey_pot.clone(),
        };
        self.commit(Event::UnitServed {
            session_id: session_id.to_string(),
            position,
            unit_id,
            honey_pot,
        })?;
        Ok(NextUnit::Unit(Box::new(self.payload(&served))))
    }

    /// Stores a rating. Replaying a submission token returns `stored: false`.
    pub fn submit_rating(
        &mut self,
        session_id: &str,
        unit_id: &str,
        scores: &BTreeMap<String, u8>,
        submission_token: &str,
        now: DateTime<Utc>,
    ) -> Result<Ack, ServiceError> {
        let s = self.sessions.get(session_id).ok_or(ServiceError::UnknownSession)?;
        if submission_token.is_empty() || submission_token.len() > 128 {
            return Err(ServiceError::Validation("submission_token must be 1..=128 characters".into()));
        }
        if let Some(prev) = s.tokens.get(submission_token) {
            if prev != unit_id {
                return Err(ServiceError::Conflict(format!(
                    "submission token already used for unit {prev}"
                )));
            }
            let position = s.ratings[prev].position;
            return Ok(Ack {
                stored: false,
                unit_id: unit_id.to_string(),
                position,
            });
        }
        if self.bundle.unit(unit_id).is_none() {
            return Err(ServiceError::Validation(format!("unknown unit {unit_id}")));
        }
        let served = s
            .served(unit_id)
            .ok_or_else(|| ServiceError::Validation(format!("unit {unit_id} was not served to this session")))?
            .clone();
        if s.ratings.contains_key(unit_id) {
            return Err(ServiceError::Conflict(format!("unit {unit_id} already rated in this session")));
        }
        let q = &self.bundle.questionnaire;
        let hp_id = served.honey_pot.as_ref().map(|h| h.item_id.as_str());
        let mut item_scores = BTreeMap::new();
        let mut honey_pot_answer = None;
        for (item, &score) in scores {
            check_score(item, score).map_err(|e| ServiceError::Validation(e.to_string()))?;
            if Some(item.as_str()) == hp_id {
                honey_pot_answer = Some(score);
            } else if q.get(item).is_some() {
                item_scores.insert(item.clone(), score);
            } else {
                return Err(ServiceError::Validation(format!("unknown item {item}")));
            }
        }
        for dim in Dimension::ALL {
            if let Some(missing) = q.active_items(dim).find(|it| !item_scores.contains_key(&it.item_id)) {
                return Err(ServiceError::Validation(format!("missing score for item {}", missing.item_id)));
            }
        }
        if let (Some(id), None) = (hp_id, honey_pot_answer) {
            return Err(ServiceError::Validation(format!("missing answer for item {id}")));
        }
        self.commit(Event::RatingSubmitted {
            session_id: session_id.to_string(),
            submission_token: submission_token.to_string(),
            unit_id: unit_id.to_string(),
            scores: item_scores,
            honey_pot_answer,
            submitted_at: now,
        })?;
        Ok(Ack {
            stored: true,
            unit_id: unit_id.to_string(),
            position: served.position,
        })
    }

    /// (rater, unit) pairs invalidated by failed honey pots under `scope`.
    pub fn invalid_ratings(&self, scope: DiscardScope) -> BTreeSet<(String, String)> {
        let every = self.options.honey_pot_every.max(1);
        let mut out = BTreeSet::new();
        for s in self.sessions.values() {
            for served in s.administered.iter().filter(|x| x.honey_pot.is_some()) {
                let Some(r) = s.ratings.get(&served.unit_id) else {
                    continue;
                };
                let hp = served.honey_pot.as_ref().expect("filtered");
                let passed = match (self.honey_pot(&hp.item_id), r.honey_pot_answer) {
                    (Some(pot), Some(a)) => pot.accepts(a),
                    _ => false,
                };
                if passed {
                    continue;
                }
                let block = match scope {
                    DiscardScope::Unit => served.position..=served.position,
                    DiscardScope::Block => (served.position + 1).saturating_sub(every)..=served.position,
                    DiscardScope::Rater => 1..=usize::MAX,
                };
                for x in &s.administered {
                    if block.contains(&x.position) && s.ratings.contains_key(&x.unit_id) {
                        out.insert((s.rater_id.clone(), x.unit_id.clone()));
                    }
                }
            }
        }
        out
    }

    /// Marks the ratings covered by failed honey pots invalid. Idempotent.
    pub fn apply_validity_filter(&mut self) -> Result<ValidityReport, ServiceError> {
        let scope = self.options.discard_scope;
        let invalid = self.invalid_ratings(scope);
        if invalid != self.invalid {
            self.commit(Event::ValidityApplied {
                scope,
                invalid: invalid.iter().cloned().collect(),
            })?;
        }
        Ok(ValidityReport {
            scope,
            total_ratings: self.sessions.values().map(|s| s.ratings.len()).sum(),
            discarded: self.invalid.len(),
        })
    }

    /// All stored ratings, with validity from the last applied filter.
    pub fn ratings(&self) -> Vec<Rating> {
        let mut out = Vec::new();
        for s in self.sessions.values() {
            for (unit_id, r) in &s.ratings {
                out.push(Rating {
                    rater_id: s.rater_id.clone(),
                    unit_id: unit_id.clone(),
                    scores: r.scores.clone(),
                    submitted_at: r.submitted_at,
                    valid: !self.invalid.contains(&(s.rater_id.clone(), unit_id.clone())),
                });
            }
        }
        out.sort_by(|a, b| (&a.rater_id, &a.unit_id).cmp(&(&b.rater_id, &b.unit_id)));
        out
    }

    pub fn export_ratings_csv(&self) -> Result<Vec<u8>, ServiceError> {
        let mut buf = Vec::new();
        cohesion_core::model::write_ratings_csv(&mut buf, &self.ratings()).map_err(|e| ServiceError::Internal(e.to_string()))?;
        Ok(buf)
    }

    /// Subscale matrices per (technique, dimension) from valid ratings.
    pub fn export_matrices(&self) -> Result<MatrixExport, ServiceError> {
        let ratings = self.ratings();
        let table = ScoreTable::build(&self.bundle.units, &ratings, &self.bundle.questionnaire).map_err(|e| match e {
            cohesion_core::analysis::AnalysisError::NoValidRatings => ServiceError::NoValidRatings,
            other => ServiceError::Internal(other.to_string()),
        })?;
        Ok(MatrixExport {
            matrices: table.matrices(),
            expert: self.bundle.expert.clone().unwrap_or_default(),
        })
    }

    /// Rewrites the log as the minimal event sequence producing the current state.
    pub fn compact(&mut self) -> Result<usize, ServiceError> {
        let Some(log) = self.log.as_mut() else {
            return Ok(0);
        };
        let mut events = Vec::new();
        for s in self.sessions.values() {
            events.push(Event::SessionOpened {
                session_id: s.session_id.clone(),
                rater_id: s.rater_id.clone(),
                seed: s.seed,
                balanced: s.balanced,
                demographics: s.demographics.clone(),
            });
        }
        for s in self.sessions.values() {
            for x in &s.administered {
                events.push(Event::UnitServed {
                    session_id: s.session_id.clone(),
                    position: x.position,
                    unit_id: x.unit_id.clone(),
                    honey_pot: x.honey_pot.clone(),
                });
            }
            let mut rated: Vec<(&String, &StoredRating)> = s.ratings.iter().collect();
            rated.sort_by_key(|(_, r)| r.position);
            for (unit_id, r) in rated {
                events.push(Event::RatingSubmitted {
                    session_id: s.session_id.clone(),
                    submission_token: r.submission_token.clone(),
                    unit_id: unit_id.clone(),
                    scores: r.scores.clone(),
                    honey_pot_answer: r.honey_pot_answer,
                    submitted_at: r.submitted_at,
                });
            }
        }
        if !self.invalid.is_empty() {
            events.push(Event::ValidityApplied {
                scope: self.options.discard_scope,
                invalid: self.invalid.iter().cloned().collect(),
            });
        }
        let before = log.len();
        log.rewrite(&events)?;
        Ok(before.saturating_sub(events.len()))
    }
}

fn replay_error(event: &Event) -> ServiceError {
    ServiceError::Corrupt(format!("event does not apply to the current state: {event:?}"))
}
