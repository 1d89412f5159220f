#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, TimeZone, Utc};
use cohesion_core::bundle::{default_honey_pots, StudyBundle, DEFAULT_INSTRUCTIONS};
use cohesion_core::model::{load_timeline, InteractionTimeline, Questionnaire};
use cohesion_core::unitize::{unitize_interval, IntervalConfig, TailPolicy, Unitizer};
use cohesion_core::Seconds;
use cohesion_service::study::ItemKind;
use cohesion_service::{Demographics, NextUnit, Study, StudyOptions, UnitPayload};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// One interaction cut into `n` two-second units.
pub fn pool_bundle(n: usize) -> StudyBundle {
    let tl = InteractionTimeline::new("g1", Seconds::from_secs(2 * n as i64), vec![], vec![]).unwrap();
    let units = unitize_interval(&tl, &IntervalConfig::new(Seconds::from_secs(2), TailPolicy::Drop)).unwrap();
    assert_eq!(units.len(), n);
    bundle(vec![tl], units)
}

/// Two annotated fixture interactions under all five study techniques.
pub fn study_bundle() -> StudyBundle {
    let tls: Vec<_> = ["tl_01.json", "tl_02.json"]
        .iter()
        .map(|f| load_timeline(fixtures_dir().join(f)).unwrap())
        .collect();
    let units = tls
        .iter()
        .flat_map(|tl| Unitizer::study_set().into_iter().flat_map(move |u| u.apply(tl).unwrap()))
        .collect();
    bundle(tls, units)
}

fn bundle(tls: Vec<InteractionTimeline>, units: Vec<cohesion_core::model::CodingUnit>) -> StudyBundle {
    let b = StudyBundle {
        instructions: DEFAULT_INSTRUCTIONS.into(),
        timelines: tls.into_iter().map(|t| (t.id.clone(), t)).collect(),
        units,
        questionnaire: Questionnaire::default(),
        honey_pots: default_honey_pots(),
        expert: None,
    };
    b.validate().unwrap();
    b
}

pub fn seeded(bundle: StudyBundle, seed: u64) -> Study {
    Study::in_memory(Arc::new(bundle), options(seed))
}

pub fn options(seed: u64) -> StudyOptions {
    StudyOptions {
        master_seed: Some(seed),
        ..StudyOptions::default()
    }
}

pub fn adult() -> Demographics {
    Demographics {
        age_band: "25-34".into(),
        gender: None,
    }
}

pub fn at(n: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(1_546_300_800 + n, 0).unwrap()
}

/// Scores every served item with `base`; honey pots get the expected answer
/// unless `fail_honey_pot`.
pub fn answer(study: &Study, payload: &UnitPayload, base: u8, fail_honey_pot: bool) -> BTreeMap<String, u8> {
    payload
        .items
        .iter()
        .map(|it| {
            let score = match it.kind {
                ItemKind::Item => base,
                ItemKind::HoneyPot => {
                    let hp = study.bundle().honey_pots.iter().find(|h| h.item_id == it.item_id).unwrap();
                    if fail_honey_pot {
                        hp.expected_answer % 5 + 1
                    } else {
                        hp.expected_answer
                    }
                }
            };
            (it.item_id.clone(), score)
        })
        .collect()
}

/// Serves and rates up to `limit` units; positions in `fail_at` fail their honey pot.
pub fn drive(study: &mut Study, session: &str, limit: usize, fail_at: &[usize]) -> Vec<UnitPayload> {
    let mut served = Vec::new();
    while served.len() < limit {
        let NextUnit::Unit(p) = study.next_unit(session).unwrap() else {
            break;
        };
        let base = 1 + (p.position % 5) as u8;
        let scores = answer(study, &p, base, fail_at.contains(&p.position));
        let token = format!("{session}-{}", p.position);
        let ack = study
            .submit_rating(session, &p.unit.unit_id, &scores, &token, at(p.position as i64))
            .unwrap();
        assert!(ack.stored);
        served.push(*p);
    }
    served
}
