//! Criterion-level checks shared by the integration tests and the acceptance runner.
//! Each returns a short summary on success and the first counterexample on failure.

use std::path::PathBuf;

use cohesion_core::model::{load_timeline, ChangeCategory, ChangeEvent, InteractionTimeline, Technique};
use cohesion_core::stats::{ranking_analysis, UnitSpread, PERCENTILE_GRID};
use cohesion_core::unitize::{
    est_boundaries, group_by_technique, speaker_spans, unit_summary, unitize_act, unitize_interval, ActConfig,
    EstConfig, IntervalConfig, TailPolicy, Unitizer,
};
use cohesion_core::Seconds;
use rand::seq::SliceRandom;
use rand::Rng;

use super::gen::{naive_est_boundaries, random_changes, random_est_config, random_timeline, rng, tiles};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn synthetic_fixtures() -> Vec<InteractionTimeline> {
    (1..=12)
        .map(|i| load_timeline(fixtures_dir().join(format!("tl_{i:02}.json"))).expect("fixture loads"))
        .collect()
}

const WINDOWS: [i64; 3] = [8, 15, 21];

/// Tiling of every technique and tail policy over `n` random timelines, plus
/// byte-identical CSV output on a second run.
pub fn partition_suite(n: u64) -> Result<String, String> {
    let mut units_checked = 0usize;
    for seed in 0..n {
        let tl = random_timeline(seed);
        let d = tl.duration;
        let ctx = |tech: &str, e: String| format!("seed {seed} {tech}: {e}");
        let mut all = Vec::new();
        for (name, u) in [
            ("EST", Unitizer::Est(EstConfig::default()).apply(&tl)),
            ("ACT", Unitizer::Act(ActConfig::default()).apply(&tl)),
        ] {
            let u = u.map_err(|e| ctx(name, e.to_string()))?;
            tiles(&u, d).map_err(|e| ctx(name, e))?;
            all.extend(u);
        }
        for w in WINDOWS {
            let window = Seconds::from_secs(w);
            let full = d.millis() / window.millis();
            for policy in [TailPolicy::Drop, TailPolicy::Keep, TailPolicy::MergeIntoLast] {
                let name = format!("AUT{w}/{policy:?}");
                let res = unitize_interval(&tl, &IntervalConfig::new(window, policy));
                if policy == TailPolicy::Drop && full == 0 {
                    if res.is_ok() {
                        return Err(ctx(&name, "expected \"no units produced\"".into()));
                    }
                    continue;
                }
                let u = res.map_err(|e| ctx(&name, e.to_string()))?;
                let end = if policy == TailPolicy::Drop { Seconds::from_millis(full * window.millis()) } else { d };
                tiles(&u, end).map_err(|e| ctx(&name, e))?;
                if policy == TailPolicy::Drop && u.iter().any(|x| x.duration() != window) {
                    return Err(ctx(&name, "Drop unit with length != window".into()));
                }
                all.extend(u);
            }
        }
        units_checked += all.len();
        let again: Vec<_> = Unitizer::study_set()
            .iter()
            .filter_map(|z| z.apply(&tl).ok())
            .flatten()
            .collect();
        let first: Vec<_> = Unitizer::study_set()
            .iter()
            .filter_map(|z| z.apply(&tl).ok())
            .flatten()
            .collect();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        cohesion_core::model::write_units_csv(&mut a, &first).unwrap();
        cohesion_core::model::write_units_csv(&mut b, &again).unwrap();
        if a != b {
            return Err(format!("seed {seed}: non-deterministic units export"));
        }
    }
    Ok(format!("{n} timelines x 11 configurations, {units_checked} units"))
}

/// Streaming EST boundaries equal the naive re-scan on `n` random streams.
pub fn est_oracle_suite(n: u64) -> Result<String, String> {
    let mut simultaneous = 0;
    let mut boundaries = 0;
    for seed in 0..n {
        let mut r = rng(10_000 + seed);
        let duration = Seconds::from_millis(r.random_range(1_000..90_000));
        let changes = random_changes(&mut r, duration);
        let cfg = if seed % 2 == 0 { EstConfig::default() } else { random_est_config(&mut r) };
        if changes.windows(2).any(|w| w[0].t == w[1].t) {
            simultaneous += 1;
        }
        let fast = est_boundaries(&changes, duration, &cfg);
        let slow = naive_est_boundaries(&changes, duration, &cfg);
        if fast != slow {
            return Err(format!("seed {seed}: streaming {fast:?} vs naive {slow:?}"));
        }
        boundaries += fast.len();
    }
    Ok(format!("{n} streams ({simultaneous} with simultaneous events), {boundaries} boundaries"))
}

fn multisets(k: usize, from: usize, cur: &mut Vec<ChangeCategory>, out: &mut Vec<Vec<ChangeCategory>>) {
    out.push(cur.clone());
    if cur.len() == k {
        return;
    }
    for i in from..ChangeCategory::ALL.len() {
        cur.push(ChangeCategory::ALL[i]);
        multisets(k, i, cur, out);
        cur.pop();
    }
}

fn permutations(items: &[ChangeCategory]) -> Vec<Vec<ChangeCategory>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Exhaustive enumeration of category multisets of size ≤ 4 under the default
/// weights, in every order and all-simultaneous.
pub fn est_anchor_suite() -> Result<String, String> {
    let cfg = EstConfig::default();
    let duration = Seconds::from_secs(60);
    let mut all = Vec::new();
    multisets(4, 0, &mut Vec::new(), &mut all);
    let mut layouts = 0;
    for ms in &all {
        let mut distinct = ms.clone();
        distinct.dedup();
        let weight: u32 = distinct.iter().map(|&c| cfg.weight(c)).sum();
        let has_goal = distinct.contains(&ChangeCategory::Goals);
        let expected = weight >= 3;
        // The anchor statements themselves.
        if has_goal && distinct.len() >= 2 && !expected {
            return Err(format!("{ms:?}: goal plus another category must trigger"));
        }
        if distinct.len() == 1 && expected {
            return Err(format!("{ms:?}: a single repeated category must not trigger"));
        }
        let simultaneous: Vec<ChangeEvent> = ms.iter().map(|&c| ChangeEvent::new(Seconds::from_secs(10), c)).collect();
        let got = est_boundaries(&simultaneous, duration, &cfg);
        if got.len() != usize::from(expected) {
            return Err(format!("{ms:?} at one instant: {got:?}"));
        }
        layouts += 1;
        for order in permutations(ms) {
            let seq: Vec<ChangeEvent> = order
                .iter()
                .enumerate()
                .map(|(i, &c)| ChangeEvent::new(Seconds::from_secs(5 * (i as i64 + 1)), c))
                .collect();
            // A later prefix may cross the threshold again; only the first crossing is pinned.
            let got = est_boundaries(&seq, duration, &cfg);
            if got.is_empty() == expected {
                return Err(format!("{order:?} in sequence: {got:?}"));
            }
            layouts += 1;
        }
    }
    Ok(format!("{} multisets, {layouts} layouts", all.len()))
}

/// Duration SD of Drop-policy interval units over the 12 synthetic interactions.
pub fn interval_sd_suite() -> Result<String, String> {
    let timelines = synthetic_fixtures();
    let mut units = Vec::new();
    for tl in &timelines {
        for w in WINDOWS {
            units.extend(
                unitize_interval(tl, &IntervalConfig::new(Seconds::from_secs(w), TailPolicy::Drop))
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    let summary = unit_summary(&group_by_technique(&units)).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for s in &summary {
        if s.duration_sd != 0.0 {
            return Err(format!("{} duration SD = {}", s.technique, s.duration_sd));
        }
        parts.push(format!("{} n={} sd=0", s.technique, s.count));
    }
    Ok(parts.join(", "))
}

/// No unit overlaps a same-speaker span for longer than the turn cap.
pub fn act_cap_suite(n: u64) -> Result<String, String> {
    let cfg = ActConfig::default();
    for seed in 0..n {
        let tl = random_timeline(seed);
        let units = unitize_act(&tl, &cfg).map_err(|e| e.to_string())?;
        for span in speaker_spans(&tl.utterances) {
            for u in &units {
                let overlap = u.end.min(span.end) - u.start.max(span.start);
                if overlap > cfg.max_turn_duration {
                    return Err(format!("seed {seed}: unit {} overlaps span by {overlap}", u.unit_id));
                }
            }
        }
    }
    Ok(format!("{n} timelines"))
}

fn technique_pool() -> [Technique; 5] {
    [
        Technique::Aut(Seconds::from_secs(8)),
        Technique::Aut(Seconds::from_secs(15)),
        Technique::Aut(Seconds::from_secs(21)),
        Technique::Act,
        Technique::Est,
    ]
}

/// A technique holding the lowest-SD ranks has ratio 1, and per-technique
/// counts sum to the percentile rank cut on random pools.
pub fn ranking_suite(n: u64) -> Result<String, String> {
    let mut r = rng(77);
    for seed in 0..n {
        let techs = technique_pool();
        let k = r.random_range(2..=5);
        let size = r.random_range(k..120);
        let mut pool: Vec<UnitSpread> = (0..size)
            .map(|i| UnitSpread {
                unit_id: format!("u{i:03}"),
                technique: techs[if i < k { i } else { r.random_range(0..k) }],
                sd: f64::from(r.random_range(0..12u8)) / 8.0,
            })
            .collect();
        pool.shuffle(&mut r);
        let curves = ranking_analysis(&pool).map_err(|e| format!("pool {seed}: {e}"))?;
        for (idx, &p) in PERCENTILE_GRID.iter().enumerate() {
            let total: usize = curves.iter().map(|c| c.points[idx].count).sum();
            let cut = (p as usize * size).div_ceil(100);
            if total != cut {
                return Err(format!("pool {seed}, n={p}: counts sum to {total}, cut {cut}"));
            }
        }
        if let Some(c) = curves.iter().find(|c| c.auc_ratio > 1.0 || c.auc_ratio <= 0.0) {
            return Err(format!("pool {seed}: {} ratio {}", c.technique, c.auc_ratio));
        }
        // Give one technique strictly the lowest SDs.
        let best = techs[0];
        for u in &mut pool {
            if u.technique == best {
                u.sd = -1.0 + u.sd / 100.0;
            }
        }
        for u in &mut pool {
            u.sd += 1.0;
        }
        let curves = ranking_analysis(&pool).map_err(|e| format!("pool {seed}: {e}"))?;
        let c = curves.iter().find(|c| c.technique == best).unwrap();
        if c.auc_ratio != 1.0 {
            return Err(format!("pool {seed}: lowest-ranked technique has ratio {}", c.auc_ratio));
        }
    }
    Ok(format!("{n} random pools"))
}

/// Units of all five study techniques over the 12 synthetic interactions.
pub fn synthetic_units() -> Vec<cohesion_core::model::CodingUnit> {
    let mut units = Vec::new();
    for tl in synthetic_fixtures() {
        for u in Unitizer::study_set() {
            units.extend(u.apply(&tl).expect("fixtures unitize"));
        }
    }
    units
}
