//! Seeded synthetic raters for exercising the analysis without a human study.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::model::{invert_score, CodingUnit, Dimension, ExpertScore, ModelError, Questionnaire, Rating, SCALE_MAX, SCALE_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub raters: usize,
    /// SD of the per-item rating noise around a unit's latent score.
    pub noise_sd: f64,
    /// SD of unit latents around their interaction's latent score.
    pub unit_sd: f64,
    /// Probability that a rater scores a given unit.
    pub coverage: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            raters: 20,
            noise_sd: 0.5,
            unit_sd: 0.3,
            coverage: 1.0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.raters == 0 {
            return Err(ModelError::invalid("raters", "need at least one rater"));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(ModelError::invalid("noise_sd", "must be finite and non-negative"));
        }
        if !(self.unit_sd >= 0.0 && self.unit_sd.is_finite()) {
            return Err(ModelError::invalid("unit_sd", "must be finite and non-negative"));
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return Err(ModelError::invalid("coverage", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub ratings: Vec<Rating>,
    /// Rounded interaction latents, one per (interaction, dimension).
    pub expert: Vec<ExpertScore>,
}

fn to_scale(x: f64) -> u8 {
    x.round().clamp(f64::from(SCALE_MIN), f64::from(SCALE_MAX)) as u8
}

pub fn base_timestamp() -> DateTime<Utc> {
    DateTime::parse_from_rfc3339("2019-01-01T00:00:00Z")
        .expect("valid constant")
        .with_timezone(&Utc)
}

/// Draws ratings for every unit. Output depends only on the inputs and `seed`.
pub fn simulate_ratings(
    units: &[CodingUnit],
    questionnaire: &Questionnaire,
    cfg: &SimulationConfig,
    seed: u64,
) -> Result<Simulation, ModelError> {
    cfg.validate()?;
    if units.is_empty() {
        return Err(ModelError::invalid("units", "no units to rate"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let unit_noise = Normal::new(0.0, cfg.unit_sd).expect("validated sd");
    let item_noise = Normal::new(0.0, cfg.noise_sd).expect("validated sd");

    let interactions: BTreeSet<&str> = units.iter().map(|u| u.interaction_id.as_str()).collect();
    let mut latent: BTreeMap<(&str, Dimension), f64> = BTreeMap::new();
    for &i in &interactions {
        for d in Dimension::ALL {
            latent.insert((i, d), rng.random_range(1.0..=5.0));
        }
    }
    let mut sorted: Vec<&CodingUnit> = units.iter().collect();
    sorted.sort_by(|a, b| a.unit_id.cmp(&b.unit_id));
    let unit_latent: Vec<[f64; 2]> = sorted
        .iter()
        .map(|u| Dimension::ALL.map(|d| latent[&(u.interaction_id.as_str(), d)] + unit_noise.sample(&mut rng)))
        .collect();

    let width = cfg.raters.to_string().len().max(2);
    let mut ratings = Vec::new();
    let mut clock = base_timestamp();
    for r in 0..cfg.raters {
        let rater_id = format!("R{:0width$}", r + 1);
        for (u, lat) in sorted.iter().zip(&unit_latent) {
            let rated = rng.random::<f64>() < cfg.coverage;
            let mut scores = BTreeMap::new();
            for item in &questionnaire.items {
                let mean = lat[item.dimension as usize];
                let s = to_scale(mean + item_noise.sample(&mut rng));
                scores.insert(item.item_id.clone(), if item.inverted { invert_score(s) } else { s });
            }
            if rated {
                clock += Duration::seconds(1);
                ratings.push(Rating {
                    rater_id: rater_id.clone(),
                    unit_id: u.unit_id.clone(),
                    scores,
                    submitted_at: clock,
                    valid: true,
                });
            }
        }
    }
    let expert = latent
        .iter()
        .map(|(&(i, d), &l)| ExpertScore {
            interaction_id: i.to_string(),
            dimension: d,
            score: f64::from(to_scale(l)),
        })
        .collect();
    Ok(Simulation { ratings, expert })
}
