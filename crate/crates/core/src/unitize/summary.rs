use std::collections::BTreeMap;

use serde::Serialize;

use super::UnitizeError;
use crate::model::{CodingUnit, Technique};

/// Count and duration statistics of one technique's units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechniqueSummary {
    pub technique: Technique,
    pub count: usize,
    pub mean_duration: f64,
    /// Population standard deviation, in seconds.
    pub duration_sd: f64,
}

impl TechniqueSummary {
    pub fn rounded(&self, decimals: u32) -> TechniqueSummary {
        let f = 10f64.powi(decimals as i32);
        TechniqueSummary {
            mean_duration: (self.mean_duration * f).round() / f,
            duration_sd: (self.duration_sd * f).round() / f,
            ..self.clone()
        }
    }
}

pub fn group_by_technique(units: &[CodingUnit]) -> BTreeMap<Technique, Vec<CodingUnit>> {
    let mut groups: BTreeMap<Technique, Vec<CodingUnit>> = BTreeMap::new();
    for u in units {
        groups.entry(u.technique).or_default().push(u.clone());
    }
    groups
}

pub fn unit_summary(
    groups: &BTreeMap<Technique, Vec<CodingUnit>>,
) -> Result<Vec<TechniqueSummary>, UnitizeError> {
    groups
        .iter()
        .map(|(&technique, units)| {
            if units.is_empty() {
                return Err(UnitizeError::EmptyGroup(technique.to_string()));
            }
            // Millisecond integers keep constant-width groups at exactly zero spread.
            let millis: Vec<i64> = units.iter().map(|u| u.duration().millis()).collect();
            let n = millis.len() as f64;
            let mean_ms = millis.iter().sum::<i64>() as f64 / n;
            let var = millis
                .iter()
                .map(|&m| (m as f64 - mean_ms).powi(2))
                .sum::<f64>()
                / n;
            Ok(TechniqueSummary {
                technique,
                count: units.len(),
                mean_duration: mean_ms / 1000.0,
                duration_sd: var.sqrt() / 1000.0,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Seconds;

    fn units(durations: &[i64]) -> Vec<CodingUnit> {
        let mut t = 0;
        durations
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let u = CodingUnit::new("x", Technique::Act, i as u32, Seconds::from_secs(t), Seconds::from_secs(t + d));
                t += d;
                u
            })
            .collect()
    }

    #[test]
    fn constant_durations() {
        let g = BTreeMap::from([(Technique::Act, units(&[8, 8, 8]))]);
        let s = &unit_summary(&g).unwrap()[0];
        assert_eq!((s.count, s.mean_duration, s.duration_sd), (3, 8.0, 0.0));
    }

    #[test]
    fn population_sd() {
        let g = BTreeMap::from([(Technique::Act, units(&[10, 20, 30]))]);
        let s = &unit_summary(&g).unwrap()[0];
        assert_eq!(s.mean_duration, 20.0);
        assert!((s.duration_sd - (200.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.rounded(3).duration_sd, 8.165);
    }

    #[test]
    fn empty_group_is_an_error() {
        let g = BTreeMap::from([(Technique::Est, vec![])]);
        assert!(matches!(unit_summary(&g), Err(UnitizeError::EmptyGroup(_))));
    }
}
