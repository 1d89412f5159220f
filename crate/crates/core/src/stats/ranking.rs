use std::collections::BTreeMap;

use serde::Serialize;

use super::StatsError;
use crate::model::Technique;

/// Percentiles at which ranking curves are sampled: 5, 10, …, 100.
pub const PERCENTILE_GRID: [u32; 20] = [5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 100];

/// Spread of the raters' scores on one coding unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitSpread {
    pub unit_id: String,
    pub technique: Technique,
    pub sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankingPoint {
    pub n: u32,
    pub count: usize,
    pub ideal: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingCurve {
    pub technique: Technique,
    pub units: usize,
    pub points: Vec<RankingPoint>,
    pub auc: f64,
    pub ideal_auc: f64,
    pub auc_ratio: f64,
}

/// Number of pooled ranks at or below the `n`-th percentile.
pub fn percentile_rank(n: u32, total: usize) -> usize {
    (n as usize * total).div_ceil(100)
}

fn trapezoid(values: impl Iterator<Item = usize>) -> f64 {
    let v: Vec<f64> = values.map(|c| c as f64).collect();
    v.windows(2).map(|w| 0.5 * (w[0] + w[1]) * 5.0).sum()
}

/// Pools all units, ranks them by increasing SD and counts, per technique, the
/// units ranked within each percentile of the pool.
///
/// Ties in SD are ordered by technique then unit id, so every rank is occupied
/// by exactly one unit and the per-technique counts add up to the rank cut.
/// The ideal curve places all of a technique's units at the top of the ranking.
pub fn ranking_analysis(units: &[UnitSpread]) -> Result<Vec<RankingCurve>, StatsError> {
    if units.is_empty() {
        return Err(StatsError::InsufficientData("empty ranking pool".into()));
    }
    if units.iter().any(|u| !u.sd.is_finite() || u.sd < 0.0) {
        return Err(StatsError::InvalidParameter("unit SD must be finite and non-negative".into()));
    }
    let mut ranked: Vec<&UnitSpread> = units.iter().collect();
    ranked.sort_by(|a, b| {
        a.sd.total_cmp(&b.sd)
            .then_with(|| a.technique.to_string().cmp(&b.technique.to_string()))
            .then_with(|| a.unit_id.cmp(&b.unit_id))
    });
    let mut ranks: BTreeMap<Technique, Vec<usize>> = BTreeMap::new();
    for (rank, u) in ranked.iter().enumerate() {
        ranks.entry(u.technique).or_default().push(rank + 1);
    }
    if ranks.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "ranking needs at least 2 techniques, got {}",
            ranks.len()
        )));
    }
    let total = units.len();
    let curves = ranks
        .into_iter()
        .map(|(technique, tech_ranks)| {
            let points: Vec<RankingPoint> = PERCENTILE_GRID
                .iter()
                .map(|&n| {
                    let cut = percentile_rank(n, total);
                    RankingPoint {
                        n,
                        count: tech_ranks.iter().filter(|&&r| r <= cut).count(),
                        ideal: cut.min(tech_ranks.len()),
                    }
                })
                .collect();
            let auc = trapezoid(points.iter().map(|p| p.count));
            let ideal_auc = trapezoid(points.iter().map(|p| p.ideal));
            RankingCurve {
                technique,
                units: tech_ranks.len(),
                auc_ratio: if ideal_auc > 0.0 { auc / ideal_auc } else { 1.0 },
                points,
                auc,
                ideal_auc,
            }
        })
        .collect();
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Seconds;

    fn unit(id: &str, technique: Technique, sd: f64) -> UnitSpread {
        UnitSpread {
            unit_id: id.into(),
            technique,
            sd,
        }
    }

    #[test]
    fn four_unit_pool() {
        let pool = vec![
            unit("a1", Technique::Act, 0.1),
            unit("a2", Technique::Act, 0.2),
            unit("e1", Technique::Est, 0.3),
            unit("e2", Technique::Est, 0.4),
        ];
        let curves = ranking_analysis(&pool).unwrap();
        assert_eq!(curves[0].technique, Technique::Act);
        assert_eq!(curves[0].auc_ratio, 1.0);
        // cut = ceil(4n/100): 1 for n ≤ 25, 2 to 50, 3 to 75, 4 after.
        let est: Vec<usize> = curves[1].points.iter().map(|p| p.count).collect();
        let want: Vec<usize> = PERCENTILE_GRID
            .iter()
            .map(|&n| percentile_rank(n, 4).saturating_sub(2))
            .collect();
        assert_eq!(est, want);
        // C = 0 ×10, 1 ×5, 2 ×5 and I = 1 ×5, 2 ×15 on a step-5 grid:
        // area = 5 · (Σ − (first + last)/2).
        assert_eq!(curves[1].auc, 70.0);
        assert_eq!(curves[1].ideal_auc, 167.5);
        assert!((curves[1].auc_ratio - 70.0 / 167.5).abs() < 1e-15);
    }

    #[test]
    fn ties_break_on_technique_tag() {
        let pool = vec![
            unit("x", Technique::Est, 0.5),
            unit("y", Technique::Aut(Seconds::from_secs(8)), 0.5),
        ];
        let curves = ranking_analysis(&pool).unwrap();
        let aut = curves.iter().find(|c| c.technique != Technique::Est).unwrap();
        assert_eq!(aut.points[0].count, 1);
        assert_eq!(aut.auc_ratio, 1.0);
    }

    #[test]
    fn final_count_is_unit_total() {
        let pool: Vec<UnitSpread> = (0..13)
            .map(|i| unit(&format!("u{i}"), if i % 3 == 0 { Technique::Act } else { Technique::Est }, (i * 7 % 5) as f64))
            .collect();
        for c in ranking_analysis(&pool).unwrap() {
            assert_eq!(c.points.last().unwrap().count, c.units);
            assert!(c.points.windows(2).all(|w| w[0].count <= w[1].count));
        }
    }

    #[test]
    fn rejects_single_technique_and_empty() {
        assert!(ranking_analysis(&[]).is_err());
        assert!(ranking_analysis(&[unit("a", Technique::Act, 1.0)]).is_err());
    }
}
