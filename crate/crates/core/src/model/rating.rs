use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{check_score, ModelError};

/// One rater's item scores for one coding unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    pub rater_id: String,
    pub unit_id: String,
    pub scores: BTreeMap<String, u8>,
    pub submitted_at: DateTime<Utc>,
    pub valid: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct RatingRow {
    rater_id: String,
    unit_id: String,
    item_id: String,
    score: u8,
    valid: bool,
    submitted_at: String,
}

pub fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

/// Writes the long-format ratings export: one row per scored item, header first.
/// Rows are ordered by (rater, unit, item) regardless of input order.
pub fn write_ratings_csv<W: Write>(writer: W, ratings: &[Rating]) -> Result<(), ModelError> {
    let mut sorted: Vec<&Rating> = ratings.iter().collect();
    sorted.sort_by(|a, b| (&a.rater_id, &a.unit_id).cmp(&(&b.rater_id, &b.unit_id)));
    let mut w = csv::Writer::from_writer(writer);
    // An empty export still carries its header.
    if sorted.is_empty() {
        w.write_record(["rater_id", "unit_id", "item_id", "score", "valid", "submitted_at"])?;
    }
    for r in sorted {
        let ts = format_timestamp(&r.submitted_at);
        for (item_id, &score) in &r.scores {
            w.serialize(RatingRow {
                rater_id: r.rater_id.clone(),
                unit_id: r.unit_id.clone(),
                item_id: item_id.clone(),
                score,
                valid: r.valid,
                submitted_at: ts.clone(),
            })?;
        }
    }
    w.flush().map_err(|source| ModelError::Io {
        path: "ratings export".into(),
        source,
    })?;
    Ok(())
}

/// Parses the long-format export back into one [`Rating`] per (rater, unit).
pub fn read_ratings_csv<R: Read>(reader: R) -> Result<Vec<Rating>, ModelError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut grouped: BTreeMap<(String, String), Rating> = BTreeMap::new();
    for (line, row) in rdr.deserialize::<RatingRow>().enumerate() {
        let row = row?;
        let field = |name: &str| format!("ratings row {}: {name}", line + 2);
        check_score(&row.item_id, row.score).map_err(|e| match e {
            ModelError::Invalid { message, .. } => ModelError::invalid(field("score"), message),
            other => other,
        })?;
        let submitted_at = DateTime::parse_from_rfc3339(&row.submitted_at)
            .map_err(|e| ModelError::invalid(field("submitted_at"), e.to_string()))?
            .with_timezone(&Utc);
        let key = (row.rater_id.clone(), row.unit_id.clone());
        let entry = grouped.entry(key).or_insert_with(|| Rating {
            rater_id: row.rater_id.clone(),
            unit_id: row.unit_id.clone(),
            scores: BTreeMap::new(),
            submitted_at,
            valid: row.valid,
        });
        if entry.valid != row.valid || entry.submitted_at != submitted_at {
            return Err(ModelError::invalid(
                field("valid/submitted_at"),
                format!(
                    "inconsistent with earlier rows of rating ({}, {})",
                    row.rater_id, row.unit_id
                ),
            ));
        }
        if entry.scores.insert(row.item_id.clone(), row.score).is_some() {
            return Err(ModelError::invalid(
                field("item_id"),
                format!("duplicate score for item {:?}", row.item_id),
            ));
        }
    }
    Ok(grouped.into_values().collect())
}
