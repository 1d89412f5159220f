use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Dimension, ModelError};

/// A reference score given to the whole, non-unitized interaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertScore {
    pub interaction_id: String,
    pub dimension: Dimension,
    pub score: f64,
}

pub fn read_expert_csv<R: Read>(reader: R) -> Result<Vec<ExpertScore>, ModelError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out: Vec<ExpertScore> = Vec::new();
    for (line, row) in rdr.deserialize::<ExpertScore>().enumerate() {
        let row = row?;
        if !(1.0..=5.0).contains(&row.score) {
            return Err(ModelError::invalid(
                format!("expert row {}: score", line + 2),
                format!("{} outside [1, 5]", row.score),
            ));
        }
        if out
            .iter()
            .any(|e| e.interaction_id == row.interaction_id && e.dimension == row.dimension)
        {
            return Err(ModelError::invalid(
                format!("expert row {}", line + 2),
                format!("duplicate score for ({}, {})", row.interaction_id, row.dimension),
            ));
        }
        out.push(row);
    }
    Ok(out)
}

pub fn write_expert_csv<W: Write>(writer: W, scores: &[ExpertScore]) -> Result<(), ModelError> {
    let mut w = csv::Writer::from_writer(writer);
    if scores.is_empty() {
        w.write_record(["interaction_id", "dimension", "score"])?;
    }
    for s in scores {
        w.serialize(s)?;
    }
    w.flush().map_err(|source| ModelError::Io {
        path: "expert scores".into(),
        source,
    })?;
    Ok(())
}
