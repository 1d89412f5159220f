use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::time::Seconds;

/// Which unitizing procedure produced a coding unit.
///
/// The derived order lists interval windows first (by width), then ACT, then
/// EST, which is the row order used in report tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Technique {
    Aut(Seconds),
    Act,
    Est,
}

impl Technique {
    pub fn tag(&self) -> String {
        self.to_string()
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Technique::Aut(_))
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Technique::Est => f.write_str("EST"),
            Technique::Act => f.write_str("ACT"),
            Technique::Aut(w) => {
                let ms = w.millis();
                if ms % 1000 == 0 {
                    write!(f, "AUT{}", ms / 1000)
                } else {
                    let s = w.to_string();
                    write!(f, "AUT{}", s.trim_end_matches('0'))
                }
            }
        }
    }
}

impl FromStr for Technique {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::invalid("technique", format!("unknown technique {s:?}"));
        match s {
            "EST" => Ok(Technique::Est),
            "ACT" => Ok(Technique::Act),
            _ => {
                let window = s.strip_prefix("AUT").ok_or_else(bad)?;
                let w: Seconds = window.parse().map_err(|_| bad())?;
                if w.is_positive() {
                    Ok(Technique::Aut(w))
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl Serialize for Technique {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Technique {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A half-open segment `[start, end)` of one interaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingUnit {
    pub unit_id: String,
    pub interaction_id: String,
    pub technique: Technique,
    pub start: Seconds,
    pub end: Seconds,
    pub index: u32,
}

impl CodingUnit {
    pub fn new(interaction_id: &str, technique: Technique, index: u32, start: Seconds, end: Seconds) -> Self {
        CodingUnit {
            unit_id: format!("{interaction_id}-{technique}-{index:03}"),
            interaction_id: interaction_id.to_string(),
            technique,
            start,
            end,
            index,
        }
    }

    pub fn duration(&self) -> Seconds {
        self.end - self.start
    }
}

#[derive(Serialize, Deserialize)]
struct UnitRow {
    unit_id: String,
    interaction_id: String,
    technique: String,
    start: String,
    end: String,
    index: u32,
}

pub fn write_units_csv<W: Write>(writer: W, units: &[CodingUnit]) -> Result<(), ModelError> {
    let mut w = csv::Writer::from_writer(writer);
    if units.is_empty() {
        w.write_record(["unit_id", "interaction_id", "technique", "start", "end", "index"])?;
    }
    for u in units {
        w.serialize(UnitRow {
            unit_id: u.unit_id.clone(),
            interaction_id: u.interaction_id.clone(),
            technique: u.technique.to_string(),
            start: u.start.to_string(),
            end: u.end.to_string(),
            index: u.index,
        })?;
    }
    w.flush().map_err(|source| ModelError::Io {
        path: "units export".into(),
        source,
    })?;
    Ok(())
}

pub fn read_units_csv<R: Read>(reader: R) -> Result<Vec<CodingUnit>, ModelError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut units = Vec::new();
    for (line, row) in rdr.deserialize::<UnitRow>().enumerate() {
        let row = row?;
        let field = |name: &str| format!("units row {}: {name}", line + 2);
        let start: Seconds = row.start.parse().map_err(|e| ModelError::invalid(field("start"), e))?;
        let end: Seconds = row.end.parse().map_err(|e| ModelError::invalid(field("end"), e))?;
        if start >= end || start < Seconds::ZERO {
            return Err(ModelError::invalid(
                field("start/end"),
                format!("expected 0 <= start < end, got [{start}, {end})"),
            ));
        }
        units.push(CodingUnit {
            unit_id: row.unit_id,
            interaction_id: row.interaction_id,
            technique: row.technique.parse().map_err(|e: ModelError| {
                ModelError::invalid(field("technique"), e.to_string())
            })?,
            start,
            end,
            index: row.index,
        });
    }
    let mut ids = std::collections::BTreeSet::new();
    for u in &units {
        if !ids.insert(u.unit_id.as_str()) {
            return Err(ModelError::invalid("unit_id", format!("duplicate unit id {:?}", u.unit_id)));
        }
    }
    Ok(units)
}
