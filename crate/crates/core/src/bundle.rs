//! A study bundle: everything the rating service needs, with content hashes.
//!
//! Layout of a bundle directory:
//!
//! ```text
//! manifest.json        instructions + sha256 of every other file
//! timelines/<id>.json  one timeline per interaction
//! units.csv            coding units of every technique
//! questionnaire.json
//! honey_pots.json
//! expert.csv           optional whole-interaction scores
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{
    read_expert_csv, read_units_csv, write_expert_csv, write_units_csv, CodingUnit, ExpertScore, InteractionTimeline,
    ModelError, Questionnaire, SCALE_MAX, SCALE_MIN,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

/// An attention-check item with a single correct answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoneyPot {
    pub item_id: String,
    pub text: String,
    pub expected_answer: u8,
}

impl HoneyPot {
    pub fn accepts(&self, answer: u8) -> bool {
        answer == self.expected_answer
    }
}

pub fn default_honey_pots() -> Vec<HoneyPot> {
    [(2, "two"), (4, "four"), (1, "one"), (5, "five")]
        .into_iter()
        .enumerate()
        .map(|(i, (n, word))| HoneyPot {
            item_id: format!("HP{}", i + 1),
            text: format!("To show that you are paying attention, please select {word} ({n}) for this item."),
            expected_answer: n,
        })
        .collect()
}

pub const DEFAULT_INSTRUCTIONS: &str = "You will watch short clips of a group playing a game. \
The screenshot shows the group to focus on. After each clip, rate how much each statement \
applies to that group, from 1 (Not at all) to 5 (Yes, definitely). You can leave the study at any time.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: u32,
    pub instructions: String,
    /// Relative path → lowercase hex sha256.
    pub files: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: hash mismatch (manifest {expected}, found {actual})")]
    HashMismatch { path: String, expected: String, actual: String },
    #[error("{0}: listed in manifest but missing")]
    MissingFile(String),
    #[error("unsupported bundle format {0}")]
    Format(u32),
    #[error("unit {unit_id} references unknown interaction {interaction_id}")]
    UnknownInteraction { unit_id: String, interaction_id: String },
    #[error("{0}")]
    Invalid(String),
}

impl BundleError {
    pub fn is_validation(&self) -> bool {
        match self {
            BundleError::Model(e) => e.is_validation(),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyBundle {
    pub instructions: String,
    pub timelines: BTreeMap<String, InteractionTimeline>,
    pub units: Vec<CodingUnit>,
    pub questionnaire: Questionnaire,
    pub honey_pots: Vec<HoneyPot>,
    pub expert: Option<Vec<ExpertScore>>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ModelError + '_ {
    move |source| ModelError::Io {
        path: path.display().to_string(),
        source,
    }
}

impl StudyBundle {
    pub fn validate(&self) -> Result<(), BundleError> {
        self.questionnaire.validate()?;
        for (id, tl) in &self.timelines {
            if id != &tl.id {
                return Err(BundleError::Invalid(format!("timeline key {id} holds timeline {}", tl.id)));
            }
            tl.validate()?;
        }
        let mut ids = std::collections::BTreeSet::new();
        for u in &self.units {
            let Some(tl) = self.timelines.get(&u.interaction_id) else {
                return Err(BundleError::UnknownInteraction {
                    unit_id: u.unit_id.clone(),
                    interaction_id: u.interaction_id.clone(),
                });
            };
            if u.end > tl.duration {
                return Err(BundleError::Invalid(format!("unit {} ends after its timeline", u.unit_id)));
            }
            if !ids.insert(&u.unit_id) {
                return Err(BundleError::Invalid(format!("duplicate unit id {}", u.unit_id)));
            }
        }
        if self.units.is_empty() {
            return Err(BundleError::Invalid("bundle has no units".into()));
        }
        let mut hp_ids = std::collections::BTreeSet::new();
        for hp in &self.honey_pots {
            if !(SCALE_MIN..=SCALE_MAX).contains(&hp.expected_answer) {
                return Err(BundleError::Invalid(format!("honey pot {} answer outside 1..=5", hp.item_id)));
            }
            if self.questionnaire.get(&hp.item_id).is_some() || !hp_ids.insert(&hp.item_id) {
                return Err(BundleError::Invalid(format!("honey pot id {} is not unique", hp.item_id)));
            }
        }
        if self.honey_pots.is_empty() {
            return Err(BundleError::Invalid("bundle needs at least one honey pot".into()));
        }
        Ok(())
    }

    /// Writes the bundle into `dir` (created if needed) and returns its manifest.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Manifest, BundleError> {
        self.validate()?;
        let dir = dir.as_ref();
        let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
        for (id, tl) in &self.timelines {
            files.insert(format!("timelines/{id}.json"), tl.to_json_string().into_bytes());
        }
        let mut units = Vec::new();
        write_units_csv(&mut units, &self.units)?;
        files.insert("units.csv".into(), units);
        files.insert("questionnaire.json".into(), self.questionnaire.to_json_string().into_bytes());
        files.insert(
            "honey_pots.json".into(),
            serde_json::to_string_pretty(&self.honey_pots).expect("serializes").into_bytes(),
        );
        if let Some(expert) = &self.expert {
            let mut buf = Vec::new();
            write_expert_csv(&mut buf, expert)?;
            files.insert("expert.csv".into(), buf);
        }
        let timelines_dir = dir.join("timelines");
        fs::create_dir_all(&timelines_dir).map_err(io_err(&timelines_dir))?;
        let mut hashes = BTreeMap::new();
        for (rel, bytes) in &files {
            let path = dir.join(rel);
            fs::write(&path, bytes).map_err(io_err(&path))?;
            hashes.insert(rel.clone(), sha256_hex(bytes));
        }
        let manifest = Manifest {
            format: FORMAT_VERSION,
            instructions: self.instructions.clone(),
            files: hashes,
        };
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&manifest).expect("serializes");
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(manifest)
    }

    /// Loads and verifies a bundle directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, BundleError> {
        let dir = dir.as_ref();
        let manifest_path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|source| ModelError::Json {
            context: manifest_path.display().to_string(),
            source,
        })?;
        if manifest.format != FORMAT_VERSION {
            return Err(BundleError::Format(manifest.format));
        }
        let mut contents: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
        for (rel, expected) in &manifest.files {
            let path: PathBuf = dir.join(rel);
            let bytes = fs::read(&path).map_err(|_| BundleError::MissingFile(rel.clone()))?;
            let actual = sha256_hex(&bytes);
            if &actual != expected {
                return Err(BundleError::HashMismatch {
                    path: rel.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
            contents.insert(rel.as_str(), bytes);
        }
        let take = |name: &str| -> Result<&Vec<u8>, BundleError> {
            contents.get(name).ok_or_else(|| BundleError::MissingFile(name.to_string()))
        };
        let utf8 = |name: &str, bytes: &[u8]| -> Result<String, BundleError> {
            String::from_utf8(bytes.to_vec()).map_err(|_| BundleError::Invalid(format!("{name}: not UTF-8")))
        };

        let mut timelines = BTreeMap::new();
        for (rel, bytes) in contents.iter().filter(|(k, _)| k.starts_with("timelines/")) {
            let stem = Path::new(rel).file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            let tl = InteractionTimeline::from_json_str(&utf8(rel, bytes)?, stem).map_err(|e| e.with_path(rel))?;
            timelines.insert(tl.id.clone(), tl);
        }
        let units = read_units_csv(take("units.csv")?.as_slice()).map_err(|e| e.with_path("units.csv"))?;
        let questionnaire = Questionnaire::from_json_str(&utf8("questionnaire.json", take("questionnaire.json")?)?)
            .map_err(|e| e.with_path("questionnaire.json"))?;
        let honey_pots: Vec<HoneyPot> =
            serde_json::from_slice(take("honey_pots.json")?).map_err(|source| ModelError::Json {
                context: "honey_pots.json".into(),
                source,
            })?;
        let expert = match contents.get("expert.csv") {
            Some(bytes) => Some(read_expert_csv(bytes.as_slice()).map_err(|e| e.with_path("expert.csv"))?),
            None => None,
        };
        let bundle = StudyBundle {
            instructions: manifest.instructions,
            timelines,
            units,
            questionnaire,
            honey_pots,
            expert,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn unit(&self, unit_id: &str) -> Option<&CodingUnit> {
        self.units.iter().find(|u| u.unit_id == unit_id)
    }
}
