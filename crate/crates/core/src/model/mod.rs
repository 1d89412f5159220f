//! Domain types shared by the unitizers, the statistics and the rating service.

mod expert;
mod questionnaire;
mod rating;
mod timeline;
mod unit;

use std::path::Path;

pub use expert::{read_expert_csv, write_expert_csv, ExpertScore};
pub use questionnaire::{
    check_score, invert_score, subscale_score, Dimension, Questionnaire, QuestionnaireItem, SCALE_MAX,
    SCALE_MIN,
};
pub use rating::{format_timestamp, read_ratings_csv, write_ratings_csv, Rating};
pub use timeline::{
    load_timeline, save_timeline, ChangeCategory, ChangeEvent, InteractionTimeline, UtteranceEvent,
};
pub use unit::{read_units_csv, write_units_csv, CodingUnit, Technique};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: parse error: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error("rating ({rater_id}, {unit_id}) has no score for active item {item_id}")]
    MissingScore {
        rater_id: String,
        unit_id: String,
        item_id: String,
    },
}

impl ModelError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ModelError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by the content of an input rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, ModelError::Io { .. })
    }

    pub(crate) fn with_path(self, path: impl AsRef<Path>) -> Self {
        let path = path.as_ref();
        match self {
            ModelError::Invalid { field, message } => ModelError::Invalid {
                field: format!("{}: {field}", path.display()),
                message,
            },
            ModelError::Json { source, .. } => ModelError::Json {
                context: path.display().to_string(),
                source,
            },
            other => other,
        }
    }
}
