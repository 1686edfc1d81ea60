//! Declarative survey definition: questions, visibility conditions,
//! placeholder bindings and recommendation rules.

mod document;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::condition::Condition;

pub use document::{parse_schema, parse_schema_unchecked, serialize_schema, SchemaError};
pub use validate::{validate_schema, Diagnostic, DiagnosticCode, Severity, Site};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveySchema {
    pub id: String,
    pub version: String,
    pub placeholders: Vec<String>,
    pub questions: Vec<Question>,
    pub rules: Vec<Rule>,
}

impl SurveySchema {
    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    pub fn question_index(&self, id: &str) -> Option<usize> {
        self.questions.iter().position(|q| q.id == id)
    }

    /// The question whose answer lists the project's research-object types,
    /// identified by binding the `artifact_types` placeholder.
    pub fn artifact_types_question(&self) -> Option<&Question> {
        self.questions
            .iter()
            .find(|q| q.binds.as_deref() == Some(ARTIFACT_TYPES_PLACEHOLDER))
    }
}

/// Placeholder name that marks the artifact-types question.
pub const ARTIFACT_TYPES_PLACEHOLDER: &str = "artifact_types";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Question {
    pub id: String,
    pub prompt: String,
    pub kind: QuestionKind,
    pub options: Vec<AnswerOption>,
    pub visible_when: Option<Condition>,
    pub binds: Option<String>,
}

impl Question {
    pub fn option(&self, id: &str) -> Option<&AnswerOption> {
        self.options.iter().find(|o| o.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    SingleChoice,
    MultiChoice,
    Boolean,
    FreeText,
}

impl QuestionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            QuestionKind::SingleChoice => "single_choice",
            QuestionKind::MultiChoice => "multi_choice",
            QuestionKind::Boolean => "boolean",
            QuestionKind::FreeText => "free_text",
        }
    }

    pub fn has_options(self) -> bool {
        matches!(self, QuestionKind::SingleChoice | QuestionKind::MultiChoice)
    }
}

impl fmt::Display for QuestionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerOption {
    pub id: String,
    pub label: String,
    /// An "other, please specify" slot.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allows_free_text: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub when: Condition,
    pub emit: Vec<RecommendationFragment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecommendationFragment {
    pub dimension: Dimension,
    /// Sentence with `{name}` placeholder markers.
    pub template: String,
    /// Lower renders first within a dimension.
    #[serde(default)]
    pub weight: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// FAIR dimensions plus reproducibility, in rendering order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    Findable,
    Accessible,
    Interoperable,
    Reusable,
    Reproducibility,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Findable,
        Dimension::Accessible,
        Dimension::Interoperable,
        Dimension::Reusable,
        Dimension::Reproducibility,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Findable => "Findable",
            Dimension::Accessible => "Accessible",
            Dimension::Interoperable => "Interoperable",
            Dimension::Reusable => "Reusable",
            Dimension::Reproducibility => "Reproducibility",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `[a-z][a-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| matches!(b, b'a'..=b'z' | b'0'..=b'9' | b'_'))
}
