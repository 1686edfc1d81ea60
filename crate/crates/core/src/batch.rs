//! Answers files: a schema id plus compact-form answers keyed by question id.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::answer::{AnswerShapeError, AnswerValue};
use crate::schema::SurveySchema;
use crate::session::{Session, SessionError};
use crate::token::Token;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchAnswersFile {
    pub schema_id: String,
    #[serde(default)]
    pub answers: BTreeMap<String, Value>,
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("answers file is for schema {file}, not {schema}")]
    SchemaId { file: String, schema: String },
    #[error("question {question}: {source}")]
    Shape {
        question: String,
        #[source]
        source: AnswerShapeError,
    },
    #[error(transparent)]
    Session(#[from] SessionError),
}

impl BatchAnswersFile {
    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Submits every answer through the session engine in question
    /// declaration order, then completes the session. Answers to questions
    /// that are hidden at their turn are rejected, never stored.
    pub fn replay(&self, schema: &SurveySchema, token: Token) -> Result<Session, BatchError> {
        if self.schema_id != schema.id {
            return Err(BatchError::SchemaId {
                file: self.schema_id.clone(),
                schema: schema.id.clone(),
            });
        }
        if let Some(unknown) = self.answers.keys().find(|id| schema.question(id).is_none()) {
            return Err(SessionError::UnknownQuestion(unknown.clone()).into());
        }
        let mut session = Session::start(schema, token)?;
        for question in &schema.questions {
            let Some(raw) = self.answers.get(&question.id) else {
                continue;
            };
            let value =
                AnswerValue::from_json(question.kind, raw).map_err(|source| BatchError::Shape {
                    question: question.id.clone(),
                    source,
                })?;
            session.submit_answer(schema, &question.id, value)?;
        }
        session.complete(schema)?;
        Ok(session)
    }
}
