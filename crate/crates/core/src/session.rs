//! One researcher's pass through a survey.
//!
//! Stored answers always satisfy the visibility fixpoint: every answered
//! question is visible under the session's own answers. Changing or retracting
//! an answer drops the answers of questions it hides. Since conditions only
//! look backwards, one ordered pass over later questions restores the fixpoint.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::answer::{AnswerValue, Answers};
use crate::schema::{validate_schema, Diagnostic, Question, QuestionKind, Severity, SurveySchema};
use crate::token::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    InProgress,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub token: Token,
    pub schema_id: String,
    pub schema_version: String,
    pub answers: Answers,
    pub status: SessionStatus,
    pub created_at: DateTime<Utc>,
}

/// Result of [`Session::next_question`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Next<'a> {
    Question(&'a Question),
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("schema has validation errors")]
    InvalidSchema(Vec<Diagnostic>),
    #[error("session belongs to schema {expected}, not {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("unknown question {0}")]
    UnknownQuestion(String),
    #[error("question not visible: {0}")]
    NotVisible(String),
    #[error("answer does not fit question {question}: {detail}")]
    TypeMismatch { question: String, detail: String },
    #[error("session is already complete")]
    AlreadyComplete,
    #[error("question {0} has no stored answer")]
    NoSuchAnswer(String),
    #[error("question {0} is visible but unanswered")]
    Incomplete(String),
}

impl SessionError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidSchema(_) => "invalid_schema",
            SessionError::SchemaMismatch { .. } => "schema_mismatch",
            SessionError::UnknownQuestion(_) => "unknown_question",
            SessionError::NotVisible(_) => "question_not_visible",
            SessionError::TypeMismatch { .. } => "type_mismatch",
            SessionError::AlreadyComplete => "session_complete",
            SessionError::NoSuchAnswer(_) => "no_such_answer",
            SessionError::Incomplete(_) => "session_incomplete",
        }
    }

    pub fn question_id(&self) -> Option<&str> {
        match self {
            SessionError::UnknownQuestion(q)
            | SessionError::NotVisible(q)
            | SessionError::NoSuchAnswer(q)
            | SessionError::Incomplete(q)
            | SessionError::TypeMismatch { question: q, .. } => Some(q),
            _ => None,
        }
    }
}

impl Session {
    /// Starts an empty session. The schema must validate without errors.
    pub fn start(schema: &SurveySchema, token: Token) -> Result<Session, SessionError> {
        Session::start_at(schema, token, Utc::now())
    }

    pub fn start_at(
        schema: &SurveySchema,
        token: Token,
        created_at: DateTime<Utc>,
    ) -> Result<Session, SessionError> {
        let diagnostics = validate_schema(schema);
        if diagnostics.iter().any(|d| d.severity == Severity::Error) {
            return Err(SessionError::InvalidSchema(diagnostics));
        }
        Ok(Session {
            token,
            schema_id: schema.id.clone(),
            schema_version: schema.version.clone(),
            answers: Answers::new(),
            status: SessionStatus::InProgress,
            created_at,
        })
    }

    pub fn is_complete(&self) -> bool {
        self.status == SessionStatus::Complete
    }

    pub fn check_schema(&self, schema: &SurveySchema) -> Result<(), SessionError> {
        if schema.id != self.schema_id || schema.version != self.schema_version {
            return Err(SessionError::SchemaMismatch {
                expected: format!("{}@{}", self.schema_id, self.schema_version),
                found: format!("{}@{}", schema.id, schema.version),
            });
        }
        Ok(())
    }

    /// Questions in declaration order whose visibility condition holds.
    pub fn visible_questions<'s>(&self, schema: &'s SurveySchema) -> Vec<&'s Question> {
        schema
            .questions
            .iter()
            .filter(|q| is_visible(q, &self.answers))
            .collect()
    }

    /// First visible question without an answer.
    pub fn next_question<'s>(&self, schema: &'s SurveySchema) -> Next<'s> {
        schema
            .questions
            .iter()
            .find(|q| !self.answers.contains_key(&q.id) && is_visible(q, &self.answers))
            .map_or(Next::Complete, Next::Question)
    }

    pub fn submit_answer(
        &mut self,
        schema: &SurveySchema,
        question_id: &str,
        value: AnswerValue,
    ) -> Result<(), SessionError> {
        self.check_schema(schema)?;
        if self.is_complete() {
            return Err(SessionError::AlreadyComplete);
        }
        let index = schema
            .question_index(question_id)
            .ok_or_else(|| SessionError::UnknownQuestion(question_id.to_owned()))?;
        let question = &schema.questions[index];
        if !is_visible(question, &self.answers) {
            return Err(SessionError::NotVisible(question_id.to_owned()));
        }
        check_answer(question, &value)?;
        self.answers.insert(question_id.to_owned(), value);
        self.cascade(schema, index);
        Ok(())
    }

    /// Removes an answer and everything it was keeping visible. Reopens a
    /// completed session.
    pub fn retract_answer(
        &mut self,
        schema: &SurveySchema,
        question_id: &str,
    ) -> Result<(), SessionError> {
        self.check_schema(schema)?;
        let index = schema
            .question_index(question_id)
            .ok_or_else(|| SessionError::UnknownQuestion(question_id.to_owned()))?;
        if self.answers.remove(question_id).is_none() {
            return Err(SessionError::NoSuchAnswer(question_id.to_owned()));
        }
        self.cascade(schema, index);
        self.status = SessionStatus::InProgress;
        Ok(())
    }

    pub fn complete(&mut self, schema: &SurveySchema) -> Result<(), SessionError> {
        self.check_schema(schema)?;
        if let Next::Question(q) = self.next_question(schema) {
            return Err(SessionError::Incomplete(q.id.clone()));
        }
        self.status = SessionStatus::Complete;
        Ok(())
    }

    /// Whether the stored answers satisfy the visibility fixpoint and the
    /// status is consistent with them.
    pub fn is_consistent(&self, schema: &SurveySchema) -> bool {
        let answered_visible = self.answers.keys().all(|id| {
            schema
                .question(id)
                .is_some_and(|q| is_visible(q, &self.answers))
        });
        let status_ok = !self.is_complete() || self.next_question(schema) == Next::Complete;
        answered_visible && status_ok
    }

    /// Equality ignoring `created_at`.
    pub fn same_state(&self, other: &Session) -> bool {
        self.token == other.token
            && self.schema_id == other.schema_id
            && self.schema_version == other.schema_version
            && self.answers == other.answers
            && self.status == other.status
    }

    fn cascade(&mut self, schema: &SurveySchema, changed: usize) {
        for q in &schema.questions[changed + 1..] {
            if self.answers.contains_key(&q.id) && !is_visible(q, &self.answers) {
                self.answers.remove(&q.id);
            }
        }
    }
}

pub fn is_visible(question: &Question, answers: &Answers) -> bool {
    question
        .visible_when
        .as_ref()
        .is_none_or(|cond| cond.evaluate(answers))
}

/// Checks that `value` is well-typed for `question`.
pub fn check_answer(question: &Question, value: &AnswerValue) -> Result<(), SessionError> {
    let mismatch = |detail: String| SessionError::TypeMismatch {
        question: question.id.clone(),
        detail,
    };
    if value.kind() != question.kind {
        return Err(mismatch(format!(
            "expected a {} answer, got {}",
            question.kind,
            value.kind()
        )));
    }
    let option = |id: &str| {
        question
            .option(id)
            .ok_or_else(|| mismatch(format!("no option {id:?}")))
    };
    match value {
        AnswerValue::Single { option: id, text } => {
            let opt = option(id)?;
            if text.is_some() && !opt.allows_free_text {
                return Err(mismatch(format!("option {id} does not take free text")));
            }
        }
        AnswerValue::Multi { options, text } => {
            if options.is_empty() {
                return Err(mismatch("select at least one option".into()));
            }
            for id in options {
                option(id)?;
            }
            for id in text.keys() {
                if !options.contains(id) {
                    return Err(mismatch(format!("free text for unselected option {id}")));
                }
                if !option(id)?.allows_free_text {
                    return Err(mismatch(format!("option {id} does not take free text")));
                }
            }
        }
        AnswerValue::Boolean(_) | AnswerValue::Text(_) => {}
    }
    debug_assert!(question.kind != QuestionKind::FreeText || question.options.is_empty());
    Ok(())
}
