use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    validate_schema, AnswerOption, Diagnostic, Question, QuestionKind, RecommendationFragment,
    Rule, Severity, SurveySchema,
};
use crate::condition::{parse_condition, ConditionError};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema document error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{site}: {source}")]
    Condition {
        /// e.g. `question q_ml_repro visible_when`
        site: String,
        #[source]
        source: ConditionError,
    },
    #[error("schema has {} error(s); first: {}", .0.iter().filter(|d| d.severity == Severity::Error).count(), first_error(.0))]
    Invalid(Vec<Diagnostic>),
}

fn first_error(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .find(|d| d.severity == Severity::Error)
        .map(|d| d.to_string())
        .unwrap_or_default()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    id: String,
    version: String,
    #[serde(default)]
    placeholders: Vec<String>,
    #[serde(default)]
    questions: Vec<RawQuestion>,
    #[serde(default)]
    rules: Vec<RawRule>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuestion {
    id: String,
    prompt: String,
    kind: QuestionKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    options: Vec<AnswerOption>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    visible_when: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    binds: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    id: String,
    when: String,
    emit: Vec<RecommendationFragment>,
}

/// Parses a schema document without running the validator. Fails only on
/// document syntax, unknown keys and condition syntax.
pub fn parse_schema_unchecked(text: &str) -> Result<SurveySchema, SchemaError> {
    let raw: RawSchema = serde_json::from_str(text).map_err(|e| SchemaError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let questions = raw
        .questions
        .into_iter()
        .map(|q| {
            let visible_when = q
                .visible_when
                .as_deref()
                .map(parse_condition)
                .transpose()
                .map_err(|source| SchemaError::Condition {
                    site: format!("question {} visible_when", q.id),
                    source,
                })?;
            Ok(Question {
                id: q.id,
                prompt: q.prompt,
                kind: q.kind,
                options: q.options,
                visible_when,
                binds: q.binds,
            })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;

    let rules = raw
        .rules
        .into_iter()
        .map(|r| {
            let when = parse_condition(&r.when).map_err(|source| SchemaError::Condition {
                site: format!("rule {} when", r.id),
                source,
            })?;
            Ok(Rule {
                id: r.id,
                when,
                emit: r.emit,
            })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;

    Ok(SurveySchema {
        id: raw.id,
        version: raw.version,
        placeholders: raw.placeholders,
        questions,
        rules,
    })
}

/// Parses and validates a schema document. Warnings are tolerated; any
/// error diagnostic fails the parse.
pub fn parse_schema(text: &str) -> Result<SurveySchema, SchemaError> {
    let schema = parse_schema_unchecked(text)?;
    let diagnostics = validate_schema(&schema);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        return Err(SchemaError::Invalid(diagnostics));
    }
    Ok(schema)
}

/// Writes the schema as a pretty-printed document with canonical condition text.
pub fn serialize_schema(schema: &SurveySchema) -> String {
    let raw = RawSchema {
        id: schema.id.clone(),
        version: schema.version.clone(),
        placeholders: schema.placeholders.clone(),
        questions: schema
            .questions
            .iter()
            .map(|q| RawQuestion {
                id: q.id.clone(),
                prompt: q.prompt.clone(),
                kind: q.kind,
                options: q.options.clone(),
                visible_when: q.visible_when.as_ref().map(|c| c.to_string()),
                binds: q.binds.clone(),
            })
            .collect(),
        rules: schema
            .rules
            .iter()
            .map(|r| RawRule {
                id: r.id.clone(),
                when: r.when.to_string(),
                emit: r.emit.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("schema serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "id": "mini",
        "version": "0.1.0",
        "questions": [{"id": "q1", "prompt": "Name?", "kind": "free_text"}]
    }"#;

    #[test]
    fn minimal_document() {
        let schema = parse_schema(MINIMAL).unwrap();
        assert_eq!(schema.questions.len(), 1);
        assert!(schema.rules.is_empty());
        assert_eq!(schema.questions[0].kind, QuestionKind::FreeText);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = r#"{"id": "x", "version": "1.0.0", "colour": "red"}"#;
        match parse_schema(text).unwrap_err() {
            SchemaError::Syntax { message, line, .. } => {
                assert!(message.contains("unknown field `colour`"), "{message}");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_location() {
        let err = parse_schema("{\n  \"id\": \"x\",\n  oops\n}").unwrap_err();
        assert!(
            matches!(err, SchemaError::Syntax { line: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn condition_syntax_error_names_site() {
        let text = r#"{"id": "x", "version": "1.0.0", "questions": [
            {"id": "a", "prompt": "?", "kind": "boolean"},
            {"id": "b", "prompt": "?", "kind": "boolean", "visible_when": "a =="}
        ]}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(
            matches!(&err, SchemaError::Condition { site, .. } if site == "question b visible_when"),
            "{err:?}"
        );
    }

    #[test]
    fn forward_reference_fails_parse() {
        let text = r#"{"id": "x", "version": "1.0.0", "questions": [
            {"id": "first", "prompt": "?", "kind": "boolean", "visible_when": "second == \"true\""},
            {"id": "second", "prompt": "?", "kind": "boolean"}
        ]}"#;
        let SchemaError::Invalid(diags) = parse_schema(text).unwrap_err() else {
            panic!("expected diagnostics");
        };
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("first") && diags[0].message.contains("second"));
    }
}
