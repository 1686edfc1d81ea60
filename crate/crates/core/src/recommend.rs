//! Turns a completed answer set into DMP-ready sentences grouped by dimension.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::answer::{AnswerValue, Answers};
use crate::schema::{Dimension, Question, SurveySchema};
use crate::session::{Session, SessionError};
use crate::template::substitute_placeholders;
use crate::token::Token;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationReport {
    pub schema_id: String,
    pub schema_version: String,
    pub token: Token,
    /// Display labels of the artifact-types answer, in option order.
    pub artifact_types: Vec<String>,
    /// Only dimensions with at least one fragment are present.
    pub fragments: BTreeMap<Dimension, Vec<ResolvedFragment>>,
    /// Placeholders rendered as `<name>`.
    pub unresolved: BTreeSet<String>,
}

impl RecommendationReport {
    pub fn fragment_count(&self) -> usize {
        self.fragments.values().map(Vec::len).sum()
    }

    /// Fragments in render order: dimension order, then bucket order.
    pub fn iter_fragments(&self) -> impl Iterator<Item = &ResolvedFragment> {
        self.fragments.values().flatten()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedFragment {
    pub dimension: Dimension,
    pub text: String,
    pub provenance: Provenance,
    pub note: Option<String>,
}

/// The rule emission a fragment came from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Provenance {
    pub rule_id: String,
    pub emit_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecommendError {
    #[error("session is not complete")]
    NotComplete,
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Fires every rule whose condition holds for the completed session.
pub fn apply_rules(
    schema: &SurveySchema,
    session: &Session,
) -> Result<RecommendationReport, RecommendError> {
    session.check_schema(schema)?;
    if !session.is_complete() {
        return Err(RecommendError::NotComplete);
    }
    Ok(build_report(
        schema,
        &session.answers,
        session.token.clone(),
    ))
}

/// Rule evaluation without the session-state checks of [`apply_rules`].
pub fn build_report(
    schema: &SurveySchema,
    answers: &Answers,
    token: Token,
) -> RecommendationReport {
    let bindings = bindings(schema, answers);

    struct Candidate {
        key: (i64, usize, usize),
        fragment: ResolvedFragment,
        unresolved: BTreeSet<String>,
    }
    let mut buckets: BTreeMap<Dimension, Vec<Candidate>> = BTreeMap::new();
    for (rule_index, rule) in schema.rules.iter().enumerate() {
        if !rule.when.evaluate(answers) {
            continue;
        }
        for (emit_index, emit) in rule.emit.iter().enumerate() {
            let (text, unresolved) = substitute_placeholders(&emit.template, &bindings);
            buckets.entry(emit.dimension).or_default().push(Candidate {
                key: (emit.weight, rule_index, emit_index),
                fragment: ResolvedFragment {
                    dimension: emit.dimension,
                    text,
                    provenance: Provenance {
                        rule_id: rule.id.clone(),
                        emit_index,
                    },
                    note: emit.note.clone(),
                },
                unresolved,
            });
        }
    }

    let mut fragments = BTreeMap::new();
    let mut unresolved = BTreeSet::new();
    for (dimension, mut candidates) in buckets {
        candidates.sort_by_key(|c| c.key);
        let mut seen = HashSet::new();
        let kept: Vec<ResolvedFragment> = candidates
            .into_iter()
            .filter(|c| seen.insert(c.fragment.text.clone()))
            .map(|c| {
                unresolved.extend(c.unresolved);
                c.fragment
            })
            .collect();
        fragments.insert(dimension, kept);
    }

    let artifact_types = schema
        .artifact_types_question()
        .and_then(|q| answers.get(&q.id).map(|a| display_items(q, a)))
        .unwrap_or_default();

    RecommendationReport {
        schema_id: schema.id.clone(),
        schema_version: schema.version.clone(),
        token,
        artifact_types,
        fragments,
        unresolved,
    }
}

/// Placeholder values from question `binds`. Option labels stand in for ids;
/// free text entered for an "other" option replaces its label. When several
/// answered questions bind one name, the earliest declared wins.
pub fn bindings(schema: &SurveySchema, answers: &Answers) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for q in &schema.questions {
        let (Some(name), Some(answer)) = (&q.binds, answers.get(&q.id)) else {
            continue;
        };
        out.entry(name.clone())
            .or_insert_with(|| display_items(q, answer).join(", "));
    }
    out
}

fn display_items(q: &Question, answer: &AnswerValue) -> Vec<String> {
    let label = |id: &str, text: Option<&String>| -> String {
        match text.filter(|t| !t.trim().is_empty()) {
            Some(t) => t.clone(),
            None => q
                .option(id)
                .map_or_else(|| id.to_owned(), |o| o.label.clone()),
        }
    };
    match answer {
        AnswerValue::Single { option, text } => vec![label(option, text.as_ref())],
        AnswerValue::Multi { options, text } => q
            .options
            .iter()
            .filter(|o| options.contains(&o.id))
            .map(|o| label(&o.id, text.get(&o.id)))
            .collect(),
        AnswerValue::Boolean(b) => vec![if *b { "yes" } else { "no" }.to_owned()],
        AnswerValue::Text(s) => vec![s.clone()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::parse_schema;

    fn schema() -> SurveySchema {
        parse_schema(
            r#"{"id": "t", "version": "1.0.0", "placeholders": ["artifact_types", "venue", "name"],
            "questions": [
                {"id": "types", "prompt": "?", "kind": "multi_choice", "binds": "artifact_types",
                 "options": [{"id": "data", "label": "Data"}, {"id": "ml", "label": "(Machine Learning) Models"},
                             {"id": "other", "label": "Other", "allows_free_text": true}]},
                {"id": "venue", "prompt": "?", "kind": "single_choice", "binds": "venue",
                 "options": [{"id": "openml", "label": "OpenML.org"},
                             {"id": "other", "label": "Other", "allows_free_text": true}]},
                {"id": "name", "prompt": "?", "kind": "free_text", "binds": "name"}
            ],
            "rules": [
                {"id": "late", "when": "answered(types)", "emit": [
                    {"dimension": "Findable", "template": "Second.", "weight": 20},
                    {"dimension": "Reusable", "template": "Deposited at {venue}.", "weight": 10}]},
                {"id": "early", "when": "answered(types)", "emit": [
                    {"dimension": "Findable", "template": "First for {name}.", "weight": 10},
                    {"dimension": "Findable", "template": "Second.", "weight": 20}]},
                {"id": "never", "when": "venue == \"other\"", "emit": [
                    {"dimension": "Accessible", "template": "Other venue."}]}
            ]}"#,
        )
        .unwrap()
    }

    fn answers(pairs: &[(&str, AnswerValue)]) -> Answers {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn sorted_deduped_and_substituted() {
        let s = schema();
        let a = answers(&[
            ("types", AnswerValue::multi(["ml", "data"])),
            ("venue", AnswerValue::single("openml")),
            ("name", AnswerValue::Text(String::new())),
        ]);
        let report = build_report(&s, &a, Token::from_bytes([0; 16]));
        let findable: Vec<_> = report.fragments[&Dimension::Findable]
            .iter()
            .map(|f| {
                (
                    f.text.as_str(),
                    f.provenance.rule_id.as_str(),
                    f.provenance.emit_index,
                )
            })
            .collect();
        assert_eq!(
            findable,
            vec![("First for <name>.", "early", 0), ("Second.", "late", 0)]
        );
        assert_eq!(
            report.fragments[&Dimension::Reusable][0].text,
            "Deposited at OpenML.org."
        );
        assert!(!report.fragments.contains_key(&Dimension::Accessible));
        assert_eq!(report.unresolved, BTreeSet::from(["name".to_owned()]));
        assert_eq!(
            report.artifact_types,
            vec!["Data", "(Machine Learning) Models"]
        );
    }

    #[test]
    fn free_text_replaces_other_label() {
        let s = schema();
        let a = answers(&[
            (
                "types",
                AnswerValue::Multi {
                    options: ["data".to_owned(), "other".to_owned()].into(),
                    text: [("other".to_owned(), "Corpora".to_owned())].into(),
                },
            ),
            (
                "venue",
                AnswerValue::single_with_text("other", "Hugging Face"),
            ),
        ]);
        let report = build_report(&s, &a, Token::from_bytes([0; 16]));
        assert_eq!(report.artifact_types, vec!["Data", "Corpora"]);
        assert_eq!(
            report.fragments[&Dimension::Reusable][0].text,
            "Deposited at Hugging Face."
        );
        assert_eq!(
            report.fragments[&Dimension::Accessible][0].text,
            "Other venue."
        );
    }

    #[test]
    fn nothing_fires_on_empty_answers() {
        let report = build_report(&schema(), &Answers::new(), Token::from_bytes([0; 16]));
        assert_eq!(report.fragment_count(), 0);
        assert!(report.artifact_types.is_empty());
        assert!(report.unresolved.is_empty());
    }

    #[test]
    fn requires_complete_session() {
        let s = schema();
        let session = Session::start(&s, Token::mint()).unwrap();
        assert_eq!(apply_rules(&s, &session), Err(RecommendError::NotComplete));
    }
}
