#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use chrono::{TimeZone, Utc};
use fairist_core::content_pack::TABLE2_ANSWERS;
use fairist_core::{
    AnswerValue, BatchAnswersFile, Next, Question, QuestionKind, Session, SurveySchema, Token,
};
use rand::seq::IndexedRandom;
use rand::Rng;

pub fn fixed_token(n: u8) -> Token {
    Token::from_bytes([n; 16])
}

pub fn fresh(schema: &SurveySchema) -> Session {
    let at = Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap();
    Session::start_at(schema, fixed_token(7), at).unwrap()
}

/// A well-typed answer for `question`.
pub fn random_value(rng: &mut impl Rng, question: &Question) -> AnswerValue {
    match question.kind {
        QuestionKind::SingleChoice => {
            let option = question.options.choose(rng).unwrap();
            AnswerValue::Single {
                option: option.id.clone(),
                text: option
                    .allows_free_text
                    .then(|| format!("custom {}", rng.random_range(0..3))),
            }
        }
        QuestionKind::MultiChoice => {
            let mut options = BTreeSet::new();
            let mut text = BTreeMap::new();
            while options.is_empty() {
                for option in &question.options {
                    if rng.random_bool(0.4) {
                        options.insert(option.id.clone());
                        if option.allows_free_text {
                            text.insert(option.id.clone(), "custom".to_owned());
                        }
                    }
                }
            }
            AnswerValue::Multi { options, text }
        }
        QuestionKind::Boolean => AnswerValue::Boolean(rng.random()),
        QuestionKind::FreeText => AnswerValue::Text(format!("text {}", rng.random_range(0..5))),
    }
}

/// Answers questions in presentation order until the session completes.
pub fn random_complete(schema: &SurveySchema, rng: &mut impl Rng) -> Session {
    let mut session = fresh(schema);
    while let Next::Question(q) = session.next_question(schema) {
        let value = random_value(rng, q);
        session.submit_answer(schema, &q.id, value).unwrap();
    }
    session.complete(schema).unwrap();
    session
}

pub fn table2_file() -> BatchAnswersFile {
    BatchAnswersFile::parse(TABLE2_ANSWERS).unwrap()
}

pub fn table2_session(schema: &SurveySchema) -> Session {
    table2_file().replay(schema, fixed_token(1)).unwrap()
}

/// Visible-answers fixpoint computed by repeated sweeps, independent of the
/// engine's single forward pass.
pub fn fixpoint(schema: &SurveySchema, answers: &fairist_core::Answers) -> fairist_core::Answers {
    let mut current = answers.clone();
    loop {
        let before = current.len();
        let snapshot = current.clone();
        current.retain(|id, _| {
            let q = schema.question(id).unwrap();
            q.visible_when
                .as_ref()
                .is_none_or(|c| c.evaluate(&snapshot))
        });
        if current.len() == before {
            return current;
        }
    }
}
