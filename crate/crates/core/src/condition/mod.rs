//! Boolean branching language shared by question visibility and rule triggers.
//!
//! ```text
//! expr    := or
//! or      := and { "or" and }
//! and     := unary { "and" unary }
//! unary   := "not" unary | primary
//! primary := "(" expr ")"
//!          | "answered" "(" qid ")"
//!          | "includes" "(" qid "," string ")"
//!          | qid ("==" | "!=") string
//!          | qid "includes" string
//! ```

mod parser;

use std::collections::BTreeSet;
use std::fmt;

use crate::answer::Answers;

pub use parser::{parse_condition, ConditionError};

/// Byte range of a leaf inside the condition text it was parsed from.
///
/// Spans never participate in equality, so a printed-then-reparsed tree
/// compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

/// A question reference inside a condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionRef {
    pub id: String,
    pub span: Span,
}

impl QuestionRef {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Or(Vec<Condition>),
    And(Vec<Condition>),
    Not(Box<Condition>),
    Eq(QuestionRef, String),
    Neq(QuestionRef, String),
    Includes(QuestionRef, String),
    Answered(QuestionRef),
}

impl Condition {
    pub fn eq(question: &str, value: &str) -> Self {
        Condition::Eq(QuestionRef::new(question), value.to_owned())
    }

    pub fn neq(question: &str, value: &str) -> Self {
        Condition::Neq(QuestionRef::new(question), value.to_owned())
    }

    pub fn includes(question: &str, option: &str) -> Self {
        Condition::Includes(QuestionRef::new(question), option.to_owned())
    }

    pub fn answered(question: &str) -> Self {
        Condition::Answered(QuestionRef::new(question))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Condition) -> Self {
        Condition::Not(Box::new(inner))
    }

    /// Evaluates against an answer map.
    ///
    /// A leaf that references an unanswered question is always false,
    /// including `!=`: absence never counts as evidence.
    pub fn evaluate(&self, answers: &Answers) -> bool {
        match self {
            Condition::Or(children) => children.iter().any(|c| c.evaluate(answers)),
            Condition::And(children) => children.iter().all(|c| c.evaluate(answers)),
            Condition::Not(inner) => !inner.evaluate(answers),
            Condition::Eq(q, value) => answers
                .get(&q.id)
                .and_then(|a| a.scalar())
                .is_some_and(|v| v == value),
            Condition::Neq(q, value) => answers
                .get(&q.id)
                .and_then(|a| a.scalar())
                .is_some_and(|v| v != value),
            Condition::Includes(q, option) => {
                answers.get(&q.id).is_some_and(|a| a.includes(option))
            }
            Condition::Answered(q) => answers.contains_key(&q.id),
        }
    }

    /// Visits every leaf question reference in source order.
    pub fn for_each_ref<'a>(&'a self, f: &mut impl FnMut(&'a Condition, &'a QuestionRef)) {
        match self {
            Condition::Or(children) | Condition::And(children) => {
                children.iter().for_each(|c| c.for_each_ref(f))
            }
            Condition::Not(inner) => inner.for_each_ref(f),
            Condition::Eq(q, _)
            | Condition::Neq(q, _)
            | Condition::Includes(q, _)
            | Condition::Answered(q) => f(self, q),
        }
    }

    /// Ids of every question the condition reads.
    pub fn referenced_questions(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.for_each_ref(&mut |_, q| {
            out.insert(q.id.as_str());
        });
        out
    }
}

/// Writes the canonical text form. Parsing the output yields an equal tree.
impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print(self, f, Level::Or)
    }
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Or,
    And,
    Unary,
}

fn print(cond: &Condition, f: &mut fmt::Formatter<'_>, ctx: Level) -> fmt::Result {
    match cond {
        Condition::Or(children) => group(f, ctx > Level::Or, |f| {
            join(children, " or ", Level::And, f)
        }),
        Condition::And(children) => group(f, ctx > Level::And, |f| {
            join(children, " and ", Level::Unary, f)
        }),
        Condition::Not(inner) => {
            f.write_str("not ")?;
            print(inner, f, Level::Unary)
        }
        Condition::Eq(q, v) => write!(f, "{} == \"{}\"", q.id, v),
        Condition::Neq(q, v) => write!(f, "{} != \"{}\"", q.id, v),
        Condition::Includes(q, v) => write!(f, "includes({}, \"{}\")", q.id, v),
        Condition::Answered(q) => write!(f, "answered({})", q.id),
    }
}

fn group(
    f: &mut fmt::Formatter<'_>,
    parens: bool,
    body: impl FnOnce(&mut fmt::Formatter<'_>) -> fmt::Result,
) -> fmt::Result {
    if parens {
        f.write_str("(")?;
        body(f)?;
        f.write_str(")")
    } else {
        body(f)
    }
}

fn join(
    children: &[Condition],
    sep: &str,
    level: Level,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    for (i, child) in children.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        // a nested node of the same kind must keep its parens to reparse identically
        let same_kind = matches!(
            (level, child),
            (Level::And, Condition::Or(_)) | (Level::Unary, Condition::And(_))
        );
        print(child, f, if same_kind { Level::Unary } else { level })?;
    }
    Ok(())
}
