//! Survey-and-recommendation engine for FAIR data stewardship planning.
//!
//! A [`SurveySchema`] declares questions, backward-only visibility
//! conditions and rules. A [`Session`] walks one researcher through the
//! visible questions; [`apply_rules`] turns the finished answers into a
//! [`RecommendationReport`], which [`render`] serializes as Markdown,
//! canonical JSON or N-Triples.

pub mod answer;
pub mod batch;
pub mod condition;
pub mod content_pack;
pub mod recommend;
pub mod render;
pub mod schema;
pub mod session;
pub mod store;
pub mod template;
pub mod token;

pub use answer::{AnswerValue, Answers};
pub use batch::{BatchAnswersFile, BatchError};
pub use condition::{parse_condition, Condition, ConditionError};
pub use content_pack::builtin_schema;
pub use recommend::{
    apply_rules, build_report, RecommendError, RecommendationReport, ResolvedFragment,
};
pub use render::{render_json, render_markdown, render_ntriples, RenderFormat};
pub use schema::{
    parse_schema, serialize_schema, validate_schema, Diagnostic, DiagnosticCode, Dimension,
    Question, QuestionKind, SchemaError, Severity, SurveySchema,
};
pub use session::{Next, Session, SessionError, SessionStatus};
pub use store::{SessionStore, StoreError};
pub use template::substitute_placeholders;
pub use token::Token;
