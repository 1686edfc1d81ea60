//! The built-in FAIRIST questionnaire.

use std::sync::OnceLock;

use crate::schema::{parse_schema, SurveySchema};

/// Schema document shipped with the binary.
pub const BUILTIN_DOCUMENT: &str = include_str!("../content/fairist-core.json");

/// Answers file reproducing the reference example output: data and ML
/// models, posted on the project website, open web folder, code on github,
/// HDF5, OpenML and CC-BY.
pub const TABLE2_ANSWERS: &str = include_str!("../fixtures/table2_answers.json");

pub const BUILTIN_ID: &str = "fairist-core";

/// The parsed, validated built-in pack.
pub fn builtin_schema() -> &'static SurveySchema {
    static PACK: OnceLock<SurveySchema> = OnceLock::new();
    PACK.get_or_init(|| match parse_schema(BUILTIN_DOCUMENT) {
        Ok(schema) => schema,
        Err(e) => panic!("built-in content pack is invalid: {e}"),
    })
}
