//! Workloads shared by the criterion benches.

use fairist_core::content_pack::TABLE2_ANSWERS;
use fairist_core::{builtin_schema, BatchAnswersFile, Session, Token};

/// The reference answers replayed to a completed session.
pub fn table2_session() -> Session {
    BatchAnswersFile::parse(TABLE2_ANSWERS)
        .expect("fixture parses")
        .replay(builtin_schema(), Token::from_bytes([1; 16]))
        .expect("fixture replays")
}

/// A schema document with `questions` boolean questions, each after the
/// first visible only when an earlier one is answered true, and `rules`
/// rules over pairs of questions. Deterministic for given sizes.
pub fn synthetic_document(questions: usize, rules: usize) -> String {
    let dims = [
        "Findable",
        "Accessible",
        "Interoperable",
        "Reusable",
        "Reproducibility",
    ];
    let mut qs = Vec::with_capacity(questions);
    for i in 0..questions {
        let visible = if i == 0 {
            String::new()
        } else {
            format!(
                r#", "visible_when": "q{} == \"true\" or answered(q{})""#,
                (i * 7) % i,
                i - 1
            )
        };
        qs.push(format!(
            r#"{{"id": "q{i}", "prompt": "Flag {i}?", "kind": "boolean"{visible}}}"#
        ));
    }
    let mut rs = Vec::with_capacity(rules);
    for r in 0..rules {
        let a = (r * 3) % questions;
        let b = (r * 5 + 1) % questions;
        rs.push(format!(
            r#"{{"id": "r{r}", "when": "q{a} == \"true\" and not q{b} == \"false\"", "emit": [{{"dimension": "{}", "template": "Practice {r}.", "weight": {}}}]}}"#,
            dims[r % dims.len()],
            r % 4
        ));
    }
    format!(
        r#"{{"id": "synthetic", "version": "1.0.0", "questions": [{}], "rules": [{}]}}"#,
        qs.join(", "),
        rs.join(", ")
    )
}
