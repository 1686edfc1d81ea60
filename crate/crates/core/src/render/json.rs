use serde_json::{json, Map, Value};

use crate::recommend::RecommendationReport;

/// Canonical JSON: sorted keys, no insignificant whitespace, trailing LF.
pub fn render_json(report: &RecommendationReport) -> String {
    let mut dimensions = Map::new();
    for (dimension, fragments) in &report.fragments {
        let items = fragments
            .iter()
            .map(|f| {
                json!({
                    "text": f.text,
                    "rule_id": f.provenance.rule_id,
                    "emit_index": f.provenance.emit_index,
                })
            })
            .collect();
        dimensions.insert(dimension.as_str().to_owned(), Value::Array(items));
    }
    let doc = json!({
        "schema_id": report.schema_id,
        "schema_version": report.schema_version,
        "token": report.token.as_str(),
        "artifact_types": report.artifact_types,
        "dimensions": dimensions,
        "unresolved": report.unresolved,
    });
    // serde_json's Map is a BTreeMap here, so keys serialize sorted
    let mut out = serde_json::to_string(&doc).expect("report serializes");
    out.push('\n');
    out
}
