use std::collections::BTreeSet;
use std::fmt::Write;

use crate::recommend::RecommendationReport;

pub const VOCAB: &str = "urn:fairist:vocab#";
pub const REPORT_IRI_PREFIX: &str = "urn:fairist:report:";

/// N-Triples lines sorted bytewise. Fragment nodes are numbered by global
/// render order (dimension order, then position within the dimension).
pub fn render_ntriples(report: &RecommendationReport) -> String {
    let subject = format!("<{REPORT_IRI_PREFIX}{}>", report.token);
    let pred = |name: &str| format!("<{VOCAB}{name}>");
    let mut lines = BTreeSet::new();

    lines.insert(format!(
        "{subject} {} {}",
        pred("schemaVersion"),
        literal(&format!("{}@{}", report.schema_id, report.schema_version))
    ));
    for t in &report.artifact_types {
        lines.insert(format!("{subject} {} {}", pred("artifactType"), literal(t)));
    }
    for (k, fragment) in report.iter_fragments().enumerate() {
        let node = format!("<{REPORT_IRI_PREFIX}{}:frag:{k}>", report.token);
        lines.insert(format!("{subject} {} {node}", pred("hasFragment")));
        lines.insert(format!(
            "{node} {} {}",
            pred("dimension"),
            literal(fragment.dimension.as_str())
        ));
        lines.insert(format!(
            "{node} {} {}",
            pred("text"),
            literal(&fragment.text)
        ));
    }

    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push_str(" .\n");
    }
    out
}

fn literal(s: &str) -> String {
    format!("\"{}\"", escape_literal(s))
}

/// Escapes a string for an N-Triples quoted literal.
pub fn escape_literal(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}
