use std::fmt::Write;

use crate::recommend::RecommendationReport;

const TITLE: &str = "FAIRIST Recommendations";
const INTRO: &str = "The recommendations below were generated from your survey responses \
and are ready to review and adapt for your project's Data Management Plan.";
const TYPES_HEADING: &str = "Types of Data";
const TYPES_INTRO: &str = "Research objects planned for this project fall into these groups:";
const PRACTICES_HEADING: &str = "Data Stewardship Practices Planned";
const PRACTICES_INTRO: &str = "The table lists the stewardship actions planned for the project, \
grouped by FAIR dimension.";
const TABLE_HEADER: &str = "| FAIR Dimension | Research Data Stewardship Practices Planned |";
const CAPTION: &str = "Table 1: Data Stewardship Practices Planned by FAIR Dimension";

/// DMP-ready document with one table row per non-empty dimension. Cell
/// bullets are joined with `"; "`.
pub fn render_markdown(report: &RecommendationReport) -> String {
    let mut out = String::new();
    write_body(report, &mut out);
    out
}

/// [`render_markdown`] followed by a plain bulleted list per dimension.
pub fn render_markdown_long(report: &RecommendationReport) -> String {
    let mut out = String::new();
    write_body(report, &mut out);
    for (dimension, fragments) in &report.fragments {
        let _ = writeln!(out, "\n### {dimension}\n");
        for f in fragments {
            let _ = writeln!(out, "- {}", single_line(&f.text));
        }
    }
    out
}

fn write_body(report: &RecommendationReport, out: &mut String) {
    let _ = writeln!(
        out,
        "# {TITLE}\n\n{INTRO}\n\n## {TYPES_HEADING}\n\n{TYPES_INTRO}\n"
    );
    if report.artifact_types.is_empty() {
        out.push_str("None specified.\n");
    } else {
        for t in &report.artifact_types {
            let _ = writeln!(out, "- {}", single_line(t));
        }
    }
    let _ = writeln!(out, "\n## {PRACTICES_HEADING}\n\n{PRACTICES_INTRO}\n");
    let _ = writeln!(out, "{TABLE_HEADER}\n| --- | --- |");
    for (dimension, fragments) in &report.fragments {
        let cell = fragments
            .iter()
            .map(|f| format!("• {}", table_cell(&f.text)))
            .collect::<Vec<_>>()
            .join("; ");
        let _ = writeln!(out, "| {dimension} | {cell} |");
    }
    let _ = writeln!(out, "\n{CAPTION}");
}

fn single_line(text: &str) -> String {
    text.split(['\n', '\r']).collect::<Vec<_>>().join(" ")
}

fn table_cell(text: &str) -> String {
    single_line(text).replace('|', "\\|")
}
