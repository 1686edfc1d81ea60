//! Byte-deterministic serializations of a [`RecommendationReport`].

mod json;
mod markdown;
mod ntriples;

use std::fmt;
use std::str::FromStr;

use crate::recommend::RecommendationReport;

pub use json::render_json;
pub use markdown::{render_markdown, render_markdown_long};
pub use ntriples::{escape_literal, render_ntriples, REPORT_IRI_PREFIX, VOCAB};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RenderFormat {
    Markdown,
    Json,
    NTriples,
}

impl RenderFormat {
    pub const ALL: [RenderFormat; 3] = [
        RenderFormat::Markdown,
        RenderFormat::Json,
        RenderFormat::NTriples,
    ];

    pub fn media_type(self) -> &'static str {
        match self {
            RenderFormat::Markdown => "text/markdown; charset=utf-8",
            RenderFormat::Json => "application/json",
            RenderFormat::NTriples => "application/n-triples",
        }
    }

    /// Short name used on the command line and in `?format=`.
    pub fn as_str(self) -> &'static str {
        match self {
            RenderFormat::Markdown => "md",
            RenderFormat::Json => "json",
            RenderFormat::NTriples => "nt",
        }
    }

    pub fn render(self, report: &RecommendationReport) -> String {
        match self {
            RenderFormat::Markdown => render_markdown(report),
            RenderFormat::Json => render_json(report),
            RenderFormat::NTriples => render_ntriples(report),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown format {0:?}, expected md, json or nt")]
pub struct UnknownFormat(pub String);

impl FromStr for RenderFormat {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(RenderFormat::Markdown),
            "json" => Ok(RenderFormat::Json),
            "nt" | "ntriples" => Ok(RenderFormat::NTriples),
            other => Err(UnknownFormat(other.to_owned())),
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use std::collections::{BTreeMap, BTreeSet};

    use crate::recommend::{Provenance, RecommendationReport, ResolvedFragment};
    use crate::schema::Dimension;
    use crate::token::Token;

    pub fn report(
        token: &str,
        types: &[&str],
        frags: &[(Dimension, &str)],
    ) -> RecommendationReport {
        let mut fragments: BTreeMap<Dimension, Vec<ResolvedFragment>> = BTreeMap::new();
        for (i, (dimension, text)) in frags.iter().enumerate() {
            fragments
                .entry(*dimension)
                .or_default()
                .push(ResolvedFragment {
                    dimension: *dimension,
                    text: (*text).to_owned(),
                    provenance: Provenance {
                        rule_id: format!("r{i}"),
                        emit_index: 0,
                    },
                    note: None,
                });
        }
        RecommendationReport {
            schema_id: "s".into(),
            schema_version: "1.0.0".into(),
            token: Token::parse(token).unwrap(),
            artifact_types: types.iter().map(|s| (*s).to_owned()).collect(),
            fragments,
            unresolved: BTreeSet::new(),
        }
    }

    pub const TOKEN: &str = "t0t0t0t0t0t0t0t0t0t0t0";
}
