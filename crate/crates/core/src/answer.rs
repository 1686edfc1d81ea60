use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::schema::QuestionKind;

/// Answers keyed by question id.
pub type Answers = BTreeMap<String, AnswerValue>;

/// A stored answer. The variant must match the question kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    Single {
        option: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    Multi {
        options: BTreeSet<String>,
        /// Free text keyed by option id, only for options that allow it.
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        text: BTreeMap<String, String>,
    },
    Boolean(bool),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {expected} for a {kind} question")]
pub struct AnswerShapeError {
    pub kind: QuestionKind,
    pub expected: &'static str,
}

impl AnswerValue {
    pub fn single(option: &str) -> Self {
        AnswerValue::Single {
            option: option.to_owned(),
            text: None,
        }
    }

    pub fn single_with_text(option: &str, text: &str) -> Self {
        AnswerValue::Single {
            option: option.to_owned(),
            text: Some(text.to_owned()),
        }
    }

    pub fn multi<'a>(options: impl IntoIterator<Item = &'a str>) -> Self {
        AnswerValue::Multi {
            options: options.into_iter().map(str::to_owned).collect(),
            text: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> QuestionKind {
        match self {
            AnswerValue::Single { .. } => QuestionKind::SingleChoice,
            AnswerValue::Multi { .. } => QuestionKind::MultiChoice,
            AnswerValue::Boolean(_) => QuestionKind::Boolean,
            AnswerValue::Text(_) => QuestionKind::FreeText,
        }
    }

    /// The value `==` and `!=` compare against. Multi-choice answers have none.
    pub fn scalar(&self) -> Option<&str> {
        match self {
            AnswerValue::Single { option, .. } => Some(option),
            AnswerValue::Boolean(true) => Some("true"),
            AnswerValue::Boolean(false) => Some("false"),
            AnswerValue::Text(s) => Some(s),
            AnswerValue::Multi { .. } => None,
        }
    }

    pub fn includes(&self, option: &str) -> bool {
        matches!(self, AnswerValue::Multi { options, .. } if options.contains(option))
    }

    /// Decodes the compact wire form used by answer files and the HTTP API:
    /// a bare option id or `{"option", "text"}` for single choice, a list of
    /// ids or `{"options", "text": {id: text}}` for multi choice, a JSON
    /// boolean, or a string for free text.
    pub fn from_json(kind: QuestionKind, value: &Value) -> Result<Self, AnswerShapeError> {
        let err = |expected| AnswerShapeError { kind, expected };
        match kind {
            QuestionKind::SingleChoice => match value {
                Value::String(s) => Ok(AnswerValue::single(s)),
                Value::Object(map) => {
                    let option = map
                        .get("option")
                        .and_then(Value::as_str)
                        .ok_or_else(|| err("an option id or {\"option\", \"text\"}"))?;
                    let text = match map.get("text") {
                        None | Some(Value::Null) => None,
                        Some(Value::String(s)) => Some(s.clone()),
                        Some(_) => return Err(err("a string \"text\"")),
                    };
                    if map.keys().any(|k| k != "option" && k != "text") {
                        return Err(err("only \"option\" and \"text\" keys"));
                    }
                    Ok(AnswerValue::Single {
                        option: option.to_owned(),
                        text,
                    })
                }
                _ => Err(err("an option id or {\"option\", \"text\"}")),
            },
            QuestionKind::MultiChoice => {
                let ids = |v: &Value| -> Result<BTreeSet<String>, AnswerShapeError> {
                    v.as_array()
                        .ok_or_else(|| err("a list of option ids"))?
                        .iter()
                        .map(|o| {
                            o.as_str()
                                .map(str::to_owned)
                                .ok_or_else(|| err("option id strings"))
                        })
                        .collect()
                };
                match value {
                    Value::Array(_) => Ok(AnswerValue::Multi {
                        options: ids(value)?,
                        text: BTreeMap::new(),
                    }),
                    Value::Object(map) => {
                        let options = ids(map.get("options").unwrap_or(&Value::Null))?;
                        let mut text = BTreeMap::new();
                        match map.get("text") {
                            None | Some(Value::Null) => {}
                            Some(Value::Object(t)) => {
                                for (k, v) in t {
                                    let v =
                                        v.as_str().ok_or_else(|| err("string free-text values"))?;
                                    text.insert(k.clone(), v.to_owned());
                                }
                            }
                            Some(_) => return Err(err("a \"text\" object keyed by option id")),
                        }
                        if map.keys().any(|k| k != "options" && k != "text") {
                            return Err(err("only \"options\" and \"text\" keys"));
                        }
                        Ok(AnswerValue::Multi { options, text })
                    }
                    _ => Err(err("a list of option ids")),
                }
            }
            QuestionKind::Boolean => value
                .as_bool()
                .map(AnswerValue::Boolean)
                .ok_or_else(|| err("true or false")),
            QuestionKind::FreeText => value
                .as_str()
                .map(|s| AnswerValue::Text(s.to_owned()))
                .ok_or_else(|| err("a string")),
        }
    }

    /// Inverse of [`AnswerValue::from_json`], preferring the compact forms.
    pub fn to_json(&self) -> Value {
        match self {
            AnswerValue::Single { option, text: None } => json!(option),
            AnswerValue::Single {
                option,
                text: Some(t),
            } => json!({"option": option, "text": t}),
            AnswerValue::Multi { options, text } if text.is_empty() => json!(options),
            AnswerValue::Multi { options, text } => json!({"options": options, "text": text}),
            AnswerValue::Boolean(b) => json!(b),
            AnswerValue::Text(s) => json!(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_json_round_trips() {
        let cases = [
            AnswerValue::single("openml"),
            AnswerValue::single_with_text("other", "Hugging Face"),
            AnswerValue::multi(["data", "ml_models"]),
            AnswerValue::Multi {
                options: ["other".to_owned()].into(),
                text: [("other".to_owned(), "zarr".to_owned())].into(),
            },
            AnswerValue::Boolean(false),
            AnswerValue::Text(String::new()),
        ];
        for value in cases {
            let back = AnswerValue::from_json(value.kind(), &value.to_json()).unwrap();
            assert_eq!(back, value);
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = AnswerValue::from_json(QuestionKind::Boolean, &json!("yes")).unwrap_err();
        assert_eq!(err.kind, QuestionKind::Boolean);
        assert!(AnswerValue::from_json(QuestionKind::MultiChoice, &json!("data")).is_err());
        assert!(AnswerValue::from_json(QuestionKind::FreeText, &json!(3)).is_err());
        assert!(AnswerValue::from_json(
            QuestionKind::SingleChoice,
            &json!({"option": "a", "x": 1})
        )
        .is_err());
    }

    #[test]
    fn snapshot_form_is_tagged() {
        let v = serde_json::to_string(&AnswerValue::Boolean(true)).unwrap();
        assert_eq!(v, r#"{"type":"boolean","value":true}"#);
    }
}
