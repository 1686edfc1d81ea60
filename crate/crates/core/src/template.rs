//! `{name}` placeholder scanning and substitution for recommendation templates.

use std::collections::{BTreeMap, BTreeSet};

use crate::schema::is_identifier;

/// A placeholder occurrence: byte range of the whole `{name}` marker and the name.
fn markers(template: &str) -> impl Iterator<Item = (usize, usize, &str)> {
    let mut from = 0;
    std::iter::from_fn(move || {
        while let Some(rel) = template[from..].find('{') {
            let open = from + rel;
            let Some(close_rel) = template[open + 1..].find(['}', '{']) else {
                from = template.len();
                return None;
            };
            let close = open + 1 + close_rel;
            let name = &template[open + 1..close];
            if template.as_bytes()[close] == b'}' && is_identifier(name) {
                from = close + 1;
                return Some((open, close + 1, name));
            }
            from = open + 1;
        }
        None
    })
}

/// Placeholder names referenced by a template, in order of first appearance.
pub fn placeholders_in(template: &str) -> Vec<&str> {
    let mut seen = BTreeSet::new();
    markers(template)
        .map(|(_, _, name)| name)
        .filter(|name| seen.insert(*name))
        .collect()
}

/// Replaces each `{name}` with its binding. Missing or empty bindings render
/// as `<name>` and are reported back as unresolved.
pub fn substitute_placeholders(
    template: &str,
    bindings: &BTreeMap<String, String>,
) -> (String, BTreeSet<String>) {
    let mut out = String::with_capacity(template.len());
    let mut unresolved = BTreeSet::new();
    let mut last = 0;
    for (start, end, name) in markers(template) {
        out.push_str(&template[last..start]);
        match bindings.get(name).filter(|v| !v.is_empty()) {
            Some(value) => out.push_str(value),
            None => {
                out.push('<');
                out.push_str(name);
                out.push('>');
                unresolved.insert(name.to_owned());
            }
        }
        last = end;
    }
    out.push_str(&template[last..]);
    (out, unresolved)
}
