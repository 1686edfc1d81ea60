use fairist_core::content_pack::BUILTIN_DOCUMENT;
use fairist_core::schema::parse_schema_unchecked;
use fairist_core::{builtin_schema, parse_schema, serialize_schema, validate_schema, Severity};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const KINDS: [&str; 4] = ["boolean", "single_choice", "multi_choice", "free_text"];
const DIMENSIONS: [&str; 5] = [
    "Findable",
    "Accessible",
    "Interoperable",
    "Reusable",
    "Reproducibility",
];

/// A leaf condition on question `i` that fits its kind.
fn leaf(rng: &mut impl Rng, i: usize, kind: &str) -> String {
    let o = rng.random_range(0..3);
    match kind {
        "boolean" => format!("q{i} == \"{}\"", rng.random_bool(0.5)),
        "single_choice" if rng.random_bool(0.5) => format!("q{i} == \"o{o}\""),
        "single_choice" => format!("q{i} != \"o{o}\""),
        "multi_choice" if rng.random_bool(0.5) => format!("includes(q{i}, \"o{o}\")"),
        "multi_choice" => format!("q{i} includes \"o{o}\""),
        _ => format!("answered(q{i})"),
    }
}

fn condition(rng: &mut impl Rng, kinds: &[&str], depth: u32) -> String {
    let i = rng.random_range(0..kinds.len());
    if depth == 0 || rng.random_bool(0.4) {
        return leaf(rng, i, kinds[i]);
    }
    let a = condition(rng, kinds, depth - 1);
    let b = condition(rng, kinds, depth - 1);
    match rng.random_range(0..3) {
        0 => format!("({a}) and ({b})"),
        1 => format!("({a}) or ({b})"),
        _ => format!("not ({a})"),
    }
}

/// An error-free schema document with backward-only visibility conditions.
fn random_document(rng: &mut impl Rng) -> Value {
    let n = rng.random_range(2..9);
    let mut kinds = vec!["free_text"];
    let mut questions =
        vec![json!({"id": "q0", "prompt": "Name?", "kind": "free_text", "binds": "p0"})];
    for i in 1..n {
        let kind = *KINDS.choose(rng).unwrap();
        let mut q =
            json!({"id": format!("q{i}"), "prompt": format!("Question {i}?"), "kind": kind});
        if kind.ends_with("choice") {
            q["options"] = json!([
                {"id": "o0", "label": "Zero"},
                {"id": "o1", "label": "One"},
                {"id": "o2", "label": "Other", "allows_free_text": true}
            ]);
        }
        if rng.random_bool(0.5) {
            q["visible_when"] = json!(condition(rng, &kinds, 2));
        }
        questions.push(q);
        kinds.push(kind);
    }
    let rules: Vec<Value> = (0..rng.random_range(0..6))
        .map(|r| {
            let emit: Vec<Value> = (0..rng.random_range(1..3))
                .map(|e| {
                    let mut f = json!({
                        "dimension": DIMENSIONS.choose(rng).unwrap(),
                        "template": format!("Rule {r} fragment {e} for {{p0}}."),
                        "weight": rng.random_range(-5..5),
                    });
                    if rng.random_bool(0.3) {
                        f["note"] = json!("see guidance");
                    }
                    f
                })
                .collect();
            json!({"id": format!("r{r}"), "when": condition(rng, &kinds, 2), "emit": emit})
        })
        .collect();
    json!({
        "id": "generated",
        "version": "0.1.0",
        "placeholders": ["p0"],
        "questions": questions,
        "rules": rules,
    })
}

#[test]
fn generated_documents_round_trip() {
    for seed in 0..300 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_document(&mut rng).to_string();
        let schema = parse_schema(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{text}"));
        let written = serialize_schema(&schema);
        let reparsed = parse_schema(&written).unwrap();
        assert_eq!(reparsed, schema, "seed {seed}");
        assert_eq!(serialize_schema(&reparsed), written);
        assert!(validate_schema(&schema)
            .iter()
            .all(|d| d.severity == Severity::Warning));
    }
}

#[test]
fn builtin_pack_round_trips() {
    let schema = builtin_schema();
    let written = serialize_schema(schema);
    assert_eq!(&parse_schema(&written).unwrap(), schema);
    assert_eq!(&parse_schema(BUILTIN_DOCUMENT).unwrap(), schema);
}

#[test]
fn unknown_keys_are_rejected() {
    let mut doc: Value = serde_json::from_str(BUILTIN_DOCUMENT).unwrap();
    doc["questions"][0]["hint"] = json!("typo");
    assert!(parse_schema_unchecked(&doc.to_string()).is_err());
}

#[test]
fn bad_condition_is_a_parse_failure() {
    let mut doc: Value = serde_json::from_str(BUILTIN_DOCUMENT).unwrap();
    doc["rules"][0]["when"] = json!("q_publication_venue ==");
    let err = parse_schema_unchecked(&doc.to_string()).unwrap_err();
    assert!(err.to_string().contains("posted_project_website"), "{err}");
}
