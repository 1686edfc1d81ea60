use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use super::{is_identifier, Question, QuestionKind, SurveySchema};
use crate::answer::{AnswerValue, Answers};
use crate::condition::Condition;
use crate::template::placeholders_in;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagnosticCode {
    InvalidId,
    InvalidVersion,
    DuplicateQuestion,
    DuplicateOption,
    DuplicateRule,
    DuplicatePlaceholder,
    MissingOptions,
    UnexpectedOptions,
    UnknownQuestion,
    UnknownOption,
    ForwardReference,
    KindMismatch,
    UndeclaredPlaceholder,
    EmptyEmit,
    EmptyTemplate,
    UnreachableQuestion,
    RuleNeverFires,
    UnboundPlaceholder,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::InvalidId => "invalid_id",
            DiagnosticCode::InvalidVersion => "invalid_version",
            DiagnosticCode::DuplicateQuestion => "duplicate_question",
            DiagnosticCode::DuplicateOption => "duplicate_option",
            DiagnosticCode::DuplicateRule => "duplicate_rule",
            DiagnosticCode::DuplicatePlaceholder => "duplicate_placeholder",
            DiagnosticCode::MissingOptions => "missing_options",
            DiagnosticCode::UnexpectedOptions => "unexpected_options",
            DiagnosticCode::UnknownQuestion => "unknown_question",
            DiagnosticCode::UnknownOption => "unknown_option",
            DiagnosticCode::ForwardReference => "forward_reference",
            DiagnosticCode::KindMismatch => "kind_mismatch",
            DiagnosticCode::UndeclaredPlaceholder => "undeclared_placeholder",
            DiagnosticCode::EmptyEmit => "empty_emit",
            DiagnosticCode::EmptyTemplate => "empty_template",
            DiagnosticCode::UnreachableQuestion => "unreachable_question",
            DiagnosticCode::RuleNeverFires => "rule_never_fires",
            DiagnosticCode::UnboundPlaceholder => "unbound_placeholder",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            DiagnosticCode::UnreachableQuestion
            | DiagnosticCode::RuleNeverFires
            | DiagnosticCode::UnboundPlaceholder => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

/// Where in the document a diagnostic points. Orders by declaration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Schema,
    Placeholder(usize),
    Question(usize),
    Rule(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub site: Site,
    /// Id of the question, rule or placeholder at `site`.
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let site = match self.site {
            Site::Schema => "schema".to_owned(),
            Site::Placeholder(_) => format!("placeholder {}", self.subject),
            Site::Question(_) => format!("question {}", self.subject),
            Site::Rule(_) => format!("rule {}", self.subject),
        };
        write!(
            f,
            "{level}[{}] {site}: {}",
            self.code.as_str(),
            self.message
        )
    }
}

const RESERVED: &[&str] = &["and", "or", "not", "answered", "includes"];

/// Upper bound on abstract answer combinations tried per condition before
/// the satisfiability check gives up and assumes the condition can hold.
const MAX_COMBINATIONS: usize = 1 << 16;

/// Checks every schema invariant and reports warnings for questions that can
/// never become visible, rules that can never fire and placeholders no
/// question binds. Output is sorted by (site, code, message).
pub fn validate_schema(schema: &SurveySchema) -> Vec<Diagnostic> {
    let mut v = Validator {
        schema,
        out: Vec::new(),
    };
    v.run();
    let mut out = v.out;
    out.sort_by(|a, b| (a.site, a.code, &a.message).cmp(&(b.site, b.code, &b.message)));
    out
}

struct Validator<'a> {
    schema: &'a SurveySchema,
    out: Vec<Diagnostic>,
}

impl<'a> Validator<'a> {
    fn push(&mut self, code: DiagnosticCode, site: Site, subject: &str, message: String) {
        self.out.push(Diagnostic {
            severity: code.severity(),
            code,
            site,
            subject: subject.to_owned(),
            message,
        });
    }

    fn run(&mut self) {
        let schema = self.schema;
        if schema.id.trim().is_empty() {
            self.push(
                DiagnosticCode::InvalidId,
                Site::Schema,
                &schema.id,
                "schema id is empty".into(),
            );
        }
        if !is_semver(&schema.version) {
            self.push(
                DiagnosticCode::InvalidVersion,
                Site::Schema,
                &schema.id,
                format!("version {:?} is not MAJOR.MINOR.PATCH", schema.version),
            );
        }

        let mut declared = HashSet::new();
        for (i, name) in schema.placeholders.iter().enumerate() {
            if !is_identifier(name) {
                self.push(
                    DiagnosticCode::InvalidId,
                    Site::Placeholder(i),
                    name,
                    format!("placeholder name {name:?} must match [a-z][a-z0-9_]*"),
                );
            }
            if !declared.insert(name.as_str()) {
                self.push(
                    DiagnosticCode::DuplicatePlaceholder,
                    Site::Placeholder(i),
                    name,
                    format!("placeholder {name} declared more than once"),
                );
            }
        }

        // first declaration wins for lookups
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, q) in schema.questions.iter().enumerate() {
            if index.contains_key(q.id.as_str()) {
                self.push(
                    DiagnosticCode::DuplicateQuestion,
                    Site::Question(i),
                    &q.id,
                    format!("question id {} already declared", q.id),
                );
            } else {
                index.insert(&q.id, i);
            }
        }

        for (i, q) in schema.questions.iter().enumerate() {
            self.check_question(i, q, &declared);
        }

        let mut condition_ok = vec![true; schema.questions.len()];
        for (i, q) in schema.questions.iter().enumerate() {
            if let Some(cond) = &q.visible_when {
                condition_ok[i] = self.check_refs(cond, Site::Question(i), &q.id, Some(i), &index);
            }
        }

        let mut rule_ids = HashSet::new();
        let mut rule_ok = vec![true; schema.rules.len()];
        for (i, rule) in schema.rules.iter().enumerate() {
            let site = Site::Rule(i);
            if !is_identifier(&rule.id) {
                self.push(
                    DiagnosticCode::InvalidId,
                    site,
                    &rule.id,
                    format!("rule id {:?} must match [a-z][a-z0-9_]*", rule.id),
                );
            }
            if !rule_ids.insert(rule.id.as_str()) {
                self.push(
                    DiagnosticCode::DuplicateRule,
                    site,
                    &rule.id,
                    format!("rule id {} already declared", rule.id),
                );
            }
            if rule.emit.is_empty() {
                self.push(
                    DiagnosticCode::EmptyEmit,
                    site,
                    &rule.id,
                    "rule emits no fragments".into(),
                );
            }
            for (k, fragment) in rule.emit.iter().enumerate() {
                if fragment.template.trim().is_empty() {
                    self.push(
                        DiagnosticCode::EmptyTemplate,
                        site,
                        &rule.id,
                        format!("emit[{k}] has an empty template"),
                    );
                }
                for name in placeholders_in(&fragment.template) {
                    if !declared.contains(name) {
                        self.push(
                            DiagnosticCode::UndeclaredPlaceholder,
                            site,
                            &rule.id,
                            format!("emit[{k}] uses undeclared placeholder {{{name}}}"),
                        );
                    }
                }
            }
            rule_ok[i] = self.check_refs(&rule.when, site, &rule.id, None, &index);
        }

        let bound: HashSet<&str> = schema
            .questions
            .iter()
            .filter_map(|q| q.binds.as_deref())
            .collect();
        for (i, name) in schema.placeholders.iter().enumerate() {
            if !bound.contains(name.as_str()) && schema.placeholders[..i].iter().all(|n| n != name)
            {
                self.push(
                    DiagnosticCode::UnboundPlaceholder,
                    Site::Placeholder(i),
                    name,
                    format!("no question binds placeholder {name}"),
                );
            }
        }

        // conditions with bad references are skipped and treated as satisfiable
        let mut reachable = vec![true; schema.questions.len()];
        for (i, q) in schema.questions.iter().enumerate() {
            let Some(cond) = &q.visible_when else {
                continue;
            };
            if !condition_ok[i] {
                continue;
            }
            if !satisfiable(cond, schema, &index, &reachable) {
                reachable[i] = false;
                self.push(
                    DiagnosticCode::UnreachableQuestion,
                    Site::Question(i),
                    &q.id,
                    format!("visible_when `{cond}` can never hold, question is unreachable"),
                );
            }
        }
        for (i, rule) in schema.rules.iter().enumerate() {
            if rule_ok[i] && !satisfiable(&rule.when, schema, &index, &reachable) {
                self.push(
                    DiagnosticCode::RuleNeverFires,
                    Site::Rule(i),
                    &rule.id,
                    format!("condition `{}` can never hold", rule.when),
                );
            }
        }
    }

    fn check_question(&mut self, i: usize, q: &Question, declared: &HashSet<&str>) {
        let site = Site::Question(i);
        if !is_identifier(&q.id) || RESERVED.contains(&q.id.as_str()) {
            self.push(
                DiagnosticCode::InvalidId,
                site,
                &q.id,
                format!(
                    "question id {:?} must match [a-z][a-z0-9_]* and not be a keyword",
                    q.id
                ),
            );
        }
        match (q.kind.has_options(), q.options.is_empty()) {
            (true, true) => self.push(
                DiagnosticCode::MissingOptions,
                site,
                &q.id,
                format!("{} question needs at least one option", q.kind),
            ),
            (false, false) => self.push(
                DiagnosticCode::UnexpectedOptions,
                site,
                &q.id,
                format!("{} question must not declare options", q.kind),
            ),
            _ => {}
        }
        let mut seen = HashSet::new();
        for option in &q.options {
            if !is_identifier(&option.id) {
                self.push(
                    DiagnosticCode::InvalidId,
                    site,
                    &q.id,
                    format!("option id {:?} must match [a-z][a-z0-9_]*", option.id),
                );
            }
            if !seen.insert(option.id.as_str()) {
                self.push(
                    DiagnosticCode::DuplicateOption,
                    site,
                    &q.id,
                    format!("option id {} appears more than once", option.id),
                );
            }
        }
        if let Some(name) = &q.binds {
            if !declared.contains(name.as_str()) {
                self.push(
                    DiagnosticCode::UndeclaredPlaceholder,
                    site,
                    &q.id,
                    format!("binds undeclared placeholder {name}"),
                );
            }
        }
    }

    /// Reports unknown, forward and ill-typed references. `owner` is the
    /// declaring question's index for visibility conditions.
    fn check_refs(
        &mut self,
        cond: &Condition,
        site: Site,
        subject: &str,
        owner: Option<usize>,
        index: &HashMap<&str, usize>,
    ) -> bool {
        let mut found = Vec::new();
        cond.for_each_ref(&mut |leaf, q| {
            let Some(&target) = index.get(q.id.as_str()) else {
                found.push((
                    DiagnosticCode::UnknownQuestion,
                    format!("references unknown question {} at offset {}", q.id, q.span.start),
                ));
                return;
            };
            if let Some(owner) = owner {
                if target >= owner {
                    found.push((
                        DiagnosticCode::ForwardReference,
                        format!(
                            "question {subject} references question {} which is not declared before it",
                            q.id
                        ),
                    ));
                    return;
                }
            }
            let question = &self.schema.questions[target];
            if let Some(problem) = leaf_problem(leaf, question) {
                found.push(problem);
            }
        });
        let ok = found.is_empty();
        for (code, message) in found {
            self.push(code, site, subject, message);
        }
        ok
    }
}

fn leaf_problem(leaf: &Condition, q: &Question) -> Option<(DiagnosticCode, String)> {
    match leaf {
        Condition::Includes(_, option) => {
            if q.kind != QuestionKind::MultiChoice {
                Some((
                    DiagnosticCode::KindMismatch,
                    format!(
                        "includes() needs a multi_choice question, {} is {}",
                        q.id, q.kind
                    ),
                ))
            } else if q.option(option).is_none() {
                Some((
                    DiagnosticCode::UnknownOption,
                    format!("question {} has no option {option:?}", q.id),
                ))
            } else {
                None
            }
        }
        Condition::Eq(_, value) | Condition::Neq(_, value) => match q.kind {
            QuestionKind::MultiChoice => Some((
                DiagnosticCode::KindMismatch,
                format!("compare multi_choice question {} with includes()", q.id),
            )),
            QuestionKind::SingleChoice if q.option(value).is_none() => Some((
                DiagnosticCode::UnknownOption,
                format!("question {} has no option {value:?}", q.id),
            )),
            QuestionKind::Boolean if value != "true" && value != "false" => Some((
                DiagnosticCode::UnknownOption,
                format!(
                    "boolean question {} compares against {value:?}, not \"true\"/\"false\"",
                    q.id
                ),
            )),
            _ => None,
        },
        _ => None,
    }
}

fn is_semver(v: &str) -> bool {
    let parts: Vec<&str> = v.split('.').collect();
    parts.len() == 3
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

/// Whether some answer map can make `cond` true. Each referenced question
/// ranges over "unanswered" plus the values it can actually hold; only
/// options the condition mentions are distinguished. Unreachable questions
/// can only be unanswered. Answer maps the engine can produce are a subset
/// of those enumerated, so `false` is a proof of unsatisfiability.
fn satisfiable(
    cond: &Condition,
    schema: &SurveySchema,
    index: &HashMap<&str, usize>,
    reachable: &[bool],
) -> bool {
    let mut mentioned: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    cond.for_each_ref(&mut |leaf, q| {
        let entry = mentioned.entry(q.id.as_str()).or_default();
        match leaf {
            Condition::Eq(_, v) | Condition::Neq(_, v) | Condition::Includes(_, v) => {
                entry.insert(v.as_str());
            }
            _ => {}
        }
    });

    let mut ids: Vec<&str> = mentioned.keys().copied().collect();
    ids.sort_unstable();
    let mut domains: Vec<Vec<Option<AnswerValue>>> = Vec::with_capacity(ids.len());
    let mut total: usize = 1;
    for id in &ids {
        let i = index[id];
        let q = &schema.questions[i];
        let mut domain = vec![None];
        if reachable[i] {
            domain.extend(value_domain(q, &mentioned[id]).into_iter().map(Some));
        }
        total = total.saturating_mul(domain.len());
        if total > MAX_COMBINATIONS {
            return true;
        }
        domains.push(domain);
    }

    let mut cursor = vec![0usize; domains.len()];
    loop {
        let answers: Answers = ids
            .iter()
            .zip(&cursor)
            .zip(&domains)
            .filter_map(|((id, &c), d)| d[c].clone().map(|v| (id.to_string(), v)))
            .collect();
        if cond.evaluate(&answers) {
            return true;
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == cursor.len() {
                return false;
            }
            cursor[k] += 1;
            if cursor[k] < domains[k].len() {
                break;
            }
            cursor[k] = 0;
            k += 1;
        }
    }
}

fn value_domain(q: &Question, mentioned: &BTreeSet<&str>) -> Vec<AnswerValue> {
    match q.kind {
        QuestionKind::SingleChoice => q
            .options
            .iter()
            .map(|o| AnswerValue::single(&o.id))
            .collect(),
        QuestionKind::Boolean => vec![AnswerValue::Boolean(true), AnswerValue::Boolean(false)],
        QuestionKind::FreeText => {
            let mut values: Vec<AnswerValue> = mentioned
                .iter()
                .map(|s| AnswerValue::Text((*s).to_owned()))
                .collect();
            // a string distinct from every literal
            let fresh = format!("{}#", mentioned.iter().copied().collect::<String>());
            values.push(AnswerValue::Text(fresh));
            values
        }
        QuestionKind::MultiChoice => {
            let mut atoms: Vec<&str> = q
                .options
                .iter()
                .map(|o| o.id.as_str())
                .filter(|id| mentioned.contains(id))
                .collect();
            if let Some(other) = q
                .options
                .iter()
                .find(|o| !mentioned.contains(o.id.as_str()))
            {
                atoms.push(&other.id);
            }
            let n = atoms.len().min(16);
            (1u32..(1u32 << n))
                .map(|mask| {
                    AnswerValue::multi(
                        atoms
                            .iter()
                            .enumerate()
                            .filter(|(b, _)| mask & (1 << b) != 0)
                            .map(|(_, id)| *id),
                    )
                })
                .collect()
        }
    }
}
