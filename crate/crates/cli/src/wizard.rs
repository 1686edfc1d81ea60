//! Numbered-prompt terminal wizard.
//!
//! Prompts go to the supplied writer (stderr in the binary) so that stdout
//! carries only report bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};

use fairist_core::schema::AnswerOption;
use fairist_core::{AnswerValue, Next, Question, QuestionKind, Session, SurveySchema, Token};

pub enum WizardEnd {
    Finished(Session),
    Aborted,
}

enum Input {
    Back,
    Answer(AnswerValue),
}

struct Terminal<R, W> {
    input: R,
    out: W,
}

impl<R: BufRead, W: Write> Terminal<R, W> {
    /// Next trimmed line, or `None` at end of input.
    fn line(&mut self, prompt: &str) -> io::Result<Option<String>> {
        write!(self.out, "{prompt}")?;
        self.out.flush()?;
        let mut buf = String::new();
        if self.input.read_line(&mut buf)? == 0 {
            writeln!(self.out)?;
            return Ok(None);
        }
        Ok(Some(buf.trim().to_owned()))
    }

    fn say(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "{text}")
    }
}

pub fn run<R: BufRead, W: Write>(schema: &SurveySchema, input: R, out: W) -> io::Result<WizardEnd> {
    let mut term = Terminal { input, out };
    let mut session = match Session::start(schema, Token::mint()) {
        Ok(s) => s,
        Err(e) => return Err(io::Error::other(e.to_string())),
    };
    let mut history: Vec<String> = Vec::new();

    loop {
        match session.next_question(schema) {
            Next::Question(question) => {
                let number = session.answers.len() + 1;
                match ask(&mut term, number, question)? {
                    None => return Ok(WizardEnd::Aborted),
                    Some(Input::Back) => go_back(&mut term, schema, &mut session, &mut history)?,
                    Some(Input::Answer(value)) => {
                        match session.submit_answer(schema, &question.id, value) {
                            Ok(()) => history.push(question.id.clone()),
                            Err(e) => term.say(&format!("  {e}"))?,
                        }
                    }
                }
            }
            Next::Complete => {
                term.say("All questions answered. Type \"done\" to write the report or \"back\" to change the last answer.")?;
                let Some(line) = term.line("> ")? else {
                    return Ok(WizardEnd::Aborted);
                };
                match line.to_ascii_lowercase().as_str() {
                    "done" => {
                        if let Err(e) = session.complete(schema) {
                            return Err(io::Error::other(e.to_string()));
                        }
                        return Ok(WizardEnd::Finished(session));
                    }
                    "back" => go_back(&mut term, schema, &mut session, &mut history)?,
                    _ => {}
                }
            }
        }
    }
}

fn go_back<R: BufRead, W: Write>(
    term: &mut Terminal<R, W>,
    schema: &SurveySchema,
    session: &mut Session,
    history: &mut Vec<String>,
) -> io::Result<()> {
    // entries may already be gone through cascade
    while let Some(id) = history.pop() {
        if session.answers.contains_key(&id) {
            if let Err(e) = session.retract_answer(schema, &id) {
                return Err(io::Error::other(e.to_string()));
            }
            return Ok(());
        }
    }
    term.say("  Nothing to go back to.")
}

fn ask<R: BufRead, W: Write>(
    term: &mut Terminal<R, W>,
    number: usize,
    question: &Question,
) -> io::Result<Option<Input>> {
    term.say(&format!("\n{number}. {}", question.prompt))?;
    for (i, option) in question.options.iter().enumerate() {
        term.say(&format!("  {}) {}", i + 1, option.label))?;
    }
    let hint = match question.kind {
        QuestionKind::SingleChoice => "Enter one number",
        QuestionKind::MultiChoice => "Enter one or more numbers separated by commas",
        QuestionKind::Boolean => "Enter y or n",
        QuestionKind::FreeText => "Enter text",
    };
    loop {
        let Some(line) = term.line(&format!("{hint} (or \"back\"): "))? else {
            return Ok(None);
        };
        if line.eq_ignore_ascii_case("back") {
            return Ok(Some(Input::Back));
        }
        let parsed = match question.kind {
            QuestionKind::SingleChoice => match choices(&line, &question.options) {
                Some(picked) if picked.len() == 1 => {
                    let option = picked[0];
                    let text = if option.allows_free_text {
                        let Some(t) = specify(term, option)? else {
                            return Ok(None);
                        };
                        Some(t)
                    } else {
                        None
                    };
                    Some(AnswerValue::Single {
                        option: option.id.clone(),
                        text,
                    })
                }
                _ => None,
            },
            QuestionKind::MultiChoice => match choices(&line, &question.options) {
                Some(picked) if !picked.is_empty() => {
                    let mut options = BTreeSet::new();
                    let mut text = BTreeMap::new();
                    for option in picked {
                        options.insert(option.id.clone());
                        if option.allows_free_text && !text.contains_key(&option.id) {
                            let Some(t) = specify(term, option)? else {
                                return Ok(None);
                            };
                            text.insert(option.id.clone(), t);
                        }
                    }
                    Some(AnswerValue::Multi { options, text })
                }
                _ => None,
            },
            QuestionKind::Boolean => match line.to_ascii_lowercase().as_str() {
                "y" | "yes" => Some(AnswerValue::Boolean(true)),
                "n" | "no" => Some(AnswerValue::Boolean(false)),
                _ => None,
            },
            QuestionKind::FreeText if !line.is_empty() => Some(AnswerValue::Text(line)),
            QuestionKind::FreeText => None,
        };
        match parsed {
            Some(value) => return Ok(Some(Input::Answer(value))),
            None => term.say("  Not understood, try again.")?,
        }
    }
}

fn specify<R: BufRead, W: Write>(
    term: &mut Terminal<R, W>,
    option: &AnswerOption,
) -> io::Result<Option<String>> {
    loop {
        let Some(text) = term.line(&format!("  {}, please specify: ", option.label))? else {
            return Ok(None);
        };
        if !text.is_empty() {
            return Ok(Some(text));
        }
    }
}

/// Parses "1, 3 4" into the matching options, rejecting out-of-range numbers.
fn choices<'q>(line: &str, options: &'q [AnswerOption]) -> Option<Vec<&'q AnswerOption>> {
    let mut picked: Vec<&AnswerOption> = Vec::new();
    for part in line
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|p| !p.is_empty())
    {
        let n: usize = part.parse().ok()?;
        let option = options.get(n.checked_sub(1)?)?;
        if !picked.iter().any(|o| o.id == option.id) {
            picked.push(option);
        }
    }
    Some(picked)
}
