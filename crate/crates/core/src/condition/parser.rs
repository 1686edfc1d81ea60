use thiserror::Error;

use super::{Condition, QuestionRef, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("empty condition")]
    Empty,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

impl ConditionError {
    pub fn offset(&self) -> usize {
        match self {
            ConditionError::Empty => 0,
            ConditionError::Syntax { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    EqEq,
    NotEq,
    Ident(String),
    Str(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::EqEq => "'=='".into(),
            Tok::NotEq => "'!='".into(),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Str(s) => format!("string \"{s}\""),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> ConditionError {
    ConditionError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>, ConditionError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'=' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::EqEq
            }
            b'!' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::NotEq
            }
            b'"' => {
                let close = text[i + 1..]
                    .find('"')
                    .ok_or_else(|| syntax(text.len(), "unterminated string"))?;
                let value = &text[i + 1..i + 1 + close];
                i += close + 2;
                Tok::Str(value.to_owned())
            }
            b'a'..=b'z' => {
                while i < bytes.len() && matches!(bytes[i], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_owned())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character {ch:?}")));
            }
        };
        out.push((tok, Span::new(start, i)));
    }
    Ok(out)
}

const KEYWORDS: &[&str] = &["and", "or", "not", "answered", "includes"];

/// Parses condition text into an AST. `and` binds tighter than `or`, `not`
/// tighter than both.
pub fn parse_condition(text: &str) -> Result<Condition, ConditionError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(ConditionError::Empty);
    }
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let cond = parser.or()?;
    if let Some((tok, span)) = parser.tokens.get(parser.pos) {
        return Err(syntax(span.start, format!("unexpected {}", tok.describe())));
    }
    Ok(cond)
}

struct Parser {
    tokens: Vec<(Tok, Span)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + n).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.end, |(_, span)| span.start)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn bump(&mut self) -> Option<(Tok, Span)> {
        let tok = self.tokens.get(self.pos).cloned();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self, wanted: &str) -> ConditionError {
        match self.peek() {
            Some(tok) => syntax(
                self.offset(),
                format!("expected {wanted}, found {}", tok.describe()),
            ),
            None => syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Span, ConditionError> {
        if self.peek() == Some(&want) {
            Ok(self.bump().expect("peeked").1)
        } else {
            Err(self.unexpected(&want.describe()))
        }
    }

    fn qid(&mut self) -> Result<QuestionRef, ConditionError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let (tok, span) = self.bump().expect("peeked");
                let Tok::Ident(id) = tok else { unreachable!() };
                Ok(QuestionRef { id, span })
            }
            _ => Err(self.unexpected("question id")),
        }
    }

    fn string(&mut self) -> Result<String, ConditionError> {
        match self.peek() {
            Some(Tok::Str(_)) => {
                let Some((Tok::Str(s), _)) = self.bump() else {
                    unreachable!()
                };
                Ok(s)
            }
            _ => Err(self.unexpected("string literal")),
        }
    }

    fn or(&mut self) -> Result<Condition, ConditionError> {
        let mut children = vec![self.and()?];
        while self.at_keyword("or") {
            self.bump();
            children.push(self.and()?);
        }
        Ok(collapse(children, Condition::Or))
    }

    fn and(&mut self) -> Result<Condition, ConditionError> {
        let mut children = vec![self.unary()?];
        while self.at_keyword("and") {
            self.bump();
            children.push(self.unary()?);
        }
        Ok(collapse(children, Condition::And))
    }

    fn unary(&mut self) -> Result<Condition, ConditionError> {
        if self.at_keyword("not") {
            self.bump();
            return Ok(Condition::Not(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Condition, ConditionError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.or()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Ident(kw)) if kw == "answered" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.bump();
                self.bump();
                let q = self.qid()?;
                self.expect(Tok::RParen)?;
                Ok(Condition::Answered(q))
            }
            Some(Tok::Ident(kw)) if kw == "includes" && self.peek_at(1) == Some(&Tok::LParen) => {
                self.bump();
                self.bump();
                let q = self.qid()?;
                self.expect(Tok::Comma)?;
                let option = self.string()?;
                self.expect(Tok::RParen)?;
                Ok(Condition::Includes(q, option))
            }
            Some(Tok::Ident(_)) => {
                let q = self.qid()?;
                match self.peek() {
                    Some(Tok::EqEq) => {
                        self.bump();
                        Ok(Condition::Eq(q, self.string()?))
                    }
                    Some(Tok::NotEq) => {
                        self.bump();
                        Ok(Condition::Neq(q, self.string()?))
                    }
                    Some(Tok::Ident(kw)) if kw == "includes" => {
                        self.bump();
                        Ok(Condition::Includes(q, self.string()?))
                    }
                    _ => Err(self.unexpected("'==', '!=' or 'includes'")),
                }
            }
            _ => Err(self.unexpected("condition")),
        }
    }
}

fn collapse(mut children: Vec<Condition>, wrap: fn(Vec<Condition>) -> Condition) -> Condition {
    if children.len() == 1 {
        children.pop().expect("one child")
    } else {
        wrap(children)
    }
}
