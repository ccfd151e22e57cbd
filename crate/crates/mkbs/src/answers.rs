//! Answers files and the answer providers used by `mkbs consult`.
//!
//! An answers file holds one `attribute = value : cf` per line; `%` starts a
//! comment. The cf may also be written `yes` or `no`.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use mkbs_core::{parse_avpair, AVPair, Answer, AnswerProvider, CertaintyFactor, Question, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnswerScript {
    answers: BTreeMap<AVPair, CertaintyFactor>,
}

impl AnswerScript {
    pub fn parse(text: &str) -> Result<Self, ScriptError> {
        let mut answers = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = strip_comment(raw).trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| ScriptError { line, message };
            let (pair_src, cf_src) = split_cf(body)
                .ok_or_else(|| err("expected `attribute = value : cf`".into()))?;
            let pair = parse_avpair(pair_src).map_err(|diags| {
                err(diags.first().map_or_else(|| "bad answer".into(), |d| d.message.clone()))
            })?;
            let cf = parse_cf(cf_src.trim())
                .ok_or_else(|| err(format!("`{}` is not yes, no, or a number in [0, 1]", cf_src.trim())))?;
            if answers.insert(pair.clone(), cf).is_some() {
                return Err(err(format!("`{pair}` answered twice")));
            }
        }
        Ok(AnswerScript { answers })
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn insert(&mut self, pair: AVPair, cf: CertaintyFactor) {
        self.answers.insert(pair, cf);
    }

    /// The scripted answer to `question`, if any. For a menu askable a line
    /// naming any menu value of the attribute counts as the pick.
    pub fn lookup(&self, question: &Question) -> Option<Answer> {
        let pair = &question.avpair;
        if let Some(menu) = &question.menu {
            let pick = menu.iter().find_map(|v| {
                let candidate = AVPair::new(pair.attribute.clone(), v.clone());
                self.answers.get(&candidate).map(|cf| (v.clone(), *cf))
            });
            if let Some((value, cf)) = pick {
                return Some(Answer::choose(value, cf));
            }
        }
        self.answers.get(pair).map(|cf| Answer::with_cf(*cf))
    }
}

fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            '%' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Splits at the last `:` outside quotes.
fn split_cf(body: &str) -> Option<(&str, &str)> {
    let mut quoted = false;
    let mut escaped = false;
    let mut at = None;
    for (i, c) in body.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            ':' if !quoted => at = Some(i),
            _ => {}
        }
    }
    at.map(|i| (&body[..i], &body[i + 1..]))
}

/// `yes`, `no`, or a number in [0, 1].
pub fn parse_cf(text: &str) -> Option<CertaintyFactor> {
    match text.to_ascii_lowercase().as_str() {
        "yes" | "y" => Some(CertaintyFactor::TRUE),
        "no" | "n" => Some(CertaintyFactor::FALSE),
        other => other.parse::<f64>().ok().and_then(|v| CertaintyFactor::new(v).ok()),
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("no answer for `{0}` in the answers file")]
pub struct Unanswered(pub AVPair);

/// Batch mode: every question must be in the script.
#[derive(Debug, Clone, Copy)]
pub struct Strict<'a>(pub &'a AnswerScript);

impl AnswerProvider for Strict<'_> {
    type Error = Unanswered;

    fn answer(&mut self, question: &Question) -> Result<Answer, Unanswered> {
        self.0.lookup(question).ok_or_else(|| Unanswered(question.avpair.clone()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TerminalError {
    #[error("terminal: {0}")]
    Io(#[from] io::Error),
    #[error("input ended while asking about `{0}`")]
    Eof(AVPair),
}

/// Asks on a terminal (or any reader/writer pair), re-prompting until the
/// reply is `yes`, `no`, or a number in [0, 1]. Menu askables also accept a
/// menu value, optionally followed by a cf.
pub struct Terminal<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> Terminal<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Terminal { input, output }
    }
}

impl<R: BufRead, W: Write> AnswerProvider for Terminal<R, W> {
    type Error = TerminalError;

    fn answer(&mut self, question: &Question) -> Result<Answer, TerminalError> {
        if let Some(menu) = &question.menu {
            let names: Vec<String> = menu.iter().map(ToString::to_string).collect();
            writeln!(self.output, "options: {}", names.join(", "))?;
        }
        loop {
            write!(self.output, "{} [yes/no/0..1] > ", question.prompt)?;
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Err(TerminalError::Eof(question.avpair.clone()));
            }
            if let Some(answer) = parse_reply(line.trim(), question.menu.as_deref()) {
                return Ok(answer);
            }
        }
    }
}

pub fn parse_reply(reply: &str, menu: Option<&[Value]>) -> Option<Answer> {
    if let Some(cf) = parse_cf(reply) {
        return Some(Answer::with_cf(cf));
    }
    let menu = menu?;
    let mut words = reply.split_whitespace();
    let pick = words.next()?;
    let cf = match words.next() {
        Some(w) => parse_cf(w)?,
        None => CertaintyFactor::TRUE,
    };
    if words.next().is_some() {
        return None;
    }
    let value = menu.iter().find(|v| v.text() == pick)?;
    Some(Answer::choose(value.clone(), cf))
}

/// Script first; anything the script does not cover goes to `fallback`.
pub struct FallThrough<'a, P> {
    pub script: &'a AnswerScript,
    pub fallback: P,
}

impl<P: AnswerProvider> AnswerProvider for FallThrough<'_, P> {
    type Error = P::Error;

    fn answer(&mut self, question: &Question) -> Result<Answer, P::Error> {
        match self.script.lookup(question) {
            Some(a) => Ok(a),
            None => self.fallback.answer(question),
        }
    }
}
