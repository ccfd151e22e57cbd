use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{AVPair, Askable, Goal, KnowledgeBase, Premise, Rule, Span, Triple, Value};
use super::diag::{code, Diagnostic};
use super::lexer::{lex, Tok, Token};
use super::validate::validate_kb;
use crate::cf::CertaintyFactor;

/// Parses `.mkb` source into a knowledge base.
///
/// Lexical, syntax, and validation errors all come back together, sorted by
/// location. Warnings alone do not fail the parse; run [`validate_kb`] to see them.
pub fn parse_kb(source: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(source);
    let mut parser = Parser { tokens: &tokens, pos: 0, end: end_span(source) };
    let mut kb = KnowledgeBase::default();
    parser.statements(&mut kb, &mut diags);

    if diags.is_empty() {
        diags = validate_kb(&kb);
    }
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(Diagnostic::sort_key);
        Err(diags)
    } else {
        Ok(kb)
    }
}

/// Parses source that must contain exactly one `rule` statement. Used by the
/// editor, where rules arrive one at a time. No KB-level validation is done.
pub fn parse_rule(source: &str) -> Result<Rule, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(source);
    let mut parser = Parser { tokens: &tokens, pos: 0, end: end_span(source) };
    let mut kb = KnowledgeBase::default();
    parser.statements(&mut kb, &mut diags);
    if !diags.is_empty() {
        diags.sort_by_key(Diagnostic::sort_key);
        return Err(diags);
    }
    let others = kb.askables.len() + kb.goals.len() + kb.triples.len();
    if kb.rules.len() != 1 || others != 0 {
        return Err(alloc::vec![Diagnostic::error(
            code::SYNTAX_ERROR,
            Some(Span::new(1, 1)),
            "expected exactly one rule statement",
        )]);
    }
    Ok(kb.rules.pop().expect("one rule"))
}

/// Parses a lone `attribute = value` pair, as found in answers files.
pub fn parse_avpair(source: &str) -> Result<AVPair, Vec<Diagnostic>> {
    let (tokens, mut diags) = lex(source);
    if !diags.is_empty() {
        diags.sort_by_key(Diagnostic::sort_key);
        return Err(diags);
    }
    let mut parser = Parser { tokens: &tokens, pos: 0, end: end_span(source) };
    let pair = parser.avpair().map_err(|d| alloc::vec![d])?;
    if parser.peek().is_some() {
        return Err(alloc::vec![parser.unexpected("end of input")]);
    }
    Ok(pair)
}

fn end_span(source: &str) -> Span {
    let line = source.split('\n').count() as u32;
    let col = source.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
    Span::new(line.max(1), col)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: Span,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        match self.peek() {
            Some(t) => Diagnostic::error(
                code::SYNTAX_ERROR,
                Some(t.span),
                format!("expected {expected}, found {}", t.tok.describe()),
            ),
            None => Diagnostic::error(
                code::SYNTAX_ERROR,
                Some(self.end),
                format!("expected {expected}, found end of input"),
            ),
        }
    }

    fn at_word(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Word(w), .. }) if w == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.at_word(kw) {
            Ok(self.next().expect("peeked").span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn punct(&mut self, p: Tok) -> PResult<Span> {
        match self.peek() {
            Some(t) if t.tok == p => {
                self.pos += 1;
                Ok(t.span)
            }
            _ => Err(self.unexpected(&p.describe())),
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token { tok: Tok::Word(w), span }) => {
                self.pos += 1;
                Ok((w.clone(), *span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn value(&mut self) -> PResult<Value> {
        let v = match self.peek().map(|t| &t.tok) {
            Some(Tok::Word(w)) => Value::Ident(w.clone()),
            Some(Tok::Str(s)) => Value::Str(s.clone()),
            Some(Tok::Num(n)) => Value::Num(n.clone()),
            _ => return Err(self.unexpected("a value")),
        };
        self.pos += 1;
        Ok(v)
    }

    /// Skips past the next `.` so parsing can resume at the following statement.
    fn recover(&mut self) {
        while let Some(t) = self.next() {
            if t.tok == Tok::Dot {
                break;
            }
        }
    }

    fn statements(&mut self, kb: &mut KnowledgeBase, diags: &mut Vec<Diagnostic>) {
        while let Some(tok) = self.peek() {
            let result = match &tok.tok {
                Tok::Word(w) if w == "rule" => self.rule(diags).map(|r| kb.rules.extend(r)),
                Tok::Word(w) if w == "askable" => self.askable().map(|a| kb.askables.push(a)),
                Tok::Word(w) if w == "goal" => self.goal().map(|g| kb.goals.push(g)),
                Tok::Word(w) if w == "net" => self.net().map(|t| kb.triples.push(t)),
                _ => Err(self.unexpected("`rule`, `askable`, `goal`, or `net`")),
            };
            if let Err(d) = result {
                diags.push(d);
                self.recover();
            }
        }
    }

    /// `rule ID : if PREMISE then AVPAIR cf NUMBER .`
    ///
    /// A rule with an out-of-range CF is reported and dropped (`Ok(None)`).
    fn rule(&mut self, diags: &mut Vec<Diagnostic>) -> PResult<Option<Rule>> {
        let span = self.keyword("rule")?;
        let (id, _) = self.ident("a rule id")?;
        self.punct(Tok::Colon)?;
        self.keyword("if")?;
        let premise = self.premise()?;
        self.keyword("then")?;
        let conclusion = self.avpair()?;
        self.keyword("cf")?;
        let (number, num_span) = match self.peek() {
            Some(Token { tok: Tok::Num(n), span }) => {
                self.pos += 1;
                (n.clone(), *span)
            }
            _ => return Err(self.unexpected("a certainty factor")),
        };
        self.punct(Tok::Dot)?;

        let cf = number
            .parse::<f64>()
            .ok()
            .and_then(|v| CertaintyFactor::new(v).ok());
        match cf {
            Some(cf) => Ok(Some(Rule { id, premise, conclusion, cf, span })),
            None => {
                diags.push(Diagnostic::error(
                    code::CF_RANGE,
                    Some(num_span),
                    format!("certainty factor {number} of rule `{id}` is outside [0, 1]"),
                ));
                Ok(None)
            }
        }
    }

    /// `or` binds looser than `and`.
    fn premise(&mut self) -> PResult<Premise> {
        let mut alternatives = alloc::vec![self.conjunction()?];
        while self.at_word("or") {
            self.pos += 1;
            alternatives.push(self.conjunction()?);
        }
        Ok(if alternatives.len() == 1 { alternatives.pop().expect("one") } else { Premise::Any(alternatives) })
    }

    fn conjunction(&mut self) -> PResult<Premise> {
        let mut conjuncts = alloc::vec![self.atom()?];
        while self.at_word("and") {
            self.pos += 1;
            conjuncts.push(self.atom()?);
        }
        Ok(if conjuncts.len() == 1 { conjuncts.pop().expect("one") } else { Premise::All(conjuncts) })
    }

    fn atom(&mut self) -> PResult<Premise> {
        if matches!(self.peek(), Some(Token { tok: Tok::LParen, .. })) {
            self.pos += 1;
            let inner = self.premise()?;
            self.punct(Tok::RParen)?;
            Ok(inner)
        } else {
            self.avpair().map(Premise::Test)
        }
    }

    fn avpair(&mut self) -> PResult<AVPair> {
        let (attribute, _) = self.ident("an attribute")?;
        self.punct(Tok::Eq)?;
        let value = self.value()?;
        Ok(AVPair { attribute, value })
    }

    /// `askable ATTR prompt "..." [menu ( v1 , v2 , ... )] .`
    fn askable(&mut self) -> PResult<Askable> {
        let span = self.keyword("askable")?;
        let (attribute, _) = self.ident("an attribute")?;
        self.keyword("prompt")?;
        let prompt = match self.peek() {
            Some(Token { tok: Tok::Str(s), .. }) => {
                self.pos += 1;
                s.clone()
            }
            _ => return Err(self.unexpected("a quoted prompt")),
        };
        let menu = if self.at_word("menu") {
            self.pos += 1;
            self.punct(Tok::LParen)?;
            let mut values = alloc::vec![self.value()?];
            while matches!(self.peek(), Some(Token { tok: Tok::Comma, .. })) {
                self.pos += 1;
                values.push(self.value()?);
            }
            self.punct(Tok::RParen)?;
            Some(values)
        } else {
            None
        };
        self.punct(Tok::Dot)?;
        Ok(Askable { attribute, prompt, menu, span })
    }

    /// `goal ATTR .`
    fn goal(&mut self) -> PResult<Goal> {
        let span = self.keyword("goal")?;
        let (attribute, _) = self.ident("an attribute")?;
        self.punct(Tok::Dot)?;
        Ok(Goal { attribute, span })
    }

    /// `net REL ( SUBJ , OBJ ) .`
    fn net(&mut self) -> PResult<Triple> {
        let span = self.keyword("net")?;
        let (relation, _) = self.ident("a relation")?;
        self.punct(Tok::LParen)?;
        let (subject, _) = self.ident("a subject")?;
        self.punct(Tok::Comma)?;
        let (object, _) = self.ident("an object")?;
        self.punct(Tok::RParen)?;
        self.punct(Tok::Dot)?;
        Ok(Triple { relation, subject, object, span })
    }
}
