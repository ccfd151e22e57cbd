use alloc::string::String;
use alloc::vec::Vec;

use super::ast::Span;
use super::diag::{code, Diagnostic};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Lowercase word; keywords are recognized by the parser from context.
    Word(String),
    Str(String),
    Num(String),
    Eq,
    Colon,
    Comma,
    LParen,
    RParen,
    Dot,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => alloc::format!("`{w}`"),
            Tok::Str(_) => "string".into(),
            Tok::Num(n) => alloc::format!("number `{n}`"),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }
}

/// Tokenizes the whole input. Bad characters are reported and skipped so that
/// one typo does not hide later problems.
pub(crate) fn lex(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: source.chars().peekable(), line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    while let Some(c) = cur.peek() {
        let span = cur.span();
        let tok = match c {
            c if c.is_whitespace() => {
                cur.bump();
                continue;
            }
            '%' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
                continue;
            }
            'a'..='z' => {
                let mut w = String::new();
                while let Some(c @ ('a'..='z' | '0'..='9' | '_')) = cur.peek() {
                    w.push(c);
                    cur.bump();
                }
                if let Some(c) = cur.peek().filter(|c| c.is_alphanumeric()) {
                    diags.push(Diagnostic::error(
                        code::LEX_ERROR,
                        Some(cur.span()),
                        alloc::format!("identifiers are lowercase snake_case, found `{c}`"),
                    ));
                    while cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                        cur.bump();
                    }
                }
                Tok::Word(w)
            }
            '0'..='9' | '-' => match lex_number(&mut cur) {
                Some(n) => Tok::Num(n),
                None => {
                    diags.push(Diagnostic::error(code::LEX_ERROR, Some(span), "malformed number"));
                    continue;
                }
            },
            '"' => {
                cur.bump();
                match lex_string(&mut cur) {
                    Ok(s) => Tok::Str(s),
                    Err(d) => {
                        diags.push(d.with_span(span));
                        continue;
                    }
                }
            }
            '=' | ':' | ',' | '(' | ')' | '.' => {
                cur.bump();
                match c {
                    '=' => Tok::Eq,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Dot,
                }
            }
            other => {
                cur.bump();
                diags.push(Diagnostic::error(
                    code::LEX_ERROR,
                    Some(span),
                    alloc::format!("unexpected character `{}`", other.escape_debug()),
                ));
                continue;
            }
        };
        tokens.push(Token { tok, span });
    }
    (tokens, diags)
}

/// `-?[0-9]+(\.[0-9]+)?`. A dot not followed by a digit is a statement terminator.
fn lex_number(cur: &mut Cursor<'_>) -> Option<String> {
    let mut n = String::new();
    if cur.peek() == Some('-') {
        n.push('-');
        cur.bump();
    }
    let mut int_digits = 0;
    while let Some(c @ '0'..='9') = cur.peek() {
        n.push(c);
        cur.bump();
        int_digits += 1;
    }
    if int_digits == 0 {
        return None;
    }
    if cur.peek() == Some('.') {
        let mut ahead = cur.chars.clone();
        ahead.next();
        if ahead.peek().is_some_and(|c| c.is_ascii_digit()) {
            n.push('.');
            cur.bump();
            while let Some(c @ '0'..='9') = cur.peek() {
                n.push(c);
                cur.bump();
            }
        }
    }
    Some(n)
}

struct Unterminated(&'static str);

impl Unterminated {
    fn with_span(self, span: Span) -> Diagnostic {
        Diagnostic::error(code::LEX_ERROR, Some(span), self.0)
    }
}

fn lex_string(cur: &mut Cursor<'_>) -> Result<String, Unterminated> {
    let mut s = String::new();
    loop {
        match cur.bump() {
            None | Some('\n') => return Err(Unterminated("unterminated string")),
            Some('"') => return Ok(s),
            Some('\\') => match cur.bump() {
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                _ => return Err(Unterminated("invalid escape in string")),
            },
            Some(c) => s.push(c),
        }
    }
}
