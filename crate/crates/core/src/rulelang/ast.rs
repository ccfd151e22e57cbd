use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cf::CertaintyFactor;

/// 1-based line/column of a statement or token in `.mkb` source.
///
/// Spans never take part in equality: two knowledge bases that differ only in
/// where their statements came from compare equal.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _other: &Span) -> bool {
        true
    }
}

impl PartialOrd for Span {
    fn partial_cmp(&self, other: &Span) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Span {
    fn cmp(&self, _other: &Span) -> core::cmp::Ordering {
        core::cmp::Ordering::Equal
    }
}

impl core::hash::Hash for Span {
    fn hash<H: core::hash::Hasher>(&self, _state: &mut H) {}
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Right-hand side of an attribute test. Values compare textually, so `1`
/// and `1.0` are different values, and so are `flu` and `"flu"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Ident(String),
    Str(String),
    /// Numeric literal, kept as written.
    Num(String),
}

impl Value {
    /// Text of the value without quoting.
    pub fn text(&self) -> &str {
        match self {
            Value::Ident(s) | Value::Str(s) | Value::Num(s) => s,
        }
    }

    pub fn ident(s: impl Into<String>) -> Self {
        Value::Ident(s.into())
    }
}

/// Prints the value in source form (strings quoted and escaped).
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Ident(s) | Value::Num(s) => f.write_str(s),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AVPair {
    pub attribute: String,
    pub value: Value,
}

impl AVPair {
    pub fn new(attribute: impl Into<String>, value: Value) -> Self {
        AVPair { attribute: attribute.into(), value }
    }

    /// Shorthand for an identifier-valued pair, `attribute = value`.
    pub fn ident(attribute: impl Into<String>, value: impl Into<String>) -> Self {
        AVPair::new(attribute, Value::Ident(value.into()))
    }
}

impl fmt::Display for AVPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.attribute, self.value)
    }
}

/// Condition side of a rule: an AND/OR tree over attribute tests.
#[derive(Debug, Clone, PartialEq)]
pub enum Premise {
    All(Vec<Premise>),
    Any(Vec<Premise>),
    Test(AVPair),
}

impl Premise {
    /// Every attribute test in the tree, left to right.
    pub fn tests(&self) -> Vec<&AVPair> {
        let mut out = Vec::new();
        self.collect_tests(&mut out);
        out
    }

    fn collect_tests<'a>(&'a self, out: &mut Vec<&'a AVPair>) {
        match self {
            Premise::Test(p) => out.push(p),
            Premise::All(cs) | Premise::Any(cs) => cs.iter().for_each(|c| c.collect_tests(out)),
        }
    }

    /// Follows child indices from this node.
    pub fn at_path(&self, path: &[usize]) -> Option<&Premise> {
        path.iter().try_fold(self, |node, &i| match node {
            Premise::All(cs) | Premise::Any(cs) => cs.get(i),
            Premise::Test(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub id: String,
    pub premise: Premise,
    pub conclusion: AVPair,
    pub cf: CertaintyFactor,
    pub span: Span,
}

/// Declares that the user may be asked about `attribute`.
#[derive(Debug, Clone, PartialEq)]
pub struct Askable {
    pub attribute: String,
    pub prompt: String,
    pub menu: Option<Vec<Value>>,
    pub span: Span,
}

impl Askable {
    /// Prompt text with `{attribute}` and `{value}` filled in.
    pub fn render_prompt(&self, pair: &AVPair) -> String {
        self.prompt
            .replace("{attribute}", &pair.attribute)
            .replace("{value}", pair.value.text())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Goal {
    pub attribute: String,
    pub span: Span,
}

/// A semantic-net edge `relation(subject, object)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub relation: String,
    pub subject: String,
    pub object: String,
    pub span: Span,
}

impl Triple {
    pub fn new(relation: &str, subject: &str, object: &str) -> Self {
        Triple {
            relation: relation.into(),
            subject: subject.into(),
            object: object.into(),
            span: Span::default(),
        }
    }
}

/// A parsed knowledge base. Every collection keeps source order; rule order is
/// the order in which rules concluding the same fact are tried.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeBase {
    pub rules: Vec<Rule>,
    pub askables: Vec<Askable>,
    pub goals: Vec<Goal>,
    pub triples: Vec<Triple>,
}

impl KnowledgeBase {
    pub fn askable(&self, attribute: &str) -> Option<&Askable> {
        self.askables.iter().find(|a| a.attribute == attribute)
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rule_position(&self, id: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.id == id)
    }

    pub fn is_goal(&self, attribute: &str) -> bool {
        self.goals.iter().any(|g| g.attribute == attribute)
    }

    /// Rules whose conclusion is exactly `pair`, in rule order.
    pub fn rules_concluding<'a>(&'a self, pair: &'a AVPair) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules.iter().enumerate().filter(move |(_, r)| &r.conclusion == pair)
    }

    pub fn concludes_attribute(&self, attribute: &str) -> bool {
        self.rules.iter().any(|r| r.conclusion.attribute == attribute)
    }

    /// Distinct values concluded for `attribute`, in first-concluded order.
    pub fn candidate_values(&self, attribute: &str) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        for r in self.rules.iter().filter(|r| r.conclusion.attribute == attribute) {
            if !out.contains(&r.conclusion.value) {
                out.push(r.conclusion.value.clone());
            }
        }
        out
    }
}

/// `[a-z][a-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}
