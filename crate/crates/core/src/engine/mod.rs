//! Backward chaining with certainty factors.
//!
//! The prover keeps its own explicit stack instead of recursing, so a
//! consultation can stop whenever it needs an answer from the user and pick up
//! again later ([`Consultation`]). The blocking entry points [`prove`] and
//! [`consult`] drive the same machine with an [`AnswerProvider`].

mod machine;
mod memory;
mod trace;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cf::CertaintyFactor;
use crate::rulelang::{AVPair, Value};

pub use machine::{consult, prove, Consultation, Step};
pub use memory::{KnownFact, Origin, WorkingMemory};
pub use trace::{trace_to_document, NodeKind, RuleEval, TraceNode};

/// Default pruning threshold.
pub const DEFAULT_THRESHOLD: f64 = 0.2;
/// Default recursion cap; reaching it means a dependency cycle slipped past validation.
pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// A conjunction whose running minimum drops below this is abandoned and counts as 0.
    pub threshold: CertaintyFactor,
    /// Candidates below this are left out of the ranking. `None` means "same as `threshold`".
    pub report_threshold: Option<CertaintyFactor>,
    pub max_depth: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            threshold: CertaintyFactor::new(DEFAULT_THRESHOLD).expect("in range"),
            report_threshold: None,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl EngineConfig {
    pub fn with_threshold(threshold: CertaintyFactor) -> Self {
        EngineConfig { threshold, ..Default::default() }
    }

    pub fn report_threshold(&self) -> CertaintyFactor {
        self.report_threshold.unwrap_or(self.threshold)
    }
}

/// Something the engine wants to know from the user.
#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub avpair: AVPair,
    pub prompt: String,
    pub menu: Option<Vec<Value>>,
}

/// The user's reply: how strongly they believe the asked fact.
///
/// For menu askables the user may instead pick a menu value (`choice`); the
/// pick gets `cf` and every other menu value gets 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer {
    pub cf: CertaintyFactor,
    pub choice: Option<Value>,
}

impl Answer {
    pub fn yes() -> Self {
        Answer { cf: CertaintyFactor::TRUE, choice: None }
    }

    pub fn no() -> Self {
        Answer { cf: CertaintyFactor::FALSE, choice: None }
    }

    pub fn with_cf(cf: CertaintyFactor) -> Self {
        Answer { cf, choice: None }
    }

    pub fn choose(value: Value, cf: CertaintyFactor) -> Self {
        Answer { cf, choice: Some(value) }
    }
}

/// Source of answers for blocking consultations: a terminal, a script, a test.
pub trait AnswerProvider {
    type Error;

    fn answer(&mut self, question: &Question) -> Result<Answer, Self::Error>;
}

impl<F, E> AnswerProvider for F
where
    F: FnMut(&Question) -> Result<Answer, E>,
{
    type Error = E;

    fn answer(&mut self, question: &Question) -> Result<Answer, E> {
        self(question)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    /// The goal attribute is neither declared nor concluded by any rule.
    UnknownGoal(String),
    /// Proof nesting passed the configured limit.
    DepthExceeded { goal: AVPair, limit: usize },
    /// An answer arrived while no question was pending.
    NotAsking,
    /// The chosen value is not on the askable's menu.
    InvalidChoice { attribute: String, value: Value },
    /// The consultation already failed and cannot continue.
    Failed,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::UnknownGoal(g) => write!(f, "unknown goal attribute `{g}`"),
            EngineError::DepthExceeded { goal, limit } => {
                write!(f, "proof of `{goal}` exceeded depth {limit}; the rules are probably cyclic")
            }
            EngineError::NotAsking => f.write_str("no question is pending"),
            EngineError::InvalidChoice { attribute, value } => {
                write!(f, "`{value}` is not a menu value of `{attribute}`")
            }
            EngineError::Failed => f.write_str("consultation has already failed"),
        }
    }
}

impl core::error::Error for EngineError {}

/// Failure of a blocking consultation: either the engine or the answer provider.
#[derive(Debug, Clone, PartialEq)]
pub enum ConsultError<E> {
    Engine(EngineError),
    Provider(E),
}

impl<E: fmt::Display> fmt::Display for ConsultError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConsultError::Engine(e) => e.fmt(f),
            ConsultError::Provider(e) => write!(f, "answer provider failed: {e}"),
        }
    }
}

impl<E: fmt::Debug + fmt::Display> core::error::Error for ConsultError<E> {}

impl<E> From<EngineError> for ConsultError<E> {
    fn from(e: EngineError) -> Self {
        ConsultError::Engine(e)
    }
}

/// One proven value of the goal attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub value: Value,
    pub cf: CertaintyFactor,
    pub trace: TraceNode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsultationResult {
    pub goal: String,
    /// Candidates at or above the report threshold, strongest first; ties keep
    /// the order in which the rules first conclude them.
    pub ranked: Vec<Candidate>,
    pub questions_asked: Vec<AVPair>,
}

impl ConsultationResult {
    /// `{"goal":…,"candidates":[{"value":…,"cf":…,"trace":{…}}]}`
    pub fn trace_document(&self) -> String {
        let mut out = String::new();
        out.push_str("{\"goal\":");
        crate::json::write_string(&mut out, &self.goal);
        out.push_str(",\"candidates\":[");
        for (i, c) in self.ranked.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("{\"value\":");
            crate::json::write_string(&mut out, c.value.text());
            out.push_str(",\"cf\":");
            out.push_str(&crate::json::format_number(c.cf.value()));
            out.push_str(",\"trace\":");
            trace::write_node(&mut out, &c.trace);
            out.push('}');
        }
        out.push_str("]}");
        out
    }
}
