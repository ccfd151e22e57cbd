//! Core of the mkbs expert-system shell.
//!
//! This crate is `no_std` (it needs `alloc`) and holds everything that does not
//! touch the outside world:
//!
//! * [`rulelang`]: the `.mkb` knowledge-base language (parse, validate, serialize).
//! * [`engine`]: certainty-factor backward chaining with working memory, pruning,
//!   and a resumable consultation that parks whenever it needs an answer.
//! * [`semnet`]: `isa`-hierarchy queries with downward property inheritance.
//!
//! IO, persistence, the HTTP service, and the command line live in the `mkbs` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cf;
pub mod engine;
pub mod json;
pub mod rulelang;
pub mod semnet;

pub use cf::{cf_all, cf_any, cf_parallel, cf_rule, CertaintyFactor, CfRangeError};
pub use engine::{
    consult, prove, Answer, AnswerProvider, Candidate, ConsultError, Consultation,
    ConsultationResult, EngineConfig, EngineError, KnownFact, NodeKind, Origin, Question,
    Step, TraceNode, WorkingMemory,
};
pub use rulelang::{
    parse_avpair, parse_kb, parse_rule, serialize_kb, serialize_rule, validate_kb, AVPair, Askable,
    Diagnostic, KnowledgeBase, Premise, Rule, Severity, Span, Triple, Value,
};
pub use semnet::{NetAnswer, NetResult, SemanticNet};
