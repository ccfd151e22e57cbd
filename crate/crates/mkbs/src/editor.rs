//! Live rule editing over a knowledge base file.
//!
//! A [`KbStore`] publishes immutable [`Snapshot`]s. Readers grab the current one
//! without locking; mutations go through a single writer, are validated as a
//! whole KB, written to disk, and only then published.

use std::collections::VecDeque;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use arc_swap::ArcSwap;
use mkbs_core::{
    parse_kb, serialize_kb, validate_kb, Diagnostic, KnowledgeBase, Rule, SemanticNet,
};

use crate::kbfile::{load_kb, write_atomic, LoadError};

pub const UNDO_LIMIT: usize = 100;

/// One published state of the knowledge base.
#[derive(Debug)]
pub struct Snapshot {
    pub revision: u64,
    pub kb: Arc<KnowledgeBase>,
    pub net: SemanticNet,
}

impl Snapshot {
    fn new(revision: u64, kb: KnowledgeBase) -> Self {
        let net = SemanticNet::from_kb(&kb);
        Snapshot { revision, kb: Arc::new(kb), net }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EditError {
    #[error("rule `{0}` already exists")]
    DuplicateId(String),
    #[error("no rule `{0}`")]
    NotFound(String),
    #[error("rule id `{found}` does not match `{expected}`")]
    IdMismatch { expected: String, found: String },
    #[error("the edit would leave the knowledge base with {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    ValidationFailed(Vec<Diagnostic>),
    #[error("could not save the knowledge base: {0}")]
    PersistFailed(std::io::Error),
    #[error("nothing to undo")]
    NothingToUndo,
}

impl EditError {
    pub fn code(&self) -> &'static str {
        match self {
            EditError::DuplicateId(_) => "DUPLICATE_ID",
            EditError::NotFound(_) => "NOT_FOUND",
            EditError::IdMismatch { .. } => "ID_MISMATCH",
            EditError::ValidationFailed(_) => "VALIDATION_FAILED",
            EditError::PersistFailed(_) => "PERSIST_FAILED",
            EditError::NothingToUndo => "NOTHING_TO_UNDO",
        }
    }
}

/// Result of a successful mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct Edit {
    pub revision: u64,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone)]
enum Op {
    Insert { position: usize, rule: Rule },
    Replace(Rule),
    Remove(String),
}

#[derive(Debug, Default)]
struct Writer {
    undo: VecDeque<(u64, Op)>,
}

#[derive(Debug)]
pub struct KbStore {
    path: Option<PathBuf>,
    current: ArcSwap<Snapshot>,
    writer: Mutex<Writer>,
}

impl KbStore {
    /// Loads `path` at revision 1. Edits are written back to the same file.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LoadError> {
        let path = path.as_ref();
        let loaded = load_kb(path)?;
        Ok(Self::build(Some(path.to_path_buf()), loaded.kb))
    }

    /// A store with no backing file.
    pub fn in_memory(kb: KnowledgeBase) -> Self {
        Self::build(None, kb)
    }

    fn build(path: Option<PathBuf>, kb: KnowledgeBase) -> Self {
        KbStore {
            path,
            current: ArcSwap::from_pointee(Snapshot::new(1, kb)),
            writer: Mutex::default(),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.load_full()
    }

    pub fn revision(&self) -> u64 {
        self.current.load().revision
    }

    /// Rules in order, with their positions.
    pub fn list_rules(&self) -> Vec<(Rule, usize)> {
        let snap = self.current.load();
        snap.kb.rules.iter().cloned().zip(0..).collect()
    }

    /// Appends `rule`, making it last in conflict-resolution order.
    pub fn add_rule(&self, rule: Rule) -> Result<Edit, EditError> {
        self.mutate(|kb| {
            if kb.rule(&rule.id).is_some() {
                return Err(EditError::DuplicateId(rule.id.clone()));
            }
            let id = rule.id.clone();
            kb.rules.push(rule);
            Ok(Op::Remove(id))
        })
    }

    /// Replaces rule `id` in place.
    pub fn update_rule(&self, id: &str, rule: Rule) -> Result<Edit, EditError> {
        if rule.id != id {
            return Err(EditError::IdMismatch { expected: id.into(), found: rule.id });
        }
        self.mutate(|kb| {
            let pos = kb.rule_position(id).ok_or_else(|| EditError::NotFound(id.into()))?;
            let old = std::mem::replace(&mut kb.rules[pos], rule);
            Ok(Op::Replace(old))
        })
    }

    pub fn delete_rule(&self, id: &str) -> Result<Edit, EditError> {
        self.mutate(|kb| {
            let position = kb.rule_position(id).ok_or_else(|| EditError::NotFound(id.into()))?;
            let rule = kb.rules.remove(position);
            Ok(Op::Insert { position, rule })
        })
    }

    /// Reverts the most recent edit still in the undo log. The revert is a
    /// new revision, not a step back.
    pub fn undo(&self) -> Result<Edit, EditError> {
        let mut writer = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let (_, op) = writer.undo.back().cloned().ok_or(EditError::NothingToUndo)?;
        let edit = self.apply(|kb| Ok(apply_op(kb, op)))?;
        writer.undo.pop_back();
        Ok(edit.0)
    }

    pub fn undo_depth(&self) -> usize {
        self.writer.lock().unwrap_or_else(|e| e.into_inner()).undo.len()
    }

    fn mutate(&self, f: impl FnOnce(&mut KnowledgeBase) -> Result<Op, EditError>) -> Result<Edit, EditError> {
        let mut writer = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let (edit, inverse) = self.apply(f)?;
        if writer.undo.len() == UNDO_LIMIT {
            writer.undo.pop_front();
        }
        writer.undo.push_back((edit.revision, inverse));
        Ok(edit)
    }

    /// Caller holds the writer lock.
    fn apply(&self, f: impl FnOnce(&mut KnowledgeBase) -> Result<Op, EditError>) -> Result<(Edit, Op), EditError> {
        let current = self.current.load_full();
        let mut draft = (*current.kb).clone();
        let inverse = f(&mut draft)?;

        let text = serialize_kb(&draft);
        // reparsing the canonical text both validates and refreshes spans to match the file
        let kb = parse_kb(&text).map_err(EditError::ValidationFailed)?;
        let warnings = validate_kb(&kb);

        if let Some(path) = &self.path {
            write_atomic(path, &text).map_err(EditError::PersistFailed)?;
        }
        let revision = current.revision + 1;
        self.current.store(Arc::new(Snapshot::new(revision, kb)));
        Ok((Edit { revision, warnings }, inverse))
    }
}

fn apply_op(kb: &mut KnowledgeBase, op: Op) -> Op {
    match op {
        Op::Insert { position, rule } => {
            let id = rule.id.clone();
            kb.rules.insert(position.min(kb.rules.len()), rule);
            Op::Remove(id)
        }
        Op::Replace(rule) => {
            let pos = kb.rule_position(&rule.id).expect("undo log matches store");
            Op::Replace(std::mem::replace(&mut kb.rules[pos], rule))
        }
        Op::Remove(id) => {
            let position = kb.rule_position(&id).expect("undo log matches store");
            Op::Insert { position, rule: kb.rules.remove(position) }
        }
    }
}
