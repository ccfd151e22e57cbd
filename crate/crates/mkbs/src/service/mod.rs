//! Consultation sessions, net queries, and rule editing behind one façade.
//!
//! [`Service`] knows nothing about HTTP; [`http::router`] maps it onto routes.
//! Every method returns a serializable view or an [`ApiError`] carrying the
//! protocol error code and status.

pub mod http;
pub mod wire;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, TryLockError};
use std::time::{Duration, Instant};

use mkbs_core::{
    parse_rule, Answer, CertaintyFactor, Consultation, ConsultationResult, Diagnostic,
    EngineConfig, EngineError, KnowledgeBase, Question, Step,
};

use crate::editor::{EditError, KbStore};
use crate::kbfile::kb_id;
use wire::*;

pub const DEFAULT_MAX_SESSIONS: usize = 1024;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone, Copy)]
pub struct ServiceConfig {
    pub engine: EngineConfig,
    pub max_sessions: usize,
    pub session_ttl: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            engine: EngineConfig::default(),
            max_sessions: DEFAULT_MAX_SESSIONS,
            session_ttl: DEFAULT_SESSION_TTL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into(), diagnostics: Vec::new() }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: self.message.clone(),
                diagnostics: self.diagnostics.iter().map(DiagnosticView::from).collect(),
            },
        }
    }

    fn unknown_kb(kb_id: &str) -> Self {
        ApiError::new(404, "UNKNOWN_KB", format!("no knowledge base `{kb_id}`"))
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(404, "UNKNOWN_SESSION", format!("no session `{id}`"))
    }

    fn with_diagnostics(mut self, diagnostics: Vec<Diagnostic>) -> Self {
        self.diagnostics = diagnostics;
        self
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<EditError> for ApiError {
    fn from(e: EditError) -> Self {
        let status = match &e {
            EditError::DuplicateId(_) => 409,
            EditError::NotFound(_) => 404,
            EditError::IdMismatch { .. } | EditError::ValidationFailed(_) => 422,
            EditError::NothingToUndo => 409,
            EditError::PersistFailed(_) => 500,
        };
        let code = e.code();
        let message = e.to_string();
        let diags = match e {
            EditError::ValidationFailed(d) => d,
            _ => Vec::new(),
        };
        ApiError::new(status, code, message).with_diagnostics(diags)
    }
}

enum Phase {
    Awaiting(Question),
    Done(ConsultationResult),
    Aborted(String),
}

struct Session {
    id: String,
    kb_id: String,
    revision: u64,
    consultation: Consultation<Arc<KnowledgeBase>>,
    question_id: u64,
    phase: Phase,
}

impl Session {
    fn settle(&mut self, step: Result<Step, EngineError>) {
        self.phase = match step {
            Ok(Step::Ask(q)) => {
                self.question_id += 1;
                Phase::Awaiting(q)
            }
            Ok(Step::Done(r)) => Phase::Done(r),
            Err(e) => Phase::Aborted(e.to_string()),
        };
    }

    fn view(&self) -> SessionView {
        let mut view = SessionView {
            session_id: self.id.clone(),
            kb_id: self.kb_id.clone(),
            revision: self.revision,
            state: "",
            question: None,
            result: None,
            reason: None,
        };
        match &self.phase {
            Phase::Awaiting(q) => {
                view.state = "awaiting_answer";
                view.question = Some(QuestionView::new(self.question_id, q));
            }
            Phase::Done(r) => {
                view.state = "done";
                view.result = Some(ResultView::from(r));
            }
            Phase::Aborted(why) => {
                view.state = "aborted";
                view.reason = Some(why.clone());
            }
        }
        view
    }
}

type SessionRef = Arc<Mutex<Session>>;

pub struct Service {
    kbs: BTreeMap<String, Arc<KbStore>>,
    sessions: Mutex<HashMap<String, (SessionRef, Instant)>>,
    config: ServiceConfig,
}

impl Service {
    pub fn new(config: ServiceConfig) -> Self {
        Service { kbs: BTreeMap::new(), sessions: Mutex::default(), config }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn add_kb(&mut self, kb_id: impl Into<String>, store: KbStore) {
        self.kbs.insert(kb_id.into(), Arc::new(store));
    }

    /// Loads every `*.mkb` in `dir`, keyed by file stem. Files that fail to
    /// load are skipped and reported back.
    pub fn load_dir(&mut self, dir: &Path) -> std::io::Result<Vec<(String, crate::kbfile::LoadError)>> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "mkb") && p.is_file())
            .collect();
        paths.sort();
        let mut skipped = Vec::new();
        for path in paths {
            let Some(id) = kb_id(&path) else { continue };
            match KbStore::open(&path) {
                Ok(store) => self.add_kb(id, store),
                Err(e) => skipped.push((id, e)),
            }
        }
        Ok(skipped)
    }

    pub fn kb_ids(&self) -> impl Iterator<Item = &str> {
        self.kbs.keys().map(String::as_str)
    }

    pub fn store(&self, kb_id: &str) -> Result<&Arc<KbStore>, ApiError> {
        self.kbs.get(kb_id).ok_or_else(|| ApiError::unknown_kb(kb_id))
    }

    pub fn list_kbs(&self) -> Vec<KbView> {
        self.kbs
            .iter()
            .map(|(id, store)| {
                let snap = store.snapshot();
                KbView {
                    kb_id: id.clone(),
                    revision: snap.revision,
                    goals: snap.kb.goals.iter().map(|g| g.attribute.clone()).collect(),
                    rules: snap.kb.rules.len(),
                }
            })
            .collect()
    }

    pub fn live_sessions(&self) -> usize {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn create_session(&self, kb_id: &str, goal: &str) -> Result<SessionView, ApiError> {
        let snap = self.store(kb_id)?.snapshot();
        let consultation = Consultation::new(snap.kb.clone(), goal, self.config.engine)
            .map_err(|e| ApiError::new(422, "UNKNOWN_GOAL", e.to_string()))?;

        let now = Instant::now();
        let mut sessions = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
        let ttl = self.config.session_ttl;
        sessions.retain(|_, (_, seen)| now.duration_since(*seen) <= ttl);
        if sessions.len() >= self.config.max_sessions {
            return Err(ApiError::new(
                503,
                "CAPACITY_EXCEEDED",
                format!("{} live sessions is the limit", self.config.max_sessions),
            ));
        }

        let mut session = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            kb_id: kb_id.into(),
            revision: snap.revision,
            consultation,
            question_id: 0,
            phase: Phase::Aborted(String::new()),
        };
        let step = session.consultation.resume();
        session.settle(step);
        let view = session.view();
        sessions.insert(session.id.clone(), (Arc::new(Mutex::new(session)), now));
        Ok(view)
    }

    /// Locks one session for the duration of `f`. A second concurrent call on
    /// the same session gets SESSION_BUSY instead of waiting.
    fn with_session<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let handle = {
            let mut sessions = self.sessions.lock().unwrap_or_else(|e| e.into_inner());
            let (handle, seen) = sessions.get(id).ok_or_else(|| ApiError::unknown_session(id))?;
            let now = Instant::now();
            if now.duration_since(*seen) > self.config.session_ttl {
                sessions.remove(id);
                return Err(ApiError::unknown_session(id));
            }
            let handle = handle.clone();
            sessions.get_mut(id).expect("present").1 = now;
            handle
        };
        let mut session = match handle.try_lock() {
            Ok(s) => s,
            Err(TryLockError::WouldBlock) => {
                return Err(ApiError::new(409, "SESSION_BUSY", format!("session `{id}` is handling another call")))
            }
            Err(TryLockError::Poisoned(p)) => p.into_inner(),
        };
        f(&mut session)
    }

    pub fn get_session(&self, id: &str) -> Result<SessionView, ApiError> {
        self.with_session(id, |s| Ok(s.view()))
    }

    pub fn submit_answer(&self, id: &str, req: &SubmitAnswer) -> Result<SessionView, ApiError> {
        self.with_session(id, |s| {
            let cf = CertaintyFactor::new(req.cf)
                .map_err(|e| ApiError::new(400, "CF_RANGE", e.to_string()))?;
            let Phase::Awaiting(question) = &s.phase else {
                return Err(ApiError::new(409, "STALE_QUESTION", "the session has no pending question"));
            };
            if req.question_id != s.question_id {
                return Err(ApiError::new(
                    409,
                    "STALE_QUESTION",
                    format!("question {} is pending, not {}", s.question_id, req.question_id),
                ));
            }
            let invalid = |text: &str| {
                ApiError::new(400, "INVALID_CHOICE", format!("`{text}` is not a choice for `{}`", question.avpair.attribute))
            };
            let answer = match (&req.value, &question.menu) {
                (None, _) => Answer::with_cf(cf),
                (Some(text), Some(menu)) => {
                    let choice = menu.iter().find(|v| v.text() == text).ok_or_else(|| invalid(text))?;
                    Answer::choose(choice.clone(), cf)
                }
                (Some(text), None) if *text == question.avpair.value.text() => Answer::with_cf(cf),
                (Some(text), None) => return Err(invalid(text)),
            };
            match s.consultation.answer(answer) {
                Err(e @ (EngineError::InvalidChoice { .. } | EngineError::NotAsking)) => {
                    Err(ApiError::new(400, "INVALID_CHOICE", e.to_string()))
                }
                step => {
                    s.settle(step);
                    Ok(s.view())
                }
            }
        })
    }

    /// The full trace document of a finished session, as JSON text.
    pub fn get_trace(&self, id: &str) -> Result<String, ApiError> {
        self.with_session(id, |s| match &s.phase {
            Phase::Done(r) => Ok(r.trace_document()),
            _ => Err(ApiError::new(409, "NOT_DONE", "the consultation has not finished")),
        })
    }

    pub fn net_query(&self, kb_id: &str, relation: &str, node: &str, inherit: bool) -> Result<NetView, ApiError> {
        let snap = self.store(kb_id)?.snapshot();
        Ok(NetView::new(&snap.net.query(relation, node, inherit), inherit, snap.revision))
    }

    pub fn net_describe(&self, kb_id: &str, node: &str) -> Result<DescribeView, ApiError> {
        let snap = self.store(kb_id)?.snapshot();
        let relations = snap
            .net
            .describe(node)
            .into_iter()
            .map(|(rel, ans)| (rel, NetView::new(&ans, true, snap.revision)))
            .collect();
        Ok(DescribeView { node: node.into(), revision: snap.revision, relations })
    }

    pub fn list_rules(&self, kb_id: &str) -> Result<RuleList, ApiError> {
        let snap = self.store(kb_id)?.snapshot();
        Ok(RuleList {
            kb_id: kb_id.into(),
            revision: snap.revision,
            rules: snap.kb.rules.iter().enumerate().map(|(i, r)| RuleView::new(r, i)).collect(),
        })
    }

    pub fn add_rule(&self, kb_id: &str, source: &str) -> Result<EditView, ApiError> {
        let store = self.store(kb_id)?;
        let rule = parse_source(source)?;
        let id = rule.id.clone();
        let edit = store.add_rule(rule)?;
        Ok(edit_view(kb_id, store, edit, Some(&id)))
    }

    pub fn update_rule(&self, kb_id: &str, rule_id: &str, source: &str) -> Result<EditView, ApiError> {
        let store = self.store(kb_id)?;
        let rule = parse_source(source)?;
        let edit = store.update_rule(rule_id, rule)?;
        Ok(edit_view(kb_id, store, edit, Some(rule_id)))
    }

    pub fn delete_rule(&self, kb_id: &str, rule_id: &str) -> Result<EditView, ApiError> {
        let store = self.store(kb_id)?;
        let edit = store.delete_rule(rule_id)?;
        Ok(edit_view(kb_id, store, edit, None))
    }
}

fn parse_source(source: &str) -> Result<mkbs_core::Rule, ApiError> {
    parse_rule(source).map_err(|diags| {
        let message = diags.first().map_or_else(|| "invalid rule".to_owned(), ToString::to_string);
        ApiError::new(422, "VALIDATION_FAILED", message).with_diagnostics(diags)
    })
}

fn edit_view(kb_id: &str, store: &KbStore, edit: crate::editor::Edit, rule_id: Option<&str>) -> EditView {
    let snap = store.snapshot();
    let rule = rule_id.and_then(|id| {
        let pos = snap.kb.rule_position(id)?;
        Some(RuleView::new(&snap.kb.rules[pos], pos))
    });
    EditView {
        kb_id: kb_id.into(),
        revision: edit.revision,
        rule,
        warnings: edit.warnings.iter().map(DiagnosticView::from).collect(),
    }
}
