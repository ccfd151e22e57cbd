//! JSON bodies of the wire protocol.

use serde::{Deserialize, Serialize};

use mkbs_core::json::round_significant;
use mkbs_core::{
    serialize_rule, AVPair, CertaintyFactor, ConsultationResult, Diagnostic, NetAnswer, Question,
    Rule,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub kb_id: String,
    pub revision: u64,
    pub state: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub question: Option<QuestionView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuestionView {
    pub question_id: u64,
    pub attribute: String,
    pub value: String,
    pub prompt: String,
    pub menu: Option<Vec<String>>,
}

impl QuestionView {
    pub fn new(question_id: u64, q: &Question) -> Self {
        QuestionView {
            question_id,
            attribute: q.avpair.attribute.clone(),
            value: q.avpair.value.text().to_owned(),
            prompt: q.prompt.clone(),
            menu: q.menu.as_ref().map(|m| m.iter().map(|v| v.text().to_owned()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultView {
    pub goal: String,
    pub ranked: Vec<RankedView>,
    pub questions_asked: Vec<PairView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedView {
    pub value: String,
    pub cf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairView {
    pub attribute: String,
    pub value: String,
}

impl From<&AVPair> for PairView {
    fn from(p: &AVPair) -> Self {
        PairView { attribute: p.attribute.clone(), value: p.value.text().to_owned() }
    }
}

pub fn wire_cf(cf: CertaintyFactor) -> f64 {
    round_significant(cf.value())
}

impl From<&ConsultationResult> for ResultView {
    fn from(r: &ConsultationResult) -> Self {
        ResultView {
            goal: r.goal.clone(),
            ranked: r
                .ranked
                .iter()
                .map(|c| RankedView { value: c.value.text().to_owned(), cf: wire_cf(c.cf) })
                .collect(),
            questions_asked: r.questions_asked.iter().map(PairView::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub goal: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SubmitAnswer {
    pub question_id: u64,
    pub cf: f64,
    #[serde(default)]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RuleSource {
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetView {
    pub relation: String,
    pub node: String,
    pub inherit: bool,
    pub revision: u64,
    pub results: Vec<NetResultView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetResultView {
    pub object: String,
    pub via: Option<String>,
}

impl NetView {
    pub fn new(answer: &NetAnswer, inherit: bool, revision: u64) -> Self {
        NetView {
            relation: answer.relation.clone(),
            node: answer.node.clone(),
            inherit,
            revision,
            results: answer
                .results
                .iter()
                .map(|r| NetResultView { object: r.object.clone(), via: r.via.clone() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescribeView {
    pub node: String,
    pub revision: u64,
    pub relations: std::collections::BTreeMap<String, NetView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KbView {
    pub kb_id: String,
    pub revision: u64,
    pub goals: Vec<String>,
    pub rules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleView {
    pub id: String,
    pub position: usize,
    pub source: String,
    pub premise: String,
    pub conclusion: PairView,
    pub cf: f64,
}

impl RuleView {
    pub fn new(rule: &Rule, position: usize) -> Self {
        RuleView {
            id: rule.id.clone(),
            position,
            source: serialize_rule(rule),
            premise: mkbs_core::rulelang::premise_text(&rule.premise),
            conclusion: PairView::from(&rule.conclusion),
            cf: rule.cf.value(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleList {
    pub kb_id: String,
    pub revision: u64,
    pub rules: Vec<RuleView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditView {
    pub kb_id: String,
    pub revision: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleView>,
    pub warnings: Vec<DiagnosticView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticView {
    pub severity: &'static str,
    pub code: &'static str,
    pub line: Option<u32>,
    pub col: Option<u32>,
    pub message: String,
}

impl From<&Diagnostic> for DiagnosticView {
    fn from(d: &Diagnostic) -> Self {
        DiagnosticView {
            severity: if d.is_error() { "error" } else { "warning" },
            code: d.code,
            line: d.location.map(|s| s.line),
            col: d.location.map(|s| s.col),
            message: d.message.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorDetail {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<DiagnosticView>,
}
