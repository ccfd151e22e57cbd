use alloc::string::String;
use alloc::vec::Vec;

use crate::cf::CertaintyFactor;
use crate::json::{format_number, write_string};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    /// A fact being proven; children are the rules tried, the question asked,
    /// or a single `Test` leaf for a cached or unprovable fact.
    Goal,
    Rule,
    All,
    Any,
    Test,
    Ask,
    /// A conjunction abandoned once its running minimum fell below the threshold.
    Pruned,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Goal => "goal",
            NodeKind::Rule => "rule",
            NodeKind::All => "all",
            NodeKind::Any => "any",
            NodeKind::Test => "test",
            NodeKind::Ask => "ask",
            NodeKind::Pruned => "pruned",
        }
    }
}

/// How a rule node's certainty was computed: `cf = rule_cf * premise_cf`.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleEval {
    pub id: String,
    pub rule_cf: CertaintyFactor,
    pub premise_cf: CertaintyFactor,
}

/// One step of a proof, as recorded for explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceNode {
    pub kind: NodeKind,
    pub label: String,
    /// For `Pruned` nodes this is the partial running minimum at the point of
    /// pruning; the conjunction itself contributes 0 to its parent.
    pub cf: CertaintyFactor,
    pub rule: Option<RuleEval>,
    pub prompt: Option<String>,
    /// Source text of the conjuncts a pruned node never evaluated.
    pub unevaluated: Vec<String>,
    pub children: Vec<TraceNode>,
}

impl TraceNode {
    pub(crate) fn new(kind: NodeKind, label: String, cf: CertaintyFactor) -> Self {
        TraceNode { kind, label, cf, rule: None, prompt: None, unevaluated: Vec::new(), children: Vec::new() }
    }

    pub(crate) fn with_children(mut self, children: Vec<TraceNode>) -> Self {
        self.children = children;
        self
    }

    /// What this node contributes to its parent.
    pub fn effective_cf(&self) -> CertaintyFactor {
        if self.kind == NodeKind::Pruned {
            CertaintyFactor::FALSE
        } else {
            self.cf
        }
    }

    /// Pre-order walk over the subtree.
    pub fn walk(&self) -> impl Iterator<Item = &TraceNode> {
        let mut stack = alloc::vec![self];
        core::iter::from_fn(move || {
            let node = stack.pop()?;
            stack.extend(node.children.iter().rev());
            Some(node)
        })
    }

    pub fn to_document(&self) -> String {
        trace_to_document(self)
    }
}

/// Renders a trace as JSON. Fields always appear in the order
/// `kind, label, cf, id, rule_cf, premise_cf, prompt, unevaluated, children`,
/// optional ones only when present.
pub fn trace_to_document(trace: &TraceNode) -> String {
    let mut out = String::new();
    write_node(&mut out, trace);
    out
}

pub(crate) fn write_node(out: &mut String, node: &TraceNode) {
    out.push_str("{\"kind\":\"");
    out.push_str(node.kind.as_str());
    out.push_str("\",\"label\":");
    write_string(out, &node.label);
    out.push_str(",\"cf\":");
    out.push_str(&format_number(node.cf.value()));
    if let Some(rule) = &node.rule {
        out.push_str(",\"id\":");
        write_string(out, &rule.id);
        out.push_str(",\"rule_cf\":");
        out.push_str(&format_number(rule.rule_cf.value()));
        out.push_str(",\"premise_cf\":");
        out.push_str(&format_number(rule.premise_cf.value()));
    }
    if let Some(prompt) = &node.prompt {
        out.push_str(",\"prompt\":");
        write_string(out, prompt);
    }
    if node.kind == NodeKind::Pruned {
        out.push_str(",\"unevaluated\":[");
        for (i, label) in node.unevaluated.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_string(out, label);
        }
        out.push(']');
    }
    out.push_str(",\"children\":[");
    for (i, child) in node.children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_node(out, child);
    }
    out.push_str("]}");
}
