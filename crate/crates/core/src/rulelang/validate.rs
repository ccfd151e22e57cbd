use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{KnowledgeBase, Premise, Span};
use super::diag::{code, Diagnostic};

/// Checks a knowledge base and returns every problem found, ordered by source
/// location. Errors make the KB unusable; warnings point at likely mistakes.
pub fn validate_kb(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    check_duplicates(kb, &mut diags);
    check_premise_shapes(kb, &mut diags);
    check_goal_cycles(kb, &mut diags);
    check_isa_cycles(kb, &mut diags);
    check_goals(kb, &mut diags);
    check_undefined_attributes(kb, &mut diags);
    check_unreachable_rules(kb, &mut diags);
    diags.sort_by_key(Diagnostic::sort_key);
    diags
}

fn loc(span: Span) -> Option<Span> {
    (span.line > 0).then_some(span)
}

fn check_duplicates(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let mut ids = BTreeSet::new();
    for rule in &kb.rules {
        if !ids.insert(rule.id.as_str()) {
            diags.push(Diagnostic::error(
                code::DUPLICATE_RULE_ID,
                loc(rule.span),
                format!("rule id `{}` is already defined", rule.id),
            ));
        }
    }

    let mut askables = BTreeSet::new();
    for a in &kb.askables {
        if !askables.insert(a.attribute.as_str()) {
            diags.push(Diagnostic::error(
                code::DUPLICATE_ASKABLE,
                loc(a.span),
                format!("attribute `{}` is already askable", a.attribute),
            ));
        }
        if let Some(menu) = &a.menu {
            let distinct: BTreeSet<_> = menu.iter().collect();
            if menu.is_empty() || distinct.len() != menu.len() {
                diags.push(Diagnostic::error(
                    code::MENU_INVALID,
                    loc(a.span),
                    format!("menu of `{}` must be nonempty and free of duplicates", a.attribute),
                ));
            }
        }
    }
}

fn check_premise_shapes(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    fn has_empty_group(p: &Premise) -> bool {
        match p {
            Premise::Test(_) => false,
            Premise::All(cs) | Premise::Any(cs) => cs.is_empty() || cs.iter().any(has_empty_group),
        }
    }
    for rule in kb.rules.iter().filter(|r| has_empty_group(&r.premise)) {
        diags.push(Diagnostic::error(
            code::EMPTY_PREMISE,
            loc(rule.span),
            format!("rule `{}` has an empty and/or group", rule.id),
        ));
    }
}

/// Dense numbering of names in first-seen order.
#[derive(Default)]
struct Interner<'a> {
    index: BTreeMap<&'a str, usize>,
    names: Vec<&'a str>,
}

impl<'a> Interner<'a> {
    fn id(&mut self, name: &'a str) -> usize {
        *self.index.entry(name).or_insert_with(|| {
            self.names.push(name);
            self.names.len() - 1
        })
    }
}

/// Nodes that lie on a directed cycle (including self-loops), grouped by
/// strongly connected component. Tarjan's algorithm.
fn cyclic_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'g> {
        adj: &'g [Vec<usize>],
        counter: usize,
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    fn connect(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.counter);
        s.low[v] = s.counter;
        s.counter += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in &s.adj[v] {
            match s.index[w] {
                None => {
                    connect(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut component = Vec::new();
            loop {
                let w = s.stack.pop().expect("v is on the stack");
                s.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            if component.len() > 1 || s.adj[v].contains(&v) {
                component.sort_unstable();
                s.out.push(component);
            }
        }
    }

    let n = adj.len();
    let mut s = State {
        adj,
        counter: 0,
        index: alloc::vec![None; n],
        low: alloc::vec![0; n],
        on_stack: alloc::vec![false; n],
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            connect(&mut s, v);
        }
    }
    s.out
}

fn describe_cycle(names: &[&str], component: &[usize]) -> String {
    let mut members: Vec<&str> = component.iter().map(|&i| names[i]).collect();
    members.sort_unstable();
    members.join(", ")
}

/// Edge `conclusion attribute -> premise attribute` for every rule.
fn attribute_graph(kb: &KnowledgeBase) -> (Interner<'_>, Vec<Vec<usize>>) {
    let mut names = Interner::default();
    let mut edges = Vec::new();
    for rule in &kb.rules {
        let from = names.id(&rule.conclusion.attribute);
        for test in rule.premise.tests() {
            edges.push((from, names.id(&test.attribute)));
        }
    }
    let mut adj = alloc::vec![Vec::new(); names.names.len()];
    for (a, b) in edges {
        if !adj[a].contains(&b) {
            adj[a].push(b);
        }
    }
    (names, adj)
}

fn check_goal_cycles(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let (names, adj) = attribute_graph(kb);
    for component in cyclic_components(&adj) {
        let members = describe_cycle(&names.names, &component);
        for &attr in &component {
            let name = names.names[attr];
            let first_rule = kb.rules.iter().find(|r| r.conclusion.attribute == name);
            diags.push(Diagnostic::error(
                code::GOAL_CYCLE,
                first_rule.and_then(|r| loc(r.span)),
                format!("proving `{name}` requires `{name}` again (cycle through {members})"),
            ));
        }
    }
}

fn check_isa_cycles(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let mut names = Interner::default();
    let mut edges = Vec::new();
    for t in kb.triples.iter().filter(|t| t.relation == "isa") {
        edges.push((names.id(&t.subject), names.id(&t.object)));
    }
    let mut adj = alloc::vec![Vec::new(); names.names.len()];
    for (a, b) in edges {
        adj[a].push(b);
    }
    for component in cyclic_components(&adj) {
        let members = describe_cycle(&names.names, &component);
        for &node in &component {
            let name = names.names[node];
            let first = kb.triples.iter().find(|t| t.relation == "isa" && t.subject == name);
            diags.push(Diagnostic::error(
                code::ISA_CYCLE,
                first.and_then(|t| loc(t.span)),
                format!("`{name}` is its own ancestor (isa cycle through {members})"),
            ));
        }
    }
}

fn check_goals(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let mut seen = BTreeSet::new();
    for goal in &kb.goals {
        if !seen.insert(goal.attribute.as_str()) {
            diags.push(Diagnostic::warning(
                code::DUPLICATE_GOAL,
                loc(goal.span),
                format!("goal `{}` is declared more than once", goal.attribute),
            ));
        } else if !kb.concludes_attribute(&goal.attribute) {
            diags.push(Diagnostic::warning(
                code::GOAL_UNPROVABLE,
                loc(goal.span),
                format!("no rule concludes goal `{}`", goal.attribute),
            ));
        }
    }
}

fn check_undefined_attributes(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let mut reported = BTreeSet::new();
    for rule in &kb.rules {
        for test in rule.premise.tests() {
            let attr = test.attribute.as_str();
            if kb.askable(attr).is_none() && !kb.concludes_attribute(attr) && reported.insert(attr) {
                diags.push(Diagnostic::warning(
                    code::ATTRIBUTE_UNDEFINED,
                    loc(rule.span),
                    format!("`{attr}` in rule `{}` is neither askable nor concluded by any rule", rule.id),
                ));
            }
        }
    }
}

fn check_unreachable_rules(kb: &KnowledgeBase, diags: &mut Vec<Diagnostic>) {
    let subgoals: BTreeSet<&str> = kb
        .rules
        .iter()
        .flat_map(|r| r.premise.tests())
        .map(|t| t.attribute.as_str())
        .collect();
    for rule in &kb.rules {
        let attr = rule.conclusion.attribute.as_str();
        if !kb.is_goal(attr) && !subgoals.contains(attr) {
            diags.push(Diagnostic::warning(
                code::RULE_UNREACHABLE,
                loc(rule.span),
                format!("rule `{}` concludes `{attr}`, which is neither a goal nor used by another rule", rule.id),
            ));
        }
    }
}
