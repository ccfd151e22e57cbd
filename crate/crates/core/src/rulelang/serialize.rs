use alloc::string::String;
use core::fmt::Write;

use super::ast::{Askable, KnowledgeBase, Premise, Rule};

/// Canonical `.mkb` text: goals, askables, rules, then net triples, each group
/// in stored order, one statement per line, groups separated by a blank line.
///
/// Certainty factors print in the shortest form that reads back to the same
/// number, so `parse_kb(serialize_kb(kb))` reproduces `kb` exactly.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut groups: alloc::vec::Vec<String> = alloc::vec::Vec::new();

    let mut goals = String::new();
    for g in &kb.goals {
        let _ = writeln!(goals, "goal {} .", g.attribute);
    }
    groups.push(goals);

    let mut askables = String::new();
    for a in &kb.askables {
        write_askable(&mut askables, a);
    }
    groups.push(askables);

    let mut rules = String::new();
    for r in &kb.rules {
        rules.push_str(&serialize_rule(r));
        rules.push('\n');
    }
    groups.push(rules);

    let mut net = String::new();
    for t in &kb.triples {
        let _ = writeln!(net, "net {} ( {} , {} ) .", t.relation, t.subject, t.object);
    }
    groups.push(net);

    groups.retain(|g| !g.is_empty());
    groups.join("\n")
}

/// One rule statement without the trailing newline.
pub fn serialize_rule(rule: &Rule) -> String {
    let mut out = String::new();
    let _ = write!(out, "rule {}: if ", rule.id);
    write_premise(&mut out, &rule.premise, Context::Top);
    let _ = write!(out, " then {} cf {} .", rule.conclusion, rule.cf);
    out
}

/// Source text of a premise subtree, as it would appear after `if`.
pub fn premise_text(premise: &Premise) -> String {
    let mut out = String::new();
    write_premise(&mut out, premise, Context::Top);
    out
}

fn write_askable(out: &mut String, a: &Askable) {
    let prompt = super::ast::Value::Str(a.prompt.clone());
    let _ = write!(out, "askable {} prompt {prompt}", a.attribute);
    if let Some(menu) = &a.menu {
        out.push_str(" menu (");
        for (i, v) in menu.iter().enumerate() {
            out.push_str(if i == 0 { " " } else { " , " });
            let _ = write!(out, "{v}");
        }
        out.push_str(" )");
    }
    out.push_str(" .\n");
}

#[derive(Clone, Copy, PartialEq)]
enum Context {
    Top,
    InAll,
    InAny,
}

/// Parenthesizes only where the tree shape would otherwise be lost: an `or`
/// inside an `and`, and a group nested in a group of the same kind.
fn write_premise(out: &mut String, p: &Premise, ctx: Context) {
    match p {
        Premise::Test(t) => {
            let _ = write!(out, "{t}");
        }
        Premise::All(cs) => {
            let paren = ctx == Context::InAll;
            write_group(out, cs, " and ", Context::InAll, paren);
        }
        Premise::Any(cs) => {
            let paren = ctx != Context::Top;
            write_group(out, cs, " or ", Context::InAny, paren);
        }
    }
}

fn write_group(out: &mut String, children: &[Premise], sep: &str, inner: Context, paren: bool) {
    if paren {
        out.push('(');
    }
    for (i, c) in children.iter().enumerate() {
        if i > 0 {
            out.push_str(sep);
        }
        write_premise(out, c, inner);
    }
    if paren {
        out.push(')');
    }
}
