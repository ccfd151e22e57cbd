//! Random knowledge-base generators.

use mkbs_core::{AVPair, Askable, CertaintyFactor, KnowledgeBase, Premise, Rule, Span, Triple, Value};
use mkbs_core::rulelang::Goal;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::script::random_cf;

/// Limits for [`random_engine_kb`].
#[derive(Debug, Clone, Copy)]
pub struct EngineKbShape {
    pub max_rules: usize,
    pub max_askables: usize,
}

impl Default for EngineKbShape {
    fn default() -> Self {
        EngineKbShape { max_rules: 8, max_askables: 5 }
    }
}

pub const ENGINE_GOAL: &str = "dx";
const INTERMEDIATES: [&str; 3] = ["m0", "m1", "m2"];
const MENU: [&str; 3] = ["low", "mid", "high"];

fn cf(v: f64) -> CertaintyFactor {
    CertaintyFactor::new(v).expect("generated cfs are in range")
}

fn ident_pair(a: &str, v: &str) -> AVPair {
    AVPair::ident(a, v)
}

/// An acyclic KB over askables `s0..`, intermediates `m0..m2`, an undefined
/// attribute `u0`, and the goal `dx`. Attributes only depend on attributes of
/// a lower level, so every generated KB is free of goal cycles.
pub fn random_engine_kb<R: Rng>(rng: &mut R, shape: EngineKbShape) -> KnowledgeBase {
    let n_askables = rng.random_range(1..=shape.max_askables);
    let mut askables = Vec::new();
    for i in 0..n_askables {
        let menu = rng.random_bool(0.25).then(|| MENU.iter().map(|v| Value::ident(*v)).collect());
        askables.push(Askable {
            attribute: format!("s{i}"),
            prompt: format!("question about s{i} = {{value}}?"),
            menu,
            span: Span::default(),
        });
    }

    let n_rules = rng.random_range(1..=shape.max_rules);
    let mut rules = Vec::new();
    for i in 0..n_rules {
        let level = if rng.random_bool(0.6) { INTERMEDIATES.len() } else { rng.random_range(0..INTERMEDIATES.len()) };
        let conclusion = if level == INTERMEDIATES.len() {
            ident_pair(ENGINE_GOAL, ["c0", "c1", "c2"].choose(rng).unwrap())
        } else {
            ident_pair(INTERMEDIATES[level], ["yes", "no"].choose(rng).unwrap())
        };
        let premise = random_engine_premise(rng, &askables, level, 0);
        rules.push(Rule { id: format!("r{i}"), premise, conclusion, cf: cf(random_cf(rng)), span: Span::default() });
    }

    KnowledgeBase {
        rules,
        askables,
        goals: vec![Goal { attribute: ENGINE_GOAL.into(), span: Span::default() }],
        triples: Vec::new(),
    }
}

fn random_engine_test<R: Rng>(rng: &mut R, askables: &[Askable], level: usize) -> AVPair {
    let roll = rng.random_range(0..10);
    if roll == 0 {
        return ident_pair("u0", "yes");
    }
    if roll < 4 && level > 0 {
        let m = INTERMEDIATES[rng.random_range(0..level)];
        return ident_pair(m, ["yes", "no"].choose(rng).unwrap());
    }
    let a = askables.choose(rng).unwrap();
    let value = match &a.menu {
        // sometimes a value the menu does not offer
        Some(_) => *[MENU[0], MENU[1], MENU[2], "other"].choose(rng).unwrap(),
        None => *["yes", "no"].choose(rng).unwrap(),
    };
    ident_pair(&a.attribute, value)
}

fn random_engine_premise<R: Rng>(rng: &mut R, askables: &[Askable], level: usize, depth: usize) -> Premise {
    if depth >= 3 || rng.random_bool(if depth == 0 { 0.25 } else { 0.55 }) {
        return Premise::Test(random_engine_test(rng, askables, level));
    }
    let n = rng.random_range(2..=3);
    let children = (0..n).map(|_| random_engine_premise(rng, askables, level, depth + 1)).collect();
    if rng.random_bool(0.6) {
        Premise::All(children)
    } else {
        Premise::Any(children)
    }
}

/// Names that double as keywords, to exercise contextual keyword handling.
const NAME_POOL: [&str; 16] = [
    "fever", "cough", "and", "or", "goal", "rule", "then", "cf", "if", "net", "menu", "prompt", "askable",
    "x_1", "isa", "diagnosis",
];

fn random_string<R: Rng>(rng: &mut R) -> String {
    const CHARS: [char; 14] = ['a', 'Z', ' ', '"', '\\', '\n', '\t', 'é', '%', '.', '(', ':', '?', '{'];
    let len = rng.random_range(0..12);
    (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect()
}

fn random_value<R: Rng>(rng: &mut R) -> Value {
    match rng.random_range(0..4) {
        0 => Value::Str(random_string(rng)),
        1 => {
            let sign = if rng.random_bool(0.2) { "-" } else { "" };
            let int = rng.random_range(0..1000);
            if rng.random_bool(0.5) {
                Value::Num(format!("{sign}{int}.{:0>2}", rng.random_range(0..100)))
            } else {
                Value::Num(format!("{sign}{int}"))
            }
        }
        _ => Value::ident(*NAME_POOL.choose(rng).unwrap()),
    }
}

/// A certainty factor with at most six significant digits.
fn random_short_cf<R: Rng>(rng: &mut R) -> f64 {
    let digits = rng.random_range(0..=6);
    let scale = 10u32.pow(digits) as f64;
    rng.random_range(0..=10u32.pow(digits)) as f64 / scale
}

fn random_syntax_premise<R: Rng>(rng: &mut R, below: usize, depth: usize) -> Premise {
    if depth >= 4 || rng.random_bool(0.45) {
        let attr = NAME_POOL[rng.random_range(0..below)];
        return Premise::Test(AVPair::new(attr, random_value(rng)));
    }
    let n = rng.random_range(2..=4);
    let children = (0..n).map(|_| random_syntax_premise(rng, below, depth + 1)).collect();
    if rng.random_bool(0.5) {
        Premise::All(children)
    } else {
        Premise::Any(children)
    }
}

/// A KB that exercises the whole grammar: odd strings and numbers, keyword
/// names, menus, nested groups, and an acyclic `isa` net. Valid (no errors).
pub fn random_syntax_kb<R: Rng>(rng: &mut R) -> KnowledgeBase {
    let mut kb = KnowledgeBase::default();

    let mut attrs: Vec<&str> = NAME_POOL.to_vec();
    attrs.truncate(rng.random_range(0..=NAME_POOL.len()));
    for attr in &attrs {
        if rng.random_bool(0.5) {
            continue;
        }
        let menu = rng.random_bool(0.4).then(|| {
            let mut values: Vec<Value> = (0..rng.random_range(1..5)).map(|_| random_value(rng)).collect();
            values.sort();
            values.dedup();
            values
        });
        kb.askables.push(Askable { attribute: (*attr).into(), prompt: random_string(rng), menu, span: Span::default() });
    }

    for _ in 0..rng.random_range(0..3) {
        let attr = NAME_POOL.choose(rng).unwrap();
        if !kb.is_goal(attr) {
            kb.goals.push(Goal { attribute: (*attr).into(), span: Span::default() });
        }
    }

    for i in 0..rng.random_range(0..10) {
        // conclusions depend only on attributes earlier in the pool
        let level = rng.random_range(1..NAME_POOL.len());
        kb.rules.push(Rule {
            id: format!("{}{i}", NAME_POOL.choose(rng).unwrap()),
            premise: random_syntax_premise(rng, level, 0),
            conclusion: AVPair::new(NAME_POOL[level], random_value(rng)),
            cf: cf(random_short_cf(rng)),
            span: Span::default(),
        });
    }

    let nodes: Vec<String> = (0..rng.random_range(0..8)).map(|i| format!("n{i}")).collect();
    for (i, node) in nodes.iter().enumerate() {
        if i > 0 && rng.random_bool(0.7) {
            kb.triples.push(Triple::new("isa", node, &nodes[rng.random_range(0..i)]));
        }
        if rng.random_bool(0.5) {
            kb.triples.push(Triple::new(NAME_POOL.choose(rng).unwrap(), node, NAME_POOL.choose(rng).unwrap()));
        }
    }
    kb
}

/// A random `isa` DAG with property triples. Node `i` only points at nodes
/// `j < i`, and may have several parents.
pub fn random_net<R: Rng>(rng: &mut R, max_nodes: usize) -> (Vec<String>, Vec<Triple>) {
    let n = rng.random_range(1..=max_nodes);
    let nodes: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
    let mut triples = Vec::new();
    for i in 1..n {
        let parents = rng.random_range(0..=3.min(i));
        for _ in 0..parents {
            let j = rng.random_range(0..i);
            triples.push(Triple::new("isa", &nodes[i], &nodes[j]));
        }
    }
    for _ in 0..rng.random_range(0..2 * n) {
        let relation = ["treatment", "symptom"].choose(rng).unwrap();
        let subject = nodes.choose(rng).unwrap();
        triples.push(Triple::new(relation, subject, &format!("t{}", rng.random_range(0..12))));
    }
    (nodes, triples)
}
