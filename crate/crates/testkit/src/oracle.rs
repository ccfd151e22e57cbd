//! Deliberately naive reference implementations.

use std::collections::BTreeMap;

use mkbs_core::{AVPair, KnowledgeBase, Premise};

use crate::script::RandomScript;

/// Certainty of `pair` by plain recursion: no working memory, no pruning.
/// Must only be used on acyclic knowledge bases.
pub fn brute_force_cf(kb: &KnowledgeBase, pair: &AVPair, script: &RandomScript) -> f64 {
    let rules: Vec<_> = kb.rules.iter().filter(|r| &r.conclusion == pair).collect();
    if !rules.is_empty() {
        let mut total: Option<f64> = None;
        for rule in rules {
            let contribution = rule.cf.value() * premise_cf(kb, &rule.premise, script);
            total = Some(match total {
                None => contribution,
                Some(a) => a + contribution * (1.0 - a),
            });
        }
        return total.unwrap();
    }
    if kb.askable(&pair.attribute).is_some() {
        return script.cf_for(pair).expect("script covers every askable pair");
    }
    0.0
}

fn premise_cf(kb: &KnowledgeBase, premise: &Premise, script: &RandomScript) -> f64 {
    match premise {
        Premise::Test(p) => brute_force_cf(kb, p, script),
        Premise::All(cs) => cs.iter().map(|c| premise_cf(kb, c, script)).fold(1.0, f64::min),
        Premise::Any(cs) => cs.iter().map(|c| premise_cf(kb, c, script)).fold(0.0, f64::max),
    }
}

/// Attributes that can reach themselves through rule dependencies
/// (conclusion attribute -> premise attribute), via a Warshall closure.
pub fn cyclic_attributes_brute_force(kb: &KnowledgeBase) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    let id = |n: &str, names: &mut Vec<String>| match names.iter().position(|x| x == n) {
        Some(i) => i,
        None => {
            names.push(n.to_string());
            names.len() - 1
        }
    };
    let mut edges = Vec::new();
    for r in &kb.rules {
        let from = id(&r.conclusion.attribute, &mut names);
        for t in r.premise.tests() {
            edges.push((from, id(&t.attribute, &mut names)));
        }
    }
    let n = names.len();
    let mut reach = vec![vec![false; n]; n];
    for (a, b) in edges {
        reach[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    let mut out: Vec<String> = (0..n).filter(|&i| reach[i][i]).map(|i| names[i].clone()).collect();
    out.sort();
    out
}

/// Shortest-path distances over directed `edges` (Floyd-Warshall); `None` if unreachable.
pub fn closure_distances(nodes: &[String], edges: &[(String, String)]) -> BTreeMap<(String, String), usize> {
    let n = nodes.len();
    let idx = |s: &str| nodes.iter().position(|x| x == s).expect("edge endpoints are nodes");
    let inf = usize::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (a, b) in edges {
        d[idx(a)][idx(b)] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] < inf {
                out.insert((nodes[i].clone(), nodes[j].clone()), d[i][j]);
            }
        }
    }
    out
}
