//! Semantic net over `relation(subject, object)` triples.
//!
//! `isa` edges form the hierarchy (child to parent). Every other relation is an
//! opaque property label, and properties are inherited downward: a subtype has
//! its ancestors' properties as well as its own.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use crate::rulelang::{KnowledgeBase, Triple};

pub const ISA: &str = "isa";

#[derive(Debug, Clone, Default)]
pub struct SemanticNet {
    triples: Vec<Triple>,
    by_relation: BTreeMap<String, Vec<usize>>,
    by_subject: BTreeMap<String, Vec<usize>>,
    parents: BTreeMap<String, Vec<String>>,
    children: BTreeMap<String, Vec<String>>,
}

/// One answer object; `via` names the ancestor it was inherited from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetResult {
    pub object: String,
    pub via: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetAnswer {
    pub relation: String,
    pub node: String,
    pub results: Vec<NetResult>,
}

impl NetAnswer {
    pub fn is_empty(&self) -> bool {
        self.results.is_empty()
    }

    pub fn objects(&self) -> impl Iterator<Item = &str> {
        self.results.iter().map(|r| r.object.as_str())
    }
}

impl SemanticNet {
    /// Builds the indexes. The `isa` graph should already be known to be
    /// acyclic (see `validate_kb`); cycles would not hang the queries, but the
    /// answers would be meaningless.
    pub fn new(triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut net = SemanticNet::default();
        for t in triples {
            let i = net.triples.len();
            net.by_relation.entry(t.relation.clone()).or_default().push(i);
            net.by_subject.entry(t.subject.clone()).or_default().push(i);
            if t.relation == ISA {
                push_unique(net.parents.entry(t.subject.clone()).or_default(), &t.object);
                push_unique(net.children.entry(t.object.clone()).or_default(), &t.subject);
            }
            net.triples.push(t);
        }
        net
    }

    pub fn from_kb(kb: &KnowledgeBase) -> Self {
        SemanticNet::new(kb.triples.iter().cloned())
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    /// Triples with the given relation, in source order.
    pub fn with_relation<'a>(&'a self, relation: &str) -> impl Iterator<Item = &'a Triple> + 'a {
        self.by_relation.get(relation).into_iter().flatten().map(|&i| &self.triples[i])
    }

    /// Triples with the given subject, in source order.
    pub fn with_subject<'a>(&'a self, subject: &str) -> impl Iterator<Item = &'a Triple> + 'a {
        self.by_subject.get(subject).into_iter().flatten().map(|&i| &self.triples[i])
    }

    /// Relations present in the net, sorted.
    pub fn relations(&self) -> impl Iterator<Item = &str> {
        self.by_relation.keys().map(String::as_str)
    }

    /// Every transitive `isa` descendant, breadth-first, without `node` itself.
    pub fn subtypes(&self, node: &str) -> Vec<String> {
        breadth_first(&self.children, node).into_iter().map(|(n, _)| n).collect()
    }

    /// Every transitive `isa` ancestor, nearest first.
    pub fn ancestors(&self, node: &str) -> Vec<String> {
        breadth_first(&self.parents, node).into_iter().map(|(n, _)| n).collect()
    }

    /// Objects `x` of `relation(node, x)`, then (with `inherit`) those of each
    /// ancestor in breadth-first order, skipping objects already listed.
    ///
    /// `isa` itself is not inherited: asking for `isa` gives the direct parents.
    /// Use [`SemanticNet::ancestors`] for the whole chain.
    pub fn query(&self, relation: &str, node: &str, inherit: bool) -> NetAnswer {
        let mut results: Vec<NetResult> = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut collect = |subject: &str, via: Option<&str>, results: &mut Vec<NetResult>| {
            for t in self.with_subject(subject).filter(|t| t.relation == relation) {
                if seen.insert(t.object.as_str()) {
                    results.push(NetResult { object: t.object.clone(), via: via.map(String::from) });
                }
            }
        };
        collect(node, None, &mut results);
        if inherit && relation != ISA {
            for ancestor in self.ancestors(node) {
                collect(&ancestor, Some(&ancestor), &mut results);
            }
        }
        NetAnswer { relation: relation.into(), node: node.into(), results }
    }

    /// Inherited query for every relation in the net, leaving out empty ones.
    pub fn describe(&self, node: &str) -> BTreeMap<String, NetAnswer> {
        self.relations()
            .map(|r| (String::from(r), self.query(r, node, true)))
            .filter(|(_, a)| !a.is_empty())
            .collect()
    }
}

fn push_unique(list: &mut Vec<String>, item: &str) {
    if !list.iter().any(|x| x == item) {
        list.push(item.into());
    }
}

/// Nodes reachable from `start` with their distance, in visiting order.
fn breadth_first(edges: &BTreeMap<String, Vec<String>>, start: &str) -> Vec<(String, usize)> {
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    seen.insert(start);
    let mut queue: VecDeque<(&str, usize)> = VecDeque::new();
    queue.push_back((start, 0));
    let mut out = Vec::new();
    while let Some((node, dist)) = queue.pop_front() {
        for next in edges.get(node).into_iter().flatten() {
            if seen.insert(next.as_str()) {
                out.push((next.clone(), dist + 1));
                queue.push_back((next.as_str(), dist + 1));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lung_cancer_net() -> SemanticNet {
        let mut triples = vec![
            Triple::new("isa", "lung_cancer", "cancer"),
            Triple::new("isa", "mesothelioma", "lung_cancer"),
            Triple::new("isa", "primary_lung_cancer", "lung_cancer"),
        ];
        for t in ["surgery", "radio_therapy", "chemotherapy", "hormonal_therapy"] {
            triples.push(Triple::new("treatment", "lung_cancer", t));
        }
        SemanticNet::new(triples)
    }

    #[test]
    fn hierarchy() {
        let net = lung_cancer_net();
        assert_eq!(net.subtypes("cancer"), vec!["lung_cancer", "mesothelioma", "primary_lung_cancer"]);
        assert!(net.subtypes("mesothelioma").is_empty());
        assert_eq!(net.ancestors("mesothelioma"), vec!["lung_cancer", "cancer"]);
        assert!(net.ancestors("cancer").is_empty());
        assert!(net.ancestors("nowhere").is_empty());
    }

    #[test]
    fn direct_and_inherited_treatments() {
        let net = lung_cancer_net();
        let direct = net.query("treatment", "lung_cancer", false);
        assert_eq!(
            direct.objects().collect::<Vec<_>>(),
            vec!["surgery", "radio_therapy", "chemotherapy", "hormonal_therapy"]
        );
        assert!(direct.results.iter().all(|r| r.via.is_none()));

        let inherited = net.query("treatment", "mesothelioma", true);
        assert_eq!(inherited.objects().collect::<Vec<_>>(), direct.objects().collect::<Vec<_>>());
        assert!(inherited.results.iter().all(|r| r.via.as_deref() == Some("lung_cancer")));
        assert!(net.query("treatment", "mesothelioma", false).is_empty());
        assert!(net.query("treatment", "unknown_node", true).is_empty());
    }

    #[test]
    fn describe_node() {
        let net = lung_cancer_net();
        let d = net.describe("mesothelioma");
        assert_eq!(d.keys().collect::<Vec<_>>(), vec!["isa", "treatment"]);
        assert_eq!(d["isa"].objects().collect::<Vec<_>>(), vec!["lung_cancer"]);
        assert_eq!(d["treatment"].results.len(), 4);
        assert!(net.describe("cancer").is_empty());
        assert!(SemanticNet::default().describe("x").is_empty());
    }

    #[test]
    fn diamond_yields_one_entry() {
        let net = SemanticNet::new(vec![
            Triple::new("isa", "d", "b"),
            Triple::new("isa", "d", "c"),
            Triple::new("isa", "b", "a"),
            Triple::new("isa", "c", "a"),
            Triple::new("risk", "a", "smoking"),
            Triple::new("risk", "c", "smoking"),
        ]);
        assert_eq!(net.ancestors("d"), vec!["b", "c", "a"]);
        let q = net.query("risk", "d", true);
        assert_eq!(q.results, vec![NetResult { object: "smoking".into(), via: Some("c".into()) }]);
    }

    #[test]
    fn indexes_agree_with_triples() {
        let net = lung_cancer_net();
        let mut from_index: Vec<&Triple> = net.relations().flat_map(|r| net.with_relation(r)).collect();
        assert_eq!(from_index.len(), net.triples().len());
        from_index.sort_by_key(|t| (&t.relation, &t.subject, &t.object));
        let mut flat: Vec<&Triple> = net.triples().iter().collect();
        flat.sort_by_key(|t| (&t.relation, &t.subject, &t.object));
        assert_eq!(from_index, flat);
        assert_eq!(net.with_subject("lung_cancer").count(), 5);
    }
}
