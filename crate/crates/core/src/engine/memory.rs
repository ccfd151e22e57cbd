use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::cf::CertaintyFactor;
use crate::rulelang::AVPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Asked,
    Derived,
}

/// `Known(avpair, cf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownFact {
    pub avpair: AVPair,
    pub cf: CertaintyFactor,
    pub origin: Origin,
}

/// Facts established during one consultation. A fact is written once and
/// never replaced, which is what keeps the engine from asking twice.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkingMemory {
    facts: BTreeMap<AVPair, KnownFact>,
    asked: Vec<AVPair>,
    /// Menu attributes answered with a pick: every value not picked is false.
    settled: BTreeSet<String>,
}

impl WorkingMemory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, avpair: &AVPair) -> Option<&KnownFact> {
        self.facts.get(avpair)
    }

    pub fn cf(&self, avpair: &AVPair) -> Option<CertaintyFactor> {
        self.get(avpair).map(|f| f.cf)
    }

    /// Stores a fact unless one is already known; returns whether it was stored.
    pub fn record(&mut self, avpair: AVPair, cf: CertaintyFactor, origin: Origin) -> bool {
        if self.facts.contains_key(&avpair) {
            return false;
        }
        self.facts.insert(avpair.clone(), KnownFact { avpair, cf, origin });
        true
    }

    /// A menu pick can name a pair that an earlier plain answer already
    /// covered; the log keeps each pair once.
    pub(crate) fn log_question(&mut self, avpair: AVPair) {
        if !self.asked.contains(&avpair) {
            self.asked.push(avpair);
        }
    }

    pub(crate) fn settle(&mut self, attribute: &str) {
        self.settled.insert(attribute.into());
    }

    /// Whether a menu pick has already decided every value of `attribute`.
    pub fn is_settled(&self, attribute: &str) -> bool {
        self.settled.contains(attribute)
    }

    /// Questions in the order they were put to the user.
    pub fn questions_asked(&self) -> &[AVPair] {
        &self.asked
    }

    pub fn facts(&self) -> impl Iterator<Item = &KnownFact> {
        self.facts.values()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}
