use std::collections::BTreeMap;

use mkbs_core::{Answer, AnswerProvider, AVPair, CertaintyFactor, KnowledgeBase, Question, Value};
use rand::Rng;

/// A complete answer script: a cf for every askable pair the engine could ask
/// about, and a single pick for menu askables.
#[derive(Debug, Clone, Default)]
pub struct RandomScript {
    pub pairs: BTreeMap<AVPair, f64>,
    pub choices: BTreeMap<String, (Value, f64)>,
}

/// Certainty factors drawn from a coarse grid, with 0 and 1 over-represented.
pub fn random_cf<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.random_range(0..=1000) as f64 / 1000.0,
    }
}

impl RandomScript {
    pub fn generate<R: Rng>(rng: &mut R, kb: &KnowledgeBase) -> Self {
        let mut script = RandomScript::default();
        let mut tested: Vec<AVPair> = kb
            .rules
            .iter()
            .flat_map(|r| r.premise.tests())
            .cloned()
            .collect();
        tested.sort();
        tested.dedup();
        for askable in &kb.askables {
            match &askable.menu {
                Some(menu) => {
                    let pick = menu[rng.random_range(0..menu.len())].clone();
                    script.choices.insert(askable.attribute.clone(), (pick, random_cf(rng)));
                }
                None => {
                    for pair in tested.iter().filter(|p| p.attribute == askable.attribute) {
                        script.pairs.insert(pair.clone(), random_cf(rng));
                    }
                }
            }
        }
        script
    }

    /// The cf this script implies for `pair`, if the script covers its attribute.
    pub fn cf_for(&self, pair: &AVPair) -> Option<f64> {
        if let Some((pick, cf)) = self.choices.get(&pair.attribute) {
            return Some(if *pick == pair.value { *cf } else { 0.0 });
        }
        self.pairs.get(pair).copied()
    }
}

impl AnswerProvider for RandomScript {
    type Error = String;

    fn answer(&mut self, q: &Question) -> Result<Answer, String> {
        let cf = |v: f64| CertaintyFactor::new(v).map_err(|e| e.to_string());
        if let Some((pick, v)) = self.choices.get(&q.avpair.attribute) {
            return Ok(Answer::choose(pick.clone(), cf(*v)?));
        }
        match self.pairs.get(&q.avpair) {
            Some(v) => Ok(Answer::with_cf(cf(*v)?)),
            None => Err(format!("unscripted question {}", q.avpair)),
        }
    }
}
