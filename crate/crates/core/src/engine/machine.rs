use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use super::memory::{Origin, WorkingMemory};
use super::trace::{NodeKind, RuleEval, TraceNode};
use super::{
    Answer, AnswerProvider, Candidate, ConsultError, ConsultationResult, EngineConfig, EngineError,
    Question,
};
use crate::cf::{cf_parallel, cf_rule, CertaintyFactor};
use crate::rulelang::{premise_text, AVPair, KnowledgeBase, Premise, Value};

/// Activation records of the explicit proof stack.
#[derive(Debug, Clone)]
enum Frame {
    /// Trying, in order, every rule that concludes `pair`.
    Goal {
        pair: AVPair,
        rules: Vec<usize>,
        next: usize,
        acc: Option<CertaintyFactor>,
        children: Vec<TraceNode>,
    },
    /// Evaluating one rule's premise; `premise` holds the finished premise node.
    Rule { rule: usize, started: bool, premise: Option<TraceNode> },
    /// An `and`/`or` group, addressed by its path inside the rule's premise tree.
    Group {
        rule: usize,
        path: Vec<usize>,
        next: usize,
        running: Option<CertaintyFactor>,
        pruned: bool,
        children: Vec<TraceNode>,
    },
}

enum Action {
    Push(Frame),
    Prove(AVPair),
    Return(TraceNode),
}

pub(crate) enum Poll {
    Asking,
    Proved(TraceNode),
}

/// Proves one fact at a time on an explicit stack. When it reaches an askable
/// fact that is not yet known it parks with a pending question; `answer`
/// resumes it where it stopped.
#[derive(Debug, Clone)]
pub(crate) struct Prover<K> {
    kb: K,
    config: EngineConfig,
    wm: WorkingMemory,
    stack: Vec<Frame>,
    pending: Option<Question>,
}

fn goal_node(pair: &AVPair, cf: CertaintyFactor, children: Vec<TraceNode>) -> TraceNode {
    TraceNode::new(NodeKind::Goal, format!("{pair}"), cf).with_children(children)
}

impl<K: Deref<Target = KnowledgeBase>> Prover<K> {
    pub(crate) fn new(kb: K, config: EngineConfig, wm: WorkingMemory) -> Self {
        Prover { kb, config, wm, stack: Vec::new(), pending: None }
    }

    pub(crate) fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub(crate) fn wm(&self) -> &WorkingMemory {
        &self.wm
    }

    pub(crate) fn into_wm(self) -> WorkingMemory {
        self.wm
    }

    pub(crate) fn pending(&self) -> Option<&Question> {
        self.pending.as_ref()
    }

    /// Starts proving `goal`. The stack must be empty.
    pub(crate) fn begin(&mut self, goal: AVPair) -> Result<Poll, EngineError> {
        debug_assert!(self.stack.is_empty() && self.pending.is_none());
        match self.enter(goal)? {
            Some(node) => match self.deliver(node) {
                Some(done) => Ok(Poll::Proved(done)),
                None => self.run(),
            },
            None if self.pending.is_some() => Ok(Poll::Asking),
            None => self.run(),
        }
    }

    /// Records the answer to the pending question and continues.
    pub(crate) fn answer(&mut self, answer: Answer) -> Result<Poll, EngineError> {
        let question = self.pending.as_ref().ok_or(EngineError::NotAsking)?;
        let pair = question.avpair.clone();

        match (&answer.choice, &question.menu) {
            (Some(choice), Some(menu)) => {
                if !menu.contains(choice) {
                    return Err(EngineError::InvalidChoice {
                        attribute: pair.attribute.clone(),
                        value: choice.clone(),
                    });
                }
                let menu = menu.clone();
                let attribute = &pair.attribute;
                self.wm.record(AVPair::new(attribute.clone(), choice.clone()), answer.cf, Origin::Asked);
                for other in menu.into_iter().filter(|v| v != choice) {
                    self.wm.record(AVPair::new(attribute.clone(), other), CertaintyFactor::FALSE, Origin::Asked);
                }
                // the asked value may be missing from the menu; picking something else still rules it out
                self.wm.record(pair.clone(), CertaintyFactor::FALSE, Origin::Asked);
                self.wm.settle(attribute);
            }
            (Some(choice), None) if *choice != pair.value => {
                return Err(EngineError::InvalidChoice {
                    attribute: pair.attribute.clone(),
                    value: choice.clone(),
                });
            }
            _ => {
                self.wm.record(pair.clone(), answer.cf, Origin::Asked);
            }
        }
        let question = self.pending.take().expect("checked above");
        let cf = self.wm.cf(&pair).expect("just recorded");
        // a menu pick answers for the whole attribute, so the log keeps the picked pair
        let asserted = match (answer.choice, &question.menu) {
            (Some(choice), Some(_)) => AVPair::new(pair.attribute.clone(), choice),
            _ => pair.clone(),
        };
        self.wm.log_question(asserted);

        let mut ask = TraceNode::new(NodeKind::Ask, format!("{pair}"), cf);
        ask.prompt = Some(question.prompt);
        let node = goal_node(&pair, cf, alloc::vec![ask]);
        match self.deliver(node) {
            Some(done) => Ok(Poll::Proved(done)),
            None => self.run(),
        }
    }

    fn goal_depth(&self) -> usize {
        self.stack.iter().filter(|f| matches!(f, Frame::Goal { .. })).count()
    }

    /// Opens a proof of `pair`. Returns the finished node when no work is
    /// needed, or `None` after pushing a frame or parking on a question.
    fn enter(&mut self, pair: AVPair) -> Result<Option<TraceNode>, EngineError> {
        if self.wm.get(&pair).is_none() && self.wm.is_settled(&pair.attribute) {
            self.wm.record(pair.clone(), CertaintyFactor::FALSE, Origin::Asked);
        }
        if let Some(fact) = self.wm.get(&pair) {
            let cf = fact.cf;
            let known = TraceNode::new(NodeKind::Test, format!("{pair} (known)"), cf);
            return Ok(Some(goal_node(&pair, cf, alloc::vec![known])));
        }
        if self.goal_depth() >= self.config.max_depth {
            return Err(EngineError::DepthExceeded { goal: pair, limit: self.config.max_depth });
        }

        let rules: Vec<usize> = self.kb.rules_concluding(&pair).map(|(i, _)| i).collect();
        if !rules.is_empty() {
            self.stack.push(Frame::Goal { pair, rules, next: 0, acc: None, children: Vec::new() });
            return Ok(None);
        }
        if let Some(askable) = self.kb.askable(&pair.attribute) {
            self.pending = Some(Question {
                prompt: askable.render_prompt(&pair),
                menu: askable.menu.clone(),
                avpair: pair,
            });
            return Ok(None);
        }

        self.wm.record(pair.clone(), CertaintyFactor::FALSE, Origin::Derived);
        let leaf = TraceNode::new(NodeKind::Test, format!("{pair} (unprovable)"), CertaintyFactor::FALSE);
        Ok(Some(goal_node(&pair, CertaintyFactor::FALSE, alloc::vec![leaf])))
    }

    /// Hands a finished node to the frame below; returns it if the stack is empty.
    fn deliver(&mut self, node: TraceNode) -> Option<TraceNode> {
        let threshold = self.config.threshold;
        match self.stack.last_mut() {
            None => Some(node),
            Some(Frame::Goal { acc, children, .. }) => {
                *acc = Some(match *acc {
                    None => node.cf,
                    Some(a) => cf_parallel(a, node.cf),
                });
                children.push(node);
                None
            }
            Some(Frame::Rule { premise, .. }) => {
                *premise = Some(node);
                None
            }
            Some(Frame::Group { rule, path, running, pruned, children, .. }) => {
                let is_all = matches!(self.kb.rules[*rule].premise.at_path(path), Some(Premise::All(_)));
                let v = node.effective_cf();
                *running = Some(match *running {
                    None => v,
                    Some(r) if is_all => if v.value() < r.value() { v } else { r },
                    Some(r) => if v.value() > r.value() { v } else { r },
                });
                children.push(node);
                if is_all && running.is_some_and(|r| r.value() < threshold.value()) {
                    *pruned = true;
                }
                None
            }
        }
    }

    fn run(&mut self) -> Result<Poll, EngineError> {
        loop {
            let action = self.advance();
            let node = match action {
                Action::Push(frame) => {
                    self.stack.push(frame);
                    continue;
                }
                Action::Prove(pair) => match self.enter(pair)? {
                    Some(node) => node,
                    None if self.pending.is_some() => return Ok(Poll::Asking),
                    None => continue,
                },
                Action::Return(node) => {
                    self.stack.pop();
                    node
                }
            };
            if let Some(done) = self.deliver(node) {
                return Ok(Poll::Proved(done));
            }
        }
    }

    /// Decides the next move of the top frame.
    fn advance(&mut self) -> Action {
        let kb: &KnowledgeBase = &self.kb;
        let frame = self.stack.last_mut().expect("run() needs a frame");
        match frame {
            Frame::Goal { pair, rules, next, acc, children } => {
                if let Some(&rule) = rules.get(*next) {
                    *next += 1;
                    return Action::Push(Frame::Rule { rule, started: false, premise: None });
                }
                let cf = acc.unwrap_or(CertaintyFactor::FALSE);
                self.wm.record(pair.clone(), cf, Origin::Derived);
                Action::Return(goal_node(pair, cf, core::mem::take(children)))
            }
            Frame::Rule { rule, started, premise } => {
                let r = &kb.rules[*rule];
                if !*started {
                    *started = true;
                    return match &r.premise {
                        Premise::Test(pair) => Action::Prove(pair.clone()),
                        Premise::All(_) | Premise::Any(_) => Action::Push(Frame::Group {
                            rule: *rule,
                            path: Vec::new(),
                            next: 0,
                            running: None,
                            pruned: false,
                            children: Vec::new(),
                        }),
                    };
                }
                let premise = premise.take().expect("premise evaluated before the rule resumes");
                let premise_cf = premise.effective_cf();
                let cf = cf_rule(r.cf, premise_cf);
                let mut node = TraceNode::new(NodeKind::Rule, format!("{}: {}", r.id, r.conclusion), cf)
                    .with_children(alloc::vec![premise]);
                node.rule = Some(RuleEval { id: r.id.clone(), rule_cf: r.cf, premise_cf });
                Action::Return(node)
            }
            Frame::Group { rule, path, next, running, pruned, children } => {
                let (is_all, members) = match kb.rules[*rule].premise.at_path(path) {
                    Some(Premise::All(cs)) => (true, cs),
                    Some(Premise::Any(cs)) => (false, cs),
                    _ => unreachable!("group frames point at groups"),
                };
                let label = if is_all { "and" } else { "or" };
                if *pruned {
                    let mut node = TraceNode::new(NodeKind::Pruned, label.into(), running.expect("pruned after a child"))
                        .with_children(core::mem::take(children));
                    node.unevaluated = members[*next..].iter().map(premise_text).collect();
                    return Action::Return(node);
                }
                match members.get(*next) {
                    Some(member) => {
                        let index = *next;
                        *next += 1;
                        match member {
                            Premise::Test(pair) => Action::Prove(pair.clone()),
                            Premise::All(_) | Premise::Any(_) => {
                                let mut child_path = path.clone();
                                child_path.push(index);
                                Action::Push(Frame::Group {
                                    rule: *rule,
                                    path: child_path,
                                    next: 0,
                                    running: None,
                                    pruned: false,
                                    children: Vec::new(),
                                })
                            }
                        }
                    }
                    None => {
                        let kind = if is_all { NodeKind::All } else { NodeKind::Any };
                        let cf = running.expect("groups are nonempty");
                        Action::Return(TraceNode::new(kind, label.into(), cf).with_children(core::mem::take(children)))
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum State {
    Ready,
    Asking,
    Done(ConsultationResult),
    Failed,
}

/// What a consultation needs next.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Ask(Question),
    Done(ConsultationResult),
}

/// A whole consultation for one goal attribute that can be paused at every
/// question. Each candidate value of the goal is proven in turn against one
/// shared working memory.
///
/// `K` is anything that derefs to the knowledge base: `&KnowledgeBase` for
/// short-lived use, `Arc<KnowledgeBase>` for sessions that outlive a borrow.
#[derive(Debug, Clone)]
pub struct Consultation<K> {
    prover: Prover<K>,
    goal: String,
    candidates: Vec<Value>,
    next: usize,
    proven: Vec<Candidate>,
    state: State,
}

impl<K: Deref<Target = KnowledgeBase>> Consultation<K> {
    /// Fails with [`EngineError::UnknownGoal`] when the attribute is neither a
    /// declared goal nor concluded by any rule.
    pub fn new(kb: K, goal: &str, config: EngineConfig) -> Result<Self, EngineError> {
        if !kb.is_goal(goal) && !kb.concludes_attribute(goal) {
            return Err(EngineError::UnknownGoal(goal.into()));
        }
        let candidates = kb.candidate_values(goal);
        Ok(Consultation {
            prover: Prover::new(kb, config, WorkingMemory::new()),
            goal: goal.into(),
            candidates,
            next: 0,
            proven: Vec::new(),
            state: State::Ready,
        })
    }

    pub fn goal(&self) -> &str {
        &self.goal
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        self.prover.kb()
    }

    pub fn working_memory(&self) -> &WorkingMemory {
        self.prover.wm()
    }

    pub fn pending_question(&self) -> Option<&Question> {
        self.prover.pending()
    }

    pub fn result(&self) -> Option<&ConsultationResult> {
        match &self.state {
            State::Done(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self.state, State::Done(_))
    }

    /// Runs until a question is needed or every candidate is proven. Calling it
    /// again while a question is pending just repeats that question.
    pub fn resume(&mut self) -> Result<Step, EngineError> {
        match &self.state {
            State::Failed => Err(EngineError::Failed),
            State::Done(r) => Ok(Step::Done(r.clone())),
            State::Asking => Ok(Step::Ask(self.prover.pending().expect("asking").clone())),
            State::Ready => self.next_candidate(),
        }
    }

    /// Answers the pending question and runs to the next stop. A rejected
    /// answer (no question pending, choice not on the menu) changes nothing.
    pub fn answer(&mut self, answer: Answer) -> Result<Step, EngineError> {
        match self.state {
            State::Asking => {}
            State::Failed => return Err(EngineError::Failed),
            _ => return Err(EngineError::NotAsking),
        }
        match self.prover.answer(answer) {
            Ok(poll) => self.drive(poll),
            Err(e @ (EngineError::InvalidChoice { .. } | EngineError::NotAsking)) => Err(e),
            Err(e) => self.fail(e),
        }
    }

    fn fail(&mut self, e: EngineError) -> Result<Step, EngineError> {
        self.state = State::Failed;
        Err(e)
    }

    fn next_candidate(&mut self) -> Result<Step, EngineError> {
        let Some(value) = self.candidates.get(self.next).cloned() else {
            return Ok(self.finish());
        };
        self.next += 1;
        match self.prover.begin(AVPair::new(self.goal.clone(), value)) {
            Ok(poll) => self.drive(poll),
            Err(e) => self.fail(e),
        }
    }

    fn drive(&mut self, poll: Poll) -> Result<Step, EngineError> {
        match poll {
            Poll::Asking => {
                self.state = State::Asking;
                Ok(Step::Ask(self.prover.pending().expect("asking").clone()))
            }
            Poll::Proved(trace) => {
                let value = self.candidates[self.next - 1].clone();
                self.proven.push(Candidate { value, cf: trace.cf, trace });
                self.state = State::Ready;
                self.next_candidate()
            }
        }
    }

    fn finish(&mut self) -> Step {
        let floor = self.prover.config.report_threshold().value();
        let mut ranked: Vec<Candidate> =
            self.proven.iter().filter(|c| c.cf.value() >= floor).cloned().collect();
        // stable: equal cfs keep first-concluded order
        ranked.sort_by(|a, b| b.cf.value().total_cmp(&a.cf.value()));
        let result = ConsultationResult {
            goal: self.goal.clone(),
            ranked,
            questions_asked: self.prover.wm().questions_asked().to_vec(),
        };
        self.state = State::Done(result.clone());
        Step::Done(result)
    }
}

/// Proves a single fact against `wm`, asking `provider` for anything askable
/// and unknown. Facts learned along the way stay in `wm`, even on error.
pub fn prove<P: AnswerProvider>(
    goal: &AVPair,
    kb: &KnowledgeBase,
    wm: &mut WorkingMemory,
    provider: &mut P,
    config: EngineConfig,
) -> Result<(CertaintyFactor, TraceNode), ConsultError<P::Error>> {
    let mut prover = Prover::new(kb, config, core::mem::take(wm));
    let outcome = (|| {
        let mut poll = prover.begin(goal.clone())?;
        loop {
            match poll {
                Poll::Proved(node) => return Ok((node.cf, node)),
                Poll::Asking => {
                    let question = prover.pending().expect("asking");
                    let answer = provider.answer(question).map_err(ConsultError::Provider)?;
                    poll = prover.answer(answer)?;
                }
            }
        }
    })();
    *wm = prover.into_wm();
    outcome
}

/// Runs a complete consultation for `goal` with a blocking answer provider.
pub fn consult<P: AnswerProvider>(
    kb: &KnowledgeBase,
    goal: &str,
    provider: &mut P,
    config: EngineConfig,
) -> Result<ConsultationResult, ConsultError<P::Error>> {
    let mut consultation = Consultation::new(kb, goal, config)?;
    let mut step = consultation.resume()?;
    loop {
        match step {
            Step::Done(result) => return Ok(result),
            Step::Ask(question) => {
                let answer = provider.answer(&question).map_err(ConsultError::Provider)?;
                step = consultation.answer(answer)?;
            }
        }
    }
}
