//! Backward proof search over set-based sequents.
//!
//! The invertible propositional rules are applied eagerly; at saturated sequents the search
//! branches over the modal rules of the logic. K4, KD4 and S4 block a saturated sequent that
//! already occurs on the current branch. GL needs no loop check: every GLR premise has a
//! strictly larger set of boxed antecedent formulas.
//!
//! Successful searches are converted into derivations of the multiplicative calculus by
//! inserting the weakenings and contractions the set reading leaves implicit.

use std::collections::{HashMap, HashSet};

use super::derivation::{Derivation, Rule};
use super::Logic;
use crate::syntax::{Formula, Sequent};

type Id = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom,
    Bot,
    Top,
    Neg(Id),
    And(Id, Id),
    Or(Id, Id),
    Imp(Id, Id),
    Box(Id),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    formulas: Vec<Formula>,
    index: HashMap<Formula, Id>,
}

impl Arena {
    fn intern(&mut self, f: &Formula) -> Id {
        if let Some(&id) = self.index.get(f) {
            return id;
        }
        let node = match f {
            Formula::Atom(_) => Node::Atom,
            Formula::Bot => Node::Bot,
            Formula::Top => Node::Top,
            Formula::Neg(a) => Node::Neg(self.intern(a)),
            Formula::And(a, b) => Node::And(self.intern(a), self.intern(b)),
            Formula::Or(a, b) => Node::Or(self.intern(a), self.intern(b)),
            Formula::Imp(a, b) => Node::Imp(self.intern(a), self.intern(b)),
            Formula::Box(a) => Node::Box(self.intern(a)),
        };
        let id = self.nodes.len() as Id;
        self.nodes.push(node);
        self.formulas.push(f.clone());
        self.index.insert(f.clone(), id);
        id
    }

    fn formula(&self, id: Id) -> &Formula {
        &self.formulas[id as usize]
    }
}

type Key = (Vec<Id>, Vec<Id>);

fn insert(set: &mut Vec<Id>, id: Id) {
    if let Err(i) = set.binary_search(&id) {
        set.insert(i, id);
    }
}

fn with(set: &[Id], ids: &[Id]) -> Vec<Id> {
    let mut out = set.to_vec();
    for &id in ids {
        insert(&mut out, id);
    }
    out
}

fn intersects(a: &[Id], b: &[Id]) -> Option<Id> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Step {
    Id(Id),
    Bot(Id),
    Top(Id),
    Left(Id),
    Right(Id),
    /// S4 box-left, keeping the principal formula.
    BoxL(Id),
    /// Box-right rule of the logic on the given succedent formula.
    BoxR(Id),
    /// KD4 box-right with empty succedent.
    BoxD,
}

struct Proof {
    key: Key,
    step: Step,
    children: Vec<usize>,
}

enum Outcome {
    Proved(usize),
    Failed { blocked: bool },
}

enum Cached {
    Proved(usize),
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct OutOfSteps;

pub(crate) struct Searcher {
    logic: Logic,
    arena: Arena,
    cache: HashMap<Key, Cached>,
    proofs: Vec<Proof>,
    history: HashSet<Key>,
    steps: u64,
    budget: u64,
}

impl Searcher {
    /// `logic` must be one of K4, KD4, S4, GL.
    pub(crate) fn new(logic: Logic, budget: u64) -> Self {
        debug_assert!(logic != Logic::GLS);
        Searcher {
            logic,
            arena: Arena::default(),
            cache: HashMap::new(),
            proofs: Vec::new(),
            history: HashSet::new(),
            steps: 0,
            budget,
        }
    }

    pub(crate) fn steps(&self) -> u64 {
        self.steps
    }

    fn key_of(&mut self, s: &Sequent) -> Key {
        let mut ant: Vec<Id> = s.antecedent.iter().map(|f| self.arena.intern(f)).collect();
        let mut suc: Vec<Id> = s.succedent.iter().map(|f| self.arena.intern(f)).collect();
        ant.sort_unstable();
        ant.dedup();
        suc.sort_unstable();
        suc.dedup();
        (ant, suc)
    }

    /// Decides the sequent; `Ok(None)` means it is not derivable.
    pub(crate) fn run(&mut self, s: &Sequent) -> Result<Option<Derivation>, OutOfSteps> {
        let key = self.key_of(s);
        match self.search(key)? {
            Outcome::Proved(i) => {
                let mut d = self.convert(i);
                let target_ant = s.antecedent.clone();
                let target_suc = s.succedent.clone();
                d = weaken_to(d, &target_ant, &target_suc);
                // The root conclusion equals the input up to order; keep the input's order.
                d.sequent = s.clone();
                Ok(Some(d))
            }
            Outcome::Failed { .. } => Ok(None),
        }
    }

    fn search(&mut self, key: Key) -> Result<Outcome, OutOfSteps> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(OutOfSteps);
        }
        match self.cache.get(&key) {
            Some(Cached::Proved(i)) => return Ok(Outcome::Proved(*i)),
            Some(Cached::Failed) => return Ok(Outcome::Failed { blocked: false }),
            None => {}
        }
        let outcome = self.expand(&key)?;
        match outcome {
            Outcome::Proved(i) => {
                self.cache.insert(key, Cached::Proved(i));
            }
            Outcome::Failed { blocked: false } => {
                self.cache.insert(key, Cached::Failed);
            }
            Outcome::Failed { blocked: true } => {}
        }
        Ok(outcome)
    }

    fn expand(&mut self, key: &Key) -> Result<Outcome, OutOfSteps> {
        let (ant, suc) = key;
        let nodes = &self.arena.nodes;
        if let Some(id) = intersects(ant, suc) {
            return Ok(Outcome::Proved(record(
                &mut self.proofs,
                key.clone(),
                Step::Id(id),
                vec![],
            )));
        }
        if let Some(&id) = ant.iter().find(|&&id| nodes[id as usize] == Node::Bot) {
            return Ok(Outcome::Proved(record(
                &mut self.proofs,
                key.clone(),
                Step::Bot(id),
                vec![],
            )));
        }
        if let Some(&id) = suc.iter().find(|&&id| nodes[id as usize] == Node::Top) {
            return Ok(Outcome::Proved(record(
                &mut self.proofs,
                key.clone(),
                Step::Top(id),
                vec![],
            )));
        }

        // Principal formulas stay in the sequent; a rule is applicable only while it adds
        // something. Non-branching rules go first, then branching ones.
        let has_l = |id: Id| ant.binary_search(&id).is_ok();
        let has_r = |id: Id| suc.binary_search(&id).is_ok();
        let unary_left = ant.iter().copied().find(|&id| match nodes[id as usize] {
            Node::Neg(a) => !has_r(a),
            Node::And(a, b) => !(has_l(a) && has_l(b)),
            Node::Box(a) => self.logic == Logic::S4 && !has_l(a),
            _ => false,
        });
        if let Some(id) = unary_left {
            let (step, premise) = match nodes[id as usize] {
                Node::Neg(a) => (Step::Left(id), (ant.clone(), with(suc, &[a]))),
                Node::And(a, b) => (Step::Left(id), (with(ant, &[a, b]), suc.clone())),
                Node::Box(a) => (Step::BoxL(id), (with(ant, &[a]), suc.clone())),
                _ => unreachable!(),
            };
            return self.unary(key, step, premise);
        }
        let unary_right = suc.iter().copied().find(|&id| match nodes[id as usize] {
            Node::Neg(a) => !has_l(a),
            Node::Or(a, b) => !(has_r(a) && has_r(b)),
            Node::Imp(a, b) => !(has_l(a) && has_r(b)),
            _ => false,
        });
        if let Some(id) = unary_right {
            let premise = match nodes[id as usize] {
                Node::Neg(a) => (with(ant, &[a]), suc.clone()),
                Node::Or(a, b) => (ant.clone(), with(suc, &[a, b])),
                Node::Imp(a, b) => (with(ant, &[a]), with(suc, &[b])),
                _ => unreachable!(),
            };
            return self.unary(key, Step::Right(id), premise);
        }
        let binary_left = ant.iter().copied().find(|&id| match nodes[id as usize] {
            Node::Or(a, b) => !has_l(a) && !has_l(b),
            Node::Imp(a, b) => !has_r(a) && !has_l(b),
            _ => false,
        });
        if let Some(id) = binary_left {
            let (p0, p1) = match nodes[id as usize] {
                Node::Or(a, b) => (
                    (with(ant, &[a]), suc.clone()),
                    (with(ant, &[b]), suc.clone()),
                ),
                Node::Imp(a, b) => (
                    (ant.clone(), with(suc, &[a])),
                    (with(ant, &[b]), suc.clone()),
                ),
                _ => unreachable!(),
            };
            return self.binary(key, Step::Left(id), p0, p1);
        }
        let binary_right = suc.iter().copied().find(|&id| match nodes[id as usize] {
            Node::And(a, b) => !has_r(a) && !has_r(b),
            _ => false,
        });
        if let Some(id) = binary_right {
            let Node::And(a, b) = nodes[id as usize] else {
                unreachable!()
            };
            return self.binary(
                key,
                Step::Right(id),
                (ant.clone(), with(suc, &[a])),
                (ant.clone(), with(suc, &[b])),
            );
        }
        self.modal(key)
    }

    fn unary(&mut self, key: &Key, step: Step, premise: Key) -> Result<Outcome, OutOfSteps> {
        Ok(match self.search(premise)? {
            Outcome::Proved(c) => {
                Outcome::Proved(record(&mut self.proofs, key.clone(), step, vec![c]))
            }
            failed => failed,
        })
    }

    fn binary(&mut self, key: &Key, step: Step, p0: Key, p1: Key) -> Result<Outcome, OutOfSteps> {
        let c0 = match self.search(p0)? {
            Outcome::Proved(c) => c,
            failed => return Ok(failed),
        };
        Ok(match self.search(p1)? {
            Outcome::Proved(c1) => {
                Outcome::Proved(record(&mut self.proofs, key.clone(), step, vec![c0, c1]))
            }
            failed => failed,
        })
    }

    fn modal(&mut self, key: &Key) -> Result<Outcome, OutOfSteps> {
        let looping = self.logic != Logic::GL;
        if looping && self.history.contains(key) {
            return Ok(Outcome::Failed { blocked: true });
        }
        let (ant, suc) = key;
        let nodes = &self.arena.nodes;
        let boxes: Vec<Id> = ant
            .iter()
            .copied()
            .filter(|&id| matches!(nodes[id as usize], Node::Box(_)))
            .collect();
        let bodies: Vec<Id> = boxes
            .iter()
            .map(|&id| match nodes[id as usize] {
                Node::Box(a) => a,
                _ => unreachable!(),
            })
            .collect();
        let targets: Vec<(Id, Id)> = suc
            .iter()
            .filter_map(|&id| match nodes[id as usize] {
                Node::Box(a) => Some((id, a)),
                _ => None,
            })
            .collect();
        let mut alternatives: Vec<(Step, Key)> = Vec::new();
        if self.logic == Logic::KD4 {
            alternatives.push((Step::BoxD, (with(&boxes, &bodies), vec![])));
        }
        for (id, a) in targets {
            let premise_ant = match self.logic {
                Logic::K4 | Logic::KD4 => with(&boxes, &bodies),
                Logic::S4 => boxes.clone(),
                Logic::GL => {
                    if ant.binary_search(&id).is_ok() {
                        continue;
                    }
                    with(&with(&boxes, &bodies), &[id])
                }
                Logic::GLS => unreachable!(),
            };
            alternatives.push((Step::BoxR(id), (premise_ant, vec![a])));
        }
        if looping {
            self.history.insert(key.clone());
        }
        let mut blocked = false;
        let mut result = Ok(None);
        for (step, premise) in alternatives {
            match self.search(premise) {
                Ok(Outcome::Proved(c)) => {
                    result = Ok(Some((step, c)));
                    break;
                }
                Ok(Outcome::Failed { blocked: b }) => blocked |= b,
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        if looping {
            self.history.remove(key);
        }
        Ok(match result? {
            Some((step, c)) => {
                Outcome::Proved(record(&mut self.proofs, key.clone(), step, vec![c]))
            }
            None => Outcome::Failed { blocked },
        })
    }

    fn fs(&self, ids: &[Id]) -> Vec<Formula> {
        ids.iter()
            .map(|&id| self.arena.formula(id).clone())
            .collect()
    }

    /// Derivation whose conclusion holds each formula of the proof node's sets exactly once.
    fn convert(&self, i: usize) -> Derivation {
        let proof = &self.proofs[i];
        let gamma = self.fs(&proof.key.0);
        let delta = self.fs(&proof.key.1);
        let f = |id: Id| self.arena.formula(id).clone();
        let child = |k: usize| self.convert(proof.children[k]);
        match proof.step {
            Step::Id(id) => weaken_to(
                Derivation::leaf(Sequent::new(vec![f(id)], vec![f(id)]), Rule::AxiomId),
                &gamma,
                &delta,
            ),
            Step::Bot(id) => weaken_to(
                Derivation::leaf(Sequent::new(vec![f(id)], vec![]), Rule::AxiomBot),
                &gamma,
                &delta,
            ),
            Step::Top(id) => weaken_to(
                Derivation::leaf(Sequent::new(vec![], vec![f(id)]), Rule::AxiomTop),
                &gamma,
                &delta,
            ),
            Step::Left(id) => {
                let main = f(id);
                let g = &gamma;
                let d = match &main {
                    Formula::Neg(a) => {
                        let d = weaken_to(child(0), g, &push(&delta, a));
                        apply(d, Rule::NegL, push(g, &main), delta.clone())
                    }
                    Formula::And(a, b) => {
                        let d = weaken_to(child(0), &push(&push(g, a), b), &delta);
                        let d = apply(d, Rule::AndL, push(&push(g, b), &main), delta.clone());
                        apply(d, Rule::AndL, push(&push(g, &main), &main), delta.clone())
                    }
                    Formula::Or(a, b) => {
                        let l = weaken_to(child(0), &push(g, a), &delta);
                        let r = weaken_to(child(1), &push(g, b), &delta);
                        let ant = push(&[g.clone(), g.clone()].concat(), &main);
                        let suc = [delta.clone(), delta.clone()].concat();
                        Derivation::node(Sequent::new(ant, suc), Rule::OrL, vec![l, r])
                    }
                    Formula::Imp(a, b) => {
                        let l = weaken_to(child(0), g, &push(&delta, a));
                        let r = weaken_to(child(1), &push(g, b), &delta);
                        let ant = push(&[g.clone(), g.clone()].concat(), &main);
                        let suc = [delta.clone(), delta.clone()].concat();
                        Derivation::node(Sequent::new(ant, suc), Rule::ImpL, vec![l, r])
                    }
                    _ => unreachable!(),
                };
                contract_to(d, &gamma, &delta)
            }
            Step::Right(id) => {
                let main = f(id);
                let e = &delta;
                let d = match &main {
                    Formula::Neg(a) => {
                        let d = weaken_to(child(0), &push(&gamma, a), e);
                        apply(d, Rule::NegR, gamma.clone(), push(e, &main))
                    }
                    Formula::Or(a, b) => {
                        let d = weaken_to(child(0), &gamma, &push(&push(e, a), b));
                        let d = apply(d, Rule::OrR, gamma.clone(), push(&push(e, b), &main));
                        apply(d, Rule::OrR, gamma.clone(), push(&push(e, &main), &main))
                    }
                    Formula::Imp(a, b) => {
                        let d = weaken_to(child(0), &push(&gamma, a), &push(e, b));
                        apply(d, Rule::ImpR, gamma.clone(), push(e, &main))
                    }
                    Formula::And(a, b) => {
                        let l = weaken_to(child(0), &gamma, &push(e, a));
                        let r = weaken_to(child(1), &gamma, &push(e, b));
                        let ant = [gamma.clone(), gamma.clone()].concat();
                        let suc = push(&[e.clone(), e.clone()].concat(), &main);
                        Derivation::node(Sequent::new(ant, suc), Rule::AndR, vec![l, r])
                    }
                    _ => unreachable!(),
                };
                contract_to(d, &gamma, &delta)
            }
            Step::BoxL(id) => {
                let main = f(id);
                let a = main.unbox().expect("boxed").clone();
                let d = weaken_to(child(0), &push(&gamma, &a), &delta);
                let d = apply(d, Rule::BoxL, push(&gamma, &main), delta.clone());
                apply(d, Rule::ContractL, gamma, delta)
            }
            Step::BoxR(_) | Step::BoxD => {
                let boxes: Vec<Formula> = gamma.iter().filter(|g| g.is_box()).cloned().collect();
                let bodies: Vec<Formula> = boxes
                    .iter()
                    .map(|b| b.unbox().expect("boxed").clone())
                    .collect();
                let (rule, premise_ant, premise_suc, conclusion_suc) = match proof.step {
                    Step::BoxD => (
                        Rule::BoxDR,
                        [bodies, boxes.clone()].concat(),
                        vec![],
                        vec![],
                    ),
                    _ => {
                        let main = f(id_of(proof.step));
                        let a = main.unbox().expect("boxed").clone();
                        match self.logic {
                            Logic::K4 | Logic::KD4 => (
                                Rule::Box4R,
                                [bodies, boxes.clone()].concat(),
                                vec![a],
                                vec![main],
                            ),
                            Logic::S4 => (Rule::BoxSR, boxes.clone(), vec![a], vec![main]),
                            _ => (
                                Rule::Glr,
                                push(&[bodies, boxes.clone()].concat(), &main),
                                vec![a],
                                vec![main],
                            ),
                        }
                    }
                };
                let d = weaken_to(child(0), &premise_ant, &premise_suc);
                let d = apply(d, rule, boxes, conclusion_suc);
                weaken_to(d, &gamma, &delta)
            }
        }
    }
}

fn record(proofs: &mut Vec<Proof>, key: Key, step: Step, children: Vec<usize>) -> usize {
    proofs.push(Proof {
        key,
        step,
        children,
    });
    proofs.len() - 1
}

fn id_of(step: Step) -> Id {
    match step {
        Step::BoxR(id) => id,
        _ => unreachable!(),
    }
}

fn push(v: &[Formula], f: &Formula) -> Vec<Formula> {
    let mut out = v.to_vec();
    out.push(f.clone());
    out
}

fn remove_one(v: &[Formula], f: &Formula) -> Vec<Formula> {
    let mut out = v.to_vec();
    let i = out
        .iter()
        .position(|g| g == f)
        .expect("principal formula present");
    out.remove(i);
    out
}

fn apply(premise: Derivation, rule: Rule, ant: Vec<Formula>, suc: Vec<Formula>) -> Derivation {
    Derivation::node(Sequent::new(ant, suc), rule, vec![premise])
}

/// Multiset difference `target - have`; `have` must be contained in `target`.
fn missing(have: &[Formula], target: &[Formula]) -> Vec<Formula> {
    let mut rest = have.to_vec();
    let mut out = Vec::new();
    for f in target {
        match rest.iter().position(|g| g == f) {
            Some(i) => {
                rest.remove(i);
            }
            None => out.push(f.clone()),
        }
    }
    debug_assert!(rest.is_empty(), "cannot weaken {have:?} to {target:?}");
    out
}

/// Adds formulas by weakening until the conclusion is `ant => suc` up to order.
pub(crate) fn weaken_to(mut d: Derivation, ant: &[Formula], suc: &[Formula]) -> Derivation {
    for f in missing(&d.sequent.antecedent, ant) {
        let a = push(&d.sequent.antecedent, &f);
        let s = d.sequent.succedent.clone();
        d = apply(d, Rule::WeakenL, a, s);
    }
    for f in missing(&d.sequent.succedent, suc) {
        let a = d.sequent.antecedent.clone();
        let s = push(&d.sequent.succedent, &f);
        d = apply(d, Rule::WeakenR, a, s);
    }
    d
}

/// Contracts duplicate copies until the conclusion is `ant => suc` up to order.
fn contract_to(mut d: Derivation, ant: &[Formula], suc: &[Formula]) -> Derivation {
    for f in missing(ant, &d.sequent.antecedent) {
        let a = remove_one(&d.sequent.antecedent, &f);
        let s = d.sequent.succedent.clone();
        d = apply(d, Rule::ContractL, a, s);
    }
    for f in missing(suc, &d.sequent.succedent) {
        let a = d.sequent.antecedent.clone();
        let s = remove_one(&d.sequent.succedent, &f);
        d = apply(d, Rule::ContractR, a, s);
    }
    d
}
