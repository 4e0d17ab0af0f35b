//! Decision procedures for K4, KD4, S4, GL and GLS with checkable evidence.

mod derivation;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kripke::{check, find_countermodel_between, validate_frame, Countermodel, FrameClass};
use crate::syntax::{Formula, Sequent};

pub use derivation::{check_derivation, Derivation, DerivationJson, InvalidStep, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Logic {
    K4,
    KD4,
    S4,
    GL,
    GLS,
}

impl Logic {
    pub const ALL: [Logic; 5] = [Logic::K4, Logic::KD4, Logic::S4, Logic::GL, Logic::GLS];

    /// Frame class of the logic's countermodels. GLS countermodels are GL countermodels of the
    /// reduced formula.
    pub fn frame_class(self) -> FrameClass {
        match self {
            Logic::K4 => FrameClass::K4Frame,
            Logic::KD4 => FrameClass::KD4Frame,
            Logic::S4 => FrameClass::S4Frame,
            Logic::GL | Logic::GLS => FrameClass::GLFrame,
        }
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown logic `{0}`")]
pub struct UnknownLogic(pub String);

impl FromStr for Logic {
    type Err = UnknownLogic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Logic::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownLogic(s.to_string()))
    }
}

/// Limits for one decision: search expansions, then countermodel enumeration up to
/// `max_nodes`, then up to `escalate_nodes` while `model_evals` lasts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub steps: u64,
    pub max_nodes: usize,
    pub escalate_nodes: usize,
    pub model_evals: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            steps: 100_000,
            max_nodes: 6,
            escalate_nodes: 8,
            model_evals: 20_000_000,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProveError {
    #[error("undecided: budget exhausted after {steps} search steps and countermodel search up to {max_nodes} nodes")]
    ResourceExhausted { steps: u64, max_nodes: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveResult {
    /// `reduced` is the GL sequent actually derived when deciding GLS.
    Provable {
        derivation: Derivation,
        reduced: Option<Sequent>,
    },
    /// For GLS the countermodel refutes the reduced GL sequent.
    NotProvable {
        countermodel: Countermodel,
        reduced: Option<Sequent>,
    },
}

impl ProveResult {
    pub fn is_provable(&self) -> bool {
        matches!(self, ProveResult::Provable { .. })
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            ProveResult::Provable { derivation, .. } => Some(derivation),
            _ => None,
        }
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match self {
            ProveResult::NotProvable { countermodel, .. } => Some(countermodel),
            _ => None,
        }
    }

    pub fn reduced(&self) -> Option<&Sequent> {
        match self {
            ProveResult::Provable { reduced, .. } | ProveResult::NotProvable { reduced, .. } => {
                reduced.as_ref()
            }
        }
    }
}

/// `/\{ []B -> B : []B a boxed subformula of a } -> a`, conjuncts in first-occurrence order.
pub fn gls_reduce(a: &Formula) -> Formula {
    let reflections = a.boxed_subformulas().into_iter().map(|b| {
        let body = b.unbox().expect("boxed subformula").clone();
        Formula::imp(b, body)
    });
    Formula::imp(Formula::conj(reflections), a.clone())
}

/// The logic whose calculus decides `logic`, and the sequent it is run on.
fn calculus_instance(logic: Logic, s: &Sequent) -> (Logic, Sequent, Option<Sequent>) {
    if logic == Logic::GLS {
        let reduced = Sequent::goal(gls_reduce(&s.as_formula()));
        (Logic::GL, reduced.clone(), Some(reduced))
    } else {
        (logic, s.clone(), None)
    }
}

/// Decides `s` by proof search alone; a failed search is a verdict.
pub fn decide(logic: Logic, s: &Sequent, steps: u64) -> Result<bool, ProveError> {
    let (calc, target, _) = calculus_instance(logic, s);
    let mut searcher = search::Searcher::new(calc, steps);
    searcher
        .run(&target)
        .map(|d| d.is_some())
        .map_err(|_| ProveError::ResourceExhausted {
            steps,
            max_nodes: 0,
        })
}

/// Decides `s`, returning a derivation or a countermodel from bounded enumeration.
pub fn prove(logic: Logic, s: &Sequent, budget: &Budget) -> Result<ProveResult, ProveError> {
    let (calc, target, reduced) = calculus_instance(logic, s);
    let mut searcher = search::Searcher::new(calc, budget.steps);
    if let Ok(Some(derivation)) = searcher.run(&target) {
        return Ok(ProveResult::Provable {
            derivation,
            reduced,
        });
    }
    let exhausted = ProveError::ResourceExhausted {
        steps: searcher.steps(),
        max_nodes: budget.escalate_nodes.max(budget.max_nodes),
    };
    let f = target.as_formula();
    let class = calc.frame_class();
    let mut evals = budget.model_evals;
    let mut low = 1;
    for high in [budget.max_nodes, budget.escalate_nodes] {
        if high < low {
            continue;
        }
        match find_countermodel_between(&f, class, low, high, &mut evals) {
            Ok(Some(countermodel)) => {
                return Ok(ProveResult::NotProvable {
                    countermodel,
                    reduced,
                })
            }
            Ok(None) => low = high + 1,
            Err(_) => return Err(exhausted),
        }
    }
    Err(exhausted)
}

/// Local consequence: decides `gamma => a`.
pub fn derives(
    logic: Logic,
    gamma: &[Formula],
    a: &Formula,
    budget: &Budget,
) -> Result<ProveResult, ProveError> {
    prove(
        logic,
        &Sequent::new(gamma.to_vec(), vec![a.clone()]),
        budget,
    )
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvidenceError {
    #[error(transparent)]
    Derivation(#[from] InvalidStep),
    #[error("derivation concludes {found}, expected {expected}")]
    WrongConclusion { expected: String, found: String },
    #[error("countermodel is not a {class} model: {violations}")]
    WrongFrame {
        class: FrameClass,
        violations: String,
    },
    #[error("countermodel does not refute {0}")]
    NotRefuted(String),
}

/// Re-verifies the evidence in `result` for the sequent `s`.
pub fn verify_evidence(
    logic: Logic,
    s: &Sequent,
    result: &ProveResult,
) -> Result<(), EvidenceError> {
    let (calc, target, _) = calculus_instance(logic, s);
    match result {
        ProveResult::Provable { derivation, .. } => {
            let same = |a: &[Formula], b: &[Formula]| {
                let (mut a, mut b) = (a.to_vec(), b.to_vec());
                a.sort();
                b.sort();
                a == b
            };
            let c = &derivation.sequent;
            if !same(&c.antecedent, &target.antecedent) || !same(&c.succedent, &target.succedent) {
                return Err(EvidenceError::WrongConclusion {
                    expected: target.to_string(),
                    found: c.to_string(),
                });
            }
            check_derivation(calc, derivation)?;
            Ok(())
        }
        ProveResult::NotProvable { countermodel, .. } => {
            let class = calc.frame_class();
            let violations = validate_frame(&countermodel.model, class);
            if !violations.is_empty() {
                return Err(EvidenceError::WrongFrame {
                    class,
                    violations: format!("{violations:?}"),
                });
            }
            match check(&countermodel.model, countermodel.node, &target.as_formula()) {
                Ok(false) => Ok(()),
                _ => Err(EvidenceError::NotRefuted(target.to_string())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_modal, parse_sequent};

    fn goal(text: &str) -> Sequent {
        Sequent::goal(parse_modal(text).unwrap())
    }

    fn provable(logic: Logic, text: &str) -> bool {
        let s = parse_sequent(text).unwrap();
        let r = prove(logic, &s, &Budget::default()).unwrap();
        verify_evidence(logic, &s, &r).unwrap();
        assert_eq!(
            decide(logic, &s, 100_000).unwrap(),
            r.is_provable(),
            "{logic} {text}"
        );
        r.is_provable()
    }

    #[test]
    fn known_theorems() {
        assert!(provable(Logic::GL, "[]([]p -> p) -> []p"));
        assert!(provable(Logic::K4, "[]p -> [][]p"));
        assert!(provable(Logic::KD4, "~[]bot"));
        assert!(!provable(Logic::K4, "~[]bot"));
        assert!(provable(Logic::S4, "~[](~[]p /\\ p)"));
        assert!(provable(Logic::S4, "[]p -> p"));
        assert!(provable(Logic::GLS, "[]p -> p"));
        assert!(!provable(Logic::GL, "[]p -> p"));
        assert!(!provable(Logic::S4, "[]([]p -> p) -> []p"));
        assert!(provable(Logic::K4, "[](p -> q), []p => []q"));
        assert!(provable(Logic::S4, "[]p => p"));
        assert!(!provable(Logic::GL, "p => []p"));
        assert!(provable(Logic::GL, "[]p => [][]p"));
        assert!(provable(Logic::K4, "top"));
        assert!(provable(Logic::K4, "p, p => p /\\ p, q"));
    }

    #[test]
    fn k4_countermodel_for_t() {
        let s = goal("[]p -> p");
        let r = prove(Logic::K4, &s, &Budget::default()).unwrap();
        let cm = r.countermodel().unwrap();
        assert_eq!(cm.model.len(), 1);
        assert!(!cm.model.is_reflexive(0));
    }

    #[test]
    fn gls_reduction_shape() {
        let f = parse_modal("[]p -> p").unwrap();
        assert_eq!(gls_reduce(&f).to_string(), "([]p -> p) -> []p -> p");
        let p = parse_modal("p").unwrap();
        assert_eq!(gls_reduce(&p), Formula::imp(Formula::Top, p));
        let lob = parse_modal("[]([]p -> p) -> []p").unwrap();
        assert_eq!(
            gls_reduce(&lob),
            parse_modal("([]([]p -> p) -> []p -> p) /\\ ([]p -> p) -> [] ([]p -> p) -> []p")
                .unwrap()
        );
    }

    #[test]
    fn order_insensitive() {
        let a = parse_sequent("[]p, [](p -> q) => []q, r").unwrap();
        let b = parse_sequent("[](p -> q), []p => r, []q").unwrap();
        for logic in [Logic::K4, Logic::S4, Logic::GL] {
            assert!(provable(logic, &a.to_string()));
            assert!(provable(logic, &b.to_string()));
        }
    }

    #[test]
    fn logic_names() {
        assert_eq!("kd4".parse::<Logic>().unwrap(), Logic::KD4);
        assert!("s5".parse::<Logic>().is_err());
    }
}
