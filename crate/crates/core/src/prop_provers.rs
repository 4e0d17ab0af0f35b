//! Propositional logics decided through their modal translations, with persistent Kripke
//! models as direct semantics where one is available.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::kripke::{check_int, find_refutation, Countermodel, FrameClass, IntFlavor};
use crate::modal_provers::{decide, derives, Budget, Derivation, Logic, ProveError, ProveResult};
use crate::provability_semantics::{translate_bhk, Flavor};
use crate::syntax::{Formula, PropFormula, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropLogic {
    Bpc,
    Ebpc,
    Fpl,
    Ipc,
    Mpc,
    Cpc,
}

impl PropLogic {
    pub const ALL: [PropLogic; 6] = [
        PropLogic::Bpc,
        PropLogic::Ebpc,
        PropLogic::Fpl,
        PropLogic::Ipc,
        PropLogic::Mpc,
        PropLogic::Cpc,
    ];

    /// Translation and modal logic deciding this logic. `None` for CPC, which is decided
    /// classically.
    pub fn modal_image(self) -> Option<(Flavor, Logic)> {
        match self {
            PropLogic::Bpc => Some((Flavor::B, Logic::K4)),
            PropLogic::Ebpc => Some((Flavor::B, Logic::KD4)),
            PropLogic::Ipc => Some((Flavor::B, Logic::S4)),
            PropLogic::Fpl => Some((Flavor::B, Logic::GL)),
            PropLogic::Mpc => Some((Flavor::W, Logic::S4)),
            PropLogic::Cpc => None,
        }
    }

    /// Persistent model class, absent for EBPC.
    pub fn semantics(self) -> Option<IntFlavor> {
        match self {
            PropLogic::Bpc => Some(IntFlavor::Bpc),
            PropLogic::Ebpc => None,
            PropLogic::Fpl => Some(IntFlavor::Fpl),
            PropLogic::Ipc => Some(IntFlavor::Ipc),
            PropLogic::Mpc => Some(IntFlavor::Mpc),
            PropLogic::Cpc => Some(IntFlavor::Cpc),
        }
    }
}

impl fmt::Display for PropLogic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropLogic::Bpc => "BPC",
            PropLogic::Ebpc => "EBPC",
            PropLogic::Fpl => "FPL",
            PropLogic::Ipc => "IPC",
            PropLogic::Mpc => "MPC",
            PropLogic::Cpc => "CPC",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown propositional logic `{0}`")]
pub struct UnknownPropLogic(pub String);

impl FromStr for PropLogic {
    type Err = UnknownPropLogic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PropLogic::ALL
            .into_iter()
            .find(|l| l.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownPropLogic(s.to_string()))
    }
}

impl Serialize for PropLogic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The modal sequent deciding `gamma => a` in `logic`. CPC uses the formulas unchanged.
pub fn translate_sequent(
    logic: PropLogic,
    gamma: &[PropFormula],
    a: &PropFormula,
) -> (Logic, Sequent) {
    match logic.modal_image() {
        Some((flavor, modal)) => (
            modal,
            Sequent::new(
                gamma.iter().map(|g| translate_bhk(g, flavor)).collect(),
                vec![translate_bhk(a, flavor)],
            ),
        ),
        // K4 is conservative over classical logic on box-free sequents.
        None => (
            Logic::K4,
            Sequent::new(
                gamma.iter().map(|g| g.formula().clone()).collect(),
                vec![a.formula().clone()],
            ),
        ),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PropEvidence {
    /// Derivation of the translated sequent in the modal calculus.
    Derivation(Derivation),
    /// Persistent model refuting the propositional sequent directly.
    Semantic(Countermodel),
    /// Model refuting the translated sequent, used when no direct refutation is at hand.
    Modal(Countermodel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropVerdict {
    pub logic: PropLogic,
    pub modal_logic: Logic,
    pub translated: Sequent,
    pub provable: bool,
    pub evidence: PropEvidence,
}

impl Serialize for PropVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            logic: PropLogic,
            modal_logic: String,
            translated: String,
            verdict: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            derivation: Option<crate::modal_provers::DerivationJson>,
            #[serde(skip_serializing_if = "Option::is_none")]
            countermodel: Option<&'a Countermodel>,
            #[serde(skip_serializing_if = "Option::is_none")]
            countermodel_kind: Option<&'static str>,
        }
        let (derivation, countermodel, kind) = match &self.evidence {
            PropEvidence::Derivation(d) => (Some(d.to_json()), None, None),
            PropEvidence::Semantic(c) => (None, Some(c), Some("propositional")),
            PropEvidence::Modal(c) => (None, Some(c), Some("modal")),
        };
        Wire {
            logic: self.logic,
            modal_logic: self.modal_logic.to_string(),
            translated: self.translated.to_string(),
            verdict: if self.provable {
                "provable"
            } else {
                "not_provable"
            },
            derivation,
            countermodel,
            countermodel_kind: kind,
        }
        .serialize(s)
    }
}

/// Verdict only, by proof search on the translated sequent.
pub fn decide_prop(
    logic: PropLogic,
    gamma: &[PropFormula],
    a: &PropFormula,
    steps: u64,
) -> Result<bool, ProveError> {
    let (modal, s) = translate_sequent(logic, gamma, a);
    decide(modal, &s, steps)
}

/// Decides `gamma |- a` in `logic` by the modal prover on the translated sequent. A negative
/// verdict carries a persistent countermodel of at most `budget.max_nodes` nodes when the
/// logic has direct semantics and one is found, otherwise the modal countermodel.
pub fn prove_prop(
    logic: PropLogic,
    gamma: &[PropFormula],
    a: &PropFormula,
    budget: &Budget,
) -> Result<PropVerdict, ProveError> {
    let (modal_logic, translated) = translate_sequent(logic, gamma, a);
    let result = derives(
        modal_logic,
        &translated.antecedent,
        &translated.succedent[0],
        budget,
    )?;
    let verdict = |provable, evidence| PropVerdict {
        logic,
        modal_logic,
        translated: translated.clone(),
        provable,
        evidence,
    };
    match result {
        ProveResult::Provable { derivation, .. } => {
            Ok(verdict(true, PropEvidence::Derivation(derivation)))
        }
        ProveResult::NotProvable { countermodel, .. } => {
            let direct = logic.semantics().and_then(|flavor| {
                let ant: Vec<Formula> = gamma.iter().map(|g| g.formula().clone()).collect();
                let mut evals = budget.model_evals;
                find_refutation(
                    &ant,
                    std::slice::from_ref(a.formula()),
                    FrameClass::IntFrame(flavor),
                    1,
                    budget.max_nodes,
                    &mut evals,
                )
                .ok()
                .flatten()
            });
            let evidence = match direct {
                Some(cm) => PropEvidence::Semantic(cm),
                None => PropEvidence::Modal(countermodel),
            };
            Ok(verdict(false, evidence))
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrosscheckError {
    #[error("{0} has no direct Kripke semantics here")]
    NoSemantics(PropLogic),
}

/// Outcome of the translation engine inside a cross-check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineVerdict {
    Provable,
    NotProvable,
    Exhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropCrosscheck {
    pub logic: PropLogic,
    pub formula: String,
    pub translated: String,
    pub translation: EngineVerdict,
    /// True when every enumerated model up to `max_nodes` forces the formula at its root.
    pub semantically_valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation: Option<Countermodel>,
    pub agree: bool,
    /// A refutation found while the translation says provable.
    pub hard_failure: bool,
}

/// Compares the translation verdict on `f` against exhaustive persistent models up to
/// `max_nodes` nodes.
pub fn crosscheck_prop(
    logic: PropLogic,
    f: &PropFormula,
    max_nodes: usize,
    budget: &Budget,
) -> Result<PropCrosscheck, CrosscheckError> {
    logic
        .semantics()
        .ok_or(CrosscheckError::NoSemantics(logic))?;
    let translation = match prove_prop(logic, &[], f, budget) {
        Ok(v) if v.provable => EngineVerdict::Provable,
        Ok(_) => EngineVerdict::NotProvable,
        Err(_) => EngineVerdict::Exhausted,
    };
    compare_semantics(logic, f, translation, max_nodes)
}

/// As [`crosscheck_prop`] with the translation verdict already at hand.
pub fn compare_semantics(
    logic: PropLogic,
    f: &PropFormula,
    translation: EngineVerdict,
    max_nodes: usize,
) -> Result<PropCrosscheck, CrosscheckError> {
    let flavor = logic
        .semantics()
        .ok_or(CrosscheckError::NoSemantics(logic))?;
    let (_, translated) = translate_sequent(logic, &[], f);
    let mut unbounded = u64::MAX;
    let refutation = find_refutation(
        &[],
        std::slice::from_ref(f.formula()),
        FrameClass::IntFrame(flavor),
        1,
        max_nodes,
        &mut unbounded,
    )
    .expect("unbounded enumeration cannot run out");
    if let Some(cm) = &refutation {
        debug_assert_eq!(check_int(&cm.model, cm.node, f, flavor), Ok(false));
    }
    let semantically_valid = refutation.is_none();
    let agree = match translation {
        EngineVerdict::Provable => semantically_valid,
        EngineVerdict::NotProvable => !semantically_valid,
        EngineVerdict::Exhausted => false,
    };
    Ok(PropCrosscheck {
        logic,
        formula: f.to_string(),
        translated: translated.to_string(),
        translation,
        semantically_valid,
        hard_failure: translation == EngineVerdict::Provable && !semantically_valid,
        refutation,
        agree,
    })
}
