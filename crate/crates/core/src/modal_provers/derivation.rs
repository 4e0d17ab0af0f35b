//! Derivations in the sequent calculi G(K4), G(KD4), G(S4) and the GL calculus, and an
//! independent checker for them.
//!
//! Antecedents and succedents are compared as multisets, so exchange is implicit and the
//! main formula of a rule may sit anywhere in its sequence.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Logic;
use crate::syntax::{parse_sequent, Formula, ParseError, Sequent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    #[serde(rename = "Axiom-Id")]
    AxiomId,
    #[serde(rename = "Axiom-Bot")]
    AxiomBot,
    /// `=> top`. Not among the printed axioms; needed once `top` is a primitive.
    #[serde(rename = "Axiom-Top")]
    AxiomTop,
    #[serde(rename = "wL")]
    WeakenL,
    #[serde(rename = "wR")]
    WeakenR,
    #[serde(rename = "cL")]
    ContractL,
    #[serde(rename = "cR")]
    ContractR,
    #[serde(rename = "cut")]
    Cut,
    #[serde(rename = "∨L", alias = "orL")]
    OrL,
    #[serde(rename = "∨R", alias = "orR")]
    OrR,
    #[serde(rename = "∧L", alias = "andL")]
    AndL,
    #[serde(rename = "∧R", alias = "andR")]
    AndR,
    #[serde(rename = "→L", alias = "impL")]
    ImpL,
    #[serde(rename = "→R", alias = "impR")]
    ImpR,
    #[serde(rename = "¬L", alias = "negL")]
    NegL,
    #[serde(rename = "¬R", alias = "negR")]
    NegR,
    #[serde(rename = "□4R", alias = "box4R")]
    Box4R,
    #[serde(rename = "□DR", alias = "boxDR")]
    BoxDR,
    #[serde(rename = "□SR", alias = "boxSR")]
    BoxSR,
    #[serde(rename = "□L", alias = "boxL")]
    BoxL,
    #[serde(rename = "GLR")]
    Glr,
}

impl Rule {
    pub const ALL: [Rule; 21] = [
        Rule::AxiomId,
        Rule::AxiomBot,
        Rule::AxiomTop,
        Rule::WeakenL,
        Rule::WeakenR,
        Rule::ContractL,
        Rule::ContractR,
        Rule::Cut,
        Rule::OrL,
        Rule::OrR,
        Rule::AndL,
        Rule::AndR,
        Rule::ImpL,
        Rule::ImpR,
        Rule::NegL,
        Rule::NegR,
        Rule::Box4R,
        Rule::BoxDR,
        Rule::BoxSR,
        Rule::BoxL,
        Rule::Glr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::AxiomId => "Axiom-Id",
            Rule::AxiomBot => "Axiom-Bot",
            Rule::AxiomTop => "Axiom-Top",
            Rule::WeakenL => "wL",
            Rule::WeakenR => "wR",
            Rule::ContractL => "cL",
            Rule::ContractR => "cR",
            Rule::Cut => "cut",
            Rule::OrL => "∨L",
            Rule::OrR => "∨R",
            Rule::AndL => "∧L",
            Rule::AndR => "∧R",
            Rule::ImpL => "→L",
            Rule::ImpR => "→R",
            Rule::NegL => "¬L",
            Rule::NegR => "¬R",
            Rule::Box4R => "□4R",
            Rule::BoxDR => "□DR",
            Rule::BoxSR => "□SR",
            Rule::BoxL => "□L",
            Rule::Glr => "GLR",
        }
    }

    /// Whether the calculus for `logic` contains this rule. GLS derivations are GL derivations
    /// of the reduced sequent.
    pub fn admitted_in(self, logic: Logic) -> bool {
        match self {
            Rule::Box4R => matches!(logic, Logic::K4 | Logic::KD4),
            Rule::BoxDR => logic == Logic::KD4,
            Rule::BoxSR | Rule::BoxL => logic == Logic::S4,
            Rule::Glr => matches!(logic, Logic::GL | Logic::GLS),
            _ => true,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub sequent: Sequent,
    pub rule: Rule,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(sequent: Sequent, rule: Rule) -> Self {
        Derivation {
            sequent,
            rule,
            premises: Vec::new(),
        }
    }

    pub fn node(sequent: Sequent, rule: Rule, premises: Vec<Derivation>) -> Self {
        Derivation {
            sequent,
            rule,
            premises,
        }
    }

    /// Number of rule instances.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self
            .premises
            .iter()
            .map(Derivation::height)
            .max()
            .unwrap_or(0)
    }

    /// Calls `f` on every rule instance, root first.
    pub fn visit(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        for p in &self.premises {
            p.visit(f);
        }
    }

    pub fn uses(&self, rule: Rule) -> bool {
        let mut found = false;
        self.visit(&mut |d| found |= d.rule == rule);
        found
    }

    pub fn to_json(&self) -> DerivationJson {
        DerivationJson {
            rule: self.rule,
            sequent: self.sequent.to_string(),
            children: self.premises.iter().map(Derivation::to_json).collect(),
        }
    }

    pub fn from_json(json: &DerivationJson) -> Result<Self, ParseError> {
        Ok(Derivation {
            sequent: parse_sequent(&json.sequent)?,
            rule: json.rule,
            premises: json
                .children
                .iter()
                .map(Derivation::from_json)
                .collect::<Result<_, _>>()?,
        })
    }
}

/// Wire format: `{"rule":"□4R","sequent":"[]p => [][]p","children":[...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationJson {
    pub rule: Rule,
    pub sequent: String,
    #[serde(default)]
    pub children: Vec<DerivationJson>,
}

/// The first incorrect rule instance found, located by child indices from the root.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid {rule} step at {path:?}: {reason}")]
pub struct InvalidStep {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub reason: String,
}

/// Checks every rule instance of `d` against the calculus for `logic`.
pub fn check_derivation(logic: Logic, d: &Derivation) -> Result<(), InvalidStep> {
    let mut path = Vec::new();
    check_node(logic, d, &mut path)
}

fn check_node(logic: Logic, d: &Derivation, path: &mut Vec<usize>) -> Result<(), InvalidStep> {
    let fail = |reason: String| InvalidStep {
        path: path.clone(),
        rule: d.rule,
        reason,
    };
    if !d.rule.admitted_in(logic) {
        return Err(fail(format!(
            "rule {} is not in the calculus for {logic}",
            d.rule
        )));
    }
    check_instance(d).map_err(fail)?;
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(logic, p, path)?;
        path.pop();
    }
    Ok(())
}

type Ms = Vec<Formula>;

fn sorted(v: &[Formula]) -> Ms {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn ms_eq(a: &[Formula], b: &[Formula]) -> bool {
    a.len() == b.len() && sorted(a) == sorted(b)
}

/// `a` with one copy of each element of `remove` taken out.
fn minus(a: &[Formula], remove: &[&Formula]) -> Option<Ms> {
    let mut out = a.to_vec();
    for f in remove {
        let i = out.iter().position(|g| g == *f)?;
        out.remove(i);
    }
    Some(out)
}

fn plus(a: &[Formula], b: &[Formula]) -> Ms {
    a.iter().chain(b).cloned().collect()
}

fn distinct(v: &[Formula], keep: impl Fn(&Formula) -> bool) -> Vec<&Formula> {
    let mut out: Vec<&Formula> = Vec::new();
    for f in v {
        if keep(f) && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn arity(d: &Derivation, n: usize) -> Result<(), String> {
    if d.premises.len() == n {
        Ok(())
    } else {
        Err(format!("expected {n} premises, found {}", d.premises.len()))
    }
}

fn boxed_context(ant: &[Formula]) -> Result<Ms, String> {
    ant.iter()
        .map(|f| {
            f.unbox()
                .cloned()
                .ok_or_else(|| format!("antecedent formula {f} is not boxed"))
        })
        .collect()
}

fn check_instance(d: &Derivation) -> Result<(), String> {
    let c = &d.sequent;
    let (ca, cs) = (&c.antecedent, &c.succedent);
    let p = &d.premises;
    let mismatch = || Err(format!("conclusion {c} does not follow by {}", d.rule));
    match d.rule {
        Rule::AxiomId => {
            arity(d, 0)?;
            if ca.len() == 1 && cs.len() == 1 && ca[0] == cs[0] {
                return Ok(());
            }
            mismatch()
        }
        Rule::AxiomBot => {
            arity(d, 0)?;
            if ca.as_slice() == [Formula::Bot] && cs.is_empty() {
                return Ok(());
            }
            mismatch()
        }
        Rule::AxiomTop => {
            arity(d, 0)?;
            if ca.is_empty() && cs.as_slice() == [Formula::Top] {
                return Ok(());
            }
            mismatch()
        }
        Rule::WeakenL | Rule::WeakenR => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let (big, small, same_a, same_b) = if d.rule == Rule::WeakenL {
                (ca, &q.antecedent, cs, &q.succedent)
            } else {
                (cs, &q.succedent, ca, &q.antecedent)
            };
            if ms_eq(same_a, same_b)
                && big.len() == small.len() + 1
                && minus(big, &small.iter().collect::<Vec<_>>()).is_some()
            {
                return Ok(());
            }
            mismatch()
        }
        Rule::ContractL | Rule::ContractR => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let (small, big, same_a, same_b) = if d.rule == Rule::ContractL {
                (ca, &q.antecedent, cs, &q.succedent)
            } else {
                (cs, &q.succedent, ca, &q.antecedent)
            };
            if ms_eq(same_a, same_b) && big.len() == small.len() + 1 {
                if let Some(extra) = minus(big, &small.iter().collect::<Vec<_>>()) {
                    if small.contains(&extra[0]) {
                        return Ok(());
                    }
                }
            }
            mismatch()
        }
        Rule::Cut => {
            arity(d, 2)?;
            let (l, r) = (&p[0].sequent, &p[1].sequent);
            for a in distinct(&l.succedent, |_| true) {
                let (Some(d0), Some(g1)) = (minus(&l.succedent, &[a]), minus(&r.antecedent, &[a]))
                else {
                    continue;
                };
                if ms_eq(ca, &plus(&l.antecedent, &g1)) && ms_eq(cs, &plus(&d0, &r.succedent)) {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::OrL | Rule::ImpL => {
            arity(d, 2)?;
            let (l, r) = (&p[0].sequent, &p[1].sequent);
            for main in distinct(ca, |f| match d.rule {
                Rule::OrL => matches!(f, Formula::Or(..)),
                _ => matches!(f, Formula::Imp(..)),
            }) {
                let rest = minus(ca, &[main]).expect("main is present");
                let ok = match main {
                    Formula::Or(a, b) => {
                        let (Some(g0), Some(g1)) =
                            (minus(&l.antecedent, &[a]), minus(&r.antecedent, &[b]))
                        else {
                            continue;
                        };
                        ms_eq(&rest, &plus(&g0, &g1))
                            && ms_eq(cs, &plus(&l.succedent, &r.succedent))
                    }
                    Formula::Imp(a, b) => {
                        let (Some(d0), Some(g1)) =
                            (minus(&l.succedent, &[a]), minus(&r.antecedent, &[b]))
                        else {
                            continue;
                        };
                        ms_eq(&rest, &plus(&l.antecedent, &g1))
                            && ms_eq(cs, &plus(&d0, &r.succedent))
                    }
                    _ => unreachable!(),
                };
                if ok {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::AndR => {
            arity(d, 2)?;
            let (l, r) = (&p[0].sequent, &p[1].sequent);
            for main in distinct(cs, |f| matches!(f, Formula::And(..))) {
                let Formula::And(a, b) = main else {
                    unreachable!()
                };
                let rest = minus(cs, &[main]).expect("main is present");
                let (Some(d0), Some(d1)) = (minus(&l.succedent, &[a]), minus(&r.succedent, &[b]))
                else {
                    continue;
                };
                if ms_eq(&rest, &plus(&d0, &d1)) && ms_eq(ca, &plus(&l.antecedent, &r.antecedent)) {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::OrR | Rule::AndL => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let right = d.rule == Rule::OrR;
            let (side, qside, other, qother) = if right {
                (cs, &q.succedent, ca, &q.antecedent)
            } else {
                (ca, &q.antecedent, cs, &q.succedent)
            };
            if !ms_eq(other, qother) {
                return mismatch();
            }
            for main in distinct(side, |f| {
                if right {
                    matches!(f, Formula::Or(..))
                } else {
                    matches!(f, Formula::And(..))
                }
            }) {
                let (Formula::Or(a0, a1) | Formula::And(a0, a1)) = main else {
                    unreachable!()
                };
                let rest = minus(side, &[main]).expect("main is present");
                for ai in [a0, a1] {
                    if ms_eq(qside, &plus(&rest, &[(**ai).clone()])) {
                        return Ok(());
                    }
                }
            }
            mismatch()
        }
        Rule::ImpR => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            for main in distinct(cs, |f| matches!(f, Formula::Imp(..))) {
                let Formula::Imp(a, b) = main else {
                    unreachable!()
                };
                let rest = minus(cs, &[main]).expect("main is present");
                if ms_eq(&q.antecedent, &plus(ca, &[(**a).clone()]))
                    && ms_eq(&q.succedent, &plus(&rest, &[(**b).clone()]))
                {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::NegL | Rule::NegR => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let left = d.rule == Rule::NegL;
            let (side, qside, other, qother) = if left {
                (ca, &q.antecedent, cs, &q.succedent)
            } else {
                (cs, &q.succedent, ca, &q.antecedent)
            };
            for main in distinct(side, |f| matches!(f, Formula::Neg(..))) {
                let Formula::Neg(a) = main else {
                    unreachable!()
                };
                let rest = minus(side, &[main]).expect("main is present");
                if ms_eq(qside, &rest) && ms_eq(qother, &plus(other, &[(**a).clone()])) {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::BoxL => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            if !ms_eq(cs, &q.succedent) {
                return mismatch();
            }
            for main in distinct(ca, Formula::is_box) {
                let rest = minus(ca, &[main]).expect("main is present");
                let body = main.unbox().expect("boxed").clone();
                if ms_eq(&q.antecedent, &plus(&rest, &[body])) {
                    return Ok(());
                }
            }
            mismatch()
        }
        Rule::Box4R | Rule::BoxSR | Rule::Glr => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let bodies = boxed_context(ca)?;
            let [main] = cs.as_slice() else {
                return Err(format!("succedent of {c} must be a single boxed formula"));
            };
            let Some(a) = main.unbox() else {
                return Err(format!("succedent formula {main} is not boxed"));
            };
            let expected = match d.rule {
                Rule::Box4R => plus(&bodies, ca),
                Rule::BoxSR => ca.clone(),
                _ => plus(&plus(&bodies, ca), std::slice::from_ref(main)),
            };
            if q.succedent.as_slice() == [a.clone()] && ms_eq(&q.antecedent, &expected) {
                return Ok(());
            }
            Err(format!("premise {q} does not match conclusion {c}"))
        }
        Rule::BoxDR => {
            arity(d, 1)?;
            let q = &p[0].sequent;
            let bodies = boxed_context(ca)?;
            if cs.is_empty() && q.succedent.is_empty() && ms_eq(&q.antecedent, &plus(&bodies, ca)) {
                return Ok(());
            }
            Err(format!("premise {q} does not match conclusion {c}"))
        }
    }
}
