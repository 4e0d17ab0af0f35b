//! Cross-validation campaigns over formula corpora, each producing a [`CrosscheckReport`].

mod corpus;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use corpus::{corpus_size, generate_corpus, unrank, Corpus, CorpusEntry, CorpusParams};

use crate::kripke::{
    check, check_int, enumerate_frames, find_countermodel, validate_frame, FrameClass, KripkeModel,
};
use crate::modal_provers::{
    check_derivation, decide, prove, verify_evidence, Budget, Derivation, Logic, ProveResult,
};
use crate::prop_provers::{
    compare_semantics, decide_prop, prove_prop, translate_sequent, EngineVerdict, PropEvidence,
    PropLogic,
};
use crate::provability_semantics::{translate_k4_to_gl, validate_assignment, TranslationT};
use crate::syntax::{Formula, PropFormula, Sequent};
use crate::transform::transfer_report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Propositional verdicts against the modal verdict of the translation, plus direct
    /// semantics where available.
    Translation(PropLogic),
    /// A modal degree bounded K4 non-theorem has no GL-provable relativized translation.
    Relativization,
    /// Unwinding preserves truth in both directions.
    Unwinding,
    /// Prover evidence and bounded model search agree.
    Oracle(Logic),
    /// Theorem-set inclusions between the logics.
    Lattice,
}

impl Suite {
    pub fn all() -> Vec<Suite> {
        let mut out: Vec<Suite> = [
            PropLogic::Bpc,
            PropLogic::Ebpc,
            PropLogic::Ipc,
            PropLogic::Fpl,
            PropLogic::Mpc,
            PropLogic::Cpc,
        ]
        .into_iter()
        .map(Suite::Translation)
        .collect();
        out.extend([Suite::Relativization, Suite::Unwinding]);
        out.extend([Logic::K4, Logic::KD4, Logic::S4, Logic::GL].map(Suite::Oracle));
        out.push(Suite::Lattice);
        out
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Suite::Translation(l) => write!(f, "t99-{}", l.to_string().to_lowercase()),
            Suite::Relativization => f.write_str("t33"),
            Suite::Unwinding => f.write_str("l34"),
            Suite::Oracle(l) => write!(f, "oracle-{}", l.to_string().to_lowercase()),
            Suite::Lattice => f.write_str("lattice"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown suite `{0}`")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let all = Suite::all();
        let mut candidates = all.iter().copied().chain([Suite::Oracle(Logic::GLS)]);
        candidates
            .find(|suite| suite.to_string() == lower)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Bounds shared by every suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    #[serde(skip)]
    pub budget: Budget,
    /// Node bound of the exhaustive refutation search in oracle suites.
    pub oracle_nodes: usize,
    /// Node bound of the direct propositional semantics.
    pub semantic_nodes: usize,
    /// Largest number a relativizing translation may assign.
    pub t_max: u64,
    pub relativization_max_degree: usize,
    pub unwinding_instances: usize,
    pub unwinding_max_nodes: usize,
    pub unwinding_max_degree: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            budget: Budget::default(),
            oracle_nodes: 6,
            semantic_nodes: 5,
            t_max: 3,
            relativization_max_degree: 2,
            unwinding_instances: 200,
            unwinding_max_nodes: 5,
            unwinding_max_degree: 2,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Agree,
    Disagree,
    Exhausted,
    EvidenceFailure,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    /// Canonical corpus rank, or the instance number for sampled suites.
    pub index: String,
    pub formula: String,
    pub verdicts: BTreeMap<String, String>,
    /// Truncated SHA-256 of the evidence JSON.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Sub-checks performed for this item (translations tried, nodes compared, ...).
    pub checks: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, u64>,
    #[serde(skip)]
    rules: BTreeMap<String, u64>,
}

impl Record {
    fn new(index: impl ToString, formula: impl ToString) -> Self {
        Record {
            index: index.to_string(),
            formula: formula.to_string(),
            verdicts: BTreeMap::new(),
            evidence: None,
            status: Status::Agree,
            detail: None,
            checks: 0,
            notes: BTreeMap::new(),
            rules: BTreeMap::new(),
        }
    }

    fn verdict(&mut self, engine: &str, v: impl ToString) {
        self.verdicts.insert(engine.to_string(), v.to_string());
    }

    fn note(&mut self, key: &str) {
        *self.notes.entry(key.to_string()).or_default() += 1;
    }

    /// Worse outcomes win: evidence failure over disagreement over exhaustion.
    fn set(&mut self, status: Status, detail: impl ToString) {
        let rank = |s: Status| match s {
            Status::Agree => 0,
            Status::Exhausted => 1,
            Status::Disagree => 2,
            Status::EvidenceFailure => 3,
        };
        if rank(status) > rank(self.status) {
            self.status = status;
            self.detail = Some(detail.to_string());
        }
    }

    fn count_rules(&mut self, d: &Derivation) {
        d.visit(&mut |node| *self.rules.entry(node.rule.name().to_string()).or_default() += 1);
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub items: usize,
    pub agreements: usize,
    pub disagreements: usize,
    pub exhausted: usize,
    pub evidence_failures: usize,
    pub checks: u64,
    pub notes: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrosscheckReport {
    pub suite: String,
    pub corpus: CorpusParams,
    pub budget_steps: u64,
    pub max_nodes: usize,
    pub config: SuiteConfig,
    pub summary: Summary,
    /// How often each rule occurs in the derivations produced by the suite.
    pub rule_coverage: BTreeMap<String, u64>,
    pub records: Vec<Record>,
}

impl CrosscheckReport {
    /// Zero disagreements and zero evidence failures. Exhaustions are reported separately.
    pub fn success(&self) -> bool {
        self.summary.disagreements == 0 && self.summary.evidence_failures == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records
            .iter()
            .filter(|r| matches!(r.status, Status::Disagree | Status::EvidenceFailure))
    }
}

fn digest(value: &impl Serialize) -> String {
    let json = serde_json::to_vec(value).expect("evidence serializes");
    let hash = Sha256::digest(&json);
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn verdict_name(provable: bool) -> &'static str {
    if provable {
        "provable"
    } else {
        "not_provable"
    }
}

/// Runs `suite` over `corpus`. Items run in parallel; records come back in corpus order.
pub fn run_suite(suite: Suite, corpus: &Corpus, config: &SuiteConfig) -> CrosscheckReport {
    let records: Vec<Record> = match suite {
        Suite::Oracle(logic) => corpus
            .entries
            .par_iter()
            .map(|e| oracle_item(logic, e, config))
            .collect(),
        Suite::Translation(logic) => corpus
            .entries
            .par_iter()
            .filter(|e| e.formula.is_box_free())
            .map(|e| translation_item(logic, e, config))
            .collect(),
        Suite::Relativization => corpus
            .entries
            .par_iter()
            .filter(|e| e.formula.modal_degree() <= config.relativization_max_degree)
            .map(|e| relativization_item(e, config))
            .collect(),
        Suite::Unwinding => unwinding_instances(corpus, config)
            .into_par_iter()
            .map(|inst| unwinding_item(inst, config))
            .collect(),
        Suite::Lattice => corpus
            .entries
            .par_iter()
            .map(|e| lattice_item(e, config))
            .collect(),
    };
    let mut summary = Summary {
        items: records.len(),
        ..Summary::default()
    };
    let mut rule_coverage = BTreeMap::new();
    for r in &records {
        match r.status {
            Status::Agree => summary.agreements += 1,
            Status::Disagree => summary.disagreements += 1,
            Status::Exhausted => summary.exhausted += 1,
            Status::EvidenceFailure => summary.evidence_failures += 1,
        }
        summary.checks += r.checks;
        for (k, v) in &r.notes {
            *summary.notes.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &r.rules {
            *rule_coverage.entry(k.clone()).or_default() += v;
        }
    }
    CrosscheckReport {
        suite: suite.to_string(),
        corpus: corpus.params.clone(),
        budget_steps: config.budget.steps,
        max_nodes: config.budget.max_nodes,
        config: *config,
        summary,
        rule_coverage,
        records,
    }
}

fn oracle_item(logic: Logic, e: &CorpusEntry, config: &SuiteConfig) -> Record {
    let mut rec = Record::new(e.index, &e.formula);
    let s = Sequent::goal(e.formula.clone());
    let result = match prove(logic, &s, &config.budget) {
        Ok(r) => r,
        Err(err) => {
            rec.verdict("prover", "exhausted");
            rec.set(Status::Exhausted, err);
            return rec;
        }
    };
    rec.checks += 1;
    rec.verdict("prover", verdict_name(result.is_provable()));
    if let Err(err) = verify_evidence(logic, &s, &result) {
        rec.set(Status::EvidenceFailure, err);
    }
    let target = result
        .reduced()
        .map(Sequent::as_formula)
        .unwrap_or_else(|| e.formula.clone());
    match &result {
        ProveResult::Provable { derivation, .. } => {
            rec.evidence = Some(digest(&derivation.to_json()));
            rec.count_rules(derivation);
            match find_countermodel(&target, logic.frame_class(), config.oracle_nodes) {
                Some(cm) => {
                    rec.verdict("oracle", "refuted");
                    rec.set(
                        Status::Disagree,
                        format!(
                            "provable, yet refuted by {}",
                            serde_json::to_string(&cm).unwrap_or_default()
                        ),
                    );
                }
                None => rec.verdict("oracle", format!("valid_up_to_{}", config.oracle_nodes)),
            }
        }
        ProveResult::NotProvable { countermodel, .. } => {
            rec.evidence = Some(digest(countermodel));
            rec.verdict("oracle", "refuted");
            *rec.notes
                .entry(format!("countermodel_nodes_{}", countermodel.model.len()))
                .or_default() += 1;
        }
    }
    rec
}

/// Re-verifies propositional evidence; returns a reason on failure.
fn check_prop_evidence(logic: PropLogic, a: &PropFormula, ev: &PropEvidence) -> Result<(), String> {
    let (modal, translated) = translate_sequent(logic, &[], a);
    match ev {
        PropEvidence::Derivation(d) => {
            let concl = &d.sequent;
            if concl.antecedent.len() != translated.antecedent.len()
                || concl.succedent != translated.succedent
            {
                return Err(format!(
                    "derivation concludes {concl}, expected {translated}"
                ));
            }
            check_derivation(modal, d).map_err(|e| e.to_string())
        }
        PropEvidence::Semantic(cm) => {
            let flavor = logic
                .semantics()
                .ok_or("semantic evidence for a logic without semantics")?;
            match check_int(&cm.model, cm.node, a, flavor) {
                Ok(false) => Ok(()),
                Ok(true) => Err("propositional countermodel forces the formula".into()),
                Err(e) => Err(e.to_string()),
            }
        }
        PropEvidence::Modal(cm) => {
            if !validate_frame(&cm.model, modal.frame_class()).is_empty() {
                return Err("modal countermodel outside the frame class".into());
            }
            match check(&cm.model, cm.node, &translated.as_formula()) {
                Ok(false) => Ok(()),
                _ => Err("modal countermodel does not refute the translation".into()),
            }
        }
    }
}

fn translation_item(logic: PropLogic, e: &CorpusEntry, config: &SuiteConfig) -> Record {
    let mut rec = Record::new(e.index, &e.formula);
    let a = match PropFormula::new(e.formula.clone()) {
        Ok(a) => a,
        Err(err) => {
            rec.set(Status::EvidenceFailure, err);
            return rec;
        }
    };
    let (modal, translated) = translate_sequent(logic, &[], &a);
    let prop = prove_prop(logic, &[], &a, &config.budget);
    let direct = prove(modal, &translated, &config.budget);
    let translation = match &prop {
        Ok(v) => {
            rec.verdict("prop", verdict_name(v.provable));
            rec.evidence = Some(digest(v));
            if let PropEvidence::Derivation(d) = &v.evidence {
                rec.count_rules(d);
            }
            if let Err(why) = check_prop_evidence(logic, &a, &v.evidence) {
                rec.set(Status::EvidenceFailure, why);
            }
            if v.provable {
                EngineVerdict::Provable
            } else {
                EngineVerdict::NotProvable
            }
        }
        Err(err) => {
            rec.verdict("prop", "exhausted");
            rec.set(Status::Exhausted, err);
            EngineVerdict::Exhausted
        }
    };
    match &direct {
        Ok(r) => {
            rec.verdict("modal", verdict_name(r.is_provable()));
            if let Err(err) = verify_evidence(modal, &translated, r) {
                rec.set(Status::EvidenceFailure, err);
            }
            if let Ok(v) = &prop {
                if v.provable != r.is_provable() {
                    rec.set(
                        Status::Disagree,
                        format!("{logic} and {modal} on {translated} differ"),
                    );
                }
            }
        }
        Err(err) => {
            rec.verdict("modal", "exhausted");
            rec.set(Status::Exhausted, err);
        }
    }
    rec.checks += 2;
    if logic.semantics().is_some() {
        let cc = compare_semantics(logic, &a, translation, config.semantic_nodes)
            .expect("logic has semantics");
        rec.checks += 1;
        rec.verdict(
            "semantics",
            if cc.semantically_valid {
                format!("valid_up_to_{}", config.semantic_nodes)
            } else {
                "refuted".to_string()
            },
        );
        if cc.hard_failure {
            rec.set(
                Status::Disagree,
                "refuted by a persistent model but provable by translation",
            );
        } else if !cc.agree && translation == EngineVerdict::NotProvable {
            rec.note("semantic_refutation_beyond_bound");
        }
    }
    rec
}

/// Every valid translation of `a` with entries at most `t_max`, in lexicographic order.
pub fn valid_translations(a: &Formula, t_max: u64) -> Vec<TranslationT> {
    let boxes = a.box_count();
    let mut out = Vec::new();
    let mut cur = vec![0u64; boxes];
    loop {
        if validate_assignment(a, &cur).is_ok() {
            out.push(TranslationT(cur.clone()));
        }
        let mut i = boxes;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < t_max {
                cur[i] += 1;
                cur[i + 1..].fill(0);
                break;
            }
        }
    }
}

fn relativization_item(e: &CorpusEntry, config: &SuiteConfig) -> Record {
    let mut rec = Record::new(e.index, &e.formula);
    let steps = config.budget.steps;
    let k4 = match decide(Logic::K4, &Sequent::goal(e.formula.clone()), steps) {
        Ok(b) => b,
        Err(err) => {
            rec.verdict("k4", "exhausted");
            rec.set(Status::Exhausted, err);
            return rec;
        }
    };
    rec.verdict("k4", verdict_name(k4));
    let ts = valid_translations(&e.formula, config.t_max);
    let mut gl_provable = 0;
    for t in &ts {
        let at = translate_k4_to_gl(&e.formula, t).expect("enumerated translations are valid");
        rec.checks += 1;
        match decide(Logic::GL, &Sequent::goal(at), steps) {
            Ok(true) => {
                gl_provable += 1;
                if !k4 {
                    rec.set(Status::Disagree, format!("GL proves the translation under t={t} but K4 does not prove the formula"));
                }
            }
            Ok(false) => {}
            Err(err) => rec.set(Status::Exhausted, format!("t={t}: {err}")),
        }
    }
    rec.verdict(
        "gl_provable_translations",
        format!("{gl_provable}/{}", ts.len()),
    );
    if k4 {
        rec.note(if gl_provable == ts.len() {
            "converse_all_t"
        } else {
            "converse_fails_some_t"
        });
    }
    rec
}

/// One sampled input of the unwinding suite.
#[derive(Clone, Debug)]
pub struct UnwindingInstance {
    pub id: usize,
    pub model: KripkeModel,
    pub formula: Formula,
    pub t: TranslationT,
}

/// Samples models of at most `unwinding_max_nodes` nodes from the K4 frames with random
/// valuations, corpus formulas with at least one box and modal degree within bounds, and
/// uniformly chosen valid translations.
pub fn unwinding_instances(corpus: &Corpus, config: &SuiteConfig) -> Vec<UnwindingInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let frames = enumerate_frames(FrameClass::K4Frame, config.unwinding_max_nodes, false);
    let formulas: Vec<&Formula> = corpus
        .formulas()
        .filter(|f| !f.is_box_free() && f.modal_degree() <= config.unwinding_max_degree)
        .collect();
    if formulas.is_empty() || frames.is_empty() {
        return Vec::new();
    }
    (0..config.unwinding_instances)
        .map(|id| {
            let frame = frames.choose(&mut rng).expect("frames exist");
            let formula = (*formulas.choose(&mut rng).expect("formulas exist")).clone();
            let atoms: Vec<std::sync::Arc<str>> = formula.atoms().into_iter().collect();
            let full = (1u64 << frame.len()) - 1;
            let masks: Vec<u32> = atoms
                .iter()
                .map(|_| rng.gen_range(0..=full) as u32)
                .collect();
            let model = frame.to_model(&atoms, &masks);
            let ts = valid_translations(&formula, config.t_max);
            let t = ts
                .choose(&mut rng)
                .expect("some translation is valid")
                .clone();
            UnwindingInstance {
                id,
                model,
                formula,
                t,
            }
        })
        .collect()
}

fn unwinding_item(inst: UnwindingInstance, _config: &SuiteConfig) -> Record {
    let mut rec = Record::new(inst.id, &inst.formula);
    rec.verdict("t", &inst.t);
    rec.verdict("model_nodes", inst.model.len());
    let nodes: Vec<usize> = (0..inst.model.len()).collect();
    match transfer_report(&inst.model, &inst.formula, &inst.t, &nodes) {
        Ok(report) => {
            rec.checks = report.checked as u64;
            rec.verdict("unwound_nodes", report.unwound_nodes);
            rec.verdict("gl_frame", report.frame_ok);
            if !report.frame_ok {
                rec.set(
                    Status::Disagree,
                    "unwound model is not transitive and irreflexive",
                );
            }
            if let Some(f) = report.failures.first() {
                rec.set(
                    Status::Disagree,
                    format!(
                        "{} at {} is {}, but its translation differs at {}",
                        f.subformula, f.node, f.holds_at_node, f.copy
                    ),
                );
            }
            rec.evidence = Some(digest(&inst.model.to_json()));
        }
        Err(err) => rec.set(Status::EvidenceFailure, err),
    }
    rec
}

const MODAL_INCLUSIONS: [(Logic, Logic); 4] = [
    (Logic::K4, Logic::KD4),
    (Logic::KD4, Logic::S4),
    (Logic::K4, Logic::GL),
    (Logic::GL, Logic::GLS),
];

const PROP_INCLUSIONS: [(PropLogic, PropLogic); 5] = [
    (PropLogic::Bpc, PropLogic::Ebpc),
    (PropLogic::Ebpc, PropLogic::Ipc),
    (PropLogic::Ipc, PropLogic::Cpc),
    (PropLogic::Bpc, PropLogic::Fpl),
    (PropLogic::Mpc, PropLogic::Ipc),
];

fn lattice_item(e: &CorpusEntry, config: &SuiteConfig) -> Record {
    let mut rec = Record::new(e.index, &e.formula);
    let steps = config.budget.steps;
    let mut modal = BTreeMap::new();
    for logic in Logic::ALL {
        match decide(logic, &Sequent::goal(e.formula.clone()), steps) {
            Ok(b) => {
                rec.verdict(&logic.to_string(), verdict_name(b));
                modal.insert(logic, b);
            }
            Err(err) => rec.set(Status::Exhausted, format!("{logic}: {err}")),
        }
    }
    for (small, big) in MODAL_INCLUSIONS {
        if let (Some(&a), Some(&b)) = (modal.get(&small), modal.get(&big)) {
            rec.checks += 1;
            if a && !b {
                rec.set(
                    Status::Disagree,
                    format!("{small} proves it but {big} does not"),
                );
            }
        }
    }
    let Ok(a) = PropFormula::new(e.formula.clone()) else {
        return rec;
    };
    let mut prop = BTreeMap::new();
    for logic in PropLogic::ALL {
        match decide_prop(logic, &[], &a, steps) {
            Ok(b) => {
                rec.verdict(&logic.to_string(), verdict_name(b));
                prop.insert(logic, b);
            }
            Err(err) => rec.set(Status::Exhausted, format!("{logic}: {err}")),
        }
    }
    for (small, big) in PROP_INCLUSIONS {
        if let (Some(&x), Some(&y)) = (prop.get(&small), prop.get(&big)) {
            rec.checks += 1;
            if x && !y {
                rec.set(
                    Status::Disagree,
                    format!("{small} proves it but {big} does not"),
                );
            }
        }
    }
    // Disjunction property of BPC.
    if let (Formula::Or(l, r), Some(true)) = (a.formula(), prop.get(&PropLogic::Bpc)) {
        rec.checks += 1;
        let side = |x: &Formula| {
            PropFormula::new(x.clone())
                .ok()
                .and_then(|x| decide_prop(PropLogic::Bpc, &[], &x, steps).ok())
        };
        match (side(l), side(r)) {
            (Some(false), Some(false)) => rec.set(
                Status::Disagree,
                "BPC proves the disjunction but neither disjunct",
            ),
            (Some(_), Some(_)) => rec.note("disjunction_property_checked"),
            _ => rec.set(Status::Exhausted, "disjunct undecided"),
        }
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_modal;

    fn small(params: CorpusParams) -> Corpus {
        generate_corpus(&CorpusParams {
            sample: Some(60),
            ..params
        })
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::all() {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(
            "t99-ipc".parse::<Suite>().unwrap(),
            Suite::Translation(PropLogic::Ipc)
        );
        assert!("t98".parse::<Suite>().is_err());
    }

    #[test]
    fn valid_translation_enumeration() {
        let a = parse_modal("[]p -> [][]p").unwrap();
        let ts = valid_translations(&a, 3);
        // outer > inner: 4 choices for the lone box, 6 ordered pairs for the nested ones.
        assert_eq!(ts.len(), 24);
        assert!(ts.contains(&"1,2,1".parse().unwrap()));
        assert_eq!(
            valid_translations(&parse_modal("p").unwrap(), 3),
            vec![TranslationT::default()]
        );
    }

    #[test]
    fn small_suites_pass() {
        let config = SuiteConfig {
            unwinding_instances: 10,
            ..SuiteConfig::default()
        };
        let modal = small(CorpusParams {
            max_connectives: 4,
            ..CorpusParams::default()
        });
        let prop = small(CorpusParams {
            max_connectives: 4,
            ..CorpusParams::box_free()
        });
        for suite in Suite::all() {
            let corpus = if matches!(suite, Suite::Translation(_)) {
                &prop
            } else {
                &modal
            };
            let report = run_suite(suite, corpus, &config);
            assert!(report.success(), "{suite}: {:?}", report.failures().next());
            assert_eq!(report.summary.exhausted, 0, "{suite}");
            assert!(report.summary.items > 0, "{suite}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let corpus = small(CorpusParams {
            max_connectives: 3,
            ..CorpusParams::default()
        });
        let config = SuiteConfig::default();
        let a =
            serde_json::to_string(&run_suite(Suite::Oracle(Logic::K4), &corpus, &config)).unwrap();
        let b =
            serde_json::to_string(&run_suite(Suite::Oracle(Logic::K4), &corpus, &config)).unwrap();
        assert_eq!(a, b);
    }
}
